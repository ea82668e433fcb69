//! Executes a validated configuration and writes its artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use eit_qhe_core::brightness::integrate_brightness_with_rates;
use eit_qhe_core::{
    derive_rates, lambda_ratio, rho0, rho1, spectrum_with_rates, RowFlag, SpectrumRow, SystemParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::verify;

pub const SPECTRUM_HEADER: [&str; 9] = [
    "delta_over_gamma31",
    "im_rho13_0",
    "rho33_1",
    "sigmaA_over_sigma0",
    "sigmaE_over_sigma0",
    "sigmaEIT",
    "sigmaSGC",
    "bblack_over_n13",
    "flag",
];

pub const SWEEP_P_HEADER: [&str; 9] = [
    "p",
    "im_rho13_0_at_resonance",
    "rho33_1_at_resonance",
    "sigmaA_at_resonance",
    "lambda",
    "peak_sigmaE_over_sigma0",
    "peak_sigmaE_delta_over_gamma31",
    "peak_bblack_over_n13",
    "peak_bblack_delta_over_gamma31",
];

pub const SWEEP_2D_HEADER: [&str; 5] = [
    "p",
    "omegaC_over_gamma31",
    "peak_bblack_over_n13",
    "peak_delta_over_gamma31",
    "flagged_rows",
];

pub const PROFILE_HEADER: [&str; 3] = ["z_tilde", "b_over_n13", "bblack_over_n13"];

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Physics(#[from] eit_qhe_core::Error),
}

impl RunError {
    fn io(path: &Path, source: impl Into<io::Error>) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source: source.into(),
        }
    }
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// Rows or checks whose independent routes disagreed.
    pub consistency_failures: usize,
}

/// Round-trip exact representation; NaN becomes an empty field.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

fn format_option(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

fn spectrum_record(row: &SpectrumRow) -> Vec<String> {
    vec![
        format_value(row.delta_over_gamma31),
        format_value(row.im_rho13_0),
        format_value(row.rho33_1),
        format_value(row.sigma_a),
        format_value(row.sigma_e),
        format_value(row.sigma_eit),
        format_value(row.sigma_sgc),
        format_option(row.b_black_over_n13),
        row.flag.label(),
    ]
}

struct Output<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Output<'_> {
    fn csv<I, R>(&mut self, name: &str, header: &[&str], records: I) -> Result<(), RunError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| RunError::io(&path, e))?;
        w.write_record(header).map_err(|e| RunError::io(&path, e))?;
        for r in records {
            w.write_record(r).map_err(|e| RunError::io(&path, e))?;
        }
        w.flush().map_err(|e| RunError::io(&path, e))?;
        self.summary.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| RunError::io(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| RunError::io(&path, e))?;
        self.summary.files.push(path);
        Ok(())
    }
}

fn is_inconsistent(row: &SpectrumRow) -> bool {
    matches!(row.flag, RowFlag::Inconsistent(_))
}

/// Largest `B_black/n₁₃` over the rows and where it occurs.
pub fn brightness_peak(rows: &[SpectrumRow]) -> Option<(f64, f64)> {
    rows.iter()
        .filter_map(|r| r.b_black_over_n13.map(|b| (b, r.delta_over_gamma31)))
        .fold(None, |best, (b, d)| match best {
            Some((bb, _)) if bb >= b => best,
            _ => Some((b, d)),
        })
}

fn emission_peak(rows: &[SpectrumRow]) -> Option<(f64, f64)> {
    rows.iter()
        .filter(|r| !r.sigma_e.is_nan())
        .map(|r| (r.sigma_e, r.delta_over_gamma31))
        .fold(None, |best, (s, d)| match best {
            Some((bs, _)) if bs >= s => best,
            _ => Some((s, d)),
        })
}

/// `Display` of `p` without trailing zeros, used in file names.
fn p_tag(p: f64) -> String {
    format!("p{p}")
}

pub fn run(config: &RunConfig, mode: Mode, out_dir: Option<&Path>) -> Result<RunSummary, RunError> {
    if let Some(m) = config.mode {
        if m != mode {
            return Err(RunError::Config(format!(
                "mode: config requests `{}` but `{}` was given on the command line",
                m.name(),
                mode.name()
            )));
        }
    }
    let dir = out_dir.unwrap_or(&config.outputs.dir);
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    let mut out = Output {
        dir,
        summary: RunSummary::default(),
    };
    let detuning: Vec<f64> = config
        .grids
        .detuning
        .points()
        .iter()
        .map(|x| x * config.gamma31)
        .collect();

    match mode {
        Mode::Spectrum => run_spectrum(config, &detuning, &mut out)?,
        Mode::SweepP => run_sweep_p(config, &detuning, &mut out)?,
        Mode::Sweep2d => run_sweep_2d(config, &detuning, &mut out)?,
        Mode::Verify => {
            let report = verify::run(&config.params, &config.grids.p, &detuning);
            out.summary.consistency_failures += report.checks.iter().filter(|c| !c.passed).count();
            out.json("verify_report.json", &report)?;
        }
        Mode::BrightnessProfile => run_profiles(config, &mut out)?,
    }
    Ok(out.summary)
}

fn run_spectrum(config: &RunConfig, detuning: &[f64], out: &mut Output) -> Result<(), RunError> {
    for &p in &config.grids.p {
        let params = config.params.with_p(p);
        let rows = spectrum_with_rates(&params, &derive_rates(&params)?, detuning)?;
        out.summary.consistency_failures += rows.iter().filter(|r| is_inconsistent(r)).count();
        let stem = format!("spectrum_{}", p_tag(p));
        if config.outputs.csv {
            out.csv(
                &format!("{stem}.csv"),
                &SPECTRUM_HEADER,
                rows.iter().map(spectrum_record),
            )?;
        }
        if config.outputs.json {
            out.json(&format!("{stem}.json"), &rows)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct SweepPRow {
    p: f64,
    im_rho13_0_at_resonance: f64,
    rho33_1_at_resonance: f64,
    sigma_a_at_resonance: f64,
    lambda: f64,
    peak_sigma_e: Option<(f64, f64)>,
    peak_bblack_over_n13: Option<(f64, f64)>,
}

fn sweep_p_row(params: &SystemParams, detuning: &[f64]) -> Result<(SweepPRow, usize), RunError> {
    let rates = derive_rates(params)?;
    let zeroth = rho0(params, &rates, 0.0)?;
    let first = rho1(params, &rates, 0.0, &zeroth)?;
    let at_zero = spectrum_with_rates(params, &rates, &[0.0])?;
    let rows = spectrum_with_rates(params, &rates, detuning)?;
    let inconsistent = rows
        .iter()
        .chain(&at_zero)
        .filter(|r| is_inconsistent(r))
        .count();
    Ok((
        SweepPRow {
            p: params.p,
            im_rho13_0_at_resonance: zeroth.rho13.im,
            rho33_1_at_resonance: first.rho33,
            sigma_a_at_resonance: at_zero[0].sigma_a,
            lambda: lambda_ratio(&zeroth)?,
            peak_sigma_e: emission_peak(&rows),
            peak_bblack_over_n13: brightness_peak(&rows),
        },
        inconsistent,
    ))
}

fn run_sweep_p(config: &RunConfig, detuning: &[f64], out: &mut Output) -> Result<(), RunError> {
    let results: Vec<(SweepPRow, usize)> = config
        .grids
        .p
        .par_iter()
        .map(|&p| sweep_p_row(&config.params.with_p(p), detuning))
        .collect::<Result<_, _>>()?;
    out.summary.consistency_failures += results.iter().map(|(_, n)| n).sum::<usize>();
    let rows: Vec<SweepPRow> = results.into_iter().map(|(r, _)| r).collect();
    if config.outputs.csv {
        let records = rows.iter().map(|r| {
            vec![
                format_value(r.p),
                format_value(r.im_rho13_0_at_resonance),
                format_value(r.rho33_1_at_resonance),
                format_value(r.sigma_a_at_resonance),
                format_value(r.lambda),
                format_option(r.peak_sigma_e.map(|x| x.0)),
                format_option(r.peak_sigma_e.map(|x| x.1)),
                format_option(r.peak_bblack_over_n13.map(|x| x.0)),
                format_option(r.peak_bblack_over_n13.map(|x| x.1)),
            ]
        });
        out.csv("sweep_p.csv", &SWEEP_P_HEADER, records)?;
    }
    if config.outputs.json {
        out.json("sweep_p.json", &rows)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub p: f64,
    pub omega_c_over_gamma31: f64,
    pub peak: Option<(f64, f64)>,
    pub flagged_rows: usize,
    #[serde(skip)]
    pub rows: Vec<SpectrumRow>,
}

/// Full spectra for every `(p, Ωc)` cell, in row-major order over `p` then `Ωc`.
pub fn sweep_2d(
    params: &SystemParams,
    p_grid: &[f64],
    omega_c_grid: &[f64],
    gamma31: f64,
    detuning: &[f64],
) -> Result<Vec<SweepCell>, RunError> {
    let cells: Vec<(f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| omega_c_grid.iter().map(move |&o| (p, o)))
        .collect();
    cells
        .par_iter()
        .map(|&(p, o)| {
            let prm = params.with_p(p).with_omega_c(o * gamma31);
            let rows = spectrum_with_rates(&prm, &derive_rates(&prm)?, detuning)?;
            Ok(SweepCell {
                p,
                omega_c_over_gamma31: o,
                peak: brightness_peak(&rows),
                flagged_rows: rows.iter().filter(|r| r.flag != RowFlag::Ok).count(),
                rows,
            })
        })
        .collect()
}

fn run_sweep_2d(config: &RunConfig, detuning: &[f64], out: &mut Output) -> Result<(), RunError> {
    let cells = sweep_2d(
        &config.params,
        &config.grids.p,
        &config.grids.omega_c,
        config.gamma31,
        detuning,
    )?;
    out.summary.consistency_failures += cells
        .iter()
        .flat_map(|c| &c.rows)
        .filter(|r| is_inconsistent(r))
        .count();
    if config.outputs.csv {
        let summary = cells.iter().map(|c| {
            vec![
                format_value(c.p),
                format_value(c.omega_c_over_gamma31),
                format_option(c.peak.map(|x| x.0)),
                format_option(c.peak.map(|x| x.1)),
                c.flagged_rows.to_string(),
            ]
        });
        out.csv("sweep_2d.csv", &SWEEP_2D_HEADER, summary)?;

        let header: Vec<&str> = ["p", "omegaC_over_gamma31"]
            .into_iter()
            .chain(SPECTRUM_HEADER)
            .collect();
        let long = cells.iter().flat_map(|c| {
            c.rows.iter().map(move |r| {
                let mut rec = vec![format_value(c.p), format_value(c.omega_c_over_gamma31)];
                rec.extend(spectrum_record(r));
                rec
            })
        });
        out.csv("sweep_2d_rows.csv", &header, long)?;
    }
    if config.outputs.json {
        out.json("sweep_2d.json", &cells)?;
    }
    Ok(())
}

fn run_profiles(config: &RunConfig, out: &mut Output) -> Result<(), RunError> {
    let opts = &config.brightness;
    for &p in &config.grids.p {
        let params = config.params.with_p(p);
        let rates = derive_rates(&params)?;
        let profile = match integrate_brightness_with_rates(
            &params,
            &rates,
            opts.delta * config.gamma31,
            opts.z_tilde_max,
            opts.n_steps,
        ) {
            Ok(profile) => profile,
            Err(e @ eit_qhe_core::Error::ConsistencyFailure { .. }) => {
                eprintln!("warning: p={p}: {e}");
                out.summary.consistency_failures += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let stem = format!("brightness_profile_{}", p_tag(p));
        if config.outputs.csv {
            let bb = format_option(profile.b_black.map(|b| b / rates.n13));
            let records = profile
                .z_tilde
                .iter()
                .zip(profile.scaled(rates.n13))
                .map(|(z, b)| vec![format_value(*z), format_value(b), bb.clone()]);
            out.csv(&format!("{stem}.csv"), &PROFILE_HEADER, records)?;
        }
        if config.outputs.json {
            out.json(&format!("{stem}.json"), &profile)?;
        }
    }
    Ok(())
}
