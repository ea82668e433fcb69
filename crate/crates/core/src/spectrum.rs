//! Per-detuning rows combining the steady state, cross-sections and the
//! saturated brightness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brightness::black_body_limit;
use crate::crosssections::sigma_e;
use crate::model::{derive_rates, DerivedRates, SystemParams};
use crate::perturbative::{lambda_ratio, rho0, rho1};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RowFlag {
    Ok,
    /// Gain exceeds absorption; `B_black` is not defined.
    AboveThreshold,
    /// A component failed for this detuning; unavailable values are NaN.
    Error(String),
    /// The closed-form and extracted emission cross-sections disagree.
    Inconsistent(String),
}

impl RowFlag {
    /// Short machine-readable label.
    pub fn label(&self) -> String {
        match self {
            RowFlag::Ok => "ok".into(),
            RowFlag::AboveThreshold => "above_threshold".into(),
            RowFlag::Error(m) => format!("error: {m}"),
            RowFlag::Inconsistent(m) => format!("inconsistent: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub delta_over_gamma31: f64,
    pub im_rho13_0: f64,
    pub rho33_1: f64,
    pub sigma_a: f64,
    pub sigma_e: f64,
    pub sigma_eit: f64,
    pub sigma_sgc: f64,
    pub b_black_over_n13: Option<f64>,
    pub flag: RowFlag,
}

impl SpectrumRow {
    fn failed(delta_over_gamma31: f64, err: &Error) -> Self {
        SpectrumRow {
            delta_over_gamma31,
            im_rho13_0: f64::NAN,
            rho33_1: f64::NAN,
            sigma_a: f64::NAN,
            sigma_e: f64::NAN,
            sigma_eit: f64::NAN,
            sigma_sgc: f64::NAN,
            b_black_over_n13: None,
            flag: match err {
                Error::ConsistencyFailure { .. } => RowFlag::Inconsistent(err.to_string()),
                _ => RowFlag::Error(err.to_string()),
            },
        }
    }
}

/// Evaluates one row per detuning (rad/s). Component failures are reported in
/// the row flag; only an invalid grid or invalid parameters abort.
pub fn spectrum(params: &SystemParams, grid: &[f64]) -> Result<Vec<SpectrumRow>> {
    let rates = derive_rates(params)?;
    spectrum_with_rates(params, &rates, grid)
}

pub fn spectrum_with_rates(
    params: &SystemParams,
    rates: &DerivedRates,
    grid: &[f64],
) -> Result<Vec<SpectrumRow>> {
    params.validate()?;
    if grid.is_empty() {
        return Err(Error::invalid("grid", "detuning grid is empty"));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid(
            "grid",
            "detuning grid contains non-finite values",
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "grid",
            "detuning grid must be strictly increasing",
        ));
    }
    Ok(grid.par_iter().map(|&d| row(params, rates, d)).collect())
}

fn row(params: &SystemParams, rates: &DerivedRates, delta31: f64) -> SpectrumRow {
    let x = delta31 / rates.dephasing31;
    match try_row(params, rates, delta31) {
        Ok(r) => r,
        Err(e) => SpectrumRow::failed(x, &e),
    }
}

fn try_row(params: &SystemParams, rates: &DerivedRates, delta31: f64) -> Result<SpectrumRow> {
    let zeroth = rho0(params, rates, delta31)?;
    let first = rho1(params, rates, delta31, &zeroth)?;
    let xs = sigma_e(params, rates, delta31)?;
    let lambda = lambda_ratio(&zeroth)?;
    let (b_black_over_n13, flag) = match black_body_limit(lambda, xs.sigma_a, xs.sigma_e) {
        Ok(b) => (Some(b / rates.n13), RowFlag::Ok),
        Err(Error::AboveThreshold { .. }) => (None, RowFlag::AboveThreshold),
        Err(e) => return Err(e),
    };
    Ok(SpectrumRow {
        delta_over_gamma31: delta31 / rates.dephasing31,
        im_rho13_0: zeroth.rho13.im,
        rho33_1: first.rho33,
        sigma_a: xs.sigma_a,
        sigma_e: xs.sigma_e,
        sigma_eit: xs.sigma_eit,
        sigma_sgc: xs.sigma_sgc,
        b_black_over_n13,
        flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(y31: f64, half_width: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| (-half_width + 2.0 * half_width * k as f64 / (n - 1) as f64) * y31)
            .collect()
    }

    #[test]
    fn rejects_bad_grids() {
        let params = SystemParams::reference();
        assert!(spectrum(&params, &[]).is_err());
        assert!(spectrum(&params, &[0.0, 0.0]).is_err());
        assert!(spectrum(&params, &[1.0, 0.0]).is_err());
        assert!(spectrum(&params, &[f64::NAN]).is_err());
    }

    #[test]
    fn component_errors_do_not_abort_the_grid() {
        // A detuned control field is outside the closed-form domain.
        let params = SystemParams {
            coupling_detuning: 1e6,
            ..SystemParams::reference()
        };
        let rows = spectrum(&params, &[-1e7, 0.0, 1e7]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| matches!(r.flag, RowFlag::Error(_))));
        assert!(rows
            .iter()
            .all(|r| r.sigma_a.is_nan() && r.b_black_over_n13.is_none()));
    }

    #[test]
    fn no_alignment_equals_no_sgc_engine() {
        let aligned = SystemParams::reference();
        let rates = derive_rates(&aligned).unwrap();
        let g = grid(rates.dephasing31, 3.0, 121);
        let eit = spectrum_with_rates(&aligned, &rates.without_sgc(), &g).unwrap();
        let p0 = spectrum(&aligned.with_p(0.0), &g).unwrap();
        assert_eq!(eit, p0);
    }

    #[test]
    fn brightness_peaks_sharply_at_resonance() {
        let params = SystemParams::reference();
        let y31 = derive_rates(&params).unwrap().dephasing31;
        let rows = spectrum(&params, &grid(y31, 3.0, 601)).unwrap();
        let b: Vec<f64> = rows.iter().map(|r| r.b_black_over_n13.unwrap()).collect();
        let (imax, bmax) = b
            .iter()
            .enumerate()
            .max_by(|a, c| a.1.total_cmp(c.1))
            .unwrap();
        assert!(rows[imax].delta_over_gamma31.abs() <= 0.05);
        // Narrow: half maximum is reached within half a linewidth.
        let above_half = b.iter().filter(|&&v| v >= 0.5 * bmax).count();
        assert!(
            (above_half as f64) * 0.01 < 0.5,
            "{above_half} points above half max"
        );
        assert!(b[0] < 0.1 * bmax && b[600] < 0.1 * bmax);
    }

    #[test]
    fn brightness_grows_with_alignment() {
        let mut last = 0.0;
        for p in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7] {
            let rows = spectrum(&SystemParams::reference().with_p(p), &[0.0]).unwrap();
            let b = rows[0].b_black_over_n13.unwrap();
            assert!(b > last, "p={p}: {b} <= {last}");
            last = b;
        }
    }
}
