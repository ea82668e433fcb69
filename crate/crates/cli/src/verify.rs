//! Self-contained oracle and invariant suite behind `eit-qhe verify`.
//!
//! Every check compares two independent routes (closed form against the full
//! master equation, RK4 against the exact exponential, and so on) and records
//! the worst residual next to its tolerance. Reference values quoted for the
//! reference engine are reported separately and never affect the outcome.

use eit_qhe_core::brightness::{integrate_brightness_with_rates, DEFAULT_STEPS};
use eit_qhe_core::crosssections::probe_response;
use eit_qhe_core::sampling::draw_params;
use eit_qhe_core::{
    black_body_limit, build_generator, derive_rates, extract_coefficients, lambda_ratio, propagate,
    rho0, rho1, sigma_a, sigma_e, sigma_sgc_closed_form, spectrum, spectrum_with_rates,
    steady_state, Complex64, DensityMatrix, DerivedRates, Result, SystemParams,
};
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const ORACLE_DRAWS: usize = 200;
pub const PHYSICALITY_DRAWS: usize = 100;
pub const CLOSURE_DRAWS: usize = 50;
pub const BRIGHTNESS_DRAWS: usize = 100;

const SEED: u64 = 0x00e1_7a9e;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn from_result(name: &'static str, tolerance: f64, outcome: Result<(f64, String)>) -> Self {
        match outcome {
            Ok((residual, detail)) => Check {
                name,
                passed: residual.is_finite() && residual <= tolerance,
                residual,
                tolerance,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                residual: f64::NAN,
                tolerance,
                detail: e.to_string(),
            },
        }
    }
}

/// A computed quantity next to a published value for the reference engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceValue {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    /// Relative tolerance unless `absolute` is set.
    pub tolerance: f64,
    pub absolute: bool,
    pub within: bool,
}

impl ReferenceValue {
    pub fn relative(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        ReferenceValue {
            name: name.into(),
            computed,
            expected,
            tolerance,
            absolute: false,
            within: (computed - expected).abs() <= tolerance * expected.abs(),
        }
    }

    pub fn absolute(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        ReferenceValue {
            name: name.into(),
            computed,
            expected,
            tolerance,
            absolute: true,
            within: (computed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub params: SystemParams,
    pub all_passed: bool,
    pub checks: Vec<Check>,
    pub reference_values: Vec<ReferenceValue>,
}

pub fn run(params: &SystemParams, p_grid: &[f64], detuning_grid: &[f64]) -> VerifyReport {
    let checks = all_checks(params, p_grid, detuning_grid);
    VerifyReport {
        params: *params,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
        reference_values: reference_values(params).unwrap_or_default(),
    }
}

pub fn all_checks(params: &SystemParams, p_grid: &[f64], detuning_grid: &[f64]) -> Vec<Check> {
    vec![
        generator_trace_preservation(params),
        generator_hermiticity_preservation(params),
        steady_state_uniqueness(),
        steady_state_residual(),
        sgc_off_coherences(params),
        propagation_reaches_steady_state(params),
        rk4_order(params),
        zeroth_order_oracle(),
        state_physicality(params),
        population_closure(params),
        first_order_scaling(params),
        two_level_anchor(params),
        absorption_p_invariance(params),
        decomposition_closure(),
        sgc_consistency(params, p_grid, detuning_grid),
        no_sgc_reduction(params, detuning_grid),
        brightness_analytic(),
        brightness_fixed_point(),
        threshold_classification(),
    ]
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Matrix3<Complex64> {
    Matrix3::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn generator_trace_preservation(params: &SystemParams) -> Check {
    let outcome = (|| {
        let rates = derive_rates(params)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst = 0.0f64;
        for k in 0..100 {
            let delta = (k as f64 - 50.0) * 0.06 * rates.dephasing31;
            let gen = build_generator(params, &rates, delta)?;
            let rho = random_matrix(&mut rng);
            let out = gen.apply(&rho);
            worst = worst.max(out.trace().norm() / (gen.norm() * rho.norm()));
        }
        Ok((
            worst,
            "max |tr G(rho)| / (|G| |rho|) over 100 random rho".into(),
        ))
    })();
    Check::from_result("generator_trace_preservation", 1e-12, outcome)
}

pub fn generator_hermiticity_preservation(params: &SystemParams) -> Check {
    let outcome = (|| {
        let rates = derive_rates(params)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        let mut worst = 0.0f64;
        for k in 0..100 {
            let delta = (k as f64 - 50.0) * 0.06 * rates.dephasing31;
            let gen = build_generator(params, &rates, delta)?;
            let m = random_matrix(&mut rng);
            let rho = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let out = gen.apply(&rho);
            worst = worst.max((out - out.adjoint()).camax() / (gen.norm() * rho.norm()));
        }
        Ok((
            worst,
            "max |G(rho) - G(rho)^H| / (|G| |rho|) over 100 Hermitian rho".into(),
        ))
    })();
    Check::from_result("generator_hermiticity_preservation", 1e-12, outcome)
}

pub fn steady_state_uniqueness() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
        let mut deficient = 0usize;
        for _ in 0..ORACLE_DRAWS {
            let (params, delta) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            if build_generator(&params, &rates, delta)?.constrained_rank() != 9 {
                deficient += 1;
            }
        }
        Ok((
            deficient as f64,
            format!("{deficient} of {ORACLE_DRAWS} draws with constrained rank < 9"),
        ))
    })();
    Check::from_result("steady_state_uniqueness", 0.0, outcome)
}

pub fn steady_state_residual() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
        let mut worst = 0.0f64;
        for _ in 0..ORACLE_DRAWS {
            let (params, delta) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            let gen = build_generator(&params, &rates, delta)?;
            let rho = steady_state(&gen)?;
            let residual = gen.apply(rho.matrix()).norm() / (gen.norm() * rho.matrix().norm());
            worst = worst.max(residual);
        }
        Ok((
            worst,
            format!("max |G(rho)| / (|G| |rho|) over {ORACLE_DRAWS} draws"),
        ))
    })();
    Check::from_result("steady_state_residual", 1e-10, outcome)
}

pub fn sgc_off_coherences(params: &SystemParams) -> Check {
    let outcome = (|| {
        let off = params.with_p(0.0).with_g(0.0);
        let rates = derive_rates(&off)?;
        let mut worst = 0.0f64;
        for k in -30..=30 {
            let delta = k as f64 * 0.1 * rates.dephasing31;
            let rho = steady_state(&build_generator(&off, &rates, delta)?)?;
            worst = worst.max(rho.get(1, 2).norm()).max(rho.get(1, 3).norm());
        }
        Ok((worst, "max |rho12|, |rho13| with p = 0, g = 0".into()))
    })();
    Check::from_result("sgc_off_coherences", 1e-12, outcome)
}

/// Hot reservoirs shorten the slowest relaxation time so that the
/// time-domain checks stay cheap; the generator structure is unchanged.
fn fast_relaxing(params: &SystemParams) -> SystemParams {
    SystemParams {
        t13: 20000.0,
        t23: 15000.0,
        g: params.omega_c / 50.0,
        coupling_detuning: 0.06 * params.omega_c,
        ..*params
    }
}

pub fn propagation_reaches_steady_state(params: &SystemParams) -> Check {
    let outcome = (|| {
        let fast = fast_relaxing(params);
        let rates = derive_rates(&fast)?;
        let gen = build_generator(&fast, &rates, 0.08 * params.omega_c)?;
        let ss = steady_state(&gen)?;
        let out = propagate(&gen, &DensityMatrix::diagonal(1.0, 0.0, 0.0), 2e-4, 2e-9)?;
        let deviation = (out.matrix() - ss.matrix()).camax();
        let drift = (out.trace().re - 1.0).abs();
        Ok((
            deviation,
            format!("max |rho(t) - rho_ss| after 2e-4 s; trace drift {drift:.3e}"),
        ))
    })();
    Check::from_result("propagation_reaches_steady_state", 1e-6, outcome)
}

pub fn rk4_order(params: &SystemParams) -> Check {
    let outcome = (|| {
        let fast = fast_relaxing(params);
        let rates = derive_rates(&fast)?;
        let gen = build_generator(&fast, &rates, 0.08 * params.omega_c)?;
        let start = DensityMatrix::diagonal(1.0, 0.0, 0.0);
        let t = 2e-7;
        let reference = propagate(&gen, &start, t, 1e-11)?;
        let err = |dt: f64| -> Result<f64> {
            Ok((propagate(&gen, &start, t, dt)?.matrix() - reference.matrix()).camax())
        };
        let ratio = err(1e-8)? / err(5e-9)?;
        Ok((
            (ratio / 16.0 - 1.0).abs(),
            format!("error ratio under step halving {ratio:.3} (ideal 16)"),
        ))
    })();
    Check::from_result("rk4_fourth_order", 0.3, outcome)
}

fn max_elementwise(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).camax()
}

pub fn zeroth_order_oracle() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
        let mut worst = 0.0f64;
        for _ in 0..ORACLE_DRAWS {
            let (params, delta) = draw_params(&mut rng);
            let params = params.with_g(0.0);
            let rates = derive_rates(&params)?;
            let closed = rho0(&params, &rates, delta)?.to_density_matrix();
            let numeric = steady_state(&build_generator(&params, &rates, delta)?)?;
            worst = worst.max(max_elementwise(&closed, &numeric));
        }
        Ok((
            worst,
            format!("max elementwise |rho0 - steady state| over {ORACLE_DRAWS} draws, g = 0"),
        ))
    })();
    Check::from_result("zeroth_order_oracle", 1e-8, outcome)
}

/// Worst normalized violation of the three physicality bounds (1 = at the limit).
pub fn physicality_violation(rho: &DensityMatrix) -> f64 {
    let herm = rho.hermiticity_error() / 1e-12;
    let trace = (rho.trace() - Complex64::new(1.0, 0.0)).norm() / 1e-10;
    let negativity = (-rho.eigenvalues()[0]).max(0.0) / 1e-10;
    herm.max(trace).max(negativity)
}

pub fn state_physicality(params: &SystemParams) -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
        let mut worst = 0.0f64;
        let mut count = 0usize;
        let mut visit = |p: &SystemParams, d: f64| -> Result<()> {
            let rates = derive_rates(p)?;
            let rho = steady_state(&build_generator(p, &rates, d)?)?;
            worst = worst.max(physicality_violation(&rho));
            count += 1;
            Ok(())
        };
        for _ in 0..PHYSICALITY_DRAWS {
            let (p, d) = draw_params(&mut rng);
            visit(&p, d)?;
            visit(&p.with_g(0.0), d)?;
        }
        let y31 = derive_rates(params)?.dephasing31;
        for k in -30..=30 {
            visit(params, k as f64 * 0.1 * y31)?;
        }
        Ok((
            worst,
            format!(
                "{count} steady states; worst of hermiticity/1e-12, |tr-1|/1e-10, -min eig/1e-10"
            ),
        ))
    })();
    Check::from_result("state_physicality", 1.0, outcome)
}

pub fn population_closure(params: &SystemParams) -> Check {
    let outcome = (|| {
        let rates = derive_rates(params)?;
        let mut worst = 0.0f64;
        for p in [0.0, 0.35, 0.7, 1.0] {
            let prm = params.with_p(p);
            let z = rho0(&prm, &rates, 0.0)?;
            worst = worst.max((z.rho11 + z.rho22 + z.rho33 - 1.0).abs());
        }
        Ok((
            worst,
            "|rho11 + rho22 + rho33 - 1| of the closed form".into(),
        ))
    })();
    Check::from_result("population_closure", 1e-12, outcome)
}

fn first_order_residual(params: &SystemParams) -> Result<f64> {
    let rates = derive_rates(params)?;
    let zeroth = rho0(params, &rates, 0.0)?;
    let first = rho1(params, &rates, 0.0, &zeroth)?;
    let exact = steady_state(&build_generator(params, &rates, 0.0)?)?;
    Ok((first.rho33 - exact.population(3))
        .abs()
        .max((first.rho13 - exact.get(1, 3)).norm()))
}

/// Residual ratio of the first-order `(ρ₃₃, ρ₁₃)` when `g` is halved, for `p`
/// in `{0, params.p}`. Returns the ratios.
pub fn first_order_ratios(params: &SystemParams) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for p in [0.0, params.p] {
        let base = params.with_p(p);
        let ratio =
            first_order_residual(&base.with_g(2e4))? / first_order_residual(&base.with_g(1e4))?;
        out.push((p, ratio));
    }
    Ok(out)
}

pub fn first_order_scaling(params: &SystemParams) -> Check {
    let outcome = first_order_ratios(params).map(|ratios| {
        let worst = ratios
            .iter()
            .map(|(_, r)| (r / 4.0 - 1.0).abs())
            .fold(0.0, f64::max);
        let detail = ratios
            .iter()
            .map(|(p, r)| format!("p={p}: ratio {r:.4}"))
            .collect::<Vec<_>>()
            .join("; ");
        (
            worst,
            format!("residual ratio g=2e4 vs 1e4 (ideal 4): {detail}"),
        )
    });
    Check::from_result("first_order_g2_scaling", 0.2, outcome)
}

pub fn two_level_anchor(params: &SystemParams) -> Check {
    let outcome = (|| {
        let bare = params.with_p(0.0).with_omega_c(1e-2);
        let rates = DerivedRates::with_occupations(&bare, 1e-6, 1e-6);
        let sa = sigma_a(&bare, &rates, 0.0)?;
        Ok(((sa - 1.0).abs(), format!("sigma_A/sigma_0 = {sa}")))
    })();
    Check::from_result("two_level_normalization", 1e-9, outcome)
}

pub fn absorption_p_invariance(params: &SystemParams) -> Check {
    let outcome = (|| {
        let y31 = derive_rates(params)?.dephasing31;
        let grid: Vec<f64> = (-30..=30).map(|k| k as f64 * 0.1 * y31).collect();
        let curve = |p: f64| -> Result<Vec<f64>> {
            let prm = params.with_p(p);
            let rates = derive_rates(&prm)?;
            grid.iter().map(|&d| sigma_a(&prm, &rates, d)).collect()
        };
        let base = curve(0.0)?;
        let mut worst = 0.0f64;
        for k in 1..=7 {
            for (a, b) in curve(k as f64 * 0.1)?.iter().zip(&base) {
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
        Ok((
            worst,
            "max relative deviation of sigma_A over p = 0.1..0.7".into(),
        ))
    })();
    Check::from_result("absorption_p_invariance", 1e-8, outcome)
}

pub fn decomposition_closure() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
        let mut worst = 0.0f64;
        for _ in 0..CLOSURE_DRAWS {
            let (params, d) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            let pops = rho0(&params, &rates, d)?.populations();
            let c = extract_coefficients(&params, &rates, d)?;
            let direct = probe_response(&params, &rates, d, &pops);
            let scale =
                c.c11.abs() * pops.rho11 + c.c22.abs() * pops.rho22 + c.c33.abs() * pops.rho33;
            worst = worst.max((c.evaluate(&pops) - direct).abs() / scale);
        }
        Ok((
            worst,
            format!("c11 rho11 + c22 rho22 + c33 rho33 vs -g Im rho13, {CLOSURE_DRAWS} draws"),
        ))
    })();
    Check::from_result("decomposition_closure", 1e-10, outcome)
}

/// Worst relative gap between `σ_EIT + σ_SGC` (closed form) and direct extraction.
pub fn sgc_consistency_residual(
    params: &SystemParams,
    p_grid: &[f64],
    detuning_grid: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &p in p_grid {
        let prm = params.with_p(p);
        let rates = derive_rates(&prm)?;
        for &d in detuning_grid {
            let closed = sigma_sgc_closed_form(&prm, &rates, d)?;
            let eit = sigma_e(&prm, &rates.without_sgc(), d)?.sigma_e_extracted;
            let full = sigma_e(&prm, &rates, d)?.sigma_e_extracted;
            let extracted = full - eit;
            let scale = full.abs().max(eit.abs());
            worst = worst.max((closed - extracted).abs() / scale);
        }
    }
    Ok(worst)
}

pub fn sgc_consistency(params: &SystemParams, p_grid: &[f64], detuning_grid: &[f64]) -> Check {
    let outcome = sgc_consistency_residual(params, p_grid, detuning_grid).map(|w| {
        (
            w,
            format!(
                "closed-form sigma_SGC vs extracted sigma_E - sigma_EIT over {} p x {} detunings",
                p_grid.len(),
                detuning_grid.len()
            ),
        )
    });
    Check::from_result("sgc_closed_form_vs_extraction", 0.05, outcome)
}

pub fn no_sgc_reduction(params: &SystemParams, detuning_grid: &[f64]) -> Check {
    let outcome = (|| {
        let rates = derive_rates(params)?;
        let p0 = spectrum(&params.with_p(0.0), detuning_grid)?;
        let eit = spectrum_with_rates(params, &rates.without_sgc(), detuning_grid)?;
        let mismatched = p0.iter().zip(&eit).filter(|(a, b)| a != b).count();
        let nonzero_sgc = p0.iter().filter(|r| r.sigma_sgc != 0.0).count();
        Ok((
            (mismatched + nonzero_sgc) as f64,
            format!("{mismatched} rows differ from the gamma_s = 0 engine; {nonzero_sgc} rows with sigma_SGC != 0"),
        ))
    })();
    Check::from_result("gamma_s_zero_reduction", 0.0, outcome)
}

pub fn brightness_analytic() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
        let mut worst = 0.0f64;
        for _ in 0..BRIGHTNESS_DRAWS {
            let (params, d) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            let profile = integrate_brightness_with_rates(&params, &rates, d, None, DEFAULT_STEPS)?;
            for (z, b) in profile.z_tilde.iter().zip(&profile.b).skip(1) {
                let exact = profile.transfer.analytic(*z);
                worst = worst.max((b - exact).abs() / exact.abs());
            }
        }
        Ok((
            worst,
            "max relative |B_rk4 - B_exact| over every sample".into(),
        ))
    })();
    Check::from_result("brightness_analytic_solution", 1e-8, outcome)
}

pub fn brightness_fixed_point() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
        let mut worst = 0.0f64;
        let mut below = 0usize;
        for _ in 0..BRIGHTNESS_DRAWS {
            let (params, d) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            let profile = integrate_brightness_with_rates(&params, &rates, d, None, DEFAULT_STEPS)?;
            let z = rho0(&params, &rates, d)?;
            let xs = sigma_e(&params, &rates, d)?;
            if let Ok(limit) = black_body_limit(lambda_ratio(&z)?, xs.sigma_a, xs.sigma_e) {
                below += 1;
                worst = worst.max((profile.last() - limit).abs() / limit.abs());
            }
        }
        Ok((
            worst,
            format!("B(end) vs black-body limit, {below} below-threshold draws"),
        ))
    })();
    Check::from_result("brightness_fixed_point", 1e-6, outcome)
}

pub fn threshold_classification() -> Check {
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
        let mut disagreements = 0usize;
        for _ in 0..BRIGHTNESS_DRAWS {
            let (params, d) = draw_params(&mut rng);
            let rates = derive_rates(&params)?;
            let profile = integrate_brightness_with_rates(&params, &rates, d, None, DEFAULT_STEPS)?;
            let z = rho0(&params, &rates, d)?;
            let xs = sigma_e(&params, &rates, d)?;
            let limit = black_body_limit(lambda_ratio(&z)?, xs.sigma_a, xs.sigma_e);
            if limit.is_err() != profile.above_threshold {
                disagreements += 1;
            }
        }
        Ok((
            disagreements as f64,
            format!("{disagreements} classification disagreements"),
        ))
    })();
    Check::from_result("threshold_classification", 0.0, outcome)
}

/// Quantities with published counterparts for the reference engine.
pub struct ReferenceQuantities {
    pub lambda: f64,
    pub n23: f64,
    pub rho33_1: f64,
    /// `(p, Im ρ₁₃⁽⁰⁾ at Δ = 0)`.
    pub gain: Vec<(f64, f64)>,
    /// `(p, max over Δ of σ_E/σ₀)`.
    pub emission_peaks: Vec<(f64, f64)>,
    /// Peak `B_black/n₁₃` over Δ at `p = 0.7`, `Ωc = 0.7 γ₃₁`.
    pub brightness_peak: Option<f64>,
}

pub const PUBLISHED_EMISSION_PEAKS: [(f64, f64); 4] =
    [(0.1, 0.56), (0.3, 1.0), (0.5, 1.8), (0.7, 3.0)];

pub fn reference_quantities(params: &SystemParams) -> Result<ReferenceQuantities> {
    let rates = derive_rates(params)?;
    let y31 = rates.dephasing31;
    let zeroth = rho0(params, &rates, 0.0)?;
    let lambda = lambda_ratio(&zeroth)?;
    let at_07 = params.with_p(0.7);
    let r07 = derive_rates(&at_07)?;
    let rho33_1 = rho1(&at_07, &r07, 0.0, &rho0(&at_07, &r07, 0.0)?)?.rho33;
    let grid: Vec<f64> = (-300..=300).map(|k| k as f64 * 0.01 * y31).collect();

    let mut gain = Vec::new();
    let mut emission_peaks = Vec::new();
    for (p, _) in PUBLISHED_EMISSION_PEAKS {
        let prm = params.with_p(p);
        let r = derive_rates(&prm)?;
        gain.push((p, rho0(&prm, &r, 0.0)?.rho13.im));
        let rows = spectrum_with_rates(&prm, &r, &grid)?;
        let peak = rows
            .iter()
            .map(|row| row.sigma_e)
            .fold(f64::NEG_INFINITY, f64::max);
        emission_peaks.push((p, peak));
    }
    let bright = at_07.with_omega_c(0.7 * y31);
    let brightness_peak = spectrum(&bright, &grid)?
        .iter()
        .filter_map(|r| r.b_black_over_n13)
        .fold(None, |m: Option<f64>, b| Some(m.map_or(b, |m| m.max(b))));
    Ok(ReferenceQuantities {
        lambda,
        n23: rates.n23,
        rho33_1,
        gain,
        emission_peaks,
        brightness_peak,
    })
}

pub fn reference_values(params: &SystemParams) -> Result<Vec<ReferenceValue>> {
    let q = reference_quantities(params)?;
    let mut out = vec![
        ReferenceValue::absolute("lambda", q.lambda, 0.019, 0.001),
        ReferenceValue::relative("lambda_vs_n23", q.lambda, q.n23, 0.05),
        ReferenceValue::relative("rho33_1_p0.7_resonance", q.rho33_1, 1.2e-3, 0.2),
    ];
    for ((p, peak), (_, published)) in q.emission_peaks.iter().zip(PUBLISHED_EMISSION_PEAKS) {
        out.push(ReferenceValue::relative(
            format!("sigmaE_peak_p{p}"),
            *peak,
            published,
            0.2,
        ));
    }
    if let Some(b) = q.brightness_peak {
        out.push(ReferenceValue::relative(
            "bblack_peak_over_n13_p0.7_omegac0.7",
            b,
            370.0,
            0.25,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physicality_metric() {
        assert_eq!(
            physicality_violation(&DensityMatrix::diagonal(0.5, 0.25, 0.25)),
            0.0
        );
        assert!(physicality_violation(&DensityMatrix::diagonal(1.1, 0.0, -0.1)) > 1.0);
    }

    #[test]
    fn failed_computation_fails_the_check() {
        let bad = SystemParams::reference().with_p(3.0);
        let c = population_closure(&bad);
        assert!(!c.passed && c.residual.is_nan());
    }

    #[test]
    fn reference_values_cover_every_published_number() {
        let v = reference_values(&SystemParams::reference()).unwrap();
        let names: Vec<&str> = v.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names.len(), 8, "{names:?}");
        assert!(names.contains(&"lambda") && names.contains(&"sigmaE_peak_p0.7"));
    }
}
