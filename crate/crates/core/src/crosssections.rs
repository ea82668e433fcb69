//! Absorption and emission cross-sections in units of σ₀.
//!
//! The net probe emission rate through first order, `W = −g·Im ρ₁₃`, is linear
//! in the zeroth-order populations once the SGC coherences and the `ρ₃₃` shift
//! are written in terms of `ρ₃₃`:
//!
//! ```text
//! W = c₁₁ρ₁₁ + c₂₂ρ₂₂ + c₃₃ρ₃₃ = −σ̃_A ρ₁₁ + σ̃_E (ρ₂₂ + ρ₃₃)
//! ```
//!
//! Cross-sections are normalised by `γ₃₁/g²`, which makes the bare two-level
//! resonant absorption cross-section exactly 1. The SGC part of `σ_E` carries a
//! term proportional to `γₛ γ₃₁ / g` (the zeroth-order SGC coherence radiates
//! into the probe mode), so emission depends on the probe coupling itself.

use serde::{Deserialize, Serialize};

use crate::model::{DerivedRates, SystemParams};
use crate::perturbative::{first_order_from_populations, population_denominator, Populations};
use crate::{perturbative, Error, Result};

/// Maximum relative disagreement between the closed form and the extraction.
pub const CONSISTENCY_TOLERANCE: f64 = 0.05;

/// Coefficients of `W` on the three zeroth-order populations (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTriple {
    pub c11: f64,
    pub c22: f64,
    pub c33: f64,
}

impl CoefficientTriple {
    pub fn evaluate(&self, pops: &Populations) -> f64 {
        self.c11 * pops.rho11 + self.c22 * pops.rho22 + self.c33 * pops.rho33
    }
}

/// Cross-sections in units of σ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSections {
    pub sigma_a: f64,
    /// `sigma_eit + sigma_sgc`.
    pub sigma_e: f64,
    pub sigma_eit: f64,
    pub sigma_sgc: f64,
    /// Emission cross-section read directly off the coefficients at the actual γₛ.
    pub sigma_e_extracted: f64,
}

fn normalization(params: &SystemParams, rates: &DerivedRates) -> Result<f64> {
    if !(params.g > 0.0) {
        return Err(Error::invalid(
            "g",
            "cross-sections need a non-zero probe coupling",
        ));
    }
    Ok(rates.dephasing31 / (params.g * params.g))
}

/// `W = −g·Im ρ₁₃` through first order, for the given populations.
pub fn probe_response(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    pops: &Populations,
) -> f64 {
    let (_, rho13) = first_order_from_populations(params, rates, delta31, pops);
    -params.g * rho13.im
}

pub fn extract_coefficients(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
) -> Result<CoefficientTriple> {
    // rho0 performs the parameter and resonance checks.
    perturbative::rho0(params, rates, delta31)?;
    let w = |pops: &Populations| probe_response(params, rates, delta31, pops);
    Ok(CoefficientTriple {
        c11: w(&Populations::GROUND),
        c22: w(&Populations::METASTABLE),
        c33: w(&Populations::EXCITED),
    })
}

/// σ_A/σ₀.
pub fn sigma_a(params: &SystemParams, rates: &DerivedRates, delta31: f64) -> Result<f64> {
    let c = extract_coefficients(params, rates, delta31)?;
    Ok(-c.c11 * normalization(params, rates)?)
}

/// Population-weighted emission cross-section `(c₂₂ρ₂₂ + c₃₃ρ₃₃)/(ρ₂₂+ρ₃₃)·γ₃₁/g²`.
fn extracted_emission(params: &SystemParams, rates: &DerivedRates, delta31: f64) -> Result<f64> {
    let z = perturbative::rho0(params, rates, delta31)?;
    let upper = z.rho22 + z.rho33;
    if !(upper > 0.0) {
        return Err(Error::invalid(
            "t13",
            "no upper-manifold population; emission cross-section is undefined",
        ));
    }
    let c = extract_coefficients(params, rates, delta31)?;
    Ok((c.c22 * z.rho22 + c.c33 * z.rho33) / upper * normalization(params, rates)?)
}

/// Full set of cross-sections, with the closed-form SGC part cross-checked
/// against direct extraction.
pub fn sigma_e(params: &SystemParams, rates: &DerivedRates, delta31: f64) -> Result<CrossSections> {
    let sigma_a = sigma_a(params, rates, delta31)?;
    let sigma_eit = extracted_emission(params, &rates.without_sgc(), delta31)?;
    let sigma_sgc = sigma_sgc_closed_form(params, rates, delta31)?;
    let sigma_e_extracted = extracted_emission(params, rates, delta31)?;
    let sigma_e = sigma_eit + sigma_sgc;

    let scale = sigma_e_extracted
        .abs()
        .max(sigma_eit.abs())
        .max(f64::MIN_POSITIVE);
    let relative = (sigma_e - sigma_e_extracted).abs() / scale;
    if relative > CONSISTENCY_TOLERANCE || !relative.is_finite() {
        return Err(Error::ConsistencyFailure {
            closed_form: sigma_e,
            extracted: sigma_e_extracted,
            relative,
        });
    }
    Ok(CrossSections {
        sigma_a,
        sigma_e,
        sigma_eit,
        sigma_sgc,
        sigma_e_extracted,
    })
}

/// Closed form of the SGC contribution to σ_E/σ₀.
///
/// ```text
/// σ_SGC = γₛ (γ₃₁/g) 𝒟 − γₛ² 2γ₃₁Ωc²K (𝒜 + ℬ + 𝒞) / (|D|⁴ Den F)
///
/// K   = R₂₃γ₃₂ + Ωc²
/// F   = 2R₂₃γ₃₂ + γ₃₂Γ₃₂ + 2Ωc²
/// 𝒜   = (R₁₃γ₃₁ + K) |D|²
/// ℬ   = K Re(D²)
/// 𝒞   = R₁₃ Re[(γ₃₁ − 2iΔ) conj(D)²]
/// 𝒟   = 2Ωc K Re(D) / (F |D|²)
/// ```
///
/// Written with real polynomials in `Δ` so that it shares no code with the
/// complex-valued extraction path.
pub fn sigma_sgc_closed_form(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
) -> Result<f64> {
    params.validate()?;
    normalization(params, rates)?;
    let gs = rates.gamma_s;
    if gs == 0.0 {
        return Ok(0.0);
    }
    let y21 = rates.dephasing21;
    let y31 = rates.dephasing31;
    let y32 = rates.dephasing32;
    let (r13, r23) = (rates.r13, rates.r23);
    let om2 = params.omega_c * params.omega_c;
    let om4 = om2 * om2;
    let d2 = delta31 * delta31;
    let d4 = d2 * d2;

    let k = r23 * y32 + om2;
    let f = 2.0 * r23 * y32 + y32 * params.decay32 + 2.0 * om2;
    let den = population_denominator(params, rates);

    let abs_d2 =
        (y21 * y21 + 4.0 * d2) * (y31 * y31 + 4.0 * d2) + 2.0 * (y21 * y31 - 4.0 * d2) * om2 + om4;
    let re_d = y21 * y31 - 4.0 * d2 + om2;
    let skew = 2.0 * (y21 + y31) * delta31;

    let a = (r13 * y31 + k) * abs_d2;
    let b = k * (re_d - skew) * (re_d + skew);
    let c = r13
        * (y21 * y21 * y31.powi(3)
            - 12.0 * y21 * y21 * y31 * d2
            - 24.0 * y21 * y31 * y31 * d2
            - 4.0 * y31.powi(3) * d2
            + 32.0 * y21 * d4
            + 48.0 * y31 * d4
            + 2.0 * (y21 * y31 * y31 - 4.0 * (y21 + 2.0 * y31) * d2) * om2
            + y31 * om4
            + 16.0 * d2 * (y21 + y31) * re_d);
    let d_term = 2.0 * params.omega_c * k * re_d / (f * abs_d2);

    let linear = gs * y31 / params.g * d_term;
    let quadratic = -gs * gs * 2.0 * y31 * om2 * k * (a + b + c) / (abs_d2 * abs_d2 * den * f);
    Ok(linear + quadratic)
}
