//! Closed-form steady states to zeroth and first order in the probe coupling.
//!
//! Zeroth order is exact in `Ωc` at `g = 0`. The first-order expressions keep
//! every `O(g)` term, including the shift of `ρ₃₃` driven by the SGC
//! coherences, which feeds back into `ρ₁₃` through the `γₛρ₃₃` source.
//!
//! All expressions assume a resonant control field (`coupling_detuning == 0`),
//! so the two-photon detuning equals the probe detuning `Δ`. The shorthand
//! used below:
//!
//! ```text
//! Den = R₂₃Γ₃₁γ₃₂ + R₁₃γ₃₂(3R₂₃ + Γ₃₂) + (3R₁₃ + Γ₃₁)Ωc²
//! D   = (γ₃₁ − 2iΔ)(γ₂₁ − 2iΔ) + Ωc²
//! ```
//!
//! Corrections relative to previously published forms of these expressions
//! are listed in `FORMULA_ERRATA.md` at the repository root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::liouvillian::DensityMatrix;
use crate::model::{DerivedRates, SystemParams};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Three diagonal entries. Not required to be physical: the cross-section
/// extraction evaluates linear functionals on basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
}

impl Populations {
    pub const GROUND: Populations = Populations {
        rho11: 1.0,
        rho22: 0.0,
        rho33: 0.0,
    };
    pub const METASTABLE: Populations = Populations {
        rho11: 0.0,
        rho22: 1.0,
        rho33: 0.0,
    };
    pub const EXCITED: Populations = Populations {
        rho11: 0.0,
        rho22: 0.0,
        rho33: 1.0,
    };

    pub fn sum(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33
    }

    /// ρ₂₂ + ρ₃₃.
    pub fn upper(&self) -> f64 {
        self.rho22 + self.rho33
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZerothOrderSolution {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho12: Complex64,
    pub rho13: Complex64,
    pub rho23: Complex64,
}

impl ZerothOrderSolution {
    pub fn populations(&self) -> Populations {
        Populations {
            rho11: self.rho11,
            rho22: self.rho22,
            rho33: self.rho33,
        }
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let c = |x: f64| Complex64::new(x, 0.0);
        DensityMatrix::from_matrix(nalgebra::Matrix3::new(
            c(self.rho11),
            self.rho12,
            self.rho13,
            self.rho12.conj(),
            c(self.rho22),
            self.rho23,
            self.rho13.conj(),
            self.rho23.conj(),
            c(self.rho33),
        ))
    }
}

/// `ρ₃₃` and `ρ₁₃` through first order in `g` (zeroth order included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderSolution {
    pub rho33: f64,
    pub rho13: Complex64,
    pub g: f64,
    /// Set when `g ≥ Ωc`; the values are still computed.
    pub weak_field_violated: bool,
}

/// `Den`, the common denominator of the zeroth-order populations.
pub fn population_denominator(params: &SystemParams, rates: &DerivedRates) -> f64 {
    let om2 = params.omega_c * params.omega_c;
    rates.r23 * params.decay31 * rates.dephasing32
        + rates.r13 * rates.dephasing32 * (3.0 * rates.r23 + params.decay32)
        + (3.0 * rates.r13 + params.decay31) * om2
}

/// `D = (γ₃₁ − 2iΔ)(γ₂₁ − 2iΔ) + Ωc²`.
pub fn coherence_denominator(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
) -> Complex64 {
    let a = Complex64::new(rates.dephasing31, -2.0 * delta31);
    let b = Complex64::new(rates.dephasing21, -2.0 * delta31);
    a * b + params.omega_c * params.omega_c
}

fn require_resonant(params: &SystemParams) -> Result<()> {
    if params.coupling_detuning != 0.0 {
        return Err(Error::invalid(
            "coupling_detuning",
            "closed forms require a resonant control field",
        ));
    }
    Ok(())
}

/// Lower-level coherences `(ρ₁₂, ρ₁₃)` sourced by SGC, in terms of `ρ₃₃`.
pub fn sgc_coherences(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    rho33: f64,
) -> (Complex64, Complex64) {
    let d = coherence_denominator(params, rates, delta31);
    let gs = rates.gamma_s;
    let rho12 = 2.0 * gs * rho33 * Complex64::new(rates.dephasing31, -2.0 * delta31) / d;
    let rho13 = -2.0 * I * gs * rho33 * params.omega_c / d;
    (rho12, rho13)
}

/// First-order shift of `ρ₃₃` driven by the zeroth-order coherences.
pub fn population_shift(
    params: &SystemParams,
    rates: &DerivedRates,
    rho12: Complex64,
    rho13: Complex64,
) -> f64 {
    let om = params.omega_c;
    let den = population_denominator(params, rates);
    params.g * ((rates.r23 * rates.dephasing32 + om * om) * rho13.im - om * rates.r13 * rho12.re)
        / den
}

/// `ρ₁₃` through first order, given zeroth-order populations and the
/// first-order `ρ₃₃`.
pub fn first_order_coherence(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    pops: &Populations,
    rho33_first: f64,
) -> Complex64 {
    let g = params.g;
    let om = params.omega_c;
    let d = coherence_denominator(params, rates, delta31);
    let ladder = Complex64::new(rates.dephasing21, -2.0 * delta31);
    let via_control = -I * g * om * om * (pops.rho22 - pops.rho33) / rates.dephasing32;
    let direct = -I * g * ladder * (pops.rho33 - pops.rho11);
    let sgc = -2.0 * I * om * rates.gamma_s * rho33_first;
    (via_control + direct + sgc) / d
}

/// First-order `(ρ₃₃, ρ₁₃)` as linear functions of the given populations.
///
/// The SGC coherences and the `ρ₃₃` shift are rebuilt from `pops.rho33`, so the
/// result is linear in `pops`; [`rho1`] is this evaluated at the physical
/// zeroth-order populations.
pub fn first_order_from_populations(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    pops: &Populations,
) -> (f64, Complex64) {
    let (rho12, rho13) = sgc_coherences(params, rates, delta31, pops.rho33);
    let rho33_first = pops.rho33 + population_shift(params, rates, rho12, rho13);
    let rho13_first = first_order_coherence(params, rates, delta31, pops, rho33_first);
    (rho33_first, rho13_first)
}

/// Zeroth-order steady state at probe detuning `delta31` (rad/s).
pub fn rho0(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
) -> Result<ZerothOrderSolution> {
    params.validate()?;
    require_resonant(params)?;
    if !delta31.is_finite() {
        return Err(Error::invalid("delta31", "must be finite"));
    }
    let den = population_denominator(params, rates);
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::invalid(
            "rates",
            format!("population denominator is {den}"),
        ));
    }
    if coherence_denominator(params, rates, delta31).norm() == 0.0 {
        return Err(Error::invalid("rates", "coherence denominator vanishes"));
    }
    let om2 = params.omega_c * params.omega_c;
    let (r13, r23) = (rates.r13, rates.r23);
    let y32 = rates.dephasing32;

    let rho11 = (r13 + params.decay31) * (r23 * y32 + om2) / den;
    let rho22 = r13 * (y32 * (r23 + params.decay32) + om2) / den;
    let rho33 = r13 * (r23 * y32 + om2) / den;
    let rho23 = -I * r13 * params.decay32 * params.omega_c / den;
    let (rho12, rho13) = sgc_coherences(params, rates, delta31, rho33);

    Ok(ZerothOrderSolution {
        rho11,
        rho22,
        rho33,
        rho12,
        rho13,
        rho23,
    })
}

/// First-order solution at the probe coupling `params.g`.
pub fn rho1(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    zeroth: &ZerothOrderSolution,
) -> Result<FirstOrderSolution> {
    params.validate()?;
    require_resonant(params)?;
    let (rho33, rho13) =
        first_order_from_populations(params, rates, delta31, &zeroth.populations());
    Ok(FirstOrderSolution {
        rho33,
        rho13,
        g: params.g,
        weak_field_violated: params.g >= params.omega_c,
    })
}

/// Λ = (ρ₂₂ + ρ₃₃) / ρ₁₁ of the zeroth-order state.
pub fn lambda_ratio(zeroth: &ZerothOrderSolution) -> Result<f64> {
    if zeroth.rho11 == 0.0 {
        return Err(Error::FullyInverted);
    }
    Ok((zeroth.rho22 + zeroth.rho33) / zeroth.rho11)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build_generator, steady_state};
    use crate::model::derive_rates;
    use approx::assert_relative_eq;

    fn reference() -> (SystemParams, DerivedRates) {
        let p = SystemParams::reference();
        (p, derive_rates(&p).unwrap())
    }

    #[test]
    fn cold_ground_reservoir_leaves_ground_state() {
        let params = SystemParams {
            t13: 0.0,
            ..SystemParams::reference()
        };
        let rates = derive_rates(&params).unwrap();
        let z = rho0(&params, &rates, 1e7).unwrap();
        assert_eq!(z.rho33, 0.0);
        assert_eq!(z.rho22, 0.0);
        assert_eq!(z.rho11, 1.0);
    }

    #[test]
    fn no_sgc_no_lower_coherence() {
        let (params, _) = reference();
        let params = params.with_p(0.0);
        let rates = derive_rates(&params).unwrap();
        let z = rho0(&params, &rates, 3e6).unwrap();
        assert_eq!(z.rho12, Complex64::new(0.0, 0.0));
        assert_eq!(z.rho13, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn populations_sum_to_one() {
        let (params, rates) = reference();
        for delta in [-1e8, 0.0, 2e7] {
            let z = rho0(&params, &rates, delta).unwrap();
            assert!((z.populations().sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_gain_deepens_with_alignment() {
        let (params, _) = reference();
        let mut last = 0.0;
        for p in [0.1, 0.3, 0.5, 0.7] {
            let prm = params.with_p(p);
            let z = rho0(&prm, &derive_rates(&prm).unwrap(), 0.0).unwrap();
            assert_eq!(z.rho13.re, 0.0);
            assert!(z.rho13.im < last, "p = {p}: {}", z.rho13.im);
            last = z.rho13.im;
        }
    }

    #[test]
    fn detuned_control_is_rejected() {
        let (params, rates) = reference();
        let params = SystemParams {
            coupling_detuning: 1e5,
            ..params
        };
        assert!(matches!(
            rho0(&params, &rates, 0.0),
            Err(Error::InvalidParameter {
                name: "coupling_detuning",
                ..
            })
        ));
    }

    #[test]
    fn matches_oracle_at_reference_point() {
        let (params, _) = reference();
        let params = params.with_g(0.0);
        let rates = derive_rates(&params).unwrap();
        for delta in [-2e8, -3e7, 0.0, 1.1e7, 7e7] {
            let z = rho0(&params, &rates, delta).unwrap().to_density_matrix();
            let oracle = steady_state(&build_generator(&params, &rates, delta).unwrap()).unwrap();
            assert!((z.matrix() - oracle.matrix()).camax() < 1e-8);
        }
    }

    #[test]
    fn first_order_vanishes_with_g() {
        let (params, rates) = reference();
        let z = rho0(&params, &rates, 0.0).unwrap();
        let f = rho1(&params.with_g(0.0), &rates, 0.0, &z).unwrap();
        assert_eq!(f.rho33, z.rho33);
        assert!((f.rho13 - z.rho13).norm() <= 1e-14 * z.rho13.norm());
        let small = rho1(&params.with_g(1e-3), &rates, 0.0, &z).unwrap();
        assert_relative_eq!(small.rho33, z.rho33, max_relative = 1e-9);
    }

    #[test]
    fn population_shift_is_linear_in_g() {
        let (params, rates) = reference();
        let z = rho0(&params, &rates, 0.0).unwrap();
        let shift = |g: f64| rho1(&params.with_g(g), &rates, 0.0, &z).unwrap().rho33 - z.rho33;
        let (s1, s2) = (shift(1e5) / 1e5, shift(3e6) / 3e6);
        assert_relative_eq!(s1, s2, max_relative = 1e-12);
        assert!(s1 != 0.0);
    }

    #[test]
    fn weak_field_flag() {
        let (params, rates) = reference();
        let z = rho0(&params, &rates, 0.0).unwrap();
        assert!(!rho1(&params, &rates, 0.0, &z).unwrap().weak_field_violated);
        let strong = params.with_g(params.omega_c);
        let f = rho1(&strong, &rates, 0.0, &z).unwrap();
        assert!(f.weak_field_violated);
        assert!(f.rho33.is_finite());
    }

    #[test]
    fn first_order_residual_is_quadratic() {
        for p in [0.0, 0.7] {
            let (params, _) = reference();
            let params = params.with_p(p);
            let rates = derive_rates(&params).unwrap();
            let delta = 0.0;
            let z = rho0(&params, &rates, delta).unwrap();
            let residual = |g: f64| {
                let prm = params.with_g(g);
                let f = rho1(&prm, &rates, delta, &z).unwrap();
                let num = steady_state(&build_generator(&prm, &rates, delta).unwrap()).unwrap();
                (num.get(1, 3) - f.rho13)
                    .norm()
                    .max((num.population(3) - f.rho33).abs())
            };
            let ratio = residual(2e4) / residual(1e4);
            assert!((ratio - 4.0).abs() <= 0.8, "p = {p}: ratio {ratio}");
        }
    }

    #[test]
    fn lambda_edge_cases() {
        let ground = ZerothOrderSolution {
            rho11: 1.0,
            rho22: 0.0,
            rho33: 0.0,
            rho12: Complex64::default(),
            rho13: Complex64::default(),
            rho23: Complex64::default(),
        };
        assert_eq!(lambda_ratio(&ground).unwrap(), 0.0);
        let inverted = ZerothOrderSolution {
            rho11: 0.0,
            rho22: 0.5,
            rho33: 0.5,
            ..ground
        };
        assert_eq!(lambda_ratio(&inverted), Err(Error::FullyInverted));
    }
}
