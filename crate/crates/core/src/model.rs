//! Physical parameters and the rates derived from them.
//!
//! Convention: `Γ` symbols (`decay31`, `decay32`) are bare spontaneous decay
//! rates; `γ` symbols (`dephasing21`, `dephasing31`, `dephasing32`) are the
//! derived coherence dephasings. Coherence `ρᵢⱼ` decays at half of `γᵢⱼ`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants entering the Planck occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 exact/recommended values.
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Inputs describing one operating point of the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Γ₃₁, spontaneous decay 3→1 (rad/s).
    pub decay31: f64,
    /// Γ₃₂, spontaneous decay 3→2 (rad/s).
    pub decay32: f64,
    /// ω₁₃ transition frequency (rad/s).
    pub omega13: f64,
    /// ω₁₂ transition frequency (rad/s).
    pub omega12: f64,
    /// Temperature of the reservoir on 1↔3 (K).
    pub t13: f64,
    /// Temperature of the reservoir on 2↔3 (K).
    pub t23: f64,
    /// Dipole alignment `cos θ` in [0, 1].
    pub p: f64,
    /// Control-field Rabi frequency Ωc (rad/s).
    pub omega_c: f64,
    /// Probe coupling g (rad/s).
    pub g: f64,
    /// Control-field detuning Δω₃₁ − Δω₂₁ (rad/s); zero means resonant coupling.
    pub coupling_detuning: f64,
}

impl SystemParams {
    /// The operating point used throughout the reference figures.
    ///
    /// `g` is not given there; 2.5e6 rad/s (Ωc/20) is the shipped default.
    pub fn reference() -> Self {
        SystemParams {
            decay31: 1e7,
            decay32: 6e7,
            omega13: 4e15,
            omega12: 1e15,
            t13: 3778.0,
            t23: 5778.0,
            p: 0.7,
            omega_c: 5e7,
            g: 2.5e6,
            coupling_detuning: 0.0,
        }
    }

    /// ω₂₃ = ω₁₃ − ω₁₂.
    pub fn omega23(&self) -> f64 {
        self.omega13 - self.omega12
    }

    pub fn with_p(self, p: f64) -> Self {
        SystemParams { p, ..self }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        SystemParams { omega_c, ..self }
    }

    pub fn with_g(self, g: f64) -> Self {
        SystemParams { g, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("decay31", self.decay31),
            ("decay32", self.decay32),
            ("omega13", self.omega13),
            ("omega12", self.omega12),
            ("t13", self.t13),
            ("t23", self.t23),
            ("p", self.p),
            ("omega_c", self.omega_c),
            ("g", self.g),
            ("coupling_detuning", self.coupling_detuning),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        if self.decay31 <= 0.0 {
            return Err(Error::invalid("decay31", "must be > 0"));
        }
        if self.decay32 <= 0.0 {
            return Err(Error::invalid("decay32", "must be > 0"));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::invalid("omega_c", "must be > 0"));
        }
        if self.g < 0.0 {
            return Err(Error::invalid("g", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid("p", format!("{} out of [0,1]", self.p)));
        }
        if self.t13 < 0.0 {
            return Err(Error::invalid("t13", "must be >= 0"));
        }
        if self.t23 < 0.0 {
            return Err(Error::invalid("t23", "must be >= 0"));
        }
        if self.omega12 <= 0.0 {
            return Err(Error::invalid("omega12", "must be > 0"));
        }
        if self.omega13 <= self.omega12 {
            return Err(Error::invalid("omega13", "must exceed omega12"));
        }
        Ok(())
    }
}

/// Occupations, pumping rates and dephasings derived from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub n13: f64,
    pub n23: f64,
    /// R₁₃ = Γ₃₁ n₁₃.
    pub r13: f64,
    /// R₂₃ = Γ₃₂ n₂₃.
    pub r23: f64,
    /// γ₂₁ = R₁₃ + R₂₃.
    pub dephasing21: f64,
    /// γ₃₁ = Γ₃₁ + Γ₃₂ + R₂₃ + 2R₁₃.
    pub dephasing31: f64,
    /// γ₃₂ = Γ₃₁ + Γ₃₂ + 2R₂₃ + R₁₃.
    pub dephasing32: f64,
    /// SGC coefficient γₛ = p √(Γ₃₁Γ₃₂) / 2.
    pub gamma_s: f64,
}

impl DerivedRates {
    /// Rates for fixed photon occupations, bypassing the Planck formula.
    pub fn with_occupations(params: &SystemParams, n13: f64, n23: f64) -> Self {
        let r13 = params.decay31 * n13;
        let r23 = params.decay32 * n23;
        let bare = params.decay31 + params.decay32;
        DerivedRates {
            n13,
            n23,
            r13,
            r23,
            dephasing21: r13 + r23,
            dephasing31: bare + r23 + 2.0 * r13,
            dephasing32: bare + 2.0 * r23 + r13,
            gamma_s: params.p * (params.decay31 * params.decay32).sqrt() / 2.0,
        }
    }

    /// Same rates with the SGC coupling switched off.
    pub fn without_sgc(self) -> Self {
        DerivedRates {
            gamma_s: 0.0,
            ..self
        }
    }
}

/// Mean photon number per mode, `1 / (exp(ħω / k_B T) − 1)`.
///
/// Exactly zero at `T = 0`.
pub fn planck_occupation(omega: f64, temperature: f64) -> Result<f64> {
    planck_occupation_with(&PhysicalConstants::CODATA_2018, omega, temperature)
}

pub fn planck_occupation_with(
    constants: &PhysicalConstants,
    omega: f64,
    temperature: f64,
) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid("omega", format!("{omega} must be > 0")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("{temperature} must be >= 0"),
        ));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = constants.hbar * omega / (constants.k_b * temperature);
    Ok(1.0 / x.exp_m1())
}

pub fn derive_rates(params: &SystemParams) -> Result<DerivedRates> {
    params.validate()?;
    let n13 = planck_occupation(params.omega13, params.t13)?;
    let n23 = planck_occupation(params.omega23(), params.t23)?;
    Ok(DerivedRates::with_occupations(params, n13, n23))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_temperature_is_exactly_zero() {
        assert_eq!(planck_occupation(1e15, 0.0).unwrap(), 0.0);
        assert_eq!(planck_occupation(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn ln2_argument_gives_unit_occupation() {
        let c = PhysicalConstants::CODATA_2018;
        let t = 300.0;
        let omega = std::f64::consts::LN_2 * c.k_b * t / c.hbar;
        assert_relative_eq!(
            planck_occupation(omega, t).unwrap(),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn golden_occupations() {
        // 30-digit evaluations of the same formula with the same constants.
        assert_relative_eq!(
            planck_occupation(4e15, 3778.0).unwrap(),
            3.075_856_022_170_334e-4,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            planck_occupation(3e15, 5778.0).unwrap(),
            1.931_797_848_585_140_8e-2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn non_positive_frequency_is_rejected() {
        assert!(matches!(
            planck_occupation(0.0, 300.0),
            Err(Error::InvalidParameter { name: "omega", .. })
        ));
        assert!(planck_occupation(-1.0, 300.0).is_err());
        assert!(planck_occupation(1e15, -1.0).is_err());
    }

    #[test]
    fn reference_rates() {
        let r = derive_rates(&SystemParams::reference()).unwrap();
        assert_relative_eq!(r.gamma_s, 8.573_214_099_741_123e6, max_relative = 1e-12);
        assert_relative_eq!(r.r13, 3.075_856_022_170_334e3, max_relative = 1e-12);
        assert_relative_eq!(r.r23, 1.159_078_709_151_084_5e6, max_relative = 1e-12);
    }

    #[test]
    fn sgc_limits() {
        let base = SystemParams::reference();
        assert_eq!(derive_rates(&base.with_p(0.0)).unwrap().gamma_s, 0.0);
        let equal = SystemParams {
            decay31: 3e7,
            decay32: 3e7,
            p: 1.0,
            ..base
        };
        assert_relative_eq!(
            derive_rates(&equal).unwrap().gamma_s,
            1.5e7,
            max_relative = 1e-15
        );
    }

    #[test]
    fn validation_names_the_field() {
        let bad = SystemParams::reference().with_p(1.3);
        match bad.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "p"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = SystemParams {
            omega12: 5e15,
            ..SystemParams::reference()
        };
        assert!(bad.validate().is_err());
        assert!(SystemParams::reference()
            .with_omega_c(0.0)
            .validate()
            .is_err());
    }

    #[test]
    fn occupation_monotone_on_grid() {
        let omegas: Vec<f64> = (1..=20).map(|k| k as f64 * 2.5e14).collect();
        let temps: Vec<f64> = (1..=20).map(|k| k as f64 * 500.0).collect();
        for &w in &omegas {
            for pair in temps.windows(2) {
                assert!(
                    planck_occupation(w, pair[0]).unwrap() < planck_occupation(w, pair[1]).unwrap()
                );
            }
        }
        for &t in &temps {
            for pair in omegas.windows(2) {
                assert!(
                    planck_occupation(pair[0], t).unwrap() > planck_occupation(pair[1], t).unwrap()
                );
            }
        }
    }

    proptest! {
        #[test]
        fn dephasing_identity(
            d31 in 1e5f64..1e9, d32 in 1e5f64..1e9,
            n13 in 0.0f64..2.0, n23 in 0.0f64..2.0,
        ) {
            let params = SystemParams { decay31: d31, decay32: d32, ..SystemParams::reference() };
            let r = DerivedRates::with_occupations(&params, n13, n23);
            let lhs = r.dephasing21 + d31 + d32 + r.r13 + r.r23;
            prop_assert!((lhs - (r.dephasing31 + r.r23)).abs() <= 1e-12 * lhs);
            prop_assert!((lhs - (r.dephasing32 + r.r13)).abs() <= 1e-12 * lhs);
            prop_assert!(r.gamma_s <= (d31 * d32).sqrt() / 2.0);
        }

        #[test]
        fn rates_scale_with_decays(s in 0.01f64..100.0, p in 0.0f64..=1.0) {
            let params = SystemParams::reference().with_p(p);
            let scaled = SystemParams {
                decay31: params.decay31 * s,
                decay32: params.decay32 * s,
                omega_c: params.omega_c * s,
                g: params.g * s,
                ..params
            };
            let a = DerivedRates::with_occupations(&params, 0.01, 0.02);
            let b = DerivedRates::with_occupations(&scaled, 0.01, 0.02);
            for (x, y) in [
                (a.gamma_s, b.gamma_s), (a.r13, b.r13), (a.r23, b.r23),
                (a.dephasing21, b.dephasing21), (a.dephasing31, b.dephasing31),
                (a.dephasing32, b.dephasing32),
            ] {
                prop_assert!((x * s - y).abs() <= 1e-12 * y.abs().max(1e-300));
            }
        }
    }
}
