//! Spectral brightness along the medium.
//!
//! With populations held constant along the propagation axis the transfer
//! equation is linear with constant coefficients:
//!
//! ```text
//! dB/dz̃ = −κ B + s,   κ = σ̃_A ρ₁₁ − σ̃_E (ρ₂₂ + ρ₃₃),   s = σ̃_E (ρ₂₂ + ρ₃₃)
//! ```
//!
//! where `z̃ = N σ₀ z` absorbs the number density. Below threshold (`κ > 0`) it
//! saturates at `B_black = s/κ = Λσ_E / (σ_A − Λσ_E)`.

use serde::{Deserialize, Serialize};

use crate::crosssections::sigma_e;
use crate::model::{derive_rates, DerivedRates, SystemParams};
use crate::ode::rk4_step;
use crate::perturbative::{rho0, Populations};
use crate::{Error, Result};

pub const DEFAULT_STEPS: usize = 2000;
/// Default integration length in units of the attenuation length `1/κ`.
pub const DEFAULT_DEPTHS: f64 = 20.0;

/// `dB/dz̃ = −loss·B + source`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearTransfer {
    pub loss: f64,
    pub source: f64,
}

impl LinearTransfer {
    pub fn from_cross_sections(sigma_a: f64, sigma_e: f64, pops: &Populations) -> Self {
        let upper = pops.rho22 + pops.rho33;
        LinearTransfer {
            loss: sigma_a * pops.rho11 - sigma_e * upper,
            source: sigma_e * upper,
        }
    }

    pub fn is_above_threshold(&self) -> bool {
        !(self.loss > 0.0)
    }

    /// Saturated brightness, `None` above threshold.
    pub fn fixed_point(&self) -> Option<f64> {
        (!self.is_above_threshold()).then(|| self.source / self.loss)
    }

    /// Exact solution with `B(0) = 0`.
    pub fn analytic(&self, z: f64) -> f64 {
        if self.loss == 0.0 {
            self.source * z
        } else {
            -self.source / self.loss * (-self.loss * z).exp_m1()
        }
    }

    /// RK4 samples on `n_steps + 1` equally spaced points of `[0, z_max]`.
    pub fn integrate(&self, z_max: f64, n_steps: usize) -> (Vec<f64>, Vec<f64>) {
        let h = z_max / n_steps as f64;
        let rhs = |b: &f64| -self.loss * b + self.source;
        let mut z = Vec::with_capacity(n_steps + 1);
        let mut b = Vec::with_capacity(n_steps + 1);
        let mut y = 0.0;
        z.push(0.0);
        b.push(y);
        for k in 1..=n_steps {
            y = rk4_step(&y, h, &rhs);
            z.push(if k == n_steps { z_max } else { k as f64 * h });
            b.push(y);
        }
        (z, b)
    }

    /// `DEFAULT_DEPTHS` attenuation lengths, or a comparable scale set by the
    /// source when there is no attenuation.
    pub fn default_length(&self) -> f64 {
        if self.loss != 0.0 {
            DEFAULT_DEPTHS / self.loss.abs()
        } else if self.source != 0.0 {
            DEFAULT_DEPTHS / self.source.abs()
        } else {
            DEFAULT_DEPTHS
        }
    }
}

/// `Λσ_E / (σ_A − Λσ_E)`.
pub fn black_body_limit(lambda: f64, sigma_a: f64, sigma_e: f64) -> Result<f64> {
    for (name, v) in [
        ("lambda", lambda),
        ("sigma_a", sigma_a),
        ("sigma_e", sigma_e),
    ] {
        if !v.is_finite() {
            return Err(Error::invalid(name, format!("{v} is not finite")));
        }
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda", format!("{lambda} must be >= 0")));
    }
    let gain = lambda * sigma_e;
    if sigma_a <= gain {
        return Err(Error::AboveThreshold {
            sigma_a,
            lambda_sigma_e: gain,
        });
    }
    Ok(gain / (sigma_a - gain))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrightnessProfile {
    pub z_tilde: Vec<f64>,
    pub b: Vec<f64>,
    /// Saturated value; `None` above threshold.
    pub b_black: Option<f64>,
    pub above_threshold: bool,
    pub transfer: LinearTransfer,
}

impl BrightnessProfile {
    pub fn last(&self) -> f64 {
        *self.b.last().expect("profile has at least one sample")
    }

    /// Brightness rescaled by a reference occupation such as `n₁₃`.
    pub fn scaled(&self, unit: f64) -> Vec<f64> {
        self.b.iter().map(|b| b / unit).collect()
    }
}

pub fn integrate_brightness(
    params: &SystemParams,
    delta31: f64,
    z_tilde_max: Option<f64>,
    n_steps: usize,
) -> Result<BrightnessProfile> {
    let rates = derive_rates(params)?;
    integrate_brightness_with_rates(params, &rates, delta31, z_tilde_max, n_steps)
}

pub fn integrate_brightness_with_rates(
    params: &SystemParams,
    rates: &DerivedRates,
    delta31: f64,
    z_tilde_max: Option<f64>,
    n_steps: usize,
) -> Result<BrightnessProfile> {
    if n_steps < 10 {
        return Err(Error::invalid(
            "n_steps",
            format!("{n_steps} must be >= 10"),
        ));
    }
    if let Some(z) = z_tilde_max {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::invalid("z_tilde_max", format!("{z} must be > 0")));
        }
    }
    let pops = rho0(params, rates, delta31)?.populations();
    let xs = sigma_e(params, rates, delta31)?;
    let transfer = LinearTransfer::from_cross_sections(xs.sigma_a, xs.sigma_e, &pops);
    let z_max = z_tilde_max.unwrap_or_else(|| transfer.default_length());
    let (z_tilde, b) = transfer.integrate(z_max, n_steps);
    Ok(BrightnessProfile {
        z_tilde,
        b,
        b_black: transfer.fixed_point(),
        above_threshold: transfer.is_above_threshold(),
        transfer,
    })
}
