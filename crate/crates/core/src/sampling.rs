//! Random parameter sets in the neighbourhood of the reference engine.
//!
//! Used by property tests, the verification suite and benchmarks. Ranges keep
//! the same ordering of scales as the reference: optical transition
//! frequencies, decay rates of order 10⁷–10⁸ s⁻¹, solar-like reservoir
//! temperatures and a control field between 0.1 and 1 γ₃₁.

use rand::Rng;

use crate::model::{derive_rates, SystemParams};

/// Ratio `Ωc / g` applied to every draw.
pub const CONTROL_TO_PROBE: f64 = 20.0;

/// Draws `(params, Δω₃₁)` with `p ∈ [0, 0.7]`, `Ωc ∈ [0.1, 1] γ₃₁` and
/// `Δω₃₁ ∈ [−3, 3] γ₃₁`. The control field is resonant.
pub fn draw_params<R: Rng + ?Sized>(rng: &mut R) -> (SystemParams, f64) {
    let base = SystemParams {
        decay31: rng.gen_range(0.5e7..2.0e7),
        decay32: rng.gen_range(3.0e7..1.2e8),
        t13: rng.gen_range(3000.0..6000.0),
        t23: rng.gen_range(4000.0..7000.0),
        p: rng.gen_range(0.0..=0.7),
        coupling_detuning: 0.0,
        ..SystemParams::reference()
    };
    let y31 = derive_rates(&base)
        .expect("sampled ranges are valid")
        .dephasing31;
    let omega_c = rng.gen_range(0.1..=1.0) * y31;
    let params = base
        .with_omega_c(omega_c)
        .with_g(omega_c / CONTROL_TO_PROBE);
    let delta = rng.gen_range(-3.0..=3.0) * y31;
    (params, delta)
}
