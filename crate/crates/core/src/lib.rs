//! Steady-state physics of a gain-assisted EIT quantum heat engine.
//!
//! A three-level Λ atom (ground `|1⟩`, metastable `|2⟩`, excited `|3⟩`) is
//! pumped by two black-body reservoirs on `1↔3` and `2↔3`, driven by a control
//! field on `2↔3`, and probed by a weak field `g` on `1↔3`. Non-orthogonal
//! dipoles produce spontaneously generated coherence (SGC) between the two
//! lower levels.
//!
//! The crate is layered bottom-up:
//!
//! - [`model`]: parameters, Planck occupations and derived rates.
//! - [`liouvillian`]: the full master-equation generator, its steady state and
//!   an RK4 propagator. This is the numeric oracle for everything above it.
//! - [`perturbative`]: closed-form zeroth- and first-order steady states.
//! - [`crosssections`]: absorption/emission cross-sections in units of σ₀.
//! - [`brightness`]: the radiative-transfer ODE and its black-body limit.
//! - [`spectrum`]: per-detuning rows assembled from all of the above.
//!
//! All frequencies and rates are angular (rad/s).
//!
//! ## Sign convention
//!
//! The probe enters the Hamiltonian as `+g/2 (|3⟩⟨1| + |1⟩⟨3|)` and the control
//! field as `-Ωc/2 (|3⟩⟨2| + |2⟩⟨3|)`. With this choice the net probe emission
//! rate is `-g·Im ρ₁₃`, which is the functional decomposed into absorption and
//! emission cross-sections. Gain corresponds to `Im ρ₁₃ < 0`.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brightness;
pub mod crosssections;
mod error;
pub mod liouvillian;
pub mod model;
pub(crate) mod ode;
pub mod perturbative;
pub mod sampling;
pub mod spectrum;

pub use brightness::{black_body_limit, integrate_brightness, BrightnessProfile, LinearTransfer};
pub use crosssections::{
    extract_coefficients, sigma_a, sigma_e, sigma_sgc_closed_form, CoefficientTriple, CrossSections,
};
pub use error::{Error, Result};
pub use liouvillian::{build_generator, propagate, steady_state, DensityMatrix, Generator};
pub use model::{derive_rates, planck_occupation, DerivedRates, PhysicalConstants, SystemParams};
pub use perturbative::{
    lambda_ratio, rho0, rho1, FirstOrderSolution, Populations, ZerothOrderSolution,
};
pub use spectrum::{spectrum, spectrum_with_rates, RowFlag, SpectrumRow};

pub use num_complex::Complex64;
