use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The constrained null space of the generator is not one-dimensional.
    #[error("degenerate steady state: generator null space has dimension {null_dim}")]
    DegenerateSteadyState { null_dim: usize },

    #[error("integration became unstable at t = {time:e} s (trace error {trace_error:e})")]
    StepInstability { time: f64, trace_error: f64 },

    /// Emission outweighs absorption; the brightness has no finite fixed point.
    #[error("above gain threshold: sigma_A = {sigma_a}, lambda * sigma_E = {lambda_sigma_e}")]
    AboveThreshold { sigma_a: f64, lambda_sigma_e: f64 },

    #[error("ground-state population is zero; the population ratio is undefined")]
    FullyInverted,

    #[error(
        "emission cross-section mismatch: closed form {closed_form}, extraction {extracted} \
         (relative error {relative:e})"
    )]
    ConsistencyFailure {
        closed_form: f64,
        extracted: f64,
        relative: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
