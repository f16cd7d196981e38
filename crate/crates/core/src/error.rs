use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reported by the simulation engines.
///
/// `Domain` covers invalid inputs; every other variant is a numerical failure
/// and carries enough context to locate it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: estimate {estimate:e}, \
         panel discrepancy {discrepancy:e} after {depth} bisections"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        discrepancy: f64,
        depth: u32,
    },

    #[error("quadrature result is not real: imaginary part {imag:e} (real part {real:e})")]
    NonReal { real: f64, imag: f64 },

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },

    #[error("norm drift {drift:e} exceeds {limit:e}; reduce the time step")]
    NormDrift { drift: f64, limit: f64 },

    #[error("two-time solve failed on row {row}: {source}")]
    TwoTimeRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Domain(_) | Error::Shape(_))
    }
}
