use thiserror::Error;

/// Errors raised by the numerical layers.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`]),
/// which the command-line front end prints on its diagnostic stream.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate exponent: zero recurrence pivot at order {order} (exponent {exponent})")]
    DegenerateExponent { order: usize, exponent: f64 },

    #[error("pole at x = {x}: negative exponent {exponent} evaluated at the anchor")]
    Pole { x: f64, exponent: f64 },

    #[error("singular point {point} inside integration interval [{from}, {to}]")]
    SingularInterval { point: f64, from: f64, to: f64 },

    #[error("step size underflow at x = {x} (h = {h:e}); the problem is too stiff for the explicit integrator")]
    Stiffness { x: f64, h: f64 },

    #[error("complex exponent: {0}")]
    ComplexExponent(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("singular quantum number: {0}")]
    SingularQuantumNumber(String),

    #[error("bracket [{lo}, {hi}] holds node counts {nodes_lo}..{nodes_hi}, which does not straddle target {target}")]
    Bracket {
        lo: f64,
        hi: f64,
        nodes_lo: usize,
        nodes_hi: usize,
        target: usize,
    },

    #[error(
        "non-normalizable wavefunction: divergent tail with growth exponent {growth_exponent}"
    )]
    Divergence { growth_exponent: f64 },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::Unsupported(_) => "UNSUPPORTED",
            Error::DegenerateExponent { .. } => "DEGENERATE_EXPONENT",
            Error::Pole { .. } => "POLE",
            Error::SingularInterval { .. } => "SINGULAR_INTERVAL",
            Error::Stiffness { .. } => "STIFFNESS",
            Error::ComplexExponent(_) => "COMPLEX_EXPONENT",
            Error::NoBoundState(_) => "NO_BOUND_STATE",
            Error::SingularQuantumNumber(_) => "SINGULAR_QUANTUM_NUMBER",
            Error::Bracket { .. } => "BRACKET",
            Error::Divergence { .. } => "DIVERGENCE",
        }
    }

    /// True for errors caused by bad inputs rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Unsupported(_) | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
