use thiserror::Error;

/// Errors raised anywhere in the census pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transition matrix has a dead state: {0}")]
    DeadState(String),

    #[error("transition matrix is not aperiodic: no power up to {max_power} is strictly positive")]
    NotAperiodic { max_power: usize },

    #[error("integer overflow while counting fixed points of sigma^{n}")]
    Overflow { n: usize },

    #[error("enumeration budget exceeded: {predicted} words requested, cap is {cap}")]
    BudgetExceeded { predicted: u128, cap: u128 },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("no table entry for cylinder {0}")]
    MissingCylinder(String),

    #[error("tail series did not converge: last increment {last_term:e} exceeds {tol:e}")]
    TailNotConverged { last_term: f64, tol: f64 },

    #[error("state space too large: {states} states, cap is {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("top of the spectrum is degenerate in modulus: {0}")]
    DegenerateTopModulus(String),

    #[error("potential is not strictly positive (min value {min})")]
    PositivityViolated { min: f64 },

    #[error("pressure root is not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("derivative estimates disagree: {what} ({a} vs {b})")]
    DerivativeUnstable { what: &'static str, a: f64, b: f64 },

    #[error("obstacles {0} and {1} overlap")]
    Overlap(usize, usize),

    #[error("no-eclipse condition fails: hull of obstacles {0} and {1} meets obstacle {2}")]
    EclipseViolation(usize, usize, usize),

    #[error("reflection path for code {code} crosses obstacle {obstacle}")]
    ShadowViolation { code: String, obstacle: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of an iterative numerical method.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::TailNotConverged { .. }
                | Error::DegenerateTopModulus(_)
                | Error::NoBracket { .. }
                | Error::DerivativeUnstable { .. }
                | Error::ShadowViolation { .. }
        )
    }
}
