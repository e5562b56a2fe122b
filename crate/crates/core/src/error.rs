use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("argument {value} outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("divergent quantity: {0}")]
    Divergent(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("law is not extendable: {0}")]
    NotExtendable(String),

    #[error("quadrature tolerance not met (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root not bracketed: {0}")]
    Bracket(String),

    #[error("integration step failure at t = {t}")]
    StepFailure { t: f64 },

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("coefficient extraction not certified: {0}")]
    Extraction(String),

    #[error("insufficient events: {found} < {needed}")]
    InsufficientEvents { found: usize, needed: usize },

    #[error("no convergence (residual {residual})")]
    NoConvergence { residual: f64 },

    #[error("specification error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by bad input rather than numerical trouble. Asking for a
    /// quantity outside the law's regime counts as bad input.
    pub fn is_spec_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidLaw(_)
                | Error::Constraint(_)
                | Error::Spec(_)
                | Error::Domain { .. }
                | Error::Regime(_)
        )
    }
}
