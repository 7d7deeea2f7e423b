use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid generator: {}", .0.join("; "))]
    InvalidGenerator(Vec<String>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("absorbing state is not pure (nu = {nu}, |zeta| = {zeta_abs})")]
    NotPureAbsorbing { nu: f64, zeta_abs: f64 },

    #[error("rate gap eta - a = {gap:.3e} is not positive (eta = {eta}, a = {a})")]
    NonPositiveGap { eta: f64, a: f64, gap: f64 },

    #[error("J*(|e1><e1|) differs from (eta - a)|e2><e2| by {residual:.3e}")]
    IdentityViolation { residual: f64 },

    #[error("subordination ordering violated: {which} has eigenvalue {eigenvalue:.3e}")]
    OrderingViolation { which: &'static str, eigenvalue: f64 },

    #[error("not a projection: {0}")]
    NotAProjection(String),

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("initial state coincides with the absorbing state (distance {distance:.3e})")]
    DegenerateStart { distance: f64 },

    #[error("time grid ends at {t_max} but at least {required} is needed")]
    InsufficientGrid { t_max: f64, required: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}
