use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("velocity is not unit timelike: (u.u) = {norm} (expected -1)")]
    NotNormalized { norm: f64 },

    #[error("proper time {tau} outside worldline domain [{lo}, {hi}]")]
    OutOfDomain { tau: f64, lo: f64, hi: f64 },

    #[error("no light-cone root for field point ({x0}, {x1}, {x2}) within the worldline domain")]
    NoRoot { x0: f64, x1: f64, x2: f64 },

    #[error("field point lies on the worldline (tau = {tau})")]
    OnWorldline { tau: f64 },

    #[error("separation between tau = {tau} and s = {s} is spacelike ((q.q) = {qq})")]
    NotCausal { tau: f64, s: f64, qq: f64 },

    #[error("emission time s = {s} must precede observation time tau = {tau}")]
    NotPast { tau: f64, s: f64 },

    #[error("worldline has no {0} asymptote")]
    MissingAsymptote(&'static str),

    #[error("prehistory policy cannot be resolved for this quantity: {0}")]
    PrehistoryUnresolved(&'static str),

    #[error("quadrature did not converge: value norm {value:e}, error estimate {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("coincidence window could not be resolved at tau = {tau}")]
    UnresolvedCutoff { tau: f64 },

    #[error("dynamical mass became non-positive ({mass}) at tau = {tau}")]
    MassNonPositive { tau: f64, mass: f64 },

    #[error("step rejected at tau = {tau}: corrector-predictor disagreement {disagreement:e} exceeds {limit:e}")]
    StepRejected { tau: f64, disagreement: f64, limit: f64 },

    #[error("non-finite value produced at tau = {tau}")]
    NonFinite { tau: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trace too short: {0}")]
    TraceTooShort(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
