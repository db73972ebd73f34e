use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid principal curvatures ({0}, {1}): both must be finite and positive")]
    InvalidCurvatures(f64, f64),

    #[error("value {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("umbilic point: {0}")]
    Umbilic(&'static str),

    #[error("speed contract violated: {0}")]
    SpeedContract(String),

    #[error("cannot parse speed `{0}`")]
    SpeedParse(String),

    #[error("non-finite value while evaluating {0}")]
    NonFinite(&'static str),

    #[error("convexity lost at node {node} (radius {radius})")]
    ConvexityLoss { node: usize, radius: f64 },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("quadrature failed to converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("invalid counterexample spec: {0}")]
    Spec(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("extinction fit: {0}")]
    Extinction(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
