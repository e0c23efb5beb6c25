use thiserror::Error;

/// Errors raised by scenario loading, parameter decoding and the physics helpers.
///
/// Infeasibility of a candidate route is not an error; it is reported as data
/// by the evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse scenario document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("point ({x:.1} m, {y:.1} m) is not on the road network")]
    OffNetwork { x: f64, y: f64 },

    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("unknown bundled scenario `{0}`")]
    UnknownScenario(String),

    #[error("{0}")]
    Config(String),

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
