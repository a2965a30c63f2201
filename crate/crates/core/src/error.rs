use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator, the samplers and the analysis toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive gap {gap} m to leader (collision state)")]
    Collision { gap: f64 },

    #[error("invalid controller parameter `{name}` = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid geometry parameter `{name}` = {value}")]
    InvalidGeometry { name: &'static str, value: f64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty sampling interval for `{name}`: margin {margin} exceeds half-range {half_range}")]
    EmptyInterval {
        name: &'static str,
        margin: f64,
        half_range: f64,
    },

    #[error("unsupported Sobol dimension {requested} (supported 1..={max})")]
    UnsupportedDimension { requested: usize, max: usize },

    #[error("{expected} outputs required by the design, got {got}")]
    OutputLength { expected: usize, got: usize },

    #[error("crash at t = {time:.2} s: vehicle {vehicle} gap {gap:.3} m on segment {segment}")]
    Crash {
        time: f64,
        vehicle: u64,
        segment: usize,
        gap: f64,
    },

    #[error("output path {path:?} is not writable: {source}")]
    OutputPath {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot read configuration {path:?}: {source}")]
    ConfigPath {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
