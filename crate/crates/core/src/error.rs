//! Error type shared across the simulator.

use thiserror::Error;

/// Errors raised by model construction, configuration, and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or model shape violates a documented invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Device parameters are physically meaningless (non-positive resistance,
    /// inverted resistance ranges, ...).
    #[error("device model error: {0}")]
    Device(String),

    /// The crossbar layout does not cover the model, or a cell lookup missed.
    #[error("layout error: {0}")]
    Layout(String),

    /// A programming pulse whose polarity does not match the requested
    /// transition.
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    /// A metric that is undefined for the given inputs (e.g. zero energy).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Malformed input file. Carries file name and, when known, line number.
    #[error("parse error in {file}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Parse {
        file: String,
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn device(msg: impl Into<String>) -> Self {
        Error::Device(msg.into())
    }

    pub fn layout(msg: impl Into<String>) -> Self {
        Error::Layout(msg.into())
    }

    pub fn parse(file: impl Into<String>, line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: msg.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input (files, CLI values) as
    /// opposed to violated simulator invariants.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
