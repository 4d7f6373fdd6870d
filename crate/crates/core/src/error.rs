use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file. `line` is 1-based when known.
    #[error("format error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Format { line: Option<usize>, message: String },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("simulation diverged: body {body} became non-finite at t = {time} s")]
    Divergence { body: String, time: f64 },

    #[error("frame error: rotation is not proper orthonormal (deviation {deviation:e})")]
    Frame { deviation: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(line: impl Into<Option<usize>>, message: impl Into<String>) -> Self {
        Error::Format {
            line: line.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
