use thiserror::Error;

/// Library-wide error type.
///
/// `Config` covers malformed inputs and invalid parameter combinations.
/// `Data` covers conditions detected at run time on otherwise valid input:
/// an empty histogram bin, a band too low for the blockwise counter, a
/// degenerate majorant. The CLI maps `Config`/`Io`/`Json` to exit code 2 and
/// `Data` to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Data(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn data_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Data(msg.into()))
}
