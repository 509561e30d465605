use cesaro_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    pub fn context(self, ctx: &str) -> Self {
        match self {
            Failure::Validation(m) => Failure::Validation(format!("{ctx}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{ctx}: {m}")),
            Failure::Io(m) => Failure::Io(format!("{ctx}: {m}")),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(m) => Failure::Numerical(m),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
