//! Command implementations behind the `qwram` binary: memory-file parsing,
//! state dumps, scheme runs, oracle verification, and the resource tables.

pub mod commands;
pub mod dump;
pub mod memfile;

/// Failure classes mapped onto process exit codes: input errors exit 2,
/// domain errors exit 3, verification failures exit 1 (their report still
/// goes to standard output).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Domain(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<qwram_core::Error> for CliError {
    fn from(e: qwram_core::Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Domain(msg) => write!(f, "domain error: {msg}"),
            CliError::Verification(report) => write!(f, "{report}"),
        }
    }
}
