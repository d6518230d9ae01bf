//! Support library for the `weakmeas` binary: flag-value parsing, report
//! types with their JSON/CSV encodings, and sweep-step generation. Kept as a
//! library so encodings can be tested without spawning the binary.

pub mod input;
pub mod report;
pub mod sweep;

/// Error carrying the process exit code the binary should end with.
///
/// Code map: 2 input/usage error, 3 singular post-selection (a physics
/// condition scripts may want to tell apart from typos), 4 resource cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn singular(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.message.fmt(f)
    }
}

impl std::error::Error for CliError {}
