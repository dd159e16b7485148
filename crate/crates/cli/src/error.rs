use std::fmt;
use std::process::ExitCode;

use nrbattery::Error;

/// Every failure is reported as one line `error[<code>]: <message>` on
/// standard error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Step(String),
    VerifyFailed(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Step(_) => "step",
            CliError::VerifyFailed(_) => "verify",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Step(_) => 3,
            CliError::VerifyFailed(_) => 4,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }

    /// Prints the error line and returns the exit code. `detail` replaces
    /// the message when nonempty.
    pub fn report(&self, detail: &str) -> ExitCode {
        let text = if detail.is_empty() {
            self.to_string()
        } else {
            detail.to_string()
        };
        let line = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        let line = line.strip_prefix("error: ").unwrap_or(&line);
        eprintln!("error[{}]: {}", self.code(), line);
        ExitCode::from(self.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Config(m)
            | CliError::Step(m)
            | CliError::VerifyFailed(m)
            | CliError::Numeric(m)
            | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Config(m) => CliError::Config(m),
            Error::StepTooLarge { .. } => CliError::Step(msg),
            Error::UnphysicalState(_)
            | Error::SingularSystem
            | Error::CrossCheck(_)
            | Error::DivisionByZero { .. } => CliError::Numeric(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
