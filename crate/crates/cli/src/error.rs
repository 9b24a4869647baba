use std::fmt;

use hyperflip::Error;

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_INTERNAL: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotStronglyGeneric(_)
        | Error::DegenerateConfiguration(_)
        | Error::PerturbationFailed => EXIT_DEGENERATE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: exit_code(&e), message: e.to_string() }
    }
}
