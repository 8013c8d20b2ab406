//! CLI error type and the process exit-code contract.
//!
//! Exit codes: 0 success, 2 invalid input, 3 budget-limited partial
//! result, 4 undefined drift, 5 optimization failure, 1 internal error.
//! Codes 3 and 4 can also accompany an emitted record (a truncated growth
//! table is still worth printing); in that case the code is the only
//! signal that the answer is partial.

use std::process::ExitCode;

use thiserror::Error;
use walklab::enumeration::EnumError;
use walklab::group::GroupError;
use walklab::inequality::IneqError;
use walklab::walks::WalkError;

#[derive(Debug, Error)]
pub enum CliError {
    /// A malformed flag value or input file.
    #[error("{0}")]
    Input(String),
    /// An unreadable or unwritable user-supplied path.
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Inequality(#[from] IneqError),
}

fn walk_code(e: &WalkError) -> u8 {
    match e {
        WalkError::SupportBudget { .. } | WalkError::InsufficientDepth { .. } => 3,
        WalkError::UndefinedDrift { .. } => 4,
        WalkError::MassLeak { .. } => 1,
        _ => 2,
    }
}

fn enum_code(e: &EnumError) -> u8 {
    match e {
        EnumError::BallBudget { .. }
        | EnumError::PathBudget { .. }
        | EnumError::DegenerateGrowth { .. } => 3,
        EnumError::RootNotFound | EnumError::Overflow { .. } => 1,
        _ => 2,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } | CliError::Group(_) => 2,
            CliError::Walk(e) => walk_code(e),
            CliError::Enumeration(e) => enum_code(e),
            CliError::Inequality(e) => match e {
                IneqError::Group(_) => 2,
                IneqError::Walk(w) => walk_code(w),
                IneqError::Enumeration(en) => enum_code(en),
                IneqError::UndefinedDrift { .. } => 4,
                IneqError::OptimizationFailed { .. } => 5,
                IneqError::InvalidSystem { .. } => 2,
                IneqError::UnreliableComparison { .. } => 3,
                IneqError::QSanity { .. } => 1,
            },
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Input("bad".into()).exit_code(), 2);
        let bad_spec: GroupError = "nope".parse::<walklab::group::GroupPresentation>().unwrap_err();
        assert_eq!(CliError::Group(bad_spec).exit_code(), 2);
        assert_eq!(
            CliError::Walk(WalkError::UndefinedDrift {
                value: 0.0,
                std_error: 0.1
            })
            .exit_code(),
            4
        );
        assert_eq!(
            CliError::Walk(WalkError::InsufficientDepth { reached: 1 }).exit_code(),
            3
        );
        assert_eq!(
            CliError::Inequality(IneqError::OptimizationFailed {
                reason: "no objective".into()
            })
            .exit_code(),
            5
        );
        assert_eq!(
            CliError::Inequality(IneqError::UnreliableComparison {
                label: "sys".into(),
                fraction: 0.5,
                limit: 0.1
            })
            .exit_code(),
            3
        );
        assert_eq!(
            CliError::Inequality(IneqError::Walk(WalkError::UndefinedDrift {
                value: 0.0,
                std_error: 0.1
            }))
            .exit_code(),
            4
        );
    }
}
