//! Library side of the `topoctl` command-line tool: network files and the
//! reports produced by each subcommand.

pub mod commands;
pub mod file;

pub use commands::{
    assumptions, check, decompose, verify, AssumptionsReport, CheckOptions, CheckReport, DecomposeReport,
    RefuteOptions, VerifyReport,
};
pub use file::NetworkFile;

/// Exit code for command-line usage errors.
pub const EXIT_USAGE: i32 = 10;
/// Exit code for unreadable or invalid network files.
pub const EXIT_INPUT: i32 = 11;
/// Exit code for analysis failures such as exceeded enumeration caps.
pub const EXIT_ANALYSIS: i32 = 12;
