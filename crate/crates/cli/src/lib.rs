//! Batch front-end for `momsep`: JSON run configurations in, verdict
//! reports out.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, Format, RunConfig};
pub use report::{Report, RegressionSummary};
pub use run::{run, Overrides};

/// Nothing detected (or nothing asked).
pub const EXIT_OK: i32 = 0;
/// Configuration, I/O or regression failure.
pub const EXIT_ERROR: i32 = 1;
/// At least one verdict is ENTANGLED.
pub const EXIT_ENTANGLED: i32 = 10;

/// Exit status for a finished analysis.
pub fn exit_code(report: &Report) -> i32 {
    if report.any_entangled() {
        EXIT_ENTANGLED
    } else {
        EXIT_OK
    }
}
