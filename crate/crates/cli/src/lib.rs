//! Command-line orchestration for `nash-approx`: problem ingestion, pipeline
//! execution, verification and report emission.

pub mod describe;
pub mod run;
pub mod selftest;

use std::fmt;

pub use run::{run, RunConfig};
pub use selftest::{selftest, Fixture, SUITES};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    /// Every check passed.
    Pass,
    /// The pipeline ran but verification failed.
    VerifyFailed,
    /// A pipeline stage failed.
    Pipeline,
    /// Unreadable or invalid input, or an output file could not be written.
    Input,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Exit::Pass => 0,
            Exit::VerifyFailed => 2,
            Exit::Pipeline => 3,
            Exit::Input => 4,
        }
    }
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Exit::Pass => "pass",
            Exit::VerifyFailed => "verification failed",
            Exit::Pipeline => "pipeline error",
            Exit::Input => "input error",
        };
        write!(f, "{s}")
    }
}
