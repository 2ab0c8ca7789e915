use std::fmt;
use std::process::ExitCode;

use sdfseg::Error;

pub const OK: u8 = 0;
pub const CHECK_FAILED: u8 = 1;
pub const FORMAT: u8 = 2;
pub const DEGENERATE: u8 = 3;
pub const MISMATCH: u8 = 4;
pub const EMPTY_GT: u8 = 5;

pub const TABLE: &str = "\
Exit codes:
  0  success
  1  verification failed (grad-check tolerance exceeded)
  2  bad input format, unreadable file or invalid arguments
  3  degenerate input (single-class mask or empty point set)
  4  dimension mismatch between inputs
  5  ground truth contains no objects

Environment:
  SDFSEG_THREADS  cap on worker threads (0 or unset = one per core)";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateMask { .. } | Error::EmptyPointSet => DEGENERATE,
            Error::DimensionMismatch { .. } => MISMATCH,
            Error::NoGroundTruthObjects => EMPTY_GT,
            _ => FORMAT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(FORMAT, e.to_string())
    }
}

pub type CliResult<T = u8> = Result<T, Failure>;
