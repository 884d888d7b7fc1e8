//! Front end for the `bdlab` binary: configuration, suite orchestration and
//! the report file format.

mod config;
mod report_file;
mod suites;

use std::process::ExitCode;

use bdlab_core::x0::build_space;
use bdlab_core::{Pool, TruncatedSpace};
use thiserror::Error;

pub use config::{Config, Fault};
pub use report_file::{ReportFile, FORMAT_VERSION};
pub use suites::{run_suite, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("pool holds {len} members, above pool_cap = {cap}")]
    PoolCap { len: usize, cap: usize },
    #[error(transparent)]
    Core(#[from] bdlab_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(bdlab_core::Error::BudgetExceeded { .. }) | CliError::PoolCap { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> CliError {
        CliError::Io { path: path.display().to_string(), message: err.to_string() }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> ExitCode {
        ExitCode::from(e.exit_code())
    }
}

/// The exhaustive pool through `Q` and its truncated space.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: Config,
    pub pool: Pool,
    pub space: TruncatedSpace,
}

impl Context {
    pub fn build(cfg: &Config) -> Result<Context, CliError> {
        let params = cfg.params()?;
        let pool = Pool::exhaustive(params, cfg.q, &cfg.enum_budget)?;
        if pool.len() > cfg.pool_cap {
            return Err(CliError::PoolCap { len: pool.len(), cap: cfg.pool_cap });
        }
        let space = build_space(&pool, cfg.q)?;
        Ok(Context { cfg: cfg.clone(), pool, space })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn exit_codes_are_distinct_per_class() {
        let budget = CliError::Core(bdlab_core::Error::BudgetExceeded { count: BigUint::from(9u32) });
        assert_eq!(budget.exit_code(), EXIT_BUDGET);
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Core(bdlab_core::Error::Parse("x".into())).exit_code(), EXIT_USAGE);
    }

    #[test]
    fn budget_too_small() {
        let mut cfg = Config::default();
        cfg.set("enum_budget", "100").unwrap();
        assert_eq!(Context::build(&cfg).unwrap_err().exit_code(), EXIT_BUDGET);
        cfg.set("enum_budget", "1000").unwrap();
        cfg.set("pool_cap", "10").unwrap();
        assert!(matches!(Context::build(&cfg), Err(CliError::PoolCap { len: 175, cap: 10 })));
    }
}
