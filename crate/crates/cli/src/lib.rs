//! Batch front-end for `orbit-census`: TOML experiment configs in,
//! deterministic CSV/JSON reports out, plus canned reproduction suites.

pub mod config;
pub mod report;
pub mod run;
pub mod suites;
pub mod systems;

use config::ConfigError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(orbit_census::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        use orbit_census::Error as E;
        match self {
            RunError::Config(_) => exit::CONFIG,
            RunError::Core(e) if e.is_numerical() => exit::NUMERIC,
            RunError::Core(E::BudgetExceeded { .. } | E::StateSpaceTooLarge { .. } | E::Overflow { .. }) => {
                exit::BUDGET
            }
            RunError::Core(
                E::InvalidInput(_)
                | E::DeadState(_)
                | E::NotAperiodic { .. }
                | E::InconsistentInput(_)
                | E::MissingCylinder(_)
                | E::PositivityViolated { .. }
                | E::Overlap(..)
                | E::EclipseViolation(..),
            ) => exit::CONFIG,
            RunError::Core(_) | RunError::Io { .. } => exit::OTHER,
        }
    }
}

/// Run `work` with at most `workers` threads (`None`: library default).
pub fn with_workers<R: Send>(workers: Option<usize>, work: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(n) if n <= 1 => orbit_census::par::sequential(work),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        _ => work(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let budget = RunError::Core(orbit_census::Error::BudgetExceeded { predicted: 10, cap: 1 });
        assert_eq!(budget.exit_code(), exit::BUDGET);
        let numeric = RunError::Core(orbit_census::Error::NotConverged {
            iterations: 1,
            residual: 1.0,
        });
        assert_eq!(numeric.exit_code(), exit::NUMERIC);
        let cfg = RunError::Config(ConfigError::Parse("x".into()));
        assert_eq!(cfg.exit_code(), exit::CONFIG);
    }

    #[test]
    fn worker_cap_runs_work() {
        assert_eq!(with_workers(Some(1), || 2 + 2), 4);
        assert_eq!(with_workers(Some(3), || 2 + 3), 5);
        assert_eq!(with_workers(None, || 1), 1);
    }
}
