//! Library side of the `exactcount` binary: config resolution, single runs,
//! parallel sweeps and the oracle check batteries.

pub mod checks;
pub mod config;
pub mod error;
pub mod run;
pub mod sweep;

pub use checks::{run_checks, CheckKind, CheckResult};
pub use config::{resolve_run, resolve_sweep, ConfigFile, ExperimentSpec, Overrides};
pub use error::CliError;
pub use run::{cmd_run, RunReport};
pub use sweep::{cmd_sweep, sweep_rows, write_csv, SweepRow};
