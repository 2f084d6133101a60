//! Resolved settings for `run` and `sweep`: JSON config file first, command-line
//! flags on top, built-in defaults last.

use std::fs;
use std::path::{Path, PathBuf};

use exactcount_core::{LevelSchedule, ProtocolParams, SimConfig, StopCondition, DEFAULT_MAX_PHASE};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Contents of a `--config` file. Every key is optional; keys mirror
/// [`ExperimentSpec`] plus the single-run `n`/`seed`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub n_values: Option<Vec<u64>>,
    pub trials_per_n: Option<u64>,
    pub master_seed: Option<u64>,
    pub schedule: Option<LevelSchedule>,
    pub max_phase: Option<u32>,
    pub stop: Option<StopCondition>,
    pub max_interactions: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub trace_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ParseConfig {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// A batch of independent runs over several population sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n_values: Vec<u64>,
    pub trials_per_n: u64,
    pub master_seed: u64,
    pub schedule: LevelSchedule,
    pub max_phase: u32,
    pub stop: StopCondition,
    pub max_interactions: Option<u64>,
    pub output_path: PathBuf,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(CliError::BadNValues);
        }
        if self.trials_per_n == 0 {
            return Err(CliError::NoTrials);
        }
        ProtocolParams::new(self.max_phase, self.schedule)?;
        if self.stop == StopCondition::MaxInteractions && self.max_interactions.is_none() {
            return Err(exactcount_core::Error::MissingInteractionBudget.into());
        }
        Ok(())
    }

    pub fn params(&self) -> ProtocolParams {
        ProtocolParams {
            max_phase: self.max_phase,
            schedule: self.schedule,
        }
    }
}

/// Flag values for `run`/`sweep`; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub n_values: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub schedule: Option<LevelSchedule>,
    pub max_phase: Option<u32>,
    pub stop: Option<StopCondition>,
    pub max_interactions: Option<u64>,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

pub fn resolve_run(file: &ConfigFile, flags: &Overrides) -> Result<(SimConfig, Option<PathBuf>), CliError> {
    let n = flags.n.or(file.n).ok_or(CliError::Missing("n"))?;
    let seed = flags
        .seed
        .or(file.seed)
        .or(file.master_seed)
        .ok_or(CliError::Missing("seed"))?;
    let params = ProtocolParams::new(
        flags.max_phase.or(file.max_phase).unwrap_or(DEFAULT_MAX_PHASE),
        flags.schedule.or(file.schedule).unwrap_or_default(),
    )?;
    let config = SimConfig {
        n,
        seed,
        params,
        stop: flags.stop.or(file.stop).unwrap_or(StopCondition::UntilOutputStable),
        max_interactions: flags.max_interactions.or(file.max_interactions),
        record_trace: false,
    };
    config.validate()?;
    Ok((config, flags.trace.clone().or_else(|| file.trace_path.clone())))
}

pub fn resolve_sweep(file: &ConfigFile, flags: &Overrides) -> Result<ExperimentSpec, CliError> {
    let spec = ExperimentSpec {
        n_values: flags
            .n_values
            .clone()
            .or_else(|| file.n_values.clone())
            .ok_or(CliError::Missing("n_values"))?,
        trials_per_n: flags.trials.or(file.trials_per_n).unwrap_or(1),
        master_seed: flags.seed.or(file.master_seed).or(file.seed).unwrap_or(0),
        schedule: flags.schedule.or(file.schedule).unwrap_or_default(),
        max_phase: flags.max_phase.or(file.max_phase).unwrap_or(DEFAULT_MAX_PHASE),
        stop: flags.stop.or(file.stop).unwrap_or(StopCondition::UntilAllCountCorrect),
        max_interactions: flags.max_interactions.or(file.max_interactions),
        output_path: flags
            .out
            .clone()
            .or_else(|| file.output_path.clone())
            .ok_or(CliError::Missing("output_path"))?,
    };
    spec.validate()?;
    Ok(spec)
}
