use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use exactcount_core::{derive_seed, run, RunSummary, SimConfig, StopCondition};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentSpec;
use crate::error::CliError;

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub trial: u64,
    pub seed: u64,
    pub schedule: String,
    pub max_phase: u32,
    pub stop: String,
    pub interactions: u64,
    pub parallel_time: f64,
    pub final_level: usize,
    pub max_code_len: usize,
    pub max_agent_bits: u64,
    pub leader_count: u64,
    pub correct: bool,
}

/// The time a row reports: first all-correct time for `correct`, last count
/// write for `stable`, and the whole run otherwise (or when the stop
/// condition was not met).
fn reported_time(stop: StopCondition, s: &RunSummary) -> f64 {
    let t = match stop {
        StopCondition::UntilAllCountCorrect => s.all_correct_parallel_time,
        StopCondition::UntilOutputStable => s.convergence_parallel_time,
        StopCondition::MaxInteractions => None,
    };
    t.unwrap_or(s.parallel_time)
}

pub fn trial_config(spec: &ExperimentSpec, n: u64, trial: u64) -> SimConfig {
    SimConfig {
        n,
        seed: derive_seed(spec.master_seed, &[n, trial]),
        params: spec.params(),
        stop: spec.stop,
        max_interactions: spec.max_interactions,
        record_trace: false,
    }
}

/// Runs every `(n, trial)` pair in parallel. Rows come back ordered by
/// `(n, trial)` in the order `n_values` lists them.
pub fn sweep_rows(spec: &ExperimentSpec) -> Result<Vec<SweepRow>, CliError> {
    sweep_impl(spec, false)
}

fn sweep_impl(spec: &ExperimentSpec, progress: bool) -> Result<Vec<SweepRow>, CliError> {
    spec.validate()?;
    let jobs: Vec<(u64, u64)> = spec
        .n_values
        .iter()
        .flat_map(|&n| (0..spec.trials_per_n).map(move |t| (n, t)))
        .collect();
    let total = jobs.len();
    let done = AtomicUsize::new(0);
    jobs.into_par_iter()
        .map(|(n, trial)| {
            let cfg = trial_config(spec, n, trial);
            let s = run(&cfg)?.summary;
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if progress && (k * 10 / total != (k - 1) * 10 / total || k == total) {
                eprintln!("sweep: {k}/{total} runs done");
            }
            Ok(SweepRow {
                n,
                trial,
                seed: cfg.seed,
                schedule: spec.schedule.to_string(),
                max_phase: spec.max_phase,
                stop: spec.stop.as_str().to_string(),
                interactions: s.interactions,
                parallel_time: reported_time(spec.stop, &s),
                final_level: s.final_level,
                max_code_len: s.max_code_len,
                max_agent_bits: s.max_agent_bits,
                leader_count: s.leader_count_final,
                correct: s.stop_condition_met && s.final_counts_correct,
            })
        })
        .collect()
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

/// Sidecar path holding the resolved settings: `<out>.meta.json`.
pub fn meta_path(out: &Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    s.into()
}

/// Runs the sweep and writes the CSV plus a JSON sidecar with the settings.
pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>, CliError> {
    spec.validate()?;
    let path = &spec.output_path;
    let create = |p: &Path| {
        File::create(p).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        })
    };
    // open before simulating so a bad path fails fast
    let file = create(path)?;
    let meta = meta_path(path);
    let meta_file = create(&meta)?;
    let rows = sweep_impl(spec, true)?;
    write_csv(&rows, file)?;
    serde_json::to_writer_pretty(meta_file, spec).map_err(|e| CliError::Write {
        path: meta,
        source: e.into(),
    })?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactcount_core::LevelSchedule;

    fn spec(out: &Path) -> ExperimentSpec {
        ExperimentSpec {
            n_values: vec![6, 3],
            trials_per_n: 3,
            master_seed: 17,
            schedule: LevelSchedule::Double,
            max_phase: 24,
            stop: StopCondition::UntilAllCountCorrect,
            max_interactions: None,
            output_path: out.to_path_buf(),
        }
    }

    #[test]
    fn rows_ordered_and_seeded() {
        let s = spec(Path::new("unused.csv"));
        let rows = sweep_rows(&s).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.n, r.trial)).collect();
        assert_eq!(keys, [(6, 0), (6, 1), (6, 2), (3, 0), (3, 1), (3, 2)]);
        assert_eq!(rows[4].seed, derive_seed(17, &[3, 1]));
        assert!(rows.iter().all(|r| r.correct));
    }

    #[test]
    fn csv_header_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("s.csv");
        cmd_sweep(&spec(&out)).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "n,trial,seed,schedule,max_phase,stop,interactions,parallel_time,final_level,max_code_len,max_agent_bits,leader_count,correct"
        );
        assert_eq!(text.lines().count(), 7);
        let meta: ExperimentSpec = serde_json::from_str(&std::fs::read_to_string(meta_path(&out)).unwrap()).unwrap();
        assert_eq!(meta, spec(&out));
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let s = spec(Path::new("/nonexistent-dir/x/s.csv"));
        assert!(matches!(cmd_sweep(&s), Err(CliError::Write { .. })));
    }
}
