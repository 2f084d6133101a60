use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use exactcount_core::{run, RunSummary, SimConfig, StopCondition};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: SimConfig,
    pub summary: RunSummary,
}

impl RunReport {
    /// 0 if the stop condition was met (and, unless only an interaction
    /// budget was asked for, every count is correct); 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let s = &self.summary;
        let ok = match self.config.stop {
            StopCondition::MaxInteractions => s.stop_condition_met,
            _ => s.stop_condition_met && s.final_counts_correct,
        };
        if ok {
            0
        } else {
            1
        }
    }
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs one simulation, writes the report as one JSON line to `out`, and
/// optionally every count write as JSON lines to `trace`.
pub fn cmd_run(config: &SimConfig, trace: Option<&PathBuf>, out: &mut dyn Write) -> Result<RunReport, CliError> {
    let result = run(config)?;
    if let Some(path) = trace {
        let file = File::create(path).map_err(write_err(path))?;
        let mut w = BufWriter::new(file);
        for rec in &result.count_writes {
            serde_json::to_writer(&mut w, rec).map_err(|e| write_err(path)(e.into()))?;
            w.write_all(b"\n").map_err(write_err(path))?;
        }
        w.flush().map_err(write_err(path))?;
    }
    let report = RunReport {
        config: config.clone(),
        summary: result.summary,
    };
    let line = serde_json::to_string(&report).expect("report serializes");
    writeln!(out, "{line}").map_err(write_err(Path::new("<stdout>")))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactcount_core::ProtocolParams;

    #[test]
    fn report_and_trace() {
        let dir = tempfile::tempdir().unwrap();
        let trace = dir.path().join("t.jsonl");
        let cfg = SimConfig::new(8, 4).with_params(ProtocolParams::new(32, Default::default()).unwrap());
        let mut buf = Vec::new();
        let report = cmd_run(&cfg, Some(&trace), &mut buf).unwrap();
        assert_eq!(report.exit_code(), 0);
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["config"]["n"], 8);
        assert_eq!(v["summary"]["final_counts_correct"], true);
        let lines = std::fs::read_to_string(&trace).unwrap();
        let last: serde_json::Value = serde_json::from_str(lines.lines().last().unwrap()).unwrap();
        assert_eq!(last["new_count"], 8);
    }

    #[test]
    fn exhausted_budget_exits_one() {
        let cfg = SimConfig::new(20, 1).with_max_interactions(10);
        let report = cmd_run(&cfg, None, &mut Vec::new()).unwrap();
        assert_eq!(report.exit_code(), 1);
    }
}
