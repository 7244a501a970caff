//! On-disk artifacts of a run: trajectory CSV, verdict JSON, snapshots.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{GrowthReport, MonitorStatus, MonitorVerdict, StepRecord};
use crate::error::Result;
use crate::format::fmt_f64;
use crate::stepper::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,l2,linf,slope,h32,h52,dissipation,low_third,mid_third,high_third";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const VERDICT_FILE: &str = "verdict.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SNAPSHOT_INDEX: &str = "index.csv";

/// One row per record; a missing dissipation value is an empty cell.
pub fn write_trajectory_csv<W: Write>(records: &[StepRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        let d = r.dissipation.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.norms.l2),
            fmt_f64(r.norms.linf),
            fmt_f64(r.norms.slope_sup),
            fmt_f64(r.h32()),
            fmt_f64(r.h52()),
            d,
            fmt_f64(r.spectrum.low),
            fmt_f64(r.spectrum.mid),
            fmt_f64(r.spectrum.high),
        )?;
    }
    Ok(())
}

pub fn verdict_json(monitors: &BTreeMap<String, MonitorVerdict>) -> String {
    serde_json::to_string_pretty(monitors).expect("verdicts serialize")
}

/// Overall outcome of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pass,
    MonitorFail,
    Diverged,
    Unstable,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Pass => "pass",
            RunStatus::MonitorFail => "monitor_fail",
            RunStatus::Diverged => "diverged",
            RunStatus::Unstable => "unstable",
        }
    }

    pub fn from_monitors(monitors: &BTreeMap<String, MonitorVerdict>) -> Self {
        if monitors.values().any(|v| v.status == MonitorStatus::Fail) {
            RunStatus::MonitorFail
        } else {
            RunStatus::Pass
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub status: RunStatus,
    pub final_time: f64,
    pub steps: usize,
    pub divergence: Option<String>,
    pub energy_residual: Option<f64>,
    pub growth: Option<GrowthReport>,
}

/// Write `index.csv` (`index,t,file`) and one `x,f` CSV per snapshot.
pub fn write_snapshots(traj: &Trajectory, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut index = String::from("index,t,file\n");
    let mut paths = Vec::with_capacity(traj.snapshots.len());
    for (i, (t, f)) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:05}.csv");
        let path = dir.join(&name);
        f.save_csv(&path)?;
        index.push_str(&format!("{i},{},{name}\n", fmt_f64(*t)));
        paths.push(path);
    }
    fs::write(dir.join(SNAPSHOT_INDEX), index)?;
    Ok(paths)
}

/// Write every artifact of a (possibly partial) trajectory into `dir`.
pub fn write_run(
    dir: &Path,
    traj: &Trajectory,
    monitors: &BTreeMap<String, MonitorVerdict>,
    summary: &RunSummary,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&traj.records, &mut csv)?;
    fs::write(dir.join(TRAJECTORY_FILE), csv)?;
    fs::write(dir.join(VERDICT_FILE), verdict_json(monitors) + "\n")?;
    fs::write(
        dir.join(SUMMARY_FILE),
        serde_json::to_string_pretty(summary).expect("summary serializes") + "\n",
    )?;
    write_snapshots(traj, &dir.join(SNAPSHOT_DIR))?;
    Ok(())
}
