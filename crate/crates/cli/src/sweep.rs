//! Batch files: an explicit scenario list and/or a cartesian grid of
//! overrides applied to a base scenario.
//!
//! ```toml
//! base = "stable_smallslope"          # builtin name or path
//! scenarios = ["a.toml", "b.toml"]    # optional, run first
//!
//! [set]                               # fixed overrides on the base
//! "run.t_end" = 1.0
//!
//! [sweep]                             # one row per combination
//! "phys.rho" = [1.0, 2.0]
//! "init.amplitude" = [0.005, 0.01]
//! ```
//!
//! Rows appear in declared order: listed scenarios, then the grid with the
//! last sweep key varying fastest.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use muskat_core::config::{ConfigMap, Scenario};
use muskat_core::diagnostics::MonitorStatus;
use muskat_core::format::fmt_f64;
use muskat_core::{MuskatError, Result};
use rayon::prelude::*;
use serde::Serialize;
use toml::Value;

use crate::scenario::{builtin_map, run_scenario};

#[derive(Debug, Clone)]
pub struct Batch {
    pub name: String,
    /// Override keys of the grid, in declared order.
    pub sweep_keys: Vec<String>,
    pub rows: Vec<BatchRow>,
}

#[derive(Debug, Clone)]
pub struct BatchRow {
    pub name: String,
    pub overrides: Vec<Value>,
    pub scenario: std::result::Result<Scenario, String>,
}

fn load_map(spec: &str, base_dir: &Path) -> Result<(ConfigMap, PathBuf)> {
    let path = base_dir.join(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(&path)?;
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        return Ok((ConfigMap::parse(&text)?, dir));
    }
    builtin_map(spec)
        .map(|m| (m, base_dir.to_path_buf()))
        .ok_or_else(|| MuskatError::config(spec, "no such file or builtin scenario"))
}

fn flat_table(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flat_table(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

impl Batch {
    pub fn parse(text: &str, base_dir: &Path, seed: Option<u64>) -> Result<Self> {
        // Reuse the scenario parser for line/column diagnostics.
        ConfigMap::parse(text)?;
        let doc: toml::Table = text.parse().expect("already validated");
        for key in doc.keys() {
            if !["name", "base", "scenarios", "set", "sweep"].contains(&key.as_str()) {
                return Err(MuskatError::config(key.clone(), "unknown batch key"));
            }
        }
        let name = match doc.get("name") {
            None => "batch".to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => return Err(MuskatError::config("name", format!("expected a string, found {v}"))),
        };
        let env: Vec<(String, String)> = std::env::vars().collect();
        let finish = |mut map: ConfigMap, dir: &Path| -> std::result::Result<Scenario, String> {
            map.apply_env(env.iter().map(|(k, v)| (k.as_str(), v.as_str())));
            if let Some(seed) = seed {
                map.set("init.seed", Value::Integer(seed as i64));
            }
            Scenario::from_map(map, dir).map_err(|e| e.to_string())
        };

        let mut rows = Vec::new();
        match doc.get("scenarios") {
            None => {}
            Some(Value::Array(items)) => {
                for (i, item) in items.iter().enumerate() {
                    let Value::String(spec) = item else {
                        return Err(MuskatError::config(format!("scenarios[{i}]"), "expected a path or builtin name"));
                    };
                    let (map, dir) = load_map(spec, base_dir)?;
                    let scenario = finish(map, &dir);
                    let name = match &scenario {
                        Ok(s) => s.name.clone(),
                        Err(_) => spec.clone(),
                    };
                    rows.push(BatchRow { name, overrides: Vec::new(), scenario });
                }
            }
            Some(v) => return Err(MuskatError::config("scenarios", format!("expected an array, found {v}"))),
        }

        let mut fixed = Vec::new();
        if let Some(v) = doc.get("set") {
            if !v.is_table() {
                return Err(MuskatError::config("set", "expected a table of overrides"));
            }
            flat_table("", v, &mut fixed);
        }
        let mut grid = Vec::new();
        if let Some(v) = doc.get("sweep") {
            if !v.is_table() {
                return Err(MuskatError::config("sweep", "expected a table of value lists"));
            }
            flat_table("", v, &mut grid);
        }
        let mut axes = Vec::with_capacity(grid.len());
        for (k, v) in &grid {
            match v {
                Value::Array(vals) if !vals.is_empty() => axes.push(vals.clone()),
                _ => return Err(MuskatError::config(format!("sweep.{k}"), "expected a non-empty array of values")),
            }
        }
        let sweep_keys: Vec<String> = grid.into_iter().map(|(k, _)| k).collect();

        match doc.get("base") {
            None if !sweep_keys.is_empty() || !fixed.is_empty() => {
                return Err(MuskatError::config("base", "`set`/`sweep` need a base scenario"));
            }
            None => {}
            Some(Value::String(spec)) => {
                let (mut base, dir) = load_map(spec, base_dir)?;
                for (k, v) in &fixed {
                    base.set(k, v.clone());
                }
                let base_name = match base.get("name") {
                    Some(Value::String(s)) => s.clone(),
                    _ => "scenario".to_string(),
                };
                let total: usize = axes.iter().map(Vec::len).product();
                for idx in 0..total {
                    let mut rem = idx;
                    let mut picks = vec![Value::Boolean(false); axes.len()];
                    for a in (0..axes.len()).rev() {
                        picks[a] = axes[a][rem % axes[a].len()].clone();
                        rem /= axes[a].len();
                    }
                    let mut map = base.clone();
                    for (k, v) in sweep_keys.iter().zip(&picks) {
                        map.set(k, v.clone());
                    }
                    let name = format!("{base_name}_{idx:03}");
                    map.set("name", Value::String(name.clone()));
                    rows.push(BatchRow { name, overrides: picks, scenario: finish(map, &dir) });
                }
            }
            Some(v) => return Err(MuskatError::config("base", format!("expected a string, found {v}"))),
        }

        let mut seen = HashSet::new();
        for r in &rows {
            if !seen.insert(r.name.clone()) {
                return Err(MuskatError::config("scenarios", format!("duplicate scenario name `{}`", r.name)));
            }
        }
        Ok(Self { name, sweep_keys, rows })
    }

    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MuskatError::config(path.display().to_string(), e.to_string()))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), seed)
    }
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub overrides: Vec<String>,
    pub status: String,
    pub final_time: Option<f64>,
    pub l2: Option<f64>,
    pub linf: Option<f64>,
    pub slope: Option<f64>,
    pub h32: Option<f64>,
    pub slope_initial: Option<f64>,
    pub h32_initial: Option<f64>,
    /// Monitor statuses in `MONITOR_NAMES` order.
    pub monitors: Vec<String>,
    pub error: String,
}

const MONITOR_COLUMNS: [&str; 4] = muskat_core::diagnostics::MONITOR_NAMES;

fn status_str(s: MonitorStatus) -> &'static str {
    match s {
        MonitorStatus::Pass => "pass",
        MonitorStatus::Fail => "fail",
        MonitorStatus::NotApplicable => "na",
    }
}

fn value_str(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Float(f) => fmt_f64(*f),
        other => other.to_string(),
    }
}

/// Run every row (concurrently) and return the table in declared order.
/// Per-run artifacts go to `out/<row name>/` when `out` is given.
pub fn run_batch(batch: &Batch, out: Option<&Path>) -> Vec<SweepRow> {
    batch
        .rows
        .par_iter()
        .map(|row| {
            let mut r = SweepRow {
                name: row.name.clone(),
                overrides: row.overrides.iter().map(value_str).collect(),
                status: "error".into(),
                final_time: None,
                l2: None,
                linf: None,
                slope: None,
                h32: None,
                slope_initial: None,
                h32_initial: None,
                monitors: vec![String::new(); MONITOR_COLUMNS.len()],
                error: String::new(),
            };
            let scenario = match &row.scenario {
                Ok(s) => s,
                Err(e) => {
                    r.error = e.clone();
                    return r;
                }
            };
            let dir = out.map(|o| o.join(&row.name));
            match run_scenario(scenario, dir.as_deref()) {
                Ok(o) => {
                    r.status = o.summary.status.as_str().to_string();
                    r.final_time = Some(o.summary.final_time);
                    if let (Some(first), Some(last)) = (o.trajectory.records.first(), o.trajectory.records.last()) {
                        r.l2 = Some(last.norms.l2);
                        r.linf = Some(last.norms.linf);
                        r.slope = Some(last.norms.slope_sup);
                        r.h32 = Some(last.h32());
                        r.slope_initial = Some(first.norms.slope_sup);
                        r.h32_initial = Some(first.h32());
                    }
                    r.monitors = MONITOR_COLUMNS
                        .iter()
                        .map(|m| o.monitors.get(*m).map_or("na", |v| status_str(v.status)).to_string())
                        .collect();
                    r.error = o.summary.divergence.unwrap_or_default();
                }
                Err(e) => r.error = e.to_string(),
            }
            r
        })
        .collect()
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Summary table as CSV.
pub fn summary_csv(batch: &Batch, rows: &[SweepRow]) -> String {
    let mut header = vec!["name".to_string()];
    header.extend(batch.sweep_keys.iter().cloned());
    header.extend(
        ["status", "t_final", "l2", "linf", "slope", "h32", "slope_initial", "h32_initial"]
            .iter()
            .map(|s| s.to_string()),
    );
    header.extend(MONITOR_COLUMNS.iter().map(|s| s.to_string()));
    header.push("error".into());
    let mut out = header.iter().map(|h| csv_cell(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    let num = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in rows {
        let mut cells = vec![r.name.clone()];
        let mut ov = r.overrides.clone();
        ov.resize(batch.sweep_keys.len(), String::new());
        cells.extend(ov);
        cells.push(r.status.clone());
        for v in [r.final_time, r.l2, r.linf, r.slope, r.h32, r.slope_initial, r.h32_initial] {
            cells.push(num(v));
        }
        cells.extend(r.monitors.iter().cloned());
        cells.push(r.error.clone());
        out.push_str(&cells.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
