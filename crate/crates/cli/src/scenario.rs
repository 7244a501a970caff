use std::path::Path;

use muskat_core::config::{ConfigMap, Scenario};
use muskat_core::diagnostics::{energy_balance_check, instability_probe, maximum_principle_monitors, GrowthVerdict, MonitorVerdict};
use muskat_core::output::{write_run, RunStatus, RunSummary};
use muskat_core::stepper::{run, Trajectory};
use muskat_core::{Field, MuskatError, Result};
use std::collections::BTreeMap;

use crate::exit;

/// Scenarios shipped with the binary, addressable by name.
pub const BUILTINS: [(&str, &str); 2] = [
    ("stable_smallslope", include_str!("../scenarios/stable_smallslope.toml")),
    ("unstable_demo", include_str!("../scenarios/unstable_demo.toml")),
];

pub fn builtin_map(name: &str) -> Option<ConfigMap> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ConfigMap::parse(text).expect("builtin scenarios parse"))
}

/// Load a scenario from a file path or a builtin name, apply `MUSKAT_*`
/// environment overrides, then the optional seed override.
pub fn load_scenario(spec: &str, seed: Option<u64>) -> Result<Scenario> {
    let path = Path::new(spec);
    let (mut map, base) = if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        (ConfigMap::parse(&text)?, base)
    } else if let Some(map) = builtin_map(spec) {
        (map, std::env::current_dir()?)
    } else {
        let names: Vec<&str> = BUILTINS.iter().map(|b| b.0).collect();
        return Err(MuskatError::config(
            spec,
            format!("no such file or builtin scenario (builtins: {})", names.join(", ")),
        ));
    };
    map.apply_env(std::env::vars());
    if let Some(seed) = seed {
        map.set("init.seed", toml::Value::Integer(seed as i64));
    }
    Scenario::from_map(map, &base)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub monitors: BTreeMap<String, MonitorVerdict>,
    pub trajectory: Trajectory,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self.summary.status {
            RunStatus::Pass | RunStatus::Unstable => exit::OK,
            RunStatus::MonitorFail => exit::MONITOR_FAIL,
            RunStatus::Diverged => exit::DIVERGED,
        }
    }
}

/// Integrate a scenario and classify the outcome. Artifacts go to `out`
/// when given.
pub fn run_scenario(scenario: &Scenario, out: Option<&Path>) -> Result<RunOutcome> {
    let f0 = scenario.initial_field()?;
    let (traj, divergence) = match run(&scenario.solver, &f0) {
        Ok(t) => (t, None),
        Err(MuskatError::StepDiverged { last_valid_time, reason, partial }) => {
            (*partial, Some(format!("t = {last_valid_time}: {reason}")))
        }
        Err(e) => return Err(e),
    };
    let monitors = maximum_principle_monitors(&traj, scenario.solver.gates);
    let rho = scenario.solver.params.rho;
    let growth = if rho < 0.0 { instability_probe(&traj).ok() } else { None };
    let status = if rho < 0.0 {
        let grew = growth.is_some_and(|g| g.verdict == GrowthVerdict::Unstable);
        if divergence.is_some() || grew {
            RunStatus::Unstable
        } else {
            RunStatus::Pass
        }
    } else if divergence.is_some() {
        RunStatus::Diverged
    } else {
        RunStatus::from_monitors(&monitors)
    };
    let energy_residual = if rho > 0.0 && divergence.is_none() {
        energy_balance_check(&traj).ok().map(|r| r.terminal())
    } else {
        None
    };
    let summary = RunSummary {
        name: scenario.name.clone(),
        status,
        final_time: traj.final_time(),
        steps: traj.steps,
        divergence,
        energy_residual,
        growth,
    };
    if let Some(dir) = out {
        write_run(dir, &traj, &monitors, &summary)?;
        std::fs::write(dir.join("scenario.toml"), scenario.source.to_toml())?;
    }
    Ok(RunOutcome { summary, monitors, trajectory: traj })
}

/// State of the scenario at time `t` (the run is stopped there).
pub fn snapshot_at(scenario: &Scenario, t: f64) -> Result<Field> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MuskatError::config("--t", format!("must be a finite time >= 0, got {t}")));
    }
    let mut solver = scenario.solver.clone();
    solver.t_end = t;
    solver.snapshot_stride = usize::MAX;
    solver.diagnostics_stride = usize::MAX;
    let traj = run(&solver, &scenario.initial_field()?)?;
    Ok(traj
        .final_state()
        .cloned()
        .expect("a run always keeps its final snapshot"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for (name, _) in BUILTINS {
            let s = Scenario::from_map(builtin_map(name).unwrap(), Path::new(".")).unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn seed_override_changes_only_noise() {
        let a = load_scenario("unstable_demo", Some(1)).unwrap();
        let b = load_scenario("unstable_demo", Some(2)).unwrap();
        assert_eq!(a.solver, b.solver);
        let fa = a.initial_field().unwrap();
        let fb = b.initial_field().unwrap();
        let d = fa.sub(&fb).unwrap().max_abs();
        assert!(d > 0.0 && d <= 2e-8);
    }

    #[test]
    fn unknown_spec_is_a_config_error() {
        assert!(matches!(load_scenario("no_such_thing", None), Err(MuskatError::Config { .. })));
    }
}
