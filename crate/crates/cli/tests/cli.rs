use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn muskat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muskat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn muskat_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muskat"))
        .current_dir(dir)
        .args(args)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const SHORT: &str = "grid.n = 32\nphys.rho = 1.0\nrun.t_end = 0.2\ninit.kind = \"single_mode\"\ninit.params = [0.3, 1.0]\n";

#[test]
fn stable_builtin_passes_and_writes_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let o = muskat(d.path(), &["run", "stable_smallslope", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("stable_smallslope: pass"));
    let csv = fs::read_to_string(d.path().join("a/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,l2,linf,slope,h32,h52,dissipation,low_third,mid_third,high_third");
    let verdict: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("a/verdict.json")).unwrap()).unwrap();
    for m in ["l2_monotone", "linf_monotone", "slope_bounded"] {
        assert_eq!(verdict[m]["status"], "pass");
    }
    let index = fs::read_to_string(d.path().join("a/snapshots/index.csv")).unwrap();
    assert!(index.lines().count() > 2);
}

#[test]
fn outputs_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        assert_eq!(muskat(d.path(), &["run", "unstable_demo", "--out", out]).status.code(), Some(0));
    }
    for f in ["trajectory.csv", "verdict.json", "summary.json", "snapshots/snapshot_00001.csv"] {
        let a = fs::read(d.path().join("a").join(f)).unwrap();
        let b = fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn unstable_builtin_exits_zero_with_unstable_verdict() {
    let d = tempfile::tempdir().unwrap();
    let o = muskat(d.path(), &["run", "unstable_demo", "--out", "u"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unstable_demo: unstable"));
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("u/summary.json")).unwrap()).unwrap();
    assert_eq!(s["status"], "unstable");
    assert_eq!(s["growth"]["verdict"], "unstable");
}

#[test]
fn missing_grid_n_exits_one_naming_the_field() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.toml", "init.kind = \"single_mode\"\ninit.params = [0.1, 1.0]\n");
    let o = muskat(d.path(), &["run", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid.n"), "{}", stderr(&o));
}

#[test]
fn syntax_error_reports_line() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.toml", "grid.n = 32\nphys.rho = = 1\n");
    let o = muskat(d.path(), &["run", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn monitor_failure_exits_two() {
    // Four α-nodes on an eight-point grid cannot resolve the nonlinear term.
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "coarse.toml",
        "grid.n = 8\ngrid.L = \"pi\"\nphys.rho = 1.0\nscheme.quadrature = 4\nscheme.dt = 0.5\nrun.t_end = 3.0\n\
         init.kind = \"multi_mode\"\ninit.params = [3.0, 1.0, 0.0, 2.0, 3.0, 0.7]\n",
    );
    let o = muskat(d.path(), &["run", "coarse.toml", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let verdict = fs::read_to_string(d.path().join("c/verdict.json")).unwrap();
    assert!(verdict.contains("\"fail\""));
}

#[test]
fn divergence_in_stable_scenario_exits_three() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "s.toml", &format!("{}run.max_steps = 1\n", SHORT.replace("0.2", "5.0")));
    let o = muskat(d.path(), &["run", "s.toml", "--out", "s"]);
    assert_eq!(o.status.code(), Some(3));
    let s = fs::read_to_string(d.path().join("s/summary.json")).unwrap();
    assert!(s.contains("\"diverged\""));
}

#[test]
fn env_override_applies() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "s.toml", SHORT);
    let o = muskat_env(d.path(), &["run", "s.toml", "--out", "e"], &[("MUSKAT_GRID__N", "48")]);
    assert_eq!(o.status.code(), Some(0));
    let snap = fs::read_to_string(d.path().join("e/snapshots/snapshot_00000.csv")).unwrap();
    assert_eq!(snap.lines().count(), 49);
    let o = muskat_env(d.path(), &["run", "s.toml"], &[("MUSKAT_GRID__N", "47")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_flag_changes_noise_only() {
    let d = tempfile::tempdir().unwrap();
    let a = muskat(d.path(), &["snapshot", "unstable_demo", "--t", "0", "--seed", "1"]);
    let b = muskat(d.path(), &["snapshot", "unstable_demo", "--t", "0", "--seed", "2"]);
    let c = muskat(d.path(), &["snapshot", "unstable_demo", "--t", "0", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn snapshot_writes_state_at_time() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "s.toml", SHORT);
    let o = muskat(d.path(), &["snapshot", "s.toml", "--t", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,f"));
    assert_eq!(text.lines().count(), 33);
    let max: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(max < 0.3 && max > 0.2);
    let o = muskat(d.path(), &["snapshot", "s.toml", "--t", "0.1", "--out", "snap"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("snap/scenario_t0.1.csv").is_file());
}

#[test]
fn verify_known_and_unknown_suites() {
    let d = tempfile::tempdir().unwrap();
    let o = muskat(d.path(), &["verify", "operators", "--out", "v"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    assert!(d.path().join("v/verify_operators.json").is_file());
    let o = muskat(d.path(), &["verify", "equivalence"]);
    assert_eq!(o.status.code(), Some(0));
    let o = muskat(d.path(), &["verify", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_empty_and_grid() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "empty.toml", "");
    let o = muskat(d.path(), &["sweep", "empty.toml"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    write(d.path(), "base.toml", SHORT);
    write(
        d.path(),
        "grid.toml",
        "base = \"base.toml\"\n[sweep]\n\"phys.rho\" = [1.0, 2.0]\n\"init.amplitude\" = [0.1, 0.2]\n",
    );
    let o = muskat(d.path(), &["sweep", "grid.toml", "--out", "g", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("name,phys.rho,init.amplitude,status"));
    assert!(lines[1].starts_with("scenario_000,1,0.1,pass"), "{}", lines[1]);
    assert!(lines[4].starts_with("scenario_003,2,0.2,pass"), "{}", lines[4]);
    assert_eq!(fs::read_to_string(d.path().join("g/summary.csv")).unwrap(), stdout(&o));
    assert!(d.path().join("g/scenario_002/trajectory.csv").is_file());
}

#[test]
fn sweep_shows_small_data_gate_transition() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "base.toml", SHORT);
    write(
        d.path(),
        "amp.toml",
        "base = \"base.toml\"\n[sweep]\n\"init.amplitude\" = [0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32]\n",
    );
    let o = muskat(d.path(), &["sweep", "amp.toml"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "h32_monotone").unwrap();
    let gate: Vec<String> = text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().to_string()).collect();
    assert_eq!(gate, ["pass", "pass", "na", "na", "na", "na", "na"]);
}

#[test]
fn sweep_records_row_errors() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "base.toml", SHORT);
    write(d.path(), "b.toml", "base = \"base.toml\"\n[sweep]\n\"phys.eps\" = [0.0, -1.0]\n");
    let o = muskat(d.path(), &["sweep", "b.toml"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",pass,"));
    assert!(rows[1].contains(",error,") && rows[1].contains("phys.eps"));
}
