//! Self-checks run by `muskat verify <suite>`.

use std::f64::consts::PI;

use muskat_core::diagnostics::{
    energy_balance_check, linear_decay_fit, maximum_principle_monitors, MonitorGates, MonitorStatus,
};
use muskat_core::init::random_band_limited;
use muskat_core::norms::sobolev_seminorm;
use muskat_core::operators::{derivative, hilbert_transform, kernel_arctan_with, kernel_cosine_with, lambda, KernelQuadrature};
use muskat_core::rhs::{rhs_arctan, rhs_new_kernel, rhs_split};
use muskat_core::stepper::run;
use muskat_core::{sample_function, DtRule, Field, Grid, MuskatError, PhysicalParams, Result, RhsOptions, SolverConfig};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SUITES: [&str; 6] = ["operators", "equivalence", "linear", "principles", "convergence", "all"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"le"`: pass when value ≤ threshold; `"ge"`: value ≥ threshold.
    pub comparison: &'static str,
    pub passed: bool,
}

impl Check {
    fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, comparison: "le", passed: value <= threshold }
    }

    fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, comparison: "ge", passed: value >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Run a named suite. Unknown names are a config error.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let checks = match name {
        "operators" => operators()?,
        "equivalence" => equivalence()?,
        "linear" => linear()?,
        "principles" => principles()?,
        "convergence" => convergence()?,
        "all" => {
            let mut all = Vec::new();
            for s in &SUITES[..SUITES.len() - 1] {
                let mut c = run_suite(s)?.checks;
                for check in &mut c {
                    check.name = format!("{s}/{}", check.name);
                }
                all.extend(c);
            }
            all
        }
        other => {
            return Err(MuskatError::config(
                "suite",
                format!("unknown suite `{other}` (expected one of {})", SUITES.join(", ")),
            ))
        }
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn rel_l2(a: &Field, b: &Field) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.values().iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn operators() -> Result<Vec<Check>> {
    let g = Grid::new(256, 8.0 * PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = random_band_limited(g, 60, &mut rng);
        let lhs = derivative(&hilbert_transform(&f), 1)?;
        let dev = lhs.sub(&lambda(&f))?.max_abs() / f.max_abs();
        worst = worst.max(dev);
    }
    let mode = KernelQuadrature::hybrid();
    let (mut kc, mut ka): (f64, f64) = (0.0, 0.0);
    for i in 0..200 {
        let a = -10.0 + 20.0 * i as f64 / 199.0;
        kc = kc.max((kernel_cosine_with(a, mode) - 1.0 / (1.0 + a * a)).abs());
        ka = ka.max((kernel_arctan_with(a, mode) - a.atan()).abs());
    }
    Ok(vec![
        Check::le("dx_hilbert_equals_lambda", worst, 1e-12),
        Check::le("kernel_cosine", kc, 1e-10),
        Check::le("kernel_arctan", ka, 1e-8),
    ])
}

/// Largest pairwise relative difference; pairs already at round-off are
/// reported separately because they cannot shrink further.
fn pairwise(f: &Field, m: usize) -> Result<(f64, f64)> {
    let p = PhysicalParams::new(PI, 0.0)?;
    let o = RhsOptions::with_nodes(m);
    let s = rhs_split(f, &p, &o)?;
    let a = rhs_arctan(f, &p, &o)?;
    let k = rhs_new_kernel(f, &p, &o)?;
    let d = [rel_l2(&a, &s), rel_l2(&k, &s), rel_l2(&k, &a)];
    let max = d.iter().cloned().fold(0.0, f64::max);
    Ok((max, d[0].max(d[1])))
}

pub fn equivalence_fields(g: Grid) -> Result<Vec<Field>> {
    Ok(vec![
        sample_function(g, |x| 0.3 * x.sin())?,
        sample_function(g, |x| 0.5 * (2.0 * x).sin() + 0.2 * (5.0 * x).cos())?,
        sample_function(g, |x| 0.9 * (-x * x).exp())?,
    ])
}

fn equivalence() -> Result<Vec<Check>> {
    let g = Grid::new(512, 8.0 * PI)?;
    let mut checks = Vec::new();
    for (i, f) in equivalence_fields(g)?.iter().enumerate() {
        let (coarse, coarse_split) = pairwise(f, 2048)?;
        let (_, fine_split) = pairwise(f, 4096)?;
        checks.push(Check::le(format!("field{}_max_pairwise", i + 1), coarse, 5e-6));
        checks.push(Check::ge(format!("field{}_refinement_ratio", i + 1), coarse_split / fine_split, 4.0));
    }
    Ok(checks)
}

fn decay_rate(rho: f64, eps: f64, k: f64, a: f64) -> Result<f64> {
    let g = Grid::new(128, 8.0 * PI)?;
    let mut cfg = SolverConfig::new(g, PhysicalParams::new(rho, eps)?, 1.0);
    cfg.snapshot_stride = 1;
    let f0 = sample_function(g, |x| a * (k * x).cos())?;
    let traj = run(&cfg, &f0)?;
    linear_decay_fit(&traj, k)
}

fn linear() -> Result<Vec<Check>> {
    let r1 = decay_rate(1.0, 0.0, 3.0, 1e-5)?;
    let r2 = decay_rate(1.0, 0.1, 2.0, 1e-5)?;
    Ok(vec![
        Check::le("rate_rho1_k3_rel_error", (r1 - 3.0).abs() / 3.0, 0.01),
        Check::le("rate_eps0.1_k2_rel_error", (r2 - 2.4).abs() / 2.4, 0.01),
    ])
}

fn principles() -> Result<Vec<Check>> {
    let g = Grid::new(256, 8.0 * PI)?;
    let mut checks = Vec::new();
    let monitor_ok = |traj: &muskat_core::Trajectory, gates, name: &str| {
        let v = maximum_principle_monitors(traj, gates);
        if v[name].status == MonitorStatus::Pass { 1.0 } else { 0.0 }
    };
    let cfg = SolverConfig::new(g, PhysicalParams::new(1.0, 0.0)?, 2.0);
    let t8 = run(&cfg, &sample_function(g, |x| 0.8 * x.sin())?)?;
    checks.push(Check::ge("l2_monotone", monitor_ok(&t8, MonitorGates::default(), "l2_monotone"), 1.0));
    checks.push(Check::ge("linf_monotone", monitor_ok(&t8, MonitorGates::default(), "linf_monotone"), 1.0));
    let t9 = run(&cfg, &sample_function(g, |x| 0.9 * x.sin())?)?;
    let max_slope = t9.records.iter().map(|r| r.norms.slope_sup).fold(0.0, f64::max);
    checks.push(Check::le("slope_bounded", max_slope, 0.9 * (1.0 + 1e-8)));
    let cfg = SolverConfig::new(g, PhysicalParams::new(PI, 0.0)?, 2.0);
    let small = MonitorGates { small_data: true };
    let t1 = run(&cfg, &sample_function(g, |x| 0.01 * x.sin())?)?;
    checks.push(Check::ge("h32_monotone", monitor_ok(&t1, small, "h32_monotone"), 1.0));
    Ok(checks)
}

fn convergence() -> Result<Vec<Check>> {
    let mut residuals = Vec::new();
    for (n, dt) in [(64, 0.125), (128, 0.0625), (256, 0.03125)] {
        let g = Grid::new(n, 8.0 * PI)?;
        let mut cfg = SolverConfig::new(g, PhysicalParams::new(PI, 0.0)?, 1.0);
        cfg.dt_rule = DtRule::Fixed { dt };
        let traj = run(&cfg, &sample_function(g, |x| 0.5 * x.sin())?)?;
        residuals.push(energy_balance_check(&traj)?.terminal().abs());
    }
    let mut checks = vec![
        Check::ge("energy_ratio_1", residuals[0] / residuals[1], 4.0),
        Check::ge("energy_ratio_2", residuals[1] / residuals[2], 4.0),
    ];
    let g = Grid::new(256, 8.0 * PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..20 {
        let f = random_band_limited(g, 60, &mut rng);
        let (a, b, c) = (sobolev_seminorm(&f, 0.5)?, sobolev_seminorm(&f, 1.5)?, sobolev_seminorm(&f, 2.5)?);
        worst = worst.max(b / (a * c).sqrt() - 1.0);
    }
    checks.push(Check::le("hs_log_convexity_excess", worst, 1e-12));
    let f = sample_function(g, |x| 0.4 * (0.5 * x).sin() + 0.1 * (3.0 * x).cos())?;
    let half = g.rescaled(2.0)?;
    let f_lambda = Field::new(half, f.values().iter().map(|v| v / 2.0).collect())?;
    let h = sobolev_seminorm(&f, 1.5)?;
    let h_lambda = sobolev_seminorm(&f_lambda, 1.5)?;
    checks.push(Check::le("h32_scaling_rel_error", (h_lambda - h).abs() / h, 0.01));
    Ok(checks)
}
