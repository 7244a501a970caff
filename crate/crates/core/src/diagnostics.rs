//! Per-step records, the dissipation functional, and post-run monitors.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::alpha::{alpha_sum, AlphaGrid, ShiftTable};
use crate::error::{MuskatError, Result};
use crate::grid::{Field, Grid};
use crate::norms::{max_slope, NormReport};
use crate::rhs::{rhs, Formulation, PhysicalParams, RhsOptions};
use crate::special::sine_integral;
use crate::stepper::Trajectory;

/// Sobolev indices recorded at every diagnostics step.
pub const RECORDED_HS: [f64; 2] = [1.5, 2.5];

/// Absolute and relative slack of every monitor comparison.
pub const MONITOR_ABS_TOL: f64 = 1e-10;
pub const MONITOR_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorFlag {
    pub status: MonitorStatus,
    /// `bound - value`; negative means the bound was exceeded.
    pub margin: Option<f64>,
}

impl MonitorFlag {
    fn na() -> Self {
        Self {
            status: MonitorStatus::NotApplicable,
            margin: None,
        }
    }
}

/// Spectral energy `2L Σ |c_m|²` split by `|k|` into thirds of `[0, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SpectrumThirds {
    pub low: f64,
    pub mid: f64,
    pub high: f64,
}

pub fn spectrum_thirds(f: &Field) -> SpectrumThirds {
    let g = f.grid();
    let kmax = g.max_wavenumber();
    let mut out = SpectrumThirds::default();
    for (i, c) in f.coefficients().iter().enumerate() {
        let e = 2.0 * g.half_length() * c.norm_sqr();
        let k = g.wavenumber(i).abs();
        if 3.0 * k <= kmax {
            out.low += e;
        } else if 3.0 * k <= 2.0 * kmax {
            out.mid += e;
        } else {
            out.high += e;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub norms: NormReport,
    pub dissipation: Option<f64>,
    pub max_slope_location: f64,
    pub spectrum: SpectrumThirds,
    /// Largest `‖fₓ‖_∞` seen at any step up to `t`.
    pub lipschitz_running_max: f64,
    pub flags: BTreeMap<String, MonitorFlag>,
}

impl StepRecord {
    pub fn h32(&self) -> f64 {
        self.norms.hs(1.5).unwrap_or(f64::NAN)
    }

    pub fn h52(&self) -> f64 {
        self.norms.hs(2.5).unwrap_or(f64::NAN)
    }
}

pub fn record_state(
    t: f64,
    f: &Field,
    alpha_nodes: usize,
    lipschitz_running_max: f64,
) -> Result<StepRecord> {
    let norms = NormReport::compute(f, &RECORDED_HS, &[])?;
    let (j, _) = max_slope(f);
    Ok(StepRecord {
        t,
        dissipation: Some(dissipation_with(f, alpha_nodes)?),
        max_slope_location: f.grid().node(j),
        spectrum: spectrum_thirds(f),
        lipschitz_running_max: lipschitz_running_max.max(norms.slope_sup),
        norms,
        flags: BTreeMap::new(),
    })
}

/// `∫_{|α|>L} |1 - e^{-ikα}|² α⁻² dα`.
fn far_field_weight(k: f64, l: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    4.0 / l - 4.0 * (k * l).cos() / l + 4.0 * k * (PI / 2.0 - sine_integral(k * l))
}

/// `D(f) = ∫∫ log(1 + (Δ_αf)²) dα dx` with the default `4N` α nodes.
pub fn dissipation(f: &Field) -> Result<f64> {
    dissipation_with(f, 4 * f.grid().n_points())
}

/// `D(f)` on `m` α nodes. Offsets beyond the window contribute their exact
/// quadratic part.
pub fn dissipation_with(f: &Field, m: usize) -> Result<f64> {
    let g = *f.grid();
    let n = g.n_points();
    let alphas = AlphaGrid::for_grid(&g, m)?;
    let table = ShiftTable::new(f, &alphas);
    let v = f.values();
    let total = alpha_sum(alphas.len(), 1, |j, acc| {
        let a = alphas.node(j);
        let inv = 1.0 / a;
        let s = table.view(j);
        let mut part = 0.0;
        for i in 0..n {
            let d = (v[i] - s.get(i)) * inv;
            part += d.mul_add(d, 1.0).ln();
        }
        acc[0] += part;
        Ok(())
    })?[0];
    let l = g.half_length();
    let tail: f64 = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm_sqr() * far_field_weight(g.wavenumber(i).abs(), l))
        .sum::<f64>()
        * 2.0
        * l;
    Ok(total * alphas.weight() * g.dx() + tail)
}

/// Constant in `‖f(T)‖² + c_E ∫₀^T D dt = ‖f₀‖²`.
pub fn energy_constant(rho: f64) -> f64 {
    rho / PI
}

/// Measure `c_E = -(d‖f‖²/dt) / D` at `t = 0` for `amplitude · cos(k x)`.
pub fn calibrate_energy_constant(
    grid: Grid,
    params: &PhysicalParams,
    amplitude: f64,
    k: f64,
    opts: &RhsOptions,
) -> Result<f64> {
    let f = crate::grid::sample_function(grid, |x| amplitude * (k * x).cos())?;
    let r = rhs(&f, params, Formulation::Split, opts)?;
    let dnorm2: f64 = 2.0
        * f.values()
            .iter()
            .zip(r.values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
        * grid.dx();
    let d = dissipation_with(&f, opts.nodes_for(grid.n_points()))?;
    if d == 0.0 {
        return Err(MuskatError::Diagnostic("zero dissipation in calibration".into()));
    }
    Ok(-dnorm2 / d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResidual {
    pub c_e: f64,
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
}

impl EnergyResidual {
    pub fn terminal(&self) -> f64 {
        self.residual.last().copied().unwrap_or(0.0)
    }
}

/// Cumulative `∫ y dt` at every sample. Each interval integrates the cubic
/// through the four nearest samples (fewer near short series), so the rule
/// is fourth-order accurate on smooth data with arbitrary spacing.
pub fn cumulative_integral(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let width = n.min(4);
    // Two-point Gauss nodes on [-1, 1] integrate cubics exactly.
    let g = 1.0 / 3f64.sqrt();
    for i in 0..n - 1 {
        let start = i.saturating_sub(1).min(n - width);
        let idx: Vec<usize> = (start..start + width).collect();
        let lagrange = |x: f64| -> f64 {
            idx.iter()
                .map(|&j| {
                    let mut w = y[j];
                    for &m in &idx {
                        if m != j {
                            w *= (x - t[m]) / (t[j] - t[m]);
                        }
                    }
                    w
                })
                .sum()
        };
        let (a, b) = (t[i], t[i + 1]);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        out[i + 1] = out[i] + h * (lagrange(c - h * g) + lagrange(c + h * g));
    }
    out
}

/// `r(t) = ‖f(t)‖² + c_E ∫₀^t D - ‖f₀‖²` over the recorded steps.
pub fn energy_balance_check(traj: &Trajectory) -> Result<EnergyResidual> {
    let c_e = energy_constant(traj.config.params.rho);
    let recs = &traj.records;
    let first = recs.first().ok_or(MuskatError::MissingDissipation)?;
    let l2_0 = first.norms.l2.powi(2);
    let times: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let d: Vec<f64> = recs
        .iter()
        .map(|r| r.dissipation.ok_or(MuskatError::MissingDissipation))
        .collect::<Result<_>>()?;
    let integral = cumulative_integral(&times, &d);
    let residual = recs
        .iter()
        .zip(&integral)
        .map(|(r, i)| r.norms.l2.powi(2) + c_e * i - l2_0)
        .collect();
    Ok(EnergyResidual {
        c_e,
        times,
        residual,
    })
}

/// Which hypothesis-dependent monitors are asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MonitorGates {
    pub small_data: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub status: MonitorStatus,
    pub worst_margin: Option<f64>,
    pub time_of_worst_margin: Option<f64>,
}

pub const MONITOR_NAMES: [&str; 4] = ["l2_monotone", "linf_monotone", "slope_bounded", "h32_monotone"];

fn check(value: f64, bound: f64) -> MonitorFlag {
    let tol = MONITOR_ABS_TOL + MONITOR_REL_TOL * bound.abs();
    let margin = bound - value;
    MonitorFlag {
        status: if value <= bound + tol {
            MonitorStatus::Pass
        } else {
            MonitorStatus::Fail
        },
        margin: Some(margin),
    }
}

/// Per-step flags for each monitor, in record order. The first record is
/// the reference state and carries no comparison.
pub fn monitor_flags(
    records: &[StepRecord],
    rho: f64,
    gates: MonitorGates,
) -> Vec<BTreeMap<String, MonitorFlag>> {
    let mut out = Vec::with_capacity(records.len());
    let stable = rho > 0.0;
    let slope0 = records.first().map(|r| r.norms.slope_sup).unwrap_or(0.0);
    for (i, r) in records.iter().enumerate() {
        let mut flags = BTreeMap::new();
        let prev = if i > 0 { Some(&records[i - 1]) } else { None };
        let monotone = |get: &dyn Fn(&StepRecord) -> f64| match prev {
            Some(p) if stable => check(get(r), get(p)),
            _ => MonitorFlag::na(),
        };
        flags.insert("l2_monotone".to_string(), monotone(&|x| x.norms.l2));
        flags.insert("linf_monotone".to_string(), monotone(&|x| x.norms.linf));
        let slope = if stable && slope0 < 1.0 && i > 0 {
            check(r.norms.slope_sup, slope0)
        } else {
            MonitorFlag::na()
        };
        flags.insert("slope_bounded".to_string(), slope);
        let h32 = if gates.small_data {
            monotone(&|x| x.h32())
        } else {
            MonitorFlag::na()
        };
        flags.insert("h32_monotone".to_string(), h32);
        out.push(flags);
    }
    out
}

/// Summarize every monitor over the run: worst margin and when it occurred.
pub fn maximum_principle_monitors(
    traj: &Trajectory,
    gates: MonitorGates,
) -> BTreeMap<String, MonitorVerdict> {
    let flags = monitor_flags(&traj.records, traj.config.params.rho, gates);
    summarize(&traj.records, &flags)
}

pub fn summarize(
    records: &[StepRecord],
    flags: &[BTreeMap<String, MonitorFlag>],
) -> BTreeMap<String, MonitorVerdict> {
    let mut out = BTreeMap::new();
    for name in MONITOR_NAMES {
        let mut verdict = MonitorVerdict {
            status: MonitorStatus::NotApplicable,
            worst_margin: None,
            time_of_worst_margin: None,
        };
        for (r, f) in records.iter().zip(flags) {
            let Some(flag) = f.get(name) else { continue };
            match flag.status {
                MonitorStatus::NotApplicable => continue,
                MonitorStatus::Fail => verdict.status = MonitorStatus::Fail,
                MonitorStatus::Pass => {
                    if verdict.status == MonitorStatus::NotApplicable {
                        verdict.status = MonitorStatus::Pass;
                    }
                }
            }
            if let Some(m) = flag.margin {
                if verdict.worst_margin.is_none_or(|w| m < w) {
                    verdict.worst_margin = Some(m);
                    verdict.time_of_worst_margin = Some(r.t);
                }
            }
        }
        out.insert(name.to_string(), verdict);
    }
    out
}

/// Slope of log|ĉ_k(t)| above which a single-mode run is not linear.
pub const LINEAR_SLOPE_THRESHOLD: f64 = 1e-3;

/// Least-squares decay rate `-d log|ĉ_k| / dt` from the snapshots.
pub fn linear_decay_fit(traj: &Trajectory, k: f64) -> Result<f64> {
    let snaps = &traj.snapshots;
    if snaps.len() < 2 {
        return Err(MuskatError::Diagnostic(
            "decay fit needs at least two snapshots".into(),
        ));
    }
    let grid = *snaps[0].1.grid();
    let m = grid.mode_of_wavenumber(k).ok_or_else(|| {
        MuskatError::Diagnostic(format!("wavenumber {k} is not a mode of grid {grid}"))
    })?;
    let idx = grid.index_of_mode(m).expect("mode checked above");
    let indicator = crate::norms::lipschitz_norm(&snaps[0].1);
    if indicator > LINEAR_SLOPE_THRESHOLD {
        return Err(MuskatError::Diagnostic(format!(
            "initial slope {indicator:e} exceeds the linear-regime threshold {LINEAR_SLOPE_THRESHOLD:e}"
        )));
    }
    let pts: Vec<(f64, f64)> = snaps
        .iter()
        .map(|(t, f)| (*t, f.coefficients()[idx].norm().ln()))
        .collect();
    if pts.iter().any(|(_, y)| !y.is_finite()) {
        return Err(MuskatError::Diagnostic(format!("mode {k} vanished during the run")));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - tm).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Unstable,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub high_third_growth: f64,
    pub slope_growth: f64,
    pub verdict: GrowthVerdict,
}

pub const INSTABILITY_FACTOR: f64 = 10.0;

/// Growth of the high-wavenumber energy and of the slope in an unstable run.
pub fn instability_probe(traj: &Trajectory) -> Result<GrowthReport> {
    if traj.config.params.rho >= 0.0 {
        return Err(MuskatError::Diagnostic(
            "instability probe requires rho < 0".into(),
        ));
    }
    let first = traj
        .records
        .first()
        .ok_or_else(|| MuskatError::Diagnostic("empty trajectory".into()))?;
    let growth = |get: &dyn Fn(&StepRecord) -> f64| {
        let base = get(first).max(f64::MIN_POSITIVE);
        traj.records.iter().map(|r| get(r) / base).fold(1.0, f64::max)
    };
    let high_third_growth = growth(&|r| r.spectrum.high);
    let slope_growth = growth(&|r| r.norms.slope_sup);
    let verdict = if high_third_growth >= INSTABILITY_FACTOR || slope_growth >= INSTABILITY_FACTOR {
        GrowthVerdict::Unstable
    } else {
        GrowthVerdict::Bounded
    };
    Ok(GrowthReport {
        high_third_growth,
        slope_growth,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_function;
    use crate::norms::l2_norm;

    fn grid() -> Grid {
        Grid::new(128, 8.0 * PI).unwrap()
    }

    #[test]
    fn dissipation_of_zero_and_constants() {
        assert_eq!(dissipation(&Field::zeros(grid())).unwrap(), 0.0);
        let c = Field::constant(grid(), 1.5).unwrap();
        assert!(dissipation(&c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dissipation_is_quadratic_for_small_data() {
        let g = grid();
        let d = |a: f64| dissipation(&sample_function(g, |x| a * (0.5 * x).sin()).unwrap()).unwrap();
        let ratio = d(1e-3) / d(5e-4);
        assert!((ratio - 4.0).abs() < 0.04, "{ratio}");
    }

    #[test]
    fn dissipation_translation_invariant() {
        let g = grid();
        let f = sample_function(g, |x| 0.5 * (0.5 * x).sin() + 0.2 * (1.5 * x).cos()).unwrap();
        let d0 = dissipation(&f).unwrap();
        let d1 = dissipation(&f.index_shifted(7)).unwrap();
        assert!((d0 - d1).abs() <= 1e-10 * d0);
    }

    #[test]
    fn dissipation_small_amplitude_oracle() {
        // D ≈ 2π ‖Λ^{1/2} f‖² for small data.
        let g = grid();
        let a = 1e-4;
        let f = sample_function(g, |x| a * x.cos()).unwrap();
        let expect = 2.0 * PI * 1.0 * l2_norm(&f).powi(2);
        let d = dissipation(&f).unwrap();
        assert!((d / expect - 1.0).abs() < 1e-6, "{}", d / expect);
    }

    #[test]
    fn calibration_gives_rho_over_pi() {
        let g = Grid::new(256, 8.0 * PI).unwrap();
        let p = PhysicalParams::new(PI, 0.0).unwrap();
        let c = calibrate_energy_constant(g, &p, 1e-3, 1.0, &RhsOptions::default()).unwrap();
        assert!((c - 1.0).abs() < 1e-6, "{c}");
    }

    #[test]
    fn thirds_partition_energy() {
        let g = Grid::new(96, 8.0 * PI).unwrap();
        let f = sample_function(g, |x| x.cos() + (2.5 * x).sin() + 0.1 * (5.5 * x).cos()).unwrap();
        let th = spectrum_thirds(&f);
        let total = l2_norm(&f).powi(2);
        assert!(((th.low + th.mid + th.high) / total - 1.0).abs() < 1e-12);
        assert!(th.low > 0.0 && th.mid > 0.0 && th.high > 0.0);
    }

    #[test]
    fn cumulative_integral_is_exact_on_cubics() {
        let t = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let y: Vec<f64> = t.iter().map(|x| 1.0 + x - 2.0 * x * x + 3.0 * x * x * x).collect();
        let out = cumulative_integral(&t, &y);
        for (x, v) in t.iter().zip(&out) {
            let exact = x + x * x / 2.0 - 2.0 * x.powi(3) / 3.0 + 0.75 * x.powi(4);
            assert!((v - exact).abs() < 1e-14);
        }
        assert_eq!(cumulative_integral(&[0.0], &[1.0]), vec![0.0]);
        let two = cumulative_integral(&[0.0, 2.0], &[1.0, 3.0]);
        assert_eq!(two[0], 0.0);
        assert!((two[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn tolerance_boundary() {
        assert_eq!(check(1.0 + 5e-9, 1.0).status, MonitorStatus::Pass);
        assert_eq!(check(1.0 + 1e-7, 1.0).status, MonitorStatus::Fail);
        assert_eq!(check(5e-11, 0.0).status, MonitorStatus::Pass);
        assert!(check(0.5, 1.0).margin.unwrap() == 0.5);
    }
}
