//! Integrating-factor RK4 time stepping, mollified initial data, and the
//! driver that produces a [`Trajectory`].

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{monitor_flags, record_state, MonitorGates, StepRecord};
use crate::error::{MuskatError, Result};
use crate::grid::{inverse_coefficients, Field, Grid};
use crate::norms::lipschitz_norm;
use crate::rhs::{nonlinear_remainder, Formulation, PhysicalParams, RhsOptions};

/// Blow-up threshold relative to the initial sup norm.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum DtRule {
    Fixed { dt: f64 },
    /// `dt = c · dx / (1 + max|fₓ|)`
    Cfl { c: f64 },
}

impl DtRule {
    pub const DEFAULT_CFL: f64 = 0.25;

    pub fn dt(&self, f: &Field) -> f64 {
        match *self {
            DtRule::Fixed { dt } => dt,
            DtRule::Cfl { c } => c * f.grid().dx() / (1.0 + lipschitz_norm(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub formulation: Formulation,
    pub rhs: RhsOptions,
    pub dt_rule: DtRule,
    pub t_end: f64,
    /// Keep a field snapshot every this many steps (plus the first and last state).
    pub snapshot_stride: usize,
    /// Emit a record every this many steps (plus the first and last state).
    pub diagnostics_stride: usize,
    pub mollify_width: f64,
    pub gates: MonitorGates,
    /// Hard cap on the number of steps; exceeding it counts as divergence.
    pub max_steps: usize,
}

impl SolverConfig {
    pub fn new(grid: Grid, params: PhysicalParams, t_end: f64) -> Self {
        Self {
            grid,
            params,
            formulation: Formulation::Split,
            rhs: RhsOptions::default(),
            dt_rule: DtRule::Cfl {
                c: DtRule::DEFAULT_CFL,
            },
            t_end,
            snapshot_stride: 10,
            diagnostics_stride: 1,
            mollify_width: 0.0,
            gates: MonitorGates::default(),
            max_steps: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.dt_rule {
            DtRule::Fixed { dt } if !(dt.is_finite() && dt > 0.0) => {
                return Err(MuskatError::param("scheme.dt", format!("must be positive, got {dt}")))
            }
            DtRule::Cfl { c } if !(c.is_finite() && c > 0.0) => {
                return Err(MuskatError::param("scheme.cfl", format!("must be positive, got {c}")))
            }
            _ => {}
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(MuskatError::param("run.t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(MuskatError::param("run.snapshot_stride", "must be >= 1"));
        }
        if self.diagnostics_stride == 0 {
            return Err(MuskatError::param("run.diagnostics_stride", "must be >= 1"));
        }
        check_mollify_width(self.mollify_width, &self.grid)?;
        PhysicalParams::new(self.params.rho, self.params.epsilon)?;
        crate::alpha::AlphaGrid::for_grid(&self.grid, self.rhs.nodes_for(self.grid.n_points()))?;
        Ok(())
    }

    pub fn alpha_nodes(&self) -> usize {
        self.rhs.nodes_for(self.grid.n_points())
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<(f64, Field)>,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&Field> {
        self.snapshots.last().map(|(_, f)| f)
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

fn check_mollify_width(width: f64, grid: &Grid) -> Result<()> {
    if !(width.is_finite() && width >= 0.0) {
        return Err(MuskatError::param("init.mollify_width", format!("must be >= 0, got {width}")));
    }
    if width >= grid.half_length() {
        return Err(MuskatError::param(
            "init.mollify_width",
            format!("must be smaller than the half length {}", grid.half_length()),
        ));
    }
    Ok(())
}

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 / (x * x - 1.0)).exp()
    } else {
        0.0
    }
}

/// Fourier transform of the unit-mass bump at frequency `xi`.
fn bump_transform(xi: f64, xs: &[f64], ws: &[f64], mass: f64) -> f64 {
    xs.iter().zip(ws).map(|(x, w)| w * (xi * x).cos()).sum::<f64>() / mass
}

/// Periodic convolution with `φ_ε(x) = ε⁻¹ φ(x/ε)`, `φ ∝ exp(1/(x²-1))` on
/// `(-1, 1)` with unit mass, applied as a spectral multiplier.
pub fn mollify(f0: &Field, width: f64) -> Result<Field> {
    check_mollify_width(width, f0.grid())?;
    if width == 0.0 {
        return Ok(f0.clone());
    }
    const P: usize = 4000;
    let h = 2.0 / P as f64;
    let xs: Vec<f64> = (0..P).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
    let ws: Vec<f64> = xs.iter().map(|&x| bump(x) * h).collect();
    let mass: f64 = ws.iter().sum();
    Ok(f0.apply_multiplier(|k| Complex64::new(bump_transform(k * width, &xs, &ws, mass), 0.0)))
}

/// One integrating-factor RK4 step of `fₜ = -(ρΛ - ε∂ₓₓ) f + R(f)`.
pub fn step(f: &Field, dt: f64, config: &SolverConfig) -> Result<Field> {
    let params = config.params;
    let formulation = config.formulation;
    let opts = config.rhs;
    step_with(f, dt, &params, |u| nonlinear_remainder(u, &params, formulation, &opts))
}

/// [`step`] with a caller-supplied remainder `R`.
pub fn step_with<R>(f: &Field, dt: f64, params: &PhysicalParams, remainder: R) -> Result<Field>
where
    R: Fn(&Field) -> Result<Field>,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(MuskatError::param("dt", format!("must be positive, got {dt}")));
    }
    let g = *f.grid();
    let nyq = g.nyquist_index();
    let (e, e2): (Vec<f64>, Vec<f64>) = (0..g.n_points())
        .map(|i| {
            let k = g.wavenumber(i).abs();
            let lk = -(params.rho * k + params.epsilon * k * k);
            ((lk * dt).exp(), (0.5 * lk * dt).exp())
        })
        .unzip();
    let nl = |c: &[Complex64]| -> Result<Vec<Complex64>> {
        let field = Field::new(g, inverse_coefficients(c))?;
        let r = remainder(&field)?;
        let mut out = r.coefficients().to_vec();
        out[0] = Complex64::new(0.0, 0.0);
        out[nyq] = Complex64::new(0.0, 0.0);
        Ok(out)
    };
    let u = f.coefficients();
    let h2 = 0.5 * dt;
    let a = nl(u)?;
    let u2: Vec<Complex64> = (0..u.len()).map(|i| e2[i] * (u[i] + a[i] * h2)).collect();
    let b = nl(&u2)?;
    let u3: Vec<Complex64> = (0..u.len()).map(|i| u[i] * e2[i] + b[i] * h2).collect();
    let c = nl(&u3)?;
    let u4: Vec<Complex64> = (0..u.len()).map(|i| u[i] * e[i] + c[i] * (dt * e2[i])).collect();
    let d = nl(&u4)?;
    let next: Vec<Complex64> = (0..u.len())
        .map(|i| {
            u[i] * e[i] + (a[i] * e[i] + (b[i] + c[i]) * (2.0 * e2[i]) + d[i]) * (dt / 6.0)
        })
        .collect();
    Field::new(g, inverse_coefficients(&next))
}

/// Integrate from `f0` (mollified first) to `config.t_end`.
pub fn run(config: &SolverConfig, f0: &Field) -> Result<Trajectory> {
    config.validate()?;
    if *f0.grid() != config.grid {
        return Err(MuskatError::GridMismatch);
    }
    let mut f = mollify(f0, config.mollify_width)?;
    let m = config.alpha_nodes();
    let linf0 = f.max_abs();
    let blowup = DIVERGENCE_FACTOR * linf0;
    let mut running = lipschitz_norm(&f);
    let mut traj = Trajectory {
        config: config.clone(),
        records: vec![record_state(0.0, &f, m, running)?],
        snapshots: vec![(0.0, f.clone())],
        steps: 0,
    };
    let mut t = 0.0;
    let t_end = config.t_end;
    let diverged = |traj: Trajectory, t: f64, reason: String| -> MuskatError {
        let mut traj = traj;
        annotate(&mut traj);
        MuskatError::StepDiverged {
            last_valid_time: t,
            reason,
            partial: Box::new(traj),
        }
    };
    while t < t_end {
        if traj.steps >= config.max_steps {
            return Err(diverged(traj, t, format!("step budget of {} exhausted", config.max_steps)));
        }
        let mut dt = config.dt_rule.dt(&f);
        let last = t + dt >= t_end * (1.0 - 1e-12);
        if last {
            dt = t_end - t;
        }
        if !(dt > 0.0) || t + dt == t {
            return Err(diverged(traj, t, format!("time step collapsed to {dt:e}")));
        }
        let next = match step(&f, dt, config) {
            Ok(next) => next,
            Err(MuskatError::NonFinite { .. }) | Err(MuskatError::QuadratureNonFinite { .. }) => {
                return Err(diverged(traj, t, "non-finite state".into()));
            }
            Err(e) => return Err(e),
        };
        if next.max_abs() > blowup {
            return Err(diverged(
                traj,
                t,
                format!("sup norm exceeded {DIVERGENCE_FACTOR:e} times its initial value"),
            ));
        }
        f = next;
        t = if last { t_end } else { t + dt };
        traj.steps += 1;
        running = running.max(lipschitz_norm(&f));
        if last || traj.steps % config.diagnostics_stride == 0 {
            traj.records.push(record_state(t, &f, m, running)?);
        }
        if last || traj.steps % config.snapshot_stride == 0 {
            traj.snapshots.push((t, f.clone()));
        }
    }
    annotate(&mut traj);
    Ok(traj)
}

fn annotate(traj: &mut Trajectory) {
    let flags = monitor_flags(&traj.records, traj.config.params.rho, traj.config.gates);
    for (r, fl) in traj.records.iter_mut().zip(flags) {
        r.flags = fl;
    }
}
