//! Right-hand side of the interface equation in three equivalent forms.
//!
//! * `Split`:     `-ρ (Λf + T(f))`, with `Λ` spectral and `T` by α-quadrature.
//! * `Arctan`:    `(ρ/π) ∂ₓ ∫ arctan(Δ_αf) dα`.
//! * `NewKernel`: `(ρ/π) ∫ ∂ₓΔ_αf · κ(Δ_αf) dα`, `κ(a) = 1/(1+a²)`.
//!
//! The α-integral runs over the truncated window `|α| < L` with periodic
//! samples. In the `Arctan` and `NewKernel` forms the integrand is linear in
//! `f` at leading order, so the window cuts off part of the `Λ` term. That
//! missing piece is known exactly, `-ρ|k|(1 - (2/π) Si(|k| L))` per mode, and
//! is added back spectrally. The nonlinear far field decays like `α⁻³` and is
//! truncated identically in all three forms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alpha::{alpha_sum, AlphaGrid, ShiftTable};
use crate::error::{MuskatError, Result};
use crate::grid::Field;
use crate::operators::{dx, dxx, kernel_arctan_with, kernel_cosine_with, lambda, KernelQuadrature};
use crate::special::sine_integral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Split,
    Arctan,
    NewKernel,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Split, Formulation::Arctan, Formulation::NewKernel];

    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::Split => "split",
            Formulation::Arctan => "arctan",
            Formulation::NewKernel => "new_kernel",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = MuskatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "split" => Ok(Formulation::Split),
            "arctan" => Ok(Formulation::Arctan),
            "new_kernel" | "newkernel" => Ok(Formulation::NewKernel),
            other => Err(MuskatError::param(
                "formulation",
                format!("unknown formulation `{other}` (expected split, arctan or new_kernel)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub rho: f64,
    pub epsilon: f64,
}

impl PhysicalParams {
    pub fn new(rho: f64, epsilon: f64) -> Result<Self> {
        if !rho.is_finite() {
            return Err(MuskatError::param("rho", "must be finite"));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(MuskatError::param("epsilon", "must be finite and >= 0"));
        }
        Ok(Self { rho, epsilon })
    }
}

/// Numerical settings of the α-quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsOptions {
    /// α node count; `None` means `4N`.
    pub quadrature_nodes: Option<usize>,
    /// Zero modes above `N/3` in the nonlinear remainder.
    pub dealias: bool,
    /// Refinement factor of the grid on which the arctan integral is formed.
    pub arctan_oversample: usize,
    pub kernel: KernelQuadrature,
}

impl Default for RhsOptions {
    fn default() -> Self {
        Self {
            quadrature_nodes: None,
            dealias: false,
            arctan_oversample: 2,
            kernel: KernelQuadrature::ClosedForm,
        }
    }
}

impl RhsOptions {
    pub fn with_nodes(m: usize) -> Self {
        Self {
            quadrature_nodes: Some(m),
            ..Self::default()
        }
    }

    pub fn nodes_for(&self, n: usize) -> usize {
        self.quadrature_nodes.unwrap_or(4 * n)
    }
}

fn quadrature_error(f: &Field, i: usize, alpha: f64) -> MuskatError {
    MuskatError::QuadratureNonFinite {
        node: i,
        x: f.grid().node(i),
        alpha,
    }
}

/// `T(f)` of the split form, without the `-ρ` prefactor.
pub fn nonlinear_term(f: &Field, opts: &RhsOptions) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.n_points();
    let alphas = AlphaGrid::for_grid(&grid, opts.nodes_for(n))?;
    let fx = dx(f);
    let t_f = ShiftTable::new(f, &alphas);
    let t_fx = ShiftTable::new(&fx, &alphas);
    let v = f.values();
    let g = fx.values();
    let sum = alpha_sum(alphas.len(), n, |j, acc| {
        let a = alphas.node(j);
        let inv = 1.0 / a;
        let sf = t_f.view(j);
        let sg = t_fx.view(j);
        for i in 0..n {
            let d = (v[i] - sf.get(i)) * inv;
            let d2 = d * d;
            let term = (g[i] - sg.get(i)) * inv * (d2 / (1.0 + d2));
            if !term.is_finite() {
                return Err(quadrature_error(f, i, a));
            }
            acc[i] += term;
        }
        Ok(())
    })?;
    let scale = alphas.weight() / PI;
    Ok(Field::from_parts(grid, sum.into_iter().map(|s| s * scale).collect()))
}

/// Spectral multiplier restoring the linear part cut off by the α window:
/// `-|k| (1 - (2/π) Si(|k| L))`.
fn far_field(f: &Field) -> Field {
    let l = f.grid().half_length();
    f.apply_multiplier(|k| {
        let k = k.abs();
        Complex64::new(-k * (1.0 - 2.0 / PI * sine_integral(k * l)), 0.0)
    })
}

/// `(1/π) ∫ (fₓ(x) - fₓ(x-α))/α · κ(Δ_αf) dα` over the window.
fn new_kernel_integral(f: &Field, opts: &RhsOptions) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.n_points();
    let alphas = AlphaGrid::for_grid(&grid, opts.nodes_for(n))?;
    let fx = dx(f);
    let t_f = ShiftTable::new(f, &alphas);
    let t_fx = ShiftTable::new(&fx, &alphas);
    let v = f.values();
    let g = fx.values();
    let mode = opts.kernel;
    let sum = alpha_sum(alphas.len(), n, |j, acc| {
        let a = alphas.node(j);
        let inv = 1.0 / a;
        let sf = t_f.view(j);
        let sg = t_fx.view(j);
        for i in 0..n {
            let d = (v[i] - sf.get(i)) * inv;
            let kappa = match mode {
                KernelQuadrature::ClosedForm => 1.0 / (1.0 + d * d),
                _ => kernel_cosine_with(d, mode),
            };
            let term = (g[i] - sg.get(i)) * inv * kappa;
            if !term.is_finite() {
                return Err(quadrature_error(f, i, a));
            }
            acc[i] += term;
        }
        Ok(())
    })?;
    let scale = alphas.weight() / PI;
    Ok(Field::from_parts(grid, sum.into_iter().map(|s| s * scale).collect()))
}

/// `(1/π) ∂ₓ ∫ arctan(Δ_αf) dα`, formed on a refined grid and sampled back.
fn arctan_integral(f: &Field, opts: &RhsOptions) -> Result<Field> {
    let grid = *f.grid();
    let n = grid.n_points();
    let os = opts.arctan_oversample.max(1);
    let fine_grid = grid.refined(os);
    let fine = if os == 1 { f.clone() } else { f.resample(fine_grid)? };
    let nf = fine_grid.n_points();
    // Same α nodes as the base grid.
    let alphas = AlphaGrid::for_grid(&grid, opts.nodes_for(n))?;
    let t_f = ShiftTable::new(&fine, &alphas);
    let v = fine.values();
    let mode = opts.kernel;
    let sum = alpha_sum(alphas.len(), nf, |j, acc| {
        let a = alphas.node(j);
        let inv = 1.0 / a;
        let sf = t_f.view(j);
        for i in 0..nf {
            let d = (v[i] - sf.get(i)) * inv;
            let term = match mode {
                KernelQuadrature::ClosedForm => d.atan(),
                _ => kernel_arctan_with(d, mode),
            };
            if !term.is_finite() {
                return Err(quadrature_error(&fine, i, a));
            }
            acc[i] += term;
        }
        Ok(())
    })?;
    let scale = alphas.weight() / PI;
    let integral = Field::from_parts(fine_grid, sum.into_iter().map(|s| s * scale).collect());
    let deriv = dx(&integral);
    let sampled: Vec<f64> = deriv.values().iter().step_by(os).copied().collect();
    Ok(Field::from_parts(grid, sampled))
}

/// Zero every mode with `|m| > N/3`.
fn truncate_two_thirds(f: &Field) -> Field {
    let kmax = f.grid().max_wavenumber() * 2.0 / 3.0;
    f.apply_multiplier(|k| Complex64::new(if k.abs() <= kmax { 1.0 } else { 0.0 }, 0.0))
}

/// The part of the bare right-hand side that is not `-ρΛf`. This is what the
/// integrating-factor stepper advances explicitly.
pub fn nonlinear_remainder(
    f: &Field,
    params: &PhysicalParams,
    formulation: Formulation,
    opts: &RhsOptions,
) -> Result<Field> {
    let rho = params.rho;
    let rem = match formulation {
        Formulation::Split => nonlinear_term(f, opts)?.scaled(-rho),
        Formulation::Arctan | Formulation::NewKernel => {
            let integral = if formulation == Formulation::Arctan {
                arctan_integral(f, opts)?
            } else {
                new_kernel_integral(f, opts)?
            };
            // integral + far field + Λf = integral + (2/π) Si(|k|L) |k| f
            let l = f.grid().half_length();
            let restored = f.apply_multiplier(|k| {
                let k = k.abs();
                Complex64::new(2.0 / PI * sine_integral(k * l) * k, 0.0)
            });
            integral.axpy(1.0, &restored)?.scaled(rho)
        }
    };
    Ok(if opts.dealias {
        truncate_two_thirds(&rem)
    } else {
        rem
    })
}

fn assemble(
    f: &Field,
    params: &PhysicalParams,
    formulation: Formulation,
    opts: &RhsOptions,
) -> Result<Field> {
    if opts.dealias {
        let rem = nonlinear_remainder(f, params, formulation, opts)?;
        return rem.axpy(-params.rho, &lambda(f));
    }
    let rho = params.rho;
    match formulation {
        Formulation::Split => {
            let t = nonlinear_term(f, opts)?;
            Ok(lambda(f).axpy(1.0, &t)?.scaled(-rho))
        }
        Formulation::Arctan => Ok(arctan_integral(f, opts)?.axpy(1.0, &far_field(f))?.scaled(rho)),
        Formulation::NewKernel => {
            Ok(new_kernel_integral(f, opts)?.axpy(1.0, &far_field(f))?.scaled(rho))
        }
    }
}

pub fn rhs_split(f: &Field, params: &PhysicalParams, opts: &RhsOptions) -> Result<Field> {
    assemble(f, params, Formulation::Split, opts)
}

pub fn rhs_arctan(f: &Field, params: &PhysicalParams, opts: &RhsOptions) -> Result<Field> {
    assemble(f, params, Formulation::Arctan, opts)
}

pub fn rhs_new_kernel(f: &Field, params: &PhysicalParams, opts: &RhsOptions) -> Result<Field> {
    assemble(f, params, Formulation::NewKernel, opts)
}

/// Bare right-hand side in the chosen form (no ε term).
pub fn rhs(
    f: &Field,
    params: &PhysicalParams,
    formulation: Formulation,
    opts: &RhsOptions,
) -> Result<Field> {
    assemble(f, params, formulation, opts)
}

/// Chosen form plus `ε ∂ₓₓ f`.
pub fn rhs_regularized(
    f: &Field,
    params: &PhysicalParams,
    formulation: Formulation,
    opts: &RhsOptions,
) -> Result<Field> {
    let base = assemble(f, params, formulation, opts)?;
    if params.epsilon == 0.0 {
        return Ok(base);
    }
    base.axpy(params.epsilon, &dxx(f))
}
