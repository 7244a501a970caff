//! Linear spectral operators and the pointwise kernels of the nonlinearity.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::grid::Field;
use crate::quadrature::{gauss_laguerre, integrate_adaptive};

/// Hilbert transform, multiplier `-i sgn(k)`.
pub fn hilbert_transform(f: &Field) -> Field {
    f.apply_multiplier(|k| {
        let sgn = if k > 0.0 {
            1.0
        } else if k < 0.0 {
            -1.0
        } else {
            0.0
        };
        Complex64::new(0.0, -sgn)
    })
}

/// `Λ^a`, multiplier `|k|^a`, for `0 < a < 2`.
pub fn fractional_laplacian(f: &Field, a: f64) -> Result<Field> {
    if !(a > 0.0 && a < 2.0) {
        return Err(MuskatError::InvalidOrder(a));
    }
    Ok(lambda_pow(f, a))
}

/// `Λ = |∂ₓ|`.
pub fn lambda(f: &Field) -> Field {
    f.apply_multiplier(|k| Complex64::new(k.abs(), 0.0))
}

pub(crate) fn lambda_pow(f: &Field, a: f64) -> Field {
    f.apply_multiplier(|k| {
        Complex64::new(if k == 0.0 { 0.0 } else { k.abs().powf(a) }, 0.0)
    })
}

/// `∂ₓ^p` for `p ∈ {1, 2, 3}`.
pub fn derivative(f: &Field, p: u32) -> Result<Field> {
    if !(1..=3).contains(&p) {
        return Err(MuskatError::InvalidOrder(p as f64));
    }
    Ok(f.apply_multiplier(|k| Complex64::new(0.0, k).powu(p)))
}

pub(crate) fn dx(f: &Field) -> Field {
    f.apply_multiplier(|k| Complex64::new(0.0, k))
}

pub(crate) fn dxx(f: &Field) -> Field {
    f.apply_multiplier(|k| Complex64::new(-k * k, 0.0))
}

/// Backward and forward difference quotients at offset `alpha`.
#[derive(Debug, Clone)]
pub struct SlopeStencil {
    pub alpha: f64,
    /// `(f(x) - f(x - α)) / α`
    pub delta: Vec<f64>,
    /// `(f(x) - f(x + α)) / α`
    pub delta_bar: Vec<f64>,
}

pub fn slope_stencil(f: &Field, alpha: f64) -> Result<SlopeStencil> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(MuskatError::ZeroOffset);
    }
    let back = f.shifted(alpha);
    let fwd = f.shifted(-alpha);
    let v = f.values();
    let delta = v
        .iter()
        .zip(back.values())
        .map(|(a, b)| (a - b) / alpha)
        .collect();
    let delta_bar = v
        .iter()
        .zip(fwd.values())
        .map(|(a, b)| (a - b) / alpha)
        .collect();
    Ok(SlopeStencil {
        alpha,
        delta,
        delta_bar,
    })
}

/// How the δ-integrals behind the kernels are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum KernelQuadrature {
    #[default]
    ClosedForm,
    /// Plain Gauss–Laguerre; reliable for `|a| ≲ 2`.
    GaussLaguerre { nodes: usize },
    /// Gauss–Laguerre for `|a| ≤ 2`, adaptive Gauss–Kronrod on `[0, 45]` otherwise.
    Hybrid { nodes: usize },
}

impl KernelQuadrature {
    pub const DEFAULT_NODES: usize = 64;

    pub fn hybrid() -> Self {
        KernelQuadrature::Hybrid {
            nodes: Self::DEFAULT_NODES,
        }
    }
}

const HYBRID_SWITCH: f64 = 2.0;
const TRUNCATION: f64 = 45.0;
const ADAPTIVE_TOL: f64 = 1e-14;

/// `κ(a) = ∫₀^∞ e^{-δ} cos(δa) dδ = 1/(1+a²)`.
pub fn kernel_cosine(a: f64) -> f64 {
    1.0 / (1.0 + a * a)
}

/// `A(a) = ∫₀^∞ δ⁻¹ e^{-δ} sin(δa) dδ = arctan(a)`.
pub fn kernel_arctan(a: f64) -> f64 {
    a.atan()
}

pub fn kernel_cosine_with(a: f64, mode: KernelQuadrature) -> f64 {
    match mode {
        KernelQuadrature::ClosedForm => kernel_cosine(a),
        KernelQuadrature::GaussLaguerre { nodes } => {
            gauss_laguerre(nodes).integrate(|d| (d * a).cos())
        }
        KernelQuadrature::Hybrid { nodes } => {
            if a.abs() <= HYBRID_SWITCH {
                gauss_laguerre(nodes).integrate(|d| (d * a).cos())
            } else {
                integrate_adaptive(|d| (-d).exp() * (d * a).cos(), 0.0, TRUNCATION, ADAPTIVE_TOL)
            }
        }
    }
}

fn sinc_a(d: f64, a: f64) -> f64 {
    if d == 0.0 {
        a
    } else {
        (d * a).sin() / d
    }
}

pub fn kernel_arctan_with(a: f64, mode: KernelQuadrature) -> f64 {
    match mode {
        KernelQuadrature::ClosedForm => kernel_arctan(a),
        KernelQuadrature::GaussLaguerre { nodes } => {
            gauss_laguerre(nodes).integrate(|d| sinc_a(d, a))
        }
        KernelQuadrature::Hybrid { nodes } => {
            if a.abs() <= HYBRID_SWITCH {
                gauss_laguerre(nodes).integrate(|d| sinc_a(d, a))
            } else {
                integrate_adaptive(|d| (-d).exp() * sinc_a(d, a), 0.0, TRUNCATION, ADAPTIVE_TOL)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_function, Grid};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn grid_2pi(n: usize) -> Grid {
        Grid::new(n, PI).unwrap()
    }

    #[test]
    fn hilbert_of_sine_is_minus_cosine() {
        let g = grid_2pi(64);
        let f = sample_function(g, f64::sin).unwrap();
        let h = hilbert_transform(&f);
        let expect: Vec<f64> = g.nodes().iter().map(|x| -x.cos()).collect();
        assert!(max_diff(h.values(), &expect) < 1e-14);
    }

    #[test]
    fn hilbert_kills_constants() {
        let g = grid_2pi(32);
        let h = hilbert_transform(&Field::constant(g, 3.0).unwrap());
        assert!(h.max_abs() < 1e-15);
    }

    #[test]
    fn hilbert_squared_is_minus_identity_plus_mean() {
        let g = grid_2pi(64);
        let f = sample_function(g, |x| 0.7 + x.sin() + 0.3 * (5.0 * x).cos()).unwrap();
        let hh = hilbert_transform(&hilbert_transform(&f));
        let expect: Vec<f64> = f.values().iter().map(|v| -v + f.mean()).collect();
        assert!(max_diff(hh.values(), &expect) < 1e-14);
    }

    #[test]
    fn lambda_eigenfunctions() {
        let g = grid_2pi(64);
        let c1 = sample_function(g, f64::cos).unwrap();
        assert!(max_diff(lambda(&c1).values(), c1.values()) < 1e-14);
        let c4 = sample_function(g, |x| (4.0 * x).cos()).unwrap();
        let half = fractional_laplacian(&c4, 0.5).unwrap();
        let expect: Vec<f64> = c4.values().iter().map(|v| 2.0 * v).collect();
        assert!(max_diff(half.values(), &expect) < 1e-14);
    }

    #[test]
    fn fractional_order_is_checked() {
        let f = Field::zeros(grid_2pi(16));
        for a in [0.0, 2.0, -0.5, 3.0, f64::NAN] {
            assert!(matches!(fractional_laplacian(&f, a), Err(MuskatError::InvalidOrder(_))));
        }
        assert!(derivative(&f, 0).is_err());
        assert!(derivative(&f, 4).is_err());
    }

    #[test]
    fn derivative_basics() {
        let g = grid_2pi(64);
        let s = sample_function(g, f64::sin).unwrap();
        let expect: Vec<f64> = g.nodes().iter().map(|x| x.cos()).collect();
        assert!(max_diff(derivative(&s, 1).unwrap().values(), &expect) < 1e-14);
        let c = Field::constant(g, 2.0).unwrap();
        assert!(derivative(&c, 2).unwrap().max_abs() < 1e-15);
        let d3 = derivative(&s, 3).unwrap();
        let expect3: Vec<f64> = g.nodes().iter().map(|x| -x.cos()).collect();
        let e3 = max_diff(d3.values(), &expect3);
        assert!(e3 < 1e-10, "{e3}");
    }

    #[test]
    fn derivative_agrees_with_centered_differences() {
        // error of the centered quotient is (dx²/6) f''' + O(dx⁴)
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let g = grid_2pi(n);
            let f = sample_function(g, |x| x.sin().exp()).unwrap();
            let d = derivative(&f, 1).unwrap();
            let h = g.dx();
            let v = f.values();
            let fd: Vec<f64> = (0..n)
                .map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * h))
                .collect();
            errs.push(max_diff(d.values(), &fd));
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn stencil_cases() {
        let g = grid_2pi(64);
        let c = Field::constant(g, 5.0).unwrap();
        let s = slope_stencil(&c, 0.3).unwrap();
        assert!(s.delta.iter().chain(&s.delta_bar).all(|v| v.abs() < 1e-14));
        assert!(matches!(slope_stencil(&c, 0.0), Err(MuskatError::ZeroOffset)));

        let f = sample_function(g, f64::sin).unwrap();
        let s = slope_stencil(&f, PI).unwrap();
        for (j, x) in g.nodes().iter().enumerate() {
            let expect = (x.sin() - (x - PI).sin()) / PI;
            assert!((s.delta[j] - expect).abs() < 1e-14);
            assert!((s.delta[j] - 2.0 * x.sin() / PI).abs() < 1e-14);
        }
    }

    #[test]
    fn stencil_is_exact_on_linear_data_without_wrap() {
        // Linear data is not periodic, so check the index-shift path away from the seam.
        let g = grid_2pi(64);
        let f = sample_function(g, |x| 0.75 * x).unwrap();
        let a = 3.0 * g.dx();
        let s = slope_stencil(&f, a).unwrap();
        for j in 3..61 {
            assert!((s.delta[j] - 0.75).abs() < 1e-13);
            assert!((s.delta_bar[j] + 0.75).abs() < 1e-13);
        }
    }

    #[test]
    fn stencil_tends_to_derivative_at_first_order() {
        let g = grid_2pi(128);
        let f = sample_function(g, |x| x.sin().exp()).unwrap();
        let fx = derivative(&f, 1).unwrap();
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&a| max_diff(&slope_stencil(&f, a).unwrap().delta, fx.values()))
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn kernel_closed_forms() {
        assert_eq!(kernel_cosine(0.0), 1.0);
        assert_eq!(kernel_cosine(1.0), 0.5);
        assert_eq!(kernel_arctan(0.0), 0.0);
        assert!((kernel_arctan(1.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        for a in [0.1, 1.0, 3.7, 1e3] {
            assert_eq!(kernel_cosine(-a), kernel_cosine(a));
            assert_eq!(kernel_arctan(-a), -kernel_arctan(a));
        }
    }

    #[test]
    fn laguerre_kernels_on_moderate_arguments() {
        let mode = KernelQuadrature::GaussLaguerre { nodes: 64 };
        for i in 0..=40 {
            let a = -2.0 + 0.1 * i as f64;
            assert!((kernel_cosine_with(a, mode) - kernel_cosine(a)).abs() < 1e-12);
            assert!((kernel_arctan_with(a, mode) - kernel_arctan(a)).abs() < 1e-12);
        }
    }

    #[test]
    fn hybrid_kernels_on_wide_range() {
        let mode = KernelQuadrature::hybrid();
        for i in 0..=200 {
            let a = -10.0 + 0.1 * i as f64;
            assert!((kernel_cosine_with(a, mode) - kernel_cosine(a)).abs() < 1e-10, "a={a}");
            assert!((kernel_arctan_with(a, mode) - kernel_arctan(a)).abs() < 1e-8, "a={a}");
        }
    }

    fn band_limited(g: Grid, c: &[(f64, f64)]) -> Field {
        sample_function(g, |x| {
            c.iter()
                .enumerate()
                .map(|(m, (a, b))| {
                    let k = (m + 1) as f64 * g.fundamental();
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum()
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn dx_hilbert_is_lambda(c in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..60)) {
            let g = Grid::new(256, 8.0 * PI).unwrap();
            let f = band_limited(g, &c);
            let lhs = derivative(&hilbert_transform(&f), 1).unwrap();
            let rhs = lambda(&f);
            let scale = lhs.max_abs().max(rhs.max_abs()).max(1e-300);
            prop_assert!(max_diff(lhs.values(), rhs.values()) <= 1e-12 * scale);
        }

        #[test]
        fn hilbert_skew_adjoint(
            c1 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30),
            c2 in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30),
        ) {
            let g = Grid::new(128, 8.0 * PI).unwrap();
            let f = band_limited(g, &c1);
            let h = band_limited(g, &c2);
            let dot = |a: &Field, b: &Field| -> f64 {
                a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>() * g.dx()
            };
            let lhs = dot(&hilbert_transform(&f), &h);
            let rhs = -dot(&f, &hilbert_transform(&h));
            let scale = dot(&f, &f).sqrt() * dot(&h, &h).sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn lambda_powers_compose(
            c in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..30),
            a in 0.05f64..0.95,
            b in 0.05f64..0.95,
        ) {
            let g = Grid::new(128, 8.0 * PI).unwrap();
            let f = band_limited(g, &c);
            let lhs = fractional_laplacian(&fractional_laplacian(&f, a).unwrap(), b).unwrap();
            let rhs = fractional_laplacian(&f, a + b).unwrap();
            let scale = rhs.max_abs().max(1e-300);
            prop_assert!(max_diff(lhs.values(), rhs.values()) <= 1e-12 * scale);
        }
    }
}
