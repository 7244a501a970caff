//! Norms and seminorms: L², L∞, Lipschitz, spectral Ḣ^s and a
//! finite-difference Besov estimator.

use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::grid::Field;
use crate::operators::{dx, dxx};
use crate::special::hurwitz_zeta;

pub fn l2_norm(f: &Field) -> f64 {
    let h = f.grid().dx();
    (f.values().iter().map(|v| v * v).sum::<f64>() * h).sqrt()
}

pub fn linf_norm(f: &Field) -> f64 {
    f.max_abs()
}

/// `max_j |fₓ(x_j)|` with the spectral derivative.
pub fn lipschitz_norm(f: &Field) -> f64 {
    dx(f).max_abs()
}

/// Node index and value of the largest `|fₓ|`.
pub fn max_slope(f: &Field) -> (usize, f64) {
    dx(f)
        .values()
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (j, v)| if v.abs() > best.1 { (j, v.abs()) } else { best })
}

/// `‖Λ^s f‖_{L²} = (2L Σ |k|^{2s} |c_k|²)^{1/2}` for `s ∈ (-1/2, 5/2]`.
/// The mean mode is dropped except at `s = 0`, where the result is the L² norm.
pub fn sobolev_seminorm(f: &Field, s: f64) -> Result<f64> {
    if !(s > -0.5 && s <= 2.5) {
        return Err(MuskatError::InvalidOrder(s));
    }
    let g = f.grid();
    let sum: f64 = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = g.wavenumber(i).abs();
            let w = if s == 0.0 {
                1.0
            } else if k == 0.0 {
                0.0
            } else {
                k.powf(2.0 * s)
            };
            w * c.norm_sqr()
        })
        .sum();
    Ok((2.0 * g.half_length() * sum).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(s > 0.0 && s < 2.0) {
            return Err(MuskatError::param("s", format!("Besov smoothness must lie in (0, 2), got {s}")));
        }
        if !(p >= 1.0) {
            return Err(MuskatError::param("p", format!("must be >= 1, got {p}")));
        }
        if !(q >= 1.0) {
            return Err(MuskatError::param("q", format!("must be >= 1, got {q}")));
        }
        Ok(Self { s, p, q })
    }
}

fn lp(values: impl Iterator<Item = f64>, p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else {
        (values.map(|v| v.abs().powf(p)).sum::<f64>() * h).powf(1.0 / p)
    }
}

/// Homogeneous Besov seminorm `Ḃ^s_{p,q}` by quadrature in the offset `y`.
///
/// First differences for `s < 1`, symmetric second differences for `s ≥ 1`.
/// The `dy/y` integral is split into a Taylor closure on `(0, dx/2)`, a
/// geometric grid on `[dx/2, 2dx]`, a uniform `dx/2` grid on `[2dx, L]`, and
/// the periodic tail beyond `L` summed with Hurwitz-zeta image weights.
/// Both signs of `y` contribute equally.
pub fn besov_seminorm(f: &Field, s: f64, p: f64, q: f64) -> Result<f64> {
    let bp = BesovParams::new(s, p, q)?;
    let g = *f.grid();
    let n = g.n_points();
    let h = g.dx();
    let second = s >= 1.0;
    let order = if second { 2.0 } else { 1.0 };

    // ‖δ_y f‖_p for an arbitrary offset.
    let diff_norm = |y: f64| -> f64 {
        let v = f.values();
        let back = f.shifted(y);
        if second {
            let fwd = f.shifted(-y);
            lp(
                (0..n).map(|i| 2.0 * v[i] - back.values()[i] - fwd.values()[i]),
                bp.p,
                h,
            )
        } else {
            lp((0..n).map(|i| v[i] - back.values()[i]), bp.p, h)
        }
    };

    let y0 = 0.5 * h;
    let geo: Vec<f64> = (0..=8).map(|k| y0 * 2f64.powf(k as f64 / 4.0)).collect();
    // Uniform half-grid offsets 0, dx/2, …, L. Only two distinct sub-grid
    // phases occur, so build them from one half-cell shift.
    let half = f.shifted(y0);
    let v = f.values();
    let sample = |row: &[f64], q: i64, i: usize| -> f64 { row[(i as i64 - q).rem_euclid(n as i64) as usize] };
    let uniform: Vec<f64> = (0..=n)
        .map(|j| {
            // f(x - y) with y = j dx/2
            let (row, qb) = if j % 2 == 0 { (v, (j / 2) as i64) } else { (half.values(), (j / 2) as i64) };
            if second {
                // f(x + y) = f(x - (-y)); -y = -(j/2) dx - (j%2) dx/2
                let (rowf, qf) = if j % 2 == 0 { (v, -((j / 2) as i64)) } else { (half.values(), -((j / 2) as i64) - 1) };
                lp(
                    (0..n).map(|i| 2.0 * v[i] - sample(row, qb, i) - sample(rowf, qf, i)),
                    bp.p,
                    h,
                )
            } else {
                lp((0..n).map(|i| v[i] - sample(row, qb, i)), bp.p, h)
            }
        })
        .collect();
    let phi = |norm: f64, y: f64| norm / y.powf(bp.s);

    if bp.q.is_infinite() {
        let mut sup = 0.0_f64;
        for &y in &geo {
            sup = sup.max(phi(diff_norm(y), y));
        }
        for (j, &u) in uniform.iter().enumerate().skip(1) {
            sup = sup.max(phi(u, j as f64 * y0));
        }
        return Ok(sup);
    }
    let qq = bp.q;

    // (0, dx/2): ‖δ_y f‖_p ≈ y^order ‖∂^order f‖_p.
    let deriv = if second { dxx(f) } else { dx(f) };
    let dnorm = lp(deriv.values().iter().copied(), bp.p, h);
    let expo = qq * (order - bp.s);
    let mut total = dnorm.powf(qq) * y0.powf(expo) / expo;

    // [dx/2, 2dx]: trapezoid in log y.
    let dlog = 2f64.ln() / 4.0;
    let gvals: Vec<f64> = geo.iter().map(|&y| phi(diff_norm(y), y).powf(qq)).collect();
    for w in gvals.windows(2) {
        total += 0.5 * (w[0] + w[1]) * dlog;
    }

    // [2dx, L]: trapezoid of φ^q / y on the uniform grid.
    let integrand = |j: usize| -> f64 {
        let y = j as f64 * y0;
        phi(uniform[j], y).powf(qq) / y
    };
    for j in 4..n {
        total += 0.5 * (integrand(j) + integrand(j + 1)) * y0;
    }

    // (L, ∞): ∫₀^L ψ(u)^q W(u) du with W from the periodic images.
    let l = g.half_length();
    let beta = bp.s * qq + 1.0;
    let two_l = 2.0 * l;
    let weight = |u: f64| -> f64 {
        two_l.powf(-beta) * (hurwitz_zeta(beta, 1.0 + u / two_l) + hurwitz_zeta(beta, 1.0 - u / two_l))
    };
    let tail_term = |j: usize| uniform[j].powf(qq) * weight(j as f64 * y0);
    for j in 0..n {
        total += 0.5 * (tail_term(j) + tail_term(j + 1)) * y0;
    }

    Ok((2.0 * total).powf(1.0 / qq))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub linf: f64,
    pub slope_sup: f64,
    /// `(s, Ḣ^s)` in request order.
    pub hs: Vec<(f64, f64)>,
    pub besov: Vec<(BesovParams, f64)>,
}

impl NormReport {
    pub fn compute(f: &Field, hs: &[f64], besov: &[BesovParams]) -> Result<Self> {
        let hs = hs
            .iter()
            .map(|&s| sobolev_seminorm(f, s).map(|v| (s, v)))
            .collect::<Result<Vec<_>>>()?;
        let besov = besov
            .iter()
            .map(|b| besov_seminorm(f, b.s, b.p, b.q).map(|v| (*b, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            l2: l2_norm(f),
            linf: linf_norm(f),
            slope_sup: lipschitz_norm(f),
            hs,
            besov,
        })
    }

    pub fn hs(&self, s: f64) -> Option<f64> {
        self.hs.iter().find(|(t, _)| *t == s).map(|(_, v)| *v)
    }
}
