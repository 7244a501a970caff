//! Periodic grid on `[-L, L)`, real fields on it, and the spectral transforms.
//!
//! Coefficient convention: the coefficient of mode `m` is
//! `c_m = (1/N) Σ_j f(x_j) exp(-i k_m x_j)` with `x_j = -L + j dx` and
//! `k_m = π m / L`. Coefficients are stored in FFT order: index `idx < N/2`
//! holds `m = idx`, index `idx >= N/2` holds `m = idx - N` (so `N/2` is the
//! Nyquist mode `m = -N/2`). With this normalization
//! `Σ_j |f(x_j)|² dx = 2L Σ_m |c_m|²`.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::fft;
use crate::format::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    half_length: f64,
}

impl Grid {
    pub fn new(n_points: usize, half_length: f64) -> Result<Self> {
        if n_points < 4 || n_points % 2 != 0 {
            return Err(MuskatError::InvalidGrid(format!(
                "n_points must be an even integer >= 4, got {n_points}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(MuskatError::InvalidGrid(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }
        Ok(Self {
            n_points,
            half_length,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Signed mode number stored at FFT index `idx`.
    pub fn mode_number(&self, idx: usize) -> i64 {
        let n = self.n_points as i64;
        let i = idx as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index of signed mode `m`, if it is representable.
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let n = self.n_points as i64;
        if m >= -n / 2 && m < n / 2 {
            Some(m.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    pub fn fundamental(&self) -> f64 {
        PI / self.half_length
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.mode_number(idx) as f64 * self.fundamental()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.wavenumber(i)).collect()
    }

    /// Largest resolved wavenumber `π N / (2L)`.
    pub fn max_wavenumber(&self) -> f64 {
        self.fundamental() * (self.n_points / 2) as f64
    }

    /// Mode number of a physical wavenumber, when `k L / π` is an integer.
    pub fn mode_of_wavenumber(&self, k: f64) -> Option<i64> {
        let m = k / self.fundamental();
        let r = m.round();
        if (m - r).abs() < 1e-9 * m.abs().max(1.0) {
            let m = r as i64;
            self.index_of_mode(m).map(|_| m)
        } else {
            None
        }
    }

    /// Same interval, `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_points: self.n_points * factor,
            half_length: self.half_length,
        }
    }

    /// Same node count on `[-L/λ, L/λ)`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.n_points, self.half_length / lambda)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} L={}", self.n_points, self.half_length)
    }
}

/// Real samples on a [`Grid`] with a lazily computed coefficient cache.
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    spectral: OnceLock<Arc<[Complex64]>>,
}

impl Clone for Field {
    fn clone(&self) -> Self {
        let spectral = OnceLock::new();
        if let Some(c) = self.spectral.get() {
            let _ = spectral.set(Arc::clone(c));
        }
        Self {
            grid: self.grid,
            values: self.values.clone(),
            spectral,
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("grid", &self.grid)
            .field("values", &self.values)
            .field("spectral_cached", &self.spectral.get().is_some())
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(MuskatError::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self::from_parts(grid, values))
    }

    /// Caller guarantees length and finiteness.
    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self {
            grid,
            values,
            spectral: OnceLock::new(),
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.n_points()])
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.n_points()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mutable access to the samples. Drops the coefficient cache.
    pub fn values_mut(&mut self) -> &mut [f64] {
        self.spectral = OnceLock::new();
        &mut self.values
    }

    pub fn is_valid(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Spectral coefficients, computed on first use.
    pub fn coefficients(&self) -> &[Complex64] {
        self.spectral
            .get_or_init(|| forward_coefficients(&self.values).into())
    }

    pub fn to_spectral(&self) -> SpectralCoeffs {
        SpectralCoeffs {
            grid: self.grid,
            coeffs: self.coefficients().to_vec(),
        }
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(MuskatError::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    /// Samples of `f(x - q dx)`, exact index shift with periodic wrap.
    pub fn index_shifted(&self, q: i64) -> Field {
        Field::from_parts(self.grid, index_shift(&self.values, q))
    }

    /// Samples of `f(x - a)`. Grid multiples use an index shift, other offsets
    /// use the band-limited interpolant (modewise phase `exp(-i k a)`).
    pub fn shifted(&self, a: f64) -> Field {
        let dx = self.grid.dx();
        let q = (a / dx).round();
        if (a / dx - q).abs() < 1e-12 {
            return self.index_shifted(q as i64);
        }
        Field::from_parts(self.grid, spectral_shift(&self.grid, self.coefficients(), a))
    }

    /// Apply a spectral multiplier given as a function of the wavenumber.
    /// The Nyquist mode is always zeroed.
    pub fn apply_multiplier(&self, mult: impl Fn(f64) -> Complex64) -> Field {
        let grid = self.grid;
        let nyq = grid.nyquist_index();
        let coeffs: Vec<Complex64> = self
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * mult(grid.wavenumber(i))
                }
            })
            .collect();
        Field::from_parts(grid, inverse_coefficients(&coeffs))
    }

    /// Band-limited interpolation onto `target` (same interval, any even N).
    pub fn resample(&self, target: Grid) -> Result<Field> {
        if (target.half_length() - self.grid.half_length()).abs()
            > 1e-14 * self.grid.half_length()
        {
            return Err(MuskatError::GridMismatch);
        }
        let coeffs = resample_coefficients(&self.grid, self.coefficients(), &target);
        Ok(Field::from_parts(target, inverse_coefficients(&coeffs)))
    }

    /// Write the snapshot CSV (`x,f`, ascending x).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,f")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt_f64(self.grid.node(j)), fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Read a snapshot CSV and check that its nodes match `grid`.
    pub fn read_csv<R: BufRead>(grid: Grid, r: R) -> Result<Field> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| MuskatError::config("line 1", "empty snapshot file"))?;
        if header.trim() != "x,f" {
            return Err(MuskatError::config(
                "line 1",
                format!("expected header `x,f`, found `{}`", header.trim()),
            ));
        }
        let tol = 1e-9 * grid.half_length();
        let mut values = Vec::with_capacity(grid.n_points());
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let loc = format!("line {}", lineno + 2);
            let mut parts = line.split(',');
            let (Some(xs), Some(fs), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(MuskatError::config(loc, "expected two columns"));
            };
            let x: f64 = xs
                .trim()
                .parse()
                .map_err(|_| MuskatError::config(loc.clone(), format!("bad x `{xs}`")))?;
            let f: f64 = fs
                .trim()
                .parse()
                .map_err(|_| MuskatError::config(loc.clone(), format!("bad f `{fs}`")))?;
            let j = values.len();
            if j >= grid.n_points() || (x - grid.node(j)).abs() > tol {
                return Err(MuskatError::config(
                    loc,
                    format!("node x = {x} does not match grid {grid}"),
                ));
            }
            values.push(f);
        }
        Field::new(grid, values)
    }

    pub fn load_csv(grid: Grid, path: &Path) -> Result<Field> {
        let file = std::fs::File::open(path)?;
        Field::read_csv(grid, std::io::BufReader::new(file))
    }
}

/// Spectral coefficients of a real field (see module docs for the convention).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Coefficient of signed mode `m`.
    pub fn mode(&self, m: i64) -> Option<Complex64> {
        self.grid.index_of_mode(m).map(|i| self.coeffs[i])
    }

    /// Largest violation of `c_{-m} = conj(c_m)` (and realness of mode 0 / Nyquist).
    pub fn symmetry_defect(&self) -> (i64, f64) {
        let n = self.grid.n_points();
        let mut worst = (0_i64, 0.0_f64);
        for i in 0..=n / 2 {
            let j = (n - i) % n;
            let d = (self.coeffs[i] - self.coeffs[j].conj()).norm();
            if d > worst.1 {
                worst = (self.grid.mode_number(i), d);
            }
        }
        worst
    }

    pub fn to_physical(&self) -> Result<Field> {
        if self.coeffs.len() != self.grid.n_points() {
            return Err(MuskatError::LengthMismatch {
                expected: self.grid.n_points(),
                got: self.coeffs.len(),
            });
        }
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        let (mode, defect) = self.symmetry_defect();
        if defect > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(MuskatError::NotConjugateSymmetric { mode, defect });
        }
        Field::new(self.grid, inverse_coefficients(&self.coeffs))
    }
}

pub fn to_spectral(f: &Field) -> SpectralCoeffs {
    f.to_spectral()
}

pub fn to_physical(c: &SpectralCoeffs) -> Result<Field> {
    c.to_physical()
}

/// Sample a closed-form expression at every node.
pub fn sample_function(grid: Grid, expr: impl Fn(f64) -> f64) -> Result<Field> {
    let values: Vec<f64> = (0..grid.n_points()).map(|j| expr(grid.node(j))).collect();
    Field::new(grid, values)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(MuskatError::NonFinite {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

fn alternating(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn forward_coefficients(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut buf);
    let inv_n = 1.0 / n as f64;
    // x_0 = -L contributes the phase (-1)^m.
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= alternating(i) * inv_n;
    }
    buf
}

pub(crate) fn inverse_coefficients(coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * alternating(i))
        .collect();
    fft::inverse(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

pub(crate) fn index_shift(values: &[f64], q: i64) -> Vec<f64> {
    let n = values.len();
    let q = q.rem_euclid(n as i64) as usize;
    // out[i] = values[i - q]
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&values[n - q..]);
    out.extend_from_slice(&values[..n - q]);
    out
}

/// Samples of `f(x - a)` from the coefficients of `f`. The Nyquist mode is
/// treated as `c cos(k_N (x - a))` so the result stays real.
pub(crate) fn spectral_shift(grid: &Grid, coeffs: &[Complex64], a: f64) -> Vec<f64> {
    let nyq = grid.nyquist_index();
    let shifted: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let k = grid.wavenumber(i);
            if i == nyq {
                c * (k * a).cos()
            } else {
                c * Complex64::from_polar(1.0, -k * a)
            }
        })
        .collect();
    inverse_coefficients(&shifted)
}

/// Zero-pad or truncate coefficients to another node count. A Nyquist mode
/// on the coarse side is split evenly between `±N/2` on the fine side.
pub(crate) fn resample_coefficients(
    from: &Grid,
    coeffs: &[Complex64],
    to: &Grid,
) -> Vec<Complex64> {
    let n_from = from.n_points() as i64;
    let n_to = to.n_points() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); to.n_points()];
    let half = n_from.min(n_to) / 2;
    for m in -half + 1..half {
        let src = m.rem_euclid(n_from) as usize;
        let dst = m.rem_euclid(n_to) as usize;
        out[dst] = coeffs[src];
    }
    let nyq_src = coeffs[(n_from / 2) as usize];
    if n_to > n_from {
        let c = nyq_src * 0.5;
        out[(n_from / 2) as usize] += c;
        out[(n_to - n_from / 2) as usize] += c;
    } else if n_to == n_from {
        out[(n_to / 2) as usize] = nyq_src;
    } else {
        // Truncation: the fine-grid ±N_to/2 pair folds into the coarse Nyquist.
        let m = n_to / 2;
        let a = coeffs[m.rem_euclid(n_from) as usize];
        let b = coeffs[(-m).rem_euclid(n_from) as usize];
        out[m as usize] = Complex64::new((a + b).re, 0.0);
    }
    out
}
