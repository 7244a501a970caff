//! Offset-midpoint α-grid, shifted-sample tables, and the deterministic
//! parallel sweep over α nodes.

use rayon::prelude::*;

use crate::error::{MuskatError, Result};
use crate::grid::{spectral_shift, Field, Grid};

/// Nodes per work unit. Fixed so the reduction tree does not depend on the
/// number of worker threads.
const CHUNK: usize = 64;

/// Midpoint nodes `α_j = (j + ½)·2L/M`, `j = -M/2 … M/2 - 1`, on `(-L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    m: usize,
    half_length: f64,
}

impl AlphaGrid {
    pub fn new(m: usize, half_length: f64) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(MuskatError::param(
                "quadrature",
                format!("node count must be even and >= 2, got {m}"),
            ));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(MuskatError::param("quadrature", "half length must be positive"));
        }
        Ok(Self { m, half_length })
    }

    pub fn for_grid(grid: &Grid, m: usize) -> Result<Self> {
        Self::new(m, grid.half_length())
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        2.0 * self.half_length / self.m as f64
    }

    /// Signed node label `j` for position `idx` in `0..M`.
    fn label(&self, idx: usize) -> i64 {
        idx as i64 - (self.m / 2) as i64
    }

    pub fn node(&self, idx: usize) -> f64 {
        (self.label(idx) as f64 + 0.5) * self.weight()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.node(i)).collect()
    }
}

/// `f(x_i - α_j)` for every α node, built from one spectral shift per distinct
/// sub-grid offset and exact index shifts for the integer part.
pub struct ShiftTable {
    n: usize,
    /// (integer shift, row into `rows`) per α node.
    entries: Vec<(i64, usize)>,
    rows: Vec<Vec<f64>>,
}

impl ShiftTable {
    pub fn new(field: &Field, alphas: &AlphaGrid) -> Self {
        let grid = *field.grid();
        let n = grid.n_points();
        // α_j / dx = (2j+1) N / (2M) exactly in integers.
        let den = 2 * alphas.len() as i64;
        let mut slot_of_residue: Vec<Option<usize>> = vec![None; den as usize];
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut entries = Vec::with_capacity(alphas.len());
        for idx in 0..alphas.len() {
            let num = (2 * alphas.label(idx) + 1) * n as i64;
            let q = num.div_euclid(den);
            let r = num.rem_euclid(den) as usize;
            let slot = match slot_of_residue[r] {
                Some(s) => s,
                None => {
                    let a = r as f64 / den as f64 * grid.dx();
                    let row = if r == 0 {
                        field.values().to_vec()
                    } else {
                        spectral_shift(&grid, field.coefficients(), a)
                    };
                    rows.push(row);
                    slot_of_residue[r] = Some(rows.len() - 1);
                    rows.len() - 1
                }
            };
            entries.push((q, slot));
        }
        Self { n, entries, rows }
    }

    /// Number of spectral shifts that were needed.
    pub fn distinct_offsets(&self) -> usize {
        self.rows.len()
    }

    /// Accessor for node `idx`: `get(i)` returns `f(x_i - α_idx)`.
    pub fn view(&self, idx: usize) -> ShiftedView<'_> {
        let (q, slot) = self.entries[idx];
        ShiftedView {
            row: &self.rows[slot],
            offset: q.rem_euclid(self.n as i64) as usize,
            n: self.n,
        }
    }
}

pub struct ShiftedView<'a> {
    row: &'a [f64],
    offset: usize,
    n: usize,
}

impl ShiftedView<'_> {
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        let k = if i >= self.offset {
            i - self.offset
        } else {
            i + self.n - self.offset
        };
        self.row[k]
    }
}

/// Sum per-node contributions over all α nodes. `body(idx, acc)` adds node
/// `idx`'s contribution into `acc`. Chunks of fixed size run in parallel and
/// are reduced in chunk order, so the result is bit-identical for any thread
/// count.
pub fn alpha_sum<F>(n_alpha: usize, out_len: usize, body: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync,
{
    let n_chunks = n_alpha.div_ceil(CHUNK);
    let partials: Vec<Result<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; out_len];
            for idx in c * CHUNK..((c + 1) * CHUNK).min(n_alpha) {
                body(idx, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; out_len];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p?) {
            *t += v;
        }
    }
    Ok(total)
}
