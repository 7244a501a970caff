//! Initial data: closed-form profiles, seeded noise, random test fields.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MuskatError, Result};
use crate::grid::{sample_function, Field, Grid};

/// `a sin(k x + φ)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub amplitude: f64,
    pub k: f64,
    pub phase: f64,
}

impl Mode {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (self.k * x + self.phase).sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialProfile {
    SingleMode(Mode),
    MultiMode { modes: Vec<Mode> },
    /// `a exp(-((x - c)/w)²)`
    GaussianBump { amplitude: f64, width: f64, center: f64 },
    FromFile { path: PathBuf },
}

impl InitialProfile {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialProfile::SingleMode(_) => "single_mode",
            InitialProfile::MultiMode { .. } => "multi_mode",
            InitialProfile::GaussianBump { .. } => "gaussian_bump",
            InitialProfile::FromFile { .. } => "from_file",
        }
    }

    /// Leading amplitude, if the profile has one.
    pub fn amplitude(&self) -> Option<f64> {
        match self {
            InitialProfile::SingleMode(m) => Some(m.amplitude),
            InitialProfile::MultiMode { modes } => modes.first().map(|m| m.amplitude),
            InitialProfile::GaussianBump { amplitude, .. } => Some(*amplitude),
            InitialProfile::FromFile { .. } => None,
        }
    }

    pub fn set_amplitude(&mut self, a: f64) -> Result<()> {
        match self {
            InitialProfile::SingleMode(m) => m.amplitude = a,
            InitialProfile::MultiMode { modes } => match modes.first_mut() {
                Some(m) => m.amplitude = a,
                None => return Err(MuskatError::param("init.amplitude", "multi_mode has no modes")),
            },
            InitialProfile::GaussianBump { amplitude, .. } => *amplitude = a,
            InitialProfile::FromFile { .. } => {
                return Err(MuskatError::param("init.amplitude", "not supported for from_file"))
            }
        }
        Ok(())
    }

    pub fn sample(&self, grid: Grid) -> Result<Field> {
        match self {
            InitialProfile::SingleMode(m) => sample_function(grid, |x| m.eval(x)),
            InitialProfile::MultiMode { modes } => {
                sample_function(grid, |x| modes.iter().map(|m| m.eval(x)).sum())
            }
            InitialProfile::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                if !(*width > 0.0) {
                    return Err(MuskatError::param("init.params", "bump width must be positive"));
                }
                sample_function(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
            }
            InitialProfile::FromFile { path } => Field::load_csv(grid, path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub profile: InitialProfile,
    /// Amplitude of additive uniform white noise.
    pub noise: f64,
    pub seed: u64,
}

impl InitSpec {
    pub fn new(profile: InitialProfile) -> Self {
        Self {
            profile,
            noise: 0.0,
            seed: 0,
        }
    }

    pub fn build(&self, grid: Grid) -> Result<Field> {
        let base = self.profile.sample(grid)?;
        if self.noise == 0.0 {
            return Ok(base);
        }
        base.axpy(1.0, &white_noise(grid, self.noise, self.seed))
    }
}

/// Node values uniform in `[-amplitude, amplitude]`, reproducible from `seed`.
pub fn white_noise(grid: Grid, amplitude: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.n_points())
        .map(|_| amplitude * rng.gen_range(-1.0..=1.0))
        .collect();
    Field::new(grid, values).expect("finite noise")
}

/// Sum of `a_m cos(k_m x) + b_m sin(k_m x)` over `1 ≤ m ≤ max_mode` with
/// coefficients uniform in `[-1, 1]`.
pub fn random_band_limited<R: Rng>(grid: Grid, max_mode: usize, rng: &mut R) -> Field {
    let coeffs: Vec<(f64, f64)> = (0..max_mode)
        .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    let k0 = grid.fundamental();
    sample_function(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, (a, b))| {
                let k = (m + 1) as f64 * k0;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
    .expect("finite band-limited field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn noise_is_seeded() {
        let g = Grid::new(64, PI).unwrap();
        let a = white_noise(g, 1e-3, 7);
        assert_eq!(a, white_noise(g, 1e-3, 7));
        assert_ne!(a, white_noise(g, 1e-3, 8));
        assert!(a.max_abs() <= 1e-3);
    }

    #[test]
    fn profiles_sample() {
        let g = Grid::new(64, 8.0 * PI).unwrap();
        let f = InitialProfile::SingleMode(Mode { amplitude: 0.5, k: 1.0, phase: 0.0 })
            .sample(g)
            .unwrap();
        assert!((f.max_abs() - 0.5).abs() < 1e-12);
        let mut b = InitialProfile::GaussianBump { amplitude: 1.0, width: 1.0, center: 0.0 };
        b.set_amplitude(0.9).unwrap();
        assert_eq!(b.sample(g).unwrap().max_abs(), 0.9);
        let bad = InitialProfile::GaussianBump { amplitude: 1.0, width: 0.0, center: 0.0 };
        assert!(bad.sample(g).is_err());
    }

    #[test]
    fn band_limited_fields_stay_in_band() {
        let g = Grid::new(64, 8.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_band_limited(g, 10, &mut rng);
        for (i, c) in f.coefficients().iter().enumerate() {
            if g.mode_number(i).unsigned_abs() > 10 {
                assert!(c.norm() < 1e-14);
            }
        }
    }
}
