//! Cached complex FFT plans keyed by transform length.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Plans>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn plans(n: usize) -> Plans {
    let mut map = cache().lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

/// Unnormalized forward transform in place.
pub(crate) fn forward(buf: &mut [Complex64]) {
    plans(buf.len()).forward.process(buf);
}

/// Unnormalized inverse transform in place.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    plans(buf.len()).inverse.process(buf);
}
