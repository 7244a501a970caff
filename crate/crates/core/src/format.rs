//! Float formatting for exported artifacts.
//!
//! Every value is written with the shortest decimal string that parses back
//! to the same `f64`. Magnitudes in `[1e-5, 1e16)` (and zero) use plain
//! notation, everything else uses `e` notation, so files stay readable and
//! byte-identical across runs.

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
