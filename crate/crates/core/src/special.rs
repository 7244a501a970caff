//! Special functions needed by the far-field corrections and the Besov tail.

use std::f64::consts::FRAC_PI_2;

use rustfft::num_complex::Complex64;

/// Sine integral `Si(x) = ∫₀ˣ sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= 4.0 {
        // Power series, alternating with fast decay on this range.
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    // Continued fraction for E1(ix), modified Lentz. Si = π/2 + Im[e^{-ix} h].
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..100_000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    FRAC_PI_2 + h.im
}

const BERNOULLI_2J: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n + a)^{-s}` for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    const K: usize = 12;
    let mut sum: f64 = (0..K).map(|k| (a + k as f64).powf(-s)).sum();
    let b = a + K as f64;
    sum += b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    // Euler–Maclaurin corrections: B_2j/(2j)! · s(s+1)…(s+2j-2) · b^{-s-2j+1}.
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = b.powf(-s - 1.0);
    for (j, bern) in BERNOULLI_2J.iter().enumerate() {
        let term = bern / fact * rising * pow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        pow /= b * b;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn si_by_simpson(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn sine_integral_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((sine_integral(1.0) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((sine_integral(5.0) - 1.549_931_244_944_674).abs() < 1e-14);
        assert!((sine_integral(10.0) - 1.658_347_594_218_874).abs() < 1e-13);
        assert!((sine_integral(-2.0) + 1.605_412_976_802_695).abs() < 1e-14);
    }

    #[test]
    fn sine_integral_matches_simpson_across_branch() {
        for x in [0.3, 2.0, 3.99, 4.0, 4.01, 7.5, 25.0] {
            assert!((sine_integral(x) - si_by_simpson(x)).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn sine_integral_limit() {
        let x = 1e6;
        // Si(x) = π/2 - cos(x)/x + O(x^-2)
        assert!((sine_integral(x) - (PI / 2.0 - x.cos() / x)).abs() < 1e-11);
    }

    #[test]
    fn hurwitz_reduces_to_riemann() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(2, 1/2) = 3ζ(2)
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn hurwitz_shift_relation() {
        for (s, a) in [(2.5, 0.3), (1.5, 1.7), (3.25, 0.01)] {
            let lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0);
            let rhs = a.powf(-s);
            assert!((lhs - rhs).abs() < 1e-12 * rhs, "s={s} a={a}");
        }
    }
}
