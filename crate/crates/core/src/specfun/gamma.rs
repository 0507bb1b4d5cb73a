//! Complex log-gamma and polygamma functions by upward recurrence followed by the
//! Stirling / asymptotic series.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.8378770664093453;
const LN_PI: f64 = 1.1447298858494002;

/// Stirling coefficients `B_{2k} / (2k (2k-1))`.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Below this modulus the argument is shifted before Stirling is applied.
const STIRLING_MIN: f64 = 15.0;
/// Same threshold for the polygamma asymptotic series.
const PSI_MIN: f64 = 20.0;

const NUM_BERNOULLI: usize = 40;

/// `B_2, B_4, ..., B_26` as numerator/denominator pairs.
const BERNOULLI_EXACT: [(f64, f64); 13] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `zeta(2k)` for `k >= 1`.
pub(crate) fn zeta_even(k: usize) -> f64 {
    debug_assert!(k >= 1);
    1.0 + zeta_even_minus_one(k)
}

/// `zeta(2k) - 1`, accurate in absolute and relative terms.
pub(crate) fn zeta_even_minus_one(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; NUM_BERNOULLI + 2];
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            *slot = match k {
                1 => PI * PI / 6.0 - 1.0,
                2 => PI.powi(4) / 90.0 - 1.0,
                3 => PI.powi(6) / 945.0 - 1.0,
                _ => {
                    // direct sum from the small end; the tail beyond 200 is an integral bound
                    let s = 2 * k as i32;
                    let mut acc = 0.0;
                    for n in (2..=200).rev() {
                        acc += (n as f64).powi(-s);
                    }
                    acc + 200f64.powi(1 - s) / (s as f64 - 1.0)
                }
            };
        }
        t
    });
    if k < table.len() {
        table[k]
    } else {
        2f64.powi(-2 * k as i32) + 3f64.powi(-2 * k as i32)
    }
}

/// `B_{2k} / (2k)!` for `k >= 1`, from `zeta(2k)`.
pub(crate) fn bernoulli_over_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=NUM_BERNOULLI)
            .map(|k| {
                if k == 0 {
                    1.0
                } else if k <= BERNOULLI_EXACT.len() {
                    let (num, den) = BERNOULLI_EXACT[k - 1];
                    num / den / factorial(2 * k)
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * 2.0 * zeta_even(k) / (2.0 * PI).powi(2 * k as i32)
                }
            })
            .collect()
    });
    table[k]
}

/// `n!` as a float.
pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// `ln(sin(pi z))`, stable for large `|Im z|`. The result is defined modulo `2 pi i`.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    let ipz = Complex64::i() * PI * z;
    if z.im > 1.0 {
        // sin(pi z) = i e^{-i pi z} (1 - e^{2 i pi z}) / 2
        -ipz + c(-LN_2, PI / 2.0) + ln1p(-(2.0 * ipz).exp())
    } else if z.im < -1.0 {
        // sin(pi z) = -i e^{i pi z} (1 - e^{-2 i pi z}) / 2
        ipz + c(-LN_2, -PI / 2.0) + ln1p(-(-2.0 * ipz).exp())
    } else {
        (PI * z).sin().ln()
    }
}

/// `ln(1 + w)` with full accuracy for small `|w|`.
pub fn ln1p(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        // alternating series; four terms are enough below 1e-4
        let w2 = w * w;
        w - w2 / 2.0 + w2 * w / 3.0 - w2 * w2 / 4.0
    } else {
        (1.0 + w).ln()
    }
}

/// Nearest nonpositive integer to `z` if `z` lies within `tol` of one.
fn near_nonpositive_integer(z: Complex64, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if r <= 0.0 && (z - r).norm() <= tol {
        Some(r as i64)
    } else {
        None
    }
}

/// Complex `ln Gamma(z)`.
///
/// On `Re z >= 1/2` this is the analytic branch that is real on the positive axis;
/// to the left the reflection formula is used and the value is correct modulo `2 pi i`.
/// Returns `+inf` in the real part at the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if near_nonpositive_integer(z, 0.0).is_some() {
            return c(f64::INFINITY, 0.0);
        }
        return c(LN_PI, 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    // the shift product is accumulated directly for the modulus and as a sum of
    // arguments for the phase, which keeps the branch continuous
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut phase = 0.0;
    while w.norm() < STIRLING_MIN {
        prod *= w;
        phase += w.arg();
        w += 1.0;
    }
    stirling(w) - c(prod.norm().ln(), phase)
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for &coef in STIRLING.iter() {
        let t = coef * p;
        series += t;
        if t.norm() < 1e-18 * series.norm() {
            break;
        }
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * LN_2PI + series
}

/// `ln|Gamma(x)|` and the sign of `Gamma(x)` for real `x`. At poles returns `(+inf, 1)`.
pub fn ln_gamma_real(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 1.0);
    }
    if x < 0.5 {
        let s = sin_pi_real(x).abs();
        let (lg, sg) = ln_gamma_real(1.0 - x);
        let sign = if sin_pi_real(x) < 0.0 { -sg } else { sg };
        return (LN_PI - s.ln() - lg, sign);
    }
    let mut w = x;
    let mut prod = 1.0;
    while w < STIRLING_MIN {
        prod *= w;
        w += 1.0;
    }
    (stirling(c(w, 0.0)).re - prod.ln(), 1.0)
}

/// `sin(pi x)` with exact zeros at integers and argument reduction modulo 2.
pub fn sin_pi_real(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).floor(); // in [0, 2)
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// `cos(pi x)` with argument reduction.
pub fn cos_pi_real(x: f64) -> f64 {
    sin_pi_real(x + 0.5)
}

/// Real gamma function.
pub fn gamma_real(x: f64) -> f64 {
    let (lg, s) = ln_gamma_real(x);
    if lg.is_infinite() {
        return f64::NAN;
    }
    s * lg.exp()
}

/// Reciprocal gamma function `1/Gamma(x)`; exactly zero at the poles.
pub fn rgamma_real(x: f64) -> f64 {
    let (lg, s) = ln_gamma_real(x);
    if lg.is_infinite() {
        return 0.0;
    }
    s * (-lg).exp()
}

/// Polygamma `psi^(k)(z)` for `k` in `0..=4`.
pub fn polygamma(k: usize, z: Complex64) -> Result<Complex64> {
    if k > 4 {
        return Err(Error::Domain(format!("polygamma order {k} > 4")));
    }
    if let Some(n) = near_nonpositive_integer(z, 0.0) {
        return Err(Error::Pole {
            location: c(n as f64, 0.0),
            residue: None,
        });
    }
    Ok(polygamma_any(k, z))
}

/// Digamma function `psi(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    polygamma(0, z)
}

/// Polygamma of any order without pole checks.
pub(crate) fn polygamma_any(n: usize, z: Complex64) -> Complex64 {
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    let np1 = (n + 1) as i32;
    while !in_asymptotic_region(w) {
        // psi^(n)(w) = psi^(n)(w+1) - (-1)^n n! / w^(n+1)
        acc += w.powi(-np1);
        w += 1.0;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    polygamma_asym(n, w) - sign * factorial(n) * acc
}

fn in_asymptotic_region(w: Complex64) -> bool {
    w.norm() >= PSI_MIN && (w.re >= 0.0 || w.im.abs() >= -w.re)
}

/// Asymptotic series of `psi^(n)(w)`, valid for large `|w|` away from the negative axis.
pub(crate) fn polygamma_asym(n: usize, w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    if n == 0 {
        let mut sum = w.ln() - 0.5 * inv;
        let mut p = inv2;
        let mut prev = f64::INFINITY;
        for k in 1..NUM_BERNOULLI {
            // B_2k / (2k) = (B_2k/(2k)!) (2k-1)!
            let t = bernoulli_over_factorial(k) * factorial(2 * k - 1) * p;
            let tn = t.norm();
            if tn > prev {
                break;
            }
            sum -= t;
            if tn < 1e-17 * sum.norm() {
                break;
            }
            prev = tn;
            p *= inv2;
        }
        return sum;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let inv_n = inv.powi(n as i32);
    let mut sum = factorial(n - 1) * inv_n + 0.5 * factorial(n) * inv_n * inv;
    let mut p = inv_n * inv2;
    let mut prev = f64::INFINITY;
    for k in 1..NUM_BERNOULLI {
        // B_2k (2k+n-1)! / (2k)!
        let t = bernoulli_over_factorial(k) * factorial(2 * k + n - 1) * p;
        let tn = t.norm();
        if tn > prev {
            break;
        }
        sum += t;
        if tn < 1e-17 * sum.norm() {
            break;
        }
        prev = tn;
        p *= inv2;
    }
    sign * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: f64 = 0.5772156649015329;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn ln_gamma_positive_integers() {
        let mut f = 1.0f64;
        for n in 1..25 {
            let lg = ln_gamma(c(n as f64, 0.0));
            assert!((lg.re - f.ln()).abs() < 1e-13 * (1.0 + f.ln()), "n={n}");
            assert!(lg.im.abs() < 1e-15);
            f *= n as f64;
        }
    }

    #[test]
    fn ln_gamma_half() {
        let lg = ln_gamma(c(0.5, 0.0));
        assert!((lg.re - 0.5 * PI.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_recurrence_complex() {
        for &z in &[
            c(0.3, 0.7),
            c(-2.4, 1.1),
            c(5.0, -30.0),
            c(0.1, 80.0),
            c(-7.3, -0.2),
        ] {
            let lhs = ln_gamma(z + 1.0);
            let rhs = ln_gamma(z) + z.ln();
            let d = lhs - rhs;
            let k = (d.im / (2.0 * PI)).round();
            assert!(
                close(d - c(0.0, 2.0 * PI * k), c(0.0, 0.0), 1e-12),
                "z={z} d={d}"
            );
        }
    }

    #[test]
    fn ln_gamma_reflection() {
        let z = c(0.25, 3.0);
        let lhs = (ln_gamma(z) + ln_gamma(1.0 - z)).exp();
        let rhs = PI / (PI * z).sin();
        assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn real_gamma_values() {
        assert!((gamma_real(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_real(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert_eq!(rgamma_real(-3.0), 0.0);
        assert!((rgamma_real(0.5) - 1.0 / PI.sqrt()).abs() < 1e-15);
        let (lg, s) = ln_gamma_real(-1.5);
        assert_eq!(s, 1.0);
        assert!((lg - (4.0 * PI.sqrt() / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn digamma_anchors() {
        assert!(close(digamma(c(1.0, 0.0)).unwrap(), c(-EULER, 0.0), 1e-14));
        let d = digamma(c(2.0, 0.0)).unwrap() - digamma(c(1.0, 0.0)).unwrap();
        assert!(close(d, c(1.0, 0.0), 1e-14));
        assert!(close(
            polygamma(1, c(1.0, 0.0)).unwrap(),
            c(PI * PI / 6.0, 0.0),
            1e-14
        ));
        // psi''(1) = -2 zeta(3)
        assert!(close(
            polygamma(2, c(1.0, 0.0)).unwrap(),
            c(-2.0 * 1.2020569031595942, 0.0),
            1e-14
        ));
        // psi'''(1) = 6 zeta(4)
        assert!(close(
            polygamma(3, c(1.0, 0.0)).unwrap(),
            c(PI.powi(4) / 15.0, 0.0),
            1e-14
        ));
        assert!(polygamma(0, c(-2.0, 0.0)).is_err());
        assert!(polygamma(5, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn trigamma_matches_direct_sum() {
        // psi'(z) = sum_{k>=0} 1/(z+k)^2, tail by integral plus half-term
        let z = c(0.7, 0.4);
        let n = 20000;
        let mut s = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            s += (z + k as f64).powi(-2);
        }
        let w = z + n as f64;
        s += w.inv() + 0.5 * w.powi(-2) + w.powi(-3) / 6.0;
        assert!(close(polygamma(1, z).unwrap(), s, 1e-13));
    }

    #[test]
    fn polygamma_left_half_plane() {
        let z = c(-25.3, 3.0);
        // psi(1 - z) - psi(z) = pi cot(pi z)
        let lhs = digamma(1.0 - z).unwrap() - digamma(z).unwrap();
        let rhs = PI * (PI * z).cos() / (PI * z).sin();
        assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn bernoulli_ratios() {
        assert!((bernoulli_over_factorial(1) - 1.0 / 12.0).abs() < 1e-17);
        assert!((bernoulli_over_factorial(2) + 1.0 / 720.0).abs() < 1e-18);
        assert!((bernoulli_over_factorial(3) - 1.0 / 30240.0).abs() < 1e-19);
    }

    #[test]
    fn ln_sin_pi_large_imaginary() {
        let z = c(0.3, 40.0);
        let v = ln_sin_pi(z);
        let direct = (PI * c(0.3, 4.0)).sin().ln();
        assert!(v.re.is_finite());
        let w = ln_sin_pi(c(0.3, 4.0));
        assert!(close(w.exp(), direct.exp(), 1e-13));
    }
}
