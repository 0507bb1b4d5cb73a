//! Clausen function `Cl2(theta) = sum sin(n theta) / n^2`.

use std::f64::consts::PI;

use super::gamma::zeta_even_minus_one;

const TWO_PI: f64 = 2.0 * PI;

/// `Cl2(theta)` for real `theta`.
///
/// The argument is reduced to `[-pi, pi]`, the function is evaluated at `|theta|` and
/// the sign is restored afterwards, so `Cl2(-t) = -Cl2(t)` holds exactly.
pub fn clausen(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    let mut t = theta % TWO_PI;
    if t > PI {
        t -= TWO_PI;
    } else if t < -PI {
        t += TWO_PI;
    }
    if t == 0.0 || t.abs() == PI {
        return 0.0;
    }
    let v = clausen_reduced(t.abs());
    if t < 0.0 {
        -v
    } else {
        v
    }
}

/// Evaluates on `0 < t <= pi` with the zeta-accelerated series; terms decay like
/// `n^-2 16^-n` at the edge of the range.
fn clausen_reduced(t: f64) -> f64 {
    let x = t / TWO_PI;
    let x2 = x * x;
    let mut series = 0.0;
    let mut p = x2;
    for n in 1..60 {
        let term = zeta_even_minus_one(n) / (n as f64 * (2 * n + 1) as f64) * p;
        series += term;
        if term < 1e-18 * series {
            break;
        }
        p *= x2;
    }
    3.0 * t - t * (t * (1.0 - x2)).ln() - TWO_PI * ((TWO_PI + t) / (TWO_PI - t)).ln() + t * series
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915965594177219;

    #[test]
    fn anchors() {
        assert_eq!(clausen(0.0), 0.0);
        assert_eq!(clausen(PI), 0.0);
        assert!((clausen(PI / 2.0) - CATALAN).abs() < 1e-14);
    }

    #[test]
    fn maximum_at_pi_over_three() {
        // Cl2(pi/3) = 1.0149416064096536..., the global maximum
        assert!((clausen(PI / 3.0) - 1.0149416064096536).abs() < 1e-14);
        assert!(clausen(PI / 3.0 + 1e-3) < clausen(PI / 3.0));
        assert!(clausen(PI / 3.0 - 1e-3) < clausen(PI / 3.0));
    }

    #[test]
    fn duplication_formula() {
        // Cl2(2t) = 2 Cl2(t) - 2 Cl2(pi - t)
        for &t in &[0.1, 0.7, 1.3, 2.9] {
            let lhs = clausen(2.0 * t);
            let rhs = 2.0 * clausen(t) - 2.0 * clausen(PI - t);
            assert!((lhs - rhs).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn symmetry() {
        for &t in &[0.3, 1.0, 2.5, 3.1, 7.0, -12.0] {
            assert_eq!(clausen(-t), -clausen(t));
            assert!((clausen(t + TWO_PI) - clausen(t)).abs() < 1e-14);
            assert!((clausen(TWO_PI - t) + clausen(t)).abs() < 1e-14);
        }
    }
}
