//! q-Pochhammer symbols `(a; q)_n = prod_{k<n} (1 - a q^k)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Length of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QLength {
    Finite(usize),
    Infinite,
}

const MAX_FACTORS: usize = 1_000_000;

/// `(a; q)_n`. The infinite product needs `|q| < 1` and is truncated once
/// `|a q^k| < 1e-17 (1 + |log of the partial product|)`.
pub fn qpochhammer(a: Complex64, q: Complex64, n: QLength) -> Result<Complex64> {
    match n {
        QLength::Finite(n) => {
            let mut p = Complex64::new(1.0, 0.0);
            let mut aq = a;
            for _ in 0..n {
                p *= 1.0 - aq;
                aq *= q;
            }
            Ok(p)
        }
        QLength::Infinite => qpochhammer_inf(a, q).map(|(v, _)| v),
    }
}

/// Infinite product together with the number of factors used.
pub fn qpochhammer_inf(a: Complex64, q: Complex64) -> Result<(Complex64, usize)> {
    if q.norm() >= 1.0 {
        return Err(Error::Convergence {
            what: "infinite q-Pochhammer product (|q| >= 1)",
            iterations: 0,
        });
    }
    let mut p = Complex64::new(1.0, 0.0);
    let mut aq = a;
    for k in 0..MAX_FACTORS {
        let scale = 1.0 + p.norm().ln().abs();
        if aq.norm() < 1e-17 * scale {
            return Ok((p, k));
        }
        p *= 1.0 - aq;
        aq *= q;
        if p == Complex64::new(0.0, 0.0) {
            return Ok((p, k + 1));
        }
    }
    Err(Error::Convergence {
        what: "infinite q-Pochhammer product",
        iterations: MAX_FACTORS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_product() {
        assert_eq!(
            qpochhammer(c(3.0, 1.0), c(0.5, 0.0), QLength::Finite(0)).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn euler_function_at_half() {
        let v = qpochhammer(c(0.5, 0.0), c(0.5, 0.0), QLength::Infinite).unwrap();
        assert!((v.re - 0.288_788_095_086_602_4).abs() < 1e-15);
    }

    #[test]
    fn ratio_identity() {
        let a = c(0.3, 0.1);
        let q = c(0.4, 0.0);
        let full = qpochhammer(a, q, QLength::Infinite).unwrap();
        let tail = qpochhammer(a * q.powi(5), q, QLength::Infinite).unwrap();
        let fin = qpochhammer(a, q, QLength::Finite(5)).unwrap();
        assert!((full / tail - fin).norm() < 1e-14);
    }

    #[test]
    fn divergent_base_is_rejected() {
        assert!(qpochhammer(c(0.1, 0.0), c(1.0, 0.0), QLength::Infinite).is_err());
        assert!(qpochhammer(c(0.1, 0.0), c(0.0, 1.2), QLength::Infinite).is_err());
    }
}
