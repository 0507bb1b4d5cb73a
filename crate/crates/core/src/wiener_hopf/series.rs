//! Series and q-product forms of `phi`, and the irrationality diagnostic guarding the
//! logarithmic series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::params::Parameters;
use crate::specfun::qpochhammer_inf;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const MAX_TERMS: usize = 100_000;

/// Default small-denominator guard for [`phi_log_series`].
pub const LOG_SERIES_GUARD: f64 = 1e-9;

/// `phi(z)` from the series for `ln phi` in powers of `z` and `z^alpha`.
///
/// For `|z| > 1` the value is obtained from `phi(1/z)` through `phi(z) = z^{-alpha rho} phi(1/z)`.
pub fn phi_log_series(params: &Parameters, z: Complex64, guard: f64) -> Result<EvalResult> {
    let (ln_phi, err, terms) =
        ln_phi_log_series_complex(Complex64::new(params.alpha(), 0.0), params.rho(), z, guard)?;
    let v = ln_phi.exp();
    Ok(EvalResult::new(v, err * v.norm(), terms, Method::LogSeries))
}

/// `ln phi(z)` for complex `alpha` (real part positive); returns `(value, abs_err, terms)`.
pub fn ln_phi_log_series_complex(
    alpha: Complex64,
    rho: f64,
    z: Complex64,
    guard: f64,
) -> Result<(Complex64, f64, usize)> {
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut);
    }
    let r = z.norm();
    if (r - 1.0).abs() < 1e-12 {
        return Err(Error::Domain("the log-series needs |z| != 1".into()));
    }
    if r == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0.0, 0));
    }
    if r > 1.0 {
        let (inner, err, terms) = ln_phi_log_series_complex(alpha, rho, 1.0 / z, guard)?;
        return Ok((inner - alpha * rho * z.ln(), err, terms));
    }
    let ln_z = z.ln();
    let ln_za = alpha * ln_z;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d1 = (PI * kf / alpha).sin();
        let d2 = (PI * kf * alpha).sin();
        for d in [d1, d2] {
            if d.norm() < guard {
                return Err(Error::SmallDenominator { k, size: d.norm() });
            }
        }
        let zk = (kf * ln_z).exp();
        let zak = (kf * ln_za).exp();
        let t1 = (PI * kf * rho).sin() * sign * zk / (kf * d1);
        let t2 = (PI * kf * alpha * rho).sin() * sign * zak / (kf * d2);
        sum += t1 + t2;
        let t = t1.norm() + t2.norm();
        let numerators = zk.norm() + zak.norm();
        if t < 1e-17 * (1.0 + sum.norm()) && numerators < 1e-15 {
            small += 1;
            if small >= 3 {
                let err = 10.0 * t + 1e-16 * (1.0 + sum.norm()) * (kf).sqrt();
                return Ok((sum, err, k));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        what: "log-series for phi",
        iterations: MAX_TERMS,
    })
}

/// `phi(z)` for complex `alpha` with `Im alpha > 0` as a ratio of four infinite
/// q-Pochhammer symbols with `q = e^{2 pi i alpha}` and `q~ = e^{-2 pi i / alpha}`.
pub fn phi_qproduct(alpha: Complex64, rho: f64, z: Complex64) -> Result<EvalResult> {
    if !(alpha.im > 0.0) {
        return Err(Error::Domain(format!(
            "the q-product needs Im alpha > 0, got {alpha}"
        )));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut);
    }
    let q = (2.0 * PI * I * alpha).exp();
    let qt = (-2.0 * PI * I / alpha).exp();
    if q.norm() >= 1.0 || qt.norm() >= 1.0 {
        return Err(Error::Convergence {
            what: "q-product for phi (|q| >= 1)",
            iterations: 0,
        });
    }
    let radius = q.norm().sqrt().min(qt.norm().sqrt());
    if z.norm() >= radius {
        return Err(Error::Domain(format!(
            "the q-product needs |z| < {radius}, got |z| = {}",
            z.norm()
        )));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(EvalResult::real(1.0, 0.0, 0, Method::QProduct));
    }
    let sq = (PI * I * alpha).exp();
    let sqt = (-PI * I / alpha).exp();
    let za = (alpha * z.ln()).exp();
    let e_rho = (PI * I * rho).exp();
    let e_rho_a = (PI * I * rho * alpha).exp();
    let (n1, c1) = qpochhammer_inf(-z * sqt / e_rho, qt)?;
    let (n2, c2) = qpochhammer_inf(-za * sq * e_rho_a, q)?;
    let (d1, c3) = qpochhammer_inf(-z * sqt * e_rho, qt)?;
    let (d2, c4) = qpochhammer_inf(-za * sq / e_rho_a, q)?;
    let v = n1 * n2 / (d1 * d2);
    let terms = c1 + c2 + c3 + c4;
    Ok(EvalResult::new(
        v,
        4.0 * f64::EPSILON * terms as f64 * v.norm(),
        terms,
        Method::QProduct,
    ))
}

/// Continued-fraction quality check of a real number.
///
/// The logarithmic series needs `alpha` irrational and not too well approximable by
/// rationals. A number is rejected when a convergent `p/q` with `q <= 10^6` reproduces it
/// to double precision, or approximates it better than `1e-6 * e^{-q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrationalityReport {
    pub alpha: f64,
    /// `(p, q, |alpha - p/q|)` for each convergent with `q <= 10^6`.
    pub convergents: Vec<(i64, i64, f64)>,
    pub passed: bool,
}

impl IrrationalityReport {
    /// Denominator and error of the convergent that caused rejection.
    pub fn failure(&self) -> Option<(i64, f64)> {
        if self.passed {
            return None;
        }
        self.convergents
            .iter()
            .find(|&&(_, q, e)| convergent_fails(self.alpha, q, e))
            .map(|&(_, q, e)| (q, e))
    }
}

fn convergent_fails(alpha: f64, q: i64, err: f64) -> bool {
    err <= 8.0 * f64::EPSILON * alpha.abs() || err < 1e-6 * (-(q as f64)).exp()
}

pub fn irrationality_diagnostic(alpha: f64) -> IrrationalityReport {
    const MAX_DEN: i64 = 1_000_000;
    let mut convergents = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, alpha.floor() as i64, 1i64);
    let mut x = alpha - alpha.floor();
    loop {
        let err = (alpha - p1 as f64 / q1 as f64).abs();
        convergents.push((p1, q1, err));
        if err <= 8.0 * f64::EPSILON * alpha.abs() || x == 0.0 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        x -= a;
        let a = a as i64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > MAX_DEN {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let passed = !convergents
        .iter()
        .any(|&(_, q, e)| convergent_fails(alpha, q, e));
    IrrationalityReport {
        alpha,
        convergents,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::wiener_hopf::phi_double_gamma;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn log_series_vs_double_gamma() {
        let p = make_params(2f64.sqrt(), 0.4).unwrap();
        let s = phi_log_series(&p, c(0.5), LOG_SERIES_GUARD).unwrap().value;
        let g = phi_double_gamma(&p, c(0.5)).unwrap().value;
        assert!((s - g).norm() < 1e-9, "{s} vs {g}");
        let s = phi_log_series(&p, c(2.0), LOG_SERIES_GUARD).unwrap().value;
        let g = phi_double_gamma(&p, c(2.0)).unwrap().value;
        assert!((s - g).norm() < 1e-9, "{s} vs {g}");
    }

    #[test]
    fn rational_alpha_hits_small_denominator() {
        let p = make_params(1.5, 0.5).unwrap();
        match phi_log_series(&p, c(0.5), LOG_SERIES_GUARD) {
            Err(Error::SmallDenominator { k, .. }) => assert_eq!(k, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn qproduct_refines_and_matches_log_series() {
        let alpha = Complex64::new(1.5, 0.2);
        let z = c(0.3);
        let v = phi_qproduct(alpha, 0.5, z).unwrap();
        let (ln_s, _, _) = ln_phi_log_series_complex(alpha, 0.5, z, 1e-12).unwrap();
        assert!(
            (v.value - ln_s.exp()).norm() < 1e-10,
            "{} vs {}",
            v.value,
            ln_s.exp()
        );
    }

    #[test]
    fn diagnostic() {
        assert!(!irrationality_diagnostic(1.5).passed);
        assert_eq!(irrationality_diagnostic(1.5).failure().unwrap().0, 2);
        assert!(irrationality_diagnostic(2f64.sqrt()).passed);
        assert!(irrationality_diagnostic(std::f64::consts::E / 2.0).passed);
        // a Liouville-like number: 1 + 1/2 + 2^-2 + 2^-4 + 2^-16
        let l = 1.0 + 0.5 + 0.25 + 1.0 / 16.0 + 1.0 / 65536.0;
        assert!(!irrationality_diagnostic(l).passed);
    }
}
