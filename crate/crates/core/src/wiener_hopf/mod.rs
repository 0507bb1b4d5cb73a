//! The Wiener-Hopf factor `phi(z) = E[exp(-z S)]`, where `S` is the supremum of the
//! process up to an independent unit-rate exponential time.
//!
//! Several independent representations are provided; [`phi`] dispatches between them.

mod closed_form;
mod integral;
mod series;
mod structure;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::EvalResult;
use crate::params::{detect_ckl, Parameters, CKL_DEFAULT_TOL};

pub use closed_form::{phi_ckl, phi_rational_alpha};
pub use integral::{phi_darling_quadrature, phi_double_gamma, phi_exp, phi_gamma_product};
pub use series::{
    irrationality_diagnostic, ln_phi_log_series_complex, phi_log_series, phi_qproduct,
    IrrationalityReport, LOG_SERIES_GUARD,
};
pub use structure::{pole_zero_report, Half, LatticeSite, PoleZeroReport};

/// Evaluation path for [`phi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiMethod {
    DoubleGamma,
    RationalAlpha,
    CklProduct,
    LogSeries,
    QProduct,
    DarlingQuadrature,
    Auto,
}

impl PhiMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhiMethod::DoubleGamma => "double-gamma",
            PhiMethod::RationalAlpha => "rational-alpha",
            PhiMethod::CklProduct => "ckl-product",
            PhiMethod::LogSeries => "log-series",
            PhiMethod::QProduct => "q-product",
            PhiMethod::DarlingQuadrature => "darling-quadrature",
            PhiMethod::Auto => "auto",
        }
    }
}

impl fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "double-gamma" => PhiMethod::DoubleGamma,
            "rational-alpha" => PhiMethod::RationalAlpha,
            "ckl-product" | "ckl" => PhiMethod::CklProduct,
            "log-series" => PhiMethod::LogSeries,
            "q-product" => PhiMethod::QProduct,
            "darling-quadrature" | "darling" => PhiMethod::DarlingQuadrature,
            "auto" => PhiMethod::Auto,
            other => return Err(Error::Domain(format!("unknown phi method '{other}'"))),
        };
        Ok(m)
    }
}

/// `phi(z; alpha, rho)` for `|arg z| < pi`.
///
/// `Auto` uses the finite product when a `C(k,l)` certificate exists, the rational-alpha
/// product for an exact rational `alpha` and real `z > 0`, and the double gamma
/// representation otherwise.
pub fn phi(params: &Parameters, z: Complex64, method: PhiMethod) -> Result<EvalResult> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(EvalResult::real(1.0, 0.0, 0, crate::eval::Method::Direct));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut);
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    let positive_real = z.im == 0.0 && z.re > 0.0;
    match method {
        PhiMethod::DoubleGamma => phi_double_gamma(params, z),
        PhiMethod::RationalAlpha => {
            let ra = params.rational().ok_or_else(|| {
                Error::Domain("the rational-alpha product needs alpha given as m/n".into())
            })?;
            if !positive_real {
                return Err(Error::Domain(
                    "the rational-alpha product needs real z > 0".into(),
                ));
            }
            phi_rational_alpha(ra, params.rho(), z.re)
        }
        PhiMethod::CklProduct => {
            let ckl = detect_ckl(params, params.rational(), CKL_DEFAULT_TOL)
                .ok_or_else(|| Error::Domain(format!("{params} is not in any class C(k,l)")))?;
            phi_ckl(params, ckl, z)
        }
        PhiMethod::LogSeries => {
            if (z.norm() - 1.0).abs() < 1e-12 {
                return Err(Error::Domain("the log-series needs |z| != 1".into()));
            }
            let report = irrationality_diagnostic(params.alpha());
            if let Some((q, err)) = report.failure() {
                return Err(Error::SmallDenominator {
                    k: q as usize,
                    size: err,
                });
            }
            phi_log_series(params, z, LOG_SERIES_GUARD)
        }
        PhiMethod::QProduct => Err(Error::Domain(
            "the q-product needs complex alpha; use phi_qproduct".into(),
        )),
        PhiMethod::DarlingQuadrature => phi_darling_quadrature(params, z),
        PhiMethod::Auto => {
            if let Some(ckl) = detect_ckl(params, params.rational(), CKL_DEFAULT_TOL) {
                return phi_ckl(params, ckl, z);
            }
            if let (Some(ra), true) = (params.rational(), positive_real) {
                return phi_rational_alpha(ra, params.rho(), z.re);
            }
            phi_double_gamma(params, z)
        }
    }
}

/// Wiener-Hopf factor for killing rate `q`: `phi_q(z) = phi(z q^{-1/alpha})`.
pub fn phi_q(params: &Parameters, z: Complex64, q: f64, method: PhiMethod) -> Result<EvalResult> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!(
            "killing rate q must be positive, got {q}"
        )));
    }
    phi(params, z * q.powf(-1.0 / params.alpha()), method)
}

/// `ln(1 + 2 c x + x^2)` for `x > 0`, computed without overflow for large `x`.
pub(crate) fn ln_quadratic(c: f64, x: f64) -> f64 {
    if (c.abs() - 1.0).abs() < 1e-15 {
        // perfect square (1 +- x)^2
        return 2.0 * (1.0 + c.signum() * x).abs().ln();
    }
    if x > 1.0 {
        2.0 * x.ln() + (1.0 + (2.0 * c + 1.0 / x) / x).ln()
    } else {
        (x * (2.0 * c + x)).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RationalAlpha};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn origin_and_branch_cut() {
        let p = make_params(1.5, 0.5).unwrap();
        assert_eq!(phi(&p, c(0.0), PhiMethod::Auto).unwrap().re(), 1.0);
        assert_eq!(phi(&p, c(-1.0), PhiMethod::Auto), Err(Error::BranchCut));
    }

    #[test]
    fn auto_uses_certificate() {
        let p = make_params(1.5, 2.0 / 3.0).unwrap();
        let r = phi(&p, c(1.0), PhiMethod::Auto).unwrap();
        assert!((r.re() - 0.5).abs() < 1e-15);
        assert_eq!(r.method, crate::eval::Method::CklProduct);
    }

    #[test]
    fn brownian_limit() {
        let p = make_params(2.0, 0.5).unwrap();
        for m in [PhiMethod::Auto, PhiMethod::DoubleGamma] {
            let r = phi(&p, c(1.0), m).unwrap();
            assert!((r.re() - 0.5).abs() < 1e-11, "{m}: {}", r.re());
        }
    }

    #[test]
    fn auto_uses_rational_product() {
        let p = make_params(1.5, 0.55)
            .unwrap()
            .with_rational(RationalAlpha::new(3, 2).unwrap())
            .unwrap();
        let r = phi(&p, c(0.8), PhiMethod::Auto).unwrap();
        assert_eq!(r.method, crate::eval::Method::RationalAlpha);
        let d = phi(&p, c(0.8), PhiMethod::DoubleGamma).unwrap();
        assert!((r.value - d.value).norm() < 1e-9);
    }

    #[test]
    fn killing_rate_scaling() {
        let p = make_params(2.0, 0.5).unwrap();
        let r = phi_q(&p, c(1.0), 4.0, PhiMethod::Auto).unwrap();
        assert!((r.re() - 1.0 / 1.5).abs() < 1e-14);
        let p = make_params(1.3, 0.45).unwrap();
        let a = phi_q(&p, c(0.7), 1.0, PhiMethod::Auto).unwrap().value;
        let b = phi(&p, c(0.7), PhiMethod::Auto).unwrap().value;
        assert_eq!(a, b);
        let s = 2f64.powf(1.0 / 1.3);
        let b = phi_q(&p, c(0.7 * s), 2.0, PhiMethod::Auto).unwrap().value;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            PhiMethod::DoubleGamma,
            PhiMethod::RationalAlpha,
            PhiMethod::CklProduct,
            PhiMethod::LogSeries,
            PhiMethod::QProduct,
            PhiMethod::DarlingQuadrature,
            PhiMethod::Auto,
        ] {
            assert_eq!(m.as_str().parse::<PhiMethod>().unwrap(), m);
        }
    }
}
