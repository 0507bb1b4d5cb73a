//! Representations of `phi` valid for every admissible pair: the double gamma ratio, its
//! expansion as a product of gamma functions, and the Darling integral.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::params::Parameters;
use crate::quad::{integrate_real_line, QuadOptions};
use crate::specfun::barnes::{cached_constants, product_tail};
use crate::specfun::gamma::{ln1p, polygamma_any};
use crate::specfun::{ln_gamma, log_barnes_g};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Arguments `1/2 + alpha/2 (1 +- rho +- L)` with `L = w / (pi i)`; numerators first.
fn g_arguments(alpha: f64, rho: f64, w: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
    let l = w / (PI * I);
    let half = Complex64::new(0.5, 0.0);
    let num = [
        half + 0.5 * alpha * (1.0 + rho + l),
        half + 0.5 * alpha * (1.0 + rho - l),
    ];
    let den = [
        half + 0.5 * alpha * (1.0 - rho + l),
        half + 0.5 * alpha * (1.0 - rho - l),
    ];
    (num, den)
}

/// `phi(e^w)` through the double gamma ratio. The right-hand side is meromorphic in `w`,
/// so this also gives the continuation of `phi(e^w)` beyond `|Im w| < pi`.
pub fn phi_exp(params: &Parameters, w: Complex64) -> Result<EvalResult> {
    let (alpha, rho) = (params.alpha(), params.rho());
    let tau = Complex64::new(alpha, 0.0);
    let (num, den) = g_arguments(alpha, rho, w);
    let mut ln_phi = -alpha * rho * ((2.0 * PI).ln() + 0.5 * w);
    let mut err = 0.0;
    let mut terms = 0;
    let mut near = false;
    for z in num {
        match log_barnes_g(z, tau) {
            Ok(r) => {
                ln_phi += r.value;
                err += r.abs_err;
                terms += r.terms;
                near |= r.near_singular;
            }
            // a zero of a numerator factor is a zero of phi
            Err(Error::LatticeZero { .. }) => {
                return Ok(EvalResult::real(0.0, 0.0, terms, Method::DoubleGamma).flagged(true))
            }
            Err(e) => return Err(e),
        }
    }
    for z in den {
        match log_barnes_g(z, tau) {
            Ok(r) => {
                ln_phi -= r.value;
                err += r.abs_err;
                terms += r.terms;
                near |= r.near_singular;
            }
            Err(Error::LatticeZero { .. }) => {
                return Err(Error::Pole {
                    location: w.exp(),
                    residue: None,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let v = ln_phi.exp();
    Ok(EvalResult::new(
        v,
        (err + 1e-15 * (1.0 + ln_phi.norm())) * v.norm(),
        terms,
        Method::DoubleGamma,
    )
    .flagged(near))
}

/// `phi(z)` as `(2 pi sqrt z)^{-alpha rho}` times a ratio of four double gamma functions.
pub fn phi_double_gamma(params: &Parameters, z: Complex64) -> Result<EvalResult> {
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut);
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(EvalResult::real(1.0, 0.0, 0, Method::DoubleGamma));
    }
    phi_exp(params, z.ln())
}

/// `phi(z)` as an infinite product of gamma functions truncated after `factors` factors.
///
/// With `tail = true` the omitted factors are summed by an Euler-Maclaurin expansion;
/// without it the truncation error decays only like `1/factors`.
pub fn phi_gamma_product(
    params: &Parameters,
    z: Complex64,
    factors: usize,
    tail: bool,
) -> Result<EvalResult> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::BranchCut);
    }
    if factors == 0 {
        return Err(Error::Domain(
            "the gamma product needs at least one factor".into(),
        ));
    }
    let (alpha, rho) = (params.alpha(), params.rho());
    let ar = alpha * rho;
    let tau = Complex64::new(alpha, 0.0);
    let consts = cached_constants(tau)?;
    let w = z.ln();
    let (num, den) = g_arguments(alpha, rho, w);

    let mut ln_phi = -0.5 * ar * w - ar * (2.0 * consts.c + (alpha + 1.0) * consts.d);
    for m in 0..factors {
        let shift = alpha * m as f64;
        if m > 0 {
            let x = Complex64::new(shift, 0.0);
            ln_phi += ar * (2.0 * polygamma_any(0, x) + (alpha + 1.0) * polygamma_any(1, x));
        }
        for a in num {
            ln_phi -= ln_gamma(a + shift);
        }
        for b in den {
            ln_phi += ln_gamma(b + shift);
        }
    }
    let mut err = 1e-14 * (1.0 + ln_phi.norm()) + consts.err_est;
    if tail {
        for a in num {
            ln_phi += product_tail(a, tau, factors).0;
        }
        for b in den {
            ln_phi -= product_tail(b, tau, factors).0;
        }
    } else {
        // leading term of the omitted tail
        err += (ar * (1.0 + alpha) * (1.0 + w.norm())).abs() / (alpha * factors as f64);
    }
    let v = ln_phi.exp();
    Ok(EvalResult::new(
        v,
        err * v.norm(),
        factors,
        Method::GammaProduct,
    ))
}

/// `ln(1 + e^w)` for `|Im w| < pi` on the principal branch, without overflow.
fn ln1p_exp(w: Complex64) -> Complex64 {
    if w.re > 0.0 {
        w + ln1p((-w).exp())
    } else {
        ln1p(w.exp())
    }
}

/// `phi(z)` for `Re z > 0` from the two half-line integrals of Darling type, after the
/// substitution `u = e^t`.
pub fn phi_darling_quadrature(params: &Parameters, z: Complex64) -> Result<EvalResult> {
    phi_darling_with(params, z, &QuadOptions::default())
}

pub(crate) fn phi_darling_with(
    params: &Parameters,
    z: Complex64,
    opts: &QuadOptions,
) -> Result<EvalResult> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!(
            "the Darling integral needs Re z > 0, got z = {z}"
        )));
    }
    let (alpha, gamma) = (params.alpha(), params.gamma());
    let shift = 0.5 * PI * gamma;
    let integrand = |sign: f64| {
        move |t: f64| -> Complex64 {
            if t.abs() > 700.0 {
                return Complex64::new(0.0, 0.0);
            }
            let num = ln1p_exp(Complex64::new(alpha * t, sign * shift));
            num / (t.exp() - sign * I * z)
        }
    };
    let r1 = integrate_real_line(integrand(1.0), 0.0, opts)?;
    let r2 = integrate_real_line(integrand(-1.0), 0.0, opts)?;
    let scale = z / (2.0 * PI);
    let ln_phi = -scale * (r1.value + r2.value);
    let v = ln_phi.exp();
    let err = scale.norm() * (r1.abs_err + r2.abs_err) * v.norm() + 4.0 * f64::EPSILON * v.norm();
    Ok(EvalResult::new(
        v,
        err,
        r1.nodes + r2.nodes,
        Method::DarlingQuadrature,
    ))
}
