//! The function `F(z; tau) = int_R dx / ((1 + e^{z + i tau x}) (1 + e^x))` for `Im tau > 0`.
//!
//! It is analytic in the strip `S(tau) = {|Re(z conj(tau))| < pi Im tau}` and links the
//! Wiener-Hopf factor to simpler objects through its modular and multiplication identities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::quad::{integrate_real_line, QuadOptions};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const POLE_GUARD: f64 = 1e-8;
const MAX_TERMS: usize = 100_000;

/// Membership of a point in `S(tau)` and `P(tau) = S(tau) ∩ {|Im z| < pi Im tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripCheck {
    pub tau: Complex64,
    pub in_s: bool,
    pub in_p: bool,
}

pub fn strip_check(z: Complex64, tau: Complex64) -> StripCheck {
    let bound = PI * tau.im;
    let in_s = tau.im > 0.0 && (z * tau.conj()).re.abs() < bound;
    StripCheck {
        tau,
        in_s,
        in_p: in_s && z.im.abs() < bound,
    }
}

/// Lattice point `w_{m,n} = pi i ((2m + 1)/alpha + 2n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
    pub w: Complex64,
}

impl LatticePoint {
    pub fn new(m: i64, n: i64, alpha: f64) -> Self {
        let w = I * PI * ((2 * m + 1) as f64 / alpha + (2 * n + 1) as f64);
        LatticePoint { m, n, w }
    }
}

/// `1 / (1 + e^w)` without overflow.
pub(crate) fn inv_one_plus_exp(w: Complex64) -> Complex64 {
    if w.re > 0.0 {
        let e = (-w).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + w.exp())
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::Domain(format!(
            "F(z; tau) needs Im tau > 0, got tau = {tau}"
        )));
    }
    Ok(())
}

/// Rejects `z` outside `S(tau)` and flags points within the pole guard of its edges.
fn check_strip(z: Complex64, tau: Complex64) -> Result<()> {
    check_tau(tau)?;
    // distance from z to the nearest line of integrand poles
    let gap = (PI * tau.im - (z * tau.conj()).re.abs()) / tau.norm();
    if gap < 0.0 {
        return Err(Error::Domain(format!(
            "z = {z} lies outside S(tau) for tau = {tau}"
        )));
    }
    if gap < POLE_GUARD {
        return Err(Error::Pole {
            location: z,
            residue: None,
        });
    }
    Ok(())
}

fn check_p(z: Complex64, tau: Complex64) -> Result<()> {
    check_strip(z, tau)?;
    if z.im.abs() >= PI * tau.im - POLE_GUARD {
        return Err(Error::Domain(format!(
            "z = {z} lies outside P(tau) for tau = {tau}"
        )));
    }
    Ok(())
}

/// `F(z; tau)` by direct quadrature of its defining integral.
pub fn f_quadrature(z: Complex64, tau: Complex64) -> Result<EvalResult> {
    check_strip(z, tau)?;
    let integrand =
        |x: f64| inv_one_plus_exp(z + I * tau * x) * inv_one_plus_exp(Complex64::new(x, 0.0));
    let r = integrate_real_line(integrand, 0.0, &QuadOptions::default())?;
    Ok(EvalResult::new(
        r.value,
        r.abs_err,
        r.nodes,
        Method::Quadrature,
    ))
}

/// Which series representation `f_series` sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesForm {
    /// Sum over the poles at `z + 2 pi (k + 1/2) tau`; needs `Re tau != 0`.
    Residue,
    /// Series in `e^{-k z}` and `e^{-i k z / tau}`; needs `Re tau != 0` and `Re z > 0`.
    Exponential,
}

/// `F(z; tau)` by one of its two series expansions.
pub fn f_series(z: Complex64, tau: Complex64, form: SeriesForm) -> Result<EvalResult> {
    check_strip(z, tau)?;
    if tau.re == 0.0 {
        return Err(Error::Domain("series forms of F need Re tau != 0".into()));
    }
    let delta = tau.re.signum();
    let term = |k: usize| -> Complex64 {
        let kf = k as f64;
        match form {
            SeriesForm::Residue => {
                let h = 2.0 * PI * delta * (kf + 0.5);
                delta
                    * (2.0 * PI * I * inv_one_plus_exp(z + h * tau)
                        + 2.0 * PI / tau * inv_one_plus_exp(I * z / tau + h / tau))
            }
            SeriesForm::Exponential => {
                let k1 = kf + 1.0;
                let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let a = (-k1 * z).exp() / (PI * k1 * tau).sinh();
                let b = I / tau * (-I * k1 * z / tau).exp() / (PI * k1 / tau).sinh();
                -PI * I * sign * (a - b)
            }
        }
    };
    if form == SeriesForm::Exponential && z.re <= 0.0 {
        return Err(Error::Domain(
            "the exponential series of F needs Re z > 0".into(),
        ));
    }
    let method = match form {
        SeriesForm::Residue => Method::PoleSeries,
        SeriesForm::Exponential => Method::ExponentialSeries,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let t = term(k);
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Domain(format!("series term {k} of F is not finite")));
        }
        sum += t;
        if t.norm() < 1e-16 * sum.norm().max(1e-300) {
            small += 1;
            if small >= 2 {
                return Ok(EvalResult::new(sum, t.norm(), k + 1, method));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        what: "series for F(z; tau)",
        iterations: MAX_TERMS,
    })
}

/// `F(z; i m/n)` by the closed form for rational `tau / i`.
///
/// The closed form has removable singularities inside `|Im z| < pi`; near them the value
/// is taken as the mean over a small circle.
pub fn f_rational(z: Complex64, m: u32, n: u32) -> Result<EvalResult> {
    if m == 0 || n == 0 || crate::params::gcd(m as u64, n as u64) != 1 {
        return Err(Error::Domain(format!(
            "m/n = {m}/{n} must be coprime positive integers"
        )));
    }
    if !(z.im.abs() < PI) {
        return Err(Error::Domain(format!(
            "closed form needs |Im z| < pi, got z = {z}"
        )));
    }
    if PI - z.im.abs() < POLE_GUARD {
        return Err(Error::Pole {
            location: z,
            residue: None,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    if let Some(v) = rational_terms(z, m, n, 1e-3) {
        return Ok(EvalResult::new(
            v,
            1e-15 * (1.0 + v.norm()),
            0,
            Method::RationalClosedForm,
        ));
    }
    let r = (0.2 * PI / nf.max(mf)).min(0.5 * (PI - z.im.abs()));
    const NODES: usize = 64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..NODES {
        let u = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / NODES as f64);
        match rational_terms(z + u, m, n, 1e-9) {
            Some(v) => sum += v,
            None => {
                return Err(Error::Pole {
                    location: z,
                    residue: None,
                })
            }
        }
    }
    let v = sum / NODES as f64;
    Ok(EvalResult::new(
        v,
        1e-12 * (1.0 + v.norm()),
        NODES,
        Method::RationalClosedForm,
    )
    .flagged(true))
}

/// Sum of the three groups of terms; `None` if some denominator is below `guard`.
fn rational_terms(z: Complex64, m: u32, n: u32, guard: f64) -> Option<Complex64> {
    let (mf, nf) = (m as f64, n as f64);
    let sign = if (m as u64 * n as u64) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let den0 = sign * (nf * z).exp() + 1.0;
    if den0.norm() < guard {
        return None;
    }
    let mut total = -nf / mf * z / den0;
    for k in 0..n {
        let w = z + PI * I * mf / nf * (2 * k + 1) as f64;
        let den = w.exp() + 1.0;
        if den.norm() < guard {
            return None;
        }
        total += PI * I / nf * (nf - (2 * k + 1) as f64) / den;
    }
    for j in 0..m {
        let w = z * nf / mf + PI * I * nf / mf * (2 * j + 1) as f64;
        let den = w.exp() + 1.0;
        if den.norm() < guard {
            return None;
        }
        total += nf / mf * PI * I / mf * (mf - (2 * j + 1) as f64) / den;
    }
    Some(total)
}

/// `F(z; tau)` from the `sinh * sinh` integral along `R + i eps`, `eps` half its upper bound.
pub fn f_contour(z: Complex64, tau: Complex64) -> Result<EvalResult> {
    check_tau(tau)?;
    let eps_max = (PI / 2.0).min((-PI / (2.0 * tau)).im);
    f_contour_eps(z, tau, 0.5 * eps_max)
}

/// As [`f_contour`] with an explicit contour height.
pub fn f_contour_eps(z: Complex64, tau: Complex64, eps: f64) -> Result<EvalResult> {
    check_p(z, tau)?;
    let eps_max = (PI / 2.0).min((-PI / (2.0 * tau)).im);
    if !(eps > 0.0 && eps < eps_max) {
        return Err(Error::Domain(format!(
            "contour height {eps} not in (0, {eps_max})"
        )));
    }
    let integrand = |t: f64| {
        let x = Complex64::new(t, eps);
        (I * z * x / PI - ln_sinh(x) - ln_sinh(I * tau * x)).exp()
    };
    let r = integrate_real_line(integrand, 0.0, &QuadOptions::default())?;
    Ok(EvalResult::new(
        0.5 * r.value,
        0.5 * r.abs_err,
        r.nodes,
        Method::ContourIntegral,
    ))
}

/// `ln sinh(a)` on some branch, without overflow for large `|Re a|`.
fn ln_sinh(a: Complex64) -> Complex64 {
    if a.re >= 0.0 {
        a + (0.5 * (1.0 - (-2.0 * a).exp())).ln()
    } else {
        -a + (-0.5 * (1.0 - (2.0 * a).exp())).ln()
    }
}
