//! Mellin transform `M(s) = E[S_1^{s-1}]` of the supremum at time one.
//!
//! [`mellin`] evaluates the six-factor double gamma formula, which is meromorphic in the
//! whole plane. [`mellin_ckl`] uses the finite gamma/sine products available in the
//! classes `C(k,l)`.

mod product;
pub(crate) mod residues;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::params::{inverse_alpha, CklClass, Parameters};
use crate::quad::{integrate_interval, QuadOptions};
use crate::specfun::gamma::{ln_gamma, sin_pi_real};
use crate::specfun::log_barnes_g;
use crate::wiener_hopf::{phi, PhiMethod};
use product::{Factor, Kind, Product};

pub use residues::{
    a_coeff, b_coeff, c_minus, c_plus, residue_coeffs, ResidueEntry, ResidueKind, ResidueTable,
};

/// Vertical strip `c_min < Re s < c_max` on which `M(s)` is given directly by its
/// defining integral (the image of `0 < Re s < alpha rho` for the transform of `phi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinStrip {
    pub c_min: f64,
    pub c_max: f64,
}

impl MellinStrip {
    pub fn contains(&self, s: Complex64) -> bool {
        self.c_min < s.re && s.re < self.c_max
    }
}

pub fn mellin_strip(params: &Parameters) -> MellinStrip {
    MellinStrip {
        c_min: 1.0 - params.alpha_rho(),
        c_max: 1.0,
    }
}

fn double_gamma_product(params: &Parameters) -> Result<Product> {
    let (a, r) = (params.alpha(), params.rho());
    let tau = Complex64::new(a, 0.0);
    let g_rho = log_barnes_g(Complex64::new(a * r, 0.0), tau)?.value;
    let g_dual = log_barnes_g(Complex64::new(a * (1.0 - r) + 1.0, 0.0), tau)?.value;
    let ln_a = a.ln();
    let g = Kind::Barnes(a);
    Ok(Product {
        c0: g_rho - g_dual - ln_a,
        c1: ln_a,
        factors: vec![
            Factor::new(g, a * (1.0 - r) + 2.0, -1.0, 1),
            Factor::new(g, a * r - 1.0, 1.0, -1),
            Factor::new(g, a - 1.0, 1.0, 1),
            Factor::new(g, a + 1.0, -1.0, -1),
        ],
        method: Method::DoubleGamma,
    })
}

/// `M(s; alpha, rho)` from the double gamma formula.
///
/// Poles are recognized from the lattices of the factors (tolerance `1e-9 (1 + |s|)`)
/// and reported as [`Error::Pole`] with the residue computed on a circle of radius
/// `1e-3`. Values within `1e-6` of a lattice point are flagged `near_singular`.
pub fn mellin(params: &Parameters, s: Complex64) -> Result<EvalResult> {
    check_finite(s)?;
    double_gamma_product(params)?.eval(s)
}

fn ckl_product(params: &Parameters, ckl: CklClass) -> Result<Product> {
    let a = params.alpha();
    let resid = ckl.residual(a, params.rho());
    if resid > 1e-8 {
        return Err(Error::Domain(format!(
            "{ckl} is not a certificate for {params} (residual {resid:e})"
        )));
    }
    let (k, l) = (ckl.k, ckl.l);
    let mut c0 = Complex64::new(0.0, 0.0);
    let mut factors = Vec::new();
    // ln of a real constant that must not vanish
    let mut constant = |x: f64, sign: f64| -> Result<()> {
        if x.abs() < 1e-14 {
            return Err(Error::Domain(format!(
                "{ckl}: vanishing constant factor at alpha = {a}"
            )));
        }
        c0 += sign * Complex64::new(x, 0.0).ln();
        Ok(())
    };
    if l > 0 {
        factors.push(Factor::new(Kind::Gamma, 0.0, 1.0, 1));
        factors.push(Factor::new(Kind::Gamma, 1.0 - 1.0 / a, 1.0 / a, -1));
        for j in 1..l {
            factors.push(Factor::new(Kind::SinPi, (j - 1) as f64 / a, 1.0 / a, 1));
            constant(sin_pi_real(j as f64 / a), -1.0)?;
        }
        for j in 1..=k {
            constant(sin_pi_real(a * j as f64), 1.0)?;
            factors.push(Factor::new(Kind::SinPi, 1.0 + a * j as f64, -1.0, -1));
        }
    } else if l < 0 {
        factors.push(Factor::new(Kind::Gamma, 1.0 + 1.0 / a, -1.0 / a, 1));
        factors.push(Factor::new(Kind::Gamma, 2.0, -1.0, -1));
        for j in 1..k.unsigned_abs() as i64 {
            factors.push(Factor::new(Kind::SinPi, a * j as f64 - 1.0, 1.0, 1));
            constant(sin_pi_real(a * j as f64), -1.0)?;
        }
        for j in 1..=l.unsigned_abs() as i64 {
            constant(sin_pi_real(j as f64 / a), 1.0)?;
            factors.push(Factor::new(Kind::SinPi, (1 + j) as f64 / a, -1.0 / a, -1));
        }
    } else {
        return Err(Error::Domain(format!("{ckl} has l = 0")));
    }
    Ok(Product {
        c0,
        c1: 0.0,
        factors,
        method: Method::CklFinite,
    })
}

/// `M(s)` for a process in `C(k,l)` as a finite product of gamma and sine factors.
pub fn mellin_ckl(params: &Parameters, ckl: CklClass, s: Complex64) -> Result<EvalResult> {
    check_finite(s)?;
    ckl_product(params, ckl)?.eval(s)
}

/// Residue of `M` at `s0` from the contour integral over a circle of radius `1e-3`
/// (trapezoidal rule, 64 nodes). The circle must not enclose other poles.
pub fn mellin_contour_residue(params: &Parameters, s0: Complex64) -> Result<Complex64> {
    double_gamma_product(params)?
        .circle_mean(s0, 1)
        .map(|(v, _)| v)
}

fn check_finite(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("s = {s} is not finite")))
    }
}

fn cgamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

fn mval(params: &Parameters, s: Complex64) -> Result<Complex64> {
    mellin(params, s).map(|r| r.value)
}

fn residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

/// Residuals of the two quasi-periodicity relations (periods `1` and `alpha`),
/// each as `|lhs - rhs| / max(1, |lhs|)`.
pub fn mellin_recursion_check(params: &Parameters, s: Complex64) -> Result<(f64, f64)> {
    let (a, r) = (params.alpha(), params.rho());
    let m = mval(params, s)?;
    let rhs1 = a / PI
        * (PI * (r - (1.0 - s) / a)).sin()
        * cgamma(1.0 - s / a)
        * cgamma(1.0 - (1.0 - s) / a)
        * m;
    let rhs2 = a / PI * (PI * (a * r - 1.0 + s)).sin() * cgamma(1.0 - s) * cgamma(a - 1.0 + s) * m;
    Ok((
        residual(mval(params, s + 1.0)?, rhs1),
        residual(mval(params, s + a)?, rhs2),
    ))
}

/// Residuals of the reflection `s -> 2 - alpha rho - s` and of the transformation to
/// `(1/alpha, alpha rho)`. The second is `None` when `(1/alpha, alpha rho)` is not an
/// admissible pair.
pub fn mellin_reflections_check(params: &Parameters, s: Complex64) -> Result<(f64, Option<f64>)> {
    let (a, r) = (params.alpha(), params.rho());
    let ar = params.alpha_rho();
    let lhs = mval(params, s)?;
    let u = (1.0 - s) / a;
    let rhs1 = cgamma(ar - 1.0 + s) / cgamma(1.0 - s) * cgamma(1.0 - r + u) / cgamma(1.0 - u)
        * mval(params, 2.0 - ar - s)?;
    let second = match inverse_alpha(params) {
        Ok(q) => {
            let rhs2 = cgamma(s) / cgamma(2.0 - s) * cgamma(1.0 + u) / cgamma(1.0 - u)
                * mval(&q, 1.0 - u)?;
            Some(residual(lhs, rhs2))
        }
        Err(_) => None,
    };
    Ok((residual(lhs, rhs1), second))
}

/// Exponential decay rate of `|M(x + iy)|` in `|y|`:
/// `pi / (2 alpha) * (alpha (1 - rho) + 1 - alpha rho)`.
pub fn mellin_decay_rate(params: &Parameters) -> f64 {
    let (a, r) = (params.alpha(), params.rho());
    PI / (2.0 * a) * (a * (1.0 - r) + 1.0 - a * r)
}

/// Leading-order value of `ln |M(x + iy)|`. The leading term does not depend on `x`.
pub fn mellin_decay_bound(params: &Parameters, _x: f64, y: f64) -> f64 {
    -mellin_decay_rate(params) * y.abs()
}

/// `|int_0^inf z^{s-1} phi(z) dz - Gamma(s) Gamma(1 - s/alpha) M(1 - s)|` for
/// `0 < Re s < alpha rho`, with `phi` evaluated by `method` inside tanh-sinh panels in
/// `w = ln z`.
pub fn phi_mellin_bridge(params: &Parameters, s: Complex64, method: PhiMethod) -> Result<f64> {
    let ar = params.alpha_rho();
    if !(s.re > 0.0 && s.re < ar) {
        return Err(Error::Domain(format!(
            "the bridge needs 0 < Re s < {ar}, got s = {s}"
        )));
    }
    // |e^{ws} phi(e^w)| <= exp(w Re s) on the left and ~ exp(w (Re s - alpha rho)) on the
    // right; cut both tails where these fall below e^{-40}
    let lo = -40.0 / s.re;
    let hi = 40.0 / (ar - s.re);
    let panels = ((hi - lo) / 8.0).ceil() as usize;
    let width = (hi - lo) / panels as f64;
    let opts = QuadOptions::with_tol(1e-14, 1e-12);
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..panels {
        let a = lo + j as f64 * width;
        let mut failure = None;
        let integrand = |w: f64| -> Complex64 {
            if failure.is_some() {
                return Complex64::new(0.0, 0.0);
            }
            match phi(params, Complex64::new(w.exp(), 0.0), method) {
                Ok(v) => (w * s).exp() * v.value,
                Err(e) => {
                    failure = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let q = integrate_interval(integrand, a, a + width, &opts);
        if let Some(e) = failure {
            return Err(e);
        }
        total += q?.value;
    }
    let rhs = cgamma(s) * cgamma(1.0 - s / params.alpha()) * mval(params, 1.0 - s)?;
    Ok((total - rhs).norm())
}
