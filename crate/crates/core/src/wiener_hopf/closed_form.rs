//! Finite-product forms of `phi`: rational `alpha` and the classes `C(k,l)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::ln_quadratic;
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::params::{CklClass, Parameters, RationalAlpha};
use crate::specfun::clausen;

/// `phi(z)` for `alpha = m/n` and real `z > 0` as a finite product with a Clausen prefactor.
pub fn phi_rational_alpha(ra: RationalAlpha, rho: f64, z: f64) -> Result<EvalResult> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "the rational-alpha product needs real z > 0, got {z}"
        )));
    }
    crate::params::make_params(ra.value(), rho)?;
    let v = ln_phi_rational(ra, rho, z);
    if v.is_finite() {
        let e = 64.0 * f64::EPSILON * (1.0 + v.abs() + (ra.m() + ra.n()) as f64);
        return Ok(EvalResult::real(
            v.exp(),
            e * v.exp(),
            (ra.m() + ra.n() + 1) as usize,
            Method::RationalAlpha,
        ));
    }
    // two factors of the product vanish together: interpolate from nearby points
    let d = 2e-3;
    let at = |t: f64| ln_phi_rational(ra, rho, z * (1.0 + t)).exp();
    let v = (4.0 * (at(-d) + at(d)) - at(-2.0 * d) - at(2.0 * d)) / 6.0;
    if !v.is_finite() {
        return Err(Error::Pole {
            location: Complex64::new(z, 0.0),
            residue: None,
        });
    }
    Ok(EvalResult::real(
        v,
        1e-10 * v,
        4 * (ra.m() + ra.n() + 1) as usize,
        Method::RationalAlpha,
    )
    .flagged(true))
}

fn ln_phi_rational(ra: RationalAlpha, rho: f64, z: f64) -> f64 {
    let (m, n) = (ra.m() as usize, ra.n() as usize);
    let (mf, nf) = (m as f64, n as f64);
    let alpha = mf / nf;
    let sign = if (m * n) % 2 == 0 { 1.0 } else { -1.0 };

    let m_rho = mf * rho;
    let m_rho_integral = (m_rho - m_rho.round()).abs() < 1e-12;
    let (s, c) = (PI * m_rho).sin_cos();
    let zm = z.powf(mf);
    // theta = arccot(cot(pi m rho) + sign z^m / sin(pi m rho)) in (0, pi)
    let theta = if m_rho_integral {
        0.0
    } else {
        s.abs().atan2(s.signum() * (c + sign * zm))
    };
    let two_pi_m_rho = 2.0 * PI * m_rho;
    let mut ln_phi =
        (clausen(2.0 * theta) - clausen(two_pi_m_rho) - clausen(2.0 * theta - two_pi_m_rho))
            / (2.0 * PI * mf * nf);
    ln_phi -= rho / (2.0 * nf) * ln_quadratic(sign * c, zm);
    let za = z.powf(alpha);
    for k in 0..n {
        let e = (nf - (2 * k + 1) as f64) / (2.0 * nf);
        if e != 0.0 {
            ln_phi += e * ln_quadratic((PI * alpha * (rho + (2 * k + 1) as f64)).cos(), za);
        }
    }
    for j in 0..m {
        let e = (mf - (2 * j + 1) as f64) / (2.0 * mf);
        if e != 0.0 {
            ln_phi += e * ln_quadratic((PI / alpha * (alpha * rho + (2 * j + 1) as f64)).cos(), z);
        }
    }
    ln_phi
}

/// Finite q-Pochhammer ratio for a process in `C(k,l)`.
pub fn phi_ckl(params: &Parameters, ckl: CklClass, z: Complex64) -> Result<EvalResult> {
    let alpha = params.alpha();
    let resid = ckl.residual(alpha, params.rho());
    if resid > 1e-8 {
        return Err(Error::Domain(format!(
            "{ckl} is not a certificate for {params} (residual {resid:e})"
        )));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut);
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(EvalResult::real(1.0, 0.0, 0, Method::CklProduct));
    }
    match ckl_factors(alpha, ckl, z, 1e-4) {
        Some(v) => {
            let terms = (ckl.k.unsigned_abs() + ckl.l.unsigned_abs()) as usize;
            Ok(EvalResult::new(
                v,
                32.0 * f64::EPSILON * (1.0 + terms as f64) * v.norm(),
                terms,
                Method::CklProduct,
            ))
        }
        None => {
            // removable singularity of the ratio: average over a small circle
            const NODES: usize = 32;
            let r = 0.05 * z.norm();
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..NODES {
                let u = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / NODES as f64);
                sum += ckl_factors(alpha, ckl, z + u, 0.0).ok_or(Error::Pole {
                    location: z,
                    residue: None,
                })?;
            }
            let v = sum / NODES as f64;
            Ok(EvalResult::new(v, 1e-13 * v.norm(), NODES, Method::CklProduct).flagged(true))
        }
    }
}

/// The product ratio; `None` when a denominator factor is below `guard`.
fn ckl_factors(alpha: f64, ckl: CklClass, z: Complex64, guard: f64) -> Option<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let q = (2.0 * PI * i * alpha).exp();
    let qt = (-2.0 * PI * i / alpha).exp();
    let za = (alpha * z.ln()).exp();
    let neg = |e: i64| if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (k, l) = (ckl.k, ckl.l);
    // ln (a; q)_n, summed in logs so that large |z| does not overflow
    let poch = |a: Complex64, q: Complex64, n: u64| -> (Complex64, f64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut smallest = f64::INFINITY;
        let mut aq = a;
        for _ in 0..n {
            let f = 1.0 - aq;
            smallest = smallest.min(f.norm());
            p += f.ln();
            aq *= q;
        }
        (p, smallest)
    };
    let (num, den) = if l > 0 {
        let a = za * neg(1 - l) * (PI * i * alpha * (1 - k) as f64).exp();
        let b = z * neg(1 - k) * (-PI * i * (1 - l) as f64 / alpha).exp();
        (poch(a, q, k as u64), poch(b, qt, l as u64))
    } else {
        let a = z * neg(1 + k) * (-PI * i * (1 + l) as f64 / alpha).exp();
        let b = za * neg(1 + l) * (PI * i * alpha * (1 + k) as f64).exp();
        (poch(a, qt, l.unsigned_abs()), poch(b, q, k.unsigned_abs()))
    };
    if den.1 <= guard || den.1 == 0.0 {
        return None;
    }
    Some((num.0 - den.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{detect_ckl, dual, make_params};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn spectrally_negative_is_exponential() {
        let p = make_params(1.5, 2.0 / 3.0).unwrap();
        let ckl = CklClass {
            k: 0,
            l: 1,
            exact: false,
        };
        for &z in &[0.3, 1.0, 3.0] {
            let v = phi_ckl(&p, ckl, c(z)).unwrap().value;
            assert!((v - 1.0 / (1.0 + z)).norm() < 1e-15);
        }
        let ra = RationalAlpha::new(3, 2).unwrap();
        let v = phi_rational_alpha(ra, 2.0 / 3.0, 1.0).unwrap().re();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rational_product_removable_point() {
        // two factors vanish together at z = 1
        let ra = RationalAlpha::new(3, 2).unwrap();
        let r = phi_rational_alpha(ra, 1.0 / 3.0, 1.0).unwrap();
        assert!(r.near_singular);
        assert!((r.re() - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn equivalent_certificates_agree() {
        // at alpha = 3/2, rho = 1/3 both C(1,2) and C(-1,-1) hold
        let p = make_params(1.5, 1.0 / 3.0).unwrap();
        let a = CklClass {
            k: 1,
            l: 2,
            exact: false,
        };
        let b = CklClass {
            k: -1,
            l: -1,
            exact: false,
        };
        for &z in &[0.3, 0.7, 1.0, 2.0] {
            let va = phi_ckl(&p, a, c(z)).unwrap();
            let vb = phi_ckl(&p, b, c(z)).unwrap();
            assert!((va.value - vb.value).norm() < 1e-12, "z={z}");
        }
        // the second form is 0/0 at z = 1
        assert!(phi_ckl(&p, b, c(1.0)).unwrap().near_singular);
        assert!((phi_ckl(&p, b, c(1.0)).unwrap().re() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dual_certificate() {
        let p = make_params(1.5, 2.0 / 3.0).unwrap();
        let ckl = detect_ckl(&p, None, 1e-12).unwrap();
        let d = dual(&p);
        let v = phi_ckl(&d, ckl.dual(), c(0.6)).unwrap().value;
        let w = phi_ckl(
            &d,
            CklClass {
                k: 1,
                l: 2,
                exact: false,
            },
            c(0.6),
        )
        .unwrap()
        .value;
        assert!((v - w).norm() < 1e-12);
    }

    #[test]
    fn rejects_wrong_certificate() {
        let p = make_params(1.5, 0.5).unwrap();
        assert!(phi_ckl(
            &p,
            CklClass {
                k: 0,
                l: 1,
                exact: false
            },
            c(1.0)
        )
        .is_err());
    }
}
