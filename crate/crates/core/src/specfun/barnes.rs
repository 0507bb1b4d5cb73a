//! Barnes double gamma function `G(z; tau)` in log form.
//!
//! `G` is normalized by `G(1; tau) = 1` and satisfies
//! `G(z + 1) = Gamma(z / tau) G(z)` and
//! `G(z + tau) = (2 pi)^{(tau - 1)/2} tau^{1/2 - z} Gamma(z) G(z)`.
//! It is evaluated as a finite product of gamma functions, with the remaining tail of
//! the product summed by an Euler-Maclaurin expansion in polygamma functions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use super::gamma::{bernoulli_over_factorial, ln_gamma, polygamma_any};
use super::CSum;
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};

const LN_SQRT_2PI: f64 = 0.9189385332046728;

/// Minimal `|m tau|` for the constant expansions and for the product cut-off.
const MIN_TAIL_MODULUS: f64 = 30.0;
const MAX_CONSTANT_M: usize = 1 << 20;
/// Target used for the cached constants.
const CACHE_TARGET: f64 = 1e-12;
const MAX_TAIL_TERMS: usize = 400;

/// The constants `C(tau)`, `D(tau)` entering the gamma-product form of `G(z; tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarnesConstants {
    pub tau: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    /// Truncation index of the final (accepted) evaluation.
    pub m_used: usize,
    /// Difference between the last two refinements.
    pub err_est: f64,
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.re.is_finite() && tau.im.is_finite()) || tau.norm() == 0.0 {
        return Err(Error::Domain(format!("invalid tau = {tau}")));
    }
    if tau.im == 0.0 && tau.re < 0.0 {
        return Err(Error::Domain(format!(
            "|arg tau| must be < pi, got tau = {tau}"
        )));
    }
    Ok(())
}

/// Euler-Maclaurin correction `sum_k B_2k/(2k)! tau^(2k-1) psi^(order+2k-1)(w)`.
fn em_correction(order: usize, w: Complex64, tau: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut tpow = tau;
    let tau2 = tau * tau;
    let mut prev = f64::INFINITY;
    for k in 1..=12 {
        let t = bernoulli_over_factorial(k) * tpow * polygamma_any(order + 2 * k - 1, w);
        let tn = t.norm();
        if tn > prev {
            break;
        }
        acc += t;
        if tn < 1e-18 * (1.0 + acc.norm()) {
            break;
        }
        prev = tn;
        tpow *= tau2;
    }
    acc
}

fn constants_at(tau: Complex64, m: usize) -> (Complex64, Complex64) {
    let mut s0 = CSum::default();
    let mut s1 = CSum::default();
    for k in 1..m {
        let w = tau * k as f64;
        s0.add(polygamma_any(0, w));
        s1.add(polygamma_any(1, w));
    }
    let w = tau * m as f64;
    let psi0 = polygamma_any(0, w);
    let psi1 = polygamma_any(1, w);
    s0.add(0.5 * psi0);
    s0.add(-(ln_gamma(w) - LN_SQRT_2PI) / tau);
    s0.add(-em_correction(0, w, tau));
    s1.add(0.5 * psi1);
    s1.add(-psi0 / tau);
    s1.add(-em_correction(1, w, tau));
    (s0.value(), s1.value())
}

/// Compute `C(tau)` and `D(tau)`, doubling `m` from `|m tau| >= 30` until two successive
/// evaluations agree within `target_err`.
pub fn barnes_constants(tau: Complex64, target_err: f64) -> Result<BarnesConstants> {
    check_tau(tau)?;
    let mut m = ((MIN_TAIL_MODULUS / tau.norm()).ceil() as usize).max(2);
    let (mut c_prev, mut d_prev) = constants_at(tau, m);
    while m < MAX_CONSTANT_M {
        m *= 2;
        let (c, d) = constants_at(tau, m);
        let err = (c - c_prev).norm().max((d - d_prev).norm());
        if err <= target_err {
            return Ok(BarnesConstants {
                tau,
                c,
                d,
                m_used: m,
                err_est: err,
            });
        }
        c_prev = c;
        d_prev = d;
    }
    Err(Error::Convergence {
        what: "Barnes constants C(tau), D(tau)",
        iterations: MAX_CONSTANT_M,
    })
}

/// Per-`tau` data shared across evaluations: constants and the z-independent
/// factors `ln Gamma(m tau)`, `psi(m tau)`, `psi'(m tau)`.
struct TauData {
    consts: BarnesConstants,
    a_tilde: Complex64,
    b_tilde: Complex64,
    table: Vec<[Complex64; 3]>,
}

type Cache = RwLock<HashMap<(u64, u64), Arc<TauData>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn key(tau: Complex64) -> (u64, u64) {
    (tau.re.to_bits(), tau.im.to_bits())
}

fn table_entry(tau: Complex64, m: usize) -> [Complex64; 3] {
    let w = tau * m as f64;
    [ln_gamma(w), polygamma_any(0, w), polygamma_any(1, w)]
}

fn tau_data(tau: Complex64, m_needed: usize) -> Result<Arc<TauData>> {
    if let Some(d) = cache().read().unwrap().get(&key(tau)) {
        if d.table.len() >= m_needed {
            return Ok(Arc::clone(d));
        }
    }
    let existing = cache().read().unwrap().get(&key(tau)).cloned();
    let data = match existing {
        Some(d) => {
            let mut table = d.table.clone();
            let start = table.len();
            table.extend((start..m_needed.max(2 * start)).map(|m| table_entry(tau, m)));
            TauData {
                consts: d.consts,
                a_tilde: d.a_tilde,
                b_tilde: d.b_tilde,
                table,
            }
        }
        None => {
            let consts = barnes_constants(tau, CACHE_TARGET)?;
            let ln_tau = tau.ln();
            let a_tilde = 0.5 * tau * (2.0 * PI * tau).ln() + 0.5 * ln_tau - tau * consts.c;
            let b_tilde = -tau * ln_tau - tau * tau * consts.d;
            // index 0 is a placeholder so that table[m] belongs to m tau
            let mut table = vec![[Complex64::new(0.0, 0.0); 3]];
            table.extend((1..m_needed.max(64)).map(|m| table_entry(tau, m)));
            TauData {
                consts,
                a_tilde,
                b_tilde,
                table,
            }
        }
    };
    let data = Arc::new(data);
    let mut w = cache().write().unwrap();
    let slot = w.entry(key(tau)).or_insert_with(|| Arc::clone(&data));
    if slot.table.len() < data.table.len() {
        *slot = Arc::clone(&data);
    }
    Ok(Arc::clone(slot))
}

/// Zero of `G(.; tau)` within `tol` of `z`, as `(m, n)` with `z = -(m tau + n)`.
pub fn lattice_zero(z: Complex64, tau: Complex64, tol: f64) -> Option<(i64, i64)> {
    let test = |m: i64| -> Option<(i64, i64)> {
        if m < 0 {
            return None;
        }
        let nz = -z - tau * m as f64;
        let n = nz.re.round();
        if n >= 0.0 && (nz - n).norm() <= tol {
            Some((m, n as i64))
        } else {
            None
        }
    };
    if tau.im.abs() > 1e-3 * tau.norm() {
        let mf = (-z.im / tau.im).round() as i64;
        (mf - 1..=mf + 1).find_map(test)
    } else {
        if z.im.abs() > tol + z.re.abs().max(1.0) * tau.im.abs() {
            return None;
        }
        let hi = ((-z.re + tol) / tau.re).floor();
        if hi < 0.0 || hi > 1e7 {
            return None;
        }
        (0..=hi as i64 + 1).find_map(test)
    }
}

/// `ln G(z; tau)` (modulo `2 pi i`) with an error estimate.
pub fn log_barnes_g(z: Complex64, tau: Complex64) -> Result<EvalResult> {
    check_tau(tau)?;
    let scale = 1.0 + z.norm();
    if let Some((m, n)) = lattice_zero(z, tau, 1e-8 * scale) {
        return Err(Error::LatticeZero { m, n });
    }
    let near = lattice_zero(z, tau, 1e-6 * scale).is_some();

    // cut-off so that the Taylor tail in z converges geometrically with ratio <= 1/4
    let reach = if tau.re >= 0.0 {
        tau.norm()
    } else {
        tau.im.abs()
    };
    let need = MIN_TAIL_MODULUS.max(4.0 * z.norm());
    let m_cut = ((need / reach).ceil() as usize)
        .max((MIN_TAIL_MODULUS / tau.norm()).ceil() as usize)
        .max(2);
    let data = tau_data(tau, m_cut)?;

    let mut sum = CSum::default();
    let z2h = 0.5 * z * z;
    for row in &data.table[1..m_cut] {
        let [lg, psi0, psi1] = *row;
        sum.add(lg + z * psi0 + z2h * psi1);
    }
    for m in 1..m_cut {
        sum.add(-ln_gamma(z + tau * m as f64));
    }
    let (tail, tail_terms) = product_tail(z, tau, m_cut);
    sum.add(tail);
    sum.add(-tau.ln() - ln_gamma(z));
    sum.add(data.a_tilde * z / tau);
    sum.add(data.b_tilde * z * z / (2.0 * tau * tau));

    let value = sum.value();
    let err = 8.0 * f64::EPSILON * sum.magnitude()
        + data.consts.err_est * (z.norm() + z.norm_sqr())
        + 1e-15 * value.norm();
    Ok(EvalResult::new(value, err, m_cut + tail_terms, Method::BarnesProduct).flagged(near))
}

/// `sum_{m >= M} [ln Gamma(m tau) - ln Gamma(z + m tau) + z psi(m tau) + z^2/2 psi'(m tau)]`
/// expanded as `-sum_{j>=3} z^j/j! S(j-1)` with `S(n) = sum_{m>=M} psi^(n)(m tau)`.
pub(crate) fn product_tail(z: Complex64, tau: Complex64, m_cut: usize) -> (Complex64, usize) {
    let w = tau * m_cut as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut zp = z * z; // z^j / j! built incrementally
    zp /= 2.0;
    let mut small = 0;
    for j in 3..MAX_TAIL_TERMS {
        zp *= z / j as f64;
        if zp.norm() == 0.0 {
            return (total, j);
        }
        let n = j - 1;
        let s =
            -polygamma_any(n - 1, w) / tau + 0.5 * polygamma_any(n, w) - em_correction(n, w, tau);
        let t = -zp * s;
        total += t;
        if t.norm() < 1e-17 * (1.0 + total.norm()) {
            small += 1;
            if small >= 2 {
                return (total, j);
            }
        } else {
            small = 0;
        }
    }
    (total, MAX_TAIL_TERMS)
}

/// Constants `C(tau)`, `D(tau)` from the shared cache.
pub(crate) fn cached_constants(tau: Complex64) -> Result<BarnesConstants> {
    check_tau(tau)?;
    tau_data(tau, 2).map(|d| d.consts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma_real;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ln_g(z: Complex64, tau: Complex64) -> Result<Complex64> {
        log_barnes_g(z, tau).map(|r| r.value)
    }

    fn mod_2pi_i(d: Complex64) -> Complex64 {
        let k = (d.im / (2.0 * PI)).round();
        d - c(0.0, 2.0 * PI * k)
    }

    #[test]
    fn normalization_at_one() {
        for &tau in &[
            c(0.83, 0.0),
            c(1.0, 0.0),
            c(1.5, 0.0),
            c(0.4, 0.0),
            c(0.3, 0.9),
            c(2.0, -0.5),
        ] {
            let v = log_barnes_g(c(1.0, 0.0), tau).unwrap().value;
            assert!(mod_2pi_i(v).norm() < 1e-12, "tau={tau} v={v}");
        }
    }

    #[test]
    fn second_and_third_points() {
        // G(2; tau) = Gamma(1/tau)
        for &t in &[0.7, 1.0, 1.5, 2.0] {
            let v = log_barnes_g(c(2.0, 0.0), c(t, 0.0)).unwrap().value;
            assert!((v.re - ln_gamma_real(1.0 / t).0).abs() < 1e-12, "tau={t}");
        }
        let v = log_barnes_g(c(3.0, 0.0), c(1.0, 0.0)).unwrap().value;
        assert!(mod_2pi_i(v).norm() < 1e-12);
    }

    #[test]
    fn known_value_at_half() {
        // ln G(1/2) for tau = 1: ln 2 / 24 + 3/2 zeta'(-1) - ln(pi) / 4
        let zeta_prime_m1 = -0.1654211437004509;
        let expect = 2f64.ln() / 24.0 + 1.5 * zeta_prime_m1 - PI.ln() / 4.0;
        let v = log_barnes_g(c(0.5, 0.0), c(1.0, 0.0)).unwrap().value;
        assert!((v.re - expect).abs() < 1e-12, "{} vs {}", v.re, expect);
    }

    #[test]
    fn quasi_periodicity() {
        let tau = c(0.7, 0.0);
        for &z in &[c(1.3, 0.0), c(0.4, 2.0), c(-0.6, 0.3), c(3.0, -7.0)] {
            let g = ln_g(z, tau).unwrap();
            let r1 = ln_g(z + 1.0, tau).unwrap() - ln_gamma(z / tau) - g;
            assert!(mod_2pi_i(r1).norm() < 1e-11, "z={z} r1={r1}");
            let r2 = ln_g(z + tau, tau).unwrap()
                - (0.5 * (tau - 1.0) * (2.0 * PI).ln() + (0.5 - z) * tau.ln() + ln_gamma(z))
                - g;
            assert!(mod_2pi_i(r2).norm() < 1e-11, "z={z} r2={r2}");
        }
    }

    #[test]
    fn constants_refine_and_reflect() {
        let a = barnes_constants(c(0.7, 0.0), 1e-12).unwrap();
        assert!(a.err_est <= 1e-12);
        let tau = c(0.6, 0.8);
        let x = barnes_constants(tau, 1e-12).unwrap();
        let y = barnes_constants(tau.conj(), 1e-12).unwrap();
        assert!((x.c - y.c.conj()).norm() < 1e-12);
        assert!((x.d - y.d.conj()).norm() < 1e-12);
    }

    #[test]
    fn schwarz_reflection() {
        let tau = c(0.9, 0.4);
        let z = c(0.7, -1.2);
        let a = ln_g(z, tau).unwrap();
        let b = ln_g(z.conj(), tau.conj()).unwrap();
        assert!(mod_2pi_i(a - b.conj()).norm() < 1e-11);
    }

    #[test]
    fn lattice_zeros_are_reported() {
        let tau = c(0.7, 0.0);
        assert_eq!(
            log_barnes_g(c(-1.4 - 3.0, 0.0), tau).unwrap_err(),
            Error::LatticeZero { m: 2, n: 3 }
        );
        assert!(log_barnes_g(c(0.0, 0.0), tau).is_err());
        assert!(lattice_zero(c(-0.7, 0.0), tau, 1e-10).is_some());
        assert!(lattice_zero(c(-0.8, 0.0), tau, 1e-10).is_none());
        let tau = c(0.5, 0.5);
        assert_eq!(lattice_zero(c(-1.0, -1.0), tau, 1e-10), Some((2, 0)));
    }

    #[test]
    fn invalid_tau() {
        assert!(log_barnes_g(c(1.0, 0.0), c(-1.0, 0.0)).is_err());
        assert!(barnes_constants(c(0.0, 0.0), 1e-12).is_err());
    }
}
