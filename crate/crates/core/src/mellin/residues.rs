//! Residues of `M(s)`: the coefficients `a(m,n)`, `b(m,n)` for generic parameters and
//! `c+(m,n)`, `c-(m,n)` for the classes `C(k,l)`.

use crate::error::{Error, Result};
use crate::params::{detect_ckl_signed, CklClass, Parameters, CKL_DEFAULT_TOL};
use crate::specfun::gamma::{ln_gamma_real, rgamma_real, sin_pi_real};
use crate::wiener_hopf::irrationality_diagnostic;

/// Denominators `sin(pi x)` below this are refused.
const SIN_GUARD: f64 = 1e-12;

fn parity(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn denominator(x: f64, j: i64) -> Result<f64> {
    let d = sin_pi_real(x);
    if d.abs() < SIN_GUARD {
        return Err(Error::SmallDenominator {
            k: j.unsigned_abs() as usize,
            size: d.abs(),
        });
    }
    Ok(d)
}

/// The two sine products shared by `a(m,n)` and `b(m,n)`.
fn generic_products(params: &Parameters, m: i64, n: i64) -> Result<f64> {
    let (a, r) = (params.alpha(), params.rho());
    let mut p = 1.0;
    for j in 1..=m {
        p *= sin_pi_real(r + (j - 1) as f64 / a) / denominator(j as f64 / a, j)?;
    }
    for j in 1..=n {
        p *= sin_pi_real(a * (r + (j - 1) as f64)) / denominator(a * j as f64, j)?;
    }
    Ok(p)
}

fn check_indices(m: i64, n: i64, n_min: i64) -> Result<()> {
    if m < 0 || n < n_min {
        return Err(Error::Domain(format!(
            "coefficient index ({m}, {n}) out of range"
        )));
    }
    Ok(())
}

/// `a(m,n)`, the residue of `M` at `1 - alpha rho - m - alpha n` (`m, n >= 0`).
pub fn a_coeff(params: &Parameters, m: i64, n: i64) -> Result<f64> {
    check_indices(m, n, 0)?;
    let (a, r) = (params.alpha(), params.rho());
    let (mf, nf) = (m as f64, n as f64);
    let g = rgamma_real(1.0 - r - nf - mf / a) * rgamma_real(a * r + mf + a * nf);
    Ok(parity(m + n) * g * generic_products(params, m, n)?)
}

/// `b(m,n)` (`m >= 0`, `n >= 1`); `-b(m-1,n)` is the residue of `M` at `m + alpha n`.
pub fn b_coeff(params: &Parameters, m: i64, n: i64) -> Result<f64> {
    check_indices(m, n, 1)?;
    let a = params.alpha();
    let (mf, nf) = (m as f64, n as f64);
    let g = rgamma_real(1.0 + nf + mf / a) * rgamma_real(-mf - a * nf);
    Ok(parity(m + n) * g * generic_products(params, m, n)?)
}

/// `alpha` together with an exact fraction `p/q` when it lies within `1e-13` of one with
/// `q <= 64`, so that lattice coincidences in the `c` coefficients come out exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AlphaRepr {
    pub value: f64,
    pub frac: Option<(i64, i64)>,
}

impl AlphaRepr {
    pub fn new(alpha: f64) -> Self {
        let frac = (1..=64i64).find_map(|q| {
            let p = (alpha * q as f64).round();
            ((alpha - p / q as f64).abs() < 1e-13 && p > 0.0).then_some((p as i64, q))
        });
        AlphaRepr { value: alpha, frac }
    }

    /// `a + i / alpha` and whether it is an exact integer.
    pub fn shift_over(&self, a: i64, i: i64) -> (f64, bool) {
        match self.frac {
            Some((p, q)) => {
                let num = a * p + i * q;
                (num as f64 / p as f64, num % p == 0)
            }
            None => {
                let v = a as f64 + i as f64 / self.value;
                (v, i == 0)
            }
        }
    }

    /// `a + i alpha` and whether it is an exact integer.
    pub fn shift_times(&self, a: i64, i: i64) -> (f64, bool) {
        match self.frac {
            Some((p, q)) => {
                let num = a * q + i * p;
                (num as f64 / q as f64, num % q == 0)
            }
            None => (a as f64 + i as f64 * self.value, i == 0),
        }
    }

    /// `sin(pi i / alpha)`, exactly zero on the lattice.
    pub fn sin_pi_over(&self, i: i64) -> f64 {
        match self.frac {
            Some((p, q)) => sin_pi_fraction(i * q, p),
            None => sin_pi_real(i as f64 / self.value),
        }
    }

    /// `sin(pi i alpha)`, exactly zero on the lattice.
    pub fn sin_pi_times(&self, i: i64) -> f64 {
        match self.frac {
            Some((p, q)) => sin_pi_fraction(i * p, q),
            None => sin_pi_real(i as f64 * self.value),
        }
    }
}

/// `sin(pi num / den)` after exact reduction of `num` modulo `2 den`.
fn sin_pi_fraction(num: i64, den: i64) -> f64 {
    let r = num.rem_euclid(2 * den);
    if r % den == 0 {
        0.0
    } else {
        sin_pi_real(r as f64 / den as f64)
    }
}

/// `(ln |1/Gamma(x)|, sign)`; the sign is zero at the poles of `Gamma`.
pub(crate) fn ln_rgamma(x: f64, integer: bool) -> (f64, f64) {
    if integer && x <= 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (lg, sg) = ln_gamma_real(x);
    (-lg, sg)
}

/// `c+(m,n)` (`l > 0`) or `c-(m,n)` (`l < 0`) as `(ln |c|, sign, scale)`, where `scale` is
/// the sum of the magnitudes of the logarithms combined (a rounding-error proxy).
pub(crate) fn ln_c(alpha: &AlphaRepr, ckl: CklClass, m: i64, n: i64) -> Result<(f64, f64, f64)> {
    let (k, l) = (ckl.k, ckl.l);
    let plus = l > 0;
    let valid = if plus {
        (0..=k).contains(&n)
    } else {
        l < 0 && (0..=-l).contains(&m)
    };
    if !valid {
        let tag = if plus { "c+" } else { "c-" };
        return Err(Error::Domain(format!(
            "{tag}({m},{n}) is not defined for {ckl}"
        )));
    }
    let e = if plus {
        m * (k + 1) + n * l + 1
    } else {
        m * k + n * (l + 1) + 1
    };
    let mut sign = parity(e);
    let (x1, i1) = alpha.shift_over(1 + n, m);
    let (x2, i2) = alpha.shift_times(-m, -n);
    let (g1, s1) = ln_rgamma(x1, i1);
    let (g2, s2) = ln_rgamma(x2, i2);
    sign *= s1 * s2;
    if sign == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0, 0.0));
    }
    let mut ln = g1 + g2;
    let mut scale = g1.abs() + g2.abs();
    let mut factor = |num: f64, den: f64, j: i64| -> Result<()> {
        if den.abs() < SIN_GUARD {
            return Err(Error::SmallDenominator {
                k: j.unsigned_abs() as usize,
                size: den.abs(),
            });
        }
        let v = num / den;
        if v == 0.0 {
            sign = 0.0;
        } else {
            sign *= v.signum();
            ln += v.abs().ln();
            scale += v.abs().ln().abs();
        }
        Ok(())
    };
    if plus {
        for j in 1..l {
            factor(alpha.sin_pi_over(j + m), alpha.sin_pi_over(j), j)?;
        }
        for j in 1..=k - n {
            factor(alpha.sin_pi_times(j + n), alpha.sin_pi_times(j), j)?;
        }
    } else {
        for j in 1..-k {
            factor(alpha.sin_pi_times(j + n), alpha.sin_pi_times(j), j)?;
        }
        for j in 1..=-l - m {
            factor(alpha.sin_pi_over(j + m), alpha.sin_pi_over(j), j)?;
        }
    }
    if sign == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0, 0.0));
    }
    Ok((ln, sign, scale))
}

fn c_value(alpha: f64, ckl: CklClass, m: i64, n: i64) -> Result<f64> {
    let (ln, sign, _) = ln_c(&AlphaRepr::new(alpha), ckl, m, n)?;
    Ok(if sign == 0.0 { 0.0 } else { sign * ln.exp() })
}

/// `c+(m,n)` for `C(k,l)` with `l > 0`, `0 <= n <= k` and any integer `m`.
pub fn c_plus(alpha: f64, ckl: CklClass, m: i64, n: i64) -> Result<f64> {
    if ckl.l <= 0 {
        return Err(Error::Domain(format!("c+ needs l > 0, got {ckl}")));
    }
    c_value(alpha, ckl, m, n)
}

/// `c-(m,n)` for `C(k,l)` with `l < 0`, `0 <= m <= |l|` and any integer `n`.
pub fn c_minus(alpha: f64, ckl: CklClass, m: i64, n: i64) -> Result<f64> {
    if ckl.l >= 0 {
        return Err(Error::Domain(format!("c- needs l < 0, got {ckl}")));
    }
    c_value(alpha, ckl, m, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueKind {
    /// Poles `m + alpha n` and `1 - alpha rho - m - alpha n` with residues from `a`, `b`.
    Generic,
    /// `C(k,l)` with `l > 0`, residues `c+`.
    CklPos,
    /// `C(k,l)` with `l < 0`, residues `c-`.
    CklNeg,
}

/// A pole of `M(s)` on the real axis with its residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueEntry {
    pub s: f64,
    pub residue: f64,
    pub m: i64,
    pub n: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueTable {
    pub params: Parameters,
    pub kind: ResidueKind,
    pub entries: Vec<ResidueEntry>,
}

impl ResidueTable {
    /// Entry whose pole lies within `tol` of `s`.
    pub fn find(&self, s: f64, tol: f64) -> Option<&ResidueEntry> {
        self.entries.iter().find(|e| (e.s - s).abs() <= tol)
    }
}

/// Residue table with index caps `m_max`, `n_max`.
///
/// The generic kind refuses parameters whose `alpha` fails the irrationality diagnostic
/// or hits a sine denominator below `1e-12`. The `C(k,l)` kinds need a certificate of
/// the matching sign of `l` (smallest `|l|`); their entries list the lattice of the class, and residues
/// of cancelled poles come out as zero.
pub fn residue_coeffs(
    params: &Parameters,
    kind: ResidueKind,
    m_max: u32,
    n_max: u32,
) -> Result<ResidueTable> {
    let a = params.alpha();
    let (mm, nm) = (m_max as i64, n_max as i64);
    let mut entries = Vec::new();
    match kind {
        ResidueKind::Generic => {
            if let Some((q, err)) = irrationality_diagnostic(a).failure() {
                return Err(Error::SmallDenominator {
                    k: q as usize,
                    size: err,
                });
            }
            let ar = params.alpha_rho();
            for n in 0..=nm {
                for m in 0..=mm {
                    entries.push(ResidueEntry {
                        s: 1.0 - ar - m as f64 - a * n as f64,
                        residue: a_coeff(params, m, n)?,
                        m,
                        n,
                    });
                }
            }
            for n in 1..=nm {
                for m in 1..=mm + 1 {
                    entries.push(ResidueEntry {
                        s: m as f64 + a * n as f64,
                        residue: -b_coeff(params, m - 1, n)?,
                        m,
                        n,
                    });
                }
            }
        }
        ResidueKind::CklPos | ResidueKind::CklNeg => {
            let positive = kind == ResidueKind::CklPos;
            let ckl = detect_ckl_signed(params, positive, CKL_DEFAULT_TOL).ok_or_else(|| {
                let sign = if positive { "> 0" } else { "< 0" };
                Error::Domain(format!("{params} has no certificate C(k,l) with l {sign}"))
            })?;
            let (k, l) = (ckl.k, ckl.l);
            let mut push = |m: i64, n: i64, v: f64| {
                entries.push(ResidueEntry {
                    s: m as f64 + a * n as f64,
                    residue: v,
                    m,
                    n,
                })
            };
            if kind == ResidueKind::CklPos {
                for n in 0..=k {
                    for m in (1 - l - mm)..=(1 - l) {
                        push(m, n, c_plus(a, ckl, m - 1, n)?);
                    }
                }
                for n in 1..=k {
                    for m in 1..=mm + 1 {
                        push(m, n, c_plus(a, ckl, m - 1, n)?);
                    }
                }
            } else {
                for m in 1..=(1 - l) {
                    for n in 1..=nm {
                        push(m, n, c_minus(a, ckl, m - 1, n)?);
                    }
                }
                for m in 2..=(1 - l) {
                    for n in (k - nm)..=k {
                        push(m, n, c_minus(a, ckl, m - 1, n)?);
                    }
                }
            }
        }
    }
    entries.sort_by(|x, y| x.s.total_cmp(&y.s));
    Ok(ResidueTable {
        params: *params,
        kind,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::specfun::gamma_real;

    #[test]
    fn a00_is_a_gamma_ratio() {
        let p = make_params(1.5, 0.5).unwrap();
        let want = 1.0 / (gamma_real(0.5) * gamma_real(0.75));
        assert!((a_coeff(&p, 0, 0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.4604).abs() < 1e-4);
    }

    #[test]
    fn generic_table_refuses_rational_alpha() {
        let p = make_params(1.5, 0.5).unwrap();
        assert!(matches!(
            residue_coeffs(&p, ResidueKind::Generic, 2, 2),
            Err(Error::SmallDenominator { .. })
        ));
    }

    #[test]
    fn spectrally_negative_table_is_gamma_poles() {
        let p = make_params(1.5, 2.0 / 3.0).unwrap();
        let t = residue_coeffs(&p, ResidueKind::CklPos, 4, 0).unwrap();
        // poles of Gamma(s) at 0, -1, ..., -4; residue (-1)^j / j! / Gamma(1 - (1 + j) / alpha)
        assert_eq!(t.entries.len(), 5);
        let mut fact = 1.0;
        for (j, e) in t.entries.iter().rev().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            assert_eq!(e.s, -(j as f64));
            let want = if j % 2 == 0 { 1.0 } else { -1.0 } / fact
                * rgamma_real(1.0 - (1.0 + j as f64) / 1.5);
            assert!(
                (e.residue - want).abs() < 1e-14 * want.abs().max(1.0),
                "{e:?} vs {want}"
            );
        }
    }
}
