//! Parametrization of strictly stable processes by the stability index `alpha` and the
//! positivity parameter `rho = P(X_1 > 0)`, together with the classes `C(k,l)` of
//! processes satisfying `rho + k = l / alpha`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Slack used when testing membership of the closed boundaries of the admissible set.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Largest `|k|`, `|l|` scanned by [`detect_ckl`].
pub const CKL_SCAN_LIMIT: i64 = 64;

/// Default tolerance for [`detect_ckl`].
pub const CKL_DEFAULT_TOL: f64 = 1e-10;

/// Validated `(alpha, rho)` pair with the derived `gamma` and `beta` cached.
///
/// `1 - rho` is stored alongside `rho` so that taking the dual twice returns the original
/// value bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    alpha: f64,
    rho: f64,
    rho_dual: f64,
    gamma: f64,
    beta: f64,
    rational: Option<RationalAlpha>,
}

impl Parameters {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `gamma = alpha (1 - 2 rho)`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Skewness parameter of the characteristic exponent.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `alpha * rho`; never exceeds one on the admissible set.
    pub fn alpha_rho(&self) -> f64 {
        self.alpha * self.rho
    }

    /// The exact rational form of `alpha`, if one was attached with [`Parameters::with_rational`].
    pub fn rational(&self) -> Option<RationalAlpha> {
        self.rational
    }

    pub fn is_brownian(&self) -> bool {
        self.alpha == 2.0
    }

    /// Attach the exact rational value of `alpha`. This is the only way to unlock the
    /// formulas that need `alpha = m/n` exactly.
    pub fn with_rational(mut self, ra: RationalAlpha) -> Result<Self> {
        if (ra.value() - self.alpha).abs() > 1e-14 * self.alpha.max(1.0) {
            return Err(Error::Domain(format!(
                "rational {ra} does not match alpha = {}",
                self.alpha
            )));
        }
        self.rational = Some(ra);
        Ok(self)
    }
}

impl fmt::Display for Parameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rational {
            Some(ra) => write!(f, "(alpha={ra}, rho={})", self.rho),
            None => write!(f, "(alpha={}, rho={})", self.alpha, self.rho),
        }
    }
}

/// Validate `(alpha, rho)` against the admissible set and cache `gamma`, `beta`.
///
/// Accepted: `alpha in (0,1)` with `rho in (0,1)`; `alpha = 1` with `rho = 1/2`;
/// `alpha in (1,2)` with `rho in [1 - 1/alpha, 1/alpha]`; and the Brownian limit
/// `alpha = 2`, `rho = 1/2`.
pub fn make_params(alpha: f64, rho: f64) -> Result<Parameters> {
    make_params_with_dual(alpha, rho, 1.0 - rho)
}

fn make_params_with_dual(alpha: f64, rho: f64, rho_dual: f64) -> Result<Parameters> {
    let bad = Error::Admissibility { alpha, rho };
    if !alpha.is_finite() || !rho.is_finite() || alpha <= 0.0 || alpha > 2.0 {
        return Err(bad);
    }
    if alpha < 1.0 {
        if rho == 0.0 || rho == 1.0 {
            return Err(Error::Subordinator { alpha, rho });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(bad);
        }
    } else if alpha == 1.0 || alpha == 2.0 {
        if (rho - 0.5).abs() > BOUNDARY_SLACK {
            return Err(bad);
        }
    } else {
        let lo = 1.0 - 1.0 / alpha;
        let hi = 1.0 / alpha;
        if rho < lo - BOUNDARY_SLACK || rho > hi + BOUNDARY_SLACK {
            return Err(bad);
        }
    }
    let gamma = alpha * (rho_dual - rho);
    let beta = if alpha == 1.0 || alpha == 2.0 {
        0.0
    } else {
        (-(PI * gamma / 2.0).tan() / (PI * alpha / 2.0).tan()).clamp(-1.0, 1.0)
    };
    Ok(Parameters {
        alpha,
        rho,
        rho_dual,
        gamma,
        beta,
        rational: None,
    })
}

/// `rho = 1/2 + atan(beta tan(pi alpha / 2)) / (pi alpha)`.
pub fn rho_from_beta(alpha: f64, beta: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&beta) || !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!(
            "rho_from_beta needs alpha in (0,2] and beta in [-1,1], got ({alpha}, {beta})"
        )));
    }
    if alpha == 1.0 {
        if beta != 0.0 {
            return Err(Error::Domain(
                "alpha = 1 is only strictly stable for beta = 0".into(),
            ));
        }
        return Ok(0.5);
    }
    if alpha == 2.0 {
        return Ok(0.5);
    }
    Ok(0.5 + (beta * (PI * alpha / 2.0).tan()).atan() / (PI * alpha))
}

/// Construct parameters from the `(alpha, beta)` parametrization.
pub fn params_from_beta(alpha: f64, beta: f64) -> Result<Parameters> {
    let rho = rho_from_beta(alpha, beta)?;
    make_params(alpha, rho)
}

/// The dual process `-X` has parameters `(alpha, 1 - rho)`.
pub fn dual(params: &Parameters) -> Parameters {
    Parameters {
        alpha: params.alpha,
        rho: params.rho_dual,
        rho_dual: params.rho,
        gamma: -params.gamma,
        beta: -params.beta,
        rational: params.rational,
    }
}

/// Map `(alpha, rho)` to `(1/alpha, alpha rho)`.
pub fn inverse_alpha(params: &Parameters) -> Result<Parameters> {
    let alpha = 1.0 / params.alpha;
    let rho = params.alpha * params.rho;
    let p = make_params(alpha, rho)?;
    match params.rational {
        Some(ra) => p.with_rational(ra.recip()),
        None => Ok(p),
    }
}

/// Exact rational stability index `alpha = m/n` with `gcd(m, n) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalAlpha {
    m: u32,
    n: u32,
}

impl RationalAlpha {
    /// Builds `m/n` reduced to lowest terms. The value must lie in `(0, 2]`.
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!("invalid rational {m}/{n}")));
        }
        let g = gcd(m as u64, n as u64) as u32;
        let (m, n) = (m / g, n / g);
        if m > 2 * n {
            return Err(Error::Domain(format!("alpha = {m}/{n} exceeds 2")));
        }
        Ok(RationalAlpha { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    fn recip(&self) -> RationalAlpha {
        RationalAlpha {
            m: self.n,
            n: self.m,
        }
    }
}

impl fmt::Display for RationalAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.m, self.n)
    }
}

impl FromStr for RationalAlpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Domain(format!("expected m/n, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Domain(format!("expected m/n, got {s:?}")))
        };
        RationalAlpha::new(parse(a)?, parse(b)?)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Certificate that `rho + k = l / alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CklClass {
    pub k: i64,
    pub l: i64,
    /// Whether the certificate was derived from an exact rational `alpha`.
    pub exact: bool,
}

impl CklClass {
    /// Certificate of the dual process: `C(k,l) -> C(-k-1, -l)`.
    pub fn dual(&self) -> CklClass {
        CklClass {
            k: -self.k - 1,
            l: -self.l,
            exact: self.exact,
        }
    }

    /// Certificate of `(1/alpha, alpha rho)`: `C(k,l) -> C(-l, -k)`.
    pub fn inverse_alpha(&self) -> CklClass {
        CklClass {
            k: -self.l,
            l: -self.k,
            exact: self.exact,
        }
    }

    /// `|rho + k - l/alpha|`.
    pub fn residual(&self, alpha: f64, rho: f64) -> f64 {
        (rho + self.k as f64 - self.l as f64 / alpha).abs()
    }
}

impl fmt::Display for CklClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{})", self.k, self.l)
    }
}

/// Find `(k, l)` with `rho + k = l/alpha` within `tol`.
///
/// With an exact rational `alpha = m/n` the representative with `0 <= k < n`,
/// `1 <= l < m` is returned. Otherwise `|k|, |l| <= 64` are scanned; among several hits
/// the one with `k >= 0`, `l >= 1` and smallest `k` wins, then the smallest `|k| + |l|`.
pub fn detect_ckl(
    params: &Parameters,
    alpha_as_rational: Option<RationalAlpha>,
    tol: f64,
) -> Option<CklClass> {
    let rho = params.rho;
    if let Some(ra) = alpha_as_rational.or(params.rational) {
        let (m, n) = (ra.m as i64, ra.n as i64);
        for k in 0..n {
            // l = (rho + k) m / n must be an integer in [1, m)
            let l_real = (rho + k as f64) * m as f64 / n as f64;
            let l = l_real.round() as i64;
            if l < 1 || l >= m {
                continue;
            }
            let resid = (rho + k as f64 - (l * n) as f64 / m as f64).abs();
            if resid < tol {
                return Some(CklClass { k, l, exact: true });
            }
        }
        return None;
    }

    let alpha = params.alpha;
    let mut best: Option<(CklClass, (i64, i64))> = None;
    for l in -CKL_SCAN_LIMIT..=CKL_SCAN_LIMIT {
        let k_real = l as f64 / alpha - rho;
        let k = k_real.round() as i64;
        if k.abs() > CKL_SCAN_LIMIT {
            continue;
        }
        let c = CklClass { k, l, exact: false };
        if c.residual(alpha, rho) >= tol {
            continue;
        }
        let preferred = k >= 0 && l >= 1;
        let key = if preferred {
            (0, k)
        } else {
            (1, k.abs() + l.abs())
        };
        match best {
            Some((_, bk)) if bk <= key => {}
            _ => best = Some((c, key)),
        }
    }
    best.map(|(c, _)| c)
}

/// Certificate `C(k,l)` with the requested sign of `l` and the smallest `|l|`, if any.
pub fn detect_ckl_signed(params: &Parameters, positive_l: bool, tol: f64) -> Option<CklClass> {
    let (alpha, rho) = (params.alpha, params.rho);
    (1..=CKL_SCAN_LIMIT)
        .map(|j| if positive_l { j } else { -j })
        .map(|l| CklClass {
            k: (l as f64 / alpha - rho).round() as i64,
            l,
            exact: false,
        })
        .find(|c| c.k.abs() <= CKL_SCAN_LIMIT && c.residual(alpha, rho) < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn symmetric_has_zero_skew() {
        let p = make_params(1.5, 0.5).unwrap();
        assert_eq!(p.gamma(), 0.0);
        assert_eq!(p.beta(), 0.0);
    }

    #[test]
    fn admissible_set_edges() {
        assert!(make_params(1.0, 0.5).is_ok());
        assert!(make_params(2.0, 0.5).is_ok());
        assert!(make_params(1.5, 1.0 / 3.0).is_ok());
        assert!(make_params(1.5, 2.0 / 3.0).is_ok());
        assert!(matches!(
            make_params(0.5, 1.0),
            Err(Error::Subordinator { .. })
        ));
        assert!(matches!(
            make_params(0.5, 0.0),
            Err(Error::Subordinator { .. })
        ));
        assert!(matches!(
            make_params(1.5, 0.7),
            Err(Error::Admissibility { .. })
        ));
        assert!(matches!(
            make_params(1.0, 0.4),
            Err(Error::Admissibility { .. })
        ));
        assert!(make_params(2.1, 0.5).is_err());
        assert!(make_params(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn rho_from_beta_examples() {
        assert_eq!(rho_from_beta(1.5, 0.0).unwrap(), 0.5);
        assert!((rho_from_beta(1.5, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((rho_from_beta(1.5, -1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(rho_from_beta(1.0, 0.3).is_err());
    }

    #[test]
    fn ckl_detection_examples() {
        let p = make_params(1.5, 2.0 / 3.0).unwrap();
        let c = detect_ckl(&p, None, CKL_DEFAULT_TOL).unwrap();
        assert_eq!((c.k, c.l), (0, 1));
        let p = make_params(1.5, 1.0 / 3.0).unwrap();
        let c = detect_ckl(&p, None, CKL_DEFAULT_TOL).unwrap();
        assert_eq!((c.k, c.l), (1, 2));
        let p = make_params(SQRT_2, 0.5).unwrap();
        assert!(detect_ckl(&p, None, 1e-12).is_none());
    }

    #[test]
    fn ckl_with_exact_rational_is_normalized() {
        let ra: RationalAlpha = "3/2".parse().unwrap();
        let p = make_params(1.5, 1.0 / 3.0)
            .unwrap()
            .with_rational(ra)
            .unwrap();
        let c = detect_ckl(&p, None, CKL_DEFAULT_TOL).unwrap();
        assert_eq!((c.k, c.l, c.exact), (1, 2, true));
        let p = make_params(0.8, 0.5).unwrap();
        let c = detect_ckl(&p, Some(RationalAlpha::new(4, 5).unwrap()), 1e-10).unwrap();
        assert!(c.k >= 0 && c.k < 5 && c.l >= 1 && c.l < 4);
        assert!(c.residual(0.8, 0.5) < 1e-12);
    }

    #[test]
    fn dual_examples() {
        let p = make_params(1.5, 1.0 / 3.0).unwrap();
        assert!((dual(&p).rho() - 2.0 / 3.0).abs() < 1e-15);
        let p = make_params(0.7, 0.4).unwrap();
        assert!((dual(&p).rho() - 0.6).abs() < 1e-15);
        let c = CklClass {
            k: 0,
            l: 1,
            exact: false,
        };
        let d = c.dual();
        assert_eq!((d.k, d.l), (-1, -1));
        let q = dual(&make_params(1.5, 2.0 / 3.0).unwrap());
        assert!(d.residual(q.alpha(), q.rho()) < 1e-14);
    }

    #[test]
    fn inverse_alpha_examples() {
        let p = inverse_alpha(&make_params(1.5, 0.5).unwrap()).unwrap();
        assert!((p.alpha() - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.rho() - 0.75).abs() < 1e-15);
        assert!(inverse_alpha(&make_params(1.25, 0.8).unwrap()).is_err());

        let p = make_params(1.5, 1.0 / 3.0).unwrap();
        let c = detect_ckl(&p, None, CKL_DEFAULT_TOL).unwrap();
        let q = inverse_alpha(&p).unwrap();
        assert!((q.rho() - 0.5).abs() < 1e-15);
        let ci = c.inverse_alpha();
        assert_eq!((ci.k, ci.l), (-2, -1));
        assert!(ci.residual(q.alpha(), q.rho()) < 1e-14);
    }

    #[test]
    fn rational_parsing() {
        let r: RationalAlpha = "6/4".parse().unwrap();
        assert_eq!((r.m(), r.n()), (3, 2));
        assert!("5/2".parse::<RationalAlpha>().is_err());
        assert!("1.5".parse::<RationalAlpha>().is_err());
        assert!("0/3".parse::<RationalAlpha>().is_err());
    }
}
