//! Asymptotic expansions of the density at zero and at infinity for generic parameters.
//!
//! The double sums are graded by `g = m + alpha n` and cut into unit bands `[b, b+1)`.
//! The sum stops before the band of smallest total magnitude (optimal truncation), and
//! three times that band is reported as the error.

use super::{Region, SeriesKind, SeriesPlan, Truncation};
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::mellin::{a_coeff, b_coeff};
use crate::params::Parameters;
use crate::wiener_hopf::irrationality_diagnostic;

/// Largest grade included in the term table.
const MAX_GRADE: f64 = 40.0;

pub(super) struct Term {
    pub grade: f64,
    pub value: f64,
}

/// Terms `coef * x^e` (or their `x`-derivatives) sorted by grade.
pub(super) fn terms(params: &Parameters, x: f64, region: Region, order: u32) -> Result<Vec<Term>> {
    let (a, ar) = (params.alpha(), params.alpha_rho());
    if region == Region::LargeX && (a - 2.0).abs() < 1e-12 {
        return Err(Error::Domain(
            "the large-x expansion is degenerate at alpha = 2 (the tail is Gaussian)".into(),
        ));
    }
    if let Some((q, err)) = irrationality_diagnostic(a).failure() {
        return Err(Error::SmallDenominator {
            k: q as usize,
            size: err,
        });
    }
    let mut out = Vec::new();
    let mut cap = MAX_GRADE;
    let n_max = (MAX_GRADE / a).floor() as i64;
    for n in 0..=n_max {
        for m in 0..=MAX_GRADE as i64 {
            let grade = m as f64 + a * n as f64;
            if grade >= cap {
                break;
            }
            let (coef, e) = match region {
                Region::SmallX => (a_coeff(params, m, n), ar - 1.0 + grade),
                Region::LargeX => (b_coeff(params, m, n + 1), -1.0 - a - grade),
            };
            let coef = match coef {
                Ok(c) => c,
                Err(Error::SmallDenominator { .. }) => {
                    // coefficients from here on are unreliable; stop the table at this grade
                    cap = grade;
                    break;
                }
                Err(e) => return Err(e),
            };
            let value = if order == 0 {
                coef * x.powf(e)
            } else {
                coef * e * x.powf(e - 1.0)
            };
            out.push(Term { grade, value });
        }
    }
    out.retain(|t| t.grade < cap);
    out.sort_by(|p, q| p.grade.total_cmp(&q.grade));
    Ok(out)
}

/// Unit-band magnitudes `sum |t|` for `b = 0 .. floor(max grade)`.
pub(super) fn band_envelopes(terms: &[Term]) -> Vec<f64> {
    let top = terms
        .iter()
        .map(|t| t.grade.floor() as usize)
        .max()
        .unwrap_or(0);
    let mut env = vec![0.0; top + 1];
    for t in terms {
        env[t.grade.floor() as usize] += t.value.abs();
    }
    env
}

pub(super) fn asymptotic(
    params: &Parameters,
    x: f64,
    region: Region,
    order: u32,
) -> Result<(EvalResult, SeriesPlan)> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "the expansion needs finite x > 0, got {x}"
        )));
    }
    let terms = terms(params, x, region, order)?;
    let env = band_envelopes(&terms);
    // the last band may be incomplete, so it is never chosen as the cut
    let usable = env.len().saturating_sub(1);
    if usable < 2 {
        return Err(Error::Domain(
            "not enough coefficients for an expansion".into(),
        ));
    }
    let (cut, min_env) = (1..usable)
        .map(|b| (b, env[b]))
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty band range");
    let included: Vec<&Term> = terms.iter().filter(|t| t.grade < cut as f64).collect();
    let sum: f64 = included.iter().map(|t| t.value).sum();
    let rounding: f64 = included.iter().map(|t| t.value.abs()).sum::<f64>() * 16.0 * f64::EPSILON;
    let err = 3.0 * min_env + rounding;
    let method = match region {
        Region::SmallX => Method::AsymptoticSmall,
        Region::LargeX => Method::AsymptoticLarge,
    };
    let plan = SeriesPlan {
        region,
        kind: SeriesKind::Asymptotic,
        truncation: Truncation::Optimal { cap: cut as f64 },
        err_est: err,
        terms: included.len(),
        precision_bits: 53,
    };
    Ok((EvalResult::real(sum, err, included.len(), method), plan))
}

/// Sum over grades `< cap` with the magnitude of the band `[cap, cap + 1)`.
pub(super) fn truncated(
    params: &Parameters,
    x: f64,
    region: Region,
    cap: f64,
) -> Result<(f64, f64)> {
    let terms = terms(params, x, region, 0)?;
    let sum = terms
        .iter()
        .filter(|t| t.grade < cap)
        .map(|t| t.value)
        .sum();
    let next = terms
        .iter()
        .filter(|t| t.grade >= cap && t.grade < cap + 1.0)
        .map(|t| t.value.abs())
        .sum();
    Ok((sum, next))
}
