//! Density and distribution function of the supremum `S_1`.
//!
//! [`pdf`] picks between the convergent series of the classes `C(k,l)`, the asymptotic
//! expansions at zero and infinity, and numerical Mellin inversion.

mod asymptotic;
mod ckl_series;
mod inversion;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::params::{detect_ckl, CklClass, Parameters, CKL_DEFAULT_TOL};
use crate::specfun::gamma::rgamma_real;

pub use inversion::{CdfInverter, MellinSource, PdfInverter};

/// Absolute tolerance of the Mellin inversion used by [`pdf`] and [`cdf`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Series values are accepted by [`pdf`] when their error estimate is below this.
pub const SERIES_ACCEPT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    SmallX,
    LargeX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Convergent,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Largest `|m|`, `|n|` reached on any line of a convergent series.
    IndexCap { m: i64, n: i64 },
    /// Terms with `m + alpha n < cap` (cap at the band of smallest magnitude).
    Optimal { cap: f64 },
}

/// How a series value was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPlan {
    pub region: Region,
    pub kind: SeriesKind,
    pub truncation: Truncation,
    /// Tail bound (convergent) or three times the first omitted band (asymptotic).
    pub err_est: f64,
    pub terms: usize,
    /// 53 for plain `f64` summation, otherwise the MPFR precision used.
    pub precision_bits: u32,
}

/// Density values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub x_grid: Vec<f64>,
    pub p_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub errs: Vec<f64>,
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "x must be finite and positive, got {x}"
        )))
    }
}

/// `p(0+)`: finite only when `alpha rho = 1`, where it equals `1 / Gamma(1 - rho)`.
fn pdf_at_zero(params: &Parameters) -> Result<EvalResult> {
    if (params.alpha_rho() - 1.0).abs() < 1e-12 {
        let v = rgamma_real(1.0 - params.rho());
        Ok(EvalResult::real(
            v,
            4.0 * f64::EPSILON * v,
            1,
            Method::Direct,
        ))
    } else {
        Err(Error::Domain(format!(
            "the density behaves like x^{} at 0 and is unbounded",
            params.alpha_rho() - 1.0
        )))
    }
}

/// Series value when one applies with error below [`SERIES_ACCEPT`].
fn pdf_by_series(params: &Parameters, x: f64, order: u32) -> Option<EvalResult> {
    if let Some(ckl) = detect_ckl(params, params.rational(), CKL_DEFAULT_TOL) {
        return ckl_series::ckl_series(params, ckl, x, order)
            .ok()
            .map(|(r, _)| r)
            .filter(|r| r.abs_err < SERIES_ACCEPT);
    }
    [Region::SmallX, Region::LargeX]
        .into_iter()
        .filter_map(|region| asymptotic::asymptotic(params, x, region, order).ok())
        .map(|(r, _)| r)
        .filter(|r| r.abs_err < SERIES_ACCEPT)
        .min_by(|p, q| p.abs_err.total_cmp(&q.abs_err))
}

/// Density `p(x)` of `S_1`.
///
/// Uses the convergent series for `C(k,l)`, otherwise an asymptotic expansion when its
/// error estimate is below `1e-8`, otherwise Mellin inversion with tolerance `1e-10`.
/// At `x = 0` the limit is returned when it is finite.
pub fn pdf(params: &Parameters, x: f64) -> Result<EvalResult> {
    if x == 0.0 {
        return pdf_at_zero(params);
    }
    check_x(x)?;
    match pdf_by_series(params, x, 0) {
        Some(r) => Ok(r),
        None => pdf_mellin_inversion(params, x, DEFAULT_TOL),
    }
}

/// `p'(x)`, by term-wise differentiation of the active series or of the inversion kernel.
pub fn pdf_derivative(params: &Parameters, x: f64) -> Result<EvalResult> {
    check_x(x)?;
    match pdf_by_series(params, x, 1) {
        Some(r) => Ok(r),
        None => PdfInverter::new(params, x, x, DEFAULT_TOL, MellinSource::Auto)?.pdf_derivative(x),
    }
}

/// Small-`x` expansion `x^{alpha rho - 1} sum a(m,n) x^{m + alpha n}`, optimally truncated.
pub fn pdf_asymptotic_small_x(params: &Parameters, x: f64) -> Result<EvalResult> {
    pdf_asymptotic_small_x_planned(params, x).map(|(r, _)| r)
}

pub fn pdf_asymptotic_small_x_planned(
    params: &Parameters,
    x: f64,
) -> Result<(EvalResult, SeriesPlan)> {
    asymptotic::asymptotic(params, x, Region::SmallX, 0)
}

/// Large-`x` expansion `x^{-1-alpha} sum b(m,n+1) x^{-m - alpha n}`, optimally truncated.
/// Refused at `alpha = 2`.
pub fn pdf_asymptotic_large_x(params: &Parameters, x: f64) -> Result<EvalResult> {
    pdf_asymptotic_large_x_planned(params, x).map(|(r, _)| r)
}

pub fn pdf_asymptotic_large_x_planned(
    params: &Parameters,
    x: f64,
) -> Result<(EvalResult, SeriesPlan)> {
    asymptotic::asymptotic(params, x, Region::LargeX, 0)
}

/// Partial sum of an expansion over grades `m + alpha n < cap`, with the magnitude of the
/// next unit band.
pub fn pdf_asymptotic_truncated(
    params: &Parameters,
    x: f64,
    region: Region,
    cap: f64,
) -> Result<(f64, f64)> {
    check_x(x)?;
    asymptotic::truncated(params, x, region, cap)
}

/// Convergent series for a process in `C(k,l)`.
pub fn pdf_ckl_series(params: &Parameters, ckl: CklClass, x: f64) -> Result<EvalResult> {
    pdf_ckl_series_planned(params, ckl, x).map(|(r, _)| r)
}

pub fn pdf_ckl_series_planned(
    params: &Parameters,
    ckl: CklClass,
    x: f64,
) -> Result<(EvalResult, SeriesPlan)> {
    ckl_series::ckl_series(params, ckl, x, 0)
}

/// Mellin inversion on `Re s = 1` with absolute tolerance `tol`.
pub fn pdf_mellin_inversion(params: &Parameters, x: f64, tol: f64) -> Result<EvalResult> {
    check_x(x)?;
    PdfInverter::new(params, x, x, tol, MellinSource::Auto)?.pdf(x)
}

/// `P(S_1 <= x)`.
pub fn cdf(params: &Parameters, x: f64) -> Result<EvalResult> {
    cdf_with_tol(params, x, DEFAULT_TOL)
}

pub fn cdf_with_tol(params: &Parameters, x: f64, tol: f64) -> Result<EvalResult> {
    if x == 0.0 {
        return Ok(EvalResult::real(0.0, 0.0, 0, Method::Direct));
    }
    if x == f64::INFINITY {
        return Ok(EvalResult::real(1.0, 0.0, 0, Method::Direct));
    }
    check_x(x)?;
    CdfInverter::new(params, x, x, tol, MellinSource::Auto)?.cdf(x)
}

/// Density of `S_t = t^{1/alpha} S_1` at `x`.
pub fn pdf_at_time(params: &Parameters, t: f64, x: f64) -> Result<EvalResult> {
    let c = time_scale(params, t)?;
    let r = pdf(params, x / c)?;
    Ok(EvalResult::real(r.re() / c, r.abs_err / c, r.terms, r.method).flagged(r.near_singular))
}

/// `P(S_t <= x)`.
pub fn cdf_at_time(params: &Parameters, t: f64, x: f64) -> Result<EvalResult> {
    cdf(params, x / time_scale(params, t)?)
}

fn time_scale(params: &Parameters, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    Ok(t.powf(1.0 / params.alpha()))
}

/// [`pdf`] on a grid, in parallel. Points that need Mellin inversion share one contour.
pub fn density_profile(params: &Parameters, xs: &[f64]) -> Result<DensityProfile> {
    for &x in xs {
        check_x(x)?;
    }
    let series: Vec<Option<EvalResult>> = xs
        .par_iter()
        .map(|&x| pdf_by_series(params, x, 0))
        .collect();
    let rest: Vec<f64> = xs
        .iter()
        .zip(&series)
        .filter(|(_, s)| s.is_none())
        .map(|(&x, _)| x)
        .collect();
    let inverter = if rest.is_empty() {
        None
    } else {
        let lo = rest.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rest.iter().copied().fold(0.0, f64::max);
        Some(PdfInverter::new(
            params,
            lo,
            hi,
            DEFAULT_TOL,
            MellinSource::Auto,
        )?)
    };
    let results: Vec<EvalResult> = xs
        .par_iter()
        .zip(series.into_par_iter())
        .map(|(&x, s)| match s {
            Some(r) => Ok(r),
            None => inverter
                .as_ref()
                .expect("built for the remaining points")
                .pdf(x),
        })
        .collect::<Result<_>>()?;
    let mut p_values = Vec::with_capacity(xs.len());
    for (r, &x) in results.iter().zip(xs) {
        let v = r.re();
        if v < -r.abs_err.max(1e-300) {
            return Err(Error::Domain(format!(
                "negative density {v:e} at x = {x} (error estimate {:e})",
                r.abs_err
            )));
        }
        p_values.push(v.max(0.0));
    }
    Ok(DensityProfile {
        x_grid: xs.to_vec(),
        p_values,
        methods: results.iter().map(|r| r.method).collect(),
        errs: results.iter().map(|r| r.abs_err).collect(),
    })
}

/// Outcome of [`conjecture_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConjectureVerdict {
    ApparentlyConvergent,
    ApparentlyDivergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    /// Magnitude of each unit band `[b, b+1)` of the expansion at `x`.
    pub band_envelopes: Vec<f64>,
    /// Partial sums over grades `< b + 1`.
    pub partial_sums: Vec<f64>,
    pub verdict: ConjectureVerdict,
}

/// Experimental: looks at the band magnitudes of an expansion far beyond the optimal cut
/// to see whether the full series appears to converge at `x`. Not used for values.
pub fn conjecture_probe(params: &Parameters, x: f64, region: Region) -> Result<ConjectureReport> {
    check_x(x)?;
    let terms = asymptotic::terms(params, x, region, 0)?;
    let mut env = asymptotic::band_envelopes(&terms);
    env.pop();
    let mut partial_sums = Vec::with_capacity(env.len());
    for b in 0..env.len() {
        partial_sums.push(
            terms
                .iter()
                .filter(|t| t.grade < (b + 1) as f64)
                .map(|t| t.value)
                .sum(),
        );
    }
    let tail = &env[env.len().saturating_sub(6)..];
    let scale = partial_sums
        .last()
        .map_or(1.0, |s: &f64| s.abs().max(1e-300));
    let verdict = if tail.windows(2).all(|w| w[1] <= w[0])
        && tail.last().is_some_and(|&e| e < 1e-12 * scale)
    {
        ConjectureVerdict::ApparentlyConvergent
    } else if tail.windows(2).all(|w| w[1] > w[0]) {
        ConjectureVerdict::ApparentlyDivergent
    } else {
        ConjectureVerdict::Inconclusive
    };
    Ok(ConjectureReport {
        band_envelopes: env,
        partial_sums,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use std::f64::consts::PI;

    #[test]
    fn brownian_at_zero_and_one() {
        let p = make_params(2.0, 0.5).unwrap();
        assert!((pdf(&p, 0.0).unwrap().re() - 1.0 / PI.sqrt()).abs() < 1e-15);
        let want = (-0.25f64).exp() / PI.sqrt();
        assert!((pdf(&p, 1.0).unwrap().re() - want).abs() < 1e-12);
        let r = pdf_mellin_inversion(&p, 1.0, 1e-10).unwrap();
        assert!((r.re() - want).abs() < 1e-9, "{}", r.re());
    }

    #[test]
    fn unbounded_at_zero() {
        let p = make_params(1.5, 0.5).unwrap();
        assert!(matches!(pdf(&p, 0.0), Err(Error::Domain(_))));
        assert!(pdf(&p, -1.0).is_err());
    }

    #[test]
    fn brownian_cdf() {
        let p = make_params(2.0, 0.5).unwrap();
        let v = cdf(&p, 1.0).unwrap().re();
        assert!((v - 0.520_499_877_813_046_5).abs() < 1e-9, "{v}");
        let v = cdf(&p, 3.0).unwrap().re();
        assert!((v - 0.966_105_146_475_310_7).abs() < 1e-9, "{v}");
    }

    #[test]
    fn large_x_refused_for_brownian() {
        let p = make_params(2.0, 0.5).unwrap();
        assert!(matches!(
            pdf_asymptotic_large_x(&p, 5.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn leading_small_x_coefficient() {
        let p = make_params(2f64.sqrt(), 0.45).unwrap();
        let x = 1e-6;
        let (r, plan) = pdf_asymptotic_small_x_planned(&p, x).unwrap();
        let a00 = crate::mellin::a_coeff(&p, 0, 0).unwrap();
        assert!((r.re() / x.powf(p.alpha_rho() - 1.0) / a00 - 1.0).abs() < 1e-5);
        assert_eq!(plan.kind, SeriesKind::Asymptotic);
    }
}
