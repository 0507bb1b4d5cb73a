//! Inversion of the Mellin transform by the trapezoidal rule on vertical lines.
//!
//! `p(x) = (1/pi) Re int_0^inf M(c + it) x^{-c-it} dt` on `Re s = 1`. The distribution
//! function uses `x^{1-s}/(1-s)` on a line left of `1` and the survival function uses
//! `x^{1-s}/(s-1)` on a line right of `1`. The values of `M` on a line are computed once
//! and reused for every `x` in a range.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::mellin::{mellin, mellin_ckl, mellin_decay_rate};
use crate::params::{detect_ckl, Parameters, CKL_DEFAULT_TOL};

const MAX_NODES: usize = 200_000;
/// Fraction of the distance to the nearest pole used as the analyticity half-width.
const STRIP_SAFETY: f64 = 0.8;

/// Which formula supplies `M` on the contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MellinSource {
    /// Finite product when a `C(k,l)` certificate exists, double gamma otherwise.
    #[default]
    Auto,
    DoubleGamma,
}

fn m_evaluator(
    params: &Parameters,
    source: MellinSource,
) -> impl Fn(Complex64) -> Result<Complex64> + '_ {
    let ckl = match source {
        MellinSource::Auto => detect_ckl(params, params.rational(), CKL_DEFAULT_TOL),
        MellinSource::DoubleGamma => None,
    };
    move |s| match ckl {
        Some(c) => mellin_ckl(params, c, s).map(|r| r.value),
        None => mellin(params, s).map(|r| r.value),
    }
}

/// `M(c + i k h)`, `k = 0, 1, ...`, up to a height where the tail is negligible.
#[derive(Debug, Clone)]
struct Contour {
    c: f64,
    h: f64,
    d: f64,
    rate: f64,
    values: Vec<Complex64>,
}

impl Contour {
    /// `weight(t)` bounds the kernel (without `M`) at height `t` over the `x` range and
    /// `spread` is the largest `|ln x|`.
    fn build(
        eval: &dyn Fn(Complex64) -> Result<Complex64>,
        rate: f64,
        c: f64,
        d: f64,
        spread: f64,
        weight: &dyn Fn(f64) -> f64,
        tol: f64,
    ) -> Result<Self> {
        let w0 = weight(0.0).max(1e-300);
        let h = 2.0 * PI * d / ((100.0 * w0 / tol).ln().max(1.0) + d * spread);
        let t0 = 1.5 * (10.0 * w0 / (PI * rate * tol)).ln().max(1.0) / rate;
        let mut values = Vec::new();
        let mut small = 0;
        for k in 0..MAX_NODES {
            let t = k as f64 * h;
            let v = eval(Complex64::new(c, t))?;
            values.push(v);
            if t >= t0 && v.norm() * weight(t) / (PI * rate) < tol / 10.0 {
                small += 1;
                if small >= 2 {
                    return Ok(Contour {
                        c,
                        h,
                        d,
                        rate,
                        values,
                    });
                }
            } else {
                small = 0;
            }
        }
        Err(Error::Convergence {
            what: "Mellin inversion contour",
            iterations: MAX_NODES,
        })
    }

    /// `(1/pi) Re int_0^inf M(c + it) K(c + it) dt` with an error estimate from the tail,
    /// the halved-step comparison and rounding.
    fn integrate(&self, kernel: impl Fn(Complex64) -> Complex64) -> (f64, f64, usize) {
        let mut full = 0.0;
        let mut half = 0.0;
        let mut abs = 0.0;
        let mut last = 0.0;
        for (k, v) in self.values.iter().enumerate() {
            let f = v * kernel(Complex64::new(self.c, k as f64 * self.h));
            let w = if k == 0 { 0.5 } else { 1.0 };
            full += w * f.re;
            if k % 2 == 0 {
                half += w * f.re;
            }
            abs += f.norm();
            last = f.norm();
        }
        let full = full * self.h / PI;
        let half = half * 2.0 * self.h / PI;
        let disc = (full - half).abs() * (-PI * self.d / self.h).exp();
        let tail = last / (PI * self.rate);
        let rounding = 4.0 * f64::EPSILON * abs * self.h / PI;
        (full, disc + tail + rounding, self.values.len())
    }
}

fn check_range(x_lo: f64, x_hi: f64, tol: f64) -> Result<()> {
    if !(x_lo > 0.0 && x_lo <= x_hi && x_hi.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < x_lo <= x_hi < inf, got [{x_lo}, {x_hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Density by Mellin inversion on `Re s = 1` for `x` in a fixed range.
#[derive(Debug, Clone)]
pub struct PdfInverter {
    x_lo: f64,
    x_hi: f64,
    tol: f64,
    contour: Contour,
}

impl PdfInverter {
    pub fn new(
        params: &Parameters,
        x_lo: f64,
        x_hi: f64,
        tol: f64,
        source: MellinSource,
    ) -> Result<Self> {
        check_range(x_lo, x_hi, tol)?;
        let eval = m_evaluator(params, source);
        let d = STRIP_SAFETY * params.alpha_rho().min(params.alpha().min(1.0));
        let spread = x_lo.ln().abs().max(x_hi.ln().abs());
        // |x^{-1-it}| = 1/x, and one extra power for the derivative
        let w = 1.0 / x_lo;
        let weight = move |t: f64| w * (1.0 + t / x_lo);
        let contour = Contour::build(
            &eval,
            mellin_decay_rate(params),
            1.0,
            d,
            spread,
            &weight,
            tol,
        )?;
        Ok(PdfInverter {
            x_lo,
            x_hi,
            tol,
            contour,
        })
    }

    fn check(&self, x: f64) -> Result<()> {
        if x < self.x_lo * (1.0 - 1e-12) || x > self.x_hi * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "x = {x} outside the prepared range [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        Ok(())
    }

    fn finish(&self, v: f64, err: f64, nodes: usize) -> Result<EvalResult> {
        if !(err <= 10.0 * self.tol) {
            return Err(Error::Accuracy {
                achieved: err,
                requested: self.tol,
            });
        }
        Ok(EvalResult::real(v, err, nodes, Method::MellinInversion))
    }

    pub fn pdf(&self, x: f64) -> Result<EvalResult> {
        self.check(x)?;
        let lnx = x.ln();
        let (v, err, nodes) = self.contour.integrate(|s| (-s * lnx).exp());
        self.finish(v, err, nodes)
    }

    /// `p'(x)` from the kernel `-s x^{-s-1}`.
    pub fn pdf_derivative(&self, x: f64) -> Result<EvalResult> {
        self.check(x)?;
        let lnx = x.ln();
        let (v, err, nodes) = self.contour.integrate(|s| -s * (-(s + 1.0) * lnx).exp());
        self.finish(v, err, nodes)
    }
}

/// Distribution function by Mellin inversion: `P(S <= x)` on a line left of `1` for
/// `x <= 1` and `P(S > x)` on a line right of `1` for `x > 1`.
#[derive(Debug, Clone)]
pub struct CdfInverter {
    x_lo: f64,
    x_hi: f64,
    tol: f64,
    left: Option<Contour>,
    right: Option<Contour>,
}

impl CdfInverter {
    pub fn new(
        params: &Parameters,
        x_lo: f64,
        x_hi: f64,
        tol: f64,
        source: MellinSource,
    ) -> Result<Self> {
        check_range(x_lo, x_hi, tol)?;
        let eval = m_evaluator(params, source);
        let rate = mellin_decay_rate(params);
        let ar = params.alpha_rho();
        let left = if x_lo <= 1.0 {
            let c = 1.0 - ar / 2.0;
            let d = STRIP_SAFETY * ar / 2.0;
            // |x^{1-s}/(1-s)| <= 1 / |1 - s| for x <= 1
            let weight = move |t: f64| 1.0 / (1.0 - c).hypot(t);
            Some(Contour::build(
                &eval,
                rate,
                c,
                d,
                x_lo.ln().abs(),
                &weight,
                tol,
            )?)
        } else {
            None
        };
        let right = if x_hi > 1.0 {
            let mu = params.alpha().min(1.0);
            let c = 1.0 + mu / 2.0;
            let d = STRIP_SAFETY * mu / 2.0;
            let x0 = x_lo.max(1.0);
            let weight = move |t: f64| x0.powf(1.0 - c) / (c - 1.0).hypot(t);
            Some(Contour::build(&eval, rate, c, d, x_hi.ln(), &weight, tol)?)
        } else {
            None
        };
        Ok(CdfInverter {
            x_lo,
            x_hi,
            tol,
            left,
            right,
        })
    }

    pub fn cdf(&self, x: f64) -> Result<EvalResult> {
        if x < self.x_lo * (1.0 - 1e-12) || x > self.x_hi * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "x = {x} outside the prepared range [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        let lnx = x.ln();
        let kernel = |s: Complex64| ((1.0 - s) * lnx).exp();
        let (v, err, nodes) = match (&self.left, &self.right) {
            (Some(c), _) if x <= 1.0 => c.integrate(|s| kernel(s) / (1.0 - s)),
            (_, Some(c)) => {
                let (v, e, n) = c.integrate(|s| kernel(s) / (s - 1.0));
                (1.0 - v, e, n)
            }
            _ => unreachable!("range check covers both sides"),
        };
        if !(err <= 10.0 * self.tol) {
            return Err(Error::Accuracy {
                achieved: err,
                requested: self.tol,
            });
        }
        Ok(EvalResult::real(
            v.clamp(0.0, 1.0),
            err,
            nodes,
            Method::MellinInversion,
        ))
    }
}
