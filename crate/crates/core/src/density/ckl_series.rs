//! Convergent density series for a process in `C(k,l)`.
//!
//! Each series is a finite number of lines, one index fixed and the other running to
//! infinity. The terms grow before they decay super-exponentially, and for large
//! arguments the peak term exceeds the sum by hundreds of orders of magnitude. A first
//! pass in `f64` logarithms fixes the truncation and the size of the peak; if the
//! plain `f64` sum cannot be trusted, the same terms are summed again in MPFR with
//! enough bits to absorb the cancellation.

use std::collections::{HashMap, VecDeque};

use rug::float::Constant;
use rug::Float;

use super::{Region, SeriesKind, SeriesPlan, Truncation};
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::mellin::residues::{ln_c, AlphaRepr};
use crate::params::{CklClass, Parameters};

const MAX_TERMS: usize = 100_000;
/// A line with no non-zero term among its first indices is identically zero.
const ZERO_RUN: usize = 1000;
/// Terms below `exp(LN_NEGLIGIBLE)` past the peak end a line.
const LN_NEGLIGIBLE: f64 = -50.0;
const MAX_BITS: u32 = 32_768;

#[derive(Debug, Clone, Copy)]
struct Line {
    outer: i64,
    start: i64,
    dir: i64,
    /// The running index is `m` (otherwise `n`).
    inner_is_m: bool,
}

impl Line {
    fn mn(&self, i: usize) -> (i64, i64) {
        let inner = self.start + self.dir * i as i64;
        if self.inner_is_m {
            (inner, self.outer)
        } else {
            (self.outer, inner)
        }
    }
}

fn lines(alpha: f64, ckl: CklClass) -> (Vec<Line>, f64) {
    let (k, l) = (ckl.k, ckl.l);
    let line = |outer, start, dir, inner_is_m| Line {
        outer,
        start,
        dir,
        inner_is_m,
    };
    if alpha > 1.0 {
        if l > 0 {
            ((0..=k).map(|n| line(n, -l, -1, true)).collect(), 1.0)
        } else {
            ((1..=-l).map(|m| line(m, k, -1, false)).collect(), 1.0)
        }
    } else if l > 0 {
        ((1..=k).map(|n| line(n, 0, 1, true)).collect(), -1.0)
    } else {
        ((0..=-l).map(|m| line(m, 1, 1, false)).collect(), -1.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    index: usize,
    ln: f64,
    sign: f64,
    /// Magnitude of the logarithms combined in the term.
    scale: f64,
}

struct Scan {
    terms: Vec<Term>,
    len: usize,
    tail: f64,
}

/// Exponent `-m - alpha n - 1` of `x`.
fn exponent(alpha: &AlphaRepr, m: i64, n: i64) -> f64 {
    alpha.shift_times(-1 - m, -n).0
}

fn scan_line(alpha: &AlphaRepr, ckl: CklClass, line: Line, lnx: f64, order: u32) -> Result<Scan> {
    let mut terms = Vec::new();
    let mut l_max = f64::NEG_INFINITY;
    for i in 0..MAX_TERMS {
        let (m, n) = line.mn(i);
        let (lc, sc, scale) = ln_c(alpha, ckl, m, n)?;
        if sc == 0.0 {
            if terms.is_empty() && i >= ZERO_RUN {
                return Ok(Scan {
                    terms,
                    len: i,
                    tail: 0.0,
                });
            }
            continue;
        }
        let e = exponent(alpha, m, n);
        let (ln, sign) = if order == 0 {
            (lc + e * lnx, sc)
        } else {
            if e == 0.0 {
                continue;
            }
            (lc + e.abs().ln() + (e - 1.0) * lnx, sc * e.signum())
        };
        if ln < l_max - 46.0 && ln < LN_NEGLIGIBLE {
            return Ok(Scan {
                terms,
                len: i,
                tail: 2.0 * ln.exp(),
            });
        }
        l_max = l_max.max(ln);
        terms.push(Term {
            index: i,
            ln,
            sign,
            scale: scale + (e * lnx).abs() + ln.abs(),
        });
    }
    Err(Error::Convergence {
        what: "C(k,l) density series",
        iterations: MAX_TERMS,
    })
}

/// `p(x)` (order 0) or `p'(x)` (order 1) from the convergent series.
pub(super) fn ckl_series(
    params: &Parameters,
    ckl: CklClass,
    x: f64,
    order: u32,
) -> Result<(EvalResult, SeriesPlan)> {
    let a = params.alpha();
    let resid = ckl.residual(a, params.rho());
    if resid > 1e-8 {
        return Err(Error::Domain(format!(
            "{ckl} is not a certificate for {params} (residual {resid:e})"
        )));
    }
    if ckl.l == 0 {
        return Err(Error::Domain(format!("{ckl} has l = 0")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!(
            "the series needs finite x > 0, got {x}"
        )));
    }
    let alpha = match params.rational() {
        Some(ra) => AlphaRepr {
            value: a,
            frac: Some((ra.m() as i64, ra.n() as i64)),
        },
        None => AlphaRepr::new(a),
    };
    let (lines, overall) = lines(a, ckl);
    let lnx = x.ln();
    let mut scans = Vec::with_capacity(lines.len());
    for &line in &lines {
        scans.push(scan_line(&alpha, ckl, line, lnx, order)?);
    }
    let l_max = scans
        .iter()
        .flat_map(|s| s.terms.iter().map(|t| t.ln))
        .fold(f64::NEG_INFINITY, f64::max);
    let count: usize = scans.iter().map(|s| s.terms.len()).sum();
    let tail: f64 = scans.iter().map(|s| s.tail).sum();
    let (mut m_cap, mut n_cap) = (0i64, 0i64);
    for (line, scan) in lines.iter().zip(&scans) {
        let (m, n) = line.mn(scan.len.saturating_sub(1));
        m_cap = m_cap.max(m.abs());
        n_cap = n_cap.max(n.abs());
    }
    let plan = |err_est: f64, bits: u32| SeriesPlan {
        region: if a > 1.0 {
            Region::SmallX
        } else {
            Region::LargeX
        },
        kind: SeriesKind::Convergent,
        truncation: Truncation::IndexCap { m: m_cap, n: n_cap },
        err_est,
        terms: count,
        precision_bits: bits,
    };

    if l_max < 600.0 {
        let mut sum = 0.0;
        let mut rounding = 0.0;
        for t in scans.iter().flat_map(|s| &s.terms) {
            let v = t.ln.exp();
            sum += t.sign * v;
            rounding += v * 8.0 * f64::EPSILON * (1.0 + t.scale);
        }
        let err = rounding + tail + f64::EPSILON * sum.abs();
        if err <= 1e-12 * sum.abs() || count == 0 {
            let r = EvalResult::real(overall * sum, err, count, Method::CklConvergent);
            return Ok((r, plan(err, 53)));
        }
    }

    let extra = (count.max(1) as f64).log2().ceil() as u32;
    let bits = 128 + (l_max.max(0.0) / std::f64::consts::LN_2).ceil() as u32 + extra;
    if bits > MAX_BITS {
        return Err(Error::Accuracy {
            achieved: f64::INFINITY,
            requested: 1e-12,
        });
    }
    let mut mp = MpSeries::new(&alpha, bits, x);
    let mut sum = Float::with_val(bits, 0);
    for (line, scan) in lines.iter().zip(&scans) {
        mp.add_line(ckl, *line, scan, order, &mut sum);
    }
    let value = overall * sum.to_f64();
    let rounding = count as f64 * (l_max - (bits - 8) as f64 * std::f64::consts::LN_2).exp();
    let err = tail + rounding + f64::EPSILON * value.abs();
    let r = EvalResult::real(value, err, count, Method::CklConvergent);
    Ok((r, plan(err, bits)))
}

/// Reciprocal gamma along an arithmetic progression of arguments. When the step is a
/// rational `P/Q`, the value `Q` places back is reused through the functional equation.
struct RgammaRun {
    period: Option<(usize, i64)>,
    hist: VecDeque<(Float, Float, bool)>,
}

impl RgammaRun {
    fn new(period: Option<(usize, i64)>) -> Self {
        RgammaRun {
            period,
            hist: VecDeque::new(),
        }
    }

    fn next(&mut self, arg: Float, pole: bool) -> Float {
        let prec = arg.prec();
        let val = if pole {
            Float::with_val(prec, 0)
        } else {
            self.recurse()
                .unwrap_or_else(|| Float::with_val(prec, arg.gamma_ref()).recip())
        };
        if let Some((q, _)) = self.period {
            self.hist.push_back((arg, val.clone(), pole));
            if self.hist.len() > q {
                self.hist.pop_front();
            }
        }
        val
    }

    fn recurse(&self) -> Option<Float> {
        let (q, p) = self.period?;
        if self.hist.len() < q {
            return None;
        }
        let (z, v, pole) = &self.hist[0];
        if *pole {
            return None;
        }
        let mut out = v.clone();
        if p > 0 {
            let mut d = z.clone();
            for t in 0..p {
                let f = Float::with_val(z.prec(), z + t);
                if f.is_zero() {
                    return None;
                }
                if t > 0 {
                    d *= &f;
                }
            }
            out /= &d;
        } else {
            for t in 1..=-p {
                out *= Float::with_val(z.prec(), z - t);
            }
        }
        Some(out)
    }
}

struct MpSeries {
    alpha: AlphaRepr,
    prec: u32,
    pi: Float,
    x: Float,
    ln_x: Float,
    sines: HashMap<(i64, i64), Float>,
}

impl MpSeries {
    fn new(alpha: &AlphaRepr, prec: u32, x: f64) -> Self {
        let x = Float::with_val(prec, x);
        let ln_x = Float::with_val(prec, x.ln_ref());
        MpSeries {
            alpha: *alpha,
            prec,
            pi: Float::with_val(prec, Constant::Pi),
            x,
            ln_x,
            sines: HashMap::new(),
        }
    }

    fn alpha_f(&self) -> Float {
        match self.alpha.frac {
            Some((p, q)) => Float::with_val(self.prec, p) / q,
            None => Float::with_val(self.prec, self.alpha.value),
        }
    }

    /// `a + i / alpha` with an exact-integer flag.
    fn shift_over(&self, a: i64, i: i64) -> (Float, bool) {
        match self.alpha.frac {
            Some((p, q)) => {
                let num = a * p + i * q;
                (Float::with_val(self.prec, num) / p, num % p == 0)
            }
            None => (Float::with_val(self.prec, i) / self.alpha.value + a, i == 0),
        }
    }

    /// `a + i alpha` with an exact-integer flag.
    fn shift_times(&self, a: i64, i: i64) -> (Float, bool) {
        match self.alpha.frac {
            Some((p, q)) => {
                let num = a * q + i * p;
                (Float::with_val(self.prec, num) / q, num % q == 0)
            }
            None => (Float::with_val(self.prec, i) * self.alpha.value + a, i == 0),
        }
    }

    /// `sin(pi num / den)` with exact reduction.
    fn sin_fraction(&mut self, num: i64, den: i64) -> Float {
        let r = num.rem_euclid(2 * den);
        if r % den == 0 {
            return Float::with_val(self.prec, 0);
        }
        let (pi, prec) = (&self.pi, self.prec);
        self.sines
            .entry((r, den))
            .or_insert_with(|| (Float::with_val(prec, pi * r) / den).sin())
            .clone()
    }

    fn sin_over(&mut self, i: i64) -> Float {
        match self.alpha.frac {
            Some((p, q)) => self.sin_fraction(i * q, p),
            None => (self.pi.clone() * i / self.alpha.value).sin(),
        }
    }

    fn sin_times(&mut self, i: i64) -> Float {
        match self.alpha.frac {
            Some((p, q)) => self.sin_fraction(i * p, q),
            None => (self.pi.clone() * i * self.alpha.value).sin(),
        }
    }

    /// Period `(Q, P)` of an argument progression with step `d / alpha` or `d alpha`.
    fn period(&self, d: i64, over: bool) -> Option<(usize, i64)> {
        let (p, q) = self.alpha.frac?;
        Some(if over {
            (p as usize, d * q)
        } else {
            (q as usize, d * p)
        })
    }

    fn add_line(&mut self, ckl: CklClass, line: Line, scan: &Scan, order: u32, sum: &mut Float) {
        if scan.terms.is_empty() {
            return;
        }
        let (k, l) = (ckl.k, ckl.l);
        let plus = l > 0;
        let d = line.dir;
        // steps of the two gamma arguments 1 + n + m/alpha and -m - alpha n
        let (mut rg1, mut rg2) = if line.inner_is_m {
            (
                RgammaRun::new(self.period(d, true)),
                RgammaRun::new(Some((1, -d))),
            )
        } else {
            (
                RgammaRun::new(Some((1, d))),
                RgammaRun::new(self.period(-d, false)),
            )
        };
        let (m0, n0) = line.mn(0);
        let (e0, _) = self.shift_times(-1 - m0, -n0);
        let mut xe = Float::with_val(self.prec, &self.ln_x * &e0).exp();
        // x^{-d} or x^{-d alpha}
        let step = if !line.inner_is_m {
            let s = Float::with_val(self.prec, -d) * self.alpha_f();
            Float::with_val(self.prec, &self.ln_x * &s).exp()
        } else if d < 0 {
            self.x.clone()
        } else {
            Float::with_val(self.prec, self.x.recip_ref())
        };
        let mut next = scan.terms.iter().peekable();
        for i in 0..scan.len {
            if i > 0 {
                xe *= &step;
            }
            let (m, n) = line.mn(i);
            let (a1, p1) = self.shift_over(1 + n, m);
            let (a2, p2) = self.shift_times(-m, -n);
            let pole1 = p1 && a1 <= 0;
            let pole2 = p2 && a2 <= 0;
            let g1 = rg1.next(a1, pole1);
            let g2 = rg2.next(a2, pole2);
            if next.peek().map(|t| t.index) != Some(i) {
                continue;
            }
            let t = next.next().expect("peeked");
            let mut c = Float::with_val(self.prec, &g1 * &g2);
            let e = if plus {
                m * (k + 1) + n * l + 1
            } else {
                m * k + n * (l + 1) + 1
            };
            if e.rem_euclid(2) == 1 {
                c = -c;
            }
            if plus {
                for j in 1..l {
                    c *= self.sin_over(j + m);
                    c /= self.sin_over(j);
                }
                for j in 1..=k - n {
                    c *= self.sin_times(j + n);
                    c /= self.sin_times(j);
                }
            } else {
                for j in 1..-k {
                    c *= self.sin_times(j + n);
                    c /= self.sin_times(j);
                }
                for j in 1..=-l - m {
                    c *= self.sin_over(j + m);
                    c /= self.sin_over(j);
                }
            }
            c *= &xe;
            if order == 1 {
                let (ex, _) = self.shift_times(-1 - m, -n);
                c *= ex;
                c /= &self.x;
            }
            debug_assert!(t.sign != 0.0);
            *sum += c;
        }
    }
}
