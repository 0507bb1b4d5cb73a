//! Double-exponential quadrature for smooth, exponentially decaying integrands.
//!
//! Finite intervals use the tanh-sinh map, half-lines the exp-sinh map and the real line
//! is split at the origin into two half-lines. Levels are refined by halving the step;
//! the error estimate comes from the last two levels.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_err: f64,
    pub nodes: usize,
}

/// Tuning knobs; the defaults suit analytic integrands.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_level: u32,
    /// Contributions below this fraction of the running sum are treated as negligible.
    pub negligible: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_level: 9,
            negligible: 1e-18,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy)]
enum Map {
    /// tanh-sinh onto (c - r, c + r)
    Interval { c: f64, r: f64 },
    /// exp-sinh onto (a, inf) when `sign = 1`, onto (-inf, a) when `sign = -1`
    HalfLine { a: f64, sign: f64 },
}

impl Map {
    fn t_max(&self) -> f64 {
        match self {
            Map::Interval { .. } => 3.2,
            Map::HalfLine { .. } => 4.3,
        }
    }

    fn node(&self, t: f64) -> (f64, f64) {
        match *self {
            Map::Interval { c, r } => {
                let u = FRAC_PI_2 * t.sinh();
                let ch = u.cosh();
                (c + r * u.tanh(), r * FRAC_PI_2 * t.cosh() / (ch * ch))
            }
            Map::HalfLine { a, sign } => {
                let e = (FRAC_PI_2 * t.sinh()).exp();
                (a + sign * e, e * FRAC_PI_2 * t.cosh())
            }
        }
    }
}

fn run<F: FnMut(f64) -> Complex64>(map: Map, f: &mut F, opts: &QuadOptions) -> Result<QuadResult> {
    let t_max = map.t_max();
    let mut nodes = 0usize;
    let mut eval = |t: f64, nodes: &mut usize| -> Result<Complex64> {
        let (x, w) = map.node(t);
        if w == 0.0 || !x.is_finite() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        *nodes += 1;
        let v = f(x) * w;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Quadrature(format!(
                "non-finite integrand at x = {x:e}"
            )));
        }
        Ok(v)
    };

    // level 0: unit step over the whole window
    let mut h = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let n0 = t_max.floor() as i64;
    for j in -n0..=n0 {
        sum += eval(j as f64, &mut nodes)?;
    }
    let mut estimate = sum * h;
    let mut prev_diff = f64::INFINITY;
    let mut err = f64::INFINITY;

    for level in 1..=opts.max_level {
        h *= 0.5;
        let scale = estimate.norm().max(1e-300);
        let mut add = Complex64::new(0.0, 0.0);
        // odd multiples of h, walking outward on each side until negligible
        for side in [1.0, -1.0] {
            let mut small = 0;
            let mut k = 1i64;
            loop {
                let t = side * k as f64 * h;
                if t.abs() > t_max {
                    break;
                }
                let v = eval(t, &mut nodes)?;
                add += v;
                if v.norm() * h < opts.negligible * scale {
                    small += 1;
                    if small >= 4 {
                        break;
                    }
                } else {
                    small = 0;
                }
                k += 2;
            }
        }
        sum += add;
        let new = sum * h;
        let diff = (new - estimate).norm();
        estimate = new;
        // once the quadratic convergence regime is visible, extrapolate the error
        err = if level >= 3 && diff < 0.1 * prev_diff {
            diff * diff / prev_diff
        } else {
            diff
        };
        err = err.max(4.0 * f64::EPSILON * estimate.norm());
        prev_diff = diff;
        if level >= 3 && err <= opts.abs_tol.max(opts.rel_tol * estimate.norm()) {
            return Ok(QuadResult {
                value: estimate,
                abs_err: err,
                nodes,
            });
        }
    }
    if err <= 1e3 * opts.abs_tol.max(opts.rel_tol * estimate.norm()) {
        return Ok(QuadResult {
            value: estimate,
            abs_err: err,
            nodes,
        });
    }
    Err(Error::Quadrature(format!(
        "no convergence after {} levels (error estimate {err:e})",
        opts.max_level
    )))
}

/// `int_a^b f(x) dx` by tanh-sinh.
pub fn integrate_interval<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            nodes: 0,
        });
    }
    run(
        Map::Interval {
            c: 0.5 * (a + b),
            r: 0.5 * (b - a),
        },
        &mut f,
        opts,
    )
}

/// `int_a^inf f(x) dx` by exp-sinh.
pub fn integrate_half_line<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    run(Map::HalfLine { a, sign: 1.0 }, &mut f, opts)
}

/// `int_R f(x) dx`, split at `center`.
pub fn integrate_real_line<F: FnMut(f64) -> Complex64>(
    mut f: F,
    center: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let right = run(
        Map::HalfLine {
            a: center,
            sign: 1.0,
        },
        &mut f,
        opts,
    )?;
    let left = run(
        Map::HalfLine {
            a: center,
            sign: -1.0,
        },
        &mut f,
        opts,
    )?;
    Ok(QuadResult {
        value: right.value + left.value,
        abs_err: right.abs_err + left.abs_err,
        nodes: right.nodes + left.nodes,
    })
}
