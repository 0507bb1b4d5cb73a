//! Products of gamma, sine and Barnes factors with arguments linear in `s`.
//!
//! The zero/pole order at a point is read off from the factor lattices, so a pole is
//! recognized before any factor is evaluated next to it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::specfun::gamma::{ln_gamma, ln_sin_pi};
use crate::specfun::log_barnes_g;

/// Relative tolerance in `s` for recognizing a lattice point.
pub(crate) const POLE_TOL: f64 = 1e-9;
/// Points closer than this (relative) to a lattice point are flagged.
pub(crate) const NEAR_TOL: f64 = 1e-6;
/// Radius and node count of the circles used for residues and removable points.
pub(crate) const CIRCLE_RADIUS: f64 = 1e-3;
pub(crate) const CIRCLE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kind {
    Gamma,
    SinPi,
    /// `G(.; tau)` with real `tau > 0`.
    Barnes(f64),
}

/// `f(a + b s)^power`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Factor {
    pub kind: Kind,
    pub a: f64,
    pub b: f64,
    pub power: i32,
}

impl Factor {
    pub fn new(kind: Kind, a: f64, b: f64, power: i32) -> Self {
        Factor { kind, a, b, power }
    }

    fn arg(&self, s: Complex64) -> Complex64 {
        self.a + self.b * s
    }

    /// Order of `f` (zero > 0, pole < 0) at the argument `z`, before applying `power`.
    fn order_at(&self, z: Complex64, tol: f64) -> i32 {
        if z.im.abs() > tol {
            return 0;
        }
        let x = z.re;
        match self.kind {
            Kind::Gamma => {
                let k = x.round();
                if k <= 0.0 && (x - k).abs() <= tol {
                    -1
                } else {
                    0
                }
            }
            Kind::SinPi => i32::from((x - x.round()).abs() <= tol),
            Kind::Barnes(tau) => {
                // zeros at -(m tau + n), m, n >= 0
                let mut count = 0;
                let mut m = 0.0;
                while m * tau <= -x + tol {
                    let n = -x - m * tau;
                    if n >= -tol && (n - n.round()).abs() <= tol {
                        count += 1;
                    }
                    m += 1.0;
                }
                count
            }
        }
    }

    fn ln_value(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let z = self.arg(s);
        let p = self.power as f64;
        match self.kind {
            Kind::Gamma => {
                let v = ln_gamma(z);
                Ok((p * v, 4.0 * f64::EPSILON * p.abs() * (1.0 + v.norm())))
            }
            Kind::SinPi => {
                let v = ln_sin_pi(z);
                Ok((
                    p * v,
                    4.0 * f64::EPSILON * p.abs() * (1.0 + v.norm() + (PI * z).norm()),
                ))
            }
            Kind::Barnes(tau) => {
                let r = log_barnes_g(z, Complex64::new(tau, 0.0))?;
                Ok((p * r.value, p.abs() * r.abs_err))
            }
        }
    }
}

/// `exp(c0 + c1 s) * prod f_j(a_j + b_j s)^{p_j}`.
#[derive(Debug, Clone)]
pub(crate) struct Product {
    pub c0: Complex64,
    pub c1: f64,
    pub factors: Vec<Factor>,
    pub method: Method,
}

/// Local behavior of a product at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Local {
    Regular {
        near: bool,
    },
    /// Some factors are singular but the orders cancel or leave a zero.
    Removable {
        order: i32,
    },
    Pole {
        order: i32,
    },
}

impl Product {
    pub fn local(&self, s: Complex64) -> Local {
        let tol_s = POLE_TOL * (1.0 + s.norm());
        let mut net = 0;
        let mut hit = false;
        for f in &self.factors {
            let z = f.arg(s);
            // the Barnes evaluator refuses points within 1e-8 (1 + |z|) of its zeros
            let tol = (f.b.abs() * tol_s).max(1.01e-8 * (1.0 + z.norm()));
            let o = f.order_at(z, tol);
            if o != 0 {
                hit = true;
                net += o * f.power;
            }
        }
        if !hit {
            let near = self.factors.iter().any(|f| {
                let z = f.arg(s);
                let tol =
                    (f.b.abs() * NEAR_TOL * (1.0 + s.norm())).max(NEAR_TOL * (1.0 + z.norm()));
                f.order_at(z, tol) != 0
            });
            return Local::Regular { near };
        }
        if net < 0 {
            Local::Pole { order: -net }
        } else {
            Local::Removable { order: net }
        }
    }

    /// Value at a regular point.
    fn direct(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let mut ln = self.c0 + self.c1 * s;
        let mut err = 4.0 * f64::EPSILON * (self.c0.norm() + (self.c1 * s).norm());
        for f in &self.factors {
            let (v, e) = f.ln_value(s)?;
            ln += v;
            err += e;
        }
        let v = ln.exp();
        Ok((v, err * v.norm()))
    }

    pub fn eval(&self, s: Complex64) -> Result<EvalResult> {
        match self.local(s) {
            Local::Regular { near } => {
                let (v, e) = self.direct(s)?;
                Ok(EvalResult::new(v, e, self.factors.len(), self.method).flagged(near))
            }
            Local::Removable { order } if order > 0 => {
                Ok(EvalResult::real(0.0, 0.0, self.factors.len(), self.method).flagged(true))
            }
            Local::Removable { .. } => {
                let (v, e) = self.circle_mean(s, 0)?;
                Ok(EvalResult::new(v, e, CIRCLE_NODES, self.method).flagged(true))
            }
            Local::Pole { order } => {
                let residue = if order == 1 {
                    self.circle_mean(s, 1).ok().map(|(v, _)| v)
                } else {
                    None
                };
                Err(Error::Pole {
                    location: s,
                    residue,
                })
            }
        }
    }

    /// `(1/2 pi i) int (s' - s)^{k-1} f(s') ds'` over a small circle: the value at a
    /// removable point for `k = 0`, the residue for `k = 1`.
    pub fn circle_mean(&self, s: Complex64, k: i32) -> Result<(Complex64, f64)> {
        let r = CIRCLE_RADIUS;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for j in 0..CIRCLE_NODES {
            let u = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CIRCLE_NODES as f64);
            let (v, e) = self.direct(s + r * u)?;
            let w = u.powi(k) * r.powi(k);
            sum += v * w;
            err += e * w.norm();
        }
        let n = CIRCLE_NODES as f64;
        Ok((sum / n, err / n + 1e-14 * sum.norm() / n))
    }
}
