//! Monte Carlo checks: exact stable draws, random-walk suprema, Kolmogorov-Smirnov
//! statistics and the two product identities in distribution.
//!
//! Every path (and every chunk of plain draws) has its own ChaCha stream selected by its
//! index, so the output does not depend on the number of worker threads.

use std::f64::consts::PI;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::density::{CdfInverter, MellinSource};
use crate::error::{Error, Result};
use crate::params::{detect_ckl_signed, Parameters, CKL_DEFAULT_TOL};

const CHUNK: usize = 4096;
/// Added to the seed for the exponential and gamma factors of the identity checks.
const AUX_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Suprema of simulated paths on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub params: Parameters,
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub values: Vec<f64>,
}

/// Kolmogorov-Smirnov distance and what it was measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub ks_stat: f64,
    pub n: usize,
    pub reference: String,
}

/// Outcome of [`check_identity_products`].
#[derive(Debug, Clone, PartialEq)]
pub enum IdentityCheck {
    Checked(GofReport),
    /// A gamma factor would have shape zero.
    Skipped(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `eps1 (S_1 / eps2)^alpha = eps3^alpha S~_1 / eps4` with `S~` for `(1/alpha, alpha rho)`.
    ReciprocalAlpha,
    /// The gamma product identity for `C(k,l)` with `l > 0`.
    CklProduct,
}

/// Draws of `X_1` with `E exp(izX_1) = exp(-exp(i pi gamma sgn(z) / 2) |z|^alpha)`.
#[derive(Debug, Clone, Copy)]
struct StableSampler {
    alpha: f64,
    /// `pi (rho - 1/2)`
    shift: f64,
    gaussian: bool,
}

impl StableSampler {
    fn new(params: &Parameters) -> Self {
        StableSampler {
            alpha: params.alpha(),
            shift: PI * (params.rho() - 0.5),
            gaussian: params.is_brownian(),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.gaussian {
            let z: f64 = StandardNormal.sample(rng);
            return std::f64::consts::SQRT_2 * z;
        }
        let a = self.alpha;
        let u: f64 = Open01.sample(rng);
        let v = PI * (u - 0.5);
        let w: f64 = Exp1.sample(rng);
        let t = a * (v + self.shift);
        let log_mag = ((1.0 - a) / a) * ((v - t).cos() / w).ln() - v.cos().ln() / a;
        t.sin() * log_mag.exp()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` independent draws of `X_1`.
pub fn sample_stable(params: &Parameters, n: usize, seed: u64) -> Vec<f64> {
    let sampler = StableSampler::new(params);
    let mut out = vec![0.0; n];
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = rng_for(seed, c as u64);
            for v in chunk.iter_mut() {
                *v = sampler.draw(&mut rng);
            }
        });
    out
}

/// `max(0, X_{t_1}, ..., X_{t_n})` on the grid `t_j = j / n_steps`, one path per value.
/// The discrete maximum never exceeds `S_1`, so the bias is one-sided.
pub fn sample_supremum(
    params: &Parameters,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if !n_steps.is_power_of_two() {
        return Err(Error::Domain(format!(
            "n_steps must be a power of two, got {n_steps}"
        )));
    }
    let sampler = StableSampler::new(params);
    let scale = (n_steps as f64).powf(-1.0 / params.alpha());
    let values = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let (mut x, mut m) = (0.0f64, 0.0f64);
            for _ in 0..n_steps {
                x += sampler.draw(&mut rng);
                m = m.max(x);
            }
            m * scale
        })
        .collect();
    Ok(SampleBatch {
        params: *params,
        n_paths,
        n_steps,
        seed,
        values,
    })
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_x |F_n(x) - F(x)|` for the empirical distribution of `samples`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64, reference: &str) -> GofReport {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    GofReport {
        ks_stat: d.clamp(0.0, 1.0),
        n: xs.len(),
        reference: reference.to_string(),
    }
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64], reference: &str) -> GofReport {
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    GofReport {
        ks_stat: d,
        n: xa.len().min(xb.len()),
        reference: reference.to_string(),
    }
}

/// `P(S_1 <= x) = erf(x / 2)` for `X = sqrt(2) W`.
pub fn brownian_supremum_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        libm::erf(x / 2.0)
    }
}

/// KS distance between a batch and the distribution function of `S_1`. The Brownian case
/// uses the closed form, everything else one shared Mellin inversion contour.
pub fn ks_against_supremum_cdf(batch: &SampleBatch) -> Result<GofReport> {
    let p = &batch.params;
    if p.is_brownian() {
        return Ok(ks_statistic(
            &batch.values,
            brownian_supremum_cdf,
            "erf(x/2)",
        ));
    }
    let lo = batch
        .values
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min)
        .max(1e-8);
    let hi = batch.values.iter().copied().fold(lo, f64::max);
    let inv = CdfInverter::new(p, lo, hi, 1e-8, MellinSource::Auto)?;
    let values = sorted(&batch.values);
    let cdf: Vec<f64> = values
        .par_iter()
        .map(|&x| {
            if x < lo {
                Ok(0.0)
            } else {
                inv.cdf(x).map(|r| r.re())
            }
        })
        .collect::<Result<_>>()?;
    let n = values.len() as f64;
    let d = cdf
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i as f64 + 1.0) / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max);
    Ok(GofReport {
        ks_stat: d.clamp(0.0, 1.0),
        n: values.len(),
        reference: format!(
            "Mellin inversion cdf (alpha={}, rho={})",
            p.alpha(),
            p.rho()
        ),
    })
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    // values within rounding of an integer count as integers
    if f < 1e-12 || 1.0 - f < 1e-12 {
        0.0
    } else {
        f
    }
}

fn gamma_ratio(a: f64) -> (Gamma<f64>, Gamma<f64>) {
    (
        Gamma::new(a, 1.0).expect("positive shape"),
        Gamma::new(1.0 - a, 1.0).expect("positive shape"),
    )
}

/// Two-sample KS distance between the two sides of an identity in distribution, with
/// `S_1` replaced by random-walk suprema with `n_steps` steps. The exponential and gamma
/// factors are exact.
pub fn check_identity_products(
    params: &Parameters,
    identity: Identity,
    n: usize,
    n_steps: usize,
    seed: u64,
) -> Result<IdentityCheck> {
    let a = params.alpha();
    match identity {
        Identity::ReciprocalAlpha => {
            if !(a > 0.5 && a < 2.0 && a != 1.0) {
                return Err(Error::Domain(format!(
                    "the identity needs alpha in (1/2, 1) or (1, 2), got {a}"
                )));
            }
            let other = crate::params::make_params(1.0 / a, a * params.rho())?;
            let s = sample_supremum(params, n, n_steps, seed)?.values;
            let t = sample_supremum(&other, n, n_steps, seed.wrapping_add(1))?.values;
            let (left, right): (Vec<f64>, Vec<f64>) = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(seed.wrapping_add(AUX_SEED), i as u64);
                    let e: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
                    (e[0] * (s[i] / e[1]).powf(a), e[2].powf(a) * t[i] / e[3])
                })
                .unzip();
            let reference = format!(
                "eps (S/eps)^a vs eps^a S~/eps, S~ at ({}, {})",
                other.alpha(),
                other.rho()
            );
            Ok(IdentityCheck::Checked(ks_two_sample(
                &left, &right, &reference,
            )))
        }
        Identity::CklProduct => {
            let s = sample_supremum(params, n, n_steps, seed)?.values;
            ckl_identity_from_samples(params, &s, seed)
        }
    }
}

/// The `C(k,l)` product identity with given draws of `S_1` on the left-hand side.
/// `seed` selects the streams of the exponential and gamma factors.
pub fn ckl_identity_from_samples(
    params: &Parameters,
    s: &[f64],
    seed: u64,
) -> Result<IdentityCheck> {
    let a = params.alpha();
    let ckl = detect_ckl_signed(params, true, CKL_DEFAULT_TOL).ok_or_else(|| {
        Error::Domain(format!(
            "(alpha={a}, rho={}) has no C(k,l) certificate with l > 0",
            params.rho()
        ))
    })?;
    let left_shapes: Vec<f64> = (1..ckl.l).map(|j| frac(j as f64 / a)).collect();
    let right_shapes: Vec<f64> = (1..=ckl.k).map(|j| frac(a * j as f64)).collect();
    if left_shapes.iter().chain(&right_shapes).any(|&f| f == 0.0) {
        return Ok(IdentityCheck::Skipped(format!(
            "C({}, {}) needs a gamma variate of shape zero",
            ckl.k, ckl.l
        )));
    }
    let left_g: Vec<_> = left_shapes.iter().map(|&f| gamma_ratio(f)).collect();
    let right_g: Vec<_> = right_shapes.iter().map(|&f| gamma_ratio(f)).collect();
    let (left, right): (Vec<f64>, Vec<f64>) = s
        .par_iter()
        .enumerate()
        .map(|(i, &si)| {
            let mut rng = rng_for(seed.wrapping_add(AUX_SEED), i as u64);
            let e1: f64 = Exp1.sample(&mut rng);
            let e2: f64 = Exp1.sample(&mut rng);
            let mut lf = e1;
            for (g, h) in &left_g {
                lf *= g.sample(&mut rng) / h.sample(&mut rng);
            }
            let mut rf = e2;
            for (g, h) in &right_g {
                // gamma_{1-{a j}} over gamma_{{a j}}
                rf *= h.sample(&mut rng) / g.sample(&mut rng);
            }
            (si * lf.powf(1.0 / a), rf)
        })
        .unzip();
    let reference = format!("S_1 times gamma products for C({}, {})", ckl.k, ckl.l);
    Ok(IdentityCheck::Checked(ks_two_sample(
        &left, &right, &reference,
    )))
}
