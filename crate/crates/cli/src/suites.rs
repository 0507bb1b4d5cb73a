//! Verification suites run by `verify` and by the acceptance tests.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_extrema::density::{pdf_ckl_series, MellinSource, PdfInverter};
use stable_extrema::ftau::{
    f_contour, f_quadrature, f_rational, f_series, strip_check, SeriesForm,
};
use stable_extrema::mc::{
    check_identity_products, ckl_identity_from_samples, ks_against_supremum_cdf, sample_supremum,
    Identity, IdentityCheck,
};
use stable_extrema::mellin::{
    a_coeff, c_plus, mellin, mellin_ckl, mellin_contour_residue, mellin_decay_rate,
    mellin_recursion_check, mellin_reflections_check, residue_coeffs, ResidueKind,
};
use stable_extrema::specfun::gamma::gamma_real;
use stable_extrema::wiener_hopf::{
    irrationality_diagnostic, phi, phi_double_gamma, phi_exp, PhiMethod,
};
use stable_extrema::{
    detect_ckl, dual, inverse_alpha, make_params, CklClass, Error, Parameters, RationalAlpha,
    Result,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    FunctionalEquations,
    Ftau,
    CrossMethod,
    Mellin,
    Density,
    MonteCarlo,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::FunctionalEquations => "functional-equations",
            Suite::Ftau => "ftau",
            Suite::CrossMethod => "cross-method",
            Suite::Mellin => "mellin",
            Suite::Density => "density",
            Suite::MonteCarlo => "mc",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "functional-equations" => Suite::FunctionalEquations,
            "ftau" => Suite::Ftau,
            "cross-method" => Suite::CrossMethod,
            "mellin" => Suite::Mellin,
            "density" => Suite::Density,
            "mc" | "monte-carlo" => Suite::MonteCarlo,
            "all" => Suite::All,
            other => return Err(format!("unknown suite '{other}'")),
        })
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            residual,
            tolerance,
        }
    }

    /// A failed evaluation counts as an infinite residual.
    fn from_result(
        suite: &'static str,
        name: impl Into<String>,
        r: Result<f64>,
        tolerance: f64,
    ) -> Self {
        let name = name.into();
        match r {
            Ok(v) => Check::new(suite, name, v, tolerance),
            Err(e) => Check::new(suite, format!("{name} [{e}]"), f64::INFINITY, tolerance),
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Sizes and seed for the Monte Carlo suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 100_000,
            n_steps: 1 << 14,
            seed: 2024,
        }
    }
}

pub fn run_suite(suite: Suite, params: Option<&Parameters>, seed: u64, mc: McConfig) -> Vec<Check> {
    match suite {
        Suite::FunctionalEquations => functional_equations(params, seed),
        Suite::Ftau => ftau_identities(),
        Suite::CrossMethod => cross_method(),
        Suite::Mellin => mellin_anchors(),
        Suite::Density => density_consistency(),
        Suite::MonteCarlo => monte_carlo(mc),
        Suite::All => {
            let mut out = functional_equations(params, seed);
            out.extend(ftau_identities());
            out.extend(cross_method());
            out.extend(mellin_anchors());
            out.extend(density_consistency());
            out.extend(monte_carlo(mc));
            out
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn dg(p: &Parameters, z: Complex64) -> Result<Complex64> {
    phi_double_gamma(p, z).map(|r| r.value)
}

fn random_params(rng: &mut ChaCha8Rng) -> Parameters {
    loop {
        let alpha: f64 = rng.gen_range(0.3..1.95);
        if (alpha - 1.0).abs() < 0.02 {
            continue;
        }
        let (lo, hi) = if alpha < 1.0 {
            (0.05, 0.95)
        } else {
            (1.0 - 1.0 / alpha, 1.0 / alpha)
        };
        if let Ok(p) = make_params(alpha, rng.gen_range(lo..=hi)) {
            return p;
        }
    }
}

#[derive(Default)]
struct Worst {
    names: Vec<&'static str>,
    values: Vec<Result<f64>>,
}

impl Worst {
    fn add(&mut self, name: &'static str, r: Result<f64>) {
        match self.names.iter().position(|&n| n == name) {
            Some(i) => {
                let merged = match (&self.values[i], r) {
                    (Err(_), _) => return,
                    (_, Err(e)) => Err(e),
                    (Ok(a), Ok(b)) => Ok(a.max(b)),
                };
                self.values[i] = merged;
            }
            None => {
                self.names.push(name);
                self.values.push(r);
            }
        }
    }

    fn into_checks(self, suite: &'static str, tol: f64) -> Vec<Check> {
        self.names
            .into_iter()
            .zip(self.values)
            .map(|(n, v)| Check::from_result(suite, n, v, tol))
            .collect()
    }
}

fn functional_residuals(p: &Parameters, z: f64, w: Complex64, worst: &mut Worst) {
    let (a, r) = (p.alpha(), p.rho());
    worst.add(
        "inversion z -> 1/z",
        (|| {
            Ok(rel(
                dg(p, c(1.0 / z))?,
                z.powf(p.alpha_rho()) * dg(p, c(z))?,
            ))
        })(),
    );
    if a > 1.0 {
        worst.add(
            "power transformation",
            (|| {
                let q = inverse_alpha(p)?;
                Ok(rel(dg(p, c(z))?, dg(&q, c(z.powf(a)))?))
            })(),
        );
        worst.add(
            "multiplication",
            (|| {
                let half = make_params(a / 2.0, r)?;
                let rot = Complex64::from_polar(1.0, PI / a);
                Ok(rel(dg(p, c(z))?, dg(&half, z * rot)? * dg(&half, z / rot)?))
            })(),
        );
    }
    worst.add(
        "wiener-hopf factorization",
        (|| {
            let d = dual(p);
            let mut m: f64 = 0.0;
            for y in [z, -z] {
                let iz = I * y;
                let za = (a * iz.ln()).exp();
                let rhs = 1.0 / (1.0 + (-y.signum() * PI * I * p.alpha_rho()).exp() * za);
                m = m.max(rel(dg(&d, iz)? * dg(p, -iz)?, rhs));
            }
            Ok(m)
        })(),
    );
    worst.add(
        "quasi-periodicity in log z",
        (|| {
            let base = phi_exp(p, w)?.value;
            let f1 = (1.0 + (a * w + PI * I * a * (1.0 - r)).exp())
                / (1.0 + (a * w + PI * I * a * (1.0 + r)).exp());
            let e1 = rel(phi_exp(p, w + 2.0 * PI * I)?.value, base * f1);
            let f2 = (1.0 + (w + PI * I * (1.0 / a - r)).exp())
                / (1.0 + (w + PI * I * (1.0 / a + r)).exp());
            let e2 = rel(phi_exp(p, w + 2.0 * PI * I / a)?.value, base * f2);
            Ok(e1.max(e2))
        })(),
    );
}

/// Functional equations of `phi` at the given parameters on a fixed `z` grid, or on 100
/// random admissible points when no parameters are given.
pub fn functional_equations(params: Option<&Parameters>, seed: u64) -> Vec<Check> {
    let mut worst = Worst::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match params {
        Some(p) => {
            for &z in &[0.2f64, 0.5, 1.3, 2.7, 4.0] {
                let w = Complex64::new(z.ln(), 0.3 * z);
                functional_residuals(p, z, w, &mut worst);
            }
        }
        None => {
            for _ in 0..100 {
                let p = random_params(&mut rng);
                let z: f64 = rng.gen_range(0.2..5.0);
                let w = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-2.0..2.0));
                functional_residuals(&p, z, w, &mut worst);
            }
        }
    }
    worst.into_checks("functional-equations", 1e-9)
}

/// Random `tau` in the upper half plane and `z` well inside `P(tau)`.
fn strip_point(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    loop {
        let tau = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.5));
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if strip_check(z * 1.25, tau).in_p {
            return (z, tau);
        }
    }
}

/// Identities of `F(z; tau)` and the closed form for rational `tau / i`.
pub fn ftau_identities() -> Vec<Check> {
    let f = |z, tau| f_quadrature(z, tau).map(|r| r.value);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<_> = (0..20).map(|_| strip_point(&mut rng)).collect();
    let mut worst = Worst::default();
    for &(z, tau) in &points {
        worst.add(
            "modular transformation",
            (|| Ok((f(z, tau)? - I / tau * f(I * z / tau, -1.0 / tau)?).norm()))(),
        );
        worst.add(
            "reflection in z",
            (|| Ok((f(z, tau)? - f(-z, tau)? + I * z / tau).norm()))(),
        );
        worst.add(
            "multiplication n = 2, 3",
            (|| {
                let mut m: f64 = 0.0;
                for n in [2usize, 3] {
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        rhs += f(
                            (z + PI * I * (n as f64 - 2.0 * k as f64 - 1.0)) / n as f64,
                            tau,
                        )?;
                    }
                    m = m.max((f(z, tau * n as f64)? - rhs / n as f64).norm());
                }
                Ok(m)
            })(),
        );
        worst.add(
            "contour form",
            (|| Ok((f_contour(z, tau)?.value - f(z, tau)?).norm()))(),
        );
        if tau.re.abs() >= 0.2 {
            worst.add(
                "residue series",
                (|| Ok((f_series(z, tau, SeriesForm::Residue)?.value - f(z, tau)?).norm()))(),
            );
            if z.re > 0.3 {
                worst.add(
                    "exponential series",
                    (|| Ok((f_series(z, tau, SeriesForm::Exponential)?.value - f(z, tau)?).norm()))(
                    ),
                );
            }
        }
    }
    let zs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(-1.3, 0.4),
        Complex64::new(2.0, -1.5),
        Complex64::new(0.2, 2.5),
        Complex64::new(0.0, PI / 2.0),
        Complex64::new(0.0, PI / 3.0),
    ];
    for &(m, n) in &[(1u32, 1u32), (1, 2), (2, 1), (3, 2), (5, 3)] {
        let tau = I * (m as f64 / n as f64);
        for &z in &zs {
            if strip_check(z, tau).in_s {
                worst.add(
                    "rational closed form vs quadrature",
                    (|| Ok((f_rational(z, m, n)?.value - f(z, tau)?).norm()))(),
                );
            }
        }
    }
    worst.into_checks("ftau", 1e-10)
}

/// Every applicable pair of `phi` evaluation paths at positive real `z`.
pub fn cross_method() -> Vec<Check> {
    let sets: [(f64, f64, Option<(u32, u32)>); 5] = [
        (1.5, 2.0 / 3.0, Some((3, 2))),
        (1.5, 1.0 / 3.0, Some((3, 2))),
        (1.5, 0.55, Some((3, 2))),
        (0.8, 0.5, Some((4, 5))),
        (2f64.sqrt(), 0.45, None),
    ];
    let mut out = Vec::new();
    for (alpha, rho, ra) in sets {
        let r = (|| -> Result<f64> {
            let mut p = make_params(alpha, rho)?;
            if let Some((m, n)) = ra {
                p = p.with_rational(RationalAlpha::new(m, n)?)?;
            }
            let mut methods = vec![PhiMethod::DoubleGamma, PhiMethod::DarlingQuadrature];
            if ra.is_some() {
                methods.push(PhiMethod::RationalAlpha);
            }
            if detect_ckl(&p, p.rational(), 1e-10).is_some() {
                methods.push(PhiMethod::CklProduct);
            }
            let mut worst: f64 = 0.0;
            for &z in &[0.3, 0.7, 1.0, 2.0] {
                let mut ms = methods.clone();
                if irrationality_diagnostic(alpha).passed && z != 1.0 {
                    ms.push(PhiMethod::LogSeries);
                }
                let vals = ms
                    .iter()
                    .map(|&m| phi(&p, c(z), m).map(|r| r.value))
                    .collect::<Result<Vec<_>>>()?;
                for (i, va) in vals.iter().enumerate() {
                    for vb in &vals[i + 1..] {
                        worst = worst.max(rel(*va, *vb));
                    }
                }
            }
            Ok(worst)
        })();
        let label = match ra {
            Some((m, n)) => format!("phi methods at alpha={m}/{n}, rho={rho:.6}"),
            None => format!("phi methods at alpha={alpha:.6}, rho={rho}"),
        };
        out.push(Check::from_result("cross-method", label, r, 1e-8));
    }
    out
}

/// Largest relative error between contour residues and the closed-form table at the four
/// non-zero residues closest to the strip.
fn nearest_residues(alpha: f64, rho: f64, kind: ResidueKind) -> Result<f64> {
    let p = make_params(alpha, rho)?;
    let table = residue_coeffs(&p, kind, 4, 4)?;
    let mid = 1.0 - p.alpha_rho() / 2.0;
    let mut poles: Vec<_> = table
        .entries
        .iter()
        .filter(|e| e.residue.abs() > 1e-12)
        .collect();
    poles.sort_by(|x, y| (x.s - mid).abs().total_cmp(&(y.s - mid).abs()));
    let mut worst: f64 = 0.0;
    for e in poles.iter().take(4) {
        let r = mellin_contour_residue(&p, c(e.s))?;
        worst = worst.max((r - e.residue).norm() / e.residue.abs().max(1.0));
    }
    Ok(worst)
}

pub fn mellin_anchors() -> Vec<Check> {
    const S: &str = "mellin";
    let mut out = Vec::new();
    let norm = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(a, r) in &[
            (0.5, 0.3),
            (0.8, 0.5),
            (1.5, 0.5),
            (1.5, 2.0 / 3.0),
            (2f64.sqrt(), 0.45),
            (1.9, 0.5),
            (2.0, 0.5),
        ] {
            worst = worst.max((mellin(&make_params(a, r)?, c(1.0))?.value - 1.0).norm());
        }
        Ok(worst)
    })();
    out.push(Check::from_result(S, "M(1) = 1", norm, 1e-12));
    let brownian = (|| -> Result<f64> {
        let p = make_params(2.0, 0.5)?;
        let mut worst: f64 = 0.0;
        for &s in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            let want = 2f64.powf(s - 1.0) * gamma_real(s / 2.0) / PI.sqrt();
            worst = worst.max((mellin(&p, c(s))?.re() - want).abs() / want);
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        S,
        "brownian closed form",
        brownian,
        1e-8,
    ));
    let negative = (|| -> Result<f64> {
        let p = make_params(1.5, 2.0 / 3.0)?;
        let ckl = CklClass {
            k: 0,
            l: 1,
            exact: false,
        };
        let mut worst: f64 = 0.0;
        for &s in &[0.3, 0.9, 1.7, 2.2, 3.4] {
            let want = gamma_real(s) / gamma_real(1.0 + (s - 1.0) / 1.5);
            worst = worst.max((mellin(&p, c(s))?.re() - want).abs() / want.abs());
            worst = worst.max((mellin_ckl(&p, ckl, c(s))?.re() - want).abs() / want.abs());
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        S,
        "spectrally negative closed form",
        negative,
        1e-10,
    ));
    let equations = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(a, r) in &[(0.7, 0.4), (1.5, 0.5), (2f64.sqrt(), 0.45)] {
            let p = make_params(a, r)?;
            for &s in &[Complex64::new(0.4, 0.7), Complex64::new(1.3, -1.2)] {
                let (r1, r2) = mellin_recursion_check(&p, s)?;
                let (q1, q2) = mellin_reflections_check(&p, s)?;
                worst = worst.max(r1).max(r2).max(q1).max(q2.unwrap_or(0.0));
            }
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        S,
        "recursions and reflections",
        equations,
        1e-9,
    ));
    out.push(Check::from_result(
        S,
        "residues at (1.414214, 0.45)",
        nearest_residues(2f64.sqrt(), 0.45, ResidueKind::Generic),
        1e-6,
    ));
    out.push(Check::from_result(
        S,
        "residues at C(1,2) (3/2, 1/3)",
        nearest_residues(1.5, 1.0 / 3.0, ResidueKind::CklPos),
        1e-6,
    ));
    for &(a, r) in &[(1.5, 0.5), (0.8, 0.4), (2f64.sqrt(), 0.45)] {
        let d = (|| -> Result<f64> {
            let p = make_params(a, r)?;
            let measured = mellin(&p, Complex64::new(1.0, 200.0))?.value.norm().ln() / 200.0;
            let want = -mellin_decay_rate(&p);
            Ok((measured - want).abs() / want.abs())
        })();
        out.push(Check::from_result(
            S,
            format!("decay rate at height 200, ({a:.6}, {r})"),
            d,
            0.15,
        ));
    }
    out
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `int_0^inf x^{s-1} p(x) dx` from the convergent series on `[eps, top]` (Simpson in
/// `ln x`), the leading small-x term below `eps` and the large-x expansion above `top`.
fn ckl_moment(p: &Parameters, ckl: CklClass, s: f64) -> Result<f64> {
    let (eps, top, panels) = (1e-12f64, 16.0f64, 400);
    let n = 2 * panels;
    let h = (top / eps).ln() / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let x = (eps.ln() + i as f64 * h).exp();
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * pdf_ckl_series(p, ckl, x)?.re() * x.powf(s);
    }
    let body = sum * h / 3.0;
    let e0 = p.alpha_rho() + s - 1.0;
    let head = a_coeff(p, 0, 0)? * eps.powf(e0) / e0;
    let a = p.alpha();
    let mut tail = 0.0;
    for n in 1..=ckl.k.max(0) {
        for m in 0..10 {
            let e = 1.0 + m as f64 + a * n as f64 - s;
            tail -= c_plus(a, ckl, m, n)? * top.powf(-e) / e;
        }
    }
    Ok(head + body + tail)
}

pub fn density_consistency() -> Vec<Check> {
    const S: &str = "density";
    let mut out = Vec::new();
    let classes = [
        (
            "C(0,1)",
            2.0 / 3.0,
            CklClass {
                k: 0,
                l: 1,
                exact: false,
            },
        ),
        (
            "C(1,2)",
            1.0 / 3.0,
            CklClass {
                k: 1,
                l: 2,
                exact: false,
            },
        ),
    ];
    for (label, rho, ckl) in classes {
        let sup = (|| -> Result<f64> {
            let p = make_params(1.5, rho)?;
            let inv = PdfInverter::new(&p, 0.05, 20.0, 1e-12, MellinSource::Auto)?;
            let mut worst: f64 = 0.0;
            for x in log_grid(0.05, 20.0, 50) {
                worst = worst.max((pdf_ckl_series(&p, ckl, x)?.re() - inv.pdf(x)?.re()).abs());
            }
            Ok(worst)
        })();
        out.push(Check::from_result(
            S,
            format!("series vs inversion at {label}, alpha=3/2"),
            sup,
            1e-6,
        ));
        let p = make_params(1.5, rho);
        let mass = p
            .clone()
            .and_then(|p| Ok((ckl_moment(&p, ckl, 1.0)? - 1.0).abs()));
        out.push(Check::from_result(
            S,
            format!("total mass at {label}"),
            mass,
            1e-5,
        ));
        let mean = p.and_then(|p| {
            let want = mellin(&p, c(2.0))?.re();
            Ok((ckl_moment(&p, ckl, 2.0)? - want).abs())
        });
        out.push(Check::from_result(
            S,
            format!("first moment vs M(2) at {label}"),
            mean,
            1e-5,
        ));
    }
    let brownian = (|| -> Result<f64> {
        let p = make_params(2.0, 0.5)?;
        let inv = PdfInverter::new(&p, 0.1, 4.0, 1e-10, MellinSource::DoubleGamma)?;
        let mut worst: f64 = 0.0;
        for &x in &[0.1, 0.5, 1.0, 2.0, 4.0] {
            worst = worst.max((inv.pdf(x)?.re() - (-x * x / 4.0).exp() / PI.sqrt()).abs());
        }
        Ok(worst)
    })();
    out.push(Check::from_result(
        S,
        "brownian density by inversion",
        brownian,
        1e-7,
    ));
    out
}

fn identity_stat(r: Result<IdentityCheck>) -> Result<f64> {
    match r? {
        IdentityCheck::Checked(g) => Ok(g.ks_stat),
        IdentityCheck::Skipped(why) => Err(Error::Domain(why)),
    }
}

pub fn monte_carlo(cfg: McConfig) -> Vec<Check> {
    const S: &str = "mc";
    const TOL: f64 = 0.02;
    let mut out = Vec::new();
    let run = |alpha: f64, rho: f64| -> Result<(f64, Result<f64>)> {
        let p = make_params(alpha, rho)?;
        let batch = sample_supremum(&p, cfg.n_paths, cfg.n_steps, cfg.seed)?;
        let ks = ks_against_supremum_cdf(&batch)?.ks_stat;
        let product = identity_stat(ckl_identity_from_samples(&p, &batch.values, cfg.seed));
        Ok((ks, product))
    };
    for (label, a, r) in [("(3/2, 2/3)", 1.5, 2.0 / 3.0), ("(2, 1/2)", 2.0, 0.5)] {
        match run(a, r) {
            Ok((ks, product)) => {
                out.push(Check::new(
                    S,
                    format!("ks vs analytic cdf at {label}"),
                    ks,
                    TOL,
                ));
                out.push(Check::from_result(
                    S,
                    format!("gamma product identity at {label}"),
                    product,
                    TOL,
                ));
            }
            Err(e) => out.push(Check::from_result(
                S,
                format!("simulation at {label}"),
                Err(e),
                TOL,
            )),
        }
    }
    let recip = make_params(1.5, 0.5).and_then(|p| {
        identity_stat(check_identity_products(
            &p,
            Identity::ReciprocalAlpha,
            cfg.n_paths,
            cfg.n_steps,
            cfg.seed.wrapping_add(1),
        ))
    });
    out.push(Check::from_result(
        S,
        "reciprocal alpha identity at (3/2, 1/2) and (2/3, 3/4)",
        recip,
        TOL,
    ));
    out
}
