use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use stable_extrema::density::{
    cdf, cdf_at_time, conjecture_probe, density_profile, pdf, pdf_asymptotic_large_x,
    pdf_asymptotic_small_x, pdf_asymptotic_small_x_planned, pdf_asymptotic_truncated, pdf_at_time,
    pdf_ckl_series, pdf_derivative, pdf_mellin_inversion, CdfInverter, MellinSource, PdfInverter,
    Region, Truncation,
};
use stable_extrema::mellin::{a_coeff, b_coeff, c_plus, mellin};
use stable_extrema::specfun::gamma::gamma_real;
use stable_extrema::{make_params, CklClass, Method, Parameters};

fn brownian(x: f64) -> f64 {
    (-x * x / 4.0).exp() / PI.sqrt()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Composite Simpson rule for `int f(x) dx` over `[lo, hi]` in the variable `u = ln x`.
fn simpson_log(lo: f64, hi: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = 2 * panels;
    let (u0, u1) = (lo.ln(), hi.ln());
    let h = (u1 - u0) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let x = (u0 + i as f64 * h).exp();
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += w * f(x) * x;
    }
    s * h / 3.0
}

fn pos_class() -> (Parameters, CklClass) {
    (
        make_params(1.5, 1.0 / 3.0).unwrap(),
        CklClass {
            k: 1,
            l: 2,
            exact: false,
        },
    )
}

#[test]
fn series_agrees_with_inversion() {
    let cases = [
        (
            1.5,
            2.0 / 3.0,
            CklClass {
                k: 0,
                l: 1,
                exact: false,
            },
        ),
        (
            1.5,
            1.0 / 3.0,
            CklClass {
                k: 1,
                l: 2,
                exact: false,
            },
        ),
        (
            1.5,
            1.0 / 3.0,
            CklClass {
                k: -1,
                l: -1,
                exact: false,
            },
        ),
        (
            2.0 / 3.0,
            0.5,
            CklClass {
                k: 1,
                l: 1,
                exact: false,
            },
        ),
        (
            2.0 / 3.0,
            0.5,
            CklClass {
                k: -2,
                l: -1,
                exact: false,
            },
        ),
    ];
    for (a, r, ckl) in cases {
        let p = make_params(a, r).unwrap();
        let inv = PdfInverter::new(&p, 0.05, 20.0, 1e-13, MellinSource::Auto).unwrap();
        for x in log_grid(0.05, 20.0, 15) {
            let s = pdf_ckl_series(&p, ckl, x).unwrap();
            let v = inv.pdf(x).unwrap();
            assert!(
                (s.re() - v.re()).abs() < 1e-10,
                "({a}, {r}) {ckl:?} x={x}: {} vs {}",
                s.re(),
                v.re()
            );
        }
    }
}

#[test]
fn brownian_by_inversion() {
    let p = make_params(2.0, 0.5).unwrap();
    let inv = PdfInverter::new(&p, 0.1, 4.0, 1e-10, MellinSource::DoubleGamma).unwrap();
    for &x in &[0.1, 0.5, 1.0, 2.0, 4.0] {
        let v = inv.pdf(x).unwrap().re();
        assert!((v - brownian(x)).abs() < 1e-7, "x={x}: {v}");
    }
}

#[test]
fn refinement_is_stable() {
    let p = make_params(1.5, 0.5).unwrap();
    let a = pdf_mellin_inversion(&p, 1.0, 1e-10).unwrap();
    let b = pdf_mellin_inversion(&p, 1.0, 1e-13).unwrap();
    assert!((a.re() - b.re()).abs() < 1e-8);
    assert!(a.abs_err <= 1e-9);
}

#[test]
fn normalization_and_mean_spectrally_negative() {
    let p = make_params(1.5, 2.0 / 3.0).unwrap();
    let ckl = CklClass {
        k: 0,
        l: 1,
        exact: false,
    };
    let f = |x: f64| pdf_ckl_series(&p, ckl, x).unwrap().re();
    // p(x) -> a00 x^0 near zero and the tail is beyond any power by x = 12
    let eps = 1e-9;
    let a00 = a_coeff(&p, 0, 0).unwrap();
    let total = a00 * eps + simpson_log(eps, 12.0, 300, f);
    assert!((total - 1.0).abs() < 1e-7, "{total}");
    let mean = simpson_log(eps, 12.0, 300, |x| x * f(x));
    let want = 1.0 / gamma_real(5.0 / 3.0);
    assert!((mean - want).abs() < 1e-7, "{mean} vs {want}");
}

/// `int_X^inf x^{s-1} p(x) dx` from the large-x expansion `p ~ sum_m b(m,1) x^{-1-alpha-m}`.
fn pos_tail(p: &Parameters, ckl: CklClass, x: f64, s: f64) -> f64 {
    let a = p.alpha();
    (0..10)
        .map(|m| {
            let b = -c_plus(a, ckl, m, 1).unwrap();
            let e = 1.0 + a + m as f64 - s;
            b * x.powf(-e) / e
        })
        .sum()
}

#[test]
fn moments_match_the_transform() {
    let (p, ckl) = pos_class();
    let (eps, top) = (1e-12, 16.0);
    let a00 = a_coeff(&p, 0, 0).unwrap();
    let ar = p.alpha_rho();
    let grid = log_grid(eps, top, 801);
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| pdf_ckl_series(&p, ckl, x).unwrap().re())
        .collect();
    for &s in &[1.0, 1.2, 1.5, 2.0] {
        // Simpson on the precomputed log grid
        let h = (top / eps).ln() / 800.0;
        let mut sum = 0.0;
        for (i, (&x, &v)) in grid.iter().zip(&values).enumerate() {
            let w = if i == 0 || i == 800 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * v * x.powf(s);
        }
        let head = a00 * eps.powf(ar + s - 1.0) / (ar + s - 1.0);
        let got = head + sum * h / 3.0 + pos_tail(&p, ckl, top, s);
        let want = mellin(&p, Complex64::new(s, 0.0)).unwrap().re();
        assert!((got - want).abs() < 1e-6 * want, "s={s}: {got} vs {want}");
    }
}

#[test]
fn generic_expansions_against_inversion() {
    let p = make_params(2f64.sqrt(), 0.45).unwrap();
    let v = pdf_mellin_inversion(&p, 0.05, 1e-12).unwrap().re();
    let s = pdf_asymptotic_small_x(&p, 0.05).unwrap();
    assert!((s.re() - v).abs() < 1e-5 * v);
    assert!((s.re() - v).abs() <= s.abs_err.max(1e-12));
    assert_eq!(s.method, Method::AsymptoticSmall);

    let v = pdf_mellin_inversion(&p, 50.0, 1e-14).unwrap().re();
    let l = pdf_asymptotic_large_x(&p, 50.0).unwrap();
    assert!((l.re() - v).abs() < 1e-10 * v);
    let b01 = b_coeff(&p, 0, 1).unwrap();
    assert!(b01 > 0.0);
    let lead = v * 50f64.powf(1.0 + p.alpha()) / b01;
    assert!((lead - 1.0).abs() < 0.1, "{lead}");
}

#[test]
fn small_x_partial_sums_bracket() {
    // grades 0, 1 and then alpha; the truncation error alternates around the true value
    let p = make_params(2f64.sqrt(), 0.45).unwrap();
    let x = 0.01;
    let v = pdf_mellin_inversion(&p, x, 1e-12).unwrap().re();
    let (two, _) = pdf_asymptotic_truncated(&p, x, Region::SmallX, 1.2).unwrap();
    let (three, _) = pdf_asymptotic_truncated(&p, x, Region::SmallX, 1.5).unwrap();
    assert!((two - v) * (three - v) < 0.0 || (three - v).abs() < (two - v).abs());
    assert!((three - v).abs() < 1e-4 * v);
}

#[test]
fn truncation_error_within_three_bands() {
    let p = make_params(2f64.sqrt(), 0.45).unwrap();
    let xs = [0.02, 0.1, 0.3, 0.8];
    let inv = PdfInverter::new(&p, 0.02, 0.8, 1e-13, MellinSource::Auto).unwrap();
    for &x in &xs {
        let v = inv.pdf(x).unwrap().re();
        for cap in 1..8 {
            let (s, next) = pdf_asymptotic_truncated(&p, x, Region::SmallX, cap as f64).unwrap();
            if next < 1e-4 {
                assert!(
                    (s - v).abs() <= 3.0 * next + 1e-11,
                    "x={x} cap={cap}: {} vs {next}",
                    (s - v).abs()
                );
            }
        }
    }
    let inv = PdfInverter::new(&p, 8.0, 40.0, 1e-14, MellinSource::Auto).unwrap();
    for &x in &[8.0, 15.0, 40.0] {
        let v = inv.pdf(x).unwrap().re();
        for cap in 1..6 {
            let (s, next) = pdf_asymptotic_truncated(&p, x, Region::LargeX, cap as f64).unwrap();
            assert!((s - v).abs() <= 3.0 * next + 1e-13, "x={x} cap={cap}");
        }
    }
}

#[test]
fn optimal_cut_is_reported() {
    let p = make_params(2f64.sqrt(), 0.45).unwrap();
    let (r, plan) = pdf_asymptotic_small_x_planned(&p, 0.3).unwrap();
    assert!(matches!(plan.truncation, Truncation::Optimal { cap } if cap >= 2.0));
    assert!((plan.err_est - r.abs_err).abs() < 1e-300 + 1e-12 * r.abs_err);
    // at x = 3 the large-x bands first shrink and then grow
    let rep = conjecture_probe(&p, 3.0, Region::LargeX).unwrap();
    let env = &rep.band_envelopes;
    let min = (1..env.len())
        .min_by(|&i, &j| env[i].total_cmp(&env[j]))
        .unwrap();
    assert!(min > 1 && min + 1 < env.len());
    assert!(env[1] > env[min] && *env.last().unwrap() > env[min]);
}

#[test]
fn distribution_function() {
    let p = make_params(2.0, 0.5).unwrap();
    // P(S_1 <= x) = erf(x / 2) for the Brownian case
    for &(x, want) in &[(1.0, 0.5204998778130465), (3.0, 0.9661051464753108)] {
        let v = cdf(&p, x).unwrap().re();
        assert!((v - want).abs() < 1e-9, "x={x}: {v}");
    }
    for &(a, r) in &[(1.5, 0.5), (0.7, 0.3), (1.2, 0.6)] {
        let p = make_params(a, r).unwrap();
        let big = cdf(&p, 1e6).unwrap().re();
        assert!((1.0 - 1e-3..=1.0).contains(&big), "({a}, {r}) {big}");
        let inv = CdfInverter::new(&p, 0.05, 20.0, 1e-10, MellinSource::Auto).unwrap();
        let vals: Vec<f64> = log_grid(0.05, 20.0, 25)
            .iter()
            .map(|&x| inv.cdf(x).unwrap().re())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]), "({a}, {r})");
    }
}

#[test]
fn distribution_matches_integrated_density() {
    let (p, ckl) = pos_class();
    let (x1, x2) = (0.3, 2.5);
    let area = simpson_log(x1, x2, 100, |x| pdf_ckl_series(&p, ckl, x).unwrap().re());
    let diff = cdf(&p, x2).unwrap().re() - cdf(&p, x1).unwrap().re();
    assert!((area - diff).abs() < 1e-9, "{area} vs {diff}");
}

#[test]
fn derivative_matches_differences() {
    for &(a, r, x) in &[
        (1.5, 1.0 / 3.0, 0.7),
        (2f64.sqrt(), 0.45, 0.2),
        (2f64.sqrt(), 0.45, 3.0),
    ] {
        let p = make_params(a, r).unwrap();
        let h = 1e-4 * x;
        let fd = (pdf(&p, x + h).unwrap().re() - pdf(&p, x - h).unwrap().re()) / (2.0 * h);
        let d = pdf_derivative(&p, x).unwrap().re();
        assert!(
            (d - fd).abs() < 1e-6 * fd.abs().max(1.0),
            "({a}, {r}) x={x}: {d} vs {fd}"
        );
    }
}

#[test]
fn self_similarity() {
    let p = make_params(2.0, 0.5).unwrap();
    for &(t, x) in &[(0.25f64, 0.3f64), (4.0, 2.0), (9.0, 5.0)] {
        let want = (-x * x / (4.0 * t)).exp() / (PI * t).sqrt();
        assert!((pdf_at_time(&p, t, x).unwrap().re() - want).abs() < 1e-10);
    }
    let (p, _) = pos_class();
    let t: f64 = 3.0;
    let c = t.powf(1.0 / p.alpha());
    let direct = cdf(&p, 1.1 / c).unwrap().re();
    assert!((cdf_at_time(&p, t, 1.1).unwrap().re() - direct).abs() < 1e-14);
}

#[test]
fn profile_mixes_methods() {
    let p = make_params(2f64.sqrt(), 0.45).unwrap();
    let xs = [0.05, 0.5, 3.0, 4.0, 30.0];
    let prof = density_profile(&p, &xs).unwrap();
    assert!(prof.methods.contains(&Method::MellinInversion));
    assert!(prof.methods.contains(&Method::AsymptoticSmall));
    for (i, &x) in xs.iter().enumerate() {
        assert!(prof.p_values[i] > 0.0);
        let v = pdf_mellin_inversion(&p, x, 1e-12).unwrap().re();
        assert!((prof.p_values[i] - v).abs() < 1e-8 + prof.errs[i], "x={x}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cdf_is_monotone(a in 0.4f64..1.95, t in 0.1f64..0.9, x in 0.1f64..5.0, dx in 0.05f64..3.0) {
        let (lo, hi) = if a <= 1.0 { (0.0, 1.0) } else { (1.0 - 1.0 / a, 1.0 / a) };
        let p = make_params(a, lo + t * (hi - lo)).unwrap();
        let inv = CdfInverter::new(&p, x, x + dx, 1e-9, MellinSource::Auto).unwrap();
        let f1 = inv.cdf(x).unwrap().re();
        let f2 = inv.cdf(x + dx).unwrap().re();
        prop_assert!((0.0..=1.0).contains(&f1) && (0.0..=1.0).contains(&f2));
        prop_assert!(f2 >= f1 - 1e-8, "({a}) {f1} {f2}");
    }

    #[test]
    fn density_is_positive(a in 0.4f64..1.95, t in 0.1f64..0.9, x in 0.05f64..10.0) {
        let (lo, hi) = if a <= 1.0 { (0.0, 1.0) } else { (1.0 - 1.0 / a, 1.0 / a) };
        let p = make_params(a, lo + t * (hi - lo)).unwrap();
        let r = pdf(&p, x).unwrap();
        prop_assert!(r.re() > -r.abs_err, "({a}) x={x}: {}", r.re());
    }
}
