use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_extrema::ftau::{
    f_contour, f_quadrature, f_rational, f_series, strip_check, SeriesForm,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn f(z: Complex64, tau: Complex64) -> Complex64 {
    f_quadrature(z, tau).unwrap().value
}

/// Random `tau` in the upper half plane and `z` well inside `P(tau)`.
fn random_point(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    loop {
        let tau = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.5));
        let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let shrunk = strip_check(z * 1.25, tau);
        if shrunk.in_p {
            return (z, tau);
        }
    }
}

#[test]
fn modular_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let (z, tau) = random_point(&mut rng);
        let lhs = f(z, tau);
        let rhs = I / tau * f(I * z / tau, -1.0 / tau);
        assert!(
            (lhs - rhs).norm() < 1e-11,
            "z={z} tau={tau}: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn multiplication_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2usize, 3, 5] {
        for _ in 0..8 {
            let (z, tau) = random_point(&mut rng);
            let lhs = f(z, tau * n as f64);
            let mut rhs = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let arg = (z + PI * I * (n as f64 - 2.0 * k as f64 - 1.0)) / n as f64;
                rhs += f(arg, tau);
            }
            rhs /= n as f64;
            assert!(
                (lhs - rhs).norm() < 1e-11,
                "n={n} z={z} tau={tau}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn reflection_in_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..25 {
        let (z, tau) = random_point(&mut rng);
        let resid = f(z, tau) - f(-z, tau) + I * z / tau;
        assert!(resid.norm() < 1e-12, "z={z} tau={tau}: {resid}");
    }
}

#[test]
fn series_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    while checked < 20 {
        let (z, tau) = random_point(&mut rng);
        if tau.re.abs() < 0.2 {
            continue;
        }
        let q = f(z, tau);
        let s = f_series(z, tau, SeriesForm::Residue).unwrap().value;
        assert!((q - s).norm() < 1e-11, "z={z} tau={tau}: {q} vs {s}");
        if z.re > 0.3 {
            let e = f_series(z, tau, SeriesForm::Exponential).unwrap().value;
            assert!((q - e).norm() < 1e-10, "z={z} tau={tau}: {q} vs {e}");
        }
        checked += 1;
    }
}

#[test]
fn contour_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..15 {
        let (z, tau) = random_point(&mut rng);
        let a = f_contour(z, tau).unwrap().value;
        let b = f(z, tau);
        assert!((a - b).norm() < 1e-10, "z={z} tau={tau}: {a} vs {b}");
    }
}

#[test]
fn rational_closed_form_grid() {
    let zs = [
        c(0.0, 0.0),
        c(0.7, 0.0),
        c(-1.3, 0.4),
        c(2.0, -1.5),
        c(0.2, 2.5),
        c(-0.5, -2.9),
    ];
    for &(m, n) in &[(1u32, 1u32), (1, 2), (2, 1), (3, 2), (5, 3)] {
        let tau = I * (m as f64 / n as f64);
        for &z in &zs {
            if !strip_check(z, tau).in_s {
                continue;
            }
            let r = f_rational(z, m, n).unwrap().value;
            let q = f(z, tau);
            assert!((r - q).norm() < 1e-11, "{m}/{n} z={z}: {r} vs {q}");
        }
    }
}

#[test]
fn rational_removable_points() {
    // points where individual terms of the closed form are singular
    for &(m, n, z) in &[
        (1u32, 2u32, c(0.0, PI / 2.0)),
        (3, 2, c(0.0, PI / 2.0)),
        (5, 3, c(0.0, PI / 3.0)),
        (2, 1, c(0.0, 0.0)),
    ] {
        let r = f_rational(z, m, n).unwrap().value;
        let q = f(z, I * (m as f64 / n as f64));
        assert!((r - q).norm() < 1e-11, "{m}/{n} z={z}: {r} vs {q}");
    }
}
