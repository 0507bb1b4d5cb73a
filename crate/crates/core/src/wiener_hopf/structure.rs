//! Zeros and poles of `w -> phi(e^w)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ftau::LatticePoint;
use crate::params::Parameters;

/// Which half of the `w`-plane a lattice family occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    /// `m, n >= 0`
    Upper,
    /// `m, n < 0`
    Lower,
}

/// A zero or pole `w_{m,n} +- pi i rho` of `phi(e^w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSite {
    pub point: LatticePoint,
    pub location: Complex64,
    pub half: Half,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleZeroReport {
    pub zeros: Vec<LatticeSite>,
    pub poles: Vec<LatticeSite>,
    /// The simple poles `-exp(+-pi i (rho - 1/alpha))` of `phi(z)`, present iff `alpha rho > 1`.
    pub simple_poles_of_phi: Vec<Complex64>,
}

/// Zeros `w_{m,n} + pi i rho` (`m,n >= 0`) and `w_{m,n} - pi i rho` (`m,n < 0`), and poles
/// with the signs of `pi i rho` swapped, for `|m|, |n| <= depth`.
pub fn pole_zero_report(params: &Parameters, depth: usize) -> PoleZeroReport {
    let (alpha, rho) = (params.alpha(), params.rho());
    let shift = Complex64::new(0.0, PI * rho);
    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    let d = depth as i64;
    for (half, range, sign) in [(Half::Upper, 0..d, 1.0), (Half::Lower, -d..0, -1.0)] {
        for m in range.clone() {
            for n in range.clone() {
                let point = LatticePoint::new(m, n, alpha);
                zeros.push(LatticeSite {
                    point,
                    location: point.w + sign * shift,
                    half,
                });
                poles.push(LatticeSite {
                    point,
                    location: point.w - sign * shift,
                    half,
                });
            }
        }
    }
    let simple_poles_of_phi = if alpha * rho > 1.0 {
        let t = PI * (rho - 1.0 / alpha);
        vec![
            -Complex64::from_polar(1.0, t),
            -Complex64::from_polar(1.0, -t),
        ]
    } else {
        Vec::new()
    };
    PoleZeroReport {
        zeros,
        poles,
        simple_poles_of_phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{dual, make_params};
    use crate::wiener_hopf::phi_exp;

    #[test]
    fn nearest_zero() {
        let p = make_params(1.5, 0.5).unwrap();
        let r = pole_zero_report(&p, 2);
        let z = r.zeros[0];
        assert_eq!((z.point.m, z.point.n, z.half), (0, 0, Half::Upper));
        let expected = PI * (2.0 / 3.0 + 1.0 + 0.5);
        assert!((z.location - Complex64::new(0.0, expected)).norm() < 1e-14);
        assert!(r.simple_poles_of_phi.is_empty());
    }

    #[test]
    fn catalogue_matches_double_gamma() {
        let p = make_params(2f64.sqrt(), 0.45).unwrap();
        let r = pole_zero_report(&p, 2);
        for s in &r.zeros {
            let v = phi_exp(&p, s.location + Complex64::new(1e-5, 0.0)).unwrap();
            assert!(v.value.norm() < 1e-3, "zero {:?}: {}", s.point, v.value);
        }
        for s in &r.poles {
            match phi_exp(&p, s.location + Complex64::new(1e-5, 0.0)) {
                Ok(v) => assert!(v.value.norm() > 1e3, "pole {:?}: {}", s.point, v.value),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn dual_swaps_shift() {
        let p = make_params(1.3, 0.4).unwrap();
        let a = pole_zero_report(&p, 1);
        let b = pole_zero_report(&dual(&p), 1);
        // the dual zero w + pi i (1 - rho) is the original pole w - pi i rho shifted by pi i
        let shift = Complex64::new(0.0, PI);
        assert!((b.zeros[0].location - (a.poles[0].location + shift)).norm() < 1e-12);
    }
}
