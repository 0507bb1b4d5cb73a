//! Special functions: complex log-gamma and polygamma, the Clausen function,
//! q-Pochhammer symbols and the Barnes double gamma function.

pub mod barnes;
pub mod clausen;
pub mod gamma;
pub mod qpoch;

pub use barnes::{barnes_constants, lattice_zero, log_barnes_g, BarnesConstants};
pub use clausen::clausen;
pub use gamma::{digamma, gamma_real, ln_gamma, ln_gamma_real, polygamma, rgamma_real};
pub use qpoch::{qpochhammer, qpochhammer_inf, QLength};

use num_complex::Complex64;

/// Compensated (Neumaier) summation of complex numbers.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CSum {
    sum: Complex64,
    comp: Complex64,
    magnitude: f64,
}

impl CSum {
    pub(crate) fn add(&mut self, x: Complex64) {
        self.sum = Complex64::new(
            neumaier(&mut self.comp.re, self.sum.re, x.re),
            neumaier(&mut self.comp.im, self.sum.im, x.im),
        );
        self.magnitude += x.norm();
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    /// Sum of the moduli of all added terms, for rounding-error estimates.
    pub(crate) fn magnitude(&self) -> f64 {
        self.magnitude
    }
}

fn neumaier(comp: &mut f64, sum: f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}
