use std::fmt;

use num_complex::Complex64;

/// Tag recording which evaluation path produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Barnes product for `log G` with an Euler-Maclaurin tail.
    BarnesProduct,
    /// Double-exponential quadrature along the real line.
    Quadrature,
    /// Residue series in `exp(z + 2 pi (k + 1/2) tau)`.
    PoleSeries,
    /// Series in `exp(-k z)` valid for `Re z > 0`.
    ExponentialSeries,
    /// Closed form of `F(z; i m/n)` for rational `m/n`.
    RationalClosedForm,
    /// Quadrature of the `sinh * sinh` representation along `R + i eps`.
    ContourIntegral,
    DoubleGamma,
    RationalAlpha,
    CklProduct,
    LogSeries,
    QProduct,
    DarlingQuadrature,
    GammaProduct,
    /// Finite gamma/sine products for processes in a class `C(k,l)`.
    CklFinite,
    /// Convergent density series for processes in a class `C(k,l)`.
    CklConvergent,
    /// Asymptotic density expansion (class `C(k,l)` or generic) as `x -> 0`.
    AsymptoticSmall,
    /// Asymptotic density expansion (class `C(k,l)` or generic) as `x -> infinity`.
    AsymptoticLarge,
    MellinInversion,
    /// Mean value over a small circle, used at removable singularities.
    CircleAverage,
    Direct,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BarnesProduct => "barnes-product",
            Method::Quadrature => "quadrature",
            Method::PoleSeries => "pole-series",
            Method::ExponentialSeries => "exponential-series",
            Method::RationalClosedForm => "rational-closed-form",
            Method::ContourIntegral => "contour-integral",
            Method::DoubleGamma => "double-gamma",
            Method::RationalAlpha => "rational-alpha",
            Method::CklProduct => "ckl-product",
            Method::LogSeries => "log-series",
            Method::QProduct => "q-product",
            Method::DarlingQuadrature => "darling-quadrature",
            Method::GammaProduct => "gamma-product",
            Method::CklFinite => "ckl-finite",
            Method::CklConvergent => "ckl-convergent",
            Method::AsymptoticSmall => "asymptotic-small-x",
            Method::AsymptoticLarge => "asymptotic-large-x",
            Method::MellinInversion => "mellin-inversion",
            Method::CircleAverage => "circle-average",
            Method::Direct => "direct",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed value together with an error estimate and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    /// Estimated absolute error; always `>= 0`.
    pub abs_err: f64,
    /// Number of series terms or quadrature nodes used.
    pub terms: usize,
    pub method: Method,
    /// Set when the argument is close to a zero or pole and the value is less reliable.
    pub near_singular: bool,
}

impl EvalResult {
    pub fn new(value: Complex64, abs_err: f64, terms: usize, method: Method) -> Self {
        EvalResult {
            value,
            abs_err: abs_err.abs(),
            terms,
            method,
            near_singular: false,
        }
    }

    pub fn real(value: f64, abs_err: f64, terms: usize, method: Method) -> Self {
        Self::new(Complex64::new(value, 0.0), abs_err, terms, method)
    }

    /// Real part of the value.
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn flagged(mut self, near_singular: bool) -> Self {
        self.near_singular |= near_singular;
        self
    }
}
