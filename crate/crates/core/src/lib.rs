//! Wiener-Hopf factors, the Mellin transform and the density of the supremum of
//! strictly stable Levy processes.

pub mod density;
pub mod error;
pub mod eval;
pub mod ftau;
pub mod mc;
pub mod mellin;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod wiener_hopf;

pub use error::{Error, Result};
pub use eval::{EvalResult, Method};
pub use params::{
    detect_ckl, detect_ckl_signed, dual, inverse_alpha, make_params, params_from_beta,
    rho_from_beta, CklClass, Parameters, RationalAlpha,
};
