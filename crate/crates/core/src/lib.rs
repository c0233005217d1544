//! Numerical laboratory for crossed-product kernel algebras of `Z^d`
//! actions: the convolution algebra `C_c(G x X)`, its fiber
//! representations, trace functionals, the integrated density of states,
//! Bloch band theory for periodic quotients and Fourier duality. Every
//! identity that equates two computable quantities is exposed as a
//! cross-check.

pub mod algebra;
pub mod coeff;
pub mod duality;
pub mod dynsys;
pub mod eigen;
pub mod error;
pub mod presets;
pub mod repr;
pub mod spectral;
pub mod trace;

pub use error::{LabError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
