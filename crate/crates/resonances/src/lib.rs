//! Quasinormal modes and scattering resonances computed as eigenvalues of
//! discretized quadratic operator pencils `P(λ) = P₂ + λP₁ + λ²P₀`.
//!
//! Two model families are provided: the radial Schwarzschild–de Sitter
//! operator per angular momentum ([`sds`]) and the hyperbolic cylinder
//! per Fourier mode ([`funnel`]). [`symbols`] checks the symbol-level
//! hypotheses behind both, [`counting`] turns spectra into counting curves.

pub mod background;
pub mod counting;
pub mod error;
pub mod exec;
pub mod funnel;
pub mod io;
pub mod ode;
pub mod sds;
pub mod spectral;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
