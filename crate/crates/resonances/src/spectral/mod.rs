//! Collocation grids, quadratic-pencil linearization, the dense complex
//! eigensolver and resolution-based filtering of discrete spectra.

mod eig;
mod filter;
mod grid;
mod pencil;

pub use eig::{eig_dense, eig_dense_with, EigOptions};
pub use filter::{check_pairing, filter_spectrum, FilterOptions, Window};
pub use grid::{build_grid, CollocationGrid};
pub use pencil::{
    companion, linearize, pencil_residual, solve_pencil, Bc, ModelTag, PencilMatrices, Spectrum, SpectrumEntry,
};

/// |λ| below this is treated as the zero mode and excluded from counting.
pub const ZERO_MODE_TOL: f64 = 1e-6;
