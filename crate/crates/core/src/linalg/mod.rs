//! Eigen-solvers and factorisations used by the separation solver.

pub mod band_reduce;
pub mod banded;
pub mod dense;
pub mod subspace;
pub mod tridiag;

pub use band_reduce::band_eigenvalues;
pub use banded::{count_below, BandLdl};
pub use subspace::{lowest_eigenpairs, Eigenpairs, SubspaceOptions};
