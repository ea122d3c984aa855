//! Grids, sampled complex fields and finite-difference operators.

mod diffop;
mod field;
mod grid;
mod sparse;

pub use diffop::{
    covariant_first, covariant_second, link_phase, pi_operator, pi_prefactor, pi_squared, Coupling, DiffOp, Link,
    Term,
};
pub use field::ComplexField;
pub use grid::{AxisSpec, Grid};
pub use sparse::CsrMatrix;
