//! Dirichlet-to-Neumann spectra of differential forms on Euclidean domains.
// Negated comparisons are NaN guards; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod feec;
pub mod geometry;
pub mod hodge;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod scalar;
pub mod sparse;
pub mod steklov;
pub mod verify;
