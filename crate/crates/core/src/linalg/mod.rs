//! Exact linear algebra over Z, Q and F_p.

pub mod field;
pub mod snf;
pub mod sparse;

pub use field::{Field, Mat, PrimeField, Rationals};
pub use snf::{integer_kernel_basis, invariant_factors, smith_normal_form, IntMatrix, SnfResult};
pub use sparse::{int_invariants, int_kernel, modp_kernel, modp_rank, IntInvariants, SparseCol, SparseMatrix};
