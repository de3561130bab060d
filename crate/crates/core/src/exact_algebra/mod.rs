//! Exact rational linear algebra.

pub mod matrix;
pub mod scalar;
pub mod subspace;

pub use matrix::{integer_row, rref_rank, EchelonBuilder, RatMatrix};
pub use scalar::{parse_rational, rat, rat_int, rat_string, rat_to_f64, Field, GaussRational, Rational};
pub use subspace::{subspace_query, QueryAnswer, Subspace, SubspaceQuery};
