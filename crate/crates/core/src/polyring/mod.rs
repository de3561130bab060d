//! Polynomial arithmetic: homogeneous forms, graded ideal pieces, general
//! multivariate polynomials, and one-variable polynomials.

pub mod hompoly;
pub mod ideal;
pub mod mpoly;
pub mod univariate;

pub use hompoly::{monomial_basis, HomPoly, HomPolyJson, MonomialOrder, MultiIndex, TermJson};
pub use ideal::{dim_graded, hilbert_value, ideal_graded_piece, is_empty_locus, projective_locus, Locus, LocusConfig};
pub use mpoly::MPoly;
pub use univariate::UniPoly;
