use num_traits::Zero;

use super::matrix::{EchelonBuilder, RatMatrix};
use super::scalar::Rational;
use crate::error::{Error, Result};

/// A linear subspace of Q^ambient_dim stored as its reduced row echelon basis.
///
/// The RREF of a span is unique, so two `Subspace` values are equal exactly
/// when they describe the same subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RatMatrix,
}

/// What [`subspace_query`] should compute.
#[derive(Clone, Debug)]
pub enum SubspaceQuery<'a> {
    Dim,
    Sum,
    ContainsVector(&'a [Rational]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryAnswer {
    Dim(usize),
    Sum(Subspace),
    Contains(bool),
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RatMatrix::zeros(0, ambient_dim) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: RatMatrix::identity(ambient_dim) }
    }

    /// Span of the given generators (any number, possibly dependent).
    pub fn span(ambient_dim: usize, generators: &[Vec<Rational>]) -> Result<Self> {
        let mut b = EchelonBuilder::new(ambient_dim);
        for g in generators {
            if g.len() != ambient_dim {
                return Err(Error::AmbientMismatch { left: ambient_dim, right: g.len() });
            }
            b.insert_rational(g);
        }
        Ok(Self::from_builder(&b))
    }

    pub fn from_builder(b: &EchelonBuilder) -> Self {
        Subspace { ambient_dim: b.cols(), basis: b.to_rref() }
    }

    pub fn from_matrix(m: &RatMatrix) -> Self {
        let (basis, _) = m.rref_rank();
        Subspace { ambient_dim: m.cols(), basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    fn check_ambient(&self, other: usize) -> Result<()> {
        if self.ambient_dim != other {
            return Err(Error::AmbientMismatch { left: self.ambient_dim, right: other });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient_dim)?;
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    pub fn contains_vector(&self, v: &[Rational]) -> Result<bool> {
        self.check_ambient(v.len())?;
        if v.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        let mut b = EchelonBuilder::new(self.ambient_dim);
        for r in 0..self.dim() {
            b.insert_rational(self.basis.row(r));
        }
        Ok(b.contains(v))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other.ambient_dim)?;
        Ok(self.sum(other)?.dim() == self.dim())
    }

    /// `A ∩ B` via the left kernel of the stacked bases: if `λ·A + μ·B = 0`
    /// then `λ·A` lies in both.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient_dim)?;
        let stacked = self.basis.vstack(&other.basis)?;
        let kernel = stacked.transpose().kernel();
        let a = self.dim();
        let gens: Vec<Vec<Rational>> = kernel
            .iter()
            .map(|coeffs| {
                let mut v = vec![Rational::zero(); self.ambient_dim];
                for (i, c) in coeffs[..a].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (x, b) in v.iter_mut().zip(self.basis.row(i)) {
                        *x += c * b;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient_dim, &gens)
    }
}

/// Dimension, sum, or membership query; sums and membership require matching ambient dimensions.
pub fn subspace_query(a: &Subspace, b: &Subspace, mode: SubspaceQuery<'_>) -> Result<QueryAnswer> {
    match mode {
        SubspaceQuery::Dim => Ok(QueryAnswer::Dim(a.dim())),
        SubspaceQuery::Sum => Ok(QueryAnswer::Sum(a.sum(b)?)),
        SubspaceQuery::ContainsVector(v) => Ok(QueryAnswer::Contains(a.contains_vector(v)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::scalar::rat_int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn sum_of_axes() {
        let e1 = Subspace::span(3, &[v(&[1, 0, 0])]).unwrap();
        let e2 = Subspace::span(3, &[v(&[0, 1, 0])]).unwrap();
        match subspace_query(&e1, &e2, SubspaceQuery::Sum).unwrap() {
            QueryAnswer::Sum(s) => assert_eq!(s.dim(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn contains_diagonal() {
        let s = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let d = v(&[1, 1, 0]);
        assert_eq!(
            subspace_query(&s, &s, SubspaceQuery::ContainsVector(&d)).unwrap(),
            QueryAnswer::Contains(true)
        );
        assert!(!s.contains_vector(&v(&[0, 0, 1])).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert!(matches!(a.sum(&b), Err(Error::AmbientMismatch { .. })));
        assert!(a.contains_vector(&v(&[1, 2, 3])).is_err());
    }

    #[test]
    fn different_generators_same_subspace() {
        let a = Subspace::span(3, &[v(&[1, 1, 0]), v(&[0, 1, 1])]).unwrap();
        let b = Subspace::span(3, &[v(&[1, 2, 1]), v(&[2, 1, -1]), v(&[3, 3, 0])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn intersection_of_planes_is_a_line() {
        let a = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = Subspace::span(3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i, Subspace::span(3, &[v(&[0, 5, 0])]).unwrap());
    }
}
