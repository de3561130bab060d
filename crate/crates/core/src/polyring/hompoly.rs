use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::mpoly::MPoly;
use super::univariate::UniPoly;
use crate::error::{Error, Result};
use crate::exact_algebra::{parse_rational, rat_string, Field, Rational};

/// Exponent vector `(i_0, …, i_n)`; lies in `T_d` when it sums to `d`.
pub type MultiIndex = Vec<u32>;

/// All monomials of degree `D` in `n+1` variables, lexicographically descending.
///
/// Positions in this list are the coordinates of the degree-`D` piece `V_D`.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    n: usize,
    degree: u32,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialOrder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

pub fn monomial_basis(n: usize, degree: u32) -> MonomialOrder {
    fn fill(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            fill(prefix, remaining - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut monomials = Vec::new();
    fill(&mut Vec::with_capacity(n + 1), degree, n + 1, &mut monomials);
    let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    MonomialOrder { n, degree, monomials, index }
}

/// A homogeneous form of fixed degree in `x_0, …, x_n` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    n: usize,
    degree: u32,
    poly: MPoly,
}

impl HomPoly {
    pub fn new(n: usize, degree: u32, poly: MPoly) -> Result<Self> {
        if poly.nvars() != n + 1 {
            return Err(Error::InvalidInput(format!(
                "form in P^{n} needs {} variables, got {}",
                n + 1,
                poly.nvars()
            )));
        }
        if let Some(e) = poly.terms().keys().find(|e| e.iter().sum::<u32>() != degree) {
            return Err(Error::InvalidInput(format!("term {e:?} does not have degree {degree}")));
        }
        Ok(HomPoly { n, degree, poly })
    }

    pub fn from_terms(n: usize, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Result<Self> {
        let poly = MPoly::from_terms(n + 1, terms)
            .ok_or_else(|| Error::InvalidInput(format!("exponent vectors must have length {}", n + 1)))?;
        Self::new(n, degree, poly)
    }

    pub fn zero(n: usize, degree: u32) -> Self {
        HomPoly { n, degree, poly: MPoly::zero(n + 1) }
    }

    pub fn one(n: usize) -> Self {
        HomPoly { n, degree: 0, poly: MPoly::one(n + 1) }
    }

    pub fn var(n: usize, i: usize) -> Self {
        HomPoly { n, degree: 1, poly: MPoly::var(n + 1, i) }
    }

    pub fn monomial(n: usize, exp: MultiIndex, c: Rational) -> Self {
        let degree = exp.iter().sum();
        HomPoly { n, degree, poly: MPoly::monomial(n + 1, exp, c) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &MPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn mul(&self, o: &HomPoly) -> HomPoly {
        assert_eq!(self.n, o.n, "forms live in different projective spaces");
        HomPoly { n: self.n, degree: self.degree + o.degree, poly: self.poly.mul(&o.poly) }
    }

    pub fn pow(&self, e: u32) -> HomPoly {
        HomPoly { n: self.n, degree: self.degree * e, poly: self.poly.pow(e) }
    }

    pub fn scale(&self, s: &Rational) -> HomPoly {
        HomPoly { n: self.n, degree: self.degree, poly: self.poly.scale(s) }
    }

    pub fn add(&self, o: &HomPoly) -> Result<HomPoly> {
        if self.n != o.n || self.degree != o.degree {
            return Err(Error::InvalidInput("sum of forms with different degree or ambient space".into()));
        }
        Ok(HomPoly { n: self.n, degree: self.degree, poly: self.poly.add(&o.poly) })
    }

    /// `Σ c_i · forms_i`; all forms must share `n` and degree.
    pub fn linear_combination(forms: &[&HomPoly], coeffs: &[Rational]) -> Result<HomPoly> {
        let first = forms.first().ok_or_else(|| Error::InvalidInput("empty combination".into()))?;
        let mut acc = HomPoly::zero(first.n, first.degree);
        for (f, c) in forms.iter().zip(coeffs) {
            acc = acc.add(&f.scale(c))?;
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.poly.eval(point)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.poly.eval_complex(point)
    }

    /// `Q(f_0, …, f_n)` for one-variable polynomial components.
    pub fn compose_curve<F: Field>(&self, comps: &[UniPoly<F>]) -> UniPoly<F> {
        assert_eq!(comps.len(), self.n + 1, "curve must have n+1 components");
        let mut powers: Vec<Vec<UniPoly<F>>> = comps.iter().map(|_| vec![UniPoly::one()]).collect();
        let mut acc = UniPoly::zero();
        for (e, c) in self.poly.terms() {
            let mut t = UniPoly::constant(F::from_rational(c.clone()));
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&comps[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Coordinates with respect to `order` (which must have this degree).
    pub fn to_vector(&self, order: &MonomialOrder) -> Vec<Rational> {
        assert_eq!(order.degree(), self.degree);
        let mut v = vec![Rational::zero(); order.len()];
        for (e, c) in self.poly.terms() {
            v[order.position(e).expect("monomial of the right degree")] = c.clone();
        }
        v
    }

    pub fn from_vector(order: &MonomialOrder, v: &[Rational]) -> HomPoly {
        let terms = order.monomials().iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e.clone(), c.clone()));
        HomPoly {
            n: order.n(),
            degree: order.degree(),
            poly: MPoly::from_terms(order.n() + 1, terms).expect("order exponents have the right length"),
        }
    }

    pub fn to_json(&self) -> HomPolyJson {
        HomPolyJson {
            n: self.n,
            degree: self.degree,
            terms: self
                .poly
                .terms()
                .iter()
                .rev()
                .map(|(e, c)| TermJson { exp: e.clone(), coef: rat_string(c) })
                .collect(),
        }
    }

    pub fn from_json(j: &HomPolyJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            terms.push((t.exp.clone(), parse_rational(&t.coef)?));
        }
        Self::from_terms(j.n, j.degree, terms)
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.n).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.poly.fmt_with(&names))
    }
}

/// One term of a serialized polynomial; `coef` is an exact `"p/q"` or decimal string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

/// `{"n": int, "degree": int, "terms": [{"exp": [...], "coef": "p/q"}]}`
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HomPolyJson {
    pub n: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

impl Serialize for HomPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HomPolyJson::deserialize(d)?;
        HomPoly::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat_int, GaussRational};
    use num_traits::One;

    #[test]
    fn monomial_basis_examples() {
        let b = monomial_basis(1, 2);
        assert_eq!(b.monomials(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(3, 0).monomials(), &[vec![0, 0, 0, 0]]);
    }

    #[test]
    fn power_and_evaluation() {
        let x0x1 = HomPoly::monomial(1, vec![1, 1], rat_int(1));
        assert_eq!(x0x1.pow(2), HomPoly::monomial(1, vec![2, 2], rat_int(1)));
        let q = HomPoly::from_terms(1, 2, [(vec![2, 0], rat_int(1)), (vec![0, 2], rat_int(1))]).unwrap();
        assert_eq!(q.eval(&[rat_int(1), rat_int(1)]), rat_int(2));
        assert_eq!(q.pow(0), HomPoly::one(1));
    }

    #[test]
    fn rejects_inhomogeneous_terms() {
        assert!(HomPoly::from_terms(1, 2, [(vec![1, 0], rat_int(1))]).is_err());
        assert!(HomPoly::from_terms(1, 1, [(vec![1, 0, 0], rat_int(1))]).is_err());
    }

    #[test]
    fn json_rejects_float_coefficients() {
        let bad = r#"{"n":1,"degree":1,"terms":[{"exp":[1,0],"coef":0.5}]}"#;
        assert!(serde_json::from_str::<HomPoly>(bad).is_err());
        let good = r#"{"n":1,"degree":1,"terms":[{"exp":[1,0],"coef":"1/2"},{"exp":[0,1],"coef":"0.25"}]}"#;
        let q: HomPoly = serde_json::from_str(good).unwrap();
        assert_eq!(q.to_string(), "1/2*x0 + 1/4*x1");
        let back: HomPoly = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn composition_with_a_curve() {
        // (x0 + x1)(1, z) = 1 + z
        let q = HomPoly::var(1, 0).add(&HomPoly::var(1, 1)).unwrap();
        let curve = vec![UniPoly::<GaussRational>::one(), UniPoly::z()];
        let g = q.compose_curve(&curve);
        assert_eq!(g, UniPoly::new(vec![GaussRational::one(), GaussRational::one()]));
    }
}
