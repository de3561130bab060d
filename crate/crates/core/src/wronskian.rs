//! Generalized Wronskians `det(D^{α_i} F_j)` of polynomial tuples.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::{rat, rat_string, Field, RatMatrix, Rational};
use crate::polyring::{monomial_basis, MPoly, UniPoly};

/// Matrices up to this size get an exact symbolic determinant when a
/// numerical non-vanishing certificate is not found.
pub const SYMBOLIC_DET_LIMIT: usize = 6;

const SAMPLE_POINTS: usize = 3;
const SEARCH_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTuple {
    pub m: usize,
    pub entries: Vec<MPoly>,
}

impl SymbolicTuple {
    pub fn new(m: usize, entries: Vec<MPoly>) -> Result<Self> {
        if entries.is_empty() || entries.iter().all(MPoly::is_zero) {
            return Err(Error::InvalidInput("tuple needs a nonzero entry".into()));
        }
        if let Some(e) = entries.iter().find(|e| e.nvars() != m) {
            return Err(Error::InvalidInput(format!("entry has {} variables, expected {m}", e.nvars())));
        }
        Ok(SymbolicTuple { m, entries })
    }

    /// One-variable tuple from rational coefficient lists (ascending).
    pub fn univariate(polys: &[UniPoly<Rational>]) -> Result<Self> {
        let entries = polys
            .iter()
            .map(|p| {
                MPoly::from_terms(1, p.coeffs().iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())))
                    .expect("one variable")
            })
            .collect();
        Self::new(1, entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled_by(&self, h: &MPoly) -> SymbolicTuple {
        SymbolicTuple { m: self.m, entries: self.entries.iter().map(|f| f.mul(h)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleSet {
    pub m: usize,
    pub alphas: Vec<Vec<u32>>,
}

impl AdmissibleSet {
    /// `|α_i| ≤ i` for every `i`.
    pub fn is_admissible(&self) -> bool {
        self.alphas.iter().enumerate().all(|(i, a)| a.iter().sum::<u32>() as usize <= i)
    }

    /// `l = Σ |α_i|`.
    pub fn weight(&self) -> u32 {
        self.alphas.iter().flatten().sum()
    }
}

fn derivative_row(f: &SymbolicTuple, alpha: &[u32]) -> Vec<MPoly> {
    f.entries.iter().map(|e| e.derivative_multi(alpha)).collect()
}

fn eval_rows(rows: &[Vec<MPoly>], point: &[Rational]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|p| p.eval(point)).collect()).collect()
}

fn rank_of(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    RatMatrix::from_rows(rows[0].len(), rows).expect("rows share a width").rank()
}

fn coefficient_matrix(f: &SymbolicTuple) -> (Vec<Vec<u32>>, RatMatrix) {
    let mut monos: Vec<Vec<u32>> = f.entries.iter().flat_map(|e| e.terms().keys().cloned()).collect();
    monos.sort();
    monos.dedup();
    let rows: Vec<Vec<Rational>> = f.entries.iter().map(|e| monos.iter().map(|m| e.coeff(m)).collect()).collect();
    (monos.clone(), RatMatrix::from_rows(monos.len(), &rows).expect("consistent widths"))
}

/// A nontrivial `c` with `Σ c_j F_j = 0`, if one exists.
pub fn dependence(f: &SymbolicTuple) -> Option<Vec<Rational>> {
    let (_, m) = coefficient_matrix(f);
    if m.rank() == f.len() {
        return None;
    }
    m.transpose().kernel().into_iter().next()
}

fn describe_combination(c: &[Rational]) -> String {
    let parts: Vec<String> =
        c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| format!("({})*F{j}", rat_string(x))).collect();
    format!("{} = 0", parts.join(" + "))
}

/// Greedy search in graded-lexicographic order: `α_i` is the first
/// multi-index of order `≤ i` whose derivative row is independent of the rows
/// already chosen. Independence is certified by a nonzero evaluation.
pub fn admissible_search(f: &SymbolicTuple) -> Result<AdmissibleSet> {
    if let Some(c) = dependence(f) {
        return Err(Error::Dependence { combination: describe_combination(&c) });
    }
    let size = f.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let points: Vec<Vec<Rational>> = (0..SAMPLE_POINTS)
        .map(|_| (0..f.m).map(|_| rat(rng.random_range(-997..=997), rng.random_range(1..=97))).collect())
        .collect();
    let candidates: Vec<Vec<u32>> =
        (0..size as u32).flat_map(|deg| monomial_basis(f.m - 1, deg).monomials().to_vec()).collect();
    let mut alphas: Vec<Vec<u32>> = vec![vec![0; f.m]];
    let mut rows = vec![derivative_row(f, &alphas[0])];
    for i in 1..size {
        let mut found = None;
        for a in candidates.iter().filter(|a| a.iter().sum::<u32>() as usize <= i) {
            if alphas.contains(a) {
                continue;
            }
            let row = derivative_row(f, a);
            let mut trial = rows.clone();
            trial.push(row.clone());
            if points.iter().any(|pt| rank_of(&eval_rows(&trial, pt)) == i + 1) {
                found = Some((a.clone(), row));
                break;
            }
        }
        let (a, row) = found.ok_or_else(|| {
            Error::NumericFailure(format!("no admissible derivative of order ≤ {i} found at the sample points"))
        })?;
        alphas.push(a);
        rows.push(row);
    }
    Ok(AdmissibleSet { m: f.m, alphas })
}

pub fn wronskian_matrix(f: &SymbolicTuple, a: &AdmissibleSet) -> Vec<Vec<MPoly>> {
    a.alphas.iter().map(|alpha| derivative_row(f, alpha)).collect()
}

/// Fraction-free (Bareiss) determinant over the polynomial ring.
pub fn det_bareiss(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    let nvars = m.first().and_then(|r| r.first()).map_or(0, MPoly::nvars);
    if n == 0 {
        return MPoly::one(nvars);
    }
    let mut sign = false;
    let mut prev = MPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return MPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

/// Cofactor expansion along the first row, kept independent of [`det_bareiss`].
pub fn det_laplace(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    let nvars = m.first().and_then(|r| r.first()).map_or(0, MPoly::nvars);
    if n == 0 {
        return MPoly::one(nvars);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(nvars);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][c].mul(&det_laplace(&minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

pub fn det_complex(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].norm().total_cmp(&m[b][k].norm())).unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
        }
    }
    det
}

pub enum WronskianValue {
    Symbolic(MPoly),
    Numeric(Complex64),
}

/// Symbolic determinant (`point = None`) or its value at a complex point.
pub fn wronskian_eval(f: &SymbolicTuple, a: &AdmissibleSet, point: Option<&[Complex64]>) -> Result<WronskianValue> {
    if a.alphas.len() != f.len() || a.m != f.m {
        return Err(Error::InvalidInput("admissible set does not fit the tuple".into()));
    }
    let mat = wronskian_matrix(f, a);
    Ok(match point {
        None => WronskianValue::Symbolic(det_bareiss(mat)),
        Some(z) => {
            if z.len() != f.m {
                return Err(Error::InvalidInput(format!("point needs {} coordinates", f.m)));
            }
            WronskianValue::Numeric(det_complex(
                mat.iter().map(|r| r.iter().map(|p| p.eval_complex(z)).collect()).collect(),
            ))
        }
    })
}

pub fn wronskian_symbolic(f: &SymbolicTuple, a: &AdmissibleSet) -> MPoly {
    det_bareiss(wronskian_matrix(f, a))
}

/// Non-vanishing test: nonzero at a seeded rational point certifies; otherwise
/// the symbolic expansion decides for small sizes, and retries at fresh points
/// decide beyond that.
pub fn is_identically_zero(f: &SymbolicTuple, a: &AdmissibleSet, seed: u64) -> bool {
    let mat = wronskian_matrix(f, a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_POINTS {
        let pt: Vec<Rational> = (0..f.m).map(|_| rat(rng.random_range(-997..=997), rng.random_range(1..=97))).collect();
        if rank_of(&eval_rows(&mat, &pt)) == mat.len() {
            return false;
        }
    }
    if mat.len() <= SYMBOLIC_DET_LIMIT {
        return det_bareiss(mat).is_zero();
    }
    true
}

/// A point for [`vanishing_order`]: an exact value or the roots of a polynomial.
#[derive(Clone, Debug)]
pub enum RootPoint<F: Field> {
    Exact(F),
    /// Every root of this nonconstant polynomial. Must be irreducible, or a
    /// coprime-basis factor of the polynomial being examined, so all of its
    /// roots share one multiplicity.
    Algebraic(UniPoly<F>),
}

pub fn vanishing_order<F: Field>(poly: &UniPoly<F>, point: &RootPoint<F>) -> Result<u32> {
    if poly.is_zero() {
        return Err(Error::InvalidInput("vanishing order of the zero polynomial".into()));
    }
    let g = match point {
        RootPoint::Exact(a) => UniPoly::linear_root(a.clone()),
        RootPoint::Algebraic(m) => {
            if m.is_constant() {
                return Err(Error::InvalidInput("minimal polynomial must be nonconstant".into()));
            }
            m.clone()
        }
    };
    Ok(poly.multiplicity_of(&g))
}

/// Trapezoidal circle average at radius `r` of
/// `|z^{l} · W(F) / (L_0(F) ··· L_L(F))|^t`, `l = Σ|α_i|`.
pub fn log_derivative_integrand(
    f: &SymbolicTuple,
    a: &AdmissibleSet,
    forms: &[Vec<Rational>],
    r: f64,
    nodes: usize,
    t: f64,
) -> Result<f64> {
    if f.m != 1 {
        return Err(Error::InvalidInput("integrand is defined for one variable".into()));
    }
    if forms.len() != f.len() || forms.iter().any(|l| l.len() != f.len()) {
        return Err(Error::InvalidInput("need L+1 linear forms in L+1 variables".into()));
    }
    if rank_of(forms) != forms.len() {
        return Err(Error::InvalidInput("linear forms are dependent".into()));
    }
    if !(t > 0.0 && t * (a.weight() as f64) < 1.0) {
        return Err(Error::InvalidInput(format!("need 0 < t·l < 1, got t = {t}, l = {}", a.weight())));
    }
    let w = wronskian_symbolic(f, a);
    let l = a.weight() as i32;
    let cforms: Vec<Vec<f64>> = forms.iter().map(|row| row.iter().map(crate::exact_algebra::rat_to_f64).collect()).collect();
    let integrand = |z: Complex64| -> f64 {
        let vals: Vec<Complex64> = f.entries.iter().map(|e| e.eval_complex(&[z])).collect();
        let den = cforms.iter().fold(Complex64::new(1.0, 0.0), |acc, row| {
            acc * row.iter().zip(&vals).map(|(c, v)| v * c).sum::<Complex64>()
        });
        (z.powi(l) * w.eval_complex(&[z]) / den).norm().powf(t)
    };
    for attempt in 0..4 {
        let shift = attempt as f64 * 0.37 / nodes as f64;
        let vals: Vec<f64> = (0..nodes)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + shift) / nodes as f64;
                integrand(Complex64::from_polar(r, th))
            })
            .collect();
        if vals.iter().all(|v| v.is_finite()) {
            return Ok(vals.iter().sum::<f64>() / nodes as f64);
        }
    }
    Err(Error::NumericFailure(format!("integrand has a pole on every jittered node set at r = {r}")))
}

/// `det(f_j^{(i)})` for one-variable polynomials over any exact field (Bareiss).
pub fn ordinary_wronskian<F: Field>(polys: &[UniPoly<F>]) -> UniPoly<F> {
    let n = polys.len();
    if n == 0 {
        return UniPoly::one();
    }
    let mut m: Vec<Vec<UniPoly<F>>> = Vec::with_capacity(n);
    let mut row = polys.to_vec();
    for _ in 0..n {
        let next = row.iter().map(UniPoly::derivative).collect();
        m.push(std::mem::replace(&mut row, next));
    }
    let mut sign = false;
    let mut prev = UniPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

pub fn one_var_poly(coeffs: &[i64]) -> MPoly {
    MPoly::from_terms(1, coeffs.iter().enumerate().map(|(k, &c)| (vec![k as u32], Rational::from_integer(c.into()))))
        .expect("one variable")
}

/// `MPoly` in one variable to a dense polynomial.
pub fn to_univariate(p: &MPoly) -> UniPoly<Rational> {
    assert_eq!(p.nvars(), 1);
    let deg = p.total_degree().unwrap_or(0) as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for (e, v) in p.terms() {
        c[e[0] as usize] = v.clone();
    }
    UniPoly::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat_int;

    fn z_pow(k: u32, m: usize, var: usize) -> MPoly {
        let mut e = vec![0; m];
        e[var] = k;
        MPoly::monomial(m, e, rat_int(1))
    }

    #[test]
    fn ordinary_wronskian_of_powers() {
        let f = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 1]), one_var_poly(&[0, 0, 1])]).unwrap();
        let a = admissible_search(&f).unwrap();
        assert_eq!(a.alphas, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(wronskian_symbolic(&f, &a), MPoly::constant(1, rat_int(2)));
    }

    #[test]
    fn two_variable_example() {
        let f = SymbolicTuple::new(2, vec![MPoly::one(2), z_pow(1, 2, 0), z_pow(1, 2, 1)]).unwrap();
        let a = admissible_search(&f).unwrap();
        assert_eq!(a.alphas, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(a.is_admissible());
        assert_eq!(wronskian_symbolic(&f, &a), MPoly::one(2));
    }

    #[test]
    fn dependence_is_reported() {
        let f = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 1]), one_var_poly(&[1, 1])]).unwrap();
        match admissible_search(&f) {
            Err(Error::Dependence { combination }) => assert!(combination.contains("F2")),
            other => panic!("expected dependence, got {other:?}"),
        }
    }

    #[test]
    fn small_examples_and_scaling() {
        let f = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 1])]).unwrap();
        let a = admissible_search(&f).unwrap();
        assert_eq!(wronskian_symbolic(&f, &a), MPoly::one(1));
        let h = one_var_poly(&[1, 1]);
        assert_eq!(wronskian_symbolic(&f.scaled_by(&h), &a), h.pow(2));
        let g = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 0, 1])]).unwrap();
        let w = to_univariate(&wronskian_symbolic(&g, &admissible_search(&g).unwrap()));
        assert_eq!(w, UniPoly::new(vec![rat_int(0), rat_int(2)]));
        assert_eq!(vanishing_order(&w, &RootPoint::Exact(rat_int(0))).unwrap(), 1);
        match wronskian_eval(&g, &admissible_search(&g).unwrap(), Some(&[Complex64::new(0.5, 1.0)])).unwrap() {
            WronskianValue::Numeric(v) => assert!((v - Complex64::new(1.0, 2.0)).norm() < 1e-14),
            WronskianValue::Symbolic(_) => unreachable!(),
        }
    }

    #[test]
    fn ordinary_wronskian_matches_symbolic() {
        let z3 = UniPoly::new(vec![rat_int(0), rat_int(0), rat_int(0), rat_int(1)]);
        let w = ordinary_wronskian(&[UniPoly::one(), z3.clone(), z3.mul(&z3)]);
        // 3z^2 · 30z^4 − 6z^5 · 6z = 54z^6
        assert_eq!(w, UniPoly::monomial(rat_int(54), 6));
        assert!(ordinary_wronskian(&[z3.clone(), z3.scale(&rat_int(2))]).is_zero());
    }

    #[test]
    fn vanishing_orders() {
        let z3 = UniPoly::new(vec![rat_int(0), rat_int(0), rat_int(0), rat_int(1)]);
        assert_eq!(vanishing_order(&z3, &RootPoint::Exact(rat_int(0))).unwrap(), 3);
        let f = UniPoly::linear_root(rat_int(1)).pow(2).mul(&UniPoly::linear_root(rat_int(-2)));
        assert_eq!(vanishing_order(&f, &RootPoint::Exact(rat_int(1))).unwrap(), 2);
        let q = UniPoly::new(vec![rat_int(1), rat_int(0), rat_int(1)]);
        assert_eq!(vanishing_order(&q, &RootPoint::Exact(rat_int(0))).unwrap(), 0);
        assert_eq!(vanishing_order(&q.pow(3), &RootPoint::Algebraic(q.clone())).unwrap(), 3);
        assert!(vanishing_order(&UniPoly::<Rational>::zero(), &RootPoint::Exact(rat_int(0))).is_err());
    }

    #[test]
    fn bareiss_agrees_with_laplace() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let n = rng.random_range(1..=4);
            let m: Vec<Vec<MPoly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            MPoly::from_terms(
                                2,
                                (0..3).map(|_| {
                                    (vec![rng.random_range(0..3), rng.random_range(0..3)], rat_int(rng.random_range(-3..=3)))
                                }),
                            )
                            .unwrap()
                        })
                        .collect()
                })
                .collect();
            assert_eq!(det_bareiss(m.clone()), det_laplace(&m));
        }
    }

    #[test]
    fn integrand_examples() {
        let f = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 1])]).unwrap();
        let a = admissible_search(&f).unwrap();
        let id = vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]];
        let v = log_derivative_integrand(&f, &a, &id, 2.0, 256, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let mixed = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(1), rat_int(-1)]];
        let v1 = log_derivative_integrand(&f, &a, &mixed, 2.0, 512, 0.5).unwrap();
        let v2 = log_derivative_integrand(&f, &a, &mixed, 2.0, 1024, 0.5).unwrap();
        assert!(v1.is_finite() && (v1 - v2).abs() < 1e-6);
        assert!(log_derivative_integrand(&f, &a, &id, 2.0, 256, 1.5).is_err());
    }

    #[test]
    fn nonvanishing_certificate() {
        let f = SymbolicTuple::new(1, vec![one_var_poly(&[1]), one_var_poly(&[0, 1])]).unwrap();
        let good = admissible_search(&f).unwrap();
        assert!(!is_identically_zero(&f, &good, 1));
        let bad = AdmissibleSet { m: 1, alphas: vec![vec![0], vec![0]] };
        assert!(is_identically_zero(&f, &bad, 1));
    }
}
