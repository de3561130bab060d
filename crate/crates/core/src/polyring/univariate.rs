//! Dense one-variable polynomials over an exact field.
//!
//! Used for compositions `Q(f̃)` of hypersurfaces with polynomial curves,
//! binary-form gcd oracles, and exact root multiplicities.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::exact_algebra::Field;

/// Coefficients in ascending degree order with no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `c·z^k`
    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn z() -> Self {
        Self::monomial(F::one(), 1)
    }

    /// `z - a`
    pub fn linear_root(a: F) -> Self {
        Self::new(vec![-a, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        UniPoly { coeffs: self.coeffs.iter().cloned().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.lc().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = r[k].clone() / lc.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    r[k - dd + j] = r[k - dd + j].clone() - c.clone() * dc.clone();
                }
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        match self.lc() {
            None => Self::zero(),
            Some(lc) => {
                let inv = F::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * F::from_rational(crate::exact_algebra::rat_int(k as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Field::to_complex).collect()
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        horner(&self.complex_coeffs(), z)
    }

    /// Largest `e` with `g^e | self`. `g` must be nonconstant and `self` nonzero.
    pub fn multiplicity_of(&self, g: &Self) -> u32 {
        assert!(!g.is_constant(), "multiplicity needs a nonconstant divisor");
        assert!(!self.is_zero(), "multiplicity in the zero polynomial is unbounded");
        let mut e = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.exact_div(g) {
            cur = q;
            e += 1;
        }
        e
    }

    /// Numerical roots (complex double precision), intended for square-free input.
    pub fn roots_numeric(&self) -> Vec<Complex64> {
        aberth_roots(&self.complex_coeffs())
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G) -> UniPoly<G> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<F: Field> fmt::Display for UniPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.render();
            let cs = if cs.contains(['+', '/']) || cs[1..].contains('-') { format!("({cs})") } else { cs };
            match k {
                0 => write!(f, "{cs}")?,
                1 if c.is_one() => write!(f, "z")?,
                1 => write!(f, "{cs}*z")?,
                _ if c.is_one() => write!(f, "z^{k}")?,
                _ => write!(f, "{cs}*z^{k}")?,
            }
        }
        Ok(())
    }
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(a: &UniPoly<F>, b: &UniPoly<F>) -> UniPoly<F> {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = x.div_rem(&y);
        x = y;
        y = r;
    }
    x.monic()
}

pub fn gcd_all<F: Field>(polys: &[UniPoly<F>]) -> UniPoly<F> {
    polys.iter().fold(UniPoly::zero(), |g, p| gcd(&g, p))
}

/// Yun's square-free decomposition: monic pairwise coprime square-free `s_e`
/// with `p = lc · Π s_e^e`. Constant factors are omitted.
pub fn squarefree<F: Field>(p: &UniPoly<F>) -> Vec<(UniPoly<F>, u32)> {
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    let a = p.monic();
    let da = a.derivative();
    let c = gcd(&a, &da);
    let mut w = a.exact_div(&c).expect("gcd divides");
    let mut y = da.exact_div(&c).expect("gcd divides");
    let mut z = y.sub(&w.derivative());
    let mut i = 1;
    while !w.is_constant() {
        let g = gcd(&w, &z);
        if !g.is_constant() {
            out.push((g.clone(), i));
        }
        w = w.exact_div(&g).expect("gcd divides");
        y = z.exact_div(&g).expect("gcd divides");
        z = y.sub(&w.derivative());
        i += 1;
    }
    out
}

/// Pairwise coprime monic square-free polynomials `B` such that every input
/// is a constant times a product of powers of members of `B`, and every
/// square-free Yun factor of every input is a product of members of `B`.
/// Consequently each input has the same multiplicity at every root of a
/// given member.
pub fn coprime_basis<F: Field>(polys: &[UniPoly<F>]) -> Vec<UniPoly<F>> {
    let mut basis: Vec<UniPoly<F>> = Vec::new();
    for p in polys {
        for (s, _) in squarefree(p) {
            let mut a = s;
            let mut next = Vec::with_capacity(basis.len() + 2);
            for b in basis.drain(..) {
                if a.is_constant() {
                    next.push(b);
                    continue;
                }
                let g = gcd(&a, &b);
                if g.is_constant() {
                    next.push(b);
                    continue;
                }
                let rest = b.exact_div(&g).expect("gcd divides").monic();
                if !rest.is_constant() {
                    next.push(rest);
                }
                a = a.exact_div(&g).expect("gcd divides").monic();
                next.push(g);
            }
            if !a.is_constant() {
                next.push(a.monic());
            }
            basis = next;
        }
    }
    basis
}

/// Aberth–Ehrlich simultaneous root iteration with a final Newton polish.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let deriv: Vec<Complex64> = monic.iter().enumerate().skip(1).map(|(k, x)| x * k as f64).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    // Fujiwara-style bound for the initial circle.
    let radius = (0..n)
        .map(|k| monic[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-3)
        * 1.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..1000 {
        let mut max_step = 0.0_f64;
        for k in 0..n {
            let pv = horner(&monic, z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let dv = horner(&deriv, z[k]);
            let ratio = pv / dv;
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let dv = horner(&deriv, *zk);
            if dv.norm() == 0.0 {
                break;
            }
            let step = horner(&monic, *zk) / dv;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat_int, GaussRational, Rational};
    use num_traits::One;

    fn p(cs: &[i64]) -> UniPoly<Rational> {
        UniPoly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (z-1)^2 (z+2) and (z-1)(z+3)
        let a = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        let b = p(&[-1, 1]).mul(&p(&[3, 1]));
        assert_eq!(gcd(&a, &b), p(&[-1, 1]));
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap() < b.degree().unwrap());
    }

    #[test]
    fn yun_recovers_multiplicities() {
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1])).mul(&p(&[0, 1]).pow(3)).scale(&rat_int(5));
        let sf = squarefree(&f);
        assert_eq!(sf, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2), (p(&[0, 1]), 3)]);
        assert!(squarefree(&p(&[7])).is_empty());
    }

    #[test]
    fn multiplicity_by_repeated_division() {
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        assert_eq!(f.multiplicity_of(&p(&[-1, 1])), 2);
        assert_eq!(f.multiplicity_of(&p(&[0, 1])), 0);
    }

    #[test]
    fn coprime_basis_separates_shared_roots() {
        // (z-1)(z-2) and (z-1)^3
        let a = p(&[-1, 1]).mul(&p(&[-2, 1]));
        let b = p(&[-1, 1]).pow(3);
        let basis = coprime_basis(&[a.clone(), b.clone()]);
        assert_eq!(basis.len(), 2);
        for g in &basis {
            for h in &basis {
                if g != h {
                    assert!(gcd(g, h).is_constant());
                }
            }
        }
        assert!(basis.contains(&p(&[-1, 1])));
        assert!(basis.contains(&p(&[-2, 1])));
    }

    #[test]
    fn aberth_finds_roots_of_unity() {
        let f = p(&[-1, 0, 0, 0, 0, 1]);
        let roots = f.roots_numeric();
        assert_eq!(roots.len(), 5);
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!(f.eval_complex(r).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_coefficients() {
        // z^2 + 1 = (z - i)(z + i)
        let i = GaussRational::i();
        let a = UniPoly::linear_root(i.clone()).mul(&UniPoly::linear_root(-i));
        assert_eq!(a, UniPoly::new(vec![GaussRational::one(), GaussRational::zero(), GaussRational::one()]));
        assert_eq!(a.multiplicity_of(&UniPoly::linear_root(GaussRational::i())), 1);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[-1, 0, 3]).to_string(), "3*z^2 + -1");
        assert_eq!(p(&[0, 1]).to_string(), "z");
    }
}
