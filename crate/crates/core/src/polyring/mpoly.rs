//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::exact_algebra::{rat_int, rat_string, Rational};

/// Terms keyed by exponent vectors; zero coefficients are never stored.
///
/// The `BTreeMap` order on exponent vectors is lexicographic, so the last
/// entry is the lex-leading term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must equal variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        MPoly { nvars, terms }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Rational::one())
    }

    /// Sums the given terms; exponent vectors of the wrong length are rejected.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Option<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return None;
            }
            p.add_term(e, c);
        }
        Some(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Common degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    /// Coefficient of `x_v^k`, as a polynomial not involving `x_v`.
    pub fn coeff_in(&self, v: usize, k: u32) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == k {
                let mut e2 = e.clone();
                e2[v] = 0;
                out.terms.insert(e2, c.clone());
            }
        }
        out
    }

    pub fn leading_term(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, s: &Rational) -> MPoly {
        if s.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, exp: &[u32]) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exp).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut result = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                out.add_term(e2, c * rat_int(e[v] as i64));
            }
        }
        out
    }

    /// `D^alpha` = Π_i ∂^{alpha_i}/∂z_i^{alpha_i}.
    pub fn derivative_multi(&self, alpha: &[u32]) -> MPoly {
        let mut p = self.clone();
        for (v, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                p = p.derivative(v);
            }
        }
        p
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = Complex64::new(crate::exact_algebra::rat_to_f64(c), 0.0);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= x.powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, MPoly::nvars);
        let mut powers: Vec<Vec<MPoly>> = subs.iter().map(|s| vec![MPoly::one(s.nvars)]).collect();
        let mut out = MPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        let (de, dc) = d.leading_term()?;
        let (de, dc) = (de.clone(), dc.clone());
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while let Some((e, c)) = r.leading_term() {
            if e.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let me: Vec<u32> = e.iter().zip(&de).map(|(a, b)| a - b).collect();
            let mc = c / &dc;
            r = r.sub(&d.mul_monomial(&me).scale(&mc));
            q.add_term(me, mc);
        }
        Some(q)
    }

    /// Divides by the lex-leading coefficient.
    pub fn monic(&self) -> MPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = Rational::one() / c;
                self.scale(&inv)
            }
        }
    }

    fn highest_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.uses_var(v))
    }

    /// Gcd of the coefficients with respect to `x_v`.
    fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.nvars);
        for k in 0..=self.degree_in(v) {
            let c = self.coeff_in(v, k);
            if !c.is_zero() {
                g = gcd(&g, &c);
                if g.is_constant() {
                    return MPoly::one(self.nvars);
                }
            }
        }
        g
    }

    fn primitive_part_in(&self, v: usize) -> MPoly {
        if !self.uses_var(v) {
            return MPoly::one(self.nvars);
        }
        let c = self.content_in(v);
        self.exact_div(&c).expect("content divides")
    }

    /// Pseudo-remainder of `self` by `b` with respect to `x_v`.
    fn pseudo_rem(&self, b: &MPoly, v: usize) -> MPoly {
        let db = b.degree_in(v);
        let lcb = b.coeff_in(v, db);
        let mut r = self.clone();
        while !r.is_zero() && r.uses_var(v) && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lcr = r.coeff_in(v, dr);
            let mut shift = vec![0; self.nvars];
            shift[v] = dr - db;
            r = r.mul(&lcb).sub(&b.mul(&lcr).mul_monomial(&shift));
        }
        r
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
                .collect();
            let cs = rat_string(c);
            parts.push(match (mono.is_empty(), c.is_one()) {
                (true, _) => cs,
                (false, true) => mono.join("*"),
                (false, false) => format!("{cs}*{}", mono.join("*")),
            });
        }
        parts.join(" + ")
    }
}

/// Greatest common divisor, normalized to lex-leading coefficient one.
///
/// Recursive primitive pseudo-remainder sequences in the highest variable,
/// with contents handled one variable down.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.nvars);
    }
    let v = a.highest_var().max(b.highest_var()).expect("nonconstant");
    if !a.uses_var(v) {
        return gcd(a, &b.content_in(v));
    }
    if !b.uses_var(v) {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let mut x = a.exact_div(&ca).expect("content divides");
    let mut y = b.exact_div(&cb).expect("content divides");
    if x.degree_in(v) < y.degree_in(v) {
        std::mem::swap(&mut x, &mut y);
    }
    let g = loop {
        if !y.uses_var(v) {
            break MPoly::one(a.nvars);
        }
        let r = x.pseudo_rem(&y, v);
        if r.is_zero() {
            break y;
        }
        x = y;
        y = r.primitive_part_in(v);
    };
    c.mul(&g.primitive_part_in(v)).monic()
}

pub fn gcd_all(polys: &[MPoly]) -> Option<MPoly> {
    let first = polys.first()?;
    Some(polys.iter().fold(MPoly::zero(first.nvars()), |g, p| gcd(&g, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    fn x(i: usize) -> MPoly {
        MPoly::var(3, i)
    }

    fn c(v: i64) -> MPoly {
        MPoly::constant(3, rat_int(v))
    }

    #[test]
    fn exact_division_round_trips() {
        let a = x(0).add(&x(1).scale(&rat(2, 3))).add(&c(1));
        let b = x(2).mul(&x(0)).sub(&c(5));
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert!(prod.add(&c(1)).exact_div(&b).is_none());
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let g = x(0).mul(&x(1)).add(&x(2).pow(2)).sub(&c(3));
        let a = g.mul(&x(0).add(&c(1)));
        let b = g.mul(&x(1).sub(&x(2))).mul(&x(1));
        assert_eq!(gcd(&a, &b), g.monic());
        assert_eq!(gcd(&x(0), &x(1)), MPoly::one(3));
        assert_eq!(gcd(&x(0).pow(3), &x(0).pow(2).mul(&x(1))), x(0).pow(2));
    }

    #[test]
    fn derivatives_and_composition() {
        let p = x(0).pow(3).mul(&x(1)).add(&x(2));
        assert_eq!(p.derivative(0), x(0).pow(2).mul(&x(1)).scale(&rat_int(3)));
        assert_eq!(p.derivative_multi(&[2, 1, 0]), x(0).scale(&rat_int(6)));
        let subs = [x(1), x(0), c(2)];
        assert_eq!(p.compose(&subs), x(1).pow(3).mul(&x(0)).add(&c(2)));
    }

    #[test]
    fn homogeneous_degree_detects_mixed_terms() {
        assert_eq!(x(0).mul(&x(1)).add(&x(2).pow(2)).homogeneous_degree(), Some(2));
        assert_eq!(x(0).add(&c(1)).homogeneous_degree(), None);
        assert_eq!(MPoly::zero(3).homogeneous_degree(), None);
    }
}
