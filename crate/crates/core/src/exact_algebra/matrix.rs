//! Dense rational matrices and fraction-free row reduction.
//!
//! Rows are cleared of denominators and reduced over the integers. After every
//! elimination step a row is divided by the gcd of its entries, which keeps
//! coefficient growth in check without ever forming a fraction. Rationals only
//! reappear when a reduced row is finally scaled so its pivot is one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds from row vectors; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::InvalidInput(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            entries.extend(r.iter().cloned());
        }
        Ok(RatMatrix { rows: rows.len(), cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.cols {
            return Err(Error::AmbientMismatch { left: self.cols, right: other.cols });
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(RatMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e * s).collect() }
    }

    pub fn rank(&self) -> usize {
        let mut b = EchelonBuilder::new(self.cols);
        for r in 0..self.rows {
            b.insert_rational(self.row(r));
        }
        b.rank()
    }

    /// Row-reduced echelon form (zero rows dropped) and rank.
    pub fn rref_rank(&self) -> (RatMatrix, usize) {
        let mut b = EchelonBuilder::new(self.cols);
        for r in 0..self.rows {
            b.insert_rational(self.row(r));
        }
        let rank = b.rank();
        (b.to_rref(), rank)
    }

    /// Basis of the right kernel `{x : self·x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, rank) = self.rref_rank();
        let pivots: Vec<usize> = (0..rank)
            .map(|i| (0..self.cols).find(|&c| !r.get(i, c).is_zero()).expect("nonzero RREF row"))
            .collect();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut x = vec![Rational::zero(); self.cols];
            x[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r.get(i, free).clone();
            }
            out.push(x);
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }
}

/// Free function form of [`RatMatrix::rref_rank`].
pub fn rref_rank(m: &RatMatrix) -> (RatMatrix, usize) {
    m.rref_rank()
}

/// Clears denominators: returns the primitive integer row proportional to `row`.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut v: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    make_primitive(&mut v);
    v
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
    }
    let lead_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if g.is_zero() {
        return;
    }
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x / &g;
            }
        }
    }
}

/// Incremental integer row echelon form.
///
/// Rows are kept sorted by pivot column and primitive with positive pivot.
/// Inserting a vector reduces it against the stored rows and keeps it only if
/// something survives, so `rank()` is always the dimension of the span of
/// everything inserted so far.
#[derive(Clone, Debug)]
pub struct EchelonBuilder {
    cols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl EchelonBuilder {
    pub fn new(cols: usize) -> Self {
        EchelonBuilder { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let g = row[*p].gcd(&v[*p]);
            let a = &row[*p] / &g;
            let b = &v[*p] / &g;
            let start = v.iter().position(|x| !x.is_zero()).unwrap_or(*p);
            for c in start..self.cols {
                let keep = if a.is_one() { v[c].clone() } else { &a * &v[c] };
                v[c] = if row[c].is_zero() { keep } else { keep - &b * &row[c] };
            }
            make_primitive(&mut v);
        }
        v
    }

    /// Inserts an integer vector; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: Vec<BigInt>) -> bool {
        assert_eq!(v.len(), self.cols, "vector length must match builder width");
        if self.is_full() {
            return false;
        }
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        true
    }

    pub fn insert_rational(&mut self, v: &[Rational]) -> bool {
        self.insert(integer_row(v))
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(integer_row(v)).iter().all(Zero::is_zero)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Canonical reduced row echelon form of the span.
    pub fn to_rref(&self) -> RatMatrix {
        let mut rows: Vec<(usize, Vec<BigInt>)> = self.rows.clone();
        let k = rows.len();
        for i in (0..k).rev() {
            let (head, tail) = rows.split_at_mut(i + 1);
            let (_, ri) = &mut head[i];
            for (pj, rj) in tail.iter() {
                if ri[*pj].is_zero() {
                    continue;
                }
                let g = rj[*pj].gcd(&ri[*pj]);
                let a = &rj[*pj] / &g;
                let b = &ri[*pj] / &g;
                for c in 0..self.cols {
                    let keep = if a.is_one() { ri[c].clone() } else { &a * &ri[c] };
                    ri[c] = if rj[c].is_zero() { keep } else { keep - &b * &rj[c] };
                }
                make_primitive(ri);
            }
        }
        let mut entries = Vec::with_capacity(k * self.cols);
        for (p, r) in &rows {
            let pivot = r[*p].clone();
            entries.extend(r.iter().map(|x| Rational::new(x.clone(), pivot.clone())));
        }
        RatMatrix { rows: k, cols: self.cols, entries }
    }
}
