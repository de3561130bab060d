//! The filtration of `V_N` by powers of `n` forms `P_1, …, P_n`, its jump
//! dimensions, an adapted basis of products, and the weights `b_j`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::{rat, EchelonBuilder};
use crate::polyring::ideal::dim_graded;
use crate::polyring::{monomial_basis, projective_locus, HomPoly, LocusConfig};

/// All `n`-tuples with entry sum `≤ cap`, lexicographically ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleOrder {
    pub n: usize,
    pub cap: u32,
    pub tuples: Vec<Vec<u32>>,
}

impl TupleOrder {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

pub fn sigma(t: &[u32]) -> u32 {
    t.iter().sum()
}

pub fn lex_tuple_order(n: usize, cap: u32) -> TupleOrder {
    fn fill(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(prefix, left - k, slots - 1, out);
            prefix.pop();
        }
    }
    let mut tuples = Vec::new();
    fill(&mut Vec::with_capacity(n), cap, n, &mut tuples);
    TupleOrder { n, cap, tuples }
}

/// `ψ = P^{(i)_s} · h` with `h` a monomial of degree `N − dσ((i)_s)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisElement {
    /// Zero-based position of `(i)_s` in the tuple order.
    pub s: usize,
    pub h: HomPoly,
    pub psi: HomPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationTable {
    pub n: usize,
    pub d: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub p: Vec<HomPoly>,
    pub tuples: TupleOrder,
    /// `dim W_{(i)_s}` for every `s`.
    pub dims: Vec<usize>,
    /// `m_s`, with `m_K = dim W_{(i)_K} = 1`.
    pub jumps: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<BasisElement>,
    /// `b_j = Σ_s m_s i_{js}`.
    pub weights: Vec<u64>,
    pub u: usize,
    /// Projective dimension of the common zero set of `P` (`-1` empty), when certified.
    pub locus_dim: Option<i64>,
    pub warnings: Vec<String>,
}

/// Computes `W_{(i)} = Σ_{(j) ≥ (i)} P^{(j)} · V_{N − dσ(j)}` for every tuple,
/// accumulating from the last tuple backwards so each step extends one echelon form.
pub fn build_filtration(p: &[HomPoly], big_n: u32, cfg: &LocusConfig) -> Result<FiltrationTable> {
    let first = p.first().ok_or_else(|| Error::InvalidInput("need at least one form".into()))?;
    let n = first.n();
    let d = first.degree();
    if p.len() != n {
        return Err(Error::InvalidInput(format!("need n = {n} forms, got {}", p.len())));
    }
    if p.iter().any(|q| q.n() != n || q.degree() != d) {
        return Err(Error::InvalidInput("forms must share ambient space and degree".into()));
    }
    if p.iter().any(HomPoly::is_zero) || d == 0 {
        return Err(Error::InvalidInput("forms must be nonzero of positive degree".into()));
    }
    if big_n < d || !big_n.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("N = {big_n} must be a positive multiple of d = {d}")));
    }
    let mut warnings = Vec::new();
    let locus_dim = match projective_locus(p, cfg) {
        Ok(l) => Some(l.dim()),
        Err(e) => {
            warnings.push(format!("locus of P uncertified: {e}"));
            None
        }
    };
    if let Some(dim) = locus_dim.filter(|&x| x > 0) {
        warnings.push(format!("common zero set of P has dimension {dim}; the jump law needs a finite set"));
    }

    let cap = big_n / d;
    let tuples = lex_tuple_order(n, cap);
    let order = monomial_basis(n, big_n);
    let u = order.len();
    let mut powers: Vec<Vec<HomPoly>> = p.iter().map(|q| vec![HomPoly::one(n), q.clone()]).collect();
    let mut builder = EchelonBuilder::new(u);
    let mut dims = vec![0; tuples.len()];
    let mut basis_rev = Vec::with_capacity(u);
    let mut shift_cache: HashMap<u32, Vec<Vec<u32>>> = HashMap::new();
    for (s, t) in tuples.tuples.iter().enumerate().rev() {
        if !builder.is_full() {
            let mut prod = HomPoly::one(n);
            for (j, &e) in t.iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(&p[j]);
                    powers[j].push(next);
                }
                if e > 0 {
                    prod = prod.mul(&powers[j][e as usize]);
                }
            }
            let rest = big_n - d * sigma(t);
            let shifts = shift_cache.entry(rest).or_insert_with(|| monomial_basis(n, rest).monomials().to_vec());
            for gamma in shifts.iter() {
                let psi = HomPoly::new(n, big_n, prod.poly().mul_monomial(gamma)).expect("homogeneous product");
                if builder.insert_rational(&psi.to_vector(&order)) {
                    basis_rev.push(BasisElement { s, h: HomPoly::monomial(n, gamma.clone(), rat(1, 1)), psi });
                }
                if builder.is_full() {
                    break;
                }
            }
        }
        dims[s] = builder.rank();
    }
    let jumps: Vec<usize> = (0..dims.len()).map(|s| dims[s] - dims.get(s + 1).copied().unwrap_or(0)).collect();
    let weights = (0..n)
        .map(|j| tuples.tuples.iter().zip(&jumps).map(|(t, &m)| m as u64 * t[j] as u64).sum())
        .collect();
    basis_rev.reverse();
    Ok(FiltrationTable {
        n,
        d,
        big_n,
        p: p.to_vec(),
        tuples,
        dims,
        jumps,
        basis: basis_rev,
        weights,
        u,
        locus_dim,
        warnings,
    })
}

impl FiltrationTable {
    pub fn k_len(&self) -> usize {
        self.tuples.len()
    }

    /// Copy without the adapted basis, for compact export.
    pub fn without_basis(&self) -> FiltrationTable {
        FiltrationTable { basis: Vec::new(), ..self.clone() }
    }

    /// `P^{(i)}` for a tuple.
    pub fn power_product(&self, t: &[u32]) -> HomPoly {
        t.iter().zip(&self.p).fold(HomPoly::one(self.n), |acc, (&e, q)| acc.mul(&q.pow(e)))
    }

    /// Structural checks: `Σ m_s = u`, nonincreasing dimensions, `u` basis
    /// elements whose decompositions re-multiply exactly, grouped by `s`
    /// with the right counts, and agreement at a random rational point.
    pub fn verify_basis(&self, seed: u64) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidInput(m));
        if self.jumps.iter().sum::<usize>() != self.u || self.dims.first() != Some(&self.u) {
            return fail("jumps do not add up to dim V_N".into());
        }
        if self.dims.windows(2).any(|w| w[0] < w[1]) {
            return fail("dimensions increase along the order".into());
        }
        if self.basis.len() != self.u {
            return fail(format!("adapted basis has {} elements, expected {}", self.basis.len(), self.u));
        }
        let mut counts = vec![0usize; self.k_len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point: Vec<_> = (0..=self.n).map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=7))).collect();
        let mut last_s = 0;
        for b in &self.basis {
            if b.s < last_s {
                return fail("basis is not grouped by tuple".into());
            }
            last_s = b.s;
            counts[b.s] += 1;
            let t = &self.tuples.tuples[b.s];
            if b.h.degree() + self.d * sigma(t) != self.big_n {
                return fail(format!("witness degree wrong at s = {}", b.s));
            }
            let prod = self.power_product(t);
            if prod.mul(&b.h) != b.psi {
                return fail(format!("decomposition does not re-multiply at s = {}", b.s));
            }
            if prod.eval(&point) * b.h.eval(&point) != b.psi.eval(&point) {
                return fail(format!("pointwise check failed at s = {}", b.s));
            }
        }
        if counts != self.jumps {
            return fail("basis counts per tuple differ from the jumps".into());
        }
        let order = monomial_basis(self.n, self.big_n);
        let mut all = EchelonBuilder::new(self.u);
        for b in &self.basis {
            all.insert_rational(&b.psi.to_vector(&order));
        }
        if all.rank() != self.u {
            return fail("adapted basis is not independent".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CzEntry {
    pub tuple: Vec<u32>,
    pub m: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CzReport {
    pub expected_jump: u64,
    pub entries: Vec<CzEntry>,
    pub pass: bool,
}

/// Checks `m_{(i)} = d^n` for every tuple with `dσ(i) < N − nd`.
pub fn verify_cz(table: &FiltrationTable) -> CzReport {
    let expected = (table.d as u64).pow(table.n as u32);
    let limit = table.big_n as i64 - (table.n as i64) * table.d as i64;
    let entries: Vec<CzEntry> = table
        .tuples
        .tuples
        .iter()
        .zip(&table.jumps)
        .filter(|(t, _)| ((table.d * sigma(t)) as i64) < limit)
        .map(|(t, &m)| CzEntry { tuple: t.clone(), m, holds: m as u64 == expected })
        .collect();
    let pass = entries.iter().all(|e| e.holds);
    CzReport { expected_jump: expected, entries, pass }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSummary {
    pub b: u64,
    pub per_table: Vec<Vec<u64>>,
}

/// `b = min` over tables and `j` of `b_j`.
pub fn weight_summary(tables: &[FiltrationTable]) -> Result<WeightSummary> {
    let per_table: Vec<Vec<u64>> = tables.iter().map(|t| t.weights.clone()).collect();
    let b = per_table
        .iter()
        .flatten()
        .copied()
        .min()
        .ok_or_else(|| Error::InvalidInput("no filtration tables".into()))?;
    Ok(WeightSummary { b, per_table })
}

/// `dim V_N` without building anything.
pub fn graded_dim(n: usize, big_n: u32) -> usize {
    dim_graded(n, big_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat_int, Subspace};

    fn x0x1() -> HomPoly {
        HomPoly::monomial(1, vec![1, 1], rat_int(1))
    }

    #[test]
    fn tuple_orders() {
        assert_eq!(lex_tuple_order(1, 4).tuples, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        assert_eq!(lex_tuple_order(2, 1).tuples, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(lex_tuple_order(2, 4).len(), 15);
        assert_eq!(lex_tuple_order(3, 2).tuples.last().unwrap(), &vec![2, 0, 0]);
    }

    #[test]
    fn product_of_coordinates() {
        let t = build_filtration(&[x0x1()], 8, &LocusConfig::default()).unwrap();
        assert_eq!(t.dims, vec![9, 7, 5, 3, 1]);
        assert_eq!(t.jumps, vec![2, 2, 2, 2, 1]);
        assert_eq!(t.u, 9);
        assert_eq!(t.k_len(), 5);
        assert_eq!(t.weights, vec![16]);
        assert_eq!(t.locus_dim, Some(0));
        t.verify_basis(1).unwrap();
        let cz = verify_cz(&t);
        assert!(cz.pass);
        assert_eq!(cz.entries.iter().map(|e| e.tuple[0]).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(weight_summary(&[t]).unwrap().b, 16);
    }

    #[test]
    fn single_coordinate_form() {
        let t = build_filtration(&[HomPoly::var(1, 0)], 2, &LocusConfig::default()).unwrap();
        assert_eq!(t.dims, vec![3, 2, 1]);
        assert_eq!(t.jumps, vec![1, 1, 1]);
        let t3 = build_filtration(&[HomPoly::var(1, 0)], 3, &LocusConfig::default()).unwrap();
        assert!(verify_cz(&t3).pass);
    }

    #[test]
    fn smallest_degree() {
        let p = vec![HomPoly::var(2, 0), HomPoly::var(2, 1).add(&HomPoly::var(2, 2)).unwrap()];
        let t = build_filtration(&p, 1, &LocusConfig::default()).unwrap();
        assert_eq!(t.u, 3);
        assert_eq!(t.tuples.tuples, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(t.dims, vec![3, 2, 1]);
        t.verify_basis(0).unwrap();
    }

    #[test]
    fn generic_lines_in_the_plane() {
        let l1 = HomPoly::from_terms(2, 1, [(vec![1, 0, 0], rat_int(1)), (vec![0, 1, 0], rat_int(2))]).unwrap();
        let l2 = HomPoly::from_terms(2, 1, [(vec![0, 1, 0], rat_int(3)), (vec![0, 0, 1], rat_int(-1))]).unwrap();
        let t = build_filtration(&[l1, l2], 4, &LocusConfig::default()).unwrap();
        let cz = verify_cz(&t);
        assert!(cz.pass && !cz.entries.is_empty());
        t.verify_basis(3).unwrap();
    }

    #[test]
    fn nested_spans_match_direct_definition() {
        let p = vec![
            HomPoly::from_terms(2, 2, [(vec![2, 0, 0], rat_int(1)), (vec![0, 1, 1], rat_int(-2))]).unwrap(),
            HomPoly::from_terms(2, 2, [(vec![0, 2, 0], rat_int(1)), (vec![1, 0, 1], rat_int(1)), (vec![0, 0, 2], rat_int(3))])
                .unwrap(),
        ];
        let t = build_filtration(&p, 6, &LocusConfig::default()).unwrap();
        let order = monomial_basis(2, 6);
        let mut prev: Option<Subspace> = None;
        for (s, tup) in t.tuples.tuples.iter().enumerate().rev() {
            let mut gens = Vec::new();
            for later in &t.tuples.tuples[s..] {
                let prod = t.power_product(later);
                for g in monomial_basis(2, 6 - 2 * sigma(later)).monomials() {
                    gens.push(HomPoly::new(2, 6, prod.poly().mul_monomial(g)).unwrap().to_vector(&order));
                }
            }
            let w = Subspace::span(order.len(), &gens).unwrap();
            assert_eq!(w.dim(), t.dims[s], "tuple {tup:?}");
            if let Some(next) = &prev {
                assert!(w.contains(next).unwrap());
            }
            prev = Some(w);
        }
        assert!(verify_cz(&t).pass);
    }

    #[test]
    fn weight_minimum_across_tables() {
        let mut a = build_filtration(&[x0x1()], 8, &LocusConfig::default()).unwrap();
        let mut b = a.clone();
        a.weights = vec![16];
        b.weights = vec![12, 14];
        assert_eq!(weight_summary(&[a, b]).unwrap().b, 12);
        assert!(weight_summary(&[]).is_err());
    }

    #[test]
    fn invalid_inputs() {
        let cfg = LocusConfig::default();
        assert!(build_filtration(&[x0x1()], 7, &cfg).is_err());
        let mixed = vec![HomPoly::var(2, 0), HomPoly::monomial(2, vec![0, 2, 0], rat_int(1))];
        assert!(build_filtration(&mixed, 4, &cfg).is_err());
    }
}
