//! Graded pieces of homogeneous ideals and Hilbert-function certificates of
//! projective emptiness.

use serde::Serialize;

use super::hompoly::{monomial_basis, HomPoly, MonomialOrder};
use crate::error::{Error, Result};
use crate::exact_algebra::{EchelonBuilder, Subspace};

/// Degree cap of the Macaulay sweep.
pub const DEFAULT_DEGREE_CAP: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocusConfig {
    pub degree_cap: u32,
}

impl Default for LocusConfig {
    fn default() -> Self {
        LocusConfig { degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// Projective common zero locus of a set of forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Locus {
    /// Hilbert function vanished at `certified_at`.
    Empty { certified_at: u32 },
    /// Nonempty of the given projective dimension.
    Dim { dim: u32, window_start: u32, hilbert: Vec<usize> },
}

impl Locus {
    pub fn is_empty(&self) -> bool {
        matches!(self, Locus::Empty { .. })
    }

    /// Projective dimension, `-1` for the empty set.
    pub fn dim(&self) -> i64 {
        match self {
            Locus::Empty { .. } => -1,
            Locus::Dim { dim, .. } => *dim as i64,
        }
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim V_D = binom(n + D, n)`.
pub fn dim_graded(n: usize, degree: u32) -> usize {
    binom(n as u64 + degree as u64, n as u64) as usize
}

fn check_common_n(gens: &[HomPoly]) -> Result<Option<usize>> {
    let Some(first) = gens.first() else { return Ok(None) };
    if let Some(g) = gens.iter().find(|g| g.n() != first.n()) {
        return Err(Error::AmbientMismatch { left: first.n(), right: g.n() });
    }
    Ok(Some(first.n()))
}

fn piece_builder(gens: &[HomPoly], order: &MonomialOrder) -> EchelonBuilder {
    let d = order.degree();
    let mut b = EchelonBuilder::new(order.len());
    for g in gens.iter().filter(|g| !g.is_zero() && g.degree() <= d) {
        let shifts = monomial_basis(order.n(), d - g.degree());
        for gamma in shifts.monomials() {
            if b.is_full() {
                return b;
            }
            let prod = g.poly().mul_monomial(gamma);
            let v = HomPoly::new(order.n(), d, prod).expect("homogeneous").to_vector(order);
            b.insert_rational(&v);
        }
    }
    b
}

/// `span{x^γ·g : g ∈ gens, |γ| = D − deg g}` inside `V_D`, and the Hilbert
/// function value `dim V_D − dim(span)`.
pub fn ideal_graded_piece(n: usize, gens: &[HomPoly], degree: u32) -> Result<(Subspace, usize)> {
    if let Some(m) = check_common_n(gens)? {
        if m != n {
            return Err(Error::AmbientMismatch { left: n, right: m });
        }
    }
    let order = monomial_basis(n, degree);
    let b = piece_builder(gens, &order);
    let hilbert = order.len() - b.rank();
    Ok((Subspace::from_builder(&b), hilbert))
}

/// Hilbert function value only (skips the canonical basis).
pub fn hilbert_value(n: usize, gens: &[HomPoly], degree: u32) -> usize {
    let order = monomial_basis(n, degree);
    order.len() - piece_builder(gens, &order).rank()
}

/// Degree of the lowest-degree polynomial through the window values, if the
/// window pins one down with at least one redundant check value.
fn fitted_degree(values: &[usize], max_degree: usize) -> Option<usize> {
    let mut diffs: Vec<i128> = values.iter().map(|&v| v as i128).collect();
    for k in 0..=max_degree {
        if diffs.len() < 2 {
            return None;
        }
        if diffs.windows(2).all(|w| w[0] == w[1]) {
            return Some(k);
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    None
}

/// Certifies emptiness of the common projective zero set of `gens` or infers
/// its dimension from the Hilbert polynomial.
///
/// Emptiness is decided exactly once the sweep reaches
/// `min(#gens, n+1)·(max deg − 1) + 1`: if the locus is empty, n+1 generic
/// combinations of the generators in top degree form a regular sequence, so
/// the Hilbert function is already zero there.
pub fn projective_locus(gens: &[HomPoly], cfg: &LocusConfig) -> Result<Locus> {
    let n = check_common_n(gens)?.ok_or_else(|| Error::InvalidInput("empty generator list".into()))?;
    let nonzero: Vec<HomPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if nonzero.is_empty() {
        return Err(Error::InvalidInput("all generators are zero".into()));
    }
    let max_deg = nonzero.iter().map(HomPoly::degree).max().unwrap();
    let min_deg = nonzero.iter().map(HomPoly::degree).min().unwrap();
    if min_deg == 0 {
        return Ok(Locus::Empty { certified_at: 0 });
    }
    let sweep_count = nonzero.len().min(n + 1) as u32;
    let sweep_bound = sweep_count * (max_deg - 1) + 1;
    let sweep_end = sweep_bound.min(cfg.degree_cap);
    for d in min_deg..=sweep_end {
        if hilbert_value(n, &nonzero, d) == 0 {
            return Ok(Locus::Empty { certified_at: d });
        }
    }
    let window = n + 3;
    if sweep_bound > cfg.degree_cap && nonzero.len() > n {
        let h_cap = hilbert_value(n, &nonzero, cfg.degree_cap);
        let h_prev = hilbert_value(n, &nonzero, cfg.degree_cap - 1);
        if h_cap != h_prev {
            return Err(Error::Inconclusive {
                cap: cfg.degree_cap,
                detail: format!("Hilbert function still {h_cap} (previous {h_prev}) below the bound {sweep_bound}"),
            });
        }
    }
    let mut start = sweep_bound.min(cfg.degree_cap);
    let mut values: Vec<usize> = (start..start + window as u32).map(|d| hilbert_value(n, &nonzero, d)).collect();
    loop {
        if let Some(k) = fitted_degree(&values, n) {
            if k < n && values.iter().all(|&v| v > 0) {
                return Ok(Locus::Dim { dim: k as u32, window_start: start, hilbert: values });
            }
        }
        if start >= 2 * cfg.degree_cap {
            return Err(Error::Inconclusive {
                cap: cfg.degree_cap,
                detail: format!("Hilbert function did not settle on a polynomial: {values:?}"),
            });
        }
        start += 1;
        values.remove(0);
        values.push(hilbert_value(n, &nonzero, start + window as u32 - 1));
    }
}

/// Emptiness only, skipping the dimension fit when the locus is nonempty.
pub fn is_empty_locus(gens: &[HomPoly], cfg: &LocusConfig) -> Result<bool> {
    let n = check_common_n(gens)?.ok_or_else(|| Error::InvalidInput("empty generator list".into()))?;
    let nonzero: Vec<HomPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if nonzero.is_empty() {
        return Err(Error::InvalidInput("all generators are zero".into()));
    }
    let max_deg = nonzero.iter().map(HomPoly::degree).max().unwrap();
    if nonzero.iter().any(|g| g.degree() == 0) {
        return Ok(true);
    }
    if nonzero.len() <= n {
        return Ok(false);
    }
    let sweep_bound = (n as u32 + 1) * (max_deg - 1) + 1;
    if sweep_bound <= cfg.degree_cap {
        return Ok(hilbert_value(n, &nonzero, sweep_bound) == 0);
    }
    let h_cap = hilbert_value(n, &nonzero, cfg.degree_cap);
    if h_cap == 0 {
        return Ok(true);
    }
    let h_prev = hilbert_value(n, &nonzero, cfg.degree_cap - 1);
    if h_cap != h_prev {
        return Err(Error::Inconclusive {
            cap: cfg.degree_cap,
            detail: format!("Hilbert function still {h_cap} (previous {h_prev}) below the bound {sweep_bound}"),
        });
    }
    Ok(false)
}
