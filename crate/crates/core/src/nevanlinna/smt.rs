//! Margins of the truncated second main theorem along polynomial curves.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{characteristic, counting, roots_with_multiplicity, MeromorphicCurve, RGrid, DEFECT_TOL};
use crate::error::{Error, Result};
use crate::exact_algebra::{rat_int, rat_string, GaussRational, RatMatrix, Rational};
use crate::filtration::{build_filtration, weight_summary, FiltrationTable};
use crate::polyring::univariate::coprime_basis;
use crate::polyring::{monomial_basis, HomPoly, LocusConfig, UniPoly};
use crate::position::{
    check_subgeneral, normalize_degrees, replace_hypersurfaces, HypersurfaceFamily, ReplacementResult,
    DEFAULT_RETRY_BUDGET,
};
use crate::wronskian::ordinary_wronskian;

#[derive(Clone, Debug)]
pub struct SmtConfig {
    pub k: usize,
    pub eps: Rational,
    pub big_n: u32,
    pub seed: u64,
    pub samples: usize,
    pub sample_radius: f64,
    pub budget: usize,
    pub locus: LocusConfig,
}

impl SmtConfig {
    pub fn new(k: usize, eps: Rational, big_n: u32, seed: u64) -> Self {
        SmtConfig {
            k,
            eps,
            big_n,
            seed,
            samples: 10_000,
            sample_radius: 2.0,
            budget: DEFAULT_RETRY_BUDGET,
            locus: LocusConfig::default(),
        }
    }
}

/// Replacement and filtration for one `(k+1)`-subset.
#[derive(Clone, Debug, Serialize)]
pub struct SubsetContext {
    pub labels: Vec<String>,
    pub replacement: ReplacementResult,
    pub table: FiltrationTable,
}

fn tuple_seed(seed: u64, idx: &[usize], q: usize) -> u64 {
    idx.iter().fold(seed, |acc, &i| acc.wrapping_mul(q as u64 + 1).wrapping_add(i as u64 + 1))
}

/// Contexts for every `(k+1)`-subset of labels in sorted order. `family` must
/// already share one degree.
pub fn subset_contexts(
    family: &HypersurfaceFamily,
    k: usize,
    big_n: u32,
    seed: u64,
    budget: usize,
    cfg: &LocusConfig,
) -> Result<Vec<SubsetContext>> {
    let n = family.n;
    let mut labels = family.labels();
    labels.sort();
    let subsets: Vec<Vec<String>> = labels.into_iter().combinations(k + 1).collect();
    subsets
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let replacement = replace_hypersurfaces(family, s, seed.wrapping_add(i as u64), budget, cfg)?;
            let table = build_filtration(&replacement.outputs[..n], big_n, cfg)?.without_basis();
            Ok(SubsetContext { labels: s.clone(), replacement, table })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseGap {
    pub radius: f64,
    pub samples: usize,
    pub max_gap: f64,
    pub max_gap_doubled: f64,
    pub relative_change: f64,
    /// Distinct ordered `(k+1)`-tuples that were smallest somewhere on the circle.
    pub tuples_used: usize,
    pub stable: bool,
}

fn smallest_tuple(vals: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    idx.truncate(k + 1);
    idx
}

/// Samples `log Π_i ‖f̃‖^d/|Q_i(f̃)| − (k−n+1)·log Π_{j≤n} ‖f̃‖^d/|P_{Ij}(f̃)|` on
/// `|z| = radius`, where `I` orders the `k+1` smallest `|Q_i(f̃)(z)|`.
pub fn pointwise_gap(
    f: &MeromorphicCurve,
    family: &HypersurfaceFamily,
    k: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    budget: usize,
    cfg: &LocusConfig,
) -> Result<PointwiseGap> {
    let (fam, d) = normalize_degrees(family)?;
    let n = fam.n;
    if samples == 0 || radius <= 0.0 {
        return Err(Error::InvalidInput("need a positive radius and sample count".into()));
    }
    let polys = fam.polys();
    let q = polys.len();
    let p = (k - n + 1) as f64;
    let point = |j: usize, count: usize| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / count as f64);
    let eval = |z: Complex64| -> (f64, Vec<f64>) {
        let w = f.eval(z);
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (norm, polys.iter().map(|qq| qq.eval_complex(&w).norm()).collect())
    };
    let total = 2 * samples;
    let tuples: Vec<Vec<usize>> = (0..total).into_par_iter().map(|j| smallest_tuple(&eval(point(j, total)).1, k)).collect();
    let distinct: Vec<Vec<usize>> = tuples.iter().cloned().sorted().dedup().collect();
    let labels = fam.labels();
    let outputs: BTreeMap<Vec<usize>, Vec<HomPoly>> = distinct
        .par_iter()
        .map(|t| {
            let names: Vec<String> = t.iter().map(|&i| labels[i].clone()).collect();
            let rep = replace_hypersurfaces(&fam, &names, tuple_seed(seed, t, q), budget, cfg)?;
            Ok((t.clone(), rep.outputs[..n].to_vec()))
        })
        .collect::<Result<_>>()?;
    let gaps: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|j| {
            let z = point(j, total);
            let (norm, vals) = eval(z);
            let lognorm = d as f64 * norm.ln();
            let lhs: f64 = vals.iter().map(|v| lognorm - v.ln()).sum();
            let w = f.eval(z);
            let rhs: f64 = outputs[&tuples[j]].iter().map(|pp| lognorm - pp.eval_complex(&w).norm().ln()).sum();
            lhs - p * rhs
        })
        .collect();
    // Even indices of the doubled set are exactly the base samples.
    let max_gap = gaps.iter().step_by(2).copied().fold(f64::NEG_INFINITY, f64::max);
    let max_gap_doubled = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let relative_change = (max_gap_doubled - max_gap).abs() / max_gap.abs().max(f64::MIN_POSITIVE);
    let stable = max_gap.is_finite() && max_gap_doubled.is_finite() && relative_change < 0.01;
    Ok(PointwiseGap { radius, samples, max_gap, max_gap_doubled, relative_change, tuples_used: distinct.len(), stable })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginRow {
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// `Σ_i N^{[u−1]}_i(r) / d`.
    pub counting_sum: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmtReport {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub d: u32,
    pub p: u64,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub u: usize,
    pub b: u64,
    pub seed: u64,
    /// `q − p·u·N/(d·b)`, the coefficient of `T` in the margin.
    pub coefficient: String,
    /// `q − p(n+1) − ε`.
    pub theorem_coefficient: String,
    pub vacuous: bool,
    pub theorem_vacuous: bool,
    pub pointwise: PointwiseGap,
    pub margins: Vec<MarginRow>,
    /// Margin slope against `log r` over the last grid segment.
    pub tail_slope: f64,
    /// Exact slope for polynomial curves: `Σ_i Σ min(ν, u−1) / d − coefficient · deg f`.
    pub asymptotic_slope: f64,
    pub bounded_below: bool,
    pub subsets: Vec<SubsetSummary>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetSummary {
    pub labels: Vec<String>,
    pub prefix_dims: Vec<i64>,
    pub weights: Vec<u64>,
}

fn check_nondegenerate(f: &MeromorphicCurve, fam: &HypersurfaceFamily) -> Result<Vec<UniPoly<GaussRational>>> {
    if f.n() != fam.n {
        return Err(Error::AmbientMismatch { left: f.n(), right: fam.n });
    }
    fam.members
        .iter()
        .map(|m| {
            let g = f.compose(&m.poly);
            if g.is_zero() {
                Err(Error::CurveDegeneracy(format!("member {} vanishes identically along the curve", m.label)))
            } else {
                Ok(g)
            }
        })
        .collect()
}

fn prepare(f: &MeromorphicCurve, family: &HypersurfaceFamily, k: usize, cfg: &LocusConfig) -> Result<(HypersurfaceFamily, u32)> {
    let (fam, d) = normalize_degrees(family)?;
    check_nondegenerate(f, &fam)?;
    let verdict = check_subgeneral(&fam, k, cfg)?;
    if let crate::position::PositionVerdict::Violated { labels } = verdict {
        return Err(Error::PositionViolation { labels });
    }
    Ok((fam, d))
}

pub fn smt_margin(f: &MeromorphicCurve, family: &HypersurfaceFamily, cfg: &SmtConfig, grid: &RGrid) -> Result<SmtReport> {
    let k = cfg.k;
    let (fam, d) = prepare(f, family, k, &cfg.locus)?;
    let n = fam.n;
    let big_n = cfg.big_n;
    if !big_n.is_multiple_of(d) || big_n as usize <= n * d as usize {
        return Err(Error::InvalidInput(format!("N = {big_n} must be divisible by d = {d} and exceed n·d")));
    }
    let contexts = subset_contexts(&fam, k, big_n, cfg.seed, cfg.budget, &cfg.locus)?;
    let tables: Vec<FiltrationTable> = contexts.iter().map(|c| c.table.clone()).collect();
    let b = weight_summary(&tables)?.b;
    if b == 0 {
        return Err(Error::InvalidInput("filtration weight b is zero".into()));
    }
    let u = tables[0].u;
    let q = fam.q();
    let p = (k - n + 1) as u64;
    let coefficient = rat_int(q as i64)
        - Rational::new((p as i64 * u as i64 * big_n as i64).into(), (d as i64 * b as i64).into());
    let theorem_coefficient = rat_int(q as i64) - rat_int((p * (n as u64 + 1)) as i64) - cfg.eps.clone();
    let c = coefficient.to_f64().unwrap_or(f64::NAN);

    let t = characteristic(f, grid)?;
    let trunc = Some((u - 1) as u32);
    let mut sum = vec![0.0; t.len()];
    let mut zero_weight = 0u64;
    for m in &fam.members {
        let nv = counting(f, &m.poly, grid, trunc)?;
        for (s, v) in sum.iter_mut().zip(nv) {
            *s += v / d as f64;
        }
        zero_weight += roots_with_multiplicity(&f.compose(&m.poly)).iter().map(|&(_, k)| k.min(u as u32 - 1) as u64).sum::<u64>();
    }
    let margins: Vec<MarginRow> = grid
        .all_radii()
        .iter()
        .enumerate()
        .map(|(i, &r)| MarginRow { r, t: t[i], counting_sum: sum[i], margin: sum[i] - c * t[i] })
        .collect();
    let (a, z) = (&margins[margins.len() - 2], &margins[margins.len() - 1]);
    let tail_slope = (z.margin - a.margin) / (z.r / a.r).ln();
    let asymptotic_slope = zero_weight as f64 / d as f64 - c * f.degree() as f64;
    let vacuous = coefficient <= Rational::zero();
    let bounded_below = vacuous || (asymptotic_slope >= -1e-12 && tail_slope >= -DEFECT_TOL);
    let pointwise = pointwise_gap(f, &fam, k, cfg.sample_radius, cfg.samples, cfg.seed, cfg.budget, &cfg.locus)?;
    let pass = bounded_below && pointwise.stable;
    Ok(SmtReport {
        n,
        k,
        q,
        d,
        p,
        big_n,
        u,
        b,
        seed: cfg.seed,
        coefficient: rat_string(&coefficient),
        theorem_coefficient: rat_string(&theorem_coefficient),
        vacuous,
        theorem_vacuous: theorem_coefficient <= Rational::zero(),
        pointwise,
        margins,
        tail_slope,
        asymptotic_slope,
        bounded_below,
        subsets: contexts
            .iter()
            .map(|c| SubsetSummary {
                labels: c.labels.clone(),
                prefix_dims: c.replacement.prefix_dims.clone(),
                weights: c.table.weights.clone(),
            })
            .collect(),
        pass,
    })
}

/// Wronskian of all degree-`N` monomials composed with `f̃`.
pub fn monomial_wronskian(f: &MeromorphicCurve, big_n: u32) -> Result<UniPoly<GaussRational>> {
    let basis = monomial_basis(f.n(), big_n);
    let composed: Vec<UniPoly<GaussRational>> =
        basis.monomials().iter().map(|e| f.compose(&HomPoly::monomial(f.n(), e.clone(), rat_int(1)))).collect();
    let w = ordinary_wronskian(&composed);
    if !w.is_zero() {
        return Ok(w);
    }
    let detail = if f.is_real() {
        let width = composed.iter().filter_map(UniPoly::degree).max().unwrap_or(0) + 1;
        let rows: Vec<Vec<Rational>> =
            composed.iter().map(|p| (0..width).map(|i| p.coeff(i).re).collect()).collect();
        let kernel = RatMatrix::from_rows(width, &rows)?.transpose().kernel();
        kernel
            .first()
            .map(|c| {
                let terms: Vec<String> = c
                    .iter()
                    .zip(basis.monomials())
                    .filter(|(x, _)| !x.is_zero())
                    .map(|(x, e)| format!("({})*{}", rat_string(x), HomPoly::monomial(f.n(), e.clone(), rat_int(1))))
                    .collect();
                format!("{} vanishes along the curve", terms.join(" + "))
            })
            .unwrap_or_default()
    } else {
        "degree-N monomials are linearly dependent along the curve".into()
    };
    Err(Error::Nondegeneracy(format!("Wronskian vanishes identically: {detail}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroEntry {
    /// Square-free factor whose roots share every multiplicity below.
    pub factor: String,
    pub roots: usize,
    pub nu_q: Vec<u32>,
    pub nu_w: u32,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorReport {
    #[serde(rename = "N")]
    pub big_n: u32,
    pub u: usize,
    pub b: u64,
    pub p: u64,
    pub wronskian_degree: usize,
    pub entries: Vec<ZeroEntry>,
    pub pass: bool,
}

/// Checks `b·Σ_j ν_{Q_j(f̃)} − p·ν_W ≤ b·Σ_j min{u−1, ν_{Q_j(f̃)}}` at every zero of `Π_j Q_j(f̃)`.
/// Without `b`, it is taken from the filtrations of all `(k+1)`-subsets.
pub fn divisor_truncation_check(
    f: &MeromorphicCurve,
    family: &HypersurfaceFamily,
    k: usize,
    big_n: u32,
    b: Option<u64>,
    seed: u64,
    cfg: &LocusConfig,
) -> Result<DivisorReport> {
    let (fam, d) = prepare(f, family, k, cfg)?;
    let n = fam.n;
    if !big_n.is_multiple_of(d) || big_n < d {
        return Err(Error::InvalidInput(format!("N = {big_n} must be a positive multiple of d = {d}")));
    }
    let b = match b {
        Some(b) => b,
        None => {
            let contexts = subset_contexts(&fam, k, big_n, seed, DEFAULT_RETRY_BUDGET, cfg)?;
            weight_summary(&contexts.into_iter().map(|c| c.table).collect::<Vec<_>>())?.b
        }
    };
    let u = monomial_basis(n, big_n).len();
    let p = (k - n + 1) as u64;
    let w = monomial_wronskian(f, big_n)?;
    let composed = check_nondegenerate(f, &fam)?;
    let mut inputs = composed.clone();
    inputs.push(w.clone());
    let entries: Vec<ZeroEntry> = coprime_basis(&inputs)
        .into_iter()
        .filter(|g| composed.iter().any(|c| c.multiplicity_of(g) > 0))
        .map(|g| {
            let nu_q: Vec<u32> = composed.iter().map(|c| c.multiplicity_of(&g)).collect();
            let nu_w = w.multiplicity_of(&g);
            let total: i64 = nu_q.iter().map(|&v| v as i64).sum();
            let capped: i64 = nu_q.iter().map(|&v| v.min(u as u32 - 1) as i64).sum();
            let lhs = b as i64 * total - p as i64 * nu_w as i64;
            let rhs = b as i64 * capped;
            ZeroEntry { factor: g.to_string(), roots: g.degree().unwrap_or(0), nu_q, nu_w, lhs, rhs, holds: lhs <= rhs }
        })
        .collect();
    let pass = entries.iter().all(|e| e.holds);
    Ok(DivisorReport { big_n, u, b, p, wronskian_degree: w.degree().unwrap_or(0), entries, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_lines() -> HypersurfaceFamily {
        let w0 = HomPoly::var(1, 0);
        let w1 = HomPoly::var(1, 1);
        let s = w0.add(&w1).unwrap();
        HypersurfaceFamily::from_polys(1, Some(1), vec![w0, w1, s]).unwrap()
    }

    #[test]
    fn worked_divisor_example() {
        let cube = MeromorphicCurve::from_int(&[&[1], &[0, 0, 0, 1]]).unwrap();
        let rep = divisor_truncation_check(&cube, &three_lines(), 1, 2, None, 0, &LocusConfig::default()).unwrap();
        assert_eq!((rep.u, rep.b, rep.p, rep.wronskian_degree), (3, 3, 1, 6));
        let at_zero = rep.entries.iter().find(|e| e.nu_q[1] == 3).unwrap();
        assert_eq!((at_zero.nu_w, at_zero.lhs, at_zero.rhs), (6, 3, 6));
        assert!(rep.pass);
        let line = MeromorphicCurve::from_int(&[&[1], &[0, 1]]).unwrap();
        let rep = divisor_truncation_check(&line, &three_lines(), 1, 2, None, 0, &LocusConfig::default()).unwrap();
        assert_eq!(rep.entries.len(), 2);
        assert!(rep.entries.iter().all(|e| e.nu_w == 0 && e.lhs == e.rhs));
    }

    #[test]
    fn degenerate_wronskian_names_relation() {
        // (1 : z : z^2) satisfies w0·w2 − w1^2 = 0.
        let conic = MeromorphicCurve::from_int(&[&[1], &[0, 1], &[0, 0, 1]]).unwrap();
        match monomial_wronskian(&conic, 2) {
            Err(Error::Nondegeneracy(msg)) => assert!(msg.contains("x0*x2") || msg.contains("x1^2"), "{msg}"),
            other => panic!("expected nondegeneracy failure, got {other:?}"),
        }
    }

    #[test]
    fn margin_example() {
        let line = MeromorphicCurve::from_int(&[&[1], &[0, 1]]).unwrap();
        let grid = RGrid::parse("geom:2,64,24", 1.0, 4096).unwrap();
        let mut cfg = SmtConfig::new(1, rat_int(1), 4, 0);
        cfg.samples = 2000;
        let rep = smt_margin(&line, &three_lines(), &cfg, &grid).unwrap();
        assert_eq!((rep.u, rep.b, rep.coefficient.as_str()), (5, 10, "1"));
        assert!(rep.pass && !rep.vacuous);
        assert!((rep.asymptotic_slope - 1.0).abs() < 1e-12);
        assert!(rep.margins.windows(2).all(|w| w[1].margin > w[0].margin));
        assert!(rep.pointwise.stable, "{:?}", rep.pointwise);
    }
}
