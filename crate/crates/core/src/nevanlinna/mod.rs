//! Nevanlinna functionals of polynomial curves `C → P^n`.
//!
//! Counting functions come from exact root bookkeeping; characteristic and
//! proximity functions come from trapezoidal circle averages.

mod curve;
mod smt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::{GaussRational, RatMatrix};
use crate::polyring::univariate::squarefree;
use crate::polyring::{monomial_basis, HomPoly, UniPoly};

pub use curve::{CurveJson, MeromorphicCurve};
pub use smt::{
    divisor_truncation_check, monomial_wronskian, pointwise_gap, smt_margin, subset_contexts, DivisorReport,
    MarginRow, PointwiseGap, SmtConfig, SmtReport, SubsetContext, ZeroEntry,
};

pub const DEFAULT_NODES: usize = 4096;
/// Absolute change between successive node doublings accepted as converged.
pub const QUAD_TOL: f64 = 1e-11;
pub const MAX_DOUBLINGS: u32 = 6;
/// Roots closer than this relative distance to a circle are integrated analytically.
pub const NEAR_ROOT_BAND: f64 = 0.05;
pub const MONOTONE_TOL: f64 = 1e-9;
pub const DEFECT_TOL: f64 = 1e-3;
pub const FMT_TOL: f64 = 1e-5;

/// Node offsets (fractions of the spacing) tried when a node lands on a singularity.
const JITTER: [f64; 3] = [0.0, 0.381_966_011_250_105, 0.145_898_033_750_315];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RGrid {
    pub r0: f64,
    pub radii: Vec<f64>,
    pub nodes: usize,
}

impl RGrid {
    pub fn new(r0: f64, radii: Vec<f64>, nodes: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidInput(format!("r0 must be positive, got {r0}")));
        }
        if radii.is_empty() {
            return Err(Error::InvalidInput("grid has no radii".into()));
        }
        if radii[0] <= r0 || radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidInput("radii must increase strictly and start above r0".into()));
        }
        if nodes < 256 || !nodes.is_power_of_two() {
            return Err(Error::InvalidInput(format!("nodes must be a power of two ≥ 256, got {nodes}")));
        }
        Ok(RGrid { r0, radii, nodes })
    }

    /// `g` radii from `a` to `b` inclusive with constant ratio.
    pub fn geometric(r0: f64, a: f64, b: f64, g: usize, nodes: usize) -> Result<Self> {
        if g < 2 || !(a > 0.0 && b > a) {
            return Err(Error::InvalidInput("geometric grid needs 0 < a < b and at least 2 radii".into()));
        }
        let ratio = (b / a).ln() / (g - 1) as f64;
        let mut radii: Vec<f64> = (0..g).map(|i| a * (ratio * i as f64).exp()).collect();
        radii[g - 1] = b;
        Self::new(r0, radii, nodes)
    }

    /// `geom:a,b,G`, `lin:a,b,G`, or an explicit comma-separated list.
    pub fn parse(spec: &str, r0: f64, nodes: usize) -> Result<Self> {
        let nums = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad grid number {t:?}"))))
                .collect()
        };
        let three = |v: Vec<f64>| -> Result<(f64, f64, usize)> {
            match v[..] {
                [a, b, g] if g.fract() == 0.0 && g >= 2.0 => Ok((a, b, g as usize)),
                _ => Err(Error::Parse(format!("grid spec {spec:?} needs a,b,G with integer G ≥ 2"))),
            }
        };
        if let Some(body) = spec.strip_prefix("geom:") {
            let (a, b, g) = three(nums(body)?)?;
            Self::geometric(r0, a, b, g, nodes)
        } else if let Some(body) = spec.strip_prefix("lin:") {
            let (a, b, g) = three(nums(body)?)?;
            let radii = (0..g).map(|i| a + (b - a) * i as f64 / (g - 1) as f64).collect();
            Self::new(r0, radii, nodes)
        } else {
            Self::new(r0, nums(spec)?, nodes)
        }
    }

    /// `r0` followed by the radii.
    pub fn all_radii(&self) -> Vec<f64> {
        std::iter::once(self.r0).chain(self.radii.iter().copied()).collect()
    }
}

fn trapezoid(r: f64, nodes: usize, offset: f64, g: &(impl Fn(Complex64) -> f64 + Sync)) -> f64 {
    let step = std::f64::consts::TAU / nodes as f64;
    (0..nodes).map(|k| g(Complex64::from_polar(r, (k as f64 + offset) * step))).sum::<f64>() / nodes as f64
}

/// Trapezoidal average of `g` on `|z| = r`, doubling the node count until two
/// successive values agree within [`QUAD_TOL`].
pub fn circle_mean(r: f64, nodes: usize, g: impl Fn(Complex64) -> f64 + Sync) -> Result<f64> {
    'jitter: for &offset in &JITTER {
        let mut n = nodes;
        let mut cur = trapezoid(r, n, offset, &g);
        if !cur.is_finite() {
            continue;
        }
        for _ in 0..MAX_DOUBLINGS {
            // The doubled rule reuses the old nodes; only the midpoints are new.
            let mid = trapezoid(r, n, offset + 0.5, &g);
            if !mid.is_finite() {
                continue 'jitter;
            }
            let next = 0.5 * (cur + mid);
            n *= 2;
            if (next - cur).abs() <= QUAD_TOL * next.abs().max(1.0) {
                return Ok(next);
            }
            cur = next;
        }
        return Err(Error::NumericFailure(format!("circle average at r = {r} not converged with {n} nodes")));
    }
    Err(Error::NumericFailure(format!("integrand singular at every jittered node set on r = {r}")))
}

/// Roots of a nonzero polynomial with exact multiplicities from its square-free decomposition.
pub fn roots_with_multiplicity(g: &UniPoly<GaussRational>) -> Vec<(Complex64, u32)> {
    squarefree(g).into_iter().flat_map(|(s, k)| s.roots_numeric().into_iter().map(move |z| (z, k))).collect()
}

/// `N(r, r0)` of a root list with multiplicities capped at `trunc`.
pub fn counting_value(roots: &[(Complex64, u32)], r0: f64, r: f64, trunc: Option<u32>) -> f64 {
    roots
        .iter()
        .map(|&(a, k)| {
            let w = trunc.map_or(k, |m| k.min(m)) as f64;
            let rho = a.norm();
            if rho <= r0 {
                w * (r / r0).ln()
            } else if rho <= r {
                w * (r / rho).ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// `T_f(r, r0)` for every grid radius (first entry is `r0`, value 0).
pub fn characteristic(f: &MeromorphicCurve, grid: &RGrid) -> Result<Vec<f64>> {
    let means: Vec<f64> =
        grid.all_radii().par_iter().map(|&r| circle_mean(r, grid.nodes, |z| f.log_norm(z))).collect::<Result<_>>()?;
    Ok(means.iter().map(|m| m - means[0]).collect())
}

fn composed(f: &MeromorphicCurve, q: &HomPoly) -> Result<UniPoly<GaussRational>> {
    if q.n() != f.n() {
        return Err(Error::AmbientMismatch { left: f.n(), right: q.n() });
    }
    let g = f.compose(q);
    if g.is_zero() {
        return Err(Error::CurveDegeneracy(format!("the curve lies in {{{q} = 0}}")));
    }
    Ok(g)
}

/// `N^{[M]}(r, r0, f*Q)` at every grid radius (first entry is `r0`).
pub fn counting(f: &MeromorphicCurve, q: &HomPoly, grid: &RGrid, trunc: Option<u32>) -> Result<Vec<f64>> {
    let roots = roots_with_multiplicity(&composed(f, q)?);
    Ok(grid.all_radii().iter().map(|&r| counting_value(&roots, grid.r0, r, trunc)).collect())
}

/// Circle average of `log(‖f̃‖^d / |Q(f̃)|)`. Roots near the circle are divided
/// out of the integrand and their exact averages `log max(r, |a|)` added back,
/// so the remaining integrand is smooth.
fn proximity_mean(f: &MeromorphicCurve, g: &UniPoly<GaussRational>, roots: &[(Complex64, u32)], d: u32, r: f64, nodes: usize) -> Result<f64> {
    let near: Vec<(Complex64, u32)> =
        roots.iter().copied().filter(|(a, _)| (a.norm() - r).abs() < NEAR_ROOT_BAND * r).collect();
    let coeffs = g.complex_coeffs();
    let mean = circle_mean(r, nodes, |z| {
        let mut v = d as f64 * f.log_norm(z) - crate::polyring::univariate::horner(&coeffs, z).norm().ln();
        for &(a, k) in &near {
            v += k as f64 * (z - a).norm().ln();
        }
        v
    })?;
    let analytic: f64 = near.iter().map(|&(a, k)| k as f64 * r.max(a.norm()).ln()).sum();
    Ok(mean - analytic)
}

/// `m_f(r, r0, Q)` at every grid radius (first entry is `r0`, value 0).
pub fn proximity(f: &MeromorphicCurve, q: &HomPoly, grid: &RGrid) -> Result<Vec<f64>> {
    let g = composed(f, q)?;
    let roots = roots_with_multiplicity(&g);
    let d = q.degree();
    let means: Vec<f64> = grid
        .all_radii()
        .par_iter()
        .map(|&r| proximity_mean(f, &g, &roots, d, r, grid.nodes))
        .collect::<Result<_>>()?;
    Ok(means.iter().map(|m| m - means[0]).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n_full: f64,
    #[serde(rename = "N_trunc")]
    pub n_trunc: f64,
    pub m: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NevanlinnaProfile {
    pub d: u32,
    pub trunc: Option<u32>,
    pub curve_degree: usize,
    /// Zeros of `Q(f̃)` counted with multiplicity, and with multiplicities capped at `trunc`.
    pub zeros: u64,
    pub zeros_trunc: u64,
    pub rows: Vec<ProfileRow>,
}

pub fn profile(f: &MeromorphicCurve, q: &HomPoly, grid: &RGrid, trunc: Option<u32>) -> Result<NevanlinnaProfile> {
    let g = composed(f, q)?;
    let roots = roots_with_multiplicity(&g);
    let t = characteristic(f, grid)?;
    let m = proximity(f, q, grid)?;
    let d = q.degree();
    let rows = grid
        .all_radii()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let n_full = counting_value(&roots, grid.r0, r, None);
            let n_trunc = counting_value(&roots, grid.r0, r, trunc);
            ProfileRow { r, t: t[i], n_full, n_trunc, m: m[i], residual: d as f64 * t[i] - m[i] - n_full }
        })
        .collect();
    let zeros = roots.iter().map(|&(_, k)| k as u64).sum();
    let zeros_trunc = roots.iter().map(|&(_, k)| trunc.map_or(k, |c| k.min(c)) as u64).sum();
    Ok(NevanlinnaProfile { d, trunc, curve_degree: f.degree(), zeros, zeros_trunc, rows })
}

impl NevanlinnaProfile {
    pub fn residual_variation(&self) -> f64 {
        variation(self.rows.iter().map(|r| r.residual))
    }

    /// `T` and `N` nondecreasing, `N^{[M]} ≤ N`.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].t >= w[0].t - MONOTONE_TOL && w[1].n_full >= w[0].n_full && w[1].n_trunc >= w[0].n_trunc
        }) && self.rows.iter().all(|r| r.n_trunc <= r.n_full + 1e-12)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row).map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
        out.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(())
    }
}

pub fn variation(xs: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Estimates of `δ^{[l]} = 1 − limsup N^{[l]} / (d·T)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectEstimate {
    pub level: Option<u32>,
    /// `1 − ΔN^{[l]} / (d·ΔT)` over the last grid segment.
    pub secant: f64,
    /// Closed-form limit for polynomial curves: `1 − (Σ min(ν, l)) / (d·deg f)`.
    pub asymptotic: f64,
    /// Largest `N^{[l]} / (d·T)` over the last quarter of the grid (diagnostic only).
    pub tail_ratio_max: f64,
    pub in_range: bool,
}

pub fn defect_estimate(p: &NevanlinnaProfile) -> Result<DefectEstimate> {
    if p.curve_degree == 0 {
        return Err(Error::UndefinedDefect("the curve is constant, so T is bounded".into()));
    }
    let rows = &p.rows;
    let d = p.d as f64;
    let (a, b) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let secant = 1.0 - (b.n_trunc - a.n_trunc) / (d * (b.t - a.t));
    let asymptotic = 1.0 - p.zeros_trunc as f64 / (d * p.curve_degree as f64);
    let start = rows.len() - (rows.len() / 4).max(1);
    let tail_ratio_max =
        rows[start..].iter().filter(|r| r.t > 0.0).map(|r| r.n_trunc / (d * r.t)).fold(f64::NEG_INFINITY, f64::max);
    let ok = |x: f64| x.is_finite() && (-DEFECT_TOL..=1.0 + DEFECT_TOL).contains(&x);
    Ok(DefectEstimate { level: p.trunc, secant, asymptotic, tail_ratio_max, in_range: ok(secant) && ok(asymptotic) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FmtReport {
    pub profile: NevanlinnaProfile,
    pub residual_variation: f64,
    pub tolerance: f64,
    pub monotone: bool,
    pub defect: Option<DefectEstimate>,
    pub pass: bool,
}

pub fn fmt_report(
    f: &MeromorphicCurve,
    q: &HomPoly,
    grid: &RGrid,
    trunc: Option<u32>,
    want_defect: bool,
) -> Result<FmtReport> {
    let profile = profile(f, q, grid, trunc)?;
    let residual_variation = profile.residual_variation();
    let monotone = profile.monotone();
    let defect = if want_defect { Some(defect_estimate(&profile)?) } else { None };
    let pass = residual_variation <= FMT_TOL && monotone && defect.as_ref().is_none_or(|e| e.in_range);
    Ok(FmtReport { profile, residual_variation, tolerance: FMT_TOL, monotone, defect, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VeroneseReport {
    pub d: u32,
    pub u: usize,
    /// `T_F − d·T_f` at every grid radius (`r0` excluded, where both vanish).
    pub differences: Vec<f64>,
    pub variation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that `T_F − d·T_f` stays bounded for `F = (L_1(f̃) : … : L_u(f̃))`.
pub fn veronese_check(f: &MeromorphicCurve, forms: &[HomPoly], grid: &RGrid) -> Result<VeroneseReport> {
    let first = forms.first().ok_or_else(|| Error::InvalidInput("no forms given".into()))?;
    let d = first.degree();
    if forms.iter().any(|l| l.n() != f.n() || l.degree() != d) {
        return Err(Error::InvalidInput("forms must live on the curve's P^n and share a degree".into()));
    }
    let basis = monomial_basis(f.n(), d);
    if forms.len() != basis.len() {
        return Err(Error::InvalidInput(format!("need u = {} forms of degree {d}, got {}", basis.len(), forms.len())));
    }
    let rows: Vec<_> = forms.iter().map(|l| l.to_vector(&basis)).collect();
    if RatMatrix::from_rows(basis.len(), &rows)?.rank() != forms.len() {
        return Err(Error::InvalidInput("forms are linearly dependent".into()));
    }
    let big_f = MeromorphicCurve::new(forms.iter().map(|l| f.compose(l)).collect())?;
    let tf = characteristic(f, grid)?;
    let tbig = characteristic(&big_f, grid)?;
    let differences: Vec<f64> = tbig.iter().zip(&tf).skip(1).map(|(a, b)| a - d as f64 * b).collect();
    let variation = variation(differences.iter().copied());
    Ok(VeroneseReport { d, u: forms.len(), differences, variation, tolerance: FMT_TOL, pass: variation <= FMT_TOL })
}
