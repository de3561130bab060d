//! Hypersurface families: degree normalization, subgeneral-position checks,
//! the replacement construction, and sampled estimates of the constants
//! bracketing `max |Q_i(x)| / ‖x‖^d`.

use itertools::Itertools;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{rat_int, rat_string, Rational};
use crate::polyring::{is_empty_locus, projective_locus, HomPoly, LocusConfig};

/// Retries per step `t` of the replacement search.
pub const DEFAULT_RETRY_BUDGET: usize = 64;

/// Below this value of `h` the sampled point is treated as a near-common zero.
pub const DEFAULT_H_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Member {
    pub label: String,
    pub poly: HomPoly,
}

/// `{"n": int, "k": int, "members": [{"label": str, "poly": HomPoly}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceFamily {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub members: Vec<Member>,
}

impl HypersurfaceFamily {
    pub fn new(n: usize, k: Option<usize>, members: Vec<(String, HomPoly)>) -> Result<Self> {
        let fam = HypersurfaceFamily {
            n,
            k,
            members: members.into_iter().map(|(label, poly)| Member { label, poly }).collect(),
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Labels `Q1, Q2, …` in input order.
    pub fn from_polys(n: usize, k: Option<usize>, polys: Vec<HomPoly>) -> Result<Self> {
        Self::new(n, k, polys.into_iter().enumerate().map(|(i, p)| (format!("Q{}", i + 1), p)).collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let fam: HypersurfaceFamily = serde_json::from_str(s)?;
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidInput("family has no members".into()));
        }
        for m in &self.members {
            if m.poly.n() != self.n {
                return Err(Error::AmbientMismatch { left: self.n, right: m.poly.n() });
            }
            if m.poly.is_zero() {
                return Err(Error::InvalidInput(format!("member {} is the zero polynomial", m.label)));
            }
        }
        if self.members.iter().map(|m| &m.label).all_unique() {
            Ok(())
        } else {
            Err(Error::InvalidInput("member labels must be distinct".into()))
        }
    }

    pub fn q(&self) -> usize {
        self.members.len()
    }

    pub fn polys(&self) -> Vec<HomPoly> {
        self.members.iter().map(|m| m.poly.clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|m| m.label.clone()).collect()
    }

    /// The common degree, if all members share one.
    pub fn common_degree(&self) -> Option<u32> {
        let d = self.members[0].poly.degree();
        self.members.iter().all(|m| m.poly.degree() == d).then_some(d)
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.members
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown member label {label}")))
    }

    pub fn scaled(&self, s: &Rational) -> HypersurfaceFamily {
        let mut out = self.clone();
        for m in &mut out.members {
            m.poly = m.poly.scale(s);
        }
        out
    }
}

/// Replaces every member by its `(d/d_j)`-th power, `d = lcm` of the degrees.
pub fn normalize_degrees(family: &HypersurfaceFamily) -> Result<(HypersurfaceFamily, u32)> {
    family.validate()?;
    if let Some(m) = family.members.iter().find(|m| m.poly.degree() == 0) {
        return Err(Error::InvalidInput(format!("member {} has degree 0", m.label)));
    }
    let d = family.members.iter().fold(1u32, |acc, m| acc.lcm(&m.poly.degree()));
    let mut out = family.clone();
    for m in &mut out.members {
        let e = d / m.poly.degree();
        if e > 1 {
            m.poly = m.poly.pow(e);
        }
    }
    Ok((out, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PositionVerdict {
    Holds { subsets_checked: usize },
    Violated { labels: Vec<String> },
}

impl PositionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PositionVerdict::Holds { .. })
    }
}

/// Checks that every `(k+1)`-subset has empty common zero locus.
///
/// Subsets are enumerated over members sorted by label; the first violating
/// one in that order is reported.
pub fn check_subgeneral(family: &HypersurfaceFamily, k: usize, cfg: &LocusConfig) -> Result<PositionVerdict> {
    family.validate()?;
    if family.common_degree().is_none() {
        return Err(Error::InvalidInput("members must share a degree; normalize first".into()));
    }
    if k < family.n {
        return Err(Error::InvalidInput(format!("k = {k} is below n = {}", family.n)));
    }
    if family.q() < k + 1 {
        return Err(Error::InvalidInput(format!("need at least k+1 = {} members, have {}", k + 1, family.q())));
    }
    let mut order: Vec<&Member> = family.members.iter().collect();
    order.sort_by(|a, b| a.label.cmp(&b.label));
    let subsets: Vec<Vec<&Member>> = order.iter().copied().combinations(k + 1).collect();
    let results: Vec<Result<bool>> = subsets
        .par_iter()
        .map(|s| is_empty_locus(&s.iter().map(|m| m.poly.clone()).collect::<Vec<_>>(), cfg))
        .collect();
    for (s, r) in subsets.iter().zip(results) {
        if !r? {
            return Ok(PositionVerdict::Violated { labels: s.iter().map(|m| m.label.clone()).collect() });
        }
    }
    Ok(PositionVerdict::Holds { subsets_checked: subsets.len() })
}

/// Output of the replacement construction for one ordered `(k+1)`-subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplacementResult {
    pub n: usize,
    pub k: usize,
    pub source_labels: Vec<String>,
    /// `P_1, …, P_{n+1}`.
    pub outputs: Vec<HomPoly>,
    /// For `P_t` (`t ≥ 2`), the coefficients on source members `2..=k-n+t`.
    #[serde(serialize_with = "ser_rat_rows")]
    pub combination: Vec<Vec<Rational>>,
    /// Projective dimension of `P_1 ∩ … ∩ P_t`, `-1` for empty.
    pub prefix_dims: Vec<i64>,
    /// Draws used at each step `t ≥ 2`.
    pub attempts: Vec<usize>,
}

fn ser_rat_rows<S: serde::Serializer>(rows: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(rat_string).collect()).collect();
    strs.serialize(s)
}

impl ReplacementResult {
    /// Re-derives every output from the recorded coefficients.
    pub fn verify_span_form(&self, family: &HypersurfaceFamily) -> Result<bool> {
        let src: Vec<HomPoly> = self
            .source_labels
            .iter()
            .map(|l| family.index_of(l).map(|i| family.members[i].poly.clone()))
            .collect::<Result<_>>()?;
        if self.outputs[0] != src[0] {
            return Ok(false);
        }
        for t in 2..=self.n + 1 {
            let coeffs = &self.combination[t - 2];
            let top = self.k - self.n + t;
            if coeffs.len() != top - 1 {
                return Ok(false);
            }
            let forms: Vec<&HomPoly> = src[1..top].iter().collect();
            if HomPoly::linear_combination(&forms, coeffs)? != self.outputs[t - 1] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds `P_1 = Q_{i_1}` and `P_t = Σ_{j=2}^{k-n+t} c_{tj} Q_{i_j}` with seeded
/// random integer coefficients, accepting a draw only when the prefix
/// intersection drops to dimension `≤ n − t`.
pub fn replace_hypersurfaces(
    family: &HypersurfaceFamily,
    subset: &[String],
    seed: u64,
    budget: usize,
    cfg: &LocusConfig,
) -> Result<ReplacementResult> {
    family.validate()?;
    let n = family.n;
    if subset.len() < n + 1 {
        return Err(Error::InvalidInput(format!("subset needs at least n+1 = {} members", n + 1)));
    }
    if !subset.iter().all_unique() {
        return Err(Error::InvalidInput("subset labels repeat".into()));
    }
    let k = subset.len() - 1;
    let src: Vec<HomPoly> =
        subset.iter().map(|l| family.index_of(l).map(|i| family.members[i].poly.clone())).collect::<Result<_>>()?;
    let d = src[0].degree();
    if src.iter().any(|q| q.degree() != d) {
        return Err(Error::InvalidInput("subset members must share a degree".into()));
    }
    if !is_empty_locus(&src, cfg)? {
        return Err(Error::PositionViolation { labels: subset.to_vec() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outputs = vec![src[0].clone()];
    let mut prefix_dims = vec![projective_locus(&outputs, cfg)?.dim()];
    let mut combination = Vec::new();
    let mut attempts = Vec::new();
    for t in 2..=n + 1 {
        let top = k - n + t;
        let forms: Vec<&HomPoly> = src[1..top].iter().collect();
        let target = n as i64 - t as i64;
        let mut accepted = None;
        for attempt in 1..=budget {
            let bound = 10 * attempt as i64;
            let coeffs: Vec<Rational> = (0..forms.len()).map(|_| rat_int(rng.random_range(-bound..=bound))).collect();
            let p = HomPoly::linear_combination(&forms, &coeffs)?;
            if p.is_zero() {
                continue;
            }
            let mut trial = outputs.clone();
            trial.push(p);
            let dim = if t == n + 1 {
                if is_empty_locus(&trial, cfg)? {
                    -1
                } else {
                    0
                }
            } else {
                projective_locus(&trial, cfg)?.dim()
            };
            if dim <= target {
                accepted = Some((trial, coeffs, dim, attempt));
                break;
            }
        }
        let Some((trial, coeffs, dim, attempt)) = accepted else {
            return Err(Error::SearchFailure {
                step: t,
                retries: budget,
                partial: outputs.iter().map(ToString::to_string).collect(),
            });
        };
        outputs = trial;
        combination.push(coeffs);
        prefix_dims.push(dim);
        attempts.push(attempt);
    }
    Ok(ReplacementResult { n, k, source_labels: subset.to_vec(), outputs, combination, prefix_dims, attempts })
}

/// Sampled range of `h(x) = max_i |Q_i(x)| / ‖x‖^d` on the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositionConstants {
    pub alpha_est: f64,
    pub beta_est: f64,
    pub samples: usize,
    pub seed: u64,
    pub warning: Option<String>,
}

/// Seeded uniform points on the unit sphere of `C^{n+1}`, preceded by the coordinate points.
pub fn sphere_samples(n: usize, samples: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<Complex64>> = (0..=n)
        .map(|i| (0..=n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    for _ in 0..samples {
        let v: Vec<Complex64> =
            (0..=n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|z| z / norm).collect());
    }
    out
}

pub fn h_value(polys: &[HomPoly], d: u32, x: &[Complex64]) -> f64 {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let top = polys.iter().map(|q| q.eval_complex(x).norm()).fold(0.0, f64::max);
    top / norm.powi(d as i32)
}

pub fn position_constants(
    family: &HypersurfaceFamily,
    samples: usize,
    seed: u64,
    floor: f64,
) -> Result<PositionConstants> {
    family.validate()?;
    let d = family
        .common_degree()
        .ok_or_else(|| Error::InvalidInput("members must share a degree; normalize first".into()))?;
    let polys = family.polys();
    let pts = sphere_samples(family.n, samples, seed);
    let hs: Vec<f64> = pts.par_iter().map(|x| h_value(&polys, d, x)).collect();
    let alpha = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let beta = hs.iter().copied().fold(0.0, f64::max);
    let warning = (alpha < floor)
        .then(|| format!("sampled h = {alpha:e} below floor {floor:e}; the common intersection may be nonempty"));
    Ok(PositionConstants { alpha_est: alpha, beta_est: beta, samples: pts.len(), seed, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;
    use crate::polyring::mpoly::gcd_all;

    fn form(n: usize, d: u32, terms: &[(&[u32], i64)]) -> HomPoly {
        HomPoly::from_terms(n, d, terms.iter().map(|(e, c)| (e.to_vec(), rat_int(*c)))).unwrap()
    }

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn squares() -> HypersurfaceFamily {
        HypersurfaceFamily::from_polys(
            1,
            None,
            vec![form(1, 2, &[(&[2, 0], 1)]), form(1, 2, &[(&[1, 1], 1)]), form(1, 2, &[(&[0, 2], 1)])],
        )
        .unwrap()
    }

    #[test]
    fn normalization_powers_to_lcm() {
        let fam = HypersurfaceFamily::from_polys(1, None, vec![form(1, 1, &[(&[1, 0], 1)]), form(1, 2, &[(&[0, 2], 1)])])
            .unwrap();
        let (out, d) = normalize_degrees(&fam).unwrap();
        assert_eq!(d, 2);
        assert_eq!(out.members[0].poly, form(1, 2, &[(&[2, 0], 1)]));
        let fam = HypersurfaceFamily::from_polys(
            1,
            None,
            vec![form(1, 2, &[(&[1, 1], 1)]), form(1, 3, &[(&[3, 0], 1), (&[0, 3], 1)])],
        )
        .unwrap();
        let (out, d) = normalize_degrees(&fam).unwrap();
        assert_eq!(d, 6);
        assert_eq!(out.members[0].poly, fam.members[0].poly.pow(3));
        assert_eq!(out.members[1].poly, fam.members[1].poly.pow(2));
    }

    #[test]
    fn subgeneral_examples() {
        let cfg = LocusConfig::default();
        let lines = HypersurfaceFamily::from_polys(
            1,
            None,
            vec![form(1, 1, &[(&[1, 0], 1)]), form(1, 1, &[(&[0, 1], 1)]), form(1, 1, &[(&[1, 0], 1), (&[0, 1], 1)])],
        )
        .unwrap();
        assert!(check_subgeneral(&lines, 1, &cfg).unwrap().holds());
        let sq = squares();
        assert_eq!(
            check_subgeneral(&sq, 1, &cfg).unwrap(),
            PositionVerdict::Violated { labels: labels(&["Q1", "Q2"]) }
        );
        assert!(check_subgeneral(&sq, 2, &cfg).unwrap().holds());
        let coords =
            HypersurfaceFamily::from_polys(2, None, (0..3).map(|i| HomPoly::var(2, i)).collect()).unwrap();
        assert!(check_subgeneral(&coords, 2, &cfg).unwrap().holds());
    }

    #[test]
    fn replacement_on_squares() {
        let cfg = LocusConfig::default();
        let sq = squares();
        let r = replace_hypersurfaces(&sq, &labels(&["Q1", "Q2", "Q3"]), 7, DEFAULT_RETRY_BUDGET, &cfg).unwrap();
        assert_eq!(r.outputs[0], sq.members[0].poly);
        assert!(r.verify_span_form(&sq).unwrap());
        // P_2 = c2·x0x1 + c3·x1² must have c3 ≠ 0.
        assert_ne!(r.combination[0][1], rat_int(0));
        let g = gcd_all(&r.outputs.iter().map(|p| p.poly().clone()).collect::<Vec<_>>()).unwrap();
        assert!(g.is_constant());
        assert_eq!(r.prefix_dims, vec![0, -1]);
        let again = replace_hypersurfaces(&sq, &labels(&["Q1", "Q2", "Q3"]), 7, DEFAULT_RETRY_BUDGET, &cfg).unwrap();
        assert_eq!(again.combination, r.combination);
    }

    #[test]
    fn replacement_passthrough_and_violation() {
        let cfg = LocusConfig::default();
        let fam = HypersurfaceFamily::from_polys(1, None, vec![HomPoly::var(1, 0), HomPoly::var(1, 1)]).unwrap();
        let r = replace_hypersurfaces(&fam, &labels(&["Q1", "Q2"]), 0, DEFAULT_RETRY_BUDGET, &cfg).unwrap();
        assert_eq!(r.combination[0].len(), 1);
        assert_eq!(r.outputs[1], HomPoly::var(1, 1).scale(&r.combination[0][0]));
        let sq = squares();
        assert!(matches!(
            replace_hypersurfaces(&sq, &labels(&["Q1", "Q2"]), 0, DEFAULT_RETRY_BUDGET, &cfg),
            Err(Error::PositionViolation { .. })
        ));
        assert!(HypersurfaceFamily::from_polys(1, None, vec![HomPoly::zero(1, 2)]).is_err());
    }

    #[test]
    fn constants_for_coordinate_lines() {
        let fam = HypersurfaceFamily::from_polys(1, None, vec![HomPoly::var(1, 0), HomPoly::var(1, 1)]).unwrap();
        let c = position_constants(&fam, 4000, 1, DEFAULT_H_FLOOR).unwrap();
        let lo = 0.5f64.sqrt();
        assert!(c.alpha_est >= lo - 1e-12 && c.alpha_est < lo + 0.02);
        assert!((c.beta_est - 1.0).abs() < 1e-12);
        assert!(c.warning.is_none());
        let scaled = position_constants(&fam.scaled(&rat(3, 2)), 4000, 1, DEFAULT_H_FLOOR).unwrap();
        assert!((scaled.alpha_est - 1.5 * c.alpha_est).abs() < 1e-12 * c.alpha_est.max(1.0));
        assert!((scaled.beta_est - 1.5 * c.beta_est).abs() < 1e-12);
    }

    #[test]
    fn constants_warn_on_common_zero() {
        let fam = HypersurfaceFamily::from_polys(1, None, vec![form(1, 2, &[(&[2, 0], 1), (&[0, 2], 1)])]).unwrap();
        let mut pts = sphere_samples(1, 10, 0);
        let s = 0.5f64.sqrt();
        pts.push(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
        assert!(h_value(&fam.polys(), 2, pts.last().unwrap()) < 1e-15);
        // Random samples only approach the zeros, so use a coarse floor.
        let c = position_constants(&fam, 20000, 3, 1e-2).unwrap();
        assert!(c.warning.is_some());
    }

    #[test]
    fn constants_respect_coordinate_swap() {
        let fam = HypersurfaceFamily::from_polys(
            1,
            None,
            vec![form(1, 2, &[(&[2, 0], 1), (&[0, 2], 1)]), form(1, 2, &[(&[1, 1], 1)])],
        )
        .unwrap();
        let polys = fam.polys();
        for x in sphere_samples(1, 200, 4) {
            let swapped = vec![x[1], x[0]];
            assert!((h_value(&polys, 2, &x) - h_value(&polys, 2, &swapped)).abs() < 1e-14);
        }
    }

    #[test]
    fn family_json_round_trip() {
        let s = r#"{"n":1,"k":2,"members":[{"label":"a","poly":{"n":1,"degree":1,"terms":[{"exp":[1,0],"coef":"1"}]}},
                   {"label":"b","poly":{"n":1,"degree":1,"terms":[{"exp":[0,1],"coef":"-1/2"}]}}]}"#;
        let fam = HypersurfaceFamily::from_json(s).unwrap();
        assert_eq!(fam.k, Some(2));
        let back = HypersurfaceFamily::from_json(&serde_json::to_string(&fam).unwrap()).unwrap();
        assert_eq!(back, fam);
        assert!(HypersurfaceFamily::from_json(r#"{"n":1,"members":[]}"#).is_err());
    }
}
