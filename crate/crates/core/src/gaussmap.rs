//! Gauss maps of polynomial immersions `C^m → C^n` in Plücker coordinates.

use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{theorem_parameters, ParameterSet};
use crate::error::{Error, Result};
use crate::exact_algebra::{parse_rational, rat_string, Rational};
use crate::nevanlinna::{defect_estimate, profile, DefectEstimate, MeromorphicCurve, RGrid, DEFECT_TOL};
use crate::polyring::mpoly::gcd_all;
use crate::polyring::{LocusConfig, MPoly, TermJson, UniPoly};
use crate::position::{check_subgeneral, normalize_degrees, HypersurfaceFamily};
use crate::wronskian::{det_bareiss, to_univariate};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyImmersion {
    pub m: usize,
    pub n: usize,
    pub components: Vec<MPoly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MPolyJson {
    pub terms: Vec<TermJson>,
}

impl MPolyJson {
    pub fn from_mpoly(p: &MPoly) -> Self {
        MPolyJson { terms: p.terms().iter().map(|(e, v)| TermJson { exp: e.clone(), coef: rat_string(v) }).collect() }
    }

    pub fn to_mpoly(&self, m: usize) -> Result<MPoly> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.exp.len() != m {
                    return Err(Error::InvalidInput(format!("exponent {:?} needs {m} entries", t.exp)));
                }
                Ok((t.exp.clone(), parse_rational(&t.coef)?))
            })
            .collect::<Result<Vec<_>>>()?;
        MPoly::from_terms(m, terms).ok_or_else(|| Error::InvalidInput("bad exponent length".into()))
    }
}

/// `{"m": 1, "n": 2, "components": [{"terms": [{"exp": [1], "coef": "1"}]}, …]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionJson {
    pub m: usize,
    pub n: usize,
    pub components: Vec<MPolyJson>,
}

impl PolyImmersion {
    pub fn new(m: usize, n: usize, components: Vec<MPoly>) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidInput(format!("need 1 ≤ m ≤ n, got m = {m}, n = {n}")));
        }
        if components.len() != n {
            return Err(Error::InvalidInput(format!("need {n} components, got {}", components.len())));
        }
        if components.iter().any(|c| c.nvars() != m) {
            return Err(Error::InvalidInput(format!("components must be polynomials in {m} variables")));
        }
        Ok(PolyImmersion { m, n, components })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ImmersionJson = serde_json::from_str(s)?;
        let comps = j.components.iter().map(|c| c.to_mpoly(j.m)).collect::<Result<Vec<_>>>()?;
        Self::new(j.m, j.n, comps)
    }

    pub fn to_json(&self) -> ImmersionJson {
        ImmersionJson { m: self.m, n: self.n, components: self.components.iter().map(MPolyJson::from_mpoly).collect() }
    }

    /// Rows `D_i f = (∂f_1/∂z_i, …, ∂f_n/∂z_i)`.
    pub fn jacobian(&self) -> Vec<Vec<MPoly>> {
        (0..self.m).map(|i| self.components.iter().map(|c| c.derivative(i)).collect()).collect()
    }

    /// `f ∘ (z ↦ A z + c)`.
    pub fn precompose_affine(&self, a: &[Vec<Rational>], c: &[Rational]) -> Result<PolyImmersion> {
        if a.len() != self.m || a.iter().any(|r| r.len() != self.m) || c.len() != self.m {
            return Err(Error::InvalidInput("affine map has the wrong shape".into()));
        }
        let subs: Vec<MPoly> = (0..self.m)
            .map(|i| {
                (0..self.m)
                    .fold(MPoly::constant(self.m, c[i].clone()), |acc, j| acc.add(&MPoly::var(self.m, j).scale(&a[i][j])))
            })
            .collect();
        Self::new(self.m, self.n, self.components.iter().map(|p| p.compose(&subs)).collect())
    }
}

/// Column subsets of size `m` from `0..n` in lexicographic order.
pub fn column_subsets(m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(m).collect()
}

fn submatrix(jac: &[Vec<MPoly>], cols: &[usize]) -> Vec<Vec<MPoly>> {
    jac.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect()
}

/// All `m×m` minors of the Jacobian, unreduced.
pub fn jacobian_minors(f: &PolyImmersion) -> Vec<MPoly> {
    let jac = f.jacobian();
    column_subsets(f.m, f.n).par_iter().map(|cols| det_bareiss(submatrix(&jac, cols))).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussRepresentation {
    pub m: usize,
    pub n: usize,
    /// `binom(n, m) − 1`.
    pub n_amb: usize,
    pub subsets: Vec<Vec<usize>>,
    /// Minors divided by `common_factor`.
    pub pluecker: Vec<MPoly>,
    /// Monic gcd of the minors; its zeros lie in the rank-drop locus.
    pub common_factor: MPoly,
    /// Every reduced coordinate is constant, so `G` is constant.
    pub degenerate: bool,
}

pub fn gauss_map(f: &PolyImmersion) -> Result<GaussRepresentation> {
    let minors = jacobian_minors(f);
    if minors.iter().all(MPoly::is_zero) {
        return Err(Error::NotAnImmersion("every maximal minor of the Jacobian vanishes identically".into()));
    }
    let g = gcd_all(&minors).expect("at least one minor");
    let pluecker: Vec<MPoly> = minors.iter().map(|p| p.exact_div(&g).expect("gcd divides every minor")).collect();
    let degenerate = pluecker.iter().all(MPoly::is_constant);
    Ok(GaussRepresentation {
        m: f.m,
        n: f.n,
        n_amb: pluecker.len() - 1,
        subsets: column_subsets(f.m, f.n),
        pluecker,
        common_factor: g,
        degenerate,
    })
}

impl GaussRepresentation {
    fn coord(&self, cols: &[usize]) -> MPoly {
        let i = self.subsets.iter().position(|s| s == cols).expect("sorted subset");
        self.pluecker[i].clone()
    }

    /// `p_{I ∪ {j}}` with the sign of sorting `j` into `I`, zero when `j ∈ I`.
    fn signed_coord(&self, base: &[usize], j: usize) -> MPoly {
        if base.contains(&j) {
            return MPoly::zero(self.m);
        }
        let after = base.iter().filter(|&&x| x > j).count();
        let mut cols = base.to_vec();
        cols.push(j);
        cols.sort_unstable();
        let p = self.coord(&cols);
        if after % 2 == 1 {
            p.neg()
        } else {
            p
        }
    }

    /// Quadratic Plücker relations `Σ_k (−1)^k p_{I+j_k} p_{J−j_k} = 0` over all
    /// `|I| = m−1`, `|J| = m+1`. Returns the number of relations checked, or the
    /// first failing pair.
    pub fn check_pluecker_relations(&self) -> std::result::Result<usize, (Vec<usize>, Vec<usize>)> {
        if self.m == self.n {
            return Ok(0);
        }
        let mut checked = 0;
        for small in (0..self.n).combinations(self.m - 1) {
            for big in (0..self.n).combinations(self.m + 1) {
                let mut acc = MPoly::zero(self.m);
                for (k, &j) in big.iter().enumerate() {
                    let rest: Vec<usize> = big.iter().copied().filter(|&x| x != j).collect();
                    let term = self.signed_coord(&small, j).mul(&self.coord(&rest));
                    acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                if !acc.is_zero() {
                    return Err((small, big));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// `|⋀|² = Σ |p_I|²` at a point, using the unreduced minors.
    pub fn wedge_norm_sqr(&self, z: &[Complex64]) -> f64 {
        let g = self.common_factor.eval_complex(z).norm_sqr();
        g * self.pluecker.iter().map(|p| p.eval_complex(z).norm_sqr()).sum::<f64>()
    }

    /// `G` as a curve in `P^{n_amb}`, for one source variable.
    pub fn as_curve(&self) -> Result<MeromorphicCurve> {
        if self.m != 1 {
            return Err(Error::InvalidInput("only one-variable Gauss maps are curves".into()));
        }
        let comps: Vec<UniPoly<Rational>> = self.pluecker.iter().map(to_univariate).collect();
        MeromorphicCurve::from_rational(&comps)
    }
}

/// Reduced coordinates agree up to one nonzero constant.
pub fn projectively_equal(a: &[MPoly], b: &[MPoly]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(i) = a.iter().position(|p| !p.is_zero()) else {
        return b.iter().all(MPoly::is_zero);
    };
    let (_, ca) = a[i].leading_term().expect("nonzero");
    let Some((_, cb)) = b[i].leading_term() else {
        return false;
    };
    let ratio = cb / ca;
    a.iter().zip(b).all(|(x, y)| x.scale(&ratio) == *y)
}

/// Precomposing with an invertible affine change leaves `G` unchanged up to the change itself.
pub fn affine_invariance_holds(f: &PolyImmersion, a: &[Vec<Rational>], c: &[Rational]) -> Result<bool> {
    let g = f.precompose_affine(a, c)?;
    let lhs = gauss_map(&g)?;
    let rhs = gauss_map(f)?;
    let subs: Vec<MPoly> = (0..f.m)
        .map(|i| (0..f.m).fold(MPoly::constant(f.m, c[i].clone()), |acc, j| acc.add(&MPoly::var(f.m, j).scale(&a[i][j]))))
        .collect();
    let moved: Vec<MPoly> = rhs.pluecker.iter().map(|p| p.compose(&subs)).collect();
    Ok(projectively_equal(&lhs.pluecker, &moved))
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussDefectRow {
    pub label: String,
    pub estimate: DefectEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussDefectReport {
    pub n_amb: usize,
    pub pluecker: Vec<String>,
    pub k: usize,
    pub d: u32,
    /// Bounds for the theorem with `N_amb` as ambient dimension; its `N` is
    /// the parameter also written `L` in the Gauss-map statement.
    pub parameters: ParameterSet,
    #[serde(rename = "L")]
    pub big_l: String,
    pub truncation: u32,
    pub rows: Vec<GaussDefectRow>,
    pub sum_secant: f64,
    pub sum_asymptotic: f64,
    pub rhs: String,
    pub rhs_approx: f64,
    /// `None` when the family has fewer than `k+1` members.
    pub position_holds: Option<bool>,
    pub pass: bool,
}

pub fn gauss_defect_pipeline(
    f: &PolyImmersion,
    family: &HypersurfaceFamily,
    k: usize,
    eps: &Rational,
    rho: &Rational,
    grid: &RGrid,
) -> Result<GaussDefectReport> {
    if f.m != 1 {
        return Err(Error::InvalidInput("the defect pipeline needs a one-variable immersion".into()));
    }
    let rep = gauss_map(f)?;
    if rep.degenerate {
        return Err(Error::Nondegeneracy("the Gauss map is constant".into()));
    }
    let curve = rep.as_curve()?;
    if family.n != rep.n_amb {
        return Err(Error::AmbientMismatch { left: rep.n_amb, right: family.n });
    }
    let (fam, d) = normalize_degrees(family)?;
    let params = theorem_parameters(rep.n_amb as u64, k as u64, d as u64, eps, rho)?;
    let trunc = (&params.u - BigInt::from(1)).to_u32().unwrap_or(u32::MAX);
    let position_holds = if fam.q() > k {
        Some(check_subgeneral(&fam, k, &LocusConfig::default())?.holds())
    } else {
        None
    };
    let rows: Vec<GaussDefectRow> = fam
        .members
        .iter()
        .map(|m| {
            let p = profile(&curve, &m.poly, grid, Some(trunc))?;
            Ok(GaussDefectRow { label: m.label.clone(), estimate: defect_estimate(&p)? })
        })
        .collect::<Result<_>>()?;
    let sum_secant: f64 = rows.iter().map(|r| r.estimate.secant).sum();
    let sum_asymptotic: f64 = rows.iter().map(|r| r.estimate.asymptotic).sum();
    let rhs = params.rhs_full.clone();
    let rhs_approx = rhs.to_f64().unwrap_or(f64::INFINITY);
    let pass = rows.iter().all(|r| r.estimate.in_range)
        && sum_secant <= rhs_approx + DEFECT_TOL
        && sum_asymptotic <= rhs_approx + DEFECT_TOL;
    let names = ["z".to_string()];
    Ok(GaussDefectReport {
        n_amb: rep.n_amb,
        pluecker: rep.pluecker.iter().map(|p| p.fmt_with(&names)).collect(),
        k,
        d,
        big_l: params.big_n.to_string(),
        parameters: params,
        truncation: trunc,
        rows,
        sum_secant,
        sum_asymptotic,
        rhs: rat_string(&rhs),
        rhs_approx,
        position_holds,
        pass,
    })
}

pub fn is_invertible(a: &[Vec<Rational>]) -> bool {
    crate::exact_algebra::RatMatrix::from_rows(a.len(), a).is_ok_and(|m| m.rank() == a.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat, rat_int};
    use crate::polyring::HomPoly;
    use crate::wronskian::det_laplace;

    fn var(m: usize, i: usize) -> MPoly {
        MPoly::var(m, i)
    }

    fn plane_curve() -> PolyImmersion {
        PolyImmersion::new(1, 2, vec![var(1, 0), var(1, 0).pow(2)]).unwrap()
    }

    #[test]
    fn one_variable_examples() {
        let g = gauss_map(&plane_curve()).unwrap();
        assert_eq!(g.pluecker, vec![MPoly::one(1), var(1, 0).scale(&rat_int(2))]);
        assert!(!g.degenerate && g.n_amb == 1);
        let line = PolyImmersion::new(1, 2, vec![var(1, 0), var(1, 0).scale(&rat_int(2))]).unwrap();
        assert!(gauss_map(&line).unwrap().degenerate);
        let point = PolyImmersion::new(1, 2, vec![MPoly::one(1), MPoly::one(1)]).unwrap();
        assert!(matches!(gauss_map(&point), Err(Error::NotAnImmersion(_))));
    }

    #[test]
    fn surface_example_and_relations() {
        let f = PolyImmersion::new(2, 3, vec![var(2, 0), var(2, 1), var(2, 0).mul(&var(2, 1))]).unwrap();
        let g = gauss_map(&f).unwrap();
        assert_eq!(g.pluecker, vec![MPoly::one(2), var(2, 0), var(2, 1).neg()]);
        let f4 = PolyImmersion::new(
            2,
            4,
            vec![var(2, 0), var(2, 1), var(2, 0).mul(&var(2, 1)), var(2, 0).pow(3).add(&var(2, 1).pow(2))],
        )
        .unwrap();
        let g4 = gauss_map(&f4).unwrap();
        assert_eq!(g4.check_pluecker_relations(), Ok(16));
        let p = &g4.pluecker;
        let rel = p[0].mul(&p[5]).sub(&p[1].mul(&p[4])).add(&p[2].mul(&p[3]));
        assert!(rel.is_zero());
        let mut broken = g4.clone();
        broken.pluecker[0] = broken.pluecker[0].scale(&rat_int(2));
        assert!(broken.check_pluecker_relations().is_err());
    }

    #[test]
    fn minors_match_cofactor_expansion() {
        let f = PolyImmersion::new(
            2,
            3,
            vec![var(2, 0).pow(2), var(2, 1).mul(&var(2, 0)), var(2, 1).pow(3).add(&var(2, 0))],
        )
        .unwrap();
        let jac = f.jacobian();
        let oracle: Vec<MPoly> = column_subsets(2, 3).iter().map(|c| det_laplace(&submatrix(&jac, c))).collect();
        assert_eq!(jacobian_minors(&f), oracle);
        let g = gauss_map(&f).unwrap();
        let rebuilt: Vec<MPoly> = g.pluecker.iter().map(|p| p.mul(&g.common_factor)).collect();
        assert_eq!(rebuilt, oracle);
    }

    #[test]
    fn affine_invariance() {
        let f = PolyImmersion::new(
            2,
            4,
            vec![var(2, 0), var(2, 1).pow(2), var(2, 0).mul(&var(2, 1)), var(2, 0).pow(2).sub(&var(2, 1))],
        )
        .unwrap();
        let a = vec![vec![rat_int(2), rat_int(1)], vec![rat(-1, 3), rat_int(1)]];
        assert!(is_invertible(&a));
        assert!(affine_invariance_holds(&f, &a, &[rat_int(1), rat(1, 2)]).unwrap());
    }

    #[test]
    fn defect_pipeline_examples() {
        let grid = RGrid::parse("geom:2,1e4,24", 1.0, 1024).unwrap();
        let both = HypersurfaceFamily::from_polys(1, Some(1), vec![HomPoly::var(1, 0), HomPoly::var(1, 1)]).unwrap();
        let rep = gauss_defect_pipeline(&plane_curve(), &both, 1, &rat_int(1), &rat_int(0), &grid).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rows[0].estimate.asymptotic, 1.0);
        assert_eq!(rep.rows[1].estimate.asymptotic, 0.0);
        assert_eq!(rep.big_l, "18");
        let only = HypersurfaceFamily::from_polys(1, Some(1), vec![HomPoly::var(1, 0)]).unwrap();
        let rep = gauss_defect_pipeline(&plane_curve(), &only, 1, &rat_int(1), &rat_int(0), &grid).unwrap();
        assert!((rep.rows[0].estimate.secant - 1.0).abs() < 1e-12 && rep.position_holds.is_none());
        let line = PolyImmersion::new(1, 2, vec![var(1, 0), var(1, 0).scale(&rat_int(2))]).unwrap();
        assert!(matches!(
            gauss_defect_pipeline(&line, &both, 1, &rat_int(1), &rat_int(0), &grid),
            Err(Error::Nondegeneracy(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = plane_curve();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(PolyImmersion::from_json(&s).unwrap(), f);
        assert!(PolyImmersion::from_json(r#"{"m": 1, "n": 2, "components": [{"terms": [{"exp": [1, 0], "coef": "1"}]}, {"terms": []}]}"#).is_err());
    }
}
