use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{rat_int, Field, GaussRational, Rational};
use crate::polyring::univariate::{gcd_all, horner};
use crate::polyring::{HomPoly, UniPoly};

/// Reduced representation `f̃ = (f_0, …, f_n)` of a polynomial curve.
#[derive(Clone, Debug, PartialEq)]
pub struct MeromorphicCurve {
    n: usize,
    components: Vec<UniPoly<GaussRational>>,
    /// Floating-point copies of the coefficients for fast evaluation.
    numeric: Vec<Vec<Complex64>>,
}

/// `{"n": 1, "components": [["1"], ["0", "1/2+i"]]}` with ascending coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub n: usize,
    pub components: Vec<Vec<String>>,
}

impl MeromorphicCurve {
    pub fn new(components: Vec<UniPoly<GaussRational>>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two components".into()));
        }
        if components.iter().all(UniPoly::is_zero) {
            return Err(Error::InvalidInput("all components are zero".into()));
        }
        let g = gcd_all(&components);
        if !g.is_constant() {
            return Err(Error::InvalidInput(format!("components share the factor {g}; not a reduced representation")));
        }
        let numeric = components.iter().map(UniPoly::complex_coeffs).collect();
        Ok(MeromorphicCurve { n: components.len() - 1, components, numeric })
    }

    pub fn from_rational(components: &[UniPoly<Rational>]) -> Result<Self> {
        Self::new(components.iter().map(|p| p.map_field(|c| GaussRational::real(c.clone()))).collect())
    }

    /// Integer coefficient lists, ascending.
    pub fn from_int(components: &[&[i64]]) -> Result<Self> {
        Self::new(
            components
                .iter()
                .map(|c| UniPoly::new(c.iter().map(|&x| GaussRational::real(rat_int(x))).collect()))
                .collect(),
        )
    }

    pub fn from_json_value(j: &CurveJson) -> Result<Self> {
        if j.components.len() != j.n + 1 {
            return Err(Error::InvalidInput(format!("n = {} needs {} components, got {}", j.n, j.n + 1, j.components.len())));
        }
        let comps = j
            .components
            .iter()
            .map(|cs| cs.iter().map(|s| GaussRational::parse(s)).collect::<Result<Vec<_>>>().map(UniPoly::new))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> CurveJson {
        CurveJson {
            n: self.n,
            components: self.components.iter().map(|p| p.coeffs().iter().map(Field::render).collect()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[UniPoly<GaussRational>] {
        &self.components
    }

    /// Largest component degree; 0 exactly when the map is constant (the
    /// representation is reduced, so a constant map has constant components).
    pub fn degree(&self) -> usize {
        self.components.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        self.numeric.iter().map(|c| horner(c, z)).collect()
    }

    pub fn log_norm(&self, z: Complex64) -> f64 {
        0.5 * self.numeric.iter().map(|c| horner(c, z).norm_sqr()).sum::<f64>().ln()
    }

    /// `Q(f̃)`.
    pub fn compose(&self, q: &HomPoly) -> UniPoly<GaussRational> {
        q.compose_curve(&self.components)
    }

    /// All coefficients real.
    pub fn is_real(&self) -> bool {
        self.components.iter().all(|p| p.coeffs().iter().all(GaussRational::is_real))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_validation() {
        let s = r#"{"n": 1, "components": [["1"], ["0", "1/2+i"]]}"#;
        let c = MeromorphicCurve::from_json(s).unwrap();
        assert_eq!(c.degree(), 1);
        let back = MeromorphicCurve::from_json(&serde_json::to_string(&c.to_json()).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(MeromorphicCurve::from_json(r#"{"n": 1, "components": [["0", "1"], ["0", "0", "1"]]}"#).is_err());
        assert!(MeromorphicCurve::from_json(r#"{"n": 2, "components": [["1"], ["0", "1"]]}"#).is_err());
        assert!(MeromorphicCurve::from_json(r#"{"n": 1, "components": [["0"], ["0"]]}"#).is_err());
        assert!(MeromorphicCurve::from_int(&[&[1], &[2]]).unwrap().is_constant());
    }
}
