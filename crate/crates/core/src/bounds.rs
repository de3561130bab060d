//! Explicit parameters of the defect bound: `I(x)`, `p`, `N`, `u`, the
//! right-hand side, and exact checks of the two estimates relating them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::{rat_string, rat_to_f64, Rational};

/// `I(x) = min{a ∈ Z : a > x}`.
pub fn strict_ceiling(x: &Rational) -> BigInt {
    x.floor().to_integer() + 1
}

pub fn binomial(n: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn rat_big(x: &BigInt) -> Rational {
    Rational::from_integer(x.clone())
}

/// Rational enclosure `lo < e < hi` with `hi − lo < 10⁻¹⁸`.
pub fn e_bounds() -> (Rational, Rational) {
    let terms = 20u64;
    let mut lo = Rational::zero();
    for k in 0..=terms {
        lo += Rational::new(BigInt::one(), factorial(k));
    }
    // Tail Σ_{k>m} 1/k! < 2/(m+1)!.
    let hi = &lo + Rational::new(BigInt::from(2), factorial(terms + 1));
    (lo, hi)
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(q))
}

fn ser_opt_rat<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&rat_string(q)),
        None => s.serialize_none(),
    }
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Every derived quantity of the main bound for given `(n, k, d, ε, ρ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterSet {
    pub n: u64,
    pub k: u64,
    pub d: u64,
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub rho: Rational,
    pub p: u64,
    #[serde(serialize_with = "ser_big")]
    pub i_eps: BigInt,
    #[serde(rename = "N", serialize_with = "ser_big")]
    pub big_n: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub u: BigInt,
    /// `p(n+1) + ε`.
    #[serde(serialize_with = "ser_rat")]
    pub rhs_base: Rational,
    /// `p(n+1) + ε + ρu(u−1)/d`.
    #[serde(serialize_with = "ser_rat")]
    pub rhs_full: Rational,
    /// `p(n+1) + 1`, the limit as `ε ↓ 1` of the base bound.
    #[serde(serialize_with = "ser_opt_rat", skip_serializing_if = "Option::is_none")]
    pub corollary_rhs: Option<Rational>,
    pub comparison: AltParameters,
}

/// The older parameter choice `N' = 2kdn²(n+1)²I(ε⁻¹)` and its bound
/// `u' ≤ (3ekdI(ε⁻¹))ⁿ(n+1)^{3n}`, for display only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AltParameters {
    #[serde(rename = "N_alt", serialize_with = "ser_big")]
    pub big_n_alt: BigInt,
    /// `log10` of the displayed bound on `u'`.
    pub log10_u_alt_bound: f64,
    /// `log10` of `e^{n+2}(dp(n+1)²I)ⁿ`.
    pub log10_u_bound: f64,
    /// `log10` of `3^{n+2}(dp(n+1)²I)ⁿ`, the base-3 variant stated for the Gauss-map setting.
    pub log10_u_bound_base3: f64,
}

pub fn theorem_parameters(n: u64, k: u64, d: u64, eps: &Rational, rho: &Rational) -> Result<ParameterSet> {
    if n < 1 || k < n {
        return Err(Error::InvalidInput(format!("need k ≥ n ≥ 1, got n = {n}, k = {k}")));
    }
    if d < 1 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    if rho.is_negative() {
        return Err(Error::InvalidInput("ρ must be nonnegative".into()));
    }
    let p = k - n + 1;
    let i_eps = strict_ceiling(&eps.recip());
    let n1 = BigInt::from(n + 1);
    let big_n = &n1 * d + BigInt::from(p) * n1.pow(3) * &i_eps * d;
    let u = binomial(&(&big_n + n), n);
    let rhs_base = rat_big(&(BigInt::from(p) * &n1)) + eps;
    let rhs_full = &rhs_base + rho * rat_big(&(&u * (&u - 1u32))) / rat_big(&BigInt::from(d));
    let x = BigInt::from(d * p) * n1.pow(2) * &i_eps;
    let log_x = log10_big(&x);
    let e = std::f64::consts::E;
    let comparison = AltParameters {
        big_n_alt: BigInt::from(2 * k * d * n * n) * n1.pow(2) * &i_eps,
        log10_u_alt_bound: n as f64 * (log10_big(&(BigInt::from(3 * k * d) * &i_eps)) + e.log10())
            + 3.0 * n as f64 * ((n + 1) as f64).log10(),
        log10_u_bound: (n + 2) as f64 * e.log10() + n as f64 * log_x,
        log10_u_bound_base3: (n + 2) as f64 * 3f64.log10() + n as f64 * log_x,
    };
    Ok(ParameterSet {
        n,
        k,
        d,
        eps: eps.clone(),
        rho: rho.clone(),
        p,
        i_eps,
        big_n,
        u,
        rhs_base,
        rhs_full,
        corollary_rhs: None,
        comparison,
    })
}

fn log10_big(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f.log10(),
        _ => {
            let s = x.to_string();
            let lead: f64 = s[..15].parse().unwrap();
            lead.log10() + (s.len() - 15) as f64
        }
    }
}

impl ParameterSet {
    pub fn with_corollary(mut self) -> Self {
        self.corollary_rhs = Some(Rational::from_integer(BigInt::from(self.p * (self.n + 1) + 1)));
        self
    }
}

/// `N(N−d)···(N−nd) / ((n+1)!·d)`.
pub fn b_lower_bound(n: u64, d: u64, big_n: &BigInt) -> Result<Rational> {
    if *big_n <= BigInt::from(n * d) {
        return Err(Error::InvalidInput(format!("N = {big_n} must exceed nd = {}", n * d)));
    }
    let num = (0..=n).fold(BigInt::one(), |acc, j| acc * (big_n - BigInt::from(j * d)));
    Ok(Rational::new(num, factorial(n + 1) * BigInt::from(d)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The two roundings of `e` disagree.
    Undecided,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaNewReport {
    #[serde(serialize_with = "ser_rat")]
    pub b: Rational,
    pub b_source: String,
    /// `puN/(db)`.
    #[serde(serialize_with = "ser_rat")]
    pub ratio: Rational,
    pub ratio_approx: f64,
    #[serde(serialize_with = "ser_rat")]
    pub bound_a: Rational,
    pub a: Verdict,
    #[serde(serialize_with = "ser_big")]
    pub u: BigInt,
    /// `e^{n+2}(dp(n+1)²I)ⁿ` with `e` rounded down and up.
    pub bound_b_low: f64,
    pub bound_b_high: f64,
    pub b_check: Verdict,
    /// `p ≤ b`, used without proof in the surrounding argument.
    pub p_le_b: bool,
}

impl LemmaNewReport {
    pub fn passed(&self) -> bool {
        self.a.passed() && self.b_check.passed()
    }
}

/// Checks `puN/(db) ≤ p(n+1) + ε` and `u ≤ e^{n+2}(dp(n+1)²I(ε⁻¹))ⁿ`
/// exactly. With `b = None` the lower bound [`b_lower_bound`] is used.
pub fn verify_lemma_new(params: &ParameterSet, b: Option<&Rational>) -> Result<LemmaNewReport> {
    let (b, b_source) = match b {
        Some(b) => (b.clone(), "supplied"),
        None => (b_lower_bound(params.n, params.d, &params.big_n)?, "formula"),
    };
    if b.is_zero() {
        return Err(Error::DivisionByZero("b = 0: the filtration is degenerate".into()));
    }
    let num = BigInt::from(params.p) * &params.u * &params.big_n;
    let ratio = rat_big(&num) / (rat_big(&BigInt::from(params.d)) * &b);
    let bound_a = &params.rhs_base;
    let a = if ratio <= *bound_a { Verdict::Pass } else { Verdict::Fail };

    let x = rat_big(&(BigInt::from(params.d * params.p) * BigInt::from(params.n + 1).pow(2) * &params.i_eps));
    let xn = pow_rat(&x, params.n as u32);
    let (e_lo, e_hi) = e_bounds();
    let lo = pow_rat(&e_lo, params.n as u32 + 2) * &xn;
    let hi = pow_rat(&e_hi, params.n as u32 + 2) * &xn;
    let u = rat_big(&params.u);
    let b_check = match (u <= lo, u <= hi) {
        (true, true) => Verdict::Pass,
        (false, false) => Verdict::Fail,
        _ => Verdict::Undecided,
    };
    Ok(LemmaNewReport {
        p_le_b: rat_big(&BigInt::from(params.p)) <= b,
        b,
        b_source: b_source.into(),
        ratio_approx: rat_to_f64(&ratio),
        ratio,
        bound_a: bound_a.clone(),
        a,
        u: params.u.clone(),
        bound_b_low: rat_to_f64(&lo),
        bound_b_high: rat_to_f64(&hi),
        b_check,
    })
}

fn pow_rat(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// `(1+x)ⁿ ≤ 1+(n+1)x`, exact.
pub fn binomial_estimate_holds(n: u32, x: &Rational) -> bool {
    pow_rat(&(Rational::one() + x), n) <= Rational::one() + Rational::from_integer(BigInt::from(n + 1)) * x
}

/// `(n+1)d / (N − (n+1)d) ≤ 1/(n+1)²`.
pub fn ratio_precondition_holds(params: &ParameterSet) -> bool {
    let base = BigInt::from((params.n + 1) * params.d);
    let lhs = Rational::new(base.clone(), &params.big_n - &base);
    lhs <= Rational::new(BigInt::one(), BigInt::from(params.n + 1).pow(2))
}

/// True when `N` is a multiple of `d`; always the case by construction.
pub fn divisible(params: &ParameterSet) -> bool {
    params.big_n.is_multiple_of(&BigInt::from(params.d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::{rat, rat_int};

    #[test]
    fn strict_ceiling_examples() {
        assert_eq!(strict_ceiling(&rat_int(1)), BigInt::from(2));
        assert_eq!(strict_ceiling(&rat(1, 2)), BigInt::from(1));
        assert_eq!(strict_ceiling(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(strict_ceiling(&rat(-1, 1)), BigInt::from(0));
    }

    #[test]
    fn parameter_examples() {
        let ps = theorem_parameters(2, 2, 1, &rat_int(1), &rat_int(0)).unwrap();
        assert_eq!((ps.p, ps.i_eps.clone(), ps.big_n.clone(), ps.u.clone()), (1, 2.into(), 57.into(), 1711.into()));
        assert_eq!(ps.rhs_full, rat_int(4));
        let ps = theorem_parameters(1, 1, 1, &rat_int(1), &rat_int(0)).unwrap();
        assert_eq!((ps.big_n.clone(), ps.u.clone(), ps.rhs_base.clone()), (18.into(), 19.into(), rat_int(3)));
        let ps = theorem_parameters(1, 2, 2, &rat(1, 2), &rat_int(0)).unwrap();
        assert_eq!((ps.p, ps.i_eps.clone(), ps.big_n.clone(), ps.u.clone()), (2, 3.into(), 100.into(), 101.into()));
        assert_eq!(ps.rhs_full, rat(9, 2));
        assert!(divisible(&ps));
        assert_eq!(ps.with_corollary().corollary_rhs, Some(rat_int(5)));
    }

    #[test]
    fn rho_term_uses_big_integers() {
        let ps = theorem_parameters(1, 1, 1, &rat_int(1), &rat(1, 3)).unwrap();
        assert_eq!(ps.rhs_full, rat_int(3) + rat(19 * 18, 3));
        assert!(theorem_parameters(1, 0, 1, &rat_int(1), &rat_int(0)).is_err());
        assert!(theorem_parameters(1, 1, 1, &rat_int(0), &rat_int(0)).is_err());
        assert!(theorem_parameters(1, 1, 1, &rat_int(1), &rat_int(-1)).is_err());
    }

    #[test]
    fn lemma_examples() {
        let ps = theorem_parameters(1, 1, 1, &rat_int(1), &rat_int(0)).unwrap();
        let r = verify_lemma_new(&ps, None).unwrap();
        assert_eq!(r.b, rat_int(153));
        assert_eq!(r.ratio, rat(342, 153));
        assert!(r.passed());
        assert!((r.bound_b_low - 160.68).abs() < 0.01);
        let ps = theorem_parameters(2, 2, 1, &rat_int(1), &rat_int(0)).unwrap();
        let r = verify_lemma_new(&ps, None).unwrap();
        assert!(r.b_check.passed());
        assert!((r.bound_b_low - 17690.0).abs() < 10.0);
        assert!(matches!(verify_lemma_new(&ps, Some(&rat_int(0))), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(b_lower_bound(1, 2, &8.into()).unwrap(), rat_int(12));
        assert_eq!(b_lower_bound(1, 1, &18.into()).unwrap(), rat_int(153));
        assert_eq!(b_lower_bound(2, 1, &4.into()).unwrap(), rat_int(4));
        assert!(b_lower_bound(2, 1, &2.into()).is_err());
    }

    #[test]
    fn e_enclosure_is_tight() {
        let (lo, hi) = e_bounds();
        assert!(rat_to_f64(&(&hi - &lo)) < 1e-12);
        assert!(rat_to_f64(&lo) <= std::f64::consts::E && std::f64::consts::E <= rat_to_f64(&hi) + 1e-15);
    }

    #[test]
    fn binomial_estimate_grid() {
        for n in 1..=8u32 {
            let top = Rational::new(BigInt::one(), BigInt::from((n + 1) * (n + 1)));
            for j in 0..=20 {
                let x = &top * rat(j, 20);
                assert!(binomial_estimate_holds(n, &x), "n={n}, x={x}");
            }
        }
    }
}
