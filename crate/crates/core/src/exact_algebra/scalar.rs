//! Exact scalars: rationals and Gaussian rationals, plus the small field
//! abstraction the univariate polynomial code is generic over.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale both down by a common power of two.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// `"p/q"` or `"p"` when the denominator is one.
pub fn rat_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, an integer, or an exact decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut n = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Rational::new(n, d));
    }
    let n = BigInt::from_str(s).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// A field of characteristic zero with a numeric embedding into C.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: Rational) -> Self;
    fn to_complex(&self) -> Complex64;
    fn render(&self) -> String;
}

impl Field for Rational {
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn render(&self) -> String {
        rat_string(self)
    }
}

/// `re + im·i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRational { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"` with `a`, `b` rational strings.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRational::real(parse_rational(&t)?));
        };
        // Split at the last sign that is not leading.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_str, im_str) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let re = if re_str.is_empty() { Rational::zero() } else { parse_rational(re_str)? };
        let im = match im_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(GaussRational { re, im })
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", rat_string(&self.re));
        }
        let im_abs = rat_string(&self.im.abs());
        let sign = if self.im.is_negative() { "-" } else { "+" };
        if self.re.is_zero() {
            let lead = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{lead}{im_abs}i")
        } else {
            write!(f, "{}{sign}{im_abs}i", rat_string(&self.re))
        }
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational { re: Rational::one(), im: Rational::zero() }
    }
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        GaussRational { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        GaussRational { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussRational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let n = o.norm_sqr();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        let num = self * o.conj();
        GaussRational { re: num.re / &n, im: num.im / n }
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussRational { re: -self.re, im: -self.im }
    }
}

impl Field for GaussRational {
    fn from_rational(q: Rational) -> Self {
        GaussRational::real(q)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn parses_gaussian_strings() {
        let g = GaussRational::parse("1/2+3/4i").unwrap();
        assert_eq!(g, GaussRational::new(rat(1, 2), rat(3, 4)));
        assert_eq!(GaussRational::parse("-i").unwrap(), GaussRational::new(rat_int(0), rat_int(-1)));
        assert_eq!(GaussRational::parse("2-i").unwrap(), GaussRational::new(rat_int(2), rat_int(-1)));
        assert_eq!(GaussRational::parse("-3").unwrap(), GaussRational::real(rat_int(-3)));
        assert_eq!(GaussRational::parse("5i").unwrap(), GaussRational::new(rat_int(0), rat_int(5)));
        for s in ["1/2+3/4i", "-i", "2-i", "-3", "5i", "-1/3-2/7i"] {
            let g = GaussRational::parse(s).unwrap();
            assert_eq!(GaussRational::parse(&g.to_string()).unwrap(), g);
        }
    }

    #[test]
    fn gaussian_division_inverts_multiplication() {
        let a = GaussRational::new(rat(1, 3), rat(-2, 5));
        let b = GaussRational::new(rat(7, 2), rat(1, 1));
        assert_eq!((a.clone() * b.clone()) / b, a);
    }

    #[test]
    fn huge_rationals_convert_to_floats() {
        let big = Rational::new(num_traits::pow(BigInt::from(10), 400) * 3, num_traits::pow(BigInt::from(10), 400));
        assert!((rat_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
