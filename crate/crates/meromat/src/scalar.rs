//! Exact coefficient field: arbitrary-precision rationals and Gaussian
//! rationals (elements of Q(i)).
//!
//! `Rat` is a reduced big-integer fraction with positive denominator;
//! `GaussRat` is `re + im*i` over `Rat` and is the coefficient field for
//! every exact computation in the crate.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always reduced with a positive denominator.
pub type Rat = num_rational::BigRational;

/// Complex double used on every numeric path (contour quadrature,
/// polynomial root polishing, residual norms).
pub type C64 = Complex64;

/// Minimal ring bound shared by the generic polynomial and matrix
/// containers.  Satisfied by `GaussRat`, `Rat`, and `Complex64`.
pub trait Scalar:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// Division that is exact in the coefficient domain.  For fields this is
/// ordinary division; for polynomials it asserts a zero remainder.  Used
/// by the fraction-free determinant.
pub trait ExactDiv: Sized {
    fn exact_div(&self, rhs: &Self) -> Self;
}

impl ExactDiv for Complex64 {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// `c * k` for a natural number `k`, computed by doubling so the scalar
/// only needs ring operations.
pub fn nat_mul<T: Scalar>(c: &T, k: usize) -> T {
    if k == 0 {
        return T::zero();
    }
    let half = nat_mul(&(c.clone() + c.clone()), k / 2);
    if k % 2 == 1 {
        half + c.clone()
    } else {
        half
    }
}

/// Gaussian rational `re + im*i`, the exact coefficient field.
///
/// Ordering is lexicographic on `(re, im)`; it has no analytic meaning
/// and exists only to make reports and pivot choices deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat { re: Rat::from_integer(BigInt::from(n)), im: Rat::zero() }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    /// `p/q` as a real Gaussian rational.  Panics when `q == 0`.
    pub fn from_frac(p: i64, q: i64) -> Self {
        GaussRat::from_rat(Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|^2 = re^2 + im^2`, exact and rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(GaussRat { re: &self.re / &n, im: -&self.im / &n })
    }

    /// Integer power, negative exponents via exact inversion.
    pub fn powi(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = GaussRat::one();
        for _ in 0..k.unsigned_abs() {
            out = out * base.clone();
        }
        Ok(out)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// Best-effort conversion to `f64`; falls back to a quotient of rounded
/// bignums when the direct conversion overflows.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: GaussRat) -> GaussRat {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * inv
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }
}

impl ExactDiv for GaussRat {
    fn exact_div(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }
}

/// Canonical form: `0`, `p/q`, `i`, `-3/2*i`, `1/2+3*i`, `2-i`.
/// Round-trips through `FromStr` and through the entry-expression parser.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut wrote_re = false;
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            wrote_re = true;
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let sign = if self.im.is_negative() { "-" } else if wrote_re { "+" } else { "" };
            if mag.is_one() {
                write!(f, "{sign}i")?;
            } else {
                write!(f, "{sign}{mag}*i")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GaussRat {
    type Err = Error;

    /// Parses the canonical `Display` forms (and harmless variations such
    /// as surrounding whitespace).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::BadInput("empty rational literal".into()));
        }
        // Split into at most two signed terms at the top level.
        let bytes = s.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
                split = Some(k);
            }
        }
        let parse_term = |t: &str| -> Result<(Rat, bool)> {
            // Returns (magnitude-with-sign, is_imaginary).
            let t = t.trim();
            if t == "i" {
                return Ok((Rat::one(), true));
            }
            if t == "-i" {
                return Ok((-Rat::one(), true));
            }
            if let Some(core) = t.strip_suffix("*i").or_else(|| t.strip_suffix("i")) {
                let r = Rat::from_str(core.trim())
                    .map_err(|e| Error::BadInput(format!("bad rational '{core}': {e}")))?;
                return Ok((r, true));
            }
            let r = Rat::from_str(t)
                .map_err(|e| Error::BadInput(format!("bad rational '{t}': {e}")))?;
            Ok((r, false))
        };
        let terms: Vec<&str> = match split {
            Some(k) => vec![&s[..k], &s[k..]],
            None => vec![s],
        };
        let mut out = GaussRat::zero();
        for term in terms {
            // A '+' prefix is not accepted by BigRational's parser.
            let term = term.trim().strip_prefix('+').unwrap_or(term.trim());
            let (val, imag) = parse_term(term)?;
            if imag {
                if !out.im.is_zero() {
                    return Err(Error::BadInput(format!("two imaginary terms in '{s}'")));
                }
                out.im = val;
            } else {
                if !out.re.is_zero() {
                    return Err(Error::BadInput(format!("two real terms in '{s}'")));
                }
                out.re = val;
            }
        }
        Ok(out)
    }
}

impl Serialize for GaussRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussRat {
        GaussRat::new(
            Rat::new(BigInt::from(re.0), BigInt::from(re.1)),
            Rat::new(BigInt::from(im.0), BigInt::from(im.1)),
        )
    }

    #[test]
    fn field_axioms_spotcheck() {
        let a = g((1, 2), (3, 4));
        let b = g((-2, 1), (1, 3));
        let prod = a.clone() * b.clone();
        // (a*b)/b == a
        assert_eq!(prod / b.clone(), a);
        // i^2 == -1
        assert_eq!(GaussRat::i() * GaussRat::i(), -GaussRat::one());
        // norm is multiplicative
        let ab = a.clone() * b.clone();
        assert_eq!(ab.norm_sqr(), a.norm_sqr() * b.norm_sqr());
    }

    #[test]
    fn inversion_of_zero_fails() {
        assert!(GaussRat::zero().inv().is_err());
    }

    #[test]
    fn powi_negative_exponent() {
        let a = g((2, 1), (1, 1)); // 2 + i
        let inv = a.powi(-1).unwrap();
        assert_eq!(a.clone() * inv, GaussRat::one());
        assert_eq!(a.powi(0).unwrap(), GaussRat::one());
        assert_eq!(a.powi(3).unwrap(), a.clone() * a.clone() * a.clone());
    }

    #[test]
    fn display_roundtrip() {
        let cases = [
            GaussRat::zero(),
            GaussRat::one(),
            -GaussRat::one(),
            GaussRat::i(),
            -GaussRat::i(),
            g((1, 2), (0, 1)),
            g((0, 1), (-3, 2)),
            g((-7, 3), (5, 4)),
            g((2, 1), (-1, 1)),
        ];
        for c in cases {
            let s = c.to_string();
            let back: GaussRat = s.parse().unwrap();
            assert_eq!(back, c, "round trip failed for '{s}'");
        }
    }

    #[test]
    fn display_forms_are_canonical() {
        assert_eq!(g((1, 2), (3, 4)).to_string(), "1/2+3/4*i");
        assert_eq!(g((0, 1), (-1, 1)).to_string(), "-i");
        assert_eq!(g((2, 1), (-1, 2)).to_string(), "2-1/2*i");
        assert_eq!(GaussRat::zero().to_string(), "0");
    }

    #[test]
    fn nat_mul_matches_repeated_addition() {
        let c = g((3, 7), (-1, 5));
        let mut acc = GaussRat::zero();
        for k in 0..20usize {
            assert_eq!(nat_mul(&c, k), acc);
            acc = acc + c.clone();
        }
    }
}
