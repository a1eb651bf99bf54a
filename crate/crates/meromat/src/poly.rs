//! Dense univariate polynomials.
//!
//! `DensePoly<T>` is generic over the coefficient ring; the exact field
//! algorithms (division, gcd, square-free decomposition) live on the
//! Gaussian-rational instantiation `Poly`.  Coefficients are stored
//! lowest degree first with no trailing zeros, so the zero polynomial is
//! the empty vector and structural equality is semantic equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{nat_mul, ExactDiv, GaussRat, Scalar, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DensePoly<T> {
    coeffs: Vec<T>,
}

/// Exact polynomial over the Gaussian rationals.
pub type Poly = DensePoly<GaussRat>;

/// Numeric polynomial over complex doubles, used for root polishing and
/// contour evaluation.
pub type CPoly = DensePoly<C64>;

impl<T: Scalar> DensePoly<T> {
    /// Builds from low-to-high coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn zero() -> Self {
        DensePoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        DensePoly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        DensePoly { coeffs }
    }

    /// The variable `z`.
    pub fn var() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial (degree minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(nat_mul(c, k));
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        DensePoly { coeffs }
    }

    /// Coefficient reversal: `z^deg * p(1/z)`.
    pub fn reverse(&self) -> Self {
        let mut coeffs: Vec<T> = self.coeffs.iter().rev().cloned().collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out * self.clone();
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DensePoly<U> {
        DensePoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Scalar> Add for DensePoly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Self::new(out)
    }
}

impl<T: Scalar> Sub for DensePoly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for DensePoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        DensePoly { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Scalar> Mul for DensePoly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<T: Scalar> Zero for DensePoly<T> {
    fn zero() -> Self {
        DensePoly::zero()
    }
    fn is_zero(&self) -> bool {
        DensePoly::is_zero(self)
    }
}

impl<T: Scalar> One for DensePoly<T> {
    fn one() -> Self {
        DensePoly::one()
    }
}

// ---------------------------------------------------------------------
// Exact field algorithms over the Gaussian rationals.
// ---------------------------------------------------------------------

impl Poly {
    /// `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let dd = d.degree().unwrap();
        let lead_inv = d.leading().unwrap().inv()?;
        let mut rem = self.clone();
        let mut quot = vec![GaussRat::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap().clone() * lead_inv.clone();
            let k = rd - dd;
            quot[k] = factor.clone();
            rem = rem - d.scale(&factor).shift_up(k);
        }
        Ok((Poly::new(quot), rem))
    }

    /// Division that must be exact; panics on a nonzero remainder, which
    /// would mean a broken internal invariant in the caller.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d).expect("exact division by zero polynomial");
        assert!(r.is_zero(), "division was not exact");
        q
    }

    /// Leading coefficient scaled to one.
    pub fn monic(&self) -> Result<Poly> {
        let lead = self.leading().ok_or(Error::ZeroPolynomial)?;
        Ok(self.scale(&lead.inv()?))
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Monic greatest common divisor.  `gcd(p, 0) = monic(p)`; both zero
    /// is an error.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            // Renormalizing each remainder keeps the bignum coefficients small.
            b = if r.is_zero() { r } else { r.monic()? };
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Poly) -> Result<Poly> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let g = self.gcd(other)?;
        (self.clone() * other.clone()).div_exact(&g).monic()
    }

    /// Multiplicity of `alpha` as a root (zero when not a root).
    pub fn multiplicity_at(&self, alpha: &GaussRat) -> usize {
        if self.is_zero() {
            return 0;
        }
        let lin = Poly::new(vec![-alpha.clone(), GaussRat::one()]);
        let mut m = 0;
        let mut p = self.clone();
        loop {
            let (q, r) = p.divrem(&lin).expect("linear divisor is nonzero");
            if !r.is_zero() {
                return m;
            }
            m += 1;
            if q.is_zero() {
                return m;
            }
            p = q;
        }
    }

    /// First `len` coefficients of the expansion in powers of `z - alpha`.
    pub fn taylor_at(&self, alpha: &GaussRat, len: usize) -> Vec<GaussRat> {
        let lin = Poly::new(vec![-alpha.clone(), GaussRat::one()]);
        let mut out = Vec::with_capacity(len);
        let mut p = self.clone();
        for _ in 0..len {
            if p.is_zero() {
                out.push(GaussRat::zero());
                continue;
            }
            let (q, r) = p.divrem(&lin).expect("linear divisor is nonzero");
            out.push(if r.is_zero() { GaussRat::zero() } else { r.coeff(0) });
            p = q;
        }
        out
    }

    /// Square-free decomposition (Yun): returns the leading unit and the
    /// monic pairwise-coprime factors with their multiplicities, so that
    /// `self = unit * prod f_k^{m_k}`.
    pub fn squarefree(&self) -> Result<(GaussRat, Vec<(Poly, usize)>)> {
        let unit = self.leading().ok_or(Error::ZeroPolynomial)?.clone();
        let p = self.monic()?;
        if p.is_constant() {
            return Ok((unit, Vec::new()));
        }
        let dp = p.derivative();
        let g = p.gcd(&dp)?;
        let mut factors = Vec::new();
        if g.is_constant() {
            factors.push((p, 1));
            return Ok((unit, factors));
        }
        let mut b = p.div_exact(&g);
        let mut d = dp.div_exact(&g) - b.derivative();
        let mut mult = 1;
        while !b.is_constant() {
            let a = b.gcd(&d)?;
            if !a.is_constant() {
                factors.push((a.clone(), mult));
            }
            b = b.div_exact(&a);
            d = d.div_exact(&a) - b.derivative();
            mult += 1;
        }
        Ok((unit, factors))
    }

    /// `prod (z - r)` over the given roots.
    pub fn from_roots(roots: &[GaussRat]) -> Poly {
        let mut p = Poly::one();
        for r in roots {
            p = p * Poly::new(vec![-r.clone(), GaussRat::one()]);
        }
        p
    }

    pub fn to_cpoly(&self) -> CPoly {
        self.map(|c| c.to_c64())
    }

    /// Parses the canonical display form (delegates to the expression
    /// grammar and insists the result is a polynomial).
    pub fn parse(s: &str) -> Result<Poly> {
        let f = crate::ratfun::RatFun::parse(s)?;
        f.into_poly()
    }
}

impl ExactDiv for Poly {
    fn exact_div(&self, rhs: &Self) -> Self {
        self.div_exact(rhs)
    }
}

/// Canonical display: highest degree first, explicit `*` and `^`, complex
/// coefficients parenthesized.  Re-parses to an equal polynomial.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            // sign and magnitude of the printed term
            let (neg, mag) = if c.is_real() {
                (c.re.is_negative(), GaussRat::from_rat(c.re.abs()))
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = if mag.is_real() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            match (k, coeff_str.as_str()) {
                (0, _) => write!(f, "{coeff_str}")?,
                (1, "1") => write!(f, "z")?,
                (1, _) => write!(f, "{coeff_str}*z")?,
                (_, "1") => write!(f, "z^{k}")?,
                (_, _) => write!(f, "{coeff_str}*z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Poly::parse(&s).map_err(de::Error::custom)
    }
}
