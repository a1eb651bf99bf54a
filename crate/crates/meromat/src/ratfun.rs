//! Scalar rational functions over the Gaussian rationals, kept reduced.
//!
//! Invariants: numerator and denominator are coprime, the denominator is
//! monic, and the zero function is `0/1`.  Construction through
//! [`RatFun::new`] enforces all three, so equality of values is
//! structural equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{GaussRat, C64};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Reduces `num/den` to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFun { num, den: Poly::one() });
        }
        let g = num.gcd(&den)?;
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        let lead_inv = den.leading().unwrap().inv()?;
        den = den.scale(&lead_inv);
        num = num.scale(&lead_inv);
        Ok(RatFun { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn var() -> Self {
        Self::from_poly(Poly::var())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn is_constant(&self) -> bool {
        self.is_polynomial() && self.num.is_constant()
    }

    pub fn into_poly(self) -> Result<Poly> {
        if self.is_polynomial() {
            Ok(self.num)
        } else {
            Err(Error::BadInput(format!("'{self}' is not a polynomial")))
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = RatFun::one();
        for _ in 0..k.unsigned_abs() {
            out = out * base.clone();
        }
        Ok(out)
    }

    pub fn derivative(&self) -> Self {
        let num = self.num.derivative() * self.den.clone()
            - self.num.clone() * self.den.derivative();
        let den = self.den.clone() * self.den.clone();
        RatFun::new(num, den).expect("denominator square is nonzero")
    }

    /// Coefficient-wise complex conjugation of numerator and denominator.
    /// Monicity and coprimality survive, so no renormalization is needed.
    pub fn conj_coeffs(&self) -> Self {
        RatFun {
            num: self.num.map(|c| c.conj()),
            den: self.den.map(|c| c.conj()),
        }
    }

    pub fn eval_exact(&self, z: &GaussRat) -> Result<GaussRat> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::EvalAtPole);
        }
        Ok(self.num.eval(z) * d.inv()?)
    }

    pub fn eval_c64(&self, z: C64) -> Result<C64> {
        let d = self.den.to_cpoly().eval(&z);
        if d.norm() <= 1e-12 {
            return Err(Error::EvalAtPole);
        }
        Ok(self.num.to_cpoly().eval(&z) / d)
    }

    /// Order of vanishing at `alpha`: positive for zeros, negative for
    /// poles, `None` for the zero function.  Exact because the reduced
    /// numerator and denominator share no root.
    pub fn valuation_at(&self, alpha: &GaussRat) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let up = self.num.multiplicity_at(alpha) as i64;
        let down = self.den.multiplicity_at(alpha) as i64;
        Some(up - down)
    }

    /// Substitutes `z -> 1/z`.  An involution on reduced functions.
    pub fn invert_variable(&self) -> Self {
        if self.is_zero() {
            return RatFun::zero();
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let rn = self.num.reverse();
        let rd = self.den.reverse();
        let (num, den) = if dd >= dn {
            (rn.shift_up(dd - dn), rd)
        } else {
            (rn, rd.shift_up(dn - dd))
        };
        RatFun::new(num, den).expect("reversal of a nonzero polynomial is nonzero")
    }

    /// Value of `self / (z - beta)^order` at `beta`, when the valuation
    /// admits a finite limit there.
    pub fn limit_after_dividing(&self, beta: &GaussRat, order: i64) -> Result<GaussRat> {
        let val = self.valuation_at(beta).unwrap_or(i64::MAX);
        if val < order {
            return Err(Error::LimitUndefined { valuation: val, order });
        }
        if val > order {
            return Ok(GaussRat::zero());
        }
        let lin = Poly::new(vec![-beta.clone(), GaussRat::one()]);
        let shifted = if order >= 0 {
            RatFun::new(self.num.clone(), self.den.clone() * lin.pow(order as usize))?
        } else {
            RatFun::new(self.num.clone() * lin.pow((-order) as usize), self.den.clone())?
        };
        shifted.eval_exact(beta)
    }

    /// Parses the entry-expression grammar.
    pub fn parse(s: &str) -> Result<Self> {
        crate::parser::parse_entry(s).map(|e| e.value)
    }
}

impl Add for RatFun {
    type Output = RatFun;
    fn add(self, rhs: RatFun) -> RatFun {
        let num = self.num.clone() * rhs.den.clone() + rhs.num.clone() * self.den.clone();
        let den = self.den * rhs.den;
        RatFun::new(num, den).expect("product of nonzero denominators is nonzero")
    }
}

impl Sub for RatFun {
    type Output = RatFun;
    fn sub(self, rhs: RatFun) -> RatFun {
        self + (-rhs)
    }
}

impl Mul for RatFun {
    type Output = RatFun;
    fn mul(self, rhs: RatFun) -> RatFun {
        let num = self.num * rhs.num;
        let den = self.den * rhs.den;
        RatFun::new(num, den).expect("product of nonzero denominators is nonzero")
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -self.num, den: self.den }
    }
}

impl num_traits::Zero for RatFun {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
}

impl num_traits::One for RatFun {
    fn one() -> Self {
        RatFun::one()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Serialize for RatFun {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatFun {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RatFun::parse(&s).map_err(de::Error::custom)
    }
}
