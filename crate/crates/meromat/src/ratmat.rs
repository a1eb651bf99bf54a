//! Square rational matrix functions in the canonical form `L(z) / q(z)`.
//!
//! `q` is the monic least common multiple of the reduced entry
//! denominators and `L` is a polynomial matrix.  By construction no
//! nonconstant polynomial divides `q` together with every entry of `L`,
//! so the pair is unique and equality is structural.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::scalar::{GaussRat, C64};

pub type MatPoly = Mat<Poly>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatFun {
    num: MatPoly,
    den: Poly,
}

impl RatMatFun {
    /// Canonicalizes a square grid of reduced rational functions.
    pub fn from_entries(entries: Mat<RatFun>) -> Result<Self> {
        let n = entries.require_square()?;
        let mut den = Poly::one();
        for e in entries.entries() {
            den = den.lcm(e.den())?;
        }
        let mut num = MatPoly::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = &entries[(i, j)];
                num[(i, j)] = e.num().clone() * den.div_exact(e.den());
            }
        }
        debug_assert!({
            let mut g = den.clone();
            for e in num.entries() {
                if !e.is_zero() {
                    g = g.gcd(e).expect("den is nonzero");
                }
            }
            g.is_constant()
        });
        Ok(RatMatFun { num, den })
    }

    /// Parses a grid of entry expressions.
    pub fn from_exprs(grid: &[&[&str]]) -> Result<Self> {
        let mut rows = Vec::with_capacity(grid.len());
        for row in grid {
            let mut out = Vec::with_capacity(row.len());
            for s in *row {
                out.push(RatFun::parse(s)?);
            }
            rows.push(out);
        }
        Self::from_entries(Mat::from_rows(rows)?)
    }

    /// A polynomial matrix viewed as a rational function (`q = 1`).
    pub fn from_mat_poly(num: MatPoly) -> Result<Self> {
        num.require_square()?;
        Ok(RatMatFun { num, den: Poly::one() })
    }

    pub fn identity(n: usize) -> Self {
        RatMatFun { num: Mat::identity(n), den: Poly::one() }
    }

    pub fn size(&self) -> usize {
        self.num.rows()
    }

    /// The polynomial numerator matrix `L`.
    pub fn num(&self) -> &MatPoly {
        &self.num
    }

    /// The shared monic denominator `q`.
    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Entry `(i, j)` as a reduced rational function.
    pub fn entry(&self, i: usize, j: usize) -> RatFun {
        RatFun::new(self.num[(i, j)].clone(), self.den.clone())
            .expect("shared denominator is nonzero")
    }

    pub fn entries(&self) -> Mat<RatFun> {
        let n = self.size();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            rows.push((0..n).map(|j| self.entry(i, j)).collect());
        }
        Mat::from_rows(rows).expect("square by construction")
    }

    pub fn determinant(&self) -> Result<RatFun> {
        let det_num = self.num.determinant()?;
        RatFun::new(det_num, self.den.pow(self.size()))
    }

    /// Exact inverse via the adjugate; the product with the input is
    /// verified to be the identity before returning.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.size();
        let det = self.num.determinant()?;
        if det.is_zero() {
            return Err(Error::SingularFunction);
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                // adj(L)_{ij} = (-1)^{i+j} * minor_{ji}
                let mut minor = MatPoly::zero(n - 1, n - 1);
                for (ii, oi) in (0..n).filter(|&r| r != j).enumerate() {
                    for (jj, oj) in (0..n).filter(|&c| c != i).enumerate() {
                        minor[(ii, jj)] = self.num[(oi, oj)].clone();
                    }
                }
                let mut cof = if n == 1 { Poly::one() } else { minor.determinant()? };
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                row.push(RatFun::new(cof * self.den.clone(), det.clone())?);
            }
            rows.push(row);
        }
        let inv = Self::from_entries(Mat::from_rows(rows)?)?;
        let product = self.mul(&inv)?;
        if !product.is_identity() {
            return Err(Error::VerificationFailed(
                "inverse times input is not the identity".into(),
            ));
        }
        Ok(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.den.is_constant() && *self == Self::identity(self.size())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let n = self.size();
        if n != rhs.size() {
            return Err(Error::NonSquare { rows: n, cols: rhs.size() });
        }
        let prod = self.num.clone() * rhs.num.clone();
        let den = self.den.clone() * rhs.den.clone();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(RatFun::new(prod[(i, j)].clone(), den.clone())?);
            }
            rows.push(row);
        }
        Self::from_entries(Mat::from_rows(rows)?)
    }

    pub fn neg(&self) -> Self {
        RatMatFun { num: self.num.map(|p| -p.clone()), den: self.den.clone() }
    }

    /// Entrywise derivative, recanonicalized.
    pub fn derivative(&self) -> Self {
        let grid = self.entries().map(|e| e.derivative());
        Self::from_entries(grid).expect("derivative keeps denominators nonzero")
    }

    /// Substitutes `z -> 1/z` in every entry.
    pub fn invert_variable(&self) -> Self {
        let grid = self.entries().map(|e| e.invert_variable());
        Self::from_entries(grid).expect("substitution keeps denominators nonzero")
    }

    /// Exact evaluation; fails when the point is a pole of any entry.
    pub fn eval_exact(&self, z: &GaussRat) -> Result<Mat<GaussRat>> {
        let n = self.size();
        let mut out = Mat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.entry(i, j).eval_exact(z)?;
            }
        }
        Ok(out)
    }

    /// Numeric evaluation with a pole guard on each reduced entry.
    pub fn eval_c64(&self, z: C64) -> Result<Mat<C64>> {
        let n = self.size();
        let mut out = Mat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.entry(i, j).eval_c64(z)?;
            }
        }
        Ok(out)
    }

    /// Whether the function equals its transpose with conjugated
    /// coefficients, the symmetry class of the realization theory.
    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        for i in 0..n {
            for j in 0..=i {
                if self.entry(i, j) != self.entry(j, i).conj_coeffs() {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entrywise pole order at `alpha` (zero when holomorphic
    /// there).  For the matrix function this equals the largest partial
    /// pole multiplicity.
    pub fn pole_order_at(&self, alpha: &GaussRat) -> usize {
        self.entries()
            .entries()
            .filter_map(|e| e.valuation_at(alpha))
            .map(|v| if v < 0 { (-v) as usize } else { 0 })
            .max()
            .unwrap_or(0)
    }

    /// Largest entrywise pole order at infinity: `max(deg num - deg den)`
    /// over entries, clamped at zero.
    pub fn pole_order_at_infinity(&self) -> usize {
        self.entries()
            .entries()
            .filter_map(|e| {
                let dn = e.num().degree()? as i64;
                let dd = e.den().degree().expect("reduced denominator") as i64;
                Some(if dn > dd { (dn - dd) as usize } else { 0 })
            })
            .max()
            .unwrap_or(0)
    }

    /// String grid of the canonical entry forms.
    pub fn entry_strings(&self) -> Vec<Vec<String>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j).to_string()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q_sym_quartic() -> RatMatFun {
        RatMatFun::from_exprs(&[
            &["(z^2+4*z+5)/z^2", "-5/z^2"],
            &["-5/z^2", "25/(4*z^2)*(z^2+1)"],
        ])
        .unwrap()
    }

    fn q_mixed_3x3() -> RatMatFun {
        RatMatFun::from_exprs(&[
            &["0", "1", "0"],
            &["1/z", "0", "1"],
            &["0", "0", "z^2-z"],
        ])
        .unwrap()
    }

    #[test]
    fn canonical_denominator_is_entry_lcm() {
        let q = q_sym_quartic();
        assert_eq!(q.den(), &Poly::parse("z^2").unwrap());
        assert_eq!(q.num()[(0, 0)], Poly::parse("z^2+4*z+5").unwrap());
        assert_eq!(q.num()[(1, 1)], Poly::parse("25/4*z^2+25/4").unwrap());
        // mixed: lcm(z, 1) = z
        let m = q_mixed_3x3();
        assert_eq!(m.den(), &Poly::parse("z").unwrap());
        assert_eq!(m.num()[(2, 2)], Poly::parse("z^3-z^2").unwrap());
    }

    #[test]
    fn entries_round_trip() {
        let q = q_sym_quartic();
        let again = RatMatFun::from_entries(q.entries()).unwrap();
        assert_eq!(q, again);
    }

    #[test]
    fn determinant_exact() {
        // det of the 3x3 sample is 1 - z
        let det = q_mixed_3x3().determinant().unwrap();
        assert_eq!(det, RatFun::parse("1-z").unwrap());
        // det of the symmetric sample is 25/4 (z+1)^4 / z^4
        let det = q_sym_quartic().determinant().unwrap();
        assert_eq!(det, RatFun::parse("25/4*(z+1)^4/z^4").unwrap());
    }

    #[test]
    fn inverse_matches_hand_computation() {
        let q = q_mixed_3x3();
        let inv = q.inverse().unwrap();
        let expect = RatMatFun::from_exprs(&[
            &["0", "z", "-1/(z-1)"],
            &["1", "0", "0"],
            &["0", "0", "1/(z^2-z)"],
        ])
        .unwrap();
        assert_eq!(inv, expect);
        assert!(q.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn singular_input_rejected() {
        let s = RatMatFun::from_exprs(&[&["1", "1"], &["1", "1"]]).unwrap();
        assert!(matches!(s.inverse(), Err(Error::SingularFunction)));
        assert!(s.determinant().unwrap().is_zero());
    }

    #[test]
    fn derivative_entrywise() {
        let q = RatMatFun::from_exprs(&[&["1/z"]]).unwrap();
        let expect = RatMatFun::from_exprs(&[&["-1/z^2"]]).unwrap();
        assert_eq!(q.derivative(), expect);
        // derivative commutes with variable inversion up to the chain rule:
        // d/dz [Q(1/z)] = -z^{-2} Q'(1/z)
        let q = q_sym_quartic();
        let lhs = q.invert_variable().derivative();
        let chain = RatMatFun::from_exprs(&[&["-1/z^2", "0"], &["0", "-1/z^2"]]).unwrap();
        let rhs = q.derivative().invert_variable().mul(&chain).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn invert_variable_involution() {
        for q in [q_sym_quartic(), q_mixed_3x3()] {
            assert_eq!(q.invert_variable().invert_variable(), q);
        }
        let z = RatMatFun::from_exprs(&[&["z"]]).unwrap();
        assert_eq!(z.invert_variable(), RatMatFun::from_exprs(&[&["1/z"]]).unwrap());
    }

    #[test]
    fn eval_and_pole_guards() {
        let q = q_mixed_3x3();
        let at2 = q.eval_exact(&GaussRat::from_int(2)).unwrap();
        assert_eq!(at2[(1, 0)], GaussRat::from_frac(1, 2));
        assert!(matches!(q.eval_exact(&GaussRat::zero()), Err(Error::EvalAtPole)));
        assert!(q.eval_c64(C64::new(0.0, 0.0)).is_err());
        // the (2,2) entry has no pole at 0, but entry (1,0) does
        let near_pole = q.eval_c64(C64::new(1e-14, 0.0));
        assert!(near_pole.is_err());
    }

    #[test]
    fn symmetry_detection() {
        assert!(q_sym_quartic().is_symmetric());
        assert!(!q_mixed_3x3().is_symmetric());
        // symmetric needs conjugated coefficients: [[0, i],[i, 0]] is not
        let s = RatMatFun::from_exprs(&[&["0", "i"], &["i", "0"]]).unwrap();
        assert!(!s.is_symmetric());
        let h = RatMatFun::from_exprs(&[&["0", "i"], &["-i", "0"]]).unwrap();
        assert!(h.is_symmetric());
    }

    #[test]
    fn pole_orders() {
        let q = q_sym_quartic();
        assert_eq!(q.pole_order_at(&GaussRat::zero()), 2);
        assert_eq!(q.pole_order_at(&GaussRat::from_int(1)), 0);
        assert_eq!(q.pole_order_at_infinity(), 0);
        let l = RatMatFun::from_exprs(&[&["0", "z", "0"], &["z", "z^2", "0"], &["0", "0", "z"]])
            .unwrap();
        assert_eq!(l.pole_order_at_infinity(), 2);
    }
}
