//! Root extraction with exact multiplicities.
//!
//! The multiplicity structure is always exact: it comes from square-free
//! decomposition, never from clustering numeric approximations.  Root
//! locations inside each square-free factor are found exactly when they
//! are Gaussian rationals (rational-root trial over Gaussian-integer
//! divisors) and numerically (simultaneous Newton iteration) otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{CPoly, Poly};
use crate::scalar::{GaussRat, Rat, C64};

/// Roots of a polynomial: exact Gaussian-rational locations and numeric
/// leftovers, each with its exact multiplicity.  Numeric roots carry the
/// achieved residual `|p(root)|`.
#[derive(Debug, Clone, Default)]
pub struct RootSet {
    pub exact: Vec<(GaussRat, usize)>,
    pub numeric: Vec<(C64, usize, f64)>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.exact.iter().map(|(_, m)| m).sum::<usize>()
            + self.numeric.iter().map(|(_, m, _)| m).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.numeric.is_empty()
    }

    /// Multiplicity of an exact location (zero when absent).
    pub fn exact_multiplicity(&self, alpha: &GaussRat) -> usize {
        self.exact.iter().find(|(r, _)| r == alpha).map(|(_, m)| *m).unwrap_or(0)
    }

    /// Multiplicity of the numeric root nearest `z`, if within `tol`.
    pub fn numeric_multiplicity_near(&self, z: C64, tol: f64) -> usize {
        self.numeric
            .iter()
            .filter(|(r, _, _)| (r - z).norm() <= tol)
            .map(|(_, m, _)| *m)
            .sum()
    }
}

/// All roots of `p` with exact multiplicities.  The sum of multiplicities
/// equals the degree; a nonzero constant has no roots; the zero
/// polynomial is rejected.
pub fn roots_with_multiplicity(p: &Poly) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (_, factors) = p.squarefree()?;
    let mut out = RootSet::default();
    for (factor, mult) in factors {
        let mut f = factor;
        if f.coeff(0).is_zero() {
            // square-free, so exactly one factor of z
            f = f.div_exact(&Poly::var());
            out.exact.push((GaussRat::zero(), mult));
        }
        if f.is_constant() {
            continue;
        }
        let exact = exact_roots_squarefree(&f);
        let mut leftover = f.clone();
        for r in &exact {
            leftover = leftover.div_exact(&Poly::new(vec![-r.clone(), GaussRat::one()]));
            out.exact.push((r.clone(), mult));
        }
        if !leftover.is_constant() {
            let abs_coeffs: Vec<f64> =
                leftover.coeffs().iter().map(|c| c.to_c64().norm()).collect();
            for (z, residual) in aberth(&leftover.to_cpoly()) {
                // Backward-error acceptance: |p(z)| measured against the
                // magnitude the evaluation itself carries at |z|, so
                // roots far outside the unit disk are not rejected for
                // the rounding their residual necessarily inherits.
                let r = z.norm();
                let mut scale = 0.0f64;
                let mut pow = 1.0f64;
                for a in &abs_coeffs {
                    scale += a * pow;
                    pow *= r;
                }
                let tol = 1e-10 * scale.max(1.0);
                if residual > tol {
                    return Err(Error::RootsNonConvergent { residual });
                }
                out.numeric.push((z, mult, residual));
            }
        }
    }
    out.exact.sort_by(|a, b| a.0.cmp(&b.0));
    out.numeric.sort_by(|a, b| {
        (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    debug_assert_eq!(out.total_multiplicity(), p.degree().unwrap_or(0));
    Ok(out)
}

// ---------------------------------------------------------------------
// Exact Gaussian-rational roots of a square-free polynomial.
// ---------------------------------------------------------------------

pub(crate) const MAX_FACTOR_NORM: u128 = 1_000_000_000_000;
const MAX_DIVISORS: usize = 4096;

fn exact_roots_squarefree(f: &Poly) -> Vec<GaussRat> {
    let Some(coeffs) = gaussian_integer_coeffs(f) else {
        return Vec::new();
    };
    let c0 = coeffs.first().expect("nonzero polynomial").clone();
    let cd = coeffs.last().expect("nonzero polynomial").clone();
    let (Some(num_divs), Some(den_divs)) = (divisors_up_to_units(&c0), divisors_up_to_units(&cd))
    else {
        return Vec::new();
    };
    let mut found = std::collections::BTreeSet::new();
    for v in &den_divs {
        let v_rat = v.to_gaussrat();
        let Ok(v_inv) = v_rat.inv() else { continue };
        for u in &num_divs {
            let base = u.to_gaussrat() * v_inv.clone();
            for unit in [
                GaussRat::one(),
                GaussRat::i(),
                -GaussRat::one(),
                -GaussRat::i(),
            ] {
                let cand = base.clone() * unit;
                if f.eval(&cand).is_zero() {
                    found.insert(cand);
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Clears denominators and removes the Gaussian-integer content, giving
/// coefficients in Z[i].  `None` when the polynomial is zero.
fn gaussian_integer_coeffs(f: &Poly) -> Option<Vec<GInt>> {
    if f.is_zero() {
        return None;
    }
    let mut scale = BigInt::one();
    for c in f.coeffs() {
        scale = scale.lcm(c.re.denom());
        scale = scale.lcm(c.im.denom());
    }
    let scale_rat = Rat::from_integer(scale);
    let mut out: Vec<GInt> = f
        .coeffs()
        .iter()
        .map(|c| GInt {
            re: (&c.re * &scale_rat).to_integer(),
            im: (&c.im * &scale_rat).to_integer(),
        })
        .collect();
    // remove content so the divisor lattices stay small
    let mut content = out.iter().find(|g| !g.is_zero())?.clone();
    for g in out.iter().skip_while(|g| g.is_zero()) {
        content = gint_gcd(&content, g);
        if content.norm().is_one() {
            break;
        }
    }
    if !content.norm().is_one() {
        out = out.iter().map(|g| g.div_exact(&content)).collect();
    }
    Some(out)
}

/// Gaussian integer with big components.
#[derive(Debug, Clone, PartialEq, Eq)]
struct GInt {
    re: BigInt,
    im: BigInt,
}

impl GInt {
    fn one() -> Self {
        GInt { re: BigInt::one(), im: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    fn mul(&self, rhs: &GInt) -> GInt {
        GInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn conj(&self) -> GInt {
        GInt { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Exact quotient; panics when `rhs` does not divide `self`.
    fn div_exact(&self, rhs: &GInt) -> GInt {
        self.try_div(rhs).expect("exact Gaussian division")
    }

    fn try_div(&self, rhs: &GInt) -> Option<GInt> {
        let n = rhs.norm();
        if n.is_zero() {
            return None;
        }
        let prod = self.mul(&rhs.conj());
        if (&prod.re % &n).is_zero() && (&prod.im % &n).is_zero() {
            Some(GInt { re: &prod.re / &n, im: &prod.im / &n })
        } else {
            None
        }
    }

    /// Nearest-lattice-point quotient, the Euclidean step for Z[i].
    fn div_round(&self, rhs: &GInt) -> GInt {
        let n = rhs.norm();
        let prod = self.mul(&rhs.conj());
        GInt { re: round_div(&prod.re, &n), im: round_div(&prod.im, &n) }
    }

    fn to_gaussrat(&self) -> GaussRat {
        GaussRat::new(Rat::from_integer(self.re.clone()), Rat::from_integer(self.im.clone()))
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // round(a/b) to the nearest integer, b > 0
    let two_a: BigInt = a * 2;
    let shifted = if two_a.is_negative() { two_a - b } else { two_a + b };
    shifted / (b * 2)
}

fn gint_gcd(a: &GInt, b: &GInt) -> GInt {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let q = a.div_round(&b);
        let r = GInt { re: &a.re - (&q.re * &b.re - &q.im * &b.im), im: &a.im - (&q.re * &b.im + &q.im * &b.re) };
        a = b;
        b = r;
    }
    a
}

/// All divisors of `g` in Z[i], one representative per unit class.
/// `None` when the norm is too large to factor comfortably.
fn divisors_up_to_units(g: &GInt) -> Option<Vec<GInt>> {
    let norm = g.norm();
    let norm_small: u128 = norm.to_u128()?;
    if norm_small == 0 || norm_small > MAX_FACTOR_NORM {
        return None;
    }
    let mut gaussian_primes: Vec<(GInt, usize)> = Vec::new();
    for (p, _) in factor_u128(norm_small)? {
        let candidates: Vec<GInt> = if p == 2 {
            vec![GInt { re: BigInt::one(), im: BigInt::one() }]
        } else if p % 4 == 1 {
            let (a, b) = two_squares(p)?;
            vec![
                GInt { re: BigInt::from(a), im: BigInt::from(b) },
                GInt { re: BigInt::from(a), im: -BigInt::from(b) },
            ]
        } else {
            vec![GInt { re: BigInt::from(p), im: BigInt::zero() }]
        };
        for pi in candidates {
            let mut e = 0;
            let mut rest = g.clone();
            while let Some(q) = rest.try_div(&pi) {
                e += 1;
                rest = q;
            }
            if e > 0 {
                gaussian_primes.push((pi, e));
            }
        }
    }
    let mut divisors = vec![GInt::one()];
    for (pi, e) in gaussian_primes {
        let mut next = Vec::with_capacity(divisors.len() * (e + 1));
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = acc.mul(&pi);
                next.push(acc.clone());
            }
        }
        divisors = next;
        if divisors.len() > MAX_DIVISORS {
            return None;
        }
    }
    Some(divisors)
}

pub(crate) fn factor_u128(mut n: u128) -> Option<Vec<(u128, usize)>> {
    let mut out = Vec::new();
    let mut push = |p: u128, e: usize| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut d: u128 = 3;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        push(d, e);
        d += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    Some(out)
}

/// A sum-of-two-squares representation of a prime `p = 1 mod 4` (or 2).
pub(crate) fn two_squares(p: u128) -> Option<(u128, u128)> {
    let mut a: u128 = 1;
    while a * a <= p {
        let rem = p - a * a;
        let b = (rem as f64).sqrt() as u128;
        for bb in b.saturating_sub(1)..=b + 1 {
            if bb * bb == rem {
                return Some((a, bb));
            }
        }
        a += 1;
    }
    None
}

// ---------------------------------------------------------------------
// Numeric roots of a square-free polynomial.
// ---------------------------------------------------------------------

/// Simultaneous Newton (Ehrlich-Aberth) iteration.  Returns each root
/// with its achieved residual `|p(root)|`.
fn aberth(p: &CPoly) -> Vec<(C64, f64)> {
    let d = p.degree().expect("nonzero polynomial");
    assert!(d >= 1);
    let lead = *p.leading().unwrap();
    let monic = p.map(|c| c / lead);
    let dp = monic.derivative();
    let radius = 1.0
        + monic
            .coeffs()
            .iter()
            .take(d)
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<C64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (d as f64) + 0.4;
            0.5 * radius * C64::new(theta.cos(), theta.sin())
        })
        .collect();
    for _ in 0..300 {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let pv = monic.eval(&z[k]);
            let dv = dp.eval(&z[k]);
            let newton = if dv.norm() < 1e-300 { C64::new(1e-6, 1e-6) } else { pv / dv };
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..d {
                if j != k {
                    let diff = z[k] - z[j];
                    let diff = if diff.norm() < 1e-300 { C64::new(1e-12, 1e-12) } else { diff };
                    repulsion += 1.0 / diff;
                }
            }
            let denom = 1.0 - newton * repulsion;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.into_iter().map(|r| (r, p.eval(&r).norm())).collect()
}
