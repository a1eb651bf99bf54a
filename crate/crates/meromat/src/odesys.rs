//! Nonlinear differential systems with reciprocal structure.
//!
//! The system of order `m` with constant coefficient matrices
//! `A_0, ..., A_m` asks for a vector function `u` with
//!
//! ```text
//!   sum_k  A_k * recip(u^(k))  =  0,      recip(v)_i = 1 / v_i,
//! ```
//!
//! the componentwise reciprocal of each derivative.  The substitution
//! `u_i(t) = e^{alpha t} / phi_i` turns the left side into
//! `(sum_k A_k alpha^{-k}) phi e^{-alpha t}`, so exponential solutions
//! correspond exactly to pairs `(alpha, phi)` with `Q(alpha) phi = 0`
//! for the symbol `Q(z) = sum_k A_k z^{-k}` — the zeros and root
//! functions computed by the structure machinery.  `alpha = 0` and
//! eigenvectors with a zero component are excluded: the reciprocal of a
//! vanishing derivative is undefined.
//!
//! The system is genuinely nonlinear — sums of solutions are not
//! solutions — which [`demonstrate_nonlinearity`] exhibits numerically.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::ratmat::RatMatFun;
use crate::scalar::{GaussRat, C64};
use crate::structure::{verify_order, Analyzer, CriticalPoint};

/// Components smaller than this (relative to the largest) disqualify a
/// numerically located eigenvector from reciprocal use.
pub const NUMERIC_ZERO_TOL: f64 = 1e-10;

/// Constant coefficient matrices `A_0, ..., A_m` of a reciprocal system.
#[derive(Debug, Clone)]
pub struct OdeSystem {
    mats: Vec<Mat<GaussRat>>,
    n: usize,
}

impl OdeSystem {
    /// Builds a system from `A_0, ..., A_m` (lowest derivative first).
    pub fn new(mats: Vec<Mat<GaussRat>>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::BadInput("a system needs at least one coefficient matrix".into()));
        };
        let n = first.require_square()?;
        for m in &mats {
            if m.require_square()? != n {
                return Err(Error::BadInput(
                    "all coefficient matrices must have the same size".into(),
                ));
            }
        }
        if mats.iter().all(|m| m.entries().all(|e| e.is_zero())) {
            return Err(Error::TrivialSystem);
        }
        if mats.last().unwrap().entries().all(|e| e.is_zero()) {
            return Err(Error::ZeroLeading);
        }
        Ok(OdeSystem { mats, n })
    }

    /// Highest derivative order `m`.
    pub fn order(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn matrices(&self) -> &[Mat<GaussRat>] {
        &self.mats
    }

    /// The symbol `Q(z) = sum_k A_k z^{-k}` as a rational matrix
    /// function.
    pub fn symbol(&self) -> Result<RatMatFun> {
        let m = self.order();
        let den = Poly::monomial(GaussRat::one(), m);
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                // numerator coefficient of z^(m-k) is A_k[(i,j)]
                let coeffs: Vec<GaussRat> =
                    (0..=m).map(|p| self.mats[m - p][(i, j)].clone()).collect();
                row.push(RatFun::new(Poly::new(coeffs), den.clone())?);
            }
            rows.push(row);
        }
        RatMatFun::from_entries(Mat::from_rows(rows)?)
    }

    /// Exact residual vector `sum_k A_k alpha^{-k} phi` of a candidate
    /// exponential solution.
    pub fn residual_vector(&self, alpha: &GaussRat, phi: &[GaussRat]) -> Result<Vec<GaussRat>> {
        if alpha.is_zero() {
            return Err(Error::BadInput("exponent zero makes derivatives vanish".into()));
        }
        let mut out = vec![GaussRat::zero(); self.n];
        for (k, a) in self.mats.iter().enumerate() {
            let w = alpha.powi(-(k as i64))?;
            for (i, v) in a.mul_vec(phi).into_iter().enumerate() {
                out[i] = out[i].clone() + v * w.clone();
            }
        }
        Ok(out)
    }

    /// Numeric counterpart of [`OdeSystem::residual_vector`].
    pub fn residual_vector_c64(&self, alpha: C64, phi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for (k, a) in self.mats.iter().enumerate() {
            let w = alpha.powi(-(k as i32));
            for i in 0..self.n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..self.n {
                    acc += a[(i, j)].to_c64() * phi[j];
                }
                out[i] += acc * w;
            }
        }
        out
    }
}

/// One exponential solution `u_i(t) = e^{alpha t} / phi_i`.
#[derive(Debug, Clone)]
pub enum OdeSolution {
    Exact {
        alpha: GaussRat,
        /// Eigenvector `phi` with `Q(alpha) phi = 0`; all components
        /// nonzero.
        eigenvector: Vec<GaussRat>,
        /// Componentwise reciprocals `1 / phi_i`: the amplitudes of the
        /// solution itself.
        amplitudes: Vec<GaussRat>,
        /// Which diagonal entry of the diagonal form vanished (absent
        /// for combined eigenvectors).
        diagonal_index: Option<usize>,
        multiplicity: usize,
    },
    Numeric {
        alpha: C64,
        eigenvector: Vec<C64>,
        diagonal_index: usize,
        multiplicity: usize,
        /// Achieved `|Q(alpha) phi|` at the numeric root.
        residual: f64,
    },
}

impl OdeSolution {
    pub fn exponent_c64(&self) -> C64 {
        match self {
            OdeSolution::Exact { alpha, .. } => alpha.to_c64(),
            OdeSolution::Numeric { alpha, .. } => *alpha,
        }
    }

    pub fn eigenvector_c64(&self) -> Vec<C64> {
        match self {
            OdeSolution::Exact { eigenvector, .. } =>
                eigenvector.iter().map(GaussRat::to_c64).collect(),
            OdeSolution::Numeric { eigenvector, .. } => eigenvector.clone(),
        }
    }

    /// Value of the solution vector at time `t`.
    pub fn eval(&self, t: f64) -> Vec<C64> {
        let alpha = self.exponent_c64();
        let e = (alpha * t).exp();
        self.eigenvector_c64().iter().map(|p| e / p).collect()
    }
}

/// Why a zero of the symbol produced no solution.
#[derive(Debug, Clone, PartialEq)]
pub enum ExclusionReason {
    /// The zero sits at the origin, where derivatives of the candidate
    /// vanish and their reciprocals are undefined.
    ZeroExponent,
    /// The eigenvector has a vanishing component.
    ZeroComponent { index: usize },
}

#[derive(Debug, Clone)]
pub struct Exclusion {
    pub location: CriticalPoint,
    pub diagonal_index: usize,
    pub reason: ExclusionReason,
    /// The rejected eigenvector, when it is exact: combining such
    /// vectors across a repeated exponent can produce a usable one.
    pub eigenvector: Option<Vec<GaussRat>>,
}

/// Everything [`solve_system`] found.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub symbol: RatMatFun,
    pub solutions: Vec<OdeSolution>,
    pub excluded: Vec<Exclusion>,
}

/// Finds all exponential solutions of the system: one per zero of each
/// diagonal entry of the symbol's diagonal form, with the matching
/// column of `T` as eigenvector.  Eigenvectors are scaled so the first
/// nonzero component is 1, making the reported amplitudes canonical;
/// exact solutions are verified to have an exactly zero residual before
/// they are returned.
pub fn solve_system(sys: &OdeSystem) -> Result<SolveReport> {
    let q = sys.symbol()?;
    let analyzer = Analyzer::new(&q)?;
    let form = analyzer.form();
    let mut solutions = Vec::new();
    let mut excluded = Vec::new();

    for (j, d) in form.dtilde.iter().enumerate() {
        let set = crate::roots::roots_with_multiplicity(d.num())?;
        for (alpha, mult) in &set.exact {
            if alpha.is_zero() {
                excluded.push(Exclusion {
                    location: CriticalPoint::Finite(alpha.clone()),
                    diagonal_index: j,
                    reason: ExclusionReason::ZeroExponent,
                    eigenvector: None,
                });
                continue;
            }
            let phi = normalize_leading(
                form.smith.t.col(j).iter().map(|p| p.eval(alpha)).collect(),
            )?;
            if let Some(i) = phi.iter().position(|c| c.is_zero()) {
                excluded.push(Exclusion {
                    location: CriticalPoint::Finite(alpha.clone()),
                    diagonal_index: j,
                    reason: ExclusionReason::ZeroComponent { index: i },
                    eigenvector: Some(phi),
                });
                continue;
            }
            // independent checks: the column is a root function of the
            // symbol and the system residual vanishes identically
            let order = verify_order(&q, &form.smith.t.col(j), alpha)?;
            if order.order == 0 || order.negative_valuation {
                return Err(Error::VerificationFailed(format!(
                    "diagonal zero at {alpha} did not yield a root function"
                )));
            }
            if !sys.residual_vector(alpha, &phi)?.iter().all(|c| c.is_zero()) {
                return Err(Error::VerificationFailed(format!(
                    "exact solution at {alpha} has a nonzero residual"
                )));
            }
            let amplitudes =
                phi.iter().map(|c| c.inv()).collect::<Result<Vec<_>>>()?;
            solutions.push(OdeSolution::Exact {
                alpha: alpha.clone(),
                eigenvector: phi,
                amplitudes,
                diagonal_index: Some(j),
                multiplicity: *mult,
            });
        }
        for (alpha, mult, _) in &set.numeric {
            let mut phi: Vec<C64> = form
                .smith
                .t
                .col(j)
                .iter()
                .map(|p| p.to_cpoly().eval(alpha))
                .collect();
            let scale = phi.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
            if let Some(i) = phi.iter().position(|c| c.norm() <= NUMERIC_ZERO_TOL * scale) {
                excluded.push(Exclusion {
                    location: CriticalPoint::Numeric(*alpha),
                    diagonal_index: j,
                    reason: ExclusionReason::ZeroComponent { index: i },
                    eigenvector: None,
                });
                continue;
            }
            let lead = phi[0];
            for c in &mut phi {
                *c /= lead;
            }
            let residual = sys
                .residual_vector_c64(*alpha, &phi)
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt();
            solutions.push(OdeSolution::Numeric {
                alpha: *alpha,
                eigenvector: phi,
                diagonal_index: j,
                multiplicity: *mult,
                residual,
            });
        }
    }
    Ok(SolveReport { symbol: q, solutions, excluded })
}

/// Scales an exact vector so its first nonzero component becomes 1.
fn normalize_leading(mut phi: Vec<GaussRat>) -> Result<Vec<GaussRat>> {
    if let Some(lead) = phi.iter().find(|c| !c.is_zero()).cloned() {
        let inv = lead.inv()?;
        for c in &mut phi {
            *c = c.clone() * inv.clone();
        }
    }
    Ok(phi)
}

/// Combines eigenvectors sharing one exponent into a single solution
/// with eigenvector `sum c_k phi_k`.  Each input must itself satisfy
/// `sum_k A_k alpha^{-k} phi = 0` exactly (so the combination does too,
/// by linearity in `phi`); the combination must have no zero component.
/// This is how zero-component eigenvectors rejected by [`solve_system`]
/// become usable at a geometrically repeated exponent.
pub fn combine_eigenvectors(
    sys: &OdeSystem,
    alpha: &GaussRat,
    vectors: &[Vec<GaussRat>],
    coeffs: &[GaussRat],
) -> Result<OdeSolution> {
    if vectors.is_empty() || vectors.len() != coeffs.len() {
        return Err(Error::BadInput("need one coefficient per eigenvector".into()));
    }
    let mut combined = vec![GaussRat::zero(); sys.size()];
    for (phi, c) in vectors.iter().zip(coeffs) {
        if phi.len() != sys.size() {
            return Err(Error::BadInput("eigenvector has the wrong length".into()));
        }
        if !sys.residual_vector(alpha, phi)?.iter().all(|r| r.is_zero()) {
            return Err(Error::BadInput(format!(
                "input vector is not an eigenvector at {alpha}"
            )));
        }
        for (dst, v) in combined.iter_mut().zip(phi) {
            *dst = dst.clone() + v.clone() * c.clone();
        }
    }
    if let Some(i) = combined.iter().position(|c| c.is_zero()) {
        return Err(Error::ZeroComponent { index: i });
    }
    let amplitudes = combined.iter().map(|c| c.inv()).collect::<Result<Vec<_>>>()?;
    Ok(OdeSolution::Exact {
        alpha: alpha.clone(),
        eigenvector: combined,
        amplitudes,
        diagonal_index: None,
        multiplicity: 1,
    })
}

/// Residual norms `|sum_k A_k recip(u^(k))(t)|` of a solution at sample
/// times.  For exact solutions this is identically zero; for numeric
/// ones it decays like `|e^{-alpha t}|` from the root-finding residual.
pub fn residual_check(sys: &OdeSystem, sol: &OdeSolution, times: &[f64]) -> Result<Vec<f64>> {
    let base = match sol {
        OdeSolution::Exact { alpha, eigenvector, .. } => {
            if sys.residual_vector(alpha, eigenvector)?.iter().all(|c| c.is_zero()) {
                0.0
            } else {
                // exact but nonzero: fall through to the numeric norm
                sys.residual_vector_c64(alpha.to_c64(), &sol.eigenvector_c64())
                    .iter()
                    .map(|c| c.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
        }
        OdeSolution::Numeric { residual, .. } => *residual,
    };
    let alpha = sol.exponent_c64();
    Ok(times.iter().map(|t| base * (-alpha * *t).exp().norm()).collect())
}

/// Numeric defect of an arbitrary trajectory `t -> u(t)` under the
/// system, sampled pointwise by finite differences on the derivatives
/// of the explicit exponential form.
fn defect_of_sum(sys: &OdeSystem, parts: &[&OdeSolution], t: f64) -> f64 {
    let n = sys.size();
    let mut defect = vec![C64::new(0.0, 0.0); n];
    for (k, a) in sys.matrices().iter().enumerate() {
        // k-th derivative of the summed trajectory at t, from the
        // closed exponential form
        let mut deriv = vec![C64::new(0.0, 0.0); n];
        for sol in parts {
            let alpha = sol.exponent_c64();
            let e = (alpha * t).exp() * alpha.powi(k as i32);
            for (i, p) in sol.eigenvector_c64().iter().enumerate() {
                deriv[i] += e / p;
            }
        }
        let recip: Vec<C64> = deriv.iter().map(|d| d.inv()).collect();
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += a[(i, j)].to_c64() * recip[j];
            }
            defect[i] += acc;
        }
    }
    defect.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Shows the nonlinearity of the system: each input solution has a tiny
/// defect at the sample times while their sum does not.
#[derive(Debug, Clone)]
pub struct NonlinearityDemo {
    pub individual: Vec<Vec<f64>>,
    pub sum_defect: Vec<f64>,
}

pub fn demonstrate_nonlinearity(
    sys: &OdeSystem,
    parts: &[&OdeSolution],
    times: &[f64],
) -> Result<NonlinearityDemo> {
    if parts.len() < 2 {
        return Err(Error::BadInput("nonlinearity needs at least two solutions".into()));
    }
    let individual = parts
        .iter()
        .map(|s| residual_check(sys, s, times))
        .collect::<Result<Vec<_>>>()?;
    let sum_defect = times.iter().map(|t| defect_of_sum(sys, parts, *t)).collect();
    Ok(NonlinearityDemo { individual, sum_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Mat<GaussRat> {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|v| gi(*v)).collect()).collect(),
        )
        .unwrap()
    }

    /// First-order system whose symbol is I + diag(-2, -3)/z:
    /// zeros at 2 and 3 with unit eigenvectors.
    fn diagonal_system() -> OdeSystem {
        OdeSystem::new(vec![mat(&[&[1, 0], &[0, 1]]), mat(&[&[-2, 0], &[0, -3]])]).unwrap()
    }

    /// Symmetric coupled first-order system: symbol I + [[-5,1],[1,-5]]/z
    /// with det = (z-4)(z-6)/z^2; eigenvectors proportional to (1,1) and
    /// (1,-1), so every component is usable.
    fn coupled_system() -> OdeSystem {
        OdeSystem::new(vec![mat(&[&[1, 0], &[0, 1]]), mat(&[&[-5, 1], &[1, -5]])]).unwrap()
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(OdeSystem::new(vec![]), Err(Error::BadInput(_))));
        let zero = Mat::<GaussRat>::zero(2, 2);
        assert!(matches!(
            OdeSystem::new(vec![zero.clone(), zero.clone()]),
            Err(Error::TrivialSystem)
        ));
        assert!(matches!(
            OdeSystem::new(vec![mat(&[&[1, 0], &[0, 1]]), zero]),
            Err(Error::ZeroLeading)
        ));
    }

    #[test]
    fn symbol_layout() {
        let sys = diagonal_system();
        assert_eq!(sys.order(), 1);
        let q = sys.symbol().unwrap();
        assert_eq!(q.entry(0, 0), RatFun::parse("(z-2)/z").unwrap());
        assert_eq!(q.entry(1, 1), RatFun::parse("(z-3)/z").unwrap());
    }

    #[test]
    fn coupled_system_solutions() {
        let sys = coupled_system();
        let report = solve_system(&sys).unwrap();
        assert!(report.excluded.is_empty());
        assert_eq!(report.solutions.len(), 2);
        let mut sols: Vec<(GaussRat, Vec<GaussRat>)> = report
            .solutions
            .iter()
            .map(|s| match s {
                OdeSolution::Exact { alpha, eigenvector, .. } => {
                    (alpha.clone(), eigenvector.clone())
                }
                _ => panic!("expected exact"),
            })
            .collect();
        sols.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(sols[0].0, gi(4));
        assert_eq!(sols[1].0, gi(6));
        // eigenvectors proportional to (1,1) and (1,-1)
        assert_eq!(sols[0].1[0], sols[0].1[1]);
        assert_eq!(sols[1].1[0], -sols[1].1[1].clone());
        // residuals identically zero at every sample time
        for sol in &report.solutions {
            let r = residual_check(&sys, sol, &[0.0, 0.5, 1.0, 2.0]).unwrap();
            assert!(r.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn zero_exponent_is_excluded() {
        // symbol [[1, 1/z], [0, 1]] diagonalizes to (1/z, z): a zero
        // sits at the origin, where the reciprocal substitution breaks
        let sys =
            OdeSystem::new(vec![mat(&[&[1, 0], &[0, 1]]), mat(&[&[0, 1], &[0, 0]])]).unwrap();
        let report = solve_system(&sys).unwrap();
        assert!(report.solutions.is_empty());
        assert_eq!(report.excluded.len(), 1);
        assert_eq!(report.excluded[0].reason, ExclusionReason::ZeroExponent);
    }

    #[test]
    fn zero_component_is_excluded() {
        // decoupled symbol diag((z-2)/z, (z-3)/z): the eigenvectors are
        // unit vectors, whose zero components make the reciprocal
        // solution undefined — both zeros must be excluded
        let sys = diagonal_system();
        let report = solve_system(&sys).unwrap();
        assert!(report.solutions.is_empty());
        assert_eq!(report.excluded.len(), 2);
        for e in &report.excluded {
            assert!(matches!(e.reason, ExclusionReason::ZeroComponent { .. }));
        }
    }

    #[test]
    fn repeated_exponent_exclusions() {
        // symbol (1 - 2/z) I: zero at 2 twice, eigenvectors e_1 and e_2
        // are excluded, but their sum (1,1) solves the system exactly
        let sys =
            OdeSystem::new(vec![mat(&[&[1, 0], &[0, 1]]), mat(&[&[-2, 0], &[0, -2]])]).unwrap();
        let report = solve_system(&sys).unwrap();
        assert!(report.solutions.is_empty());
        assert_eq!(report.excluded.len(), 2);
        assert!(matches!(
            report.excluded[0].reason,
            ExclusionReason::ZeroComponent { .. }
        ));
        let phi = vec![gi(1), gi(1)];
        assert!(sys.residual_vector(&gi(2), &phi).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn combine_rejects_a_wrong_exponent() {
        let sys = coupled_system();
        let report = solve_system(&sys).unwrap();
        let OdeSolution::Exact { alpha, eigenvector, .. } = &report.solutions[0] else {
            panic!("expected exact")
        };
        // the eigenvector does not belong to a different exponent
        let wrong = alpha.clone() + gi(1);
        let err =
            combine_eigenvectors(&sys, &wrong, &[eigenvector.clone()], &[gi(1)]).unwrap_err();
        assert!(matches!(err, Error::BadInput(_)));
    }

    #[test]
    fn combine_merges_a_repeated_exponent() {
        // two decoupled copies of the coupled system: exponent 4 has a
        // two-dimensional eigenspace whose natural basis vectors all
        // carry zero components
        let a0 = Mat::identity(4);
        let mut a1 = Mat::zero(4, 4);
        for (i, j, v) in [
            (0, 0, -5),
            (0, 1, 1),
            (1, 0, 1),
            (1, 1, -5),
            (2, 2, -5),
            (2, 3, 1),
            (3, 2, 1),
            (3, 3, -5),
        ] {
            a1[(i, j)] = gi(v);
        }
        let sys = OdeSystem::new(vec![a0, a1]).unwrap();
        let report = solve_system(&sys).unwrap();
        // gather the eigenspace at 4 from solutions and exclusions alike
        let mut basis: Vec<Vec<GaussRat>> = Vec::new();
        for s in &report.solutions {
            if let OdeSolution::Exact { alpha, eigenvector, .. } = s {
                if *alpha == gi(4) {
                    basis.push(eigenvector.clone());
                }
            }
        }
        for e in &report.excluded {
            if e.location == CriticalPoint::Finite(gi(4)) {
                basis.push(e.eigenvector.clone().expect("exact exclusion"));
            }
        }
        assert_eq!(basis.len(), 2);
        let combined =
            combine_eigenvectors(&sys, &gi(4), &basis, &[gi(1), gi(2)]).unwrap();
        let OdeSolution::Exact { alpha, diagonal_index, eigenvector, .. } = &combined else {
            panic!("expected exact")
        };
        assert_eq!(*alpha, gi(4));
        assert_eq!(*diagonal_index, None);
        assert!(eigenvector.iter().all(|c| !c.is_zero()));
        let r = residual_check(&sys, &combined, &[0.0, 1.0]).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn nonlinearity_demo_shows_defect() {
        let sys = coupled_system();
        let report = solve_system(&sys).unwrap();
        let usable: Vec<&OdeSolution> = report.solutions.iter().collect();
        assert_eq!(usable.len(), 2);
        let demo =
            demonstrate_nonlinearity(&sys, &usable[..2], &[0.0, 0.25, 0.5]).unwrap();
        for r in &demo.individual {
            assert!(r.iter().all(|v| *v < 1e-9));
        }
        assert!(
            demo.sum_defect.iter().any(|v| *v > 1e-3),
            "sum of solutions should not satisfy the system: {:?}",
            demo.sum_defect
        );
    }
}
