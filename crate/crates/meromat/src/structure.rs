//! Local zero/pole structure of a rational matrix function.
//!
//! The diagonal form `S Q T = diag(dtilde_i)` carries the complete local
//! data at every point: the valuations of the `dtilde_i` at a point are
//! the partial zero and pole multiplicities, the matching columns of `T`
//! are root functions and (divided by `dtilde_i`) pole cancellation
//! functions, and the columns of `S^{-1}` play the same roles for the
//! inverse function.  Everything here is exact; points with irrational
//! locations still get exact multiplicities because those come from the
//! square-free structure of the diagonal, not from the numeric root
//! values.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::ratmat::RatMatFun;
use crate::roots::{roots_with_multiplicity, RootSet};
use crate::scalar::{GaussRat, C64};
use crate::smith::{diag_rational, DiagRatForm};

/// Matching tolerance when a critical point is only known numerically.
/// Multiplicities stay exact; only the location comparison is fuzzy.
pub const NUMERIC_POINT_TOL: f64 = 1e-8;

/// A point where structure is measured: an exact Gaussian rational, a
/// numeric (irrational) root location, or the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalPoint {
    Finite(GaussRat),
    Numeric(C64),
    Infinity,
}

impl CriticalPoint {
    pub fn finite_int(n: i64) -> Self {
        CriticalPoint::Finite(GaussRat::from_int(n))
    }
}

impl std::fmt::Display for CriticalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriticalPoint::Finite(a) => write!(f, "{a}"),
            CriticalPoint::Numeric(z) => write!(f, "{}+{}i (numeric)", z.re, z.im),
            CriticalPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Complete local structure at one point.
///
/// Index sets refer to positions in the sorted diagonal (0-based).  All
/// function lists are aligned with their index set; root and pole
/// functions are polynomial columns of the `T` and `S^{-1}` factors.
/// At `Infinity` the functions are expressed in the inverted variable.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub point: CriticalPoint,
    pub omega_zero: Vec<usize>,
    pub zero_partial_multiplicities: Vec<usize>,
    pub omega_pole: Vec<usize>,
    pub pole_partial_multiplicities: Vec<usize>,
    pub root_functions: Vec<Vec<Poly>>,
    pub pole_cancellation_functions: Vec<Vec<RatFun>>,
    pub pole_functions: Vec<Vec<Poly>>,
    pub inverse_pole_cancellation_functions: Vec<Vec<RatFun>>,
}

impl StructureReport {
    /// Total zero multiplicity at the point (sum of partials).
    pub fn total_zero_multiplicity(&self) -> usize {
        self.zero_partial_multiplicities.iter().sum()
    }

    /// Total pole multiplicity at the point.
    pub fn total_pole_multiplicity(&self) -> usize {
        self.pole_partial_multiplicities.iter().sum()
    }

    pub fn geometric_zero_multiplicity(&self) -> usize {
        self.omega_zero.len()
    }

    pub fn geometric_pole_multiplicity(&self) -> usize {
        self.omega_pole.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.omega_zero.is_empty() && self.omega_pole.is_empty()
    }
}

/// Result of checking a candidate root function: the exact order of
/// vanishing of `Q * phi` at the point.  The order is also maximal: the
/// valuation is computed exactly, so the next derivative is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub order: usize,
    /// Set when `Q * phi` actually has a pole at the point (negative
    /// valuation); the order is then reported as zero.
    pub negative_valuation: bool,
}

/// Result of checking a candidate pole cancellation function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleCancellationReport {
    /// Exact vanishing order of the candidate itself at the point;
    /// values below one mean the candidate does not cancel a pole.
    pub order: i64,
    /// The finite nonzero limit of `Q * psi` at the point.
    pub limit: Vec<GaussRat>,
    pub is_cancellation: bool,
}

/// Computes structure reports for a fixed function, reusing the
/// diagonalization and the root catalogues of the diagonal entries.
pub struct Analyzer {
    q: RatMatFun,
    form: DiagRatForm,
    num_roots: Vec<RootSet>,
    den_roots: Vec<RootSet>,
}

impl Analyzer {
    pub fn new(q: &RatMatFun) -> Result<Self> {
        let form = diag_rational(q)?;
        let mut num_roots = Vec::with_capacity(form.dtilde.len());
        let mut den_roots = Vec::with_capacity(form.dtilde.len());
        for d in &form.dtilde {
            num_roots.push(roots_with_multiplicity(d.num())?);
            den_roots.push(roots_with_multiplicity(d.den())?);
        }
        Ok(Analyzer { q: q.clone(), form, num_roots, den_roots })
    }

    pub fn q(&self) -> &RatMatFun {
        &self.q
    }

    pub fn form(&self) -> &DiagRatForm {
        &self.form
    }

    /// All finite critical points: zeros and poles of the diagonal
    /// entries, exact locations first (sorted), then numeric locations
    /// (deduplicated within [`NUMERIC_POINT_TOL`]).
    pub fn critical_points(&self) -> Vec<CriticalPoint> {
        let mut exact: Vec<GaussRat> = Vec::new();
        let mut numeric: Vec<C64> = Vec::new();
        for set in self.num_roots.iter().chain(self.den_roots.iter()) {
            for (r, _) in &set.exact {
                if !exact.contains(r) {
                    exact.push(r.clone());
                }
            }
            for (z, _, _) in &set.numeric {
                if !numeric.iter().any(|w| (w - z).norm() <= NUMERIC_POINT_TOL) {
                    numeric.push(*z);
                }
            }
        }
        exact.sort();
        numeric.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal)
        });
        exact
            .into_iter()
            .map(CriticalPoint::Finite)
            .chain(numeric.into_iter().map(CriticalPoint::Numeric))
            .collect()
    }

    /// Signed valuation of `dtilde[i]` at a finite point.
    fn valuation(&self, i: usize, point: &CriticalPoint) -> i64 {
        match point {
            CriticalPoint::Finite(alpha) => {
                self.form.dtilde[i].valuation_at(alpha).expect("diagonal entries are nonzero")
            }
            CriticalPoint::Numeric(z) => {
                let up = self.mult_near(&self.num_roots[i], *z);
                let down = self.mult_near(&self.den_roots[i], *z);
                up as i64 - down as i64
            }
            CriticalPoint::Infinity => unreachable!("infinity handled by inversion"),
        }
    }

    fn mult_near(&self, set: &RootSet, z: C64) -> usize {
        let mut m = set.numeric_multiplicity_near(z, NUMERIC_POINT_TOL);
        for (r, k) in &set.exact {
            if (r.to_c64() - z).norm() <= NUMERIC_POINT_TOL {
                m += k;
            }
        }
        m
    }

    /// Local structure at a finite point.
    pub fn structure_at(&self, point: &CriticalPoint) -> Result<StructureReport> {
        if matches!(point, CriticalPoint::Infinity) {
            return structure_at_infinity(&self.q);
        }
        let n = self.form.dtilde.len();
        let mut report = StructureReport {
            point: point.clone(),
            omega_zero: Vec::new(),
            zero_partial_multiplicities: Vec::new(),
            omega_pole: Vec::new(),
            pole_partial_multiplicities: Vec::new(),
            root_functions: Vec::new(),
            pole_cancellation_functions: Vec::new(),
            pole_functions: Vec::new(),
            inverse_pole_cancellation_functions: Vec::new(),
        };
        let t = &self.form.smith.t;
        let s_inv = &self.form.smith.s_inv;
        for i in 0..n {
            let val = self.valuation(i, point);
            if val > 0 {
                report.omega_zero.push(i);
                report.zero_partial_multiplicities.push(val as usize);
                report.root_functions.push(t.col(i));
                let canceller = self.form.dtilde[i].clone();
                report.inverse_pole_cancellation_functions.push(
                    s_inv
                        .col(i)
                        .into_iter()
                        .map(|p| RatFun::from_poly(p) * canceller.clone())
                        .collect(),
                );
            } else if val < 0 {
                report.omega_pole.push(i);
                report.pole_partial_multiplicities.push((-val) as usize);
                report.pole_functions.push(s_inv.col(i));
                let inv = self.form.dtilde[i].inv()?;
                report.pole_cancellation_functions.push(
                    t.col(i).into_iter().map(|p| RatFun::from_poly(p) * inv.clone()).collect(),
                );
            }
        }
        // cross-check the emitted root functions against the claimed
        // orders whenever the point is exact
        if let CriticalPoint::Finite(alpha) = point {
            for (k, i) in report.omega_zero.iter().enumerate() {
                let check = verify_order(&self.q, &report.root_functions[k], alpha)?;
                if check.order != report.zero_partial_multiplicities[k] || check.negative_valuation
                {
                    return Err(Error::VerificationFailed(format!(
                        "root function {i} claims order {} but verifies at {}",
                        report.zero_partial_multiplicities[k], check.order
                    )));
                }
            }
        }
        Ok(report)
    }
}

/// One-shot local structure at a point.
pub fn zero_pole_structure(q: &RatMatFun, point: &CriticalPoint) -> Result<StructureReport> {
    Analyzer::new(q)?.structure_at(point)
}

/// Structure at infinity via the substitution `z -> 1/z`: the report is
/// the structure of `Q(1/z)` at zero with the point relabeled.  The
/// emitted functions are in the inverted variable.
pub fn structure_at_infinity(q: &RatMatFun) -> Result<StructureReport> {
    let inverted = q.invert_variable();
    let mut report =
        Analyzer::new(&inverted)?.structure_at(&CriticalPoint::Finite(GaussRat::zero()))?;
    report.point = CriticalPoint::Infinity;
    Ok(report)
}

/// Exact order of vanishing of `Q * phi` at `alpha` for a polynomial
/// column `phi` with `phi(alpha) != 0`.
///
/// The order is the minimum valuation over the nonzero components, so it
/// is simultaneously a certificate of maximality: derivatives below the
/// reported order vanish in the limit and the one at the order does not.
pub fn verify_order(q: &RatMatFun, phi: &[Poly], alpha: &GaussRat) -> Result<OrderReport> {
    if phi.len() != q.size() {
        return Err(Error::BadInput(format!(
            "candidate has {} components, function needs {}",
            phi.len(),
            q.size()
        )));
    }
    if phi.iter().all(|p| p.eval(alpha).is_zero()) {
        return Err(Error::EigvecZero);
    }
    let image = q.num().mul_vec(phi);
    let mut min_val: Option<i64> = None;
    for comp in image {
        let f = RatFun::new(comp, q.den().clone())?;
        if let Some(v) = f.valuation_at(alpha) {
            min_val = Some(min_val.map_or(v, |m| m.min(v)));
        }
    }
    let Some(v) = min_val else {
        // Q * phi vanished identically, which needs det Q = 0
        return Err(Error::SingularFunction);
    };
    Ok(OrderReport { order: v.max(0) as usize, negative_valuation: v < 0 })
}

/// Checks a candidate pole cancellation function `psi` at `beta`:
/// `Q * psi` must have a finite nonzero limit there.  Returns the exact
/// vanishing order of `psi` itself and the limit vector.
pub fn verify_pole_cancellation(
    q: &RatMatFun,
    psi: &[RatFun],
    beta: &GaussRat,
) -> Result<PoleCancellationReport> {
    if psi.len() != q.size() {
        return Err(Error::BadInput(format!(
            "candidate has {} components, function needs {}",
            psi.len(),
            q.size()
        )));
    }
    let image = q.entries().mul_vec(psi);
    let mut limit = Vec::with_capacity(image.len());
    for comp in &image {
        match comp.valuation_at(beta) {
            Some(v) if v < 0 => return Err(Error::LimitInfinite),
            _ => limit.push(comp.eval_exact(beta).unwrap_or_else(|_| GaussRat::zero())),
        }
    }
    if limit.iter().all(|c| c.is_zero()) {
        return Err(Error::LimitZero);
    }
    let order = psi
        .iter()
        .filter_map(|f| f.valuation_at(beta))
        .min()
        .unwrap_or(0);
    Ok(PoleCancellationReport { order, limit, is_cancellation: order >= 1 })
}

/// At a point where the shared denominator does not vanish, a column is
/// a root function of `Q = L/q` exactly when it is one of `L`, with the
/// same order.  Returns whether the two checks agree.
pub fn numerator_root_equivalence(
    q: &RatMatFun,
    phi: &[Poly],
    alpha: &GaussRat,
) -> Result<bool> {
    if q.den().eval(alpha).is_zero() {
        return Err(Error::PremiseViolated);
    }
    let l = RatMatFun::from_mat_poly(q.num().clone())?;
    let on_q = verify_order(q, phi, alpha)?;
    let on_l = verify_order(&l, phi, alpha)?;
    Ok(on_q == on_l)
}

/// Taylor coefficients of a polynomial column at `alpha`: the first
/// `len` coefficient vectors of the expansion in powers of `z - alpha`.
/// These are the chain vectors associated with a root function.
pub fn taylor_jordan_vectors(phi: &[Poly], alpha: &GaussRat, len: usize) -> Vec<Vec<GaussRat>> {
    let per_component: Vec<Vec<GaussRat>> =
        phi.iter().map(|p| p.taylor_at(alpha, len)).collect();
    (0..len)
        .map(|j| per_component.iter().map(|c| c[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

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
    fn quartic_zero_structure() {
        let q = q_sym_quartic();
        let report = zero_pole_structure(&q, &CriticalPoint::finite_int(-1)).unwrap();
        assert_eq!(report.omega_zero, vec![1]);
        assert_eq!(report.zero_partial_multiplicities, vec![4]);
        assert_eq!(report.total_zero_multiplicity(), 4);
        assert_eq!(report.geometric_zero_multiplicity(), 1);
        assert!(report.omega_pole.is_empty());
        // the root function is the second column of T
        let phi = &report.root_functions[0];
        assert_eq!(phi[0], Poly::one());
        assert_eq!(phi[1], Poly::parse("(z^2+4*z+5)/5").unwrap());
    }

    #[test]
    fn quartic_pole_structure_at_zero() {
        let q = q_sym_quartic();
        let report = zero_pole_structure(&q, &CriticalPoint::finite_int(0)).unwrap();
        assert_eq!(report.omega_pole, vec![0, 1]);
        assert_eq!(report.pole_partial_multiplicities, vec![2, 2]);
        assert_eq!(report.total_pole_multiplicity(), 4);
        assert_eq!(report.geometric_pole_multiplicity(), 2);
        assert!(report.omega_zero.is_empty());
        // every pole cancellation function checks out
        for (k, psi) in report.pole_cancellation_functions.iter().enumerate() {
            let check = verify_pole_cancellation(&q, psi, &gi(0)).unwrap();
            assert!(check.is_cancellation);
            assert_eq!(check.order, report.pole_partial_multiplicities[k] as i64);
        }
    }

    #[test]
    fn point_can_be_zero_and_pole_simultaneously() {
        let q = q_mixed_3x3();
        let report = zero_pole_structure(&q, &CriticalPoint::finite_int(0)).unwrap();
        assert_eq!(report.total_zero_multiplicity(), 1);
        assert_eq!(report.total_pole_multiplicity(), 1);
        let report = zero_pole_structure(&q, &CriticalPoint::finite_int(1)).unwrap();
        assert_eq!(report.total_zero_multiplicity(), 1);
        assert_eq!(report.total_pole_multiplicity(), 0);
    }

    #[test]
    fn verify_order_examples() {
        let q = q_sym_quartic();
        let phi = vec![Poly::one(), Poly::parse("(z^2+4*z+5)/5").unwrap()];
        let report = verify_order(&q, &phi, &gi(-1)).unwrap();
        assert_eq!(report.order, 4);
        assert!(!report.negative_valuation);
        // a vector vanishing at the point is rejected
        let vanishing = vec![Poly::parse("z+1").unwrap(), Poly::zero()];
        assert!(matches!(
            verify_order(&q, &vanishing, &gi(-1)),
            Err(Error::EigvecZero)
        ));
        // constant vector that is no root function: order 0
        let e1 = vec![Poly::one(), Poly::zero()];
        assert_eq!(verify_order(&q, &e1, &gi(-1)).unwrap().order, 0);
        // at the pole the image blows up: negative valuation flag
        let check = verify_order(&q, &e1, &gi(0)).unwrap();
        assert!(check.negative_valuation);
        assert_eq!(check.order, 0);
    }

    #[test]
    fn verify_pole_cancellation_examples() {
        let q = q_sym_quartic();
        // a known order-2 cancellation at 0, deliberately scaled away
        // from the canonical unit: psi = (0, -z^2/5)
        let psi = vec![
            RatFun::zero(),
            RatFun::parse("-z^2/5").unwrap(),
        ];
        let report = verify_pole_cancellation(&q, &psi, &gi(0)).unwrap();
        assert_eq!(report.order, 2);
        assert!(report.is_cancellation);
        assert!(!report.limit.iter().all(|c| c.is_zero()));
        // identity matrix: e1 does not vanish, flagged not a cancellation
        let id = RatMatFun::identity(2);
        let e1 = vec![RatFun::one(), RatFun::zero()];
        let report = verify_pole_cancellation(&id, &e1, &gi(0)).unwrap();
        assert_eq!(report.order, 0);
        assert!(!report.is_cancellation);
        // a candidate that overshoots: psi = (0, z^5) against the quartic
        let overshoot = vec![RatFun::zero(), RatFun::parse("z^5").unwrap()];
        assert!(matches!(
            verify_pole_cancellation(&q, &overshoot, &gi(0)),
            Err(Error::LimitZero)
        ));
        // e1 against q blows up at the pole
        let e1 = vec![RatFun::one(), RatFun::zero()];
        assert!(matches!(
            verify_pole_cancellation(&q, &e1, &gi(0)),
            Err(Error::LimitInfinite)
        ));
    }

    #[test]
    fn equivalence_away_from_denominator_roots() {
        let q = q_sym_quartic();
        let phi = vec![Poly::one(), Poly::parse("(z^2+4*z+5)/5").unwrap()];
        assert!(numerator_root_equivalence(&q, &phi, &gi(-1)).unwrap());
        assert!(matches!(
            numerator_root_equivalence(&q, &phi, &gi(0)),
            Err(Error::PremiseViolated)
        ));
        // counterexample at a denominator root: the second unit vector is
        // a root function of L at 0 but not of Q
        let q = q_mixed_3x3();
        let l = RatMatFun::from_mat_poly(q.num().clone()).unwrap();
        let e2 = vec![Poly::zero(), Poly::one(), Poly::zero()];
        assert_eq!(verify_order(&l, &e2, &gi(0)).unwrap().order, 1);
        assert_eq!(verify_order(&q, &e2, &gi(0)).unwrap().order, 0);
    }

    #[test]
    fn taylor_vectors_of_root_function() {
        let phi = vec![Poly::one(), Poly::parse("(z^2+4*z+5)/5").unwrap()];
        let vecs = taylor_jordan_vectors(&phi, &gi(-1), 3);
        assert_eq!(vecs[0], vec![gi(1), GaussRat::from_frac(2, 5)]);
        assert_eq!(vecs[1], vec![gi(0), GaussRat::from_frac(2, 5)]);
        assert_eq!(vecs[2], vec![gi(0), GaussRat::from_frac(1, 5)]);
    }

    #[test]
    fn infinity_structure() {
        // L = [[0, z, 0], [z, z^2, 0], [0, 0, z]] has a pole of order 2
        // at infinity with partial multiplicities (2, 1)
        let l = RatMatFun::from_exprs(&[
            &["0", "z", "0"],
            &["z", "z^2", "0"],
            &["0", "0", "z"],
        ])
        .unwrap();
        let report = structure_at_infinity(&l).unwrap();
        assert_eq!(report.point, CriticalPoint::Infinity);
        assert_eq!(report.total_pole_multiplicity(), 3);
        let mut partials = report.pole_partial_multiplicities.clone();
        partials.sort();
        assert_eq!(partials, vec![1, 2]);
        // no zero at infinity: det = -z^3 makes the point a net pole of
        // degree 3, fully accounted for by the pole partials
        assert_eq!(report.total_zero_multiplicity(), 0);
    }

    #[test]
    fn numeric_critical_points_get_exact_multiplicities() {
        // det has an irrational double root: diag(z^2 - 2, z^2 - 2)
        let q = RatMatFun::from_exprs(&[
            &["z^2-2", "0"],
            &["0", "(z^2-2)^2"],
        ])
        .unwrap();
        let analyzer = Analyzer::new(&q).unwrap();
        let points = analyzer.critical_points();
        assert_eq!(points.len(), 2);
        let CriticalPoint::Numeric(z) = &points[1] else {
            panic!("expected numeric point");
        };
        assert!((z.re - 2.0f64.sqrt()).abs() < 1e-9);
        let report = analyzer.structure_at(&points[1]).unwrap();
        assert_eq!(report.zero_partial_multiplicities, vec![1, 2]);
        assert_eq!(report.total_zero_multiplicity(), 3);
    }

    #[test]
    fn duality_with_the_inverse() {
        let q = q_mixed_3x3();
        let inv = q.inverse().unwrap();
        for p in [CriticalPoint::finite_int(0), CriticalPoint::finite_int(1)] {
            let direct = zero_pole_structure(&q, &p).unwrap();
            let dual = zero_pole_structure(&inv, &p).unwrap();
            assert_eq!(
                direct.zero_partial_multiplicities,
                dual.pole_partial_multiplicities
            );
            assert_eq!(
                direct.pole_partial_multiplicities,
                dual.zero_partial_multiplicities
            );
        }
    }
}
