//! Logarithmic-residue contour quadrature.
//!
//! The winding integral of `tr(Q'(z) Q(z)^{-1})` around a circle counts
//! zeros minus poles inside, multiplicities included.  This module
//! evaluates that integral numerically and compares it with the exact
//! count from the diagonal form — an independent floating-point
//! cross-check of the symbolic structure.  The trace never requires a
//! matrix inverse: with `Q = L / q` it equals
//! `(det L)'/(det L) - n q'/q`, a scalar rational function.


use crate::error::{Error, Result};
use crate::poly::{CPoly, Poly};
use crate::ratmat::RatMatFun;
use crate::roots::roots_with_multiplicity;
use crate::scalar::C64;
use crate::structure::{Analyzer, CriticalPoint};

/// Quadrature nodes used when the caller does not choose.
pub const DEFAULT_NODES: usize = 1024;
/// Node count is doubled until convergence, up to this cap.
pub const MAX_NODES: usize = 1 << 16;
/// Minimum allowed distance between the circle and any singularity of
/// the integrand.
pub const SINGULARITY_CLEARANCE: f64 = 1e-6;
/// Doubling must change the value by at most this much, and the
/// imaginary part must be at most this large, for the result to count
/// as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// A circle in the complex plane with a node budget for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Contour {
    pub fn new(center: C64, radius: f64) -> Self {
        Contour { center, radius, nodes: DEFAULT_NODES }
    }

    pub fn with_nodes(center: C64, radius: f64, nodes: usize) -> Self {
        Contour { center, radius, nodes }
    }
}

/// Converged value of the winding integral.
#[derive(Debug, Clone, Copy)]
pub struct LogResidue {
    pub value: C64,
    /// Nearest integer to the real part; the quantity the integral is
    /// certifying.
    pub nearest: i64,
    /// Distance from the value to that integer in the complex plane.
    pub gap: f64,
    pub nodes_used: usize,
    /// Measured distance from the circle to the closest singularity.
    pub clearance: f64,
}

/// Comparison of the quadrature against the exact zero/pole count.
#[derive(Debug, Clone)]
pub struct ResidueConsistency {
    pub computed: LogResidue,
    /// Exact count of zeros minus poles strictly inside the circle.
    pub expected: i64,
    pub agrees: bool,
}

fn singularity_locations(q: &RatMatFun, det_num: &Poly) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    for p in [det_num, q.den()] {
        let set = roots_with_multiplicity(p)?;
        out.extend(set.exact.iter().map(|(r, _)| r.to_c64()));
        out.extend(set.numeric.iter().map(|(z, _, _)| *z));
    }
    Ok(out)
}

fn trapezoid(
    num: &CPoly,
    dnum: &CPoly,
    den: &CPoly,
    dden: &CPoly,
    n: usize,
    contour: &Contour,
    nodes: usize,
) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let step = std::f64::consts::TAU / nodes as f64;
    for k in 0..nodes {
        let w = C64::from_polar(1.0, step * k as f64);
        let z = contour.center + contour.radius * w;
        let f = dnum.eval(&z) / num.eval(&z) - (n as f64) * dden.eval(&z) / den.eval(&z);
        acc += f * w;
    }
    acc * (contour.radius / nodes as f64)
}

/// Winding integral of `tr(Q' Q^{-1})` over the contour, with adaptive
/// node doubling.  The circle must stay [`SINGULARITY_CLEARANCE`] away
/// from every zero and pole of `det Q`.
pub fn log_residue(q: &RatMatFun, contour: &Contour) -> Result<LogResidue> {
    if !(contour.radius.is_finite() && contour.radius > 0.0) || !contour.center.is_finite() {
        return Err(Error::BadInput("contour needs a finite center and positive radius".into()));
    }
    if contour.nodes < 4 {
        return Err(Error::BadInput("contour needs at least 4 quadrature nodes".into()));
    }
    let det_num = q.num().determinant()?;
    if det_num.is_zero() {
        return Err(Error::SingularFunction);
    }
    let mut clearance = f64::INFINITY;
    for s in singularity_locations(q, &det_num)? {
        clearance = clearance.min(((s - contour.center).norm() - contour.radius).abs());
    }
    if clearance < SINGULARITY_CLEARANCE {
        return Err(Error::ContourThroughSingularity { distance: clearance });
    }

    let num = det_num.to_cpoly();
    let dnum = det_num.derivative().to_cpoly();
    let den = q.den().to_cpoly();
    let dden = q.den().derivative().to_cpoly();
    let n = q.size();

    let mut nodes = contour.nodes;
    let mut value = trapezoid(&num, &dnum, &den, &dden, n, contour, nodes);
    let mut change = f64::INFINITY;
    while nodes < MAX_NODES {
        nodes *= 2;
        let refined = trapezoid(&num, &dnum, &den, &dden, n, contour, nodes);
        change = (refined - value).norm();
        value = refined;
        if change <= CONVERGENCE_TOL && value.im.abs() <= CONVERGENCE_TOL {
            let nearest = value.re.round() as i64;
            let gap = (value - C64::new(nearest as f64, 0.0)).norm();
            return Ok(LogResidue { value, nearest, gap, nodes_used: nodes, clearance });
        }
    }
    Err(Error::NonConvergent { change })
}

/// Runs the quadrature and compares it with the exact count of zeros
/// minus poles inside the circle.
pub fn residue_consistency(q: &RatMatFun, contour: &Contour) -> Result<ResidueConsistency> {
    let computed = log_residue(q, contour)?;
    let analyzer = Analyzer::new(q)?;
    let mut expected: i64 = 0;
    for point in analyzer.critical_points() {
        let loc = match &point {
            CriticalPoint::Finite(a) => a.to_c64(),
            CriticalPoint::Numeric(z) => *z,
            CriticalPoint::Infinity => continue,
        };
        if (loc - contour.center).norm() < contour.radius {
            let report = analyzer.structure_at(&point)?;
            expected += report.total_zero_multiplicity() as i64;
            expected -= report.total_pole_multiplicity() as i64;
        }
    }
    let agrees = computed.nearest == expected && computed.gap <= CONVERGENCE_TOL;
    Ok(ResidueConsistency { computed, expected, agrees })
}
