//! Diagonalization of polynomial matrices by unimodular row and column
//! operations.
//!
//! For a nonsingular `L` over Q(i)[z] this produces `S * L * T = D` with
//! `S`, `T` products of elementary operations (hence constant nonzero
//! determinant) and `D` diagonal.  The diagonal is normalized monic and
//! sorted by (degree, coefficient order), which fixes the result up to
//! the inherent nonuniqueness of the factors themselves.  Every
//! elementary operation is recorded in a replayable transcript.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::ratmat::{MatPoly, RatMatFun};
use crate::scalar::GaussRat;

/// One elementary row or column operation.  Scales are by nonzero
/// constants; additions are by arbitrary polynomial multiples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ElemOp {
    SwapRows { a: usize, b: usize },
    SwapCols { a: usize, b: usize },
    ScaleRow { row: usize, factor: GaussRat },
    ScaleCol { col: usize, factor: GaussRat },
    /// row[dst] += factor * row[src]
    AddRowMultiple { dst: usize, src: usize, factor: Poly },
    /// col[dst] += factor * col[src]
    AddColMultiple { dst: usize, src: usize, factor: Poly },
}

/// Outcome of a diagonalization: `s * input * t = d`, with the inverses
/// of the accumulated factors and the constant determinants tracked
/// alongside.
#[derive(Debug, Clone)]
pub struct SmithResult {
    pub s: MatPoly,
    pub d: MatPoly,
    pub t: MatPoly,
    pub s_inv: MatPoly,
    pub t_inv: MatPoly,
    pub det_s: GaussRat,
    pub det_t: GaussRat,
    pub transcript: Vec<ElemOp>,
}

impl SmithResult {
    pub fn diagonal(&self) -> Vec<Poly> {
        (0..self.d.rows()).map(|k| self.d[(k, k)].clone()).collect()
    }
}

/// Reduced diagonal of a rational matrix function: `s Q t = diag(dtilde)`.
#[derive(Debug, Clone)]
pub struct DiagRatForm {
    pub dtilde: Vec<RatFun>,
    pub smith: SmithResult,
}

struct Working {
    m: MatPoly,
    s: MatPoly,
    s_inv: MatPoly,
    t: MatPoly,
    t_inv: MatPoly,
    det_s: GaussRat,
    det_t: GaussRat,
    transcript: Vec<ElemOp>,
}

impl Working {
    fn new(m: MatPoly) -> Self {
        let n = m.rows();
        Working {
            m,
            s: MatPoly::identity(n),
            s_inv: MatPoly::identity(n),
            t: MatPoly::identity(n),
            t_inv: MatPoly::identity(n),
            det_s: GaussRat::one(),
            det_t: GaussRat::one(),
            transcript: Vec::new(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.m.swap_rows(a, b);
        self.s.swap_rows(a, b);
        self.s_inv.swap_cols(a, b);
        self.det_s = -self.det_s.clone();
        self.transcript.push(ElemOp::SwapRows { a, b });
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.m.swap_cols(a, b);
        self.t.swap_cols(a, b);
        self.t_inv.swap_rows(a, b);
        self.det_t = -self.det_t.clone();
        self.transcript.push(ElemOp::SwapCols { a, b });
    }

    fn scale_row(&mut self, row: usize, factor: GaussRat) {
        if factor.is_one() {
            return;
        }
        let c = Poly::constant(factor.clone());
        let c_inv = Poly::constant(factor.inv().expect("scale factor is nonzero"));
        self.m.scale_row(row, &c);
        self.s.scale_row(row, &c);
        self.s_inv.scale_col(row, &c_inv);
        self.det_s = self.det_s.clone() * factor.clone();
        self.transcript.push(ElemOp::ScaleRow { row, factor });
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: Poly) {
        if factor.is_zero() {
            return;
        }
        self.m.add_row_multiple(dst, src, &factor);
        self.s.add_row_multiple(dst, src, &factor);
        // (E S)^-1 tracks S^-1 E^-1: subtract on the transposed column pair
        self.s_inv.add_col_multiple(src, dst, &-factor.clone());
        self.transcript.push(ElemOp::AddRowMultiple { dst, src, factor });
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: Poly) {
        if factor.is_zero() {
            return;
        }
        self.m.add_col_multiple(dst, src, &factor);
        self.t.add_col_multiple(dst, src, &factor);
        self.t_inv.add_row_multiple(src, dst, &-factor.clone());
        self.transcript.push(ElemOp::AddColMultiple { dst, src, factor });
    }
}

/// Orders monic polynomials by degree, then by coefficients from the top
/// down.  Purely a normalization device.
fn poly_order(a: &Poly, b: &Poly) -> Ordering {
    let da = a.degree().expect("diagonal entries are nonzero");
    let db = b.degree().expect("diagonal entries are nonzero");
    da.cmp(&db).then_with(|| {
        for k in (0..=da).rev() {
            let ord = a.coeff(k).cmp(&b.coeff(k));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    })
}

/// Diagonalizes a nonsingular polynomial matrix.  The returned identity
/// `s * input * t = d` and the factor inverses are verified exactly
/// before returning.  Each diagonal entry divides the next, so the
/// (monic, sorted) diagonal is determined by the input's equivalence
/// class alone, not by the elimination path.
pub fn smith_diagonalize(input: &MatPoly) -> Result<SmithResult> {
    let n = input.require_square()?;
    if input.determinant()?.is_zero() {
        return Err(Error::SingularInput);
    }
    let mut w = Working::new(input.clone());

    for k in 0..n {
        'chain: loop {
            'pivot: loop {
                // smallest-degree nonzero entry of the trailing submatrix,
                // ties resolved in row-major order
                let mut best: Option<(usize, usize, usize)> = None;
                for i in k..n {
                    for j in k..n {
                        if let Some(deg) = w.m[(i, j)].degree() {
                            if best.map(|(_, _, d)| deg < d).unwrap_or(true) {
                                best = Some((i, j, deg));
                            }
                        }
                    }
                }
                let (pi, pj, _) = best.ok_or_else(|| {
                    Error::VerificationFailed(
                        "nonsingular matrix lost rank during elimination".into(),
                    )
                })?;
                w.swap_rows(k, pi);
                w.swap_cols(k, pj);

                // clear the column below the pivot by exact-or-remainder division
                let mut remainder_left = false;
                for i in k + 1..n {
                    if w.m[(i, k)].is_zero() {
                        continue;
                    }
                    let (q, r) = w.m[(i, k)].divrem(&w.m[(k, k)])?;
                    w.add_row_multiple(i, k, -q);
                    if !r.is_zero() {
                        remainder_left = true;
                    }
                }
                if remainder_left {
                    continue 'pivot;
                }
                // column clear; now the row to the right
                for j in k + 1..n {
                    if w.m[(k, j)].is_zero() {
                        continue;
                    }
                    let (q, r) = w.m[(k, j)].divrem(&w.m[(k, k)])?;
                    w.add_col_multiple(j, k, -q);
                    if !r.is_zero() {
                        remainder_left = true;
                    }
                }
                if !remainder_left {
                    break 'pivot;
                }
            }
            // the pivot must also divide the trailing block, or the
            // diagonal depends on the elimination path instead of only on
            // the input's equivalence class; pull an offending row up and
            // re-eliminate (the pivot degree strictly drops each round)
            let pivot = w.m[(k, k)].clone();
            let mut offender = None;
            'sweep: for i in k + 1..n {
                for j in k + 1..n {
                    if !w.m[(i, j)].divrem(&pivot)?.1.is_zero() {
                        offender = Some(i);
                        break 'sweep;
                    }
                }
            }
            match offender {
                Some(i) => w.add_row_multiple(k, i, Poly::one()),
                None => break 'chain,
            }
        }
    }

    // monic normalization of the diagonal
    for k in 0..n {
        let lead = w.m[(k, k)].leading().expect("diagonal entry is nonzero").clone();
        w.scale_row(k, lead.inv()?);
    }
    // sort the diagonal by (degree, coefficient order)
    for a in 0..n {
        let mut min = a;
        for b in a + 1..n {
            if poly_order(&w.m[(b, b)], &w.m[(min, min)]) == Ordering::Less {
                min = b;
            }
        }
        if min != a {
            w.swap_rows(a, min);
            w.swap_cols(a, min);
        }
    }

    let result = SmithResult {
        s: w.s,
        d: w.m,
        t: w.t,
        s_inv: w.s_inv,
        t_inv: w.t_inv,
        det_s: w.det_s,
        det_t: w.det_t,
        transcript: w.transcript,
    };
    verify_smith(input, &result)?;
    Ok(result)
}

fn verify_smith(input: &MatPoly, r: &SmithResult) -> Result<()> {
    let n = input.rows();
    let product = r.s.clone() * input.clone() * r.t.clone();
    if product != r.d {
        return Err(Error::VerificationFailed("S * L * T does not equal D".into()));
    }
    if r.s.clone() * r.s_inv.clone() != MatPoly::identity(n) {
        return Err(Error::VerificationFailed("S inverse replay is wrong".into()));
    }
    if r.t.clone() * r.t_inv.clone() != MatPoly::identity(n) {
        return Err(Error::VerificationFailed("T inverse replay is wrong".into()));
    }
    for k in 0..n {
        if !r.d[(k, k)].is_monic() {
            return Err(Error::VerificationFailed("diagonal entry is not monic".into()));
        }
    }
    if r.det_s.is_zero() || r.det_t.is_zero() {
        return Err(Error::VerificationFailed("factor determinant vanished".into()));
    }
    Ok(())
}

/// Checks that a polynomial matrix has constant nonzero determinant and
/// returns that constant.
pub fn verify_unimodular(m: &MatPoly) -> Result<GaussRat> {
    m.require_square()?;
    let det = m.determinant()?;
    if det.is_zero() {
        return Err(Error::SingularInput);
    }
    match det.degree() {
        Some(0) => Ok(det.coeff(0)),
        Some(degree) => Err(Error::NotUnimodular { degree }),
        None => unreachable!("zero determinant handled above"),
    }
}

/// Applies a transcript to a fresh copy of `input`, reproducing the
/// recorded elimination.
pub fn replay_transcript(input: &MatPoly, transcript: &[ElemOp]) -> MatPoly {
    let mut m = input.clone();
    for op in transcript {
        match op {
            ElemOp::SwapRows { a, b } => m.swap_rows(*a, *b),
            ElemOp::SwapCols { a, b } => m.swap_cols(*a, *b),
            ElemOp::ScaleRow { row, factor } => {
                m.scale_row(*row, &Poly::constant(factor.clone()))
            }
            ElemOp::ScaleCol { col, factor } => {
                m.scale_col(*col, &Poly::constant(factor.clone()))
            }
            ElemOp::AddRowMultiple { dst, src, factor } => m.add_row_multiple(*dst, *src, factor),
            ElemOp::AddColMultiple { dst, src, factor } => m.add_col_multiple(*dst, *src, factor),
        }
    }
    m
}

/// Diagonalizes the numerator of a rational matrix function and divides
/// through by the shared denominator: `s Q t = diag(dtilde)` with each
/// `dtilde_i` reduced.
pub fn diag_rational(q: &RatMatFun) -> Result<DiagRatForm> {
    let smith = smith_diagonalize(q.num())?;
    let dtilde = smith
        .diagonal()
        .into_iter()
        .map(|d| RatFun::new(d, q.den().clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagRatForm { dtilde, smith })
}
