//! Exact symbolic-numeric analysis of rational matrix functions.
//!
//! The crate computes, over the exact field Q(i):
//!
//! * unimodular diagonalizations of polynomial matrices with replayable
//!   transcripts of the elementary operations,
//! * the complete local zero/pole structure of a rational matrix
//!   function at any point (including infinity): partial multiplicities,
//!   root functions, and pole cancellation functions,
//! * logarithmic-residue contour integrals as a floating-point
//!   cross-check of the exact multiplicity counts,
//! * eigensolutions of the nonlinear reciprocal differential systems
//!   whose symbol is such a matrix function, and
//! * finite-dimensional self-adjoint realizations (in an indefinite
//!   inner product) of symmetric rational functions with simple poles.
//!
//! Exact data stays exact: floating point appears only in contour
//! quadrature, numeric root locations, and residual norms, always next
//! to an explicit tolerance.

pub mod error;
pub mod logres;
pub mod mat;
pub mod odesys;
pub mod parser;
pub mod poly;
pub mod ratfun;
pub mod ratmat;
pub mod realization;
pub mod roots;
pub mod scalar;
pub mod smith;
pub mod structure;

pub use error::{Error, ErrorClass, Result};
pub use logres::{log_residue, residue_consistency, Contour, LogResidue, ResidueConsistency};
pub use mat::Mat;
pub use odesys::{
    combine_eigenvectors, demonstrate_nonlinearity, residual_check, solve_system, Exclusion,
    ExclusionReason, NonlinearityDemo, OdeSolution, OdeSystem, SolveReport,
};
pub use parser::{parse_entry, Ast, EntryExpr};
pub use poly::{CPoly, DensePoly, Poly};
pub use ratfun::RatFun;
pub use ratmat::{MatPoly, RatMatFun};
pub use realization::{
    build_realization, factor_at_regular_point, kappa_report, limit_at_infinity, matrix_inertia,
    residue_matrix, sign_limit, signed_rank_factorization, verify_realization, ChainGroup,
    Factorization, KappaReport, PoleBlock, Realization, SignedTerm,
};
pub use roots::{roots_with_multiplicity, RootSet};
pub use scalar::{GaussRat, Rat, Scalar, C64};
pub use smith::{
    diag_rational, replay_transcript, smith_diagonalize, verify_unimodular, DiagRatForm, ElemOp,
    SmithResult,
};
pub use structure::{
    numerator_root_equivalence, structure_at_infinity, taylor_jordan_vectors,
    verify_order, verify_pole_cancellation, zero_pole_structure, Analyzer, CriticalPoint,
    OrderReport, PoleCancellationReport, StructureReport,
};

/// Constant exact matrix.
pub type MatConst = Mat<GaussRat>;
/// Numeric matrix used on contour and residual paths.
pub type MatC64 = Mat<C64>;
