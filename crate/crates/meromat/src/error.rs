//! Crate-wide error type.
//!
//! Variants are grouped by the layer that raises them; `Error::class`
//! collapses them into the three exit-relevant categories (bad input,
//! mathematical domain violation, failed internal identity check).

use thiserror::Error;

/// Coarse classification used by the command-line frontend to pick an
/// exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: unparseable expression, non-square grid, bad flag.
    Input,
    /// Structurally valid input outside the mathematical domain of the
    /// requested operation (singular matrix, pole on the contour, ...).
    Domain,
    /// An internal exact identity failed to verify.  Always a bug.
    Verification,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    // ----- exact arithmetic -----
    #[error("polynomial division by zero")]
    DivisionByZeroPoly,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("zero denominator in rational construction")]
    ZeroDenominator,
    #[error("numeric root finding did not converge (residual {residual:e})")]
    RootsNonConvergent { residual: f64 },

    // ----- matrix functions -----
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("ragged entry grid: row {row} has {got} entries, expected {expected}")]
    RaggedGrid { row: usize, got: usize, expected: usize },
    #[error("determinant is identically zero; the function is singular")]
    SingularFunction,
    #[error("evaluation point is a pole of the function")]
    EvalAtPole,

    // ----- diagonalization -----
    #[error("input matrix is singular over the rational function field")]
    SingularInput,
    #[error("matrix is not unimodular: determinant has degree {degree}")]
    NotUnimodular { degree: usize },

    // ----- local structure -----
    #[error("candidate vector vanishes at the point; not an eigenvector")]
    EigvecZero,
    #[error("premise violated: the shared denominator vanishes at the point")]
    PremiseViolated,
    #[error("function multiplied by the candidate has a pole at the point")]
    LimitInfinite,
    #[error("limit vector vanishes; candidate cancels to order higher than claimed")]
    LimitZero,

    // ----- contour integration -----
    #[error("contour passes within {distance:e} of a zero or pole")]
    ContourThroughSingularity { distance: f64 },
    #[error("quadrature did not stabilize: last doubling changed the value by {change:e}")]
    NonConvergent { change: f64 },

    // ----- differential systems -----
    #[error("all coefficient matrices are zero")]
    TrivialSystem,
    #[error("leading coefficient matrix is zero; order of the system is overstated")]
    ZeroLeading,
    #[error("eigenvector component {index} is zero; reciprocal solution undefined")]
    ZeroComponent { index: usize },

    // ----- realizations -----
    #[error("function is not symmetric under transpose with conjugated coefficients")]
    NotSymmetric,
    #[error("no regular real point found in the search range")]
    NoRegularPoint,
    #[error("hint {hint} is not a regular real point")]
    BadHint { hint: String },
    #[error("entry ({row},{col}) grows at infinity; no finite limit")]
    PoleAtInfinity { row: usize, col: usize },
    #[error("pole at {location} has a partial multiplicity above one")]
    NotSimplePole { location: String },
    #[error("residue matrix is not Hermitian")]
    NotHermitian,
    #[error("pole at {location} is not simple; chain-style realizations are not supported")]
    UnsupportedJordanStructure { location: String },
    #[error("pole location is not exactly representable; realization needs exact poles")]
    NumericPole,
    #[error("pole at {location} is not real; only the real-pole symmetry class is supported")]
    NonRealPole { location: String },
    #[error("pivot scale {scale} is not a sum of two rational squares; no exact factorization")]
    IrrationalScale { scale: String },
    #[error("sign limit is zero or non-real; sign undetermined")]
    SignUndetermined,
    #[error("limit does not exist: valuation {valuation} is below the claimed order {order}")]
    LimitUndefined { valuation: i64, order: i64 },

    // ----- parsing and frontend -----
    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse { offset: usize, expected: String, found: String },
    #[error("bad input: {0}")]
    BadInput(String),

    // ----- internal checks -----
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    /// Exit-code category for the CLI: input errors map to 1, domain
    /// errors to 2, verification failures to 3.
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse { .. } | BadInput(_) | NonSquare { .. } | RaggedGrid { .. } => ErrorClass::Input,
            VerificationFailed(_) => ErrorClass::Verification,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
