//! Machine-readable report documents.
//!
//! Every subcommand emits one `ReportDoc` on stdout.  Exact values are
//! rendered as canonical strings (rationals as `p/q`, Gaussian
//! rationals as `a/b+c/d*i`, polynomials and rational functions in the
//! entry-expression grammar), floating-point values stay numbers and
//! always travel next to an explicit tolerance.  Serialization is
//! canonical: fixed key order, no maps, so a re-loaded report
//! re-serializes to the identical byte string.

use meromat::logres::{CONVERGENCE_TOL, SINGULARITY_CLEARANCE};
use meromat::structure::NUMERIC_POINT_TOL;
use meromat::{
    CriticalPoint, DiagRatForm, ElemOp, Exclusion, ExclusionReason, KappaReport, MatPoly,
    OdeSolution, RatMatFun, Realization, ResidueConsistency, SolveReport, StructureReport, C64,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub version: String,
    pub command: String,
    pub input_digest: String,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<PointDoc>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub smith: Option<SmithDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub logres: Option<LogresDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ode: Option<SolveDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub realization: Option<RealizationDoc>,
}

impl ReportDoc {
    pub fn new(command: &str, input_digest: &str, size: usize) -> Self {
        ReportDoc {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input_digest: input_digest.to_string(),
            size,
            points: None,
            smith: None,
            logres: None,
            ode: None,
            realization: None,
        }
    }

    /// Canonical single-line form; re-serializing a parsed report
    /// reproduces it byte for byte.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Local structure at one point.  `exact` distinguishes symbolic
/// locations from numerically located ones, which carry the location
/// tolerance they were resolved under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub point: String,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
    pub kind: String,
    pub zero_partial_multiplicities: Vec<usize>,
    pub pole_partial_multiplicities: Vec<usize>,
    pub root_functions: Vec<Vec<String>>,
    pub pole_cancellation_functions: Vec<Vec<String>>,
    pub pole_functions: Vec<Vec<String>>,
    pub inverse_pole_cancellation_functions: Vec<Vec<String>>,
}

impl PointDoc {
    pub fn from_report(report: &StructureReport) -> Self {
        let kind = match (report.omega_zero.is_empty(), report.omega_pole.is_empty()) {
            (false, false) => "both",
            (false, true) => "zero",
            (true, false) => "pole",
            (true, true) => "regular",
        };
        PointDoc {
            point: report.point.to_string(),
            exact: !matches!(report.point, CriticalPoint::Numeric(_)),
            tolerance: matches!(report.point, CriticalPoint::Numeric(_))
                .then_some(NUMERIC_POINT_TOL),
            kind: kind.to_string(),
            zero_partial_multiplicities: report.zero_partial_multiplicities.clone(),
            pole_partial_multiplicities: report.pole_partial_multiplicities.clone(),
            root_functions: report
                .root_functions
                .iter()
                .map(|col| col.iter().map(|p| p.to_string()).collect())
                .collect(),
            pole_cancellation_functions: report
                .pole_cancellation_functions
                .iter()
                .map(|col| col.iter().map(|f| f.to_string()).collect())
                .collect(),
            pole_functions: report
                .pole_functions
                .iter()
                .map(|col| col.iter().map(|p| p.to_string()).collect())
                .collect(),
            inverse_pole_cancellation_functions: report
                .inverse_pole_cancellation_functions
                .iter()
                .map(|col| col.iter().map(|f| f.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmithDoc {
    /// Common denominator of the canonical form; the factored matrix is
    /// its numerator.
    pub q: String,
    pub s: Vec<Vec<String>>,
    pub d: Vec<Vec<String>>,
    pub t: Vec<Vec<String>>,
    pub det_s: String,
    pub det_t: String,
    pub dtilde: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transcript: Option<Vec<ElemOp>>,
}

fn poly_grid(m: &MatPoly) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|p| p.to_string()).collect())
        .collect()
}

impl SmithDoc {
    pub fn from_form(q: &RatMatFun, form: &DiagRatForm, emit_transcript: bool) -> Self {
        SmithDoc {
            q: q.den().to_string(),
            s: poly_grid(&form.smith.s),
            d: poly_grid(&form.smith.d),
            t: poly_grid(&form.smith.t),
            det_s: form.smith.det_s.to_string(),
            det_t: form.smith.det_t.to_string(),
            dtilde: form.dtilde.iter().map(|f| f.to_string()).collect(),
            transcript: emit_transcript.then(|| form.smith.transcript.clone()),
        }
    }
}

fn c64_string(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogresDoc {
    pub center: String,
    pub radius: f64,
    pub nodes_used: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub nearest: i64,
    pub gap: f64,
    pub clearance: f64,
    pub clearance_floor: f64,
    pub convergence_tolerance: f64,
    pub expected: i64,
    pub agrees: bool,
}

impl LogresDoc {
    pub fn from_consistency(center: C64, radius: f64, check: &ResidueConsistency) -> Self {
        LogresDoc {
            center: c64_string(center),
            radius,
            nodes_used: check.computed.nodes_used,
            value_re: check.computed.value.re,
            value_im: check.computed.value.im,
            nearest: check.computed.nearest,
            gap: check.computed.gap,
            clearance: check.computed.clearance,
            clearance_floor: SINGULARITY_CLEARANCE,
            convergence_tolerance: CONVERGENCE_TOL,
            expected: check.expected,
            agrees: check.agrees,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub kind: String,
    pub exponent: String,
    pub eigenvector: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amplitudes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagonal_index: Option<usize>,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionDoc {
    pub location: String,
    pub diagonal_index: usize,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub component: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvector: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDoc {
    pub order: usize,
    pub symbol: Vec<Vec<String>>,
    pub solutions: Vec<SolutionDoc>,
    pub excluded: Vec<ExclusionDoc>,
}

impl SolveDoc {
    pub fn from_report(order: usize, report: &SolveReport) -> Self {
        let solutions = report
            .solutions
            .iter()
            .map(|sol| match sol {
                OdeSolution::Exact { alpha, eigenvector, amplitudes, diagonal_index, multiplicity } => {
                    SolutionDoc {
                        kind: "exact".to_string(),
                        exponent: alpha.to_string(),
                        eigenvector: eigenvector.iter().map(|c| c.to_string()).collect(),
                        amplitudes: Some(amplitudes.iter().map(|c| c.to_string()).collect()),
                        diagonal_index: *diagonal_index,
                        multiplicity: *multiplicity,
                        residual: None,
                        residual_tolerance: None,
                    }
                }
                OdeSolution::Numeric { alpha, eigenvector, diagonal_index, multiplicity, residual } => {
                    SolutionDoc {
                        kind: "numeric".to_string(),
                        exponent: c64_string(*alpha),
                        eigenvector: eigenvector.iter().map(|c| c64_string(*c)).collect(),
                        amplitudes: None,
                        diagonal_index: Some(*diagonal_index),
                        multiplicity: *multiplicity,
                        residual: Some(*residual),
                        residual_tolerance: Some(meromat::odesys::NUMERIC_ZERO_TOL),
                    }
                }
            })
            .collect();
        let excluded = report
            .excluded
            .iter()
            .map(|Exclusion { location, diagonal_index, reason, eigenvector }| ExclusionDoc {
                location: location.to_string(),
                diagonal_index: *diagonal_index,
                reason: match reason {
                    ExclusionReason::ZeroExponent => "zero-exponent".to_string(),
                    ExclusionReason::ZeroComponent { .. } => "zero-component".to_string(),
                },
                component: match reason {
                    ExclusionReason::ZeroComponent { index } => Some(*index),
                    ExclusionReason::ZeroExponent => None,
                },
                eigenvector: eigenvector
                    .as_ref()
                    .map(|v| v.iter().map(|c| c.to_string()).collect()),
            })
            .collect();
        let sym = report.symbol.entries();
        SolveDoc {
            order,
            symbol: (0..sym.rows())
                .map(|i| sym.row(i).iter().map(|f| f.to_string()).collect())
                .collect(),
            solutions,
            excluded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub epsilon: i8,
    pub gamma: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub location: String,
    pub residue: Vec<Vec<String>>,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaDoc {
    pub kappa_beta: usize,
    pub kappa_infinity: usize,
    pub kappa_delta: i64,
    pub pole_degree_at_beta: usize,
    pub pole_degree_at_infinity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDoc {
    pub beta: String,
    pub pole_order_at_infinity: usize,
    pub s_limit: Vec<Vec<String>>,
    pub blocks: Vec<BlockDoc>,
    pub dim: usize,
    pub negative_squares: usize,
    pub kappa: KappaDoc,
}

impl RealizationDoc {
    pub fn from_parts(realization: &Realization, kappa: &KappaReport) -> Self {
        let f = &realization.factorization;
        let n = f.qtilde.size();
        RealizationDoc {
            beta: f.beta.to_string(),
            pole_order_at_infinity: f.m,
            s_limit: (0..n)
                .map(|i| f.s_limit.row(i).iter().map(|c| c.to_string()).collect())
                .collect(),
            blocks: realization
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    location: b.location.to_string(),
                    residue: (0..n)
                        .map(|i| b.residue.row(i).iter().map(|c| c.to_string()).collect())
                        .collect(),
                    terms: b
                        .terms
                        .iter()
                        .map(|t| TermDoc {
                            epsilon: t.epsilon,
                            gamma: t.gamma.iter().map(|c| c.to_string()).collect(),
                        })
                        .collect(),
                })
                .collect(),
            dim: realization.dim,
            negative_squares: realization.negative_squares(),
            kappa: KappaDoc {
                kappa_beta: kappa.kappa_beta,
                kappa_infinity: kappa.kappa_infinity,
                kappa_delta: kappa.kappa_delta,
                pole_degree_at_beta: kappa.pole_degree_at_beta(),
                pole_degree_at_infinity: kappa.pole_degree_at_infinity(),
            },
        }
    }
}
