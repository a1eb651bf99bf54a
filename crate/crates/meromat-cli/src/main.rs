//! Command-line front end.
//!
//! Reads a JSON input document, runs one analysis, and prints a
//! [`report::ReportDoc`] on stdout (pretty by default, canonical
//! single-line with `--json`).  Diagnostics go to stderr.  Exit codes:
//! 0 success, 1 malformed input, 2 mathematical domain error
//! (singular function, unsupported structure, ...), 3 internal
//! verification failure.

use clap::{Parser, Subcommand};
use meromat_cli::{input, report};
use meromat::{
    build_realization, diag_rational, kappa_report, residue_consistency, solve_system, Analyzer,
    Contour, CriticalPoint, ErrorClass, GaussRat, Result,
};
use report::{LogresDoc, PointDoc, RealizationDoc, ReportDoc, SmithDoc, SolveDoc};

#[derive(Parser)]
#[command(
    name = "meromat",
    version,
    about = "Exact zero/pole analysis of rational matrix functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit canonical single-line JSON instead of pretty-printing.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Zero/pole structure at every critical point, including infinity
    Analyze {
        /// Path to a JSON input document
        input: String,
        /// Restrict to one point: an exact scalar like 0, 3/2, 1+2i, or inf
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Diagonalize the numerator by unimodular row/column operations
    Smith {
        input: String,
        /// Include the replayable elementary-operation transcript
        #[arg(long)]
        emit_transcript: bool,
    },
    /// Count zeros minus poles inside a circle by contour quadrature
    Logres {
        input: String,
        /// Circle center as an exact scalar such as 0 or 1/2+1i
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius: f64,
        /// Nodes for the first quadrature pass (doubled until stable)
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Exponential solutions of a reciprocal differential system
    SolveOde { input: String },
    /// Bounded self-adjoint realization of a symmetric function
    Realize {
        input: String,
        /// Real regular point dividing out the behaviour at infinity
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
}

fn parse_point(spec: &str) -> Result<CriticalPoint> {
    if spec.eq_ignore_ascii_case("inf") {
        return Ok(CriticalPoint::Infinity);
    }
    Ok(CriticalPoint::Finite(spec.parse::<GaussRat>()?))
}

fn run(cmd: Command) -> Result<ReportDoc> {
    match cmd {
        Command::Analyze { input, point } => {
            let loaded = input::load(&input)?;
            let digest = loaded.digest.clone();
            let q = loaded.matrix()?;
            let analyzer = Analyzer::new(&q)?;
            let reports = match point {
                Some(spec) => vec![analyzer.structure_at(&parse_point(&spec)?)?],
                None => {
                    let mut points = analyzer.critical_points();
                    points.push(CriticalPoint::Infinity);
                    points
                        .iter()
                        .map(|p| analyzer.structure_at(p))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let mut doc = ReportDoc::new("analyze", &digest, q.size());
            doc.points = Some(reports.iter().map(PointDoc::from_report).collect());
            Ok(doc)
        }
        Command::Smith { input, emit_transcript } => {
            let loaded = input::load(&input)?;
            let digest = loaded.digest.clone();
            let q = loaded.matrix()?;
            let form = diag_rational(&q)?;
            let mut doc = ReportDoc::new("smith", &digest, q.size());
            doc.smith = Some(SmithDoc::from_form(&q, &form, emit_transcript));
            Ok(doc)
        }
        Command::Logres { input, center, radius, nodes } => {
            let loaded = input::load(&input)?;
            let digest = loaded.digest.clone();
            let q = loaded.matrix()?;
            let c = center.parse::<GaussRat>()?.to_c64();
            let contour = match nodes {
                Some(n) => Contour::with_nodes(c, radius, n),
                None => Contour::new(c, radius),
            };
            let check = residue_consistency(&q, &contour)?;
            let mut doc = ReportDoc::new("logres", &digest, q.size());
            doc.logres = Some(LogresDoc::from_consistency(c, radius, &check));
            Ok(doc)
        }
        Command::SolveOde { input } => {
            let loaded = input::load(&input)?;
            let digest = loaded.digest.clone();
            let sys = loaded.ode()?;
            let solve = solve_system(&sys)?;
            let mut doc = ReportDoc::new("solve-ode", &digest, sys.size());
            doc.ode = Some(SolveDoc::from_report(sys.order(), &solve));
            Ok(doc)
        }
        Command::Realize { input, beta } => {
            let loaded = input::load(&input)?;
            let digest = loaded.digest.clone();
            let q = loaded.matrix()?;
            let hint = beta.map(|s| s.parse::<GaussRat>()).transpose()?;
            let realization = build_realization(&q, hint.as_ref())?;
            let kappa = kappa_report(&q, hint.as_ref())?;
            let mut doc = ReportDoc::new("realize", &digest, q.size());
            doc.realization = Some(RealizationDoc::from_parts(&realization, &kappa));
            Ok(doc)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if ok { 0 } else { 1 });
        }
    };
    match run(cli.command) {
        Ok(doc) => {
            let text = if cli.json {
                doc.to_canonical_json()
            } else {
                doc.to_pretty_json()
            };
            emit(&text);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Domain => 2,
                ErrorClass::Verification => 3,
            });
        }
    }
}

/// Prints the report, treating a closed pipe (`meromat ... | head`) as a
/// normal way for the reader to stop early rather than an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}").and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
