//! Acceptance gate.  Each test covers one numbered criterion and prints
//! a single `[acceptance] criterion N: pass` line once every assertion
//! in it has held (run with `--nocapture` to see the lines).  Exact
//! claims are asserted with `==`; quadrature claims carry their stated
//! tolerance.

use meromat::{
    build_realization, diag_rational, factor_at_regular_point, kappa_report, log_residue,
    residual_check, residue_consistency, sign_limit, solve_system, structure_at_infinity,
    taylor_jordan_vectors, verify_order, verify_pole_cancellation, verify_realization,
    zero_pole_structure, Analyzer, Contour, CriticalPoint, Error, GaussRat, Mat, OdeSolution,
    OdeSystem, Poly, RatFun, RatMatFun, C64,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gi(n: i64) -> GaussRat {
    GaussRat::from_int(n)
}

fn gq(p: i64, q: i64) -> GaussRat {
    GaussRat::from_frac(p, q)
}

fn pass(n: usize) {
    println!("[acceptance] criterion {n}: pass");
}

/// Symmetric 2x2 with a quadruple zero at -1 hiding behind a double
/// pole at 0.
fn symmetric_quartic() -> RatMatFun {
    RatMatFun::from_exprs(&[
        &["(z^2+4*z+5)/z^2", "-5/z^2"],
        &["-5/z^2", "25/(4*z^2)*(z^2+1)"],
    ])
    .unwrap()
}

/// 3x3 with a simple zero and a simple pole meeting at the origin.
fn mixed_zero_pole() -> RatMatFun {
    RatMatFun::from_exprs(&[&["0", "1", "0"], &["1/z", "0", "1"], &["0", "0", "z^2-z"]]).unwrap()
}

/// Polynomial 3x3 with quadratic growth and a non-diagonal chain
/// structure at its regular-point factorization.
fn quadratic_growth() -> RatMatFun {
    RatMatFun::from_exprs(&[&["0", "z", "0"], &["z", "z^2", "0"], &["0", "0", "z"]]).unwrap()
}

/// Symmetric 2x2 with one finite pole and one pole at infinity.
fn hamburger_moment() -> RatMatFun {
    RatMatFun::from_exprs(&[&["1/z", "z-1"], &["z-1", "0"]]).unwrap()
}

/// Second-order reciprocal system with one plain and one repeated
/// exponent.
fn reciprocal_system() -> OdeSystem {
    let int_mat = |rows: &[&[i64]]| {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&n| gi(n)).collect()).collect()).unwrap()
    };
    OdeSystem::new(vec![
        int_mat(&[&[0, 0], &[1, 1]]),
        int_mat(&[&[1, 0], &[4, 4]]),
        int_mat(&[&[0, 1], &[4, 4]]),
    ])
    .unwrap()
}

/// True when `a = c * b` for a constant nonzero `c`.
fn unit_multiple(a: &RatFun, b: &RatFun) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    (a.clone() * b.inv().unwrap()).is_constant()
}

/// Multiset equality of diagonal entries up to constant units.
fn diagonal_matches(got: &[RatFun], want: &[RatFun]) -> bool {
    if got.len() != want.len() {
        return false;
    }
    let mut used = vec![false; want.len()];
    'outer: for g in got {
        for (k, w) in want.iter().enumerate() {
            if !used[k] && unit_multiple(g, w) {
                used[k] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[test]
fn criterion_1_quartic_structure_and_root_function() {
    let q = symmetric_quartic();

    let at_minus_one = zero_pole_structure(&q, &CriticalPoint::finite_int(-1)).unwrap();
    assert_eq!(at_minus_one.zero_partial_multiplicities, [4]);
    assert!(at_minus_one.omega_pole.is_empty());

    let at_zero = zero_pole_structure(&q, &CriticalPoint::finite_int(0)).unwrap();
    assert_eq!(at_zero.pole_partial_multiplicities, [2, 2]);
    assert!(at_zero.omega_zero.is_empty());

    // Diagonal matches diag(5/z^2, 5(z+1)^4/(4 z^2)) up to constant
    // units and reordering.
    let form = diag_rational(&q).unwrap();
    let want = [
        RatFun::parse("5/z^2").unwrap(),
        RatFun::parse("(5*(z+1)^4)/(4*z^2)").unwrap(),
    ];
    assert!(diagonal_matches(&form.dtilde, &want), "diagonal was {:?}", form.dtilde);

    // The second transformation column is a root function of exact
    // order 4 at -1.
    let t2 = vec![Poly::one(), Poly::parse("(z^2+4*z+5)/5").unwrap()];
    let order = verify_order(&q, &t2, &gi(-1)).unwrap();
    assert_eq!(order.order, 4);
    assert!(!order.negative_valuation);

    // Taylor data of the emitted root function, scaled onto the same
    // normalization: (1, 2/5), (0, 2/5), (0, 1/5) exactly.
    let phi = &at_minus_one.root_functions[0];
    let lead = phi[0].eval(&gi(-1));
    assert!(!lead.is_zero());
    let scale = Poly::new(vec![lead.inv().unwrap()]);
    let scaled: Vec<Poly> = phi.iter().map(|p| p.clone() * scale.clone()).collect();
    let coeffs = taylor_jordan_vectors(&scaled, &gi(-1), 3);
    assert_eq!(
        coeffs,
        [
            [gi(1), gq(2, 5)],
            [gi(0), gq(2, 5)],
            [gi(0), gq(1, 5)],
        ]
    );

    pass(1);
}

#[test]
fn criterion_2_coincident_zero_pole_and_winding_counts() {
    let q = mixed_zero_pole();

    let at_zero = zero_pole_structure(&q, &CriticalPoint::finite_int(0)).unwrap();
    assert_eq!(at_zero.zero_partial_multiplicities, [1]);
    assert_eq!(at_zero.pole_partial_multiplicities, [1]);

    let at_one = zero_pole_structure(&q, &CriticalPoint::finite_int(1)).unwrap();
    assert_eq!(at_one.zero_partial_multiplicities, [1]);
    assert!(at_one.omega_pole.is_empty());

    let around_one = log_residue(&q, &Contour::new(C64::new(1.0, 0.0), 0.5)).unwrap();
    assert!((around_one.value - C64::new(1.0, 0.0)).norm() < 1e-8);

    let around_zero = log_residue(&q, &Contour::new(C64::new(0.0, 0.0), 0.5)).unwrap();
    assert!(around_zero.value.norm() < 1e-8);

    assert_eq!(q.determinant().unwrap(), RatFun::parse("1-z").unwrap());

    pass(2);
}

#[test]
fn criterion_3_reciprocal_system_solutions() {
    let sys = reciprocal_system();
    let report = solve_system(&sys).unwrap();
    assert_eq!(report.solutions.len(), 2);

    let mut seen: Vec<(GaussRat, Vec<GaussRat>)> = Vec::new();
    for sol in &report.solutions {
        let OdeSolution::Exact { alpha, amplitudes, .. } = sol else {
            panic!("solutions must be exact, got {sol:?}");
        };
        seen.push((alpha.clone(), amplitudes.clone()));
        // Substituting back leaves no residual at all.
        let residuals = residual_check(&sys, sol, &[0.25, 1.0, 2.0]).unwrap();
        assert!(residuals.iter().all(|r| *r == 0.0), "residuals {residuals:?}");
    }
    assert!(seen.contains(&(gi(1), vec![gi(1), gi(-1)])));
    assert!(seen.contains(&(gi(-2), vec![gi(1), gq(1, 2)])));

    // The first transformation column is not a root function at either
    // exponent: its diagonal entry never vanishes.
    let t1 = diag_rational(&report.symbol).unwrap().smith.t.col(0);
    for alpha in [gi(1), gi(-2)] {
        let check = verify_order(&report.symbol, &t1, &alpha).unwrap();
        assert_eq!(check.order, 0);
    }

    pass(3);
}

#[test]
fn criterion_4_negative_square_counts_and_chain_rejection() {
    let l = quadratic_growth();

    // Dividing by (z - 1)^2 concentrates a triple of order-2 pole
    // chains at the regular point.
    let f = factor_at_regular_point(&l, None).unwrap();
    assert_eq!(f.beta, gi(1));
    assert_eq!(f.m, 2);
    let at_beta = zero_pole_structure(&f.qtilde, &CriticalPoint::finite_int(1)).unwrap();
    assert_eq!(at_beta.pole_partial_multiplicities, [2, 2, 2]);
    assert_eq!(at_beta.total_pole_multiplicity(), 6);
    assert_eq!(at_beta.pole_cancellation_functions.len(), 3);
    for psi in &at_beta.pole_cancellation_functions {
        let report = verify_pole_cancellation(&f.qtilde, psi, &gi(1)).unwrap();
        assert_eq!(report.order, 2);
        assert!(report.is_cancellation);
    }

    let at_infinity = structure_at_infinity(&l).unwrap();
    assert_eq!(at_infinity.total_pole_multiplicity(), 3);

    let kappa = kappa_report(&l, None).unwrap();
    assert_eq!(kappa.pole_degree_at_beta(), 6);
    assert_eq!(kappa.kappa_beta, 3);
    assert_eq!(kappa.pole_degree_at_infinity(), 3);
    assert_eq!(kappa.kappa_infinity, 1);
    assert_eq!(kappa.kappa_delta, 2);

    // Chains of length two cannot be realized by a diagonal operator.
    let err = build_realization(&l, None);
    assert!(
        matches!(err, Err(Error::UnsupportedJordanStructure { .. })),
        "expected unsupported structure, got {err:?}"
    );

    pass(4);
}

#[test]
fn criterion_5_selfadjoint_realization() {
    let q = hamburger_moment();

    let f = factor_at_regular_point(&q, Some(&gi(-1))).unwrap();
    assert_eq!(f.m, 1);
    let s_expected =
        Mat::from_rows(vec![vec![gi(0), gi(1)], vec![gi(1), gi(0)]]).unwrap();
    assert_eq!(f.s_limit, s_expected);

    let r = build_realization(&q, Some(&gi(-1))).unwrap();
    assert_eq!(r.dim, 3);

    let mut eigenvalues: Vec<GaussRat> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();
    for block in &r.blocks {
        for term in &block.terms {
            eigenvalues.push(block.location.clone());
            signs.push(term.epsilon);
        }
    }
    eigenvalues.sort();
    signs.sort();
    assert_eq!(eigenvalues, [gi(-1), gi(-1), gi(0)]);
    assert_eq!(signs, [-1, -1, 1]);

    // The reconstruction is verified exactly, and multiplying it back
    // by (z + 1) reproduces the input symbolically.
    verify_realization(&r).unwrap();
    let n = q.size();
    let mut entries = Mat::fill(n, n, RatFun::zero());
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = RatFun::from_poly(Poly::new(vec![f.s_limit[(i, j)].clone()]));
        }
    }
    for block in &r.blocks {
        let den = Poly::new(vec![block.location.clone(), gi(-1)]);
        for term in &block.terms {
            for a in 0..n {
                for b in 0..n {
                    let c = gi(term.epsilon as i64) * term.gamma[a].clone() * term.gamma[b].conj();
                    entries[(a, b)] = entries[(a, b)].clone()
                        + RatFun::new(Poly::new(vec![c]), den.clone()).unwrap();
                }
            }
        }
    }
    let shift = RatFun::parse("z+1").unwrap();
    let scaled = RatMatFun::from_entries(entries.map(|e| e.clone() * shift.clone())).unwrap();
    assert_eq!(scaled, q);

    // The three chain pairings carry the documented values and signs.
    let psi_1 = vec![RatFun::parse("z^2+z").unwrap(), RatFun::zero()];
    let phi_1 = vec![Poly::one(), Poly::parse("z^2-z").unwrap()];
    assert_eq!(sign_limit(&psi_1, &phi_1, &gi(0), 1).unwrap(), (gi(-1), -1));
    assert_eq!(sign_limit(&psi_1, &phi_1, &gi(-1), 1).unwrap(), (gi(1), 1));
    let psi_2 = vec![
        RatFun::parse("(z+1)/(z-1)").unwrap(),
        RatFun::parse("-(z+1)/(z*(z-1)^2)").unwrap(),
    ];
    let phi_2 = vec![Poly::zero(), Poly::one()];
    assert_eq!(sign_limit(&psi_2, &phi_2, &gi(-1), 1).unwrap(), (gq(-1, 4), -1));

    pass(5);
}

fn random_entry(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_range(0..5) == 0 {
        return "0".to_string();
    }
    let c2: i64 = rng.gen_range(-3..=3);
    let c1: i64 = rng.gen_range(-3..=3);
    let c0: i64 = rng.gen_range(-3..=3);
    let dens = ["1", "1", "1", "z", "z-1", "z+1", "z^2"];
    let den = dens[rng.gen_range(0..dens.len())];
    format!("(({c2})*z^2+({c1})*z+({c0}))/({den})")
}

/// Random matrix function with small integer data and a nonzero
/// determinant.
fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> RatMatFun {
    for _ in 0..1000 {
        let grid: Vec<Vec<String>> =
            (0..n).map(|_| (0..n).map(|_| random_entry(rng)).collect()).collect();
        let refs: Vec<Vec<&str>> =
            grid.iter().map(|row| row.iter().map(String::as_str).collect()).collect();
        let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
        let q = RatMatFun::from_exprs(&slices).unwrap();
        if !q.determinant().unwrap().is_zero() {
            return q;
        }
    }
    panic!("failed to generate an invertible instance");
}

#[test]
fn criterion_6_random_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_6001);
    let radii = [0.73, 1.37, 2.41];
    for case in 0..200 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let q = random_instance(&mut rng, n);
        let ctx = |what: &str| format!("case {case} ({n}x{n}) {what}: {q:?}");

        let analyzer = Analyzer::new(&q).unwrap_or_else(|e| panic!("{}: {e}", ctx("analyze")));

        // (a) the transformation identity holds exactly
        let form = analyzer.form();
        let s = RatMatFun::from_mat_poly(form.smith.s.clone()).unwrap();
        let l = RatMatFun::from_mat_poly(q.num().clone()).unwrap();
        let t = RatMatFun::from_mat_poly(form.smith.t.clone()).unwrap();
        let d = RatMatFun::from_mat_poly(form.smith.d.clone()).unwrap();
        assert_eq!(s.mul(&l).unwrap().mul(&t).unwrap(), d, "{}", ctx("S L T != D"));

        // (b) the diagonal product recovers the determinant up to a
        // constant unit
        let prod = form.dtilde.iter().fold(RatFun::parse("1").unwrap(), |acc, f| acc * f.clone());
        let det = q.determinant().unwrap();
        assert!(unit_multiple(&prod, &det), "{}", ctx("diagonal product is not unit*det"));

        // (c) every root function emitted at an exact point verifies at
        // exactly its claimed order (numeric locations have no exact
        // order check)
        for point in analyzer.critical_points() {
            let CriticalPoint::Finite(alpha) = &point else { continue };
            let report = analyzer.structure_at(&point).unwrap();
            for (phi, claimed) in
                report.root_functions.iter().zip(&report.zero_partial_multiplicities)
            {
                let check = verify_order(&q, phi, alpha).unwrap();
                assert_eq!(check.order, *claimed, "{}", ctx("root function order mismatch"));
                assert!(!check.negative_valuation, "{}", ctx("root function hits a pole"));
            }
        }

        // (d) quadrature agrees with the exact count on an admissible
        // contour
        let mut checked = false;
        for radius in radii {
            let contour = Contour::new(C64::new(0.0, 0.0), radius);
            match residue_consistency(&q, &contour) {
                Ok(check) => {
                    let expected = C64::new(check.expected as f64, 0.0);
                    assert!(
                        (check.computed.value - expected).norm() < 1e-6,
                        "{}",
                        ctx("winding integral disagrees with structure count")
                    );
                    assert!(check.agrees, "{}", ctx("consistency flag"));
                    checked = true;
                    break;
                }
                Err(Error::ContourThroughSingularity { .. }) => continue,
                Err(e) => panic!("{}: {e}", ctx("quadrature failed")),
            }
        }
        assert!(checked, "{}", ctx("no admissible contour among the radii"));
    }

    pass(6);
}

#[test]
fn criterion_7_inverse_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_7002);
    for case in 0..50 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let q = random_instance(&mut rng, n);
        let q_inv = q.inverse().unwrap();
        let direct = Analyzer::new(&q).unwrap();
        let inverted = Analyzer::new(&q_inv).unwrap();

        // All exact finite candidates from either side, plus infinity.
        let mut points: Vec<CriticalPoint> = Vec::new();
        for source in [&direct, &inverted] {
            for p in source.critical_points() {
                if matches!(p, CriticalPoint::Finite(_)) && !points.contains(&p) {
                    points.push(p);
                }
            }
        }
        points.push(CriticalPoint::Infinity);

        for point in &points {
            let of_q = direct.structure_at(point).unwrap();
            let of_inv = inverted.structure_at(point).unwrap();
            let sorted = |v: &[usize]| {
                let mut s = v.to_vec();
                s.sort_unstable();
                s
            };
            assert_eq!(
                sorted(&of_inv.zero_partial_multiplicities),
                sorted(&of_q.pole_partial_multiplicities),
                "case {case}: zeros of the inverse at {point} differ from poles of q"
            );
            assert_eq!(
                sorted(&of_inv.pole_partial_multiplicities),
                sorted(&of_q.zero_partial_multiplicities),
                "case {case}: poles of the inverse at {point} differ from zeros of q"
            );
        }
    }

    pass(7);
}

#[test]
fn criterion_8_quadrature_stability() {
    // Golden contours: winding counts around each isolated critical
    // point of the two fully worked fixtures.
    let golden: [(RatMatFun, f64, i64); 4] = [
        (mixed_zero_pole(), 0.0, 0),
        (mixed_zero_pole(), 1.0, 1),
        (symmetric_quartic(), -1.0, 4),
        (symmetric_quartic(), 0.0, -4),
    ];
    for (q, center, expected) in &golden {
        let c = C64::new(*center, 0.0);
        let mut per_radius = Vec::new();
        for radius in [0.4, 0.5, 0.6] {
            // Node doubling has stopped moving the value well below the
            // stated tolerance.
            let coarse = log_residue(q, &Contour::with_nodes(c, radius, 4096)).unwrap();
            let fine = log_residue(q, &Contour::with_nodes(c, radius, 8192)).unwrap();
            assert!(
                (coarse.value - fine.value).norm() < 1e-8,
                "doubling gap at center {center} radius {radius}"
            );
            assert!((coarse.value.re - *expected as f64).abs() < 1e-8);
            per_radius.push(fine.value);
        }
        // The count does not depend on the radius while the enclosed
        // set is unchanged.
        for pair in per_radius.windows(2) {
            assert!(
                (pair[0] - pair[1]).norm() < 1e-8,
                "radius dependence at center {center}"
            );
        }
    }

    pass(8);
}
