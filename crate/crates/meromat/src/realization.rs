//! Bounded self-adjoint realizations of symmetric rational matrix
//! functions.
//!
//! A rational matrix function that equals its conjugate transpose on
//! the real axis can be divided by a power of `z - beta`, for a real
//! regular point `beta`, so that the quotient stays bounded at
//! infinity.  When every pole of the quotient is real and simple the
//! quotient splits exactly as a constant Hermitian matrix plus signed
//! rank-one terms `epsilon * gamma gamma^* / (lambda - z)`.  That data
//! is a self-adjoint multiplication operator on a finite-dimensional
//! space with the indefinite inner product determined by the signs, and
//! everything here is computed and verified over the Gaussian
//! rationals.  The module also extracts the chain-sign invariants that
//! measure how many negative squares the pole at `beta` contributes
//! compared with the original behaviour at infinity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::poly::Poly;
use crate::ratfun::RatFun;
use crate::ratmat::RatMatFun;
use crate::roots::{factor_u128, two_squares, MAX_FACTOR_NORM};
use crate::scalar::{GaussRat, Rat};
use crate::structure::{zero_pole_structure, Analyzer, CriticalPoint};

/// A symmetric function divided down to boundedness: `qtilde(z)` is
/// `q(z) / (z - beta)^m` where `m` is the pole order of `q` at
/// infinity and `beta` is a real point at which `q` is holomorphic and
/// invertible.  `s_limit` is the (Hermitian) value of `qtilde` at
/// infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub beta: GaussRat,
    pub m: usize,
    pub qtilde: RatMatFun,
    pub s_limit: Mat<GaussRat>,
}

/// One signed rank-one summand `epsilon * gamma gamma^*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedTerm {
    pub epsilon: i8,
    pub gamma: Vec<GaussRat>,
}

/// All rank-one terms attached to one real simple pole, together with
/// the negated residue they factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleBlock {
    pub location: GaussRat,
    pub residue: Mat<GaussRat>,
    pub terms: Vec<SignedTerm>,
}

/// A verified realization: `qtilde(z) = s_limit + sum over blocks of
/// epsilon_k gamma_k gamma_k^* / (lambda - z)`.  The signs are the
/// signature of the inner product on the `dim`-dimensional state
/// space, so `negative_squares` counts its negative part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub factorization: Factorization,
    pub blocks: Vec<PoleBlock>,
    pub dim: usize,
}

impl Realization {
    pub fn negative_squares(&self) -> usize {
        self.blocks
            .iter()
            .flat_map(|b| b.terms.iter())
            .filter(|t| t.epsilon < 0)
            .count()
    }

    pub fn pole_locations(&self) -> Vec<GaussRat> {
        self.blocks.iter().map(|b| b.location.clone()).collect()
    }
}

/// Pole chains of one multiplicity at one point.  For odd multiplicity
/// `negative` counts the negative eigenvalues of the Gram matrix of
/// the leading chain pairing; even chains need no sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainGroup {
    pub multiplicity: usize,
    pub count: usize,
    pub negative: usize,
    pub gram: Option<Mat<GaussRat>>,
}

/// Negative-square counts contributed by the pole at `beta` of the
/// divided function versus the original behaviour at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaReport {
    pub beta: GaussRat,
    pub kappa_beta: usize,
    pub beta_groups: Vec<ChainGroup>,
    pub kappa_infinity: usize,
    pub infinity_groups: Vec<ChainGroup>,
    pub kappa_delta: i64,
}

impl KappaReport {
    /// Total pole multiplicity of the divided function at `beta`.
    pub fn pole_degree_at_beta(&self) -> usize {
        self.beta_groups.iter().map(|g| g.multiplicity * g.count).sum()
    }

    /// Total pole multiplicity of the original function at infinity.
    pub fn pole_degree_at_infinity(&self) -> usize {
        self.infinity_groups.iter().map(|g| g.multiplicity * g.count).sum()
    }
}

/// Divides a symmetric function by `(z - beta)^m` so the result is
/// bounded at infinity.  With no hint the point is searched over the
/// integers `0, 1, -1, 2, ...`; a hint is validated and rejected with
/// [`Error::BadHint`] if `q` has a pole or a singular value there.
pub fn factor_at_regular_point(q: &RatMatFun, hint: Option<&GaussRat>) -> Result<Factorization> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let det = q.determinant()?;
    if det.is_zero() {
        return Err(Error::NoRegularPoint);
    }
    let regular = |beta: &GaussRat| -> bool {
        beta.is_real()
            && q.pole_order_at(beta) == 0
            && det.eval_exact(beta).map(|v| !v.is_zero()).unwrap_or(false)
    };
    let beta = match hint {
        Some(h) => {
            if !regular(h) {
                return Err(Error::BadHint { hint: h.to_string() });
            }
            h.clone()
        }
        None => {
            // there are at most deg(den) poles and deg(det num) singular
            // points, so this many integer candidates always suffice
            let budget = (q.den().degree().unwrap_or(0) + det.num().degree().unwrap_or(0)) as i64;
            let mut found = None;
            'search: for k in 0..=budget + 1 {
                for cand in [GaussRat::from_int(k), GaussRat::from_int(-k)] {
                    if regular(&cand) {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
            found.ok_or(Error::NoRegularPoint)?
        }
    };
    let m = q.pole_order_at_infinity();
    let shift = Poly::new(vec![-beta.clone(), GaussRat::one()]).pow(m);
    let qtilde = if m == 0 {
        q.clone()
    } else {
        let factor = RatFun::new(Poly::one(), shift.clone())?;
        RatMatFun::from_entries(q.entries().map(|f| f.clone() * factor.clone()))?
    };
    let rebuilt =
        RatMatFun::from_entries(qtilde.entries().map(|f| f.clone() * RatFun::from_poly(shift.clone())))?;
    if rebuilt != *q {
        return Err(Error::VerificationFailed(
            "dividing by the regular-point power is not invertible".into(),
        ));
    }
    let s_limit = limit_at_infinity(&qtilde)?;
    if !s_limit.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    Ok(Factorization { beta, m, qtilde, s_limit })
}

/// Entry-wise value at infinity of a function bounded there.
pub fn limit_at_infinity(q: &RatMatFun) -> Result<Mat<GaussRat>> {
    let n = q.size();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let f = q.entry(i, j);
            let dd = f.den().degree().expect("denominator is nonzero");
            row.push(match f.num().degree() {
                Some(dn) if dn > dd => return Err(Error::PoleAtInfinity { row: i, col: j }),
                Some(dn) if dn == dd => {
                    let num_lead = f.num().leading().expect("nonzero").clone();
                    let den_lead = f.den().leading().expect("nonzero").clone();
                    num_lead * den_lead.inv()?
                }
                _ => GaussRat::zero(),
            });
        }
        rows.push(row);
    }
    Mat::from_rows(rows)
}

/// Negated residue `-Res_lambda q` at a simple pole.  Entries whose
/// denominator vanishes to higher order make the pole non-simple and
/// are reported as such; the result must come out Hermitian.
pub fn residue_matrix(q: &RatMatFun, lambda: &GaussRat) -> Result<Mat<GaussRat>> {
    let n = q.size();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let f = q.entry(i, j);
            row.push(match f.valuation_at(lambda) {
                Some(v) if v < -1 => {
                    return Err(Error::NotSimplePole { location: lambda.to_string() })
                }
                Some(-1) => {
                    let num_val = f.num().eval(lambda);
                    let den_slope = f.den().derivative().eval(lambda);
                    -(num_val * den_slope.inv()?)
                }
                _ => GaussRat::zero(),
            });
        }
        rows.push(row);
    }
    let r = Mat::from_rows(rows)?;
    if !r.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    Ok(r)
}

/// Writes a Hermitian matrix as `sum_k epsilon_k gamma_k gamma_k^*`
/// with exactly `rank` terms and signs `epsilon_k = ±1`.  Pivots are
/// taken on the largest diagonal entry first; a zero diagonal is
/// handled by probing a hyperbolic pair through the first nonzero
/// off-diagonal entry.  Each `gamma` is scaled inside the Gaussian
/// rationals, which is possible exactly when the pivot magnitude is a
/// norm from that field — otherwise [`Error::IrrationalScale`].
pub fn signed_rank_factorization(r: &Mat<GaussRat>) -> Result<Vec<SignedTerm>> {
    let n = r.require_square()?;
    let mut terms = Vec::new();
    for (epsilon, col, pivot) in hermitian_peel(r)? {
        let scale = rat_sqrt_norm(&pivot.re.abs().recip())?;
        let gamma =
            canonical_phase(col.into_iter().map(|c| c * scale.clone()).collect());
        terms.push(SignedTerm { epsilon, gamma });
    }
    let mut sum: Mat<GaussRat> = Mat::zero(n, n);
    for term in &terms {
        let eps = GaussRat::from_int(term.epsilon as i64);
        for a in 0..n {
            for b in 0..n {
                sum[(a, b)] = sum[(a, b)].clone()
                    + eps.clone() * term.gamma[a].clone() * term.gamma[b].conj();
            }
        }
    }
    if sum != *r || terms.len() != r.rank() {
        return Err(Error::VerificationFailed(
            "signed rank-one terms do not reproduce the matrix".into(),
        ));
    }
    Ok(terms)
}

/// Signature `(positive, negative)` of a Hermitian matrix.  Same
/// peeling as [`signed_rank_factorization`] but without the scaling,
/// so it never fails on an irrational pivot magnitude.
pub fn matrix_inertia(r: &Mat<GaussRat>) -> Result<(usize, usize)> {
    let mut plus = 0;
    let mut minus = 0;
    for (epsilon, _, _) in hermitian_peel(r)? {
        if epsilon > 0 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    Ok((plus, minus))
}

/// Peels exact rank-one congruence steps off a Hermitian matrix until
/// it is zero, returning `(sign, column, pivot)` per step with the
/// invariant `step = column column^* / pivot`.
fn hermitian_peel(r: &Mat<GaussRat>) -> Result<Vec<(i8, Vec<GaussRat>, GaussRat)>> {
    let n = r.require_square()?;
    if !r.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let mut rem = r.clone();
    let mut steps: Vec<(i8, Vec<GaussRat>, GaussRat)> = Vec::new();
    loop {
        if steps.len() > n {
            return Err(Error::VerificationFailed(
                "rank-one peeling did not terminate".into(),
            ));
        }
        let mut pivot: Option<(usize, Rat)> = None;
        for k in 0..n {
            let d = &rem[(k, k)];
            if d.is_zero() {
                continue;
            }
            let mag = d.norm_sqr();
            if pivot.as_ref().map_or(true, |(_, best)| mag > *best) {
                pivot = Some((k, mag));
            }
        }
        if let Some((k, _)) = pivot {
            let p = rem[(k, k)].clone();
            let col = rem.col(k);
            steps.push(peel_step(&mut rem, col, p)?);
            continue;
        }
        // the diagonal is zero: a nonzero remainder must have some
        // off-diagonal entry w, and one of the two probes
        // e_j + e_k or e_j + i e_k has nonzero quadratic value
        let Some((j, k)) = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| a != b && !rem[(a, b)].is_zero())
        else {
            return Ok(steps);
        };
        let w = rem[(j, k)].clone();
        let (weight, value) = if !w.re.is_zero() {
            (GaussRat::one(), GaussRat::from_rat(w.re.clone() + w.re.clone()))
        } else {
            (GaussRat::i(), GaussRat::from_rat(-(w.im.clone() + w.im.clone())))
        };
        let col: Vec<GaussRat> = (0..n)
            .map(|a| rem[(a, j)].clone() + rem[(a, k)].clone() * weight.clone())
            .collect();
        steps.push(peel_step(&mut rem, col, value)?);
    }
}

fn peel_step(
    rem: &mut Mat<GaussRat>,
    col: Vec<GaussRat>,
    pivot: GaussRat,
) -> Result<(i8, Vec<GaussRat>, GaussRat)> {
    debug_assert!(pivot.is_real() && !pivot.is_zero());
    let inv = pivot.inv()?;
    let n = rem.rows();
    for a in 0..n {
        for b in 0..n {
            rem[(a, b)] = rem[(a, b)].clone() - col[a].clone() * col[b].conj() * inv.clone();
        }
    }
    let epsilon = if pivot.re.is_positive() { 1 } else { -1 };
    Ok((epsilon, col, pivot))
}

/// A Gaussian rational `t` with `t conj(t) = x`, for positive `x`.
/// Exists exactly when every prime `3 mod 4` divides `x` to an even
/// power; primes `1 mod 4` split into two squares and `2 = -i(1+i)^2`.
fn rat_sqrt_norm(x: &Rat) -> Result<GaussRat> {
    let numer = x.numer().clone();
    let denom = x.denom().clone();
    let norm = (&numer * &denom)
        .to_u128()
        .filter(|v| *v <= MAX_FACTOR_NORM)
        .ok_or_else(|| Error::BadInput(format!("scale {x} is too large to factor exactly")))?;
    let mut g = GaussRat::one();
    for (p, e) in factor_u128(norm).unwrap_or_default() {
        if p == 2 {
            g = g * GaussRat::new(Rat::one(), Rat::one()).powi(e as i64)?;
        } else if p % 4 == 1 {
            let (u, v) = two_squares(p).expect("prime 1 mod 4 splits");
            let factor = GaussRat::new(
                Rat::from_integer(BigInt::from(u)),
                Rat::from_integer(BigInt::from(v)),
            );
            g = g * factor.powi(e as i64)?;
        } else {
            if e % 2 == 1 {
                return Err(Error::IrrationalScale { scale: x.to_string() });
            }
            let factor = GaussRat::from_rat(Rat::from_integer(BigInt::from(p)));
            g = g * factor.powi((e / 2) as i64)?;
        }
    }
    let t = g * GaussRat::from_rat(Rat::new(BigInt::one(), denom));
    debug_assert_eq!(t.norm_sqr(), *x);
    Ok(t)
}

/// Rotates a vector by the Gaussian unit that maximizes its first
/// nonzero entry in the (re, im) order, fixing the overall phase.
fn canonical_phase(mut gamma: Vec<GaussRat>) -> Vec<GaussRat> {
    let Some(first) = gamma.iter().find(|c| !c.is_zero()).cloned() else {
        return gamma;
    };
    let units = [GaussRat::one(), GaussRat::i(), -GaussRat::one(), -GaussRat::i()];
    let best = units
        .into_iter()
        .max_by_key(|u| first.clone() * u.clone())
        .expect("nonempty");
    for c in &mut gamma {
        *c = c.clone() * best.clone();
    }
    gamma
}

/// Realizes a symmetric function over its real simple poles.  Poles at
/// numeric (non-Gaussian-rational) locations, non-real poles, and
/// higher-order poles are rejected with the matching error; blocks come
/// out sorted by pole location.  The result is verified by exact
/// reconstruction before it is returned.
pub fn build_realization(q: &RatMatFun, hint: Option<&GaussRat>) -> Result<Realization> {
    let factorization = factor_at_regular_point(q, hint)?;
    let analyzer = Analyzer::new(&factorization.qtilde)?;
    let mut blocks = Vec::new();
    let mut dim = 0;
    for point in analyzer.critical_points() {
        let report = analyzer.structure_at(&point)?;
        if report.omega_pole.is_empty() {
            continue;
        }
        match &point {
            CriticalPoint::Finite(lambda) => {
                if !lambda.is_real() {
                    return Err(Error::NonRealPole { location: lambda.to_string() });
                }
                if report.pole_partial_multiplicities.iter().any(|&t| t > 1) {
                    return Err(Error::UnsupportedJordanStructure {
                        location: lambda.to_string(),
                    });
                }
                let residue = residue_matrix(&factorization.qtilde, lambda)?;
                let terms = signed_rank_factorization(&residue)?;
                if terms.len() != report.total_pole_multiplicity() {
                    return Err(Error::VerificationFailed(format!(
                        "residue rank {} at {lambda} differs from the pole multiplicity {}",
                        terms.len(),
                        report.total_pole_multiplicity()
                    )));
                }
                dim += terms.len();
                blocks.push(PoleBlock { location: lambda.clone(), residue, terms });
            }
            CriticalPoint::Numeric(_) => return Err(Error::NumericPole),
            CriticalPoint::Infinity => unreachable!("critical points are finite"),
        }
    }
    let realization = Realization { factorization, blocks, dim };
    verify_realization(&realization)?;
    Ok(realization)
}

/// Rebuilds `s_limit + sum epsilon gamma gamma^* / (lambda - z)` and
/// compares it, as a canonical rational matrix function, against the
/// factored input.
pub fn verify_realization(r: &Realization) -> Result<()> {
    let n = r.factorization.qtilde.size();
    let mut entries = Mat::fill(n, n, RatFun::zero());
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = RatFun::constant(r.factorization.s_limit[(i, j)].clone());
        }
    }
    let mut dim = 0;
    for block in &r.blocks {
        let den = Poly::new(vec![block.location.clone(), -GaussRat::one()]);
        dim += block.terms.len();
        for term in &block.terms {
            if term.gamma.len() != n {
                return Err(Error::VerificationFailed("realization vector of wrong size".into()));
            }
            let eps = GaussRat::from_int(term.epsilon as i64);
            for a in 0..n {
                for b in 0..n {
                    let c = eps.clone() * term.gamma[a].clone() * term.gamma[b].conj();
                    if c.is_zero() {
                        continue;
                    }
                    entries[(a, b)] =
                        entries[(a, b)].clone() + RatFun::new(Poly::constant(c), den.clone())?;
                }
            }
        }
    }
    if dim != r.dim || RatMatFun::from_entries(entries)? != r.factorization.qtilde {
        return Err(Error::VerificationFailed(
            "realization does not reproduce the factored function".into(),
        ));
    }
    Ok(())
}

/// Leading coefficient of the pairing of one pole chain against one
/// pole function, divided by `(z - point)^multiplicity`.
fn chain_pairing_limit(
    psi: &[RatFun],
    phi_hat: &[Poly],
    point: &GaussRat,
    multiplicity: usize,
) -> Result<GaussRat> {
    let mut inner = RatFun::zero();
    for (p, f) in psi.iter().zip(phi_hat) {
        inner = inner + (-p.clone()) * RatFun::from_poly(f.clone()).conj_coeffs();
    }
    inner.limit_after_dividing(point, multiplicity as i64).map_err(|e| match e {
        Error::LimitUndefined { .. } => Error::SignUndetermined,
        other => other,
    })
}

/// Sign of one pole chain: the limit of the pairing of the negated
/// cancellation function against the matching pole function, after
/// dividing by `(z - point)^multiplicity`.  The limit must be real and
/// nonzero, otherwise the chain pairing is degenerate and the sign is
/// reported as undetermined.
pub fn sign_limit(
    psi: &[RatFun],
    phi_hat: &[Poly],
    point: &GaussRat,
    multiplicity: usize,
) -> Result<(GaussRat, i8)> {
    if psi.is_empty() || psi.len() != phi_hat.len() {
        return Err(Error::BadInput("chain and pole function sizes differ".into()));
    }
    let value = chain_pairing_limit(psi, phi_hat, point, multiplicity)?;
    if value.is_zero() || !value.is_real() {
        return Err(Error::SignUndetermined);
    }
    let epsilon = if value.re.is_positive() { 1 } else { -1 };
    Ok((value, epsilon))
}

/// Negative-square count of the pole of `f` at one point.  Chains of
/// even multiplicity contribute half their length each; odd chains
/// contribute the rounded-down half plus one more per negative
/// eigenvalue of the Gram matrix of their leading pairing.  Individual
/// diagonal pairings may degenerate, so the signs are taken from the
/// inertia of the whole same-multiplicity group.
fn kappa_at(f: &RatMatFun, point: &GaussRat) -> Result<(usize, Vec<ChainGroup>)> {
    let report = zero_pole_structure(f, &CriticalPoint::Finite(point.clone()))?;
    let mut by_multiplicity: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &t) in report.pole_partial_multiplicities.iter().enumerate() {
        by_multiplicity.entry(t).or_default().push(k);
    }
    let mut kappa = 0;
    let mut groups = Vec::new();
    for (multiplicity, chains) in by_multiplicity {
        kappa += chains.len() * (multiplicity / 2);
        let mut negative = 0;
        let mut gram = None;
        if multiplicity % 2 == 1 {
            let mut rows = Vec::with_capacity(chains.len());
            for &a in &chains {
                let mut row = Vec::with_capacity(chains.len());
                for &b in &chains {
                    row.push(chain_pairing_limit(
                        &report.pole_cancellation_functions[a],
                        &report.pole_functions[b],
                        point,
                        multiplicity,
                    )?);
                }
                rows.push(row);
            }
            let m = Mat::from_rows(rows)?;
            if !m.is_hermitian() {
                return Err(Error::VerificationFailed("chain pairing is not Hermitian".into()));
            }
            let (plus, minus) = matrix_inertia(&m)?;
            if plus + minus != chains.len() {
                return Err(Error::SignUndetermined);
            }
            negative = minus;
            kappa += negative;
            gram = Some(m);
        }
        groups.push(ChainGroup { multiplicity, count: chains.len(), negative, gram });
    }
    Ok((kappa, groups))
}

/// Compares the negative squares created by the regular-point division
/// (the pole of `qtilde` at `beta`) against those the original
/// function carries at infinity, read off at zero after substituting
/// `z -> 1/z` and negating.
pub fn kappa_report(q: &RatMatFun, hint: Option<&GaussRat>) -> Result<KappaReport> {
    let factorization = factor_at_regular_point(q, hint)?;
    let (kappa_beta, beta_groups) = kappa_at(&factorization.qtilde, &factorization.beta)?;
    let at_infinity = q.invert_variable().neg();
    let (kappa_infinity, infinity_groups) = kappa_at(&at_infinity, &GaussRat::zero())?;
    Ok(KappaReport {
        beta: factorization.beta,
        kappa_beta,
        beta_groups,
        kappa_infinity,
        infinity_groups,
        kappa_delta: kappa_beta as i64 - kappa_infinity as i64,
    })
}
