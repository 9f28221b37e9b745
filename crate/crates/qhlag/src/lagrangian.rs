//! Invariants of a middle-dimensional class in a presented ring: the cubic
//! relation and its discriminant, sphere constants, eigenvalues of the
//! anticanonical action, generated ideals, pairwise relations, and the
//! perfect-square predicate.
//!
//! The solves here are exact linear algebra. The cubic solver works in two
//! pinned stages: the point-class coefficient of `c*c*[L]` determines sigma
//! (the point appears in `c*[L]` only at the identity monomial, with
//! coefficient xi), and the remainder must be a rational multiple of
//! `[L] q^n`, which determines tau. Uniqueness is exactly the statement
//! `xi != 0`; anything the stages cannot absorb is reported as "no cubic
//! relation" rather than least-squares'd away.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactalg::{rat, CoeffElement, Mode, Monomial, QMonomial, Rational};
use crate::presets::epsilon;
use crate::qhring::{QHElement, RingPresentation};

/// A middle-dimensional class with the topological data the solves need.
///
/// `chi` is supplied by the caller (the ring does not determine it); the
/// constructor checks the self-intersection identity `[L].[L] = eps * chi`.
#[derive(Debug, Clone)]
pub struct LagrangianDatum<M: Monomial> {
    pub klass: QHElement<M>,
    pub n: i64,
    pub chi: i64,
    pub epsilon: i64,
    pub maslov: Option<i64>,
}

impl<M: Monomial> LagrangianDatum<M> {
    pub fn new(
        ring: &RingPresentation<M>,
        klass: QHElement<M>,
        chi: i64,
        maslov: Option<i64>,
    ) -> Result<Self> {
        let n = ring.middle_degree();
        if klass.is_zero() {
            return Err(Error::Precondition(
                "the zero class carries no cubic data".into(),
            ));
        }
        if !ring.is_classical(&klass) || ring.degree_of(&klass) != Some(n) {
            return Err(Error::Precondition(format!(
                "expected a classical class of degree {n}"
            )));
        }
        let eps = epsilon(n);
        let self_int = ring.intersection_number(&klass, &klass)?;
        if self_int != rat(eps * chi) {
            return Err(Error::Precondition(format!(
                "self-intersection {self_int} != eps*chi = {}",
                eps * chi
            )));
        }
        Ok(LagrangianDatum {
            klass,
            n,
            chi,
            epsilon: eps,
            maslov,
        })
    }
}

/// The solved cubic relation, together with the derived discriminant:
/// `c*c*[L] = xi sigma (c*[L]) q^{n/2} + xi^2 tau [L] q^n`.
#[derive(Debug, Clone)]
pub struct CubicCertificate {
    /// The partner class the relation was solved against.
    pub c: QHElement<QMonomial>,
    pub xi: Rational,
    pub sigma: Rational,
    pub tau: Rational,
    /// `sigma^2 + 4 tau`.
    pub delta: Rational,
    /// `chi^2 tau`, present exactly when `sigma = 0`.
    pub gamma: Option<Rational>,
    pub unique: bool,
    pub residual_zero: bool,
}

impl CubicCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "xi": self.xi.to_string(),
            "sigma": self.sigma.to_string(),
            "tau": self.tau.to_string(),
            "delta": self.delta.to_string(),
            "gamma": self.gamma.as_ref().map(|g| g.to_string()),
            "unique": self.unique,
            "residual_zero": self.residual_zero,
        })
    }

    /// The certificate's coefficients as a rational quadratic-algebra
    /// presentation `x^2 = sigma x + tau`; its discriminant is `delta`.
    pub fn quadratic_presentation(&self) -> crate::quadalg::RationalQuadraticPresentation {
        crate::quadalg::RationalQuadraticPresentation::new(self.sigma.clone(), self.tau.clone())
    }
}

fn point_coefficient_element(
    ring: &RingPresentation<QMonomial>,
    e: &QHElement<QMonomial>,
) -> CoeffElement<QMonomial> {
    e.component(ring.point)
        .cloned()
        .unwrap_or_else(|| CoeffElement::zero(Mode::Positive))
}

/// Solve the mixed cubic relation for a class `c` against `L`.
///
/// Preconditions: `n` even, `c` classical of degree `n`, and
/// `xi = #(c . [L]) != 0`. The returned coefficients satisfy the relation
/// exactly; an inconsistent system is an error, not an approximation.
pub fn cubic_coefficients(
    ring: &RingPresentation<QMonomial>,
    lag: &LagrangianDatum<QMonomial>,
    c: &QHElement<QMonomial>,
) -> Result<CubicCertificate> {
    let n = lag.n;
    if n % 2 != 0 {
        return Err(Error::Precondition(format!(
            "the cubic relation lives at q^(n/2); n = {n} is odd"
        )));
    }
    if !ring.is_classical(c) || ring.degree_of(c) != Some(n) {
        return Err(Error::Precondition(format!(
            "c must be a classical class of degree {n}"
        )));
    }
    let xi = ring.intersection_number(c, &lag.klass)?;
    if xi.is_zero() {
        return Err(Error::Precondition("xi = #(c . [L]) = 0".into()));
    }

    let cl = ring.mul(c, &lag.klass)?;
    let ccl = ring.mul(c, &cl)?;

    // The point class of c*[L] sits at the identity monomial with
    // coefficient xi; this is what makes {(c*[L]) q^{n/2}, [L] q^n}
    // independent and the solution unique.
    let cl_point = point_coefficient_element(ring, &cl);
    if cl_point.terms().iter().any(|(m, _)| !m.is_unit()) || cl_point.unit_coefficient() != xi {
        return Err(Error::Inconsistent(format!(
            "point component of c*[L] is {cl_point}, expected {xi} at q^0"
        )));
    }

    // Stage 1: sigma from the point component of c*c*[L], which must be
    // concentrated at q^{n/2}.
    let half = QMonomial::new(n / 2);
    let ccl_point = point_coefficient_element(ring, &ccl);
    for (m, _) in ccl_point.terms() {
        if *m != half {
            return Err(Error::NoCubicRelation(format!(
                "point component of c*c*[L] has a term at {m}, outside q^{}",
                n / 2
            )));
        }
    }
    let sigma = ccl_point.coefficient_of(&half) / (&xi * &xi);

    // Stage 2: the remainder must be xi^2 tau [L] q^n.
    let shifted = cl.mul_monomial(&half)?.scale(&(&xi * &sigma));
    let remainder = ccl.sub(&shifted)?;
    let target = lag.klass.mul_monomial(&QMonomial::new(n))?;
    let (pivot_idx, pivot_coeff) = target
        .components()
        .iter()
        .next()
        .map(|(i, c)| (*i, c.coefficient_of(&QMonomial::new(n))))
        .expect("nonzero class");
    let tau = remainder
        .component(pivot_idx)
        .map(|c| c.coefficient_of(&QMonomial::new(n)))
        .unwrap_or_else(Rational::zero)
        / (&xi * &xi * pivot_coeff);
    let residual = remainder.sub(&target.scale(&(&xi * &xi * &tau)))?;
    if !residual.is_zero() {
        return Err(Error::NoCubicRelation(format!(
            "residual {} after solving; the input table admits no such relation",
            ring.render(&residual)
        )));
    }

    let delta = &sigma * &sigma + rat(4) * &tau;
    let gamma = sigma.is_zero().then(|| rat(lag.chi * lag.chi) * &tau);
    Ok(CubicCertificate {
        c: c.clone(),
        xi,
        sigma,
        tau,
        delta,
        gamma,
        unique: true,
        residual_zero: true,
    })
}

/// Solve `[S]^{*3} = gamma [S] q^n` for a sphere class and validate the
/// divisibility laws: `4 | gamma` when `2 C_M` does not divide `n`, and
/// `gamma mod 4` in `{0, 1}` when it does. Also re-derives the full cubic
/// and checks `sigma = 0` rather than assuming it.
pub fn gamma_sphere(
    ring: &RingPresentation<QMonomial>,
    sphere: &LagrangianDatum<QMonomial>,
) -> Result<CubicCertificate> {
    let n = sphere.n;
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("n = {n} is odd")));
    }
    let chern = ring
        .minimal_chern
        .ok_or_else(|| Error::Precondition("minimal Chern number is infinite".into()))?;
    if n % chern != 0 {
        return Err(Error::Precondition(format!(
            "C_M = {chern} does not divide n = {n}"
        )));
    }
    if sphere.chi != 2 {
        return Err(Error::Precondition(format!(
            "sphere data requires chi = 2 and [S].[S] = 2 eps, got chi = {}",
            sphere.chi
        )));
    }

    let cube = ring.pow(&sphere.klass, 3)?;
    let target = sphere.klass.mul_monomial(&QMonomial::new(n))?;
    let gamma = solve_proportionality(ring, &cube, &target).ok_or_else(|| {
        Error::Inconsistent(format!(
            "[S]^3 = {} is not proportional to [S] q^{n}",
            ring.render(&cube)
        ))
    })?;
    if !gamma.is_integer() {
        return Err(Error::Inconsistent(format!(
            "gamma = {gamma} is not an integer"
        )));
    }
    let gamma_int = gamma.to_integer();
    let residue = ((&gamma_int % 4i64) + 4i64) % 4i64;
    if n % (2 * chern) != 0 {
        if residue != num_bigint::BigInt::from(0) {
            return Err(Error::Inconsistent(format!(
                "gamma = {gamma_int} must be divisible by 4 when 2 C_M does not divide n"
            )));
        }
    } else if residue != num_bigint::BigInt::from(0) && residue != num_bigint::BigInt::from(1) {
        return Err(Error::Inconsistent(format!(
            "gamma = {gamma_int} is {residue} mod 4; only 0 and 1 occur"
        )));
    }

    let cert = cubic_coefficients(ring, sphere, &sphere.klass)?;
    if !cert.sigma.is_zero() {
        return Err(Error::Inconsistent(format!(
            "sigma = {} for a sphere class; expected 0",
            cert.sigma
        )));
    }
    match &cert.gamma {
        Some(g) if *g == gamma => {}
        other => {
            return Err(Error::Inconsistent(format!(
                "chi^2 tau = {other:?} disagrees with gamma = {gamma}"
            )))
        }
    }
    Ok(cert)
}

/// Try to express `value = ratio * target`; `None` when not proportional.
fn solve_proportionality(
    _ring: &RingPresentation<QMonomial>,
    value: &QHElement<QMonomial>,
    target: &QHElement<QMonomial>,
) -> Option<Rational> {
    if value.is_zero() {
        return Some(Rational::zero());
    }
    if target.is_zero() {
        return None;
    }
    let (idx, coeff) = target.components().iter().next()?;
    let (m, c) = coeff.terms().first()?;
    let ratio = value.component(*idx)?.coefficient_of(m) / c;
    let scaled = target.scale(&ratio);
    (scaled == *value).then_some(ratio)
}

/// Outcome of the degree-zero multiplier question `b * [S] = eta [S] q^n`.
#[derive(Debug, Clone)]
pub enum EtaOutcome {
    Multiplier(Rational),
    NotProportional { product: QHElement<QMonomial> },
}

/// For homogeneous `b` of total degree 0, find `eta` with
/// `b*[S] = eta [S] q^n`, or report non-proportionality as a result.
pub fn eta_multiplier(
    ring: &RingPresentation<QMonomial>,
    b: &QHElement<QMonomial>,
    sphere: &LagrangianDatum<QMonomial>,
) -> Result<EtaOutcome> {
    if !b.is_zero() && ring.degree_of(b) != Some(0) {
        return Err(Error::Precondition(
            "b must be homogeneous of total degree 0".into(),
        ));
    }
    let product = ring.mul(b, &sphere.klass)?;
    let target = sphere.klass.mul_monomial(&QMonomial::new(sphere.n))?;
    match solve_proportionality(ring, &product, &target) {
        Some(eta) => Ok(EtaOutcome::Multiplier(eta)),
        None => Ok(EtaOutcome::NotProportional { product }),
    }
}

/// The Gromov-Witten side of sigma: the pairing `#(c . alpha_n)` against the
/// `q^{n/2}` coefficient class of `c*[L]`. Cross-checked to equal
/// `xi^2 sigma` before returning.
pub fn gw_sigma_sum(
    ring: &RingPresentation<QMonomial>,
    c: &QHElement<QMonomial>,
    lag: &LagrangianDatum<QMonomial>,
) -> Result<Rational> {
    let n = lag.n;
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("n = {n} is odd")));
    }
    let cl = ring.mul(c, &lag.klass)?;
    let half = QMonomial::new(n / 2);
    let mut comps = BTreeMap::new();
    for (idx, coeff) in cl.components() {
        let at_half = coeff.coefficient_of(&half);
        if !at_half.is_zero() {
            comps.insert(
                *idx,
                CoeffElement::monomial(Mode::Positive, QMonomial::unit(), at_half)?,
            );
        }
    }
    let alpha = QHElement::from_components(comps);
    let sum = ring.intersection_number(c, &alpha)?;
    let cert = cubic_coefficients(ring, lag, c)?;
    let expected = &cert.xi * &cert.xi * &cert.sigma;
    if sum != expected {
        return Err(Error::Inconsistent(format!(
            "#(c . alpha_n) = {sum} disagrees with xi^2 sigma = {expected}"
        )));
    }
    Ok(sum)
}

/// Result of the eigenvalue solve `PD(c1) * [L] = lambda [L] q`.
#[derive(Debug, Clone)]
pub struct EigenReport {
    pub lambda: Rational,
    pub verified: bool,
    pub residual: QHElement<QMonomial>,
}

impl EigenReport {
    /// The eigenvalue as an integer, when it is one and the solve verified.
    pub fn lambda_int(&self) -> Option<i64> {
        if !self.verified || !self.lambda.is_integer() {
            return None;
        }
        i64::try_from(self.lambda.to_integer()).ok()
    }
}

/// Solve the anticanonical eigenvalue equation for a class. A failed solve
/// is a structured report (verified = false with the residual), not an
/// error.
pub fn lambda_eigenvalue(
    ring: &RingPresentation<QMonomial>,
    l_class: &QHElement<QMonomial>,
) -> Result<EigenReport> {
    let c1 = ring
        .c1_dual
        .as_ref()
        .ok_or_else(|| Error::Precondition("presentation has no c1_dual".into()))?;
    if l_class.is_zero() {
        return Err(Error::Precondition("zero class has no eigenvalue".into()));
    }
    let product = ring.mul(c1, l_class)?;
    let target = l_class.mul_monomial(&QMonomial::new(1))?;
    match solve_proportionality(ring, &product, &target) {
        Some(lambda) => Ok(EigenReport {
            lambda,
            verified: true,
            residual: QHElement::zero(),
        }),
        None => {
            // Best-effort ratio from the first target component, with the
            // mismatch recorded as a residual.
            let (idx, coeff) = target.components().iter().next().expect("nonzero");
            let (m, c) = coeff.terms().first().expect("normalized");
            let lambda = product
                .component(*idx)
                .map(|ce| ce.coefficient_of(m))
                .unwrap_or_else(Rational::zero)
                / c;
            let residual = product.sub(&target.scale(&lambda))?;
            Ok(EigenReport {
                lambda,
                verified: false,
                residual,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Ideals
// ---------------------------------------------------------------------------

/// The ideal generated by a class, presented by reduced integer generators.
///
/// Because every element in play is homogeneous and the coefficient ring is
/// q-periodic, an ideal element is reduced by dropping q-powers into the
/// finite-dimensional rational span of the basis classes; rank and
/// membership are computed there, and generators are lifted back with the
/// q-exponents homogeneity forces.
#[derive(Debug, Clone)]
pub struct IdealBasis {
    pub generators: Vec<QHElement<QMonomial>>,
    pub rank: usize,
    rows: Vec<Vec<Rational>>,
}

fn fold(ring: &RingPresentation<QMonomial>, e: &QHElement<QMonomial>) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); ring.basis.len()];
    for (idx, coeff) in e.components() {
        for (_, c) in coeff.terms() {
            row[*idx] += c;
        }
    }
    row
}

/// Reduced row echelon form in place; returns the rank.
fn rref(rows: &mut Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(found) = (pivot_row..rows.len()).find(|r| !rows[*r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    let sub = p * &factor;
                    *x -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows.len()
}

fn reduce_against(rows: &[Vec<Rational>], mut v: Vec<Rational>) -> Vec<Rational> {
    for row in rows {
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if !v[pivot].is_zero() {
            let factor = v[pivot].clone() / &row[pivot];
            for (vi, ri) in v.iter_mut().zip(row) {
                let sub = ri * &factor;
                *vi -= sub;
            }
        }
    }
    v
}

/// Clear denominators, divide by content, make the leading entry positive.
fn integer_normalize(row: &[Rational]) -> Vec<Rational> {
    use num_bigint::BigInt;
    let mut lcm = BigInt::one();
    for x in row {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = row
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = num_integer::gcd(gcd, x.clone());
    }
    if gcd.is_zero() {
        return row.to_vec();
    }
    let lead_negative = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    let sign = if lead_negative { -1 } else { 1 };
    ints.iter()
        .map(|x| Rational::from_integer(x * sign / &gcd))
        .collect()
}

fn lift_row(ring: &RingPresentation<QMonomial>, row: &[Rational]) -> QHElement<QMonomial> {
    let total = row
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| ring.basis[i].degree)
        .min()
        .unwrap_or(0);
    let mut comps = BTreeMap::new();
    for (i, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = (ring.basis[i].degree - total) / 2;
        comps.insert(
            i,
            CoeffElement::monomial(Mode::Positive, QMonomial::new(k), c.clone()).unwrap(),
        );
    }
    QHElement::from_components(comps)
}

impl IdealBasis {
    /// Membership test for homogeneous elements, by reduction in the folded
    /// span.
    pub fn contains(&self, ring: &RingPresentation<QMonomial>, e: &QHElement<QMonomial>) -> bool {
        let reduced = reduce_against(&self.rows, fold(ring, e));
        reduced.iter().all(|x| x.is_zero())
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// Compute the ideal generated by a class: starting from the class, apply
/// folded multiplication by every basis class until the rank stabilizes
/// (with a hard cap of one pass per basis dimension, which a valid ring
/// never reaches).
pub fn ideal_of(
    ring: &RingPresentation<QMonomial>,
    l_class: &QHElement<QMonomial>,
) -> Result<IdealBasis> {
    let dim = ring.basis.len();
    // Folded multiplication matrices; column j of M_b is fold(b * class_j).
    let mut matrices: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let entry = ring
                .table_entry(b, j)
                .ok_or_else(|| Error::UndefinedProduct {
                    ring: ring.name.clone(),
                    left: ring.basis[b].name.clone(),
                    right: ring.basis[j].name.clone(),
                })?;
            cols.push(fold(ring, entry));
        }
        matrices.push(cols);
    }
    let apply = |b: usize, v: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); dim];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (o, m) in out.iter_mut().zip(&matrices[b][j]) {
                *o += m * vj;
            }
        }
        out
    };

    let mut rows = vec![fold(ring, l_class)];
    let mut rank = rref(&mut rows);
    for _pass in 0..=dim {
        let mut next = rows.clone();
        for b in 0..dim {
            for row in &rows {
                next.push(apply(b, row));
            }
        }
        let new_rank = rref(&mut next);
        if new_rank == rank {
            rows = next;
            let generators = rows
                .iter()
                .map(|r| lift_row(ring, &integer_normalize(r)))
                .collect();
            return Ok(IdealBasis {
                generators,
                rank,
                rows,
            });
        }
        rank = new_rank;
        rows = next;
    }
    Err(Error::Inconsistent(
        "ideal closure did not stabilize within dim(H) passes".into(),
    ))
}

// ---------------------------------------------------------------------------
// Pairs of classes
// ---------------------------------------------------------------------------

/// Which disjunct holds for a pair of middle-dimensional classes.
#[derive(Debug, Clone)]
pub enum PairBranch {
    /// `#(L1 . L2) = 0` and the product vanishes.
    ProductZero,
    /// `#(L1 . L2) = 0`, the classes are proportional, and
    /// `[L1]*[L1] = kappa [L1] q^{n/2}`.
    Proportional { kappa: Rational },
    /// Disjoint classes where neither disjunct could be confirmed; signals
    /// ring data outside the disjointness dichotomy.
    NeitherDisjunct { product: QHElement<QMonomial> },
    /// `k != 0`: eigenvalues must agree; the square relation applies only
    /// under the stated divisibility window.
    NonzeroIntersection {
        lambda_left: Option<Rational>,
        lambda_right: Option<Rational>,
        lambda_equal: Option<bool>,
        squares: SquareRelation,
    },
}

#[derive(Debug, Clone)]
pub enum SquareRelation {
    NotApplicable { reason: String },
    Verified { gamma: Rational },
    Failed { details: String },
}

#[derive(Debug, Clone)]
pub struct PairReport {
    pub k: Rational,
    pub branch: PairBranch,
}

/// Relate two middle-dimensional classes: the disjoint dichotomy when their
/// intersection number vanishes, and eigenvalue equality plus the square
/// relation (`[L1]^2 = [L2]^2 = (2 eps / k) [L1]*[L2]`, equal sphere
/// constants) when it does not and the divisibility window
/// `C_M | n, 2 C_M does not divide n` is open.
pub fn pair_relation(
    ring: &RingPresentation<QMonomial>,
    left: &LagrangianDatum<QMonomial>,
    right: &LagrangianDatum<QMonomial>,
) -> Result<PairReport> {
    let n = ring.middle_degree();
    if n % 2 != 0 {
        return Err(Error::Precondition(format!("n = {n} is odd")));
    }
    let k = ring.intersection_number(&left.klass, &right.klass)?;
    let product = ring.mul(&left.klass, &right.klass)?;

    if k.is_zero() {
        if product.is_zero() {
            return Ok(PairReport {
                k,
                branch: PairBranch::ProductZero,
            });
        }
        // Proportionality over the rationals, then the kappa relation.
        let ratio = solve_proportionality(ring, &right.klass, &left.klass);
        if ratio.is_some() {
            let square = ring.mul(&left.klass, &left.klass)?;
            let target = left.klass.mul_monomial(&QMonomial::new(n / 2))?;
            if let Some(kappa) = solve_proportionality(ring, &square, &target) {
                return Ok(PairReport {
                    k,
                    branch: PairBranch::Proportional { kappa },
                });
            }
        }
        return Ok(PairReport {
            k,
            branch: PairBranch::NeitherDisjunct { product },
        });
    }

    let lambda_left = lambda_eigenvalue(ring, &left.klass)
        .ok()
        .filter(|r| r.verified)
        .map(|r| r.lambda);
    let lambda_right = lambda_eigenvalue(ring, &right.klass)
        .ok()
        .filter(|r| r.verified)
        .map(|r| r.lambda);
    let lambda_equal = match (&lambda_left, &lambda_right) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };

    let squares = match ring.minimal_chern {
        None => SquareRelation::NotApplicable {
            reason: "minimal Chern number is infinite".into(),
        },
        Some(chern) if n % chern != 0 => SquareRelation::NotApplicable {
            reason: format!("C_M = {chern} does not divide n = {n}"),
        },
        Some(chern) if n % (2 * chern) == 0 => SquareRelation::NotApplicable {
            reason: format!("2 C_M = {} divides n = {n}", 2 * chern),
        },
        Some(_) => {
            let eps = rat(2 * left.epsilon);
            let expected = product.scale(&(eps / &k));
            let sq_left = ring.mul(&left.klass, &left.klass)?;
            let sq_right = ring.mul(&right.klass, &right.klass)?;
            if sq_left != expected || sq_right != expected {
                SquareRelation::Failed {
                    details: "square relation does not hold".into(),
                }
            } else {
                match (gamma_sphere(ring, left), gamma_sphere(ring, right)) {
                    (Ok(a), Ok(b)) if a.gamma == b.gamma => SquareRelation::Verified {
                        gamma: a.gamma.unwrap_or_else(Rational::zero),
                    },
                    (Ok(a), Ok(b)) => SquareRelation::Failed {
                        details: format!("gamma {:?} != {:?}", a.gamma, b.gamma),
                    },
                    (Err(e), _) | (_, Err(e)) => SquareRelation::NotApplicable {
                        reason: format!("sphere constants unavailable: {e}"),
                    },
                }
            }
        }
    };

    Ok(PairReport {
        k,
        branch: PairBranch::NonzeroIntersection {
            lambda_left,
            lambda_right,
            lambda_equal,
            squares,
        },
    })
}

/// Whether a rational is the square of a rational (for integers: of an
/// integer).
pub fn is_perfect_square(x: &Rational) -> bool {
    if x.is_negative() {
        return false;
    }
    if x.is_zero() {
        return true;
    }
    let num = x.numer();
    let den = x.denom();
    let ns = num.sqrt();
    let ds = den.sqrt();
    &ns * &ns == *num && &ds * &ds == *den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::load_preset;

    fn datum(
        ring: &RingPresentation<QMonomial>,
        expr: &str,
        chi: i64,
    ) -> LagrangianDatum<QMonomial> {
        let klass = ring.parse_class_expr(expr).unwrap();
        LagrangianDatum::new(ring, klass, chi, Some(2)).unwrap()
    }

    #[test]
    fn m2_sphere_certificate() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "E1-E2", 2);
        let cert = cubic_coefficients(r, &lag, &lag.klass.clone()).unwrap();
        assert_eq!(cert.xi, rat(-2));
        assert_eq!(cert.sigma, rat(0));
        assert_eq!(cert.tau, rat(5) / rat(4));
        assert_eq!(cert.delta, rat(5));
        assert_eq!(cert.gamma, Some(rat(5)));
        assert!(cert.unique && cert.residual_zero);
    }

    #[test]
    fn m2_closed_form_for_general_c() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "E1-E2", 2);
        // c = dH - m1 E1 - m2 E2 with (d, m1, m2) = (1, 2, -1).
        let c = r.parse_class_expr("H-2E1+E2").unwrap();
        let cert = cubic_coefficients(r, &lag, &c).unwrap();
        // sigma = -(m1+m2)/(m1-m2) = -1/3, tau = (m1^2-3m1m2+m2^2)/(m1-m2)^2.
        assert_eq!(cert.sigma, rat(-1) / rat(3));
        assert_eq!(cert.tau, rat(4 + 6 + 1) / rat(9));
        assert_eq!(cert.delta, rat(5));
    }

    #[test]
    fn m3_general_class_sphere() {
        let ring = load_preset("M3").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "H-E1-E2-E3", 2);
        let cert = gamma_sphere(r, &lag).unwrap();
        assert_eq!(cert.gamma, Some(rat(-3)));
        assert_eq!(cert.delta, rat(-3));
    }

    #[test]
    fn gamma_values_match_the_tables() {
        for (preset, expr, gamma) in [
            ("M2", "E1-E2", 5),
            ("M3", "E1-E2", 4),
            ("M4", "E1-E2", 1),
            ("M5", "E1-E2", 0),
            ("M6", "E1-E2", 0),
            ("M6", "2H-E1-E2-E3-E4-E5-E6", 0),
        ] {
            let ring = load_preset(preset).unwrap();
            let r = ring.as_q().unwrap();
            let lag = datum(r, expr, 2);
            let cert = gamma_sphere(r, &lag).unwrap();
            assert_eq!(cert.gamma, Some(rat(gamma)), "{preset} {expr}");
        }
    }

    #[test]
    fn xi_zero_is_a_precondition_error() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "E1-E2", 2);
        let c = r.parse_class_expr("H").unwrap();
        assert!(matches!(
            cubic_coefficients(r, &lag, &c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_class_is_rejected() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let zero = QHElement::zero();
        assert!(LagrangianDatum::new(r, zero, 2, None).is_err());
    }

    #[test]
    fn eta_examples() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let sphere = datum(r, "E1-E2", 2);
        // b = p.
        let p = r.element_from_class(r.point);
        match eta_multiplier(r, &p, &sphere).unwrap() {
            EtaOutcome::Multiplier(eta) => assert_eq!(eta, rat(-1)),
            other => panic!("{other:?}"),
        }
        // b = [S]*[S].
        let sq = r.mul(&sphere.klass, &sphere.klass).unwrap();
        match eta_multiplier(r, &sq, &sphere).unwrap() {
            EtaOutcome::Multiplier(eta) => assert_eq!(eta, rat(5)),
            other => panic!("{other:?}"),
        }
        // b = unit * q^n.
        let uq = r.unit_element().mul_monomial(&QMonomial::new(2)).unwrap();
        match eta_multiplier(r, &uq, &sphere).unwrap() {
            EtaOutcome::Multiplier(eta) => assert_eq!(eta, rat(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gw_sum_examples() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "E1-E2", 2);
        let c_self = lag.klass.clone();
        assert_eq!(gw_sigma_sum(r, &c_self, &lag).unwrap(), rat(0));
        let e1 = r.parse_class_expr("E1").unwrap();
        assert_eq!(gw_sigma_sum(r, &e1, &lag).unwrap(), rat(-1));

        let ring3 = load_preset("M3").unwrap();
        let r3 = ring3.as_q().unwrap();
        let lag3 = datum(r3, "H-E1-E2-E3", 2);
        assert_eq!(
            gw_sigma_sum(r3, &lag3.klass.clone(), &lag3).unwrap(),
            rat(0)
        );
    }

    #[test]
    fn lambda_examples() {
        for (preset, expr, lambda) in [
            ("M2", "E1-E2", -1),
            ("M3", "E1-E2", -2),
            ("M3", "H-E1-E2-E3", -3),
            ("M4", "E1-E2", -3),
            ("M5", "E1-E2", -4),
            ("M6", "E1-E2", -6),
        ] {
            let ring = load_preset(preset).unwrap();
            let r = ring.as_q().unwrap();
            let class = r.parse_class_expr(expr).unwrap();
            let report = lambda_eigenvalue(r, &class).unwrap();
            assert!(report.verified, "{preset} {expr}");
            assert_eq!(report.lambda, rat(lambda), "{preset} {expr}");
        }
    }

    #[test]
    fn lambda_non_eigenvector_reports_residual() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let h = r.parse_class_expr("H").unwrap();
        let report = lambda_eigenvalue(r, &h).unwrap();
        assert!(!report.verified);
        assert!(!report.residual.is_zero());
    }

    #[test]
    fn ideal_m2_matches_display() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let l = r.parse_class_expr("E1-E2").unwrap();
        let ideal = ideal_of(r, &l).unwrap();
        assert_eq!(ideal.rank, 2);
        // Display generators: E1-E2 and -2p + (E1+E2)q + 2u q^2.
        assert!(ideal.contains(r, &l));
        let g2 = r
            .parse_class_expr("-2p")
            .unwrap()
            .add(
                &r.parse_class_expr("E1+E2")
                    .unwrap()
                    .mul_monomial(&QMonomial::new(1))
                    .unwrap(),
            )
            .unwrap()
            .add(
                &r.parse_class_expr("2u")
                    .unwrap()
                    .mul_monomial(&QMonomial::new(2))
                    .unwrap(),
            )
            .unwrap();
        assert!(ideal.contains(r, &g2));
        // Membership is not vacuous.
        let h = r.parse_class_expr("H").unwrap();
        assert!(!ideal.contains(r, &h));
    }

    #[test]
    fn pair_relation_m3_disjoint() {
        let ring = load_preset("M3").unwrap();
        let r = ring.as_q().unwrap();
        let l1 = datum(r, "H-E1-E2-E3", 2);
        let l2 = datum(r, "E2-E3", 2);
        let report = pair_relation(r, &l1, &l2).unwrap();
        assert_eq!(report.k, rat(0));
        assert!(matches!(report.branch, PairBranch::ProductZero));
    }

    #[test]
    fn pair_relation_m3_meeting_classes() {
        let ring = load_preset("M3").unwrap();
        let r = ring.as_q().unwrap();
        let l1 = datum(r, "E1-E2", 2);
        let l2 = datum(r, "E2-E3", 2);
        let report = pair_relation(r, &l1, &l2).unwrap();
        assert_eq!(report.k, rat(1));
        match report.branch {
            PairBranch::NonzeroIntersection {
                lambda_equal,
                squares,
                ..
            } => {
                assert_eq!(lambda_equal, Some(true));
                assert!(matches!(squares, SquareRelation::NotApplicable { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pair_relation_square_branch_on_the_quadric() {
        // The quadric in complex dimension 2 sits in the divisibility
        // window (C = 2 divides n = 2, 2C = 4 does not), so the square
        // relation applies and verifies with the shared sphere constant.
        let ring = crate::presets::hypersurface_model(2, 2).unwrap();
        let r = ring.as_q().unwrap();
        let a = datum(r, "a", 2);
        let report = pair_relation(r, &a, &a.clone()).unwrap();
        assert_eq!(report.k, rat(-2));
        match report.branch {
            PairBranch::NonzeroIntersection {
                lambda_left,
                lambda_equal,
                squares,
                ..
            } => {
                // Multiplication by the anticanonical dual kills the middle
                // class here, so the eigenvalue is 0 on both sides.
                assert_eq!(lambda_left, Some(rat(0)));
                assert_eq!(lambda_equal, Some(true));
                match squares {
                    SquareRelation::Verified { gamma } => assert_eq!(gamma, rat(4)),
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn eta_can_report_non_proportionality() {
        // b = E1 q is homogeneous of total degree 0 but its product with
        // the sphere class is not a multiple of [S] q^n; the outcome is a
        // result, not an error.
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let sphere = datum(r, "E1-E2", 2);
        let b = r
            .parse_class_expr("E1")
            .unwrap()
            .mul_monomial(&QMonomial::new(1))
            .unwrap();
        match eta_multiplier(r, &b, &sphere).unwrap() {
            EtaOutcome::NotProportional { product } => assert!(!product.is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pair_relation_with_itself() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let l = datum(r, "E1-E2", 2);
        let report = pair_relation(r, &l, &l.clone()).unwrap();
        assert_eq!(report.k, rat(-2));
        match report.branch {
            PairBranch::NonzeroIntersection { lambda_equal, .. } => {
                assert_eq!(lambda_equal, Some(true));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_bridges_to_a_quadratic_presentation() {
        let ring = load_preset("M2").unwrap();
        let r = ring.as_q().unwrap();
        let lag = datum(r, "E1-E2", 2);
        let cert = cubic_coefficients(r, &lag, &lag.klass.clone()).unwrap();
        let pres = cert.quadratic_presentation();
        assert_eq!(pres.delta(), cert.delta);
        assert_eq!(cert.c, lag.klass);
        // The orbit moves preserve the certificate's discriminant.
        assert_eq!(pres.change_lift(&(rat(3) / rat(2))).delta(), cert.delta);
        assert_eq!(pres.negate_generator().delta(), cert.delta);
    }

    #[test]
    fn perfect_square_cases() {
        assert!(is_perfect_square(&rat(4)));
        assert!(!is_perfect_square(&rat(5)));
        assert!(is_perfect_square(&rat(0)));
        assert!(!is_perfect_square(&rat(-3)));
        assert!(is_perfect_square(&(rat(9) / rat(4))));
        assert!(!is_perfect_square(&(rat(9) / rat(5))));
    }
}
