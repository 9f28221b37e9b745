//! Exact coefficient arithmetic: arbitrary-precision rationals and normalized
//! formal sums over graded monomial monoids.
//!
//! Two monoids are supported. [`QMonomial`] is a power of the single quantum
//! variable `q` of degree -2. [`GroupMonomial`] is a group-ring monomial
//! `T^A` where `A` is an integer vector over a declared rank-2 homology
//! basis; its degree is -2 times the Chern/Maslov pairing of `A`. A
//! [`CoeffElement`] is a finite formal sum of monomials with rational
//! coefficients, kept normalized (sorted, merged, zero-free) at all times.
//!
//! Everything here is exact; there is no floating point in the crate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Shorthand for an exact rational with arbitrary-precision numerator and
/// denominator. Values are always stored reduced with positive denominator.
pub type Rational = BigRational;

/// Build a rational from a small integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let mk_err = || Error::Parse {
        column: 1,
        message: format!("expected integer or `p/q` rational, got `{s}`"),
    };
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| mk_err())?;
        let d: BigInt = den.trim().parse().map_err(|_| mk_err())?;
        if d.is_zero() {
            return Err(mk_err());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| mk_err())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Positivity regime of a coefficient monoid.
///
/// In `Positive` mode the monoid is the positive cone (only nonnegative
/// `q`-powers, only group monomials of positive pairing); attempting to form
/// anything outside the cone is an error rather than a silent widening.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Positive,
    Laurent,
}

/// A graded coefficient monomial.
pub trait Monomial: Clone + Ord + fmt::Display + fmt::Debug {
    /// Monomial product (exponent data adds). Fails on rank mismatch.
    fn combine(&self, other: &Self) -> Result<Self>;
    /// Homological degree of the monomial.
    fn degree(&self) -> i64;
    /// Whether this is the identity monomial of its monoid.
    fn is_unit(&self) -> bool;
    /// The identity monomial of the same monoid (same rank for group rings).
    fn unit_like(&self) -> Self;
    /// Whether the monomial lies in the positive cone.
    fn admissible(&self, mode: Mode) -> bool;
    /// Short tag used in mismatch error messages.
    fn monoid_tag(&self) -> String;
    /// Document-format encoding: `{"q": k}` or `{"T": [..]}`.
    fn json_value(&self) -> serde_json::Value;
}

/// A power `q^k` of the degree -2 quantum variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMonomial {
    pub exponent: i64,
}

impl QMonomial {
    pub fn new(exponent: i64) -> Self {
        QMonomial { exponent }
    }

    pub fn unit() -> Self {
        QMonomial { exponent: 0 }
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            0 => write!(f, "1"),
            1 => write!(f, "q"),
            k => write!(f, "q^{k}"),
        }
    }
}

impl Monomial for QMonomial {
    fn combine(&self, other: &Self) -> Result<Self> {
        Ok(QMonomial::new(self.exponent + other.exponent))
    }

    fn degree(&self) -> i64 {
        -2 * self.exponent
    }

    fn is_unit(&self) -> bool {
        self.exponent == 0
    }

    fn unit_like(&self) -> Self {
        QMonomial::unit()
    }

    fn admissible(&self, mode: Mode) -> bool {
        mode == Mode::Laurent || self.exponent >= 0
    }

    fn monoid_tag(&self) -> String {
        "q".to_string()
    }

    fn json_value(&self) -> serde_json::Value {
        serde_json::json!({"q": self.exponent})
    }
}

/// A group-ring monomial `T^A` with `A` an integer vector over a declared
/// degree-2 homology basis.
///
/// `pairing` caches the Chern (or half-Maslov) pairing of `A` against the
/// basis pairing vector, so the degree is `-2 * pairing`. The identity has
/// the zero exponent vector. In positive mode a non-identity monomial must
/// have `pairing > 0`; the degree-0 part of the positive group ring is just
/// the ground ring.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupMonomial {
    pub exponents: Vec<i64>,
    pub pairing: i64,
}

impl GroupMonomial {
    pub fn new(exponents: Vec<i64>, pairing: i64) -> Self {
        GroupMonomial { exponents, pairing }
    }

    /// Build from an exponent vector and the per-generator pairing vector.
    pub fn from_pairing_vector(exponents: Vec<i64>, pairing_of_gen: &[i64]) -> Result<Self> {
        if exponents.len() != pairing_of_gen.len() {
            return Err(Error::MonoidMismatch(format!(
                "exponent vector of length {} against pairing vector of length {}",
                exponents.len(),
                pairing_of_gen.len()
            )));
        }
        let pairing = exponents
            .iter()
            .zip(pairing_of_gen)
            .map(|(e, p)| e * p)
            .sum();
        Ok(GroupMonomial { exponents, pairing })
    }

    pub fn unit(rank: usize) -> Self {
        GroupMonomial {
            exponents: vec![0; rank],
            pairing: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Render as `T^{2E1-E2}` against generator names, or `T[..]` when the
    /// vector form is preferred.
    pub fn display_named(&self, names: &[String]) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let mut s = String::from("T^{");
        let mut first = true;
        for (e, name) in self.exponents.iter().zip(names) {
            if *e == 0 {
                continue;
            }
            if *e < 0 {
                s.push('-');
            } else if !first {
                s.push('+');
            }
            let a = e.unsigned_abs();
            if a != 1 {
                s.push_str(&a.to_string());
            }
            s.push_str(name);
            first = false;
        }
        s.push('}');
        s
    }
}

impl fmt::Display for GroupMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        write!(f, "T[")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl Monomial for GroupMonomial {
    fn combine(&self, other: &Self) -> Result<Self> {
        if self.exponents.len() != other.exponents.len() {
            return Err(Error::MonoidMismatch(format!(
                "group monomials of rank {} and {}",
                self.exponents.len(),
                other.exponents.len()
            )));
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GroupMonomial {
            exponents,
            pairing: self.pairing + other.pairing,
        })
    }

    fn degree(&self) -> i64 {
        -2 * self.pairing
    }

    fn is_unit(&self) -> bool {
        self.exponents.iter().all(|e| *e == 0)
    }

    fn unit_like(&self) -> Self {
        GroupMonomial::unit(self.exponents.len())
    }

    fn admissible(&self, mode: Mode) -> bool {
        mode == Mode::Laurent || self.is_unit() || self.pairing > 0
    }

    fn monoid_tag(&self) -> String {
        format!("T(rank {})", self.exponents.len())
    }

    fn json_value(&self) -> serde_json::Value {
        serde_json::json!({"T": self.exponents})
    }
}

/// A normalized formal sum of monomials with rational coefficients.
///
/// Terms are kept sorted in the canonical monomial order (ascending exponent
/// for `q`, lexicographic on the exponent vector for group monomials), with
/// no zero coefficients. Addition and multiplication re-normalize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffElement<M: Monomial> {
    mode: Mode,
    terms: Vec<(M, Rational)>,
}

impl<M: Monomial> CoeffElement<M> {
    pub fn zero(mode: Mode) -> Self {
        CoeffElement {
            mode,
            terms: vec![],
        }
    }

    /// The constant 1 on the given identity monomial.
    pub fn one(mode: Mode, unit: M) -> Self {
        CoeffElement {
            mode,
            terms: vec![(unit, Rational::one())],
        }
    }

    /// A single term `coeff * m`.
    pub fn monomial(mode: Mode, m: M, coeff: Rational) -> Result<Self> {
        Self::from_terms(mode, vec![(m, coeff)])
    }

    /// Normalize a list of terms: checks admissibility, sorts, merges equal
    /// monomials and drops zeros. Normalization is idempotent.
    pub fn from_terms(mode: Mode, mut terms: Vec<(M, Rational)>) -> Result<Self> {
        for (m, _) in &terms {
            if !m.admissible(mode) {
                return Err(Error::Positivity(m.to_string()));
            }
            if let Some((first, _)) = terms.first() {
                // Rank mismatches inside a single sum are monoid mismatches.
                first.combine(m)?;
            }
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(M, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Ok(CoeffElement { mode, terms: out })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[(M, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a given monomial (zero if absent).
    pub fn coefficient_of(&self, m: &M) -> Rational {
        self.terms
            .iter()
            .find(|(t, _)| t == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// The identity-monomial coefficient.
    pub fn unit_coefficient(&self) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_unit())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Degree when every term has the same one, `None` otherwise. The zero
    /// sum is homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.iter().map(|(m, _)| m.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::MonoidMismatch(format!(
                "{:?} against {:?} mode",
                self.mode, other.mode
            )));
        }
        if let (Some((a, _)), Some((b, _))) = (self.terms.first(), other.terms.first()) {
            a.combine(b)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.mode, terms)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CoeffElement {
            mode: self.mode,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(self.mode);
        }
        CoeffElement {
            mode: self.mode,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Distributive product; monomials multiply by adding exponent data.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                terms.push((ma.combine(mb)?, ca * cb));
            }
        }
        Self::from_terms(self.mode, terms)
    }

    /// Multiply every term by a fixed monomial.
    pub fn mul_monomial(&self, m: &M) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            terms.push((t.combine(m)?, c.clone()));
        }
        Self::from_terms(self.mode, terms)
    }

    /// Map monomials into another monoid (used by specialization and
    /// quotient pushforwards). The image is re-normalized.
    pub fn map_monomials<N: Monomial>(
        &self,
        mode: Mode,
        f: impl Fn(&M) -> Result<N>,
    ) -> Result<CoeffElement<N>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((f(m)?, c.clone()));
        }
        CoeffElement::from_terms(mode, terms)
    }
}

impl<M: Monomial> fmt::Display for CoeffElement<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_unit() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}
