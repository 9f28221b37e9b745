//! Graded ring engine: finite basis presentations with quantum structure
//! constants, elements, the product, and presentation verification.
//!
//! A [`RingPresentation`] is closed-world: products of basis classes are
//! defined by the stored table and nothing else. The table keeps one entry
//! per unordered pair (all degrees are even, so the ring is commutative) and
//! entries may be absent in model rings built in code, in which case
//! multiplying through an absent pair is an error. Documents loaded through
//! [`parse_ring`] must be complete.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exactalg::{
    parse_rational, rat, CoeffElement, GroupMonomial, Mode, Monomial, QMonomial, Rational,
};
use crate::expr;

/// A named homology class of even nonnegative degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisClass {
    pub name: String,
    pub degree: i64,
}

/// Coefficient system of a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientMode {
    /// Polynomials in the single degree -2 variable `q`.
    SingleQ,
    /// Positive group ring over a declared degree-2 basis, graded by the
    /// Chern pairing vector.
    GroupRing {
        h2_basis: Vec<String>,
        c1_pairing: Vec<i64>,
    },
}

/// An element of the ring: a formal sum of basis classes with coefficient
/// sums attached. Components are indexed by basis position and kept
/// normalized (no zero components).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QHElement<M: Monomial> {
    components: BTreeMap<usize, CoeffElement<M>>,
}

impl<M: Monomial> QHElement<M> {
    pub fn zero() -> Self {
        QHElement {
            components: BTreeMap::new(),
        }
    }

    pub fn from_components(components: BTreeMap<usize, CoeffElement<M>>) -> Self {
        let mut e = QHElement { components };
        e.components.retain(|_, c| !c.is_zero());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<usize, CoeffElement<M>> {
        &self.components
    }

    pub fn component(&self, idx: usize) -> Option<&CoeffElement<M>> {
        self.components.get(&idx)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.components.clone();
        for (i, c) in &other.components {
            let entry = match out.remove(i) {
                Some(prev) => prev.add(c)?,
                None => c.clone(),
            };
            if !entry.is_zero() {
                out.insert(*i, entry);
            }
        }
        Ok(QHElement { components: out })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QHElement {
            components: self.components.iter().map(|(i, c)| (*i, c.neg())).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        QHElement {
            components: self
                .components
                .iter()
                .map(|(i, c)| (*i, c.scale(k)))
                .collect(),
        }
    }

    /// Multiply every component by a coefficient element.
    pub fn mul_coeff(&self, c: &CoeffElement<M>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (i, comp) in &self.components {
            let prod = comp.mul(c)?;
            if !prod.is_zero() {
                out.insert(*i, prod);
            }
        }
        Ok(QHElement { components: out })
    }

    /// Multiply every component by a monomial.
    pub fn mul_monomial(&self, m: &M) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (i, comp) in &self.components {
            out.insert(*i, comp.mul_monomial(m)?);
        }
        Ok(QHElement { components: out })
    }
}

/// One check of a verification report.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

/// Outcome of [`RingPresentation::verify`]: six structural laws, each with a
/// pass flag and a witness or summary string.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub ring: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A finite graded basis with quantum structure constants.
#[derive(Debug, Clone)]
pub struct RingPresentation<M: Monomial> {
    pub name: String,
    /// Real dimension `2n` of the underlying manifold.
    pub dimension: i64,
    /// Minimal Chern number; `None` encodes infinity.
    pub minimal_chern: Option<i64>,
    pub basis: Vec<BasisClass>,
    pub unit: usize,
    pub point: usize,
    pub c1_dual: Option<QHElement<M>>,
    pub coefficient_mode: CoefficientMode,
    pub notes: Vec<String>,
    unit_monomial: M,
    table: BTreeMap<(usize, usize), QHElement<M>>,
}

impl<M: Monomial> RingPresentation<M> {
    /// Assemble a presentation from parts, checking the structural
    /// invariants (unique names, even degrees, unit/point degrees, entry
    /// homogeneity). `table` holds one entry per unordered pair; absent
    /// pairs are legal here and error only when multiplied through.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        name: String,
        dimension: i64,
        minimal_chern: Option<i64>,
        basis: Vec<BasisClass>,
        unit: usize,
        point: usize,
        coefficient_mode: CoefficientMode,
        unit_monomial: M,
        table: BTreeMap<(usize, usize), QHElement<M>>,
        notes: Vec<String>,
    ) -> Result<Self> {
        if dimension <= 0 || dimension % 2 != 0 {
            return Err(Error::Document(format!(
                "dimension must be a positive even integer, got {dimension}"
            )));
        }
        if let Some(c) = minimal_chern {
            if c <= 0 {
                return Err(Error::Document(format!(
                    "minimal Chern number must be positive, got {c}"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for b in &basis {
            if !seen.insert(b.name.clone()) {
                return Err(Error::Document(format!(
                    "duplicate basis name `{}`",
                    b.name
                )));
            }
            if b.degree < 0 || b.degree > dimension || b.degree % 2 != 0 {
                return Err(Error::Document(format!(
                    "basis class `{}` has degree {}, expected an even degree in 0..={dimension}",
                    b.name, b.degree
                )));
            }
        }
        if basis.get(unit).map(|b| b.degree) != Some(dimension) {
            return Err(Error::Document("unit class must have top degree".into()));
        }
        if basis.get(point).map(|b| b.degree) != Some(0) {
            return Err(Error::Document("point class must have degree 0".into()));
        }
        let ring = RingPresentation {
            name,
            dimension,
            minimal_chern,
            basis,
            unit,
            point,
            c1_dual: None,
            coefficient_mode,
            notes,
            unit_monomial,
            table,
        };
        for ((i, j), entry) in &ring.table {
            if *i > *j || *j >= ring.basis.len() {
                return Err(Error::Document(format!(
                    "table entry with out-of-range pair ({i}, {j})"
                )));
            }
            let expected = ring.basis[*i].degree + ring.basis[*j].degree - ring.dimension;
            if let Some(bad) = ring.inhomogeneous_at(entry, expected) {
                return Err(Error::Document(format!(
                    "inhomogeneous entry ({},{}): term of degree {} where {} was expected",
                    ring.basis[*i].name, ring.basis[*j].name, bad, expected
                )));
            }
        }
        Ok(ring)
    }

    fn inhomogeneous_at(&self, e: &QHElement<M>, expected: i64) -> Option<i64> {
        for (idx, coeff) in e.components() {
            for (m, _) in coeff.terms() {
                let d = self.basis[*idx].degree + m.degree();
                if d != expected {
                    return Some(d);
                }
            }
        }
        None
    }

    pub fn set_c1_dual(&mut self, e: QHElement<M>) {
        self.c1_dual = Some(e);
    }

    /// Half the ambient dimension; the degree of a middle-dimensional class.
    pub fn middle_degree(&self) -> i64 {
        self.dimension / 2
    }

    pub fn mode(&self) -> Mode {
        Mode::Positive
    }

    pub fn unit_monomial(&self) -> M {
        self.unit_monomial.clone()
    }

    pub fn class_index(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    pub fn table_entry(&self, i: usize, j: usize) -> Option<&QHElement<M>> {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.table.get(&key)
    }

    pub fn table_pairs(&self) -> impl Iterator<Item = (usize, usize, &QHElement<M>)> {
        self.table.iter().map(|((i, j), e)| (*i, *j, e))
    }

    /// The multiplicative unit as an element.
    pub fn unit_element(&self) -> QHElement<M> {
        self.element_from_class(self.unit)
    }

    pub fn element_from_class(&self, idx: usize) -> QHElement<M> {
        let mut components = BTreeMap::new();
        components.insert(
            idx,
            CoeffElement::one(self.mode(), self.unit_monomial.clone()),
        );
        QHElement { components }
    }

    /// Parse a classical linear combination of basis classes.
    pub fn parse_class_expr(&self, src: &str) -> Result<QHElement<M>> {
        let names: Vec<String> = self.basis.iter().map(|b| b.name.clone()).collect();
        let terms = expr::parse_linear_combination(src, &names)?;
        let mut components = BTreeMap::new();
        for t in terms {
            components.insert(
                t.index,
                CoeffElement::monomial(
                    self.mode(),
                    self.unit_monomial.clone(),
                    Rational::from_integer(t.coeff),
                )?,
            );
        }
        Ok(QHElement::from_components(components))
    }

    /// Degree of a homogeneous element, `None` for 0 or mixed elements.
    pub fn degree_of(&self, e: &QHElement<M>) -> Option<i64> {
        let mut degree = None;
        for (idx, coeff) in e.components() {
            for (m, _) in coeff.terms() {
                let d = self.basis[*idx].degree + m.degree();
                match degree {
                    None => degree = Some(d),
                    Some(prev) if prev != d => return None,
                    _ => {}
                }
            }
        }
        degree
    }

    /// True when the element is a combination of basis classes with identity
    /// monomial coefficients only.
    pub fn is_classical(&self, e: &QHElement<M>) -> bool {
        e.components()
            .values()
            .all(|c| c.terms().iter().all(|(m, _)| m.is_unit()))
    }

    /// The quantum product, extended bilinearly from the table.
    pub fn mul(&self, a: &QHElement<M>, b: &QHElement<M>) -> Result<QHElement<M>> {
        let mut acc = QHElement::zero();
        for (i, ca) in a.components() {
            for (j, cb) in b.components() {
                let entry = self
                    .table_entry(*i, *j)
                    .ok_or_else(|| Error::UndefinedProduct {
                        ring: self.name.clone(),
                        left: self.basis[*i].name.clone(),
                        right: self.basis[*j].name.clone(),
                    })?;
                let scale = ca.mul(cb)?;
                acc = acc.add(&entry.mul_coeff(&scale)?)?;
            }
        }
        Ok(acc)
    }

    /// `k`-fold product; `k = 0` gives the unit.
    pub fn pow(&self, a: &QHElement<M>, k: u32) -> Result<QHElement<M>> {
        let mut acc = self.unit_element();
        for _ in 0..k {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// The identity-monomial part of an element.
    pub fn classical_part(&self, a: &QHElement<M>) -> QHElement<M> {
        let mut components = BTreeMap::new();
        for (i, coeff) in a.components() {
            let c = coeff.unit_coefficient();
            if !c.is_zero() {
                components.insert(
                    *i,
                    CoeffElement::monomial(self.mode(), self.unit_monomial.clone(), c)
                        .expect("unit monomial is always admissible"),
                );
            }
        }
        QHElement { components }
    }

    /// Intersection number of two classical combinations of complementary
    /// degree: the point-class coefficient of the classical part of their
    /// product.
    pub fn intersection_number(&self, a: &QHElement<M>, b: &QHElement<M>) -> Result<Rational> {
        if !self.is_classical(a) || !self.is_classical(b) {
            return Err(Error::Precondition(
                "intersection numbers are defined for classical elements".into(),
            ));
        }
        match (self.degree_of(a), self.degree_of(b)) {
            (Some(da), Some(db)) if da + db == self.dimension => {}
            (None, _) | (_, None) => {
                // Zero inputs pair to zero; mixed-degree inputs are rejected.
                if a.is_zero() || b.is_zero() {
                    return Ok(Rational::zero());
                }
                return Err(Error::Degree(
                    "intersection number needs homogeneous inputs".into(),
                ));
            }
            (Some(da), Some(db)) => {
                return Err(Error::Degree(format!(
                    "deg {da} + deg {db} != {}",
                    self.dimension
                )));
            }
        }
        let prod = self.mul(a, b)?;
        let classical = self.classical_part(&prod);
        Ok(classical
            .component(self.point)
            .map(|c| c.unit_coefficient())
            .unwrap_or_else(Rational::zero))
    }

    pub fn render(&self, e: &QHElement<M>) -> String {
        render_element(self, e)
    }

    /// Run the six presentation checks: degree homogeneity (V1), unit law
    /// (V2), commutativity (V3), associativity over every basis triple (V4),
    /// the point-class-only-classical law (V5), and exponent positivity
    /// (V6). Failures are report items, not errors.
    pub fn verify(&self) -> VerificationReport {
        let n = self.basis.len();
        let mut checks = Vec::new();

        // V1: degree homogeneity of every entry.
        let mut v1 = Check {
            id: "V1",
            name: "degree homogeneity",
            passed: true,
            details: format!("{} entries", self.table.len()),
        };
        for (i, j, entry) in self.table_pairs() {
            let expected = self.basis[i].degree + self.basis[j].degree - self.dimension;
            if let Some(bad) = self.inhomogeneous_at(entry, expected) {
                v1.passed = false;
                v1.details = format!(
                    "inhomogeneous entry ({},{}): degree {bad}, expected {expected}",
                    self.basis[i].name, self.basis[j].name
                );
                break;
            }
        }
        checks.push(v1);

        // V2: unit law on every basis class.
        let mut v2 = Check {
            id: "V2",
            name: "unit law",
            passed: true,
            details: format!("{n} classes"),
        };
        for i in 0..n {
            let b = self.element_from_class(i);
            match self.mul(&self.unit_element(), &b) {
                Ok(p) if p == b => {}
                Ok(_) | Err(_) => {
                    v2.passed = false;
                    v2.details = format!("unit * {} != {}", self.basis[i].name, self.basis[i].name);
                    break;
                }
            }
        }
        checks.push(v2);

        // V3: commutativity on all pairs.
        let mut v3 = Check {
            id: "V3",
            name: "commutativity",
            passed: true,
            details: format!("{} pairs", n * n),
        };
        'v3: for i in 0..n {
            for j in 0..n {
                let a = self.element_from_class(i);
                let b = self.element_from_class(j);
                match (self.mul(&a, &b), self.mul(&b, &a)) {
                    (Ok(x), Ok(y)) if x == y => {}
                    _ => {
                        v3.passed = false;
                        v3.details =
                            format!("{} * {} asymmetric", self.basis[i].name, self.basis[j].name);
                        break 'v3;
                    }
                }
            }
        }
        checks.push(v3);

        // V4: associativity over every basis triple.
        let mut v4 = Check {
            id: "V4",
            name: "associativity",
            passed: true,
            details: format!("{} triples", n * n * n),
        };
        'v4: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.element_from_class(i);
                    let b = self.element_from_class(j);
                    let c = self.element_from_class(k);
                    let left = self.mul(&a, &b).and_then(|ab| self.mul(&ab, &c));
                    let right = self.mul(&b, &c).and_then(|bc| self.mul(&a, &bc));
                    match (left, right) {
                        (Ok(x), Ok(y)) if x == y => {}
                        _ => {
                            v4.passed = false;
                            v4.details = format!(
                                "witness triple ({}, {}, {})",
                                self.basis[i].name, self.basis[j].name, self.basis[k].name
                            );
                            break 'v4;
                        }
                    }
                }
            }
        }
        checks.push(v4);

        // V5: the point class appears only at the identity monomial in
        // products of classical basis elements.
        let mut v5 = Check {
            id: "V5",
            name: "point class classical only",
            passed: true,
            details: format!("{} entries", self.table.len()),
        };
        for (i, j, entry) in self.table_pairs() {
            if let Some(coeff) = entry.component(self.point) {
                if coeff.terms().iter().any(|(m, _)| !m.is_unit()) {
                    v5.passed = false;
                    v5.details = format!(
                        "point class at a quantum monomial in ({},{})",
                        self.basis[i].name, self.basis[j].name
                    );
                    break;
                }
            }
        }
        checks.push(v5);

        // V6: exponent positivity.
        let mut v6 = Check {
            id: "V6",
            name: "exponent positivity",
            passed: true,
            details: format!("{} entries", self.table.len()),
        };
        'v6: for (i, j, entry) in self.table_pairs() {
            for coeff in entry.components().values() {
                for (m, _) in coeff.terms() {
                    if !m.admissible(Mode::Positive) {
                        v6.passed = false;
                        v6.details = format!(
                            "monomial {m} outside the positive cone in ({},{})",
                            self.basis[i].name, self.basis[j].name
                        );
                        break 'v6;
                    }
                }
            }
        }
        checks.push(v6);

        VerificationReport {
            ring: self.name.clone(),
            checks,
        }
    }
}

fn render_element<M: Monomial>(ring: &RingPresentation<M>, e: &QHElement<M>) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    // Group terms by monomial so output reads like a table entry:
    // -2p + (E1+E2)q + 2u q^2.
    let mut by_monomial: BTreeMap<M, Vec<(usize, Rational)>> = BTreeMap::new();
    for (idx, coeff) in e.components() {
        for (m, c) in coeff.terms() {
            by_monomial
                .entry(m.clone())
                .or_default()
                .push((*idx, c.clone()));
        }
    }
    let mut groups: Vec<(M, Vec<(usize, Rational)>)> = by_monomial.into_iter().collect();
    groups.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(a.0.cmp(&b.0)));
    let mut out = String::new();
    for (gi, (m, mut classes)) in groups.into_iter().enumerate() {
        classes.sort_by_key(|(idx, _)| *idx);
        let combo = render_combo(ring, &classes);
        let piece = if m.is_unit() {
            combo.text
        } else if combo.single_term {
            format!("{}*{}", combo.text, m)
        } else {
            format!("({})*{}", combo.text, m)
        };
        if gi == 0 {
            out.push_str(&piece);
        } else if let Some(rest) = piece.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&piece);
        }
    }
    out
}

struct Combo {
    text: String,
    single_term: bool,
}

fn render_combo<M: Monomial>(ring: &RingPresentation<M>, classes: &[(usize, Rational)]) -> Combo {
    let mut text = String::new();
    for (i, (idx, c)) in classes.iter().enumerate() {
        let name = &ring.basis[*idx].name;
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                text.push('-');
            }
        } else if neg {
            text.push_str(" - ");
        } else {
            text.push_str(" + ");
        }
        if abs == rat(1) {
            text.push_str(name);
        } else {
            text.push_str(&format!("{abs}*{name}"));
        }
    }
    Combo {
        single_term: classes.len() == 1,
        text,
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "presentation `{}`:", self.ring)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {:28} {} ({})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.id,
                c.details
            )?;
        }
        Ok(())
    }
}

/// Runtime wrapper over the two coefficient systems.
#[derive(Debug, Clone)]
pub enum Ring {
    Q(RingPresentation<QMonomial>),
    Group(RingPresentation<GroupMonomial>),
}

impl Ring {
    pub fn name(&self) -> &str {
        match self {
            Ring::Q(r) => &r.name,
            Ring::Group(r) => &r.name,
        }
    }

    pub fn verify(&self) -> VerificationReport {
        match self {
            Ring::Q(r) => r.verify(),
            Ring::Group(r) => r.verify(),
        }
    }

    pub fn as_q(&self) -> Result<&RingPresentation<QMonomial>> {
        match self {
            Ring::Q(r) => Ok(r),
            Ring::Group(r) => Err(Error::Precondition(format!(
                "`{}` is a group-ring presentation; a single-q presentation is required",
                r.name
            ))),
        }
    }

    pub fn as_group(&self) -> Result<&RingPresentation<GroupMonomial>> {
        match self {
            Ring::Group(r) => Ok(r),
            Ring::Q(r) => Err(Error::Precondition(format!(
                "`{}` is a single-q presentation; a group-ring presentation is required",
                r.name
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Document format
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    name: String,
    dimension: i64,
    minimal_chern: serde_json::Value,
    coefficient_mode: RawMode,
    basis: Vec<RawBasis>,
    unit: String,
    point: String,
    #[serde(default)]
    c1_dual: Option<String>,
    #[serde(default)]
    notes: Vec<String>,
    table: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMode {
    Tag(String),
    Group { group_ring: RawGroupRing },
}

#[derive(Deserialize)]
struct RawGroupRing {
    h2_basis: Vec<String>,
    c1_pairing: Vec<i64>,
}

#[derive(Deserialize)]
struct RawBasis {
    name: String,
    degree: i64,
}

#[derive(Deserialize)]
struct RawEntry {
    left: String,
    right: String,
    result: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawTerm {
    class: String,
    coeff: serde_json::Value,
    monomial: RawMonomial,
}

#[derive(Deserialize)]
enum RawMonomial {
    #[serde(rename = "q")]
    Q(i64),
    #[serde(rename = "T")]
    T(Vec<i64>),
}

fn coeff_value(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::Document(format!("non-integer coefficient {n}")))?;
            Ok(rat(i))
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::Document(format!("bad coefficient value {other}"))),
    }
}

/// Parse and validate a ring presentation document.
pub fn parse_ring(doc: &str) -> Result<Ring> {
    let raw: RawRing = serde_json::from_str(doc)?;
    let minimal_chern = match &raw.minimal_chern {
        serde_json::Value::Number(n) => Some(
            n.as_i64()
                .ok_or_else(|| Error::Document(format!("bad minimal_chern {n}")))?,
        ),
        serde_json::Value::String(s) if s == "infinity" => None,
        serde_json::Value::Null => None,
        other => return Err(Error::Document(format!("bad minimal_chern {other}"))),
    };
    let basis: Vec<BasisClass> = raw
        .basis
        .iter()
        .map(|b| BasisClass {
            name: b.name.clone(),
            degree: b.degree,
        })
        .collect();
    let names: Vec<String> = basis.iter().map(|b| b.name.clone()).collect();
    let class_index = |name: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    };
    let unit = class_index(&raw.unit)?;
    let point = class_index(&raw.point)?;

    match &raw.coefficient_mode {
        RawMode::Tag(t) if t == "q" => {
            let mut table = BTreeMap::new();
            for entry in &raw.table {
                let i = class_index(&entry.left)?;
                let j = class_index(&entry.right)?;
                let key = if i <= j { (i, j) } else { (j, i) };
                let mut components: BTreeMap<usize, Vec<(QMonomial, Rational)>> = BTreeMap::new();
                for term in &entry.result {
                    let idx = class_index(&term.class)?;
                    let m = match &term.monomial {
                        RawMonomial::Q(k) => QMonomial::new(*k),
                        RawMonomial::T(_) => {
                            return Err(Error::Document(format!(
                                "group monomial in single-q entry ({},{})",
                                entry.left, entry.right
                            )))
                        }
                    };
                    components
                        .entry(idx)
                        .or_default()
                        .push((m, coeff_value(&term.coeff)?));
                }
                let mut element = BTreeMap::new();
                for (idx, terms) in components {
                    element.insert(idx, CoeffElement::from_terms(Mode::Positive, terms)?);
                }
                if table
                    .insert(key, QHElement::from_components(element))
                    .is_some()
                {
                    return Err(Error::Document(format!(
                        "duplicate table pair ({},{})",
                        entry.left, entry.right
                    )));
                }
            }
            require_complete(&names, &table)?;
            let mut ring = RingPresentation::assemble(
                raw.name,
                raw.dimension,
                minimal_chern,
                basis,
                unit,
                point,
                CoefficientMode::SingleQ,
                QMonomial::unit(),
                table,
                raw.notes,
            )?;
            if let Some(src) = &raw.c1_dual {
                let e = ring.parse_class_expr(src)?;
                check_c1_degree(&ring, &e)?;
                ring.set_c1_dual(e);
            }
            Ok(Ring::Q(ring))
        }
        RawMode::Group { group_ring } => {
            let rank = group_ring.h2_basis.len();
            if group_ring.c1_pairing.len() != rank {
                return Err(Error::Document(
                    "c1_pairing length differs from h2_basis length".into(),
                ));
            }
            let pairing = group_ring.c1_pairing.clone();
            let mut table = BTreeMap::new();
            for entry in &raw.table {
                let i = class_index(&entry.left)?;
                let j = class_index(&entry.right)?;
                let key = if i <= j { (i, j) } else { (j, i) };
                let mut components: BTreeMap<usize, Vec<(GroupMonomial, Rational)>> =
                    BTreeMap::new();
                for term in &entry.result {
                    let idx = class_index(&term.class)?;
                    let m = match &term.monomial {
                        RawMonomial::T(v) => {
                            if v.len() != rank {
                                return Err(Error::Document(format!(
                                    "monomial vector of length {} in entry ({},{}), expected {rank}",
                                    v.len(),
                                    entry.left,
                                    entry.right
                                )));
                            }
                            GroupMonomial::from_pairing_vector(v.clone(), &pairing)?
                        }
                        RawMonomial::Q(_) => {
                            return Err(Error::Document(format!(
                                "q monomial in group-ring entry ({},{})",
                                entry.left, entry.right
                            )))
                        }
                    };
                    components
                        .entry(idx)
                        .or_default()
                        .push((m, coeff_value(&term.coeff)?));
                }
                let mut element = BTreeMap::new();
                for (idx, terms) in components {
                    element.insert(idx, CoeffElement::from_terms(Mode::Positive, terms)?);
                }
                if table
                    .insert(key, QHElement::from_components(element))
                    .is_some()
                {
                    return Err(Error::Document(format!(
                        "duplicate table pair ({},{})",
                        entry.left, entry.right
                    )));
                }
            }
            require_complete(&names, &table)?;
            let mut ring = RingPresentation::assemble(
                raw.name,
                raw.dimension,
                minimal_chern,
                basis,
                unit,
                point,
                CoefficientMode::GroupRing {
                    h2_basis: group_ring.h2_basis.clone(),
                    c1_pairing: pairing,
                },
                GroupMonomial::unit(rank),
                table,
                raw.notes,
            )?;
            if let Some(src) = &raw.c1_dual {
                let e = ring.parse_class_expr(src)?;
                check_c1_degree(&ring, &e)?;
                ring.set_c1_dual(e);
            }
            Ok(Ring::Group(ring))
        }
        RawMode::Tag(other) => Err(Error::Document(format!(
            "unknown coefficient_mode `{other}`"
        ))),
    }
}

fn check_c1_degree<M: Monomial>(ring: &RingPresentation<M>, e: &QHElement<M>) -> Result<()> {
    match ring.degree_of(e) {
        Some(d) if d == ring.dimension - 2 => Ok(()),
        other => Err(Error::Document(format!(
            "c1_dual must be homogeneous of degree {}, got {:?}",
            ring.dimension - 2,
            other
        ))),
    }
}

fn require_complete<M: Monomial>(
    names: &[String],
    table: &BTreeMap<(usize, usize), QHElement<M>>,
) -> Result<()> {
    for i in 0..names.len() {
        for j in i..names.len() {
            if !table.contains_key(&(i, j)) {
                return Err(Error::Document(format!(
                    "missing table entry ({},{})",
                    names[i], names[j]
                )));
            }
        }
    }
    Ok(())
}

/// Serialize an element in the document term format: a list of
/// `{class, coeff, monomial}` objects.
pub fn element_to_json<M: Monomial>(
    ring: &RingPresentation<M>,
    e: &QHElement<M>,
) -> serde_json::Value {
    use serde_json::json;
    let mut out = Vec::new();
    for (idx, coeff) in e.components() {
        for (m, c) in coeff.terms() {
            out.push(json!({
                "class": ring.basis[*idx].name,
                "coeff": c.to_string(),
                "monomial": m.json_value(),
            }));
        }
    }
    serde_json::Value::Array(out)
}

/// Render a classical element as a linear-combination string (the c1_dual
/// grammar).
fn render_linear<M: Monomial>(ring: &RingPresentation<M>, e: &QHElement<M>) -> String {
    let mut out = String::new();
    for (idx, coeff) in e.components() {
        let c = coeff.unit_coefficient();
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push('-');
        } else {
            out.push('+');
        }
        if !abs.is_one() {
            out.push_str(&abs.to_string());
        }
        out.push_str(&ring.basis[*idx].name);
    }
    out
}

/// Serialize a presentation back to the document format.
pub fn ring_to_json(ring: &Ring) -> serde_json::Value {
    use serde_json::{json, Value};
    fn term_values<M: Monomial>(
        e: &QHElement<M>,
        names: &[String],
        mono: impl Fn(&M) -> Value,
    ) -> Vec<Value> {
        let mut out = Vec::new();
        for (idx, coeff) in e.components() {
            for (m, c) in coeff.terms() {
                let coeff_v = if c.is_integer() {
                    json!(c.numer().to_string().parse::<i64>().ok())
                } else {
                    json!(c.to_string())
                };
                out.push(json!({
                    "class": names[*idx],
                    "coeff": coeff_v,
                    "monomial": mono(m),
                }));
            }
        }
        out
    }
    match ring {
        Ring::Q(r) => {
            let names: Vec<String> = r.basis.iter().map(|b| b.name.clone()).collect();
            let table: Vec<Value> = r
                .table_pairs()
                .map(|(i, j, e)| {
                    json!({
                        "left": names[i],
                        "right": names[j],
                        "result": term_values(e, &names, |m: &QMonomial| json!({"q": m.exponent})),
                    })
                })
                .collect();
            json!({
                "name": r.name,
                "dimension": r.dimension,
                "minimal_chern": r.minimal_chern.map_or(json!("infinity"), |c| json!(c)),
                "coefficient_mode": "q",
                "basis": r.basis.iter().map(|b| json!({"name": b.name, "degree": b.degree})).collect::<Vec<_>>(),
                "unit": names[r.unit],
                "point": names[r.point],
                "c1_dual": r.c1_dual.as_ref().map(|e| render_linear(r, e)),
                "notes": r.notes,
                "table": table,
            })
        }
        Ring::Group(r) => {
            let names: Vec<String> = r.basis.iter().map(|b| b.name.clone()).collect();
            let (h2, pairing) = match &r.coefficient_mode {
                CoefficientMode::GroupRing {
                    h2_basis,
                    c1_pairing,
                } => (h2_basis, c1_pairing),
                CoefficientMode::SingleQ => unreachable!("group ring carries group mode"),
            };
            let table: Vec<Value> = r
                .table_pairs()
                .map(|(i, j, e)| {
                    json!({
                        "left": names[i],
                        "right": names[j],
                        "result": term_values(e, &names, |m: &GroupMonomial| json!({"T": m.exponents})),
                    })
                })
                .collect();
            json!({
                "name": r.name,
                "dimension": r.dimension,
                "minimal_chern": r.minimal_chern.map_or(json!("infinity"), |c| json!(c)),
                "coefficient_mode": {"group_ring": {"h2_basis": h2, "c1_pairing": pairing}},
                "basis": r.basis.iter().map(|b| json!({"name": b.name, "degree": b.degree})).collect::<Vec<_>>(),
                "unit": names[r.unit],
                "point": names[r.point],
                "c1_dual": r.c1_dual.as_ref().map(|e| render_linear(r, e)),
                "notes": r.notes,
                "table": table,
            })
        }
    }
}

/// Integer cast helper for rationals that must be integral.
pub fn rational_to_bigint(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::load_preset;

    fn m2() -> RingPresentation<QMonomial> {
        load_preset("M2").unwrap().as_q().unwrap().clone()
    }

    #[test]
    fn product_of_exceptional_classes() {
        let r = m2();
        let e1 = r.parse_class_expr("E1").unwrap();
        let e2 = r.parse_class_expr("E2").unwrap();
        let prod = r.mul(&e1, &e2).unwrap();
        let expected = r
            .parse_class_expr("H-E1-E2")
            .unwrap()
            .mul_monomial(&QMonomial::new(1))
            .unwrap();
        assert_eq!(prod, expected);
        assert_eq!(r.render(&prod), "(H - E1 - E2)*q");
    }

    #[test]
    fn unit_law_and_powers() {
        let r = m2();
        let h = r.parse_class_expr("H").unwrap();
        assert_eq!(r.mul(&r.unit_element(), &h).unwrap(), h);
        assert_eq!(r.pow(&h, 1).unwrap(), h);
        assert_eq!(r.pow(&h, 0).unwrap(), r.unit_element());
    }

    #[test]
    fn sphere_triple_power_in_m2() {
        let r = m2();
        let l = r.parse_class_expr("E1-E2").unwrap();
        let cube = r.pow(&l, 3).unwrap();
        let expected = l.mul_monomial(&QMonomial::new(2)).unwrap().scale(&rat(5));
        assert_eq!(cube, expected);
    }

    #[test]
    fn m3_square_of_difference() {
        let ring = load_preset("M3").unwrap();
        let r = ring.as_q().unwrap();
        let l = r.parse_class_expr("E1-E2").unwrap();
        let sq = r.mul(&l, &l).unwrap();
        // -2p + 2(H-E3)q + 2u q^2, cross-checked by expanding the table.
        let expected = r
            .parse_class_expr("-2p")
            .unwrap()
            .add(
                &r.parse_class_expr("2H-2E3")
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
        assert_eq!(sq, expected);
        // (H-E1-E2-E3)^3 = -3 (H-E1-E2-E3) q^2.
        let g = r.parse_class_expr("H-E1-E2-E3").unwrap();
        let cube = r.pow(&g, 3).unwrap();
        assert_eq!(
            cube,
            g.mul_monomial(&QMonomial::new(2)).unwrap().scale(&rat(-3))
        );
    }

    #[test]
    fn classical_part_examples() {
        let r = m2();
        let h = r.parse_class_expr("H").unwrap();
        let hh = r.mul(&h, &h).unwrap();
        assert_eq!(r.classical_part(&hh), r.parse_class_expr("p").unwrap());
        let e1 = r.parse_class_expr("E1").unwrap();
        let sq = r.mul(&e1, &e1).unwrap();
        assert_eq!(r.classical_part(&sq), r.parse_class_expr("-p").unwrap());
        let uq = r.unit_element().mul_monomial(&QMonomial::new(1)).unwrap();
        assert!(r.classical_part(&uq).is_zero());
    }

    #[test]
    fn intersection_numbers() {
        let r = m2();
        let l = r.parse_class_expr("E1-E2").unwrap();
        assert_eq!(r.intersection_number(&l, &l).unwrap(), rat(-2));
        let h = r.parse_class_expr("H").unwrap();
        assert_eq!(r.intersection_number(&h, &h).unwrap(), rat(1));
        assert_eq!(r.intersection_number(&h, &l).unwrap(), rat(0));
        // Degree mismatch is rejected.
        let p = r.parse_class_expr("p").unwrap();
        assert!(r.intersection_number(&p, &l).is_err());
    }

    #[test]
    fn verify_passes_on_shipped_table() {
        let r = m2();
        let report = r.verify();
        assert!(report.all_passed(), "{report}");
        assert!(report
            .checks
            .iter()
            .any(|c| c.id == "V4" && c.details.contains("125 triples")));
    }

    #[test]
    fn verify_catches_perturbed_association() {
        // Bump the E1*E2 coefficient by one: associativity must fail and
        // name a witness triple.
        let mut r = m2();
        let i = r.class_index("E1").unwrap();
        let j = r.class_index("E2").unwrap();
        let entry = r.table_entry(i, j).unwrap().clone();
        let bump = r
            .parse_class_expr("H")
            .unwrap()
            .mul_monomial(&QMonomial::new(1))
            .unwrap();
        let key = if i <= j { (i, j) } else { (j, i) };
        r.table.insert(key, entry.add(&bump).unwrap());
        let report = r.verify();
        let v4 = report.checks.iter().find(|c| c.id == "V4").unwrap();
        assert!(!v4.passed);
        assert!(v4.details.contains("witness triple"));
    }

    #[test]
    fn parse_rejects_inhomogeneous_entry() {
        // Degree-violating document: H*H claims a degree-2 class at q^0.
        let doc = serde_json::json!({
            "name": "bad",
            "dimension": 4,
            "minimal_chern": 1,
            "coefficient_mode": "q",
            "basis": [
                {"name": "p", "degree": 0},
                {"name": "H", "degree": 2},
                {"name": "u", "degree": 4},
            ],
            "unit": "u",
            "point": "p",
            "table": [
                {"left": "p", "right": "p", "result": []},
                {"left": "p", "right": "H", "result": []},
                {"left": "p", "right": "u", "result": [{"class": "p", "coeff": 1, "monomial": {"q": 0}}]},
                {"left": "H", "right": "H", "result": [{"class": "H", "coeff": 1, "monomial": {"q": 0}}]},
                {"left": "H", "right": "u", "result": [{"class": "H", "coeff": 1, "monomial": {"q": 0}}]},
                {"left": "u", "right": "u", "result": [{"class": "u", "coeff": 1, "monomial": {"q": 0}}]},
            ],
        });
        let err = parse_ring(&doc.to_string()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("inhomogeneous entry (H,H)"), "{msg}");
    }

    #[test]
    fn parse_rejects_duplicates_and_gaps() {
        let mut doc = serde_json::json!({
            "name": "bad",
            "dimension": 4,
            "minimal_chern": 1,
            "coefficient_mode": "q",
            "basis": [
                {"name": "p", "degree": 0},
                {"name": "u", "degree": 4},
            ],
            "unit": "u",
            "point": "p",
            "table": [
                {"left": "p", "right": "p", "result": []},
                {"left": "p", "right": "u", "result": [{"class": "p", "coeff": 1, "monomial": {"q": 0}}]},
            ],
        });
        let err = parse_ring(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("missing table entry (u,u)"));
        let table = doc["table"].as_array_mut().unwrap();
        table.push(serde_json::json!(
            {"left": "u", "right": "u", "result": [{"class": "u", "coeff": 1, "monomial": {"q": 0}}]}
        ));
        table.push(serde_json::json!(
            {"left": "u", "right": "p", "result": [{"class": "p", "coeff": 1, "monomial": {"q": 0}}]}
        ));
        let err = parse_ring(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("duplicate table pair"));
    }

    #[test]
    fn group_ring_mul_matches_display() {
        let ring = load_preset("M2T").unwrap();
        let r = ring.as_group().unwrap();
        let e1 = r.parse_class_expr("E1").unwrap();
        let e2 = r.parse_class_expr("E2").unwrap();
        let prod = r.mul(&e1, &e2).unwrap();
        let hm = GroupMonomial::from_pairing_vector(vec![1, -1, -1], &[3, 1, 1]).unwrap();
        let expected = r
            .parse_class_expr("H-E1-E2")
            .unwrap()
            .mul_monomial(&hm)
            .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn infinite_chern_sentinel_parses() {
        let doc = serde_json::json!({
            "name": "aspherical",
            "dimension": 4,
            "minimal_chern": "infinity",
            "coefficient_mode": "q",
            "basis": [
                {"name": "p", "degree": 0},
                {"name": "u", "degree": 4},
            ],
            "unit": "u",
            "point": "p",
            "table": [
                {"left": "p", "right": "p", "result": []},
                {"left": "p", "right": "u", "result": [{"class": "p", "coeff": 1, "monomial": {"q": 0}}]},
                {"left": "u", "right": "u", "result": [{"class": "u", "coeff": 1, "monomial": {"q": 0}}]},
            ],
        });
        let ring = parse_ring(&doc.to_string()).unwrap();
        let r = ring.as_q().unwrap();
        assert_eq!(r.minimal_chern, None);
    }

    #[test]
    fn json_roundtrip_is_stable() {
        let ring = load_preset("M2").unwrap();
        let v = ring_to_json(&ring);
        let s1 = serde_json::to_string_pretty(&v).unwrap();
        let reparsed = parse_ring(&s1).unwrap();
        let s2 = serde_json::to_string_pretty(&ring_to_json(&reparsed)).unwrap();
        assert_eq!(s1, s2);
    }
}
