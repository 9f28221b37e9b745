//! Shipped ring presentations and symbolic model rings.
//!
//! The concrete del Pezzo tables (`M2`..`M6` and the group-ring refinement
//! `M2T`) live as JSON documents in the crate's `presets/` directory and are
//! embedded at compile time; the environment variable `QHLAG_PRESET_DIR`
//! points the loader at a directory of replacement documents instead, so
//! user-supplied rings travel through exactly the same path. Every preset is
//! re-verified on load — a failing table is reported, never patched.
//!
//! Hypersurface and quadric models are built in code. They carry the powers
//! of the hyperplane-like generator `x` as opaque basis classes `x1..`,
//! define only the products the middle-dimensional workflow needs, and
//! error on anything beyond.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exactalg::{rat, CoeffElement, Mode, Monomial, QMonomial, Rational};
use crate::qhring::{parse_ring, BasisClass, CoefficientMode, QHElement, Ring, RingPresentation};

pub const PRESET_NAMES: [&str; 6] = ["M2", "M3", "M4", "M5", "M6", "M2T"];

const EMBEDDED: [(&str, &str); 6] = [
    ("M2", include_str!("../presets/M2.json")),
    ("M3", include_str!("../presets/M3.json")),
    ("M4", include_str!("../presets/M4.json")),
    ("M5", include_str!("../presets/M5.json")),
    ("M6", include_str!("../presets/M6.json")),
    ("M2T", include_str!("../presets/M2T.json")),
];

const REFERENCE: &str = include_str!("../presets/reference.json");

/// The sign `(-1)^(n(n-1)/2)`; `eps * chi` is the self-intersection number
/// of a middle-dimensional class.
pub fn epsilon(n: i64) -> i64 {
    if (n * (n - 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn preset_document(name: &str) -> Result<String> {
    if let Ok(dir) = std::env::var("QHLAG_PRESET_DIR") {
        let path = std::path::Path::new(&dir).join(format!("{name}.json"));
        return Ok(std::fs::read_to_string(path)?);
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| doc.to_string())
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available: PRESET_NAMES.join(", "),
        })
}

/// Load a named preset, parse it, and verify it. A verification failure is
/// surfaced as an error naming the failed check.
pub fn load_preset(name: &str) -> Result<Ring> {
    if !PRESET_NAMES.contains(&name) && std::env::var("QHLAG_PRESET_DIR").is_err() {
        return Err(Error::UnknownPreset {
            name: name.to_string(),
            available: PRESET_NAMES.join(", "),
        });
    }
    let doc = preset_document(name)?;
    let ring = parse_ring(&doc)?;
    let report = ring.verify();
    if !report.all_passed() {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.id, c.details))
            .collect();
        return Err(Error::Inconsistent(format!(
            "preset `{name}` failed verification: {}",
            failed.join("; ")
        )));
    }
    Ok(ring)
}

/// Resolve a CLI-style ring source: `preset:NAME`, `quadric:N`,
/// `hypersurface:N,D`, or a path to a presentation document.
pub fn load_ring_source(source: &str) -> Result<Ring> {
    if let Some(name) = source.strip_prefix("preset:") {
        return load_preset(name);
    }
    if let Some(n) = source.strip_prefix("quadric:") {
        let n: i64 = n
            .parse()
            .map_err(|_| Error::Document(format!("bad quadric dimension `{n}`")))?;
        return hypersurface_model(n, 2);
    }
    if let Some(spec) = source.strip_prefix("hypersurface:") {
        let (n, d) = spec
            .split_once(',')
            .ok_or_else(|| Error::Document("expected hypersurface:N,D".into()))?;
        let n: i64 = n
            .trim()
            .parse()
            .map_err(|_| Error::Document(format!("bad dimension `{n}`")))?;
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|_| Error::Document(format!("bad degree `{d}`")))?;
        return hypersurface_model(n, d);
    }
    let doc = std::fs::read_to_string(source)?;
    let ring = parse_ring(&doc)?;
    let report = ring.verify();
    if !report.all_passed() {
        return Err(Error::Inconsistent(format!(
            "presentation `{}` failed verification",
            ring.name()
        )));
    }
    Ok(ring)
}

/// Model ring of a degree-`d` hypersurface of complex dimension `n` in
/// projective space, `2 <= d <= n+1` (the Fano range), `n` even.
///
/// Basis: `x0` (the unit), `x1..x{n-1}` (opaque powers of the hyperplane
/// generator), `pt` (the point; the n-th power of the generator is `d * pt`),
/// and the middle class `a` with `a . a = 2 eps`. Products outside the
/// defined fragment (`pt*pt`, `pt*xi`, powers past the point class) are
/// absent and error when used.
pub fn hypersurface_model(n: i64, d: i64) -> Result<Ring> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Precondition(format!(
            "model needs even complex dimension n >= 2, got {n}"
        )));
    }
    if d < 2 || d > n + 1 {
        return Err(Error::Precondition(format!(
            "degree outside the Fano range 2 <= d <= {}: got {d}",
            n + 1
        )));
    }
    let chern = n + 2 - d;
    let dimension = 2 * n;
    // Basis layout: x0 .. x(n-1), pt, a.
    let mut basis: Vec<BasisClass> = (0..n)
        .map(|k| BasisClass {
            name: format!("x{k}"),
            degree: dimension - 2 * k,
        })
        .collect();
    basis.push(BasisClass {
        name: "pt".into(),
        degree: 0,
    });
    basis.push(BasisClass {
        name: "a".into(),
        degree: n,
    });
    let x = |k: i64| -> usize { k as usize };
    let pt = n as usize;
    let a = n as usize + 1;

    let one = |idx: usize, k: i64, c: Rational| -> QHElement<QMonomial> {
        let mut comps = BTreeMap::new();
        comps.insert(
            idx,
            CoeffElement::monomial(Mode::Positive, QMonomial::new(k), c).unwrap(),
        );
        QHElement::from_components(comps)
    };

    let mut table: BTreeMap<(usize, usize), QHElement<QMonomial>> = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            if i + j < n {
                table.insert((x(i), x(j)), one(x(i + j), 0, rat(1)));
            } else if i + j == n {
                table.insert((x(i), x(j)), one(pt, 0, rat(d)));
            }
            // i + j > n stays undefined: the model does not reach past the
            // point class.
        }
        // x^i * a = 0 for i >= 1; x0 is the unit.
        let xa = if i == 0 {
            one(a, 0, rat(1))
        } else {
            QHElement::zero()
        };
        let key = if x(i) <= a { (x(i), a) } else { (a, x(i)) };
        table.insert(key, xa);
    }
    table.insert((x(0), pt), one(pt, 0, rat(1)));
    table.insert((pt, a), QHElement::zero());

    // a * a = 2 eps pt - 2 eps d^(d-1) x^(d-2) q^(n+2-d).
    let eps = epsilon(n);
    let mut aa_comps = BTreeMap::new();
    aa_comps.insert(
        pt,
        CoeffElement::monomial(Mode::Positive, QMonomial::unit(), rat(2 * eps)).unwrap(),
    );
    let d_pow = BigInt::from(d).pow((d - 1) as u32);
    let corr = Rational::from_integer(BigInt::from(-2 * eps) * d_pow);
    aa_comps.insert(
        x(d - 2),
        CoeffElement::monomial(Mode::Positive, QMonomial::new(chern), corr).unwrap(),
    );
    table.insert((a, a), QHElement::from_components(aa_comps));

    let mut ring = RingPresentation::assemble(
        format!("X({n},{d})"),
        dimension,
        Some(chern),
        basis,
        0,
        pt,
        CoefficientMode::SingleQ,
        QMonomial::unit(),
        table,
        vec![
            "partial model: only the products feeding triple powers of the middle class are defined"
                .to_string(),
        ],
    )?;
    let c1 = one(x(1), 0, rat(chern));
    ring.set_c1_dual(c1);
    Ok(Ring::Q(ring))
}

/// Componentwise product of two single-q presentations: the basis is the set
/// of ordered pairs, degrees add, quantum exponents add. A pair product is
/// defined exactly when both factor products are.
pub fn kunneth(r1: &RingPresentation<QMonomial>, r2: &RingPresentation<QMonomial>) -> Result<Ring> {
    for b in r1.basis.iter().chain(r2.basis.iter()) {
        if b.degree % 2 != 0 {
            return Err(Error::Precondition(format!(
                "odd-degree class `{}`: the product construction carries no sign rule",
                b.name
            )));
        }
    }
    let n1 = r1.basis.len();
    let n2 = r2.basis.len();
    let pair_index = |i: usize, j: usize| i * n2 + j;
    let basis: Vec<BasisClass> = (0..n1)
        .flat_map(|i| {
            (0..n2).map(move |j| (i, j)).map(|(i, j)| BasisClass {
                name: format!("{}_{}", r1.basis[i].name, r2.basis[j].name),
                degree: r1.basis[i].degree + r2.basis[j].degree,
            })
        })
        .collect();
    let dimension = r1.dimension + r2.dimension;
    let minimal_chern = match (r1.minimal_chern, r2.minimal_chern) {
        (Some(a), Some(b)) => Some(num_integer::gcd(a, b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };

    // Tensor product of two elements into the pair basis.
    let tensor =
        |e1: &QHElement<QMonomial>, e2: &QHElement<QMonomial>| -> Result<QHElement<QMonomial>> {
            let mut comps: BTreeMap<usize, Vec<(QMonomial, Rational)>> = BTreeMap::new();
            for (i, c1) in e1.components() {
                for (j, c2) in e2.components() {
                    for (m1, a1) in c1.terms() {
                        for (m2, a2) in c2.terms() {
                            comps
                                .entry(pair_index(*i, *j))
                                .or_default()
                                .push((m1.combine(m2)?, a1 * a2));
                        }
                    }
                }
            }
            let mut out = BTreeMap::new();
            for (idx, terms) in comps {
                out.insert(idx, CoeffElement::from_terms(Mode::Positive, terms)?);
            }
            Ok(QHElement::from_components(out))
        };

    let mut table = BTreeMap::new();
    for i1 in 0..n1 {
        for j1 in 0..n2 {
            for i2 in 0..n1 {
                for j2 in 0..n2 {
                    let left = pair_index(i1, j1);
                    let right = pair_index(i2, j2);
                    if left > right {
                        continue;
                    }
                    let (Some(p1), Some(p2)) = (r1.table_entry(i1, i2), r2.table_entry(j1, j2))
                    else {
                        continue;
                    };
                    table.insert((left, right), tensor(p1, p2)?);
                }
            }
        }
    }

    let unit = pair_index(r1.unit, r2.unit);
    let point = pair_index(r1.point, r2.point);
    let mut ring = RingPresentation::assemble(
        format!("{}x{}", r1.name, r2.name),
        dimension,
        minimal_chern,
        basis,
        unit,
        point,
        CoefficientMode::SingleQ,
        QMonomial::unit(),
        table,
        vec![],
    )?;
    if let (Some(c1), Some(c2)) = (&r1.c1_dual, &r2.c1_dual) {
        let left = tensor(c1, &r2.unit_element())?;
        let right = tensor(&r1.unit_element(), c2)?;
        ring.set_c1_dual(left.add(&right)?);
    }
    Ok(Ring::Q(ring))
}

// ---------------------------------------------------------------------------
// Reference data (consumed by the acceptance layer and `refined check`)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
pub struct Table1Row {
    pub manifold: String,
    pub class: String,
    pub delta: i64,
    pub lambda: Option<i64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RefinedRow {
    pub manifold: String,
    pub class: String,
    pub refined_delta: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ReferenceData {
    pub table1: Vec<Table1Row>,
    pub refined: Vec<RefinedRow>,
}

/// Reference rows: discriminants and eigenvalues the engine must re-derive,
/// plus the refined-discriminant displays validated by homogeneity and
/// specialization.
pub fn reference_data() -> Result<ReferenceData> {
    Ok(serde_json::from_str(REFERENCE)?)
}
