//! Property and invariant tests: ring axioms on random formal sums, grading
//! and bilinearity of the table product, integrality windows of the cubic
//! coefficients, orientation flips, specialization as a ring map, and the
//! independent re-check of solved relations.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhlag::exactalg::{rat, CoeffElement, GroupMonomial, Mode, Monomial, QMonomial, Rational};
use qhlag::lagrangian::{cubic_coefficients, ideal_of, lambda_eigenvalue, LagrangianDatum};
use qhlag::presets::{load_preset, reference_data};
use qhlag::qhring::{QHElement, RingPresentation};
use qhlag::refined::{quotient_group, specialize_coeff};

// ---------------------------------------------------------------------------
// Formal-sum ring axioms (seeded sweep: 1000 random triples each monoid)
// ---------------------------------------------------------------------------

fn random_q_element(rng: &mut ChaCha8Rng) -> CoeffElement<QMonomial> {
    let len = rng.gen_range(0..4);
    let terms = (0..len)
        .map(|_| {
            (
                QMonomial::new(rng.gen_range(-5..=5)),
                rat(rng.gen_range(-9..=9)),
            )
        })
        .collect();
    CoeffElement::from_terms(Mode::Laurent, terms).unwrap()
}

fn random_group_element(rng: &mut ChaCha8Rng) -> CoeffElement<GroupMonomial> {
    let pairing = [3, 1, 1];
    let len = rng.gen_range(0..4);
    let terms = (0..len)
        .map(|_| {
            let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
            (
                GroupMonomial::from_pairing_vector(v, &pairing).unwrap(),
                rat(rng.gen_range(-9..=9)),
            )
        })
        .collect();
    CoeffElement::from_terms(Mode::Laurent, terms).unwrap()
}

fn check_ring_axioms<M: Monomial>(a: &CoeffElement<M>, b: &CoeffElement<M>, c: &CoeffElement<M>) {
    let ab_c = a.mul(b).unwrap().mul(c).unwrap();
    let a_bc = a.mul(&b.mul(c).unwrap()).unwrap();
    assert_eq!(ab_c, a_bc, "associativity");
    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap(), "commutativity");
    let lhs = a.mul(&b.add(c).unwrap()).unwrap();
    let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
    assert_eq!(lhs, rhs, "distributivity");
}

#[test]
fn coefficient_ring_axioms_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let a = random_q_element(&mut rng);
        let b = random_q_element(&mut rng);
        let c = random_q_element(&mut rng);
        check_ring_axioms(&a, &b, &c);
    }
}

#[test]
fn coefficient_ring_axioms_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = random_group_element(&mut rng);
        let b = random_group_element(&mut rng);
        let c = random_group_element(&mut rng);
        check_ring_axioms(&a, &b, &c);
    }
}

proptest! {
    // Normalization idempotence: rebuilding from the stored terms is the
    // identity, whatever unsorted duplicated input produced them.
    #[test]
    fn normalization_is_idempotent(raw in proptest::collection::vec((-6i64..=6, -9i64..=9), 0..8)) {
        let terms: Vec<(QMonomial, Rational)> =
            raw.iter().map(|(k, c)| (QMonomial::new(*k), rat(*c))).collect();
        let once = CoeffElement::from_terms(Mode::Laurent, terms).unwrap();
        let twice = CoeffElement::from_terms(Mode::Laurent, once.terms().to_vec()).unwrap();
        prop_assert_eq!(once, twice);
    }

    // Grading: homogeneous factors multiply to the degree sum.
    #[test]
    fn grading_adds_under_multiplication(k1 in -5i64..=5, k2 in -5i64..=5, c1 in 1i64..=9, c2 in 1i64..=9) {
        let a = CoeffElement::monomial(Mode::Laurent, QMonomial::new(k1), rat(c1)).unwrap();
        let b = CoeffElement::monomial(Mode::Laurent, QMonomial::new(k2), rat(c2)).unwrap();
        let prod = a.mul(&b).unwrap();
        prop_assert_eq!(prod.homogeneous_degree(), Some(-2 * (k1 + k2)));
    }
}

// ---------------------------------------------------------------------------
// Table product invariants across the shipped presets
// ---------------------------------------------------------------------------

fn random_classical(
    rng: &mut ChaCha8Rng,
    ring: &RingPresentation<QMonomial>,
) -> QHElement<QMonomial> {
    let mut acc = QHElement::zero();
    for idx in 0..ring.basis.len() {
        let c = rng.gen_range(-4..=4);
        if c != 0 {
            acc = acc
                .add(&ring.element_from_class(idx).scale(&rat(c)))
                .unwrap();
        }
    }
    acc
}

#[test]
fn degree_law_on_all_pairs() {
    for name in ["M2", "M3", "M4", "M5", "M6"] {
        let ring = load_preset(name).unwrap();
        let r = ring.as_q().unwrap();
        for i in 0..r.basis.len() {
            for j in 0..r.basis.len() {
                let prod = r
                    .mul(&r.element_from_class(i), &r.element_from_class(j))
                    .unwrap();
                if !prod.is_zero() {
                    assert_eq!(
                        r.degree_of(&prod),
                        Some(r.basis[i].degree + r.basis[j].degree - r.dimension),
                        "{name}: ({i},{j})"
                    );
                }
            }
        }
    }
}

#[test]
fn product_is_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for name in ["M2", "M4", "M6"] {
        let ring = load_preset(name).unwrap();
        let r = ring.as_q().unwrap();
        for _ in 0..50 {
            let a = random_classical(&mut rng, r);
            let a2 = random_classical(&mut rng, r);
            let b = random_classical(&mut rng, r);
            let lhs = r.mul(&a.add(&a2).unwrap(), &b).unwrap();
            let rhs = r
                .mul(&a, &b)
                .unwrap()
                .add(&r.mul(&a2, &b).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

#[test]
fn unit_absorbs_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for name in ["M2", "M3", "M4", "M5", "M6"] {
        let ring = load_preset(name).unwrap();
        let r = ring.as_q().unwrap();
        let unit = r.unit_element();
        for _ in 0..200 {
            let x = random_classical(&mut rng, r);
            assert_eq!(r.mul(&unit, &x).unwrap(), x, "{name}");
        }
    }
}

#[test]
fn point_class_is_classical_in_every_entry() {
    // The table-level restatement: products of classical basis elements
    // carry the point class only at q^0.
    for name in ["M2", "M3", "M4", "M5", "M6"] {
        let ring = load_preset(name).unwrap();
        let r = ring.as_q().unwrap();
        for (i, j, entry) in r.table_pairs() {
            if let Some(coeff) = entry.component(r.point) {
                assert!(
                    coeff.terms().iter().all(|(m, _)| m.is_unit()),
                    "{name}: ({i},{j})"
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cubic solve invariants
// ---------------------------------------------------------------------------

fn m2_datum() -> (RingPresentation<QMonomial>, LagrangianDatum<QMonomial>) {
    let ring = load_preset("M2").unwrap();
    let r = ring.as_q().unwrap().clone();
    let klass = r.parse_class_expr("E1-E2").unwrap();
    let lag = LagrangianDatum::new(&r, klass, 2, Some(2)).unwrap();
    (r, lag)
}

fn m2_class(r: &RingPresentation<QMonomial>, d: i64, m1: i64, m2: i64) -> QHElement<QMonomial> {
    let h = r.element_from_class(r.class_index("H").unwrap());
    let e1 = r.element_from_class(r.class_index("E1").unwrap());
    let e2 = r.element_from_class(r.class_index("E2").unwrap());
    h.scale(&rat(d))
        .add(&e1.scale(&rat(-m1)))
        .unwrap()
        .add(&e2.scale(&rat(-m2)))
        .unwrap()
}

#[test]
fn integrality_windows_on_the_grid() {
    let (r, lag) = m2_datum();
    for d in -2..=2_i64 {
        for m1 in -2..=2_i64 {
            for m2 in -2..=2_i64 {
                if m1 == m2 {
                    continue;
                }
                let c = m2_class(&r, d, m1, m2);
                let cert = cubic_coefficients(&r, &lag, &c).unwrap();
                let xi = &cert.xi;
                assert!((xi * xi * &cert.sigma).is_integer());
                assert!((xi * xi * xi * &cert.tau).is_integer());
                // xi = m1 - m2 ranges over -4..=4 here, so the only
                // non-square-free magnitude is 4.
                let xi_abs = i64::try_from(xi.to_integer()).unwrap().abs();
                if xi_abs != 4 {
                    assert!((xi * &cert.sigma).is_integer(), "xi = {xi_abs}");
                    assert!((xi * xi * &cert.tau).is_integer(), "xi = {xi_abs}");
                }
            }
        }
    }
}

#[test]
fn solver_identity_rechecked_independently() {
    // Substitute the certificate back into the relation through a separate
    // evaluation path.
    let (r, lag) = m2_datum();
    for (d, m1, m2) in [(0, 1, 0), (1, 2, -1), (-2, -1, 2), (2, 2, 1)] {
        let c = m2_class(&r, d, m1, m2);
        let cert = cubic_coefficients(&r, &lag, &c).unwrap();
        let n = lag.n;
        let cl = r.mul(&c, &lag.klass).unwrap();
        let ccl = r.mul(&r.mul(&c, &c).unwrap(), &lag.klass).unwrap();
        let term_sigma = cl
            .mul_monomial(&QMonomial::new(n / 2))
            .unwrap()
            .scale(&(&cert.xi * &cert.sigma));
        let term_tau = lag
            .klass
            .mul_monomial(&QMonomial::new(n))
            .unwrap()
            .scale(&(&cert.xi * &cert.xi * &cert.tau));
        let residual = ccl.sub(&term_sigma).unwrap().sub(&term_tau).unwrap();
        assert!(residual.is_zero(), "(d,m1,m2)=({d},{m1},{m2})");
    }
}

#[test]
fn orientation_flip_negates_sigma() {
    let (r, lag) = m2_datum();
    let flipped = LagrangianDatum::new(&r, lag.klass.neg(), 2, Some(2)).unwrap();
    for (d, m1, m2) in [(0, 1, 0), (1, 2, -1), (1, 0, -2)] {
        let c = m2_class(&r, d, m1, m2);
        let cert = cubic_coefficients(&r, &lag, &c).unwrap();
        let cert_bar = cubic_coefficients(&r, &flipped, &c.neg()).unwrap();
        assert_eq!(cert_bar.sigma, -cert.sigma.clone());
        assert_eq!(cert_bar.tau, cert.tau);
        assert_eq!(cert_bar.delta, cert.delta);
    }
}

#[test]
fn table_rows_have_ideal_rank_two() {
    let data = reference_data().unwrap();
    for row in &data.table1 {
        if row.manifold.starts_with("X(") {
            continue;
        }
        let ring = load_preset(&row.manifold).unwrap();
        let r = ring.as_q().unwrap();
        let l = r.parse_class_expr(&row.class).unwrap();
        let ideal = ideal_of(r, &l).unwrap();
        assert!(ideal.rank >= 2, "{} {}", row.manifold, row.class);
        assert!(ideal.contains(r, &l));
    }
}

#[test]
fn derived_deltas_and_lambdas_match_reference() {
    let data = reference_data().unwrap();
    for row in &data.table1 {
        if row.manifold.starts_with("X(") {
            continue;
        }
        let ring = load_preset(&row.manifold).unwrap();
        let r = ring.as_q().unwrap();
        let klass = r.parse_class_expr(&row.class).unwrap();
        let lag = LagrangianDatum::new(r, klass.clone(), 2, Some(2)).unwrap();
        let cert = cubic_coefficients(r, &lag, &klass).unwrap();
        assert_eq!(cert.delta, rat(row.delta), "{} {}", row.manifold, row.class);
        let eig = lambda_eigenvalue(r, &klass).unwrap();
        assert_eq!(
            eig.lambda_int(),
            row.lambda,
            "{} {}",
            row.manifold,
            row.class
        );
    }
}

// ---------------------------------------------------------------------------
// Refinement invariants
// ---------------------------------------------------------------------------

#[test]
fn specialization_is_a_ring_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let pairing = [3, 1, 1];
    for _ in 0..200 {
        // Positive-cone random elements over the M2T lattice.
        let make = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..4);
            let terms: Vec<(GroupMonomial, Rational)> = (0..len)
                .filter_map(|_| {
                    let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
                    let m = GroupMonomial::from_pairing_vector(v, &pairing).unwrap();
                    m.admissible(Mode::Positive)
                        .then(|| (m, rat(rng.gen_range(-9..=9))))
                })
                .collect();
            CoeffElement::from_terms(Mode::Positive, terms).unwrap()
        };
        let a = make(&mut rng);
        let b = make(&mut rng);
        let lhs = specialize_coeff(&a.mul(&b).unwrap()).unwrap();
        let rhs = specialize_coeff(&a)
            .unwrap()
            .mul(&specialize_coeff(&b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        let sums = specialize_coeff(&a.add(&b).unwrap()).unwrap();
        let sums_rhs = specialize_coeff(&a)
            .unwrap()
            .add(&specialize_coeff(&b).unwrap())
            .unwrap();
        assert_eq!(sums, sums_rhs);
    }
}

#[test]
fn quotient_kernel_is_exactly_the_relation_lattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let names: Vec<String> = ["H", "E1", "E2", "E3"].map(String::from).to_vec();
    let pairing = [3, 1, 1, 1];
    let relation = [0i64, 1, -1, 0];
    let q = quotient_group(&names, &pairing, &relation).unwrap();
    for _ in 0..500 {
        let v: Vec<i64> = (0..4).map(|_| rng.gen_range(-6..=6)).collect();
        let image_zero = q.kills(&v).unwrap();
        // v is in the lattice Z * relation iff it is t * (0,1,-1,0).
        let in_lattice = v[0] == 0 && v[3] == 0 && v[1] == -v[2];
        assert_eq!(image_zero, in_lattice, "{v:?}");
    }
    // Spanning directions map to the expected generators.
    assert!(q.kills(&[0, 5, -5, 0]).unwrap());
    assert!(!q.kills(&[0, 1, 1, 0]).unwrap());
}

// ---------------------------------------------------------------------------
// Cross-preset consistency via the group ring
// ---------------------------------------------------------------------------

#[test]
fn fano_cubes_vanish_across_the_range() {
    // Every even n and 3 <= d <= n+1 kills the cube of the middle class.
    for n in [2i64, 4, 6, 8] {
        for d in 3..=(n + 1) {
            let ring = qhlag::presets::hypersurface_model(n, d).unwrap();
            let r = ring.as_q().unwrap();
            let a = r.parse_class_expr("a").unwrap();
            assert!(r.pow(&a, 3).unwrap().is_zero(), "n={n} d={d}");
        }
    }
}

#[test]
fn specializing_the_refined_table_restores_the_plain_one() {
    let group = load_preset("M2T").unwrap();
    let plain = load_preset("M2").unwrap();
    let sp = qhlag::refined::specialize_ring(group.as_group().unwrap()).unwrap();
    assert!(qhlag::refined::rings_entrywise_equal(&sp, plain.as_q().unwrap()).unwrap());
}

#[test]
fn preset_dir_override_is_honored() {
    // QHLAG_PRESET_DIR redirects the loader; a modified table must fail
    // verification through the same path. Run both checks in one test to
    // keep the env-var mutation single-threaded.
    let dir = tempfile::tempdir().unwrap();
    let mut doc = qhlag::qhring::ring_to_json(&load_preset("M2").unwrap());
    std::fs::write(
        dir.path().join("MY.json"),
        serde_json::to_string_pretty(&doc).unwrap(),
    )
    .unwrap();

    // A perturbed copy: bump one structure constant of E1*E2.
    let mut bumped = false;
    for entry in doc["table"].as_array_mut().unwrap() {
        if entry["left"] == "E1" && entry["right"] == "E2" {
            let coeff = entry["result"][0]["coeff"].as_i64().unwrap();
            entry["result"][0]["coeff"] = serde_json::json!(coeff + 1);
            bumped = true;
        }
    }
    assert!(bumped, "perturbation must apply");
    std::fs::write(
        dir.path().join("BROKEN.json"),
        serde_json::to_string_pretty(&doc).unwrap(),
    )
    .unwrap();

    std::env::set_var("QHLAG_PRESET_DIR", dir.path());
    let loaded = load_preset("MY");
    let broken_load = load_preset("BROKEN");
    std::env::remove_var("QHLAG_PRESET_DIR");

    let ring = loaded.unwrap();
    assert_eq!(ring.name(), "M2");
    let err = broken_load.unwrap_err();
    assert!(err.to_string().contains("failed verification"), "{err}");
}
