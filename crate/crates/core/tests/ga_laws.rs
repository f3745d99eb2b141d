mod common;

use proptest::prelude::*;
use shapeflow::ga::{LinearMapN, Multivector, Rotor, Subspace};

fn multivector(dim: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-2.0..2.0f64, 1 << dim)
        .prop_map(move |c| Multivector::from_coeffs(dim, c).unwrap())
}

fn triple() -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    (2usize..=5).prop_flat_map(|n| (multivector(n), multivector(n), multivector(n)))
}

fn close(a: &Multivector, b: &Multivector) -> bool {
    common::rel(a, b) <= 1e-10
}

proptest! {
    #[test]
    fn geometric_product_is_associative((a, b, c) in triple()) {
        let left = a.geometric_product(&b).unwrap().geometric_product(&c).unwrap();
        let right = a.geometric_product(&b.geometric_product(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn geometric_product_distributes((a, b, c) in triple()) {
        let left = a.geometric_product(&(&b + &c)).unwrap();
        let right = a.geometric_product(&b).unwrap() + a.geometric_product(&c).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn commutator_obeys_jacobi((a, b, c) in triple()) {
        let x = |p: &Multivector, q: &Multivector| p.commutator(q).unwrap();
        let sum = x(&a, &x(&b, &c)) + x(&b, &x(&c, &a)) + x(&c, &x(&a, &b));
        prop_assert!(sum.magnitude() <= 1e-10 * (1.0 + a.magnitude() * b.magnitude() * c.magnitude()));
    }

    #[test]
    fn reverse_reverses_products((a, b, _) in triple()) {
        let left = a.geometric_product(&b).unwrap().reverse();
        let right = b.reverse().geometric_product(&a.reverse()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn vector_product_splits_into_inner_and_outer(
        u in prop::collection::vec(-2.0..2.0f64, 4),
        v in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let (a, b) = (Multivector::vector(&u), Multivector::vector(&v));
        let split = a.inner(&b).unwrap() + a.outer(&b).unwrap();
        prop_assert!(close(&a.geometric_product(&b).unwrap(), &split));
    }

    #[test]
    fn rotors_preserve_products((a, b, _) in triple(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let r = Rotor::exp(&common::random_bivector(&mut rng, a.dim())).unwrap();
        prop_assert!(r.unitarity_defect() <= 1e-12);
        let left = r.apply(&a.geometric_product(&b).unwrap()).unwrap();
        let right = r.apply(&a).unwrap().geometric_product(&r.apply(&b).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn rotor_reverse_undoes_rotation((a, _, _) in triple(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let r = Rotor::exp(&common::random_bivector(&mut rng, a.dim())).unwrap();
        let back = r.reverse().apply(&r.apply(&a).unwrap()).unwrap();
        prop_assert!(close(&back, &a));
    }

    #[test]
    fn outermorphism_preserves_outer_products(
        rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 3),
        u in prop::collection::vec(-2.0..2.0f64, 3),
        v in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        let f = LinearMapN::from_rows(&rows).unwrap();
        let blade = Multivector::vector(&u).outer(&Multivector::vector(&v)).unwrap();
        let left = f.outermorphism(&blade).unwrap();
        let right = Multivector::vector(&f.apply(&u)).outer(&Multivector::vector(&f.apply(&v))).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn subspace_projection_is_idempotent((a, _, _) in triple(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = a.dim();
        let blade = Multivector::vector(&common::random_vector(&mut rng, n))
            .outer(&Multivector::vector(&common::random_vector(&mut rng, n)))
            .unwrap();
        prop_assume!(blade.magnitude() > 1e-2);
        let s = Subspace::from_blade(&blade).unwrap();
        let p = s.project(&a).unwrap();
        prop_assert!(close(&s.project(&p).unwrap(), &p));
        prop_assert!(s.reject(&p).unwrap().grade(1).magnitude() <= 1e-10 * (1.0 + a.magnitude()));
    }
}

#[test]
fn rotor_exp_rotates_plane_by_twice_the_bivector_angle() {
    let b = Multivector::blade(3, 0b011, -0.3);
    let r = Rotor::exp(&b).unwrap();
    let v = r.apply_vector(&[1.0, 0.0, 0.0]).unwrap();
    assert!((v[0] - 0.6f64.cos()).abs() < 1e-14);
    assert!((v[1] - 0.6f64.sin()).abs() < 1e-14);
    assert!((r.rotation_angle() - 0.6).abs() < 1e-14);
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let a = Multivector::scalar(2, 1.0);
    let b = Multivector::scalar(3, 1.0);
    assert!(a.geometric_product(&b).is_err());
}
