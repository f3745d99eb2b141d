mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use shapeflow::ga::Multivector;
use shapeflow::linalg;
use shapeflow::manifold::{Manifold, MultivectorField};
use shapeflow::transport::{
    covariant_derivative, geodesic_trace, holonomy, latitude_circle, transport_along,
    transport_rotors, CurveTrace,
};

#[test]
fn latitude_holonomy_matches_enclosed_area() {
    let m = Manifold::sphere(1.0, 3).unwrap();
    for latitude in [0.3, PI / 4.0, -0.6] {
        let circle = latitude_circle(1.0, latitude, 1e-3).unwrap();
        let angle = holonomy(&m, &circle).unwrap().rotation_angle();
        let expected = 2.0 * PI * (1.0 - f64::sin(latitude)).rem_euclid(1.0);
        let err = (angle - expected).abs().min((angle - (2.0 * PI - expected)).abs());
        assert!(err < 1e-3, "latitude {latitude}: {angle} vs {expected}");
    }
}

#[test]
fn geodesic_tangent_is_self_parallel() {
    let m = ellipsoid();
    let x0 = [1.0, 0.0, 0.0];
    let u0 = linalg::unit(&[0.0, 1.0, 1.0]).unwrap();
    let trace = geodesic_trace(&m, &x0, &u0, 2.0, 1e-3).unwrap();
    let (moved, _) = transport_along(&m, &trace, &Multivector::vector(&u0)).unwrap();
    assert!(linalg::distance(&moved.to_vector(), &trace.last().u) < 1e-5);
}

#[test]
fn geodesics_stay_on_the_manifold_at_unit_speed() {
    let m = ellipsoid();
    let trace = geodesic_trace(&m, &[0.0, 2.0, 0.0], &[0.6, 0.0, 0.8], 5.0, 1e-2).unwrap();
    for s in trace.samples() {
        assert!(m.residual(&s.x).unwrap().abs() < 1e-10);
        assert!((linalg::norm(&s.u) - 1.0).abs() < 1e-10);
        assert!(linalg::dot(&s.u, &m.unit_normal(&s.x).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn transport_keeps_tangent_vectors_tangent_and_preserves_length() {
    let m = ellipsoid();
    let trace = geodesic_trace(&m, &[1.0, 0.0, 0.0], &[0.0, 0.6, 0.8], 3.0, 1e-2).unwrap();
    let report = transport_rotors(&m, &trace).unwrap();
    assert!(!report.defect_exceeded());
    let v0 = [0.0, 0.8, -0.6];
    for (r, s) in report.rotors.iter().zip(trace.samples()) {
        let v = r.apply_vector(&v0).unwrap();
        assert!((linalg::norm(&v) - 1.0).abs() < 1e-12);
        assert!(linalg::dot(&v, &m.unit_normal(&s.x).unwrap()).abs() < 1e-5);
    }
}

#[test]
fn open_curve_is_not_a_loop() {
    let m = Manifold::sphere(1.0, 3).unwrap();
    let arc = geodesic_trace(&m, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 1e-2).unwrap();
    assert!(holonomy(&m, &arc).is_err());
}

#[test]
fn plane_transport_is_trivial() {
    let m = Manifold::plane(3).unwrap();
    let trace = CurveTrace::from_fn(3.0, 30, |t| {
        (vec![t.cos(), t.sin(), 0.0], vec![-t.sin(), t.cos(), 0.0])
    })
    .unwrap();
    let (moved, r) = transport_along(&m, &trace, &Multivector::vector(&[1.0, 2.0, 0.0])).unwrap();
    assert!(linalg::distance(&moved.to_vector(), &[1.0, 2.0, 0.0]) < 1e-12);
    assert!(r.rotation_angle() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariant_derivative_obeys_leibniz(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for (_, m, x) in sample_points(&mut rng, 1) {
            let a = sample_tangent(&mut rng, &m, &x);
            let f = MultivectorField::tangent_projection(&m, &random_vector(&mut rng, 3));
            let g = MultivectorField::transverse_projection(&m, &random_vector(&mut rng, 3));
            let fg = MultivectorField::product(&f, &g);
            let left = covariant_derivative(&m, &fg, &x, &a).unwrap();
            let df = covariant_derivative(&m, &f, &x, &a).unwrap();
            let dg = covariant_derivative(&m, &g, &x, &a).unwrap();
            let right = df.geometric_product(&g.eval(&x).unwrap()).unwrap()
                + f.eval(&x).unwrap().geometric_product(&dg).unwrap();
            prop_assert!(left.distance(&right) <= 1e-5 * (1.0 + right.magnitude()));
        }
    }

    #[test]
    fn covariant_derivative_of_pseudoscalar_vanishes(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for (_, m, x) in sample_points(&mut rng, 1) {
            let a = sample_tangent(&mut rng, &m, &x);
            let d = covariant_derivative(&m, &MultivectorField::pseudoscalar(&m), &x, &a).unwrap();
            prop_assert!(d.magnitude() <= 1e-5);
        }
    }

    #[test]
    fn covariant_derivative_keeps_tangent_fields_tangent(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for (_, m, x) in sample_points(&mut rng, 1) {
            let a = sample_tangent(&mut rng, &m, &x);
            let f = MultivectorField::tangent_projection(&m, &random_vector(&mut rng, 3));
            let d = covariant_derivative(&m, &f, &x, &a).unwrap().to_vector();
            let p = m.project_vector(&x, &d).unwrap();
            prop_assert!(linalg::distance(&d, &p) <= 1e-6);
        }
    }
}
