mod common;

use common::*;
use proptest::prelude::*;
use shapeflow::curvature::{curvature_of_bivector, total_curvature};
use shapeflow::ga::Multivector;
use shapeflow::linalg;
use shapeflow::manifold::{shape_tensor, Manifold};

fn bivector(a: &[f64], b: &[f64]) -> Multivector {
    Multivector::vector(a).outer(&Multivector::vector(b)).unwrap()
}

fn codim_two_sphere() -> Manifold {
    // radius-1 sphere inside the hyperplane x4 = 0.5 of R⁴, as a chart
    Manifold::parametric(
        &["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)", "0.5"],
        &[(-10.0, 10.0), (-1.5, 1.5)],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_is_antisymmetric_and_bilinear(seed in any::<u64>(), s in -2.0..2.0f64) {
        let mut rng = rng(seed);
        let m = ellipsoid();
        let x = ellipsoid_point(&mut rng, &ellipsoid_matrix());
        let a = sample_tangent(&mut rng, &m, &x);
        let b = sample_tangent(&mut rng, &m, &x);
        let c = sample_tangent(&mut rng, &m, &x);
        let ab = total_curvature(&m, &x, &a, &b).unwrap().total;
        let ba = total_curvature(&m, &x, &b, &a).unwrap().total;
        prop_assert!((&ab + &ba).magnitude() <= 1e-9 * (1.0 + ab.magnitude()));
        let mixed = total_curvature(&m, &x, &linalg::axpy(&a, s, &c), &b).unwrap().total;
        let cb = total_curvature(&m, &x, &c, &b).unwrap().total;
        let expected = &ab + &cb.scale(s);
        prop_assert!(mixed.distance(&expected) <= 1e-6 * (1.0 + expected.magnitude()));
    }

    #[test]
    fn curvature_splits_into_tangent_and_transverse_parts(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for (_, m, x) in sample_points(&mut rng, 1) {
            if m.dim() < 2 {
                continue;
            }
            let a = sample_tangent(&mut rng, &m, &x);
            let b = sample_tangent(&mut rng, &m, &x);
            let c = total_curvature(&m, &x, &a, &b).unwrap();
            prop_assert!(c.total.distance(&(&c.intrinsic + &c.extrinsic)) <= 1e-12);
            // Ω is built from commutators of mixed bivectors, so it has no mixed part
            prop_assert!(c.mixed().magnitude() <= 1e-6 * (1.0 + c.total.magnitude()));
            prop_assert!(c.total.without_grade(2).magnitude() <= 1e-12);
        }
    }

    #[test]
    fn curvature_commutes_with_pseudoscalar(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = ellipsoid();
        let x = ellipsoid_point(&mut rng, &ellipsoid_matrix());
        let a = sample_tangent(&mut rng, &m, &x);
        let b = sample_tangent(&mut rng, &m, &x);
        let omega = total_curvature(&m, &x, &a, &b).unwrap().total;
        let i = m.pseudoscalar_at(&x).unwrap();
        let commutator = i.commutator(&omega).unwrap();
        prop_assert!(commutator.magnitude() <= 1e-6 * (1.0 + omega.magnitude()));
    }

    #[test]
    fn curvature_of_bivector_extends_linearly(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = ellipsoid();
        let x = ellipsoid_point(&mut rng, &ellipsoid_matrix());
        let a = sample_tangent(&mut rng, &m, &x);
        let b = sample_tangent(&mut rng, &m, &x);
        let direct = total_curvature(&m, &x, &a, &b).unwrap().total;
        let via = curvature_of_bivector(&m, &x, &bivector(&a, &b)).unwrap();
        prop_assert!(direct.distance(&via) <= 1e-6 * (1.0 + direct.magnitude()));
    }
}

#[test]
fn gauss_curvature_of_ellipsoid_matches_closed_form() {
    // K = 1 / (a²b²c² (x²/a⁴ + y²/b⁴ + z²/c⁴)²) for semi-axes (1, 2, 3)
    let m = ellipsoid();
    let mut rng = rng(11);
    for _ in 0..10 {
        let x = ellipsoid_point(&mut rng, &ellipsoid_matrix());
        let (a2, b2, c2) = (1.0, 4.0, 9.0);
        let q = x[0] * x[0] / (a2 * a2) + x[1] * x[1] / (b2 * b2) + x[2] * x[2] / (c2 * c2);
        let gauss = 1.0 / (a2 * b2 * c2 * q * q);
        let a = sample_tangent(&mut rng, &m, &x);
        let n = m.unit_normal(&x).unwrap();
        let b = [
            n[1] * a[2] - n[2] * a[1],
            n[2] * a[0] - n[0] * a[2],
            n[0] * a[1] - n[1] * a[0],
        ];
        let omega = total_curvature(&m, &x, &a, &b).unwrap().total;
        let area = bivector(&a, &b);
        let sectional = -omega.scalar_product(&area.reverse()).unwrap() / area.norm_squared();
        assert!((sectional - gauss).abs() <= 1e-5 * gauss.max(1.0), "{sectional} vs {gauss}");
    }
}

#[test]
fn flat_sphere_in_hyperplane_has_no_extrinsic_curvature() {
    let m = codim_two_sphere();
    let x = m.chart_point(&[0.4, 0.3]).unwrap();
    let a = sample_tangent(&mut rng(3), &m, &x);
    let b = sample_tangent(&mut rng(4), &m, &x);
    let c = total_curvature(&m, &x, &a, &b).unwrap();
    assert!(c.extrinsic.magnitude() <= 1e-5);
    let expected = bivector(&a, &b).scale(-1.0);
    assert!(c.intrinsic.distance(&expected) <= 1e-5);
}

#[test]
fn curvature_is_built_from_shape_commutators() {
    let m = ellipsoid();
    let x = ellipsoid_point(&mut rng(5), &ellipsoid_matrix());
    let a = sample_tangent(&mut rng(6), &m, &x);
    let b = sample_tangent(&mut rng(7), &m, &x);
    let sa = shape_tensor(&m, &x, &a).unwrap();
    let sb = shape_tensor(&m, &x, &b).unwrap();
    let omega = total_curvature(&m, &x, &a, &b).unwrap().total;
    assert!(omega.distance(&sa.commutator(&sb).unwrap()) <= 1e-9);
}
