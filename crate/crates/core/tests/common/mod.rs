//! Sampling helpers shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapeflow::ga::{LinearMapN, Multivector};
use shapeflow::linalg;
use shapeflow::manifold::Manifold;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v = random_vector(rng, dim);
        if linalg::norm(&v) > 0.1 {
            return linalg::unit(&v).unwrap();
        }
    }
}

pub fn random_multivector(rng: &mut ChaCha8Rng, dim: usize) -> Multivector {
    Multivector::from_coeffs(dim, random_vector(rng, 1 << dim)).unwrap()
}

pub fn random_bivector(rng: &mut ChaCha8Rng, dim: usize) -> Multivector {
    random_multivector(rng, dim).grade(2)
}

/// Relative difference `|a − b| / max(|a|, |b|, 1)`.
pub fn rel(a: &Multivector, b: &Multivector) -> f64 {
    a.distance(b) / a.magnitude().max(b.magnitude()).max(1.0)
}

pub fn ellipsoid_matrix() -> LinearMapN {
    LinearMapN::diagonal(&[1.0, 0.25, 1.0 / 9.0])
}

pub fn ellipsoid() -> Manifold {
    Manifold::quadric(ellipsoid_matrix(), 1.0).unwrap()
}

/// A random point of `x·A(x) = 1`.
pub fn ellipsoid_point(rng: &mut ChaCha8Rng, a: &LinearMapN) -> Vec<f64> {
    let d = random_unit(rng, a.dim());
    linalg::scale(&d, 1.0 / linalg::dot(&d, &a.apply(&d)).sqrt())
}

/// Unit-speed helix of curvature ½ as a one-dimensional chart.
pub fn helix() -> Manifold {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Manifold::parametric(
        &[
            format!("cos(u1*{r})"),
            format!("sin(u1*{r})"),
            format!("u1*{r}"),
        ],
        &[(-50.0, 50.0)],
    )
    .unwrap()
}

/// Position and unit tangent of [`helix`] at arc length `t`.
pub fn helix_at(t: f64) -> (Vec<f64>, Vec<f64>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (
        vec![(t * r).cos(), (t * r).sin(), t * r],
        vec![-r * (t * r).sin(), r * (t * r).cos(), r],
    )
}

/// A random point of a manifold with a random tangent vector there.
pub fn sample_tangent(rng: &mut ChaCha8Rng, m: &Manifold, x: &[f64]) -> Vec<f64> {
    loop {
        let t = m.project_vector(x, &random_vector(rng, m.ambient_dim())).unwrap();
        if linalg::norm(&t) > 0.1 {
            return t;
        }
    }
}

/// Sphere, ellipsoid and helix sample points.
pub fn sample_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<(&'static str, Manifold, Vec<f64>)> {
    let mut out = Vec::new();
    let sphere = Manifold::sphere(1.0, 3).unwrap();
    let ell = ellipsoid();
    let hel = helix();
    for _ in 0..count {
        out.push(("sphere", sphere.clone(), random_unit(rng, 3)));
        out.push(("ellipsoid", ell.clone(), ellipsoid_point(rng, &ellipsoid_matrix())));
        let t = rng.gen_range(-5.0..5.0);
        out.push(("helix", hel.clone(), helix_at(t).0));
    }
    out
}
