//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion, non-zero exit on
//! any failure.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::Instant;

use common::*;
use shapeflow::curvature::{
    curvature_from_commutator, curvature_from_connection, curvature_from_connection_components,
    total_curvature,
};
use shapeflow::ga::{Multivector, Rotor};
use shapeflow::linalg;
use shapeflow::manifold::{
    lie_bracket, shape_tensor, shape_tensor_frame, Manifold, MultivectorField,
};
use shapeflow::shapemin::{
    euler_lagrange_residual, max_pointwise_deviation, shape_min_solve, sphere_geodesic_closed_form,
    verify_minimality, EllipsoidCurve, ShapeMinProblem,
};
use shapeflow::transport::{
    covariant_derivative, geodesic_trace, great_circle_arc, holonomy, sphere_loop,
    transport_rotors, CurveTrace,
};

type Outcome = Result<(bool, String), String>;

/// Collects named measurements against their limits.
#[derive(Default)]
struct Checks {
    ok: bool,
    parts: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            ok: true,
            parts: Vec::new(),
        }
    }

    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        self.ok &= value <= limit;
        self.parts.push(format!("{name} {value:.2e} <= {limit:.0e}"));
    }

    fn at_least(&mut self, name: &str, value: f64, limit: f64) {
        self.ok &= value >= limit;
        self.parts.push(format!("{name} {value:.3} >= {limit}"));
    }

    fn holds(&mut self, name: &str, value: bool) {
        self.ok &= value;
        self.parts.push(format!("{name} {}", if value { "ok" } else { "violated" }));
    }

    fn finish(self) -> Outcome {
        Ok((self.ok, self.parts.join("; ")))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ga_laws() -> Outcome {
    let mut rng = rng(1);
    let (mut assoc, mut leibniz, mut jacobi, mut rotation) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for dim in 2..=5 {
        for _ in 0..200 {
            let a = random_multivector(&mut rng, dim);
            let b = random_multivector(&mut rng, dim);
            let c = random_multivector(&mut rng, dim);
            let ab = a.geometric_product(&b).map_err(err)?;
            let bc = b.geometric_product(&c).map_err(err)?;
            assoc = assoc.max(rel(
                &ab.geometric_product(&c).map_err(err)?,
                &a.geometric_product(&bc).map_err(err)?,
            ));
            let lhs = ab.commutator(&c).map_err(err)?;
            let rhs = a.geometric_product(&b.commutator(&c).map_err(err)?).map_err(err)?
                + a.commutator(&c).map_err(err)?.geometric_product(&b).map_err(err)?;
            leibniz = leibniz.max(rel(&lhs, &rhs));
            let lhs = a.commutator(&b.commutator(&c).map_err(err)?).map_err(err)?;
            let rhs = a.commutator(&b).map_err(err)?.commutator(&c).map_err(err)?
                - a.commutator(&c).map_err(err)?.commutator(&b).map_err(err)?;
            jacobi = jacobi.max(rel(&lhs, &rhs));
            let r = Rotor::exp(&random_bivector(&mut rng, dim)).map_err(err)?;
            let lhs = r.apply(&ab).map_err(err)?;
            let rhs = r
                .apply(&a)
                .map_err(err)?
                .geometric_product(&r.apply(&b).map_err(err)?)
                .map_err(err)?;
            rotation = rotation.max(rel(&lhs, &rhs));
        }
    }
    let mut c = Checks::new();
    c.at_most("associativity", assoc, 1e-10);
    c.at_most("Leibniz", leibniz, 1e-10);
    c.at_most("Jacobi", jacobi, 1e-10);
    c.at_most("rotor products", rotation, 1e-10);
    c.finish()
}

fn sphere_shape() -> Outcome {
    let mut rng = rng(2);
    let (mut closed, mut paths) = (0.0f64, 0.0f64);
    for r in [1.0, 2.0] {
        let m = Manifold::sphere(r, 3).map_err(err)?;
        for _ in 0..50 {
            let x = linalg::scale(&random_unit(&mut rng, 3), r);
            let a = sample_tangent(&mut rng, &m, &x);
            let oracle = Multivector::vector(&x)
                .geometric_product(&Multivector::vector(&a))
                .map_err(err)?
                .scale(1.0 / (r * r));
            let eq1 = shape_tensor(&m, &x, &a).map_err(err)?;
            let eq2 = shape_tensor_frame(&m, &x, &a).map_err(err)?;
            closed = closed.max(eq1.distance(&oracle).max((&eq1 - &oracle).max_abs()));
            paths = paths.max((&eq1 - &eq2).max_abs());
        }
    }
    let mut c = Checks::new();
    c.at_most("closed-form component error", closed, 1e-5);
    c.at_most("frame-path agreement", paths, 1e-5);
    c.finish()
}

fn ellipsoid_shape() -> Outcome {
    let mut rng = rng(3);
    let a_map = ellipsoid_matrix();
    let m = ellipsoid();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = ellipsoid_point(&mut rng, &a_map);
        let a = sample_tangent(&mut rng, &m, &x);
        let ax = a_map.apply(&x);
        let oracle = a_map
            .outermorphism(&Multivector::vector(&x).outer(&Multivector::vector(&a)).map_err(err)?)
            .map_err(err)?
            .scale(1.0 / linalg::dot(&ax, &ax));
        let s = shape_tensor(&m, &x, &a).map_err(err)?;
        worst = worst.max((&s - &oracle).max_abs());
    }
    let mut c = Checks::new();
    c.at_most("component error", worst, 1e-5);
    c.finish()
}

fn identities() -> Outcome {
    let mut rng = rng(4);
    let (mut anti, mut sym, mut pseudo, mut dshape, mut proj_tan, mut proj_tr) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (_, m, x) in sample_points(&mut rng, 10) {
        let a = sample_tangent(&mut rng, &m, &x);
        let b = sample_tangent(&mut rng, &m, &x);
        let i_m = m.pseudoscalar_at(&x).map_err(err)?;
        let sa = shape_tensor(&m, &x, &a).map_err(err)?;
        let sb = shape_tensor(&m, &x, &b).map_err(err)?;
        let anticommutator = i_m.geometric_product(&sa).map_err(err)? + sa.geometric_product(&i_m).map_err(err)?;
        anti = anti.max(anticommutator.magnitude() / (1.0 + sa.magnitude()));
        let lhs = Multivector::vector(&b).inner(&sa).map_err(err)?;
        let rhs = Multivector::vector(&a).inner(&sb).map_err(err)?;
        sym = sym.max(lhs.distance(&rhs));
        let d = covariant_derivative(&m, &MultivectorField::pseudoscalar(&m), &x, &a).map_err(err)?;
        pseudo = pseudo.max(d.magnitude());

        // a·D S(b) − b·D S(a) = S([a,b]) for projected constant fields
        let (c1, c2) = (random_vector(&mut rng, 3), random_vector(&mut rng, 3));
        let fa = |y: &[f64]| m.project_vector(y, &c1);
        let fb = |y: &[f64]| m.project_vector(y, &c2);
        let shape_of = |c: Vec<f64>| {
            let mm = m.clone();
            MultivectorField::new("shape", move |y| {
                let t = mm.project_vector(y, &c)?;
                shape_tensor(&mm, y, &t)
            })
        };
        let (ax, bx) = (fa(&x).map_err(err)?, fb(&x).map_err(err)?);
        let lhs = covariant_derivative(&m, &shape_of(c2.clone()), &x, &ax).map_err(err)?
            - covariant_derivative(&m, &shape_of(c1.clone()), &x, &bx).map_err(err)?;
        let bracket = lie_bracket(&m, &fa, &fb, &x).map_err(err)?;
        let rhs = shape_tensor(&m, &x, &bracket).map_err(err)?;
        dshape = dshape.max(lhs.distance(&rhs));

        let c3 = random_vector(&mut rng, 3);
        let tangent = MultivectorField::tangent_projection(&m, &c3);
        let transverse = MultivectorField::transverse_projection(&m, &c3);
        let dv = covariant_derivative(&m, &tangent, &x, &a).map_err(err)?.to_vector();
        let raw = m.field_derivative(&tangent, &x, &a).map_err(err)?.to_vector();
        proj_tan = proj_tan.max(linalg::distance(&dv, &m.project_vector(&x, &raw).map_err(err)?));
        let dw = covariant_derivative(&m, &transverse, &x, &a).map_err(err)?.to_vector();
        let raw = m.field_derivative(&transverse, &x, &a).map_err(err)?.to_vector();
        let raw_tr = linalg::sub(&raw, &m.project_vector(&x, &raw).map_err(err)?);
        proj_tr = proj_tr.max(linalg::distance(&dw, &raw_tr));
    }
    let mut c = Checks::new();
    c.at_most("anticommutation", anti, 1e-5);
    c.at_most("symmetry", sym, 1e-6);
    c.at_most("a·D I_M", pseudo, 1e-5);
    c.at_most("shape-tensor derivative", dshape, 1e-4);
    c.at_most("tangent projection rule", proj_tan, 1e-5);
    c.at_most("transverse projection rule", proj_tr, 1e-5);
    c.finish()
}

fn curvature() -> Outcome {
    let mut rng = rng(5);
    let mut exact = 0.0f64;
    let mut extrinsic = 0.0f64;
    for r in [1.0, 2.0] {
        let m = Manifold::sphere(r, 3).map_err(err)?;
        for _ in 0..20 {
            let x = linalg::scale(&random_unit(&mut rng, 3), r);
            let a = sample_tangent(&mut rng, &m, &x);
            let b = sample_tangent(&mut rng, &m, &x);
            let c = total_curvature(&m, &x, &a, &b).map_err(err)?;
            let oracle = Multivector::vector(&a)
                .outer(&Multivector::vector(&b))
                .map_err(err)?
                .scale(-1.0 / (r * r));
            exact = exact.max(c.total.distance(&oracle));
            extrinsic = extrinsic.max(c.extrinsic.magnitude());
        }
    }
    let mut cross = 0.0f64;
    let manifolds = [
        Manifold::sphere(1.0, 3).map_err(err)?,
        ellipsoid(),
    ];
    for (k, m) in manifolds.iter().enumerate() {
        for _ in 0..3 {
            let x = if k == 0 {
                random_unit(&mut rng, 3)
            } else {
                ellipsoid_point(&mut rng, &ellipsoid_matrix())
            };
            let (c1, c2, c3) = (
                random_vector(&mut rng, 3),
                random_vector(&mut rng, 3),
                random_vector(&mut rng, 3),
            );
            let fa = |y: &[f64]| m.project_vector(y, &c1);
            let fb = |y: &[f64]| m.project_vector(y, &c2);
            let omega = total_curvature(m, &x, &fa(&x).map_err(err)?, &fb(&x).map_err(err)?)
                .map_err(err)?
                .total;
            let test = MultivectorField::tangent_projection(m, &c3);
            let commutator = curvature_from_commutator(m, &x, &fa, &fb, &test).map_err(err)?;
            let expected = test.eval(&x).map_err(err)?.commutator(&omega).map_err(err)?;
            let (r1, f1) = curvature_from_connection(m, &x, &fa, &fb).map_err(err)?;
            let (r2, f2) = curvature_from_connection_components(m, &x, &fa, &fb).map_err(err)?;
            let cov = &r1 + &f1;
            let comp = &r2 + &f2;
            cross = cross
                .max(commutator.distance(&expected))
                .max(cov.distance(&omega))
                .max(comp.distance(&omega))
                .max(cov.distance(&comp))
                .max(test.eval(&x).map_err(err)?.commutator(&cov).map_err(err)?.distance(&commutator));
        }
    }
    let mut c = Checks::new();
    c.at_most("sphere Ω vs −a∧b/r²", exact, 1e-5);
    c.at_most("sphere F", extrinsic, 1e-5);
    c.at_most("four-way cross-path", cross, 2e-3);
    c.finish()
}

fn geodesics() -> Outcome {
    let m = Manifold::sphere(1.0, 3).map_err(err)?;
    let (x0, u0) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let (oracle, _) = sphere_geodesic_closed_form(1.0, &x0, &u0, 2.0 * PI).map_err(err)?;
    let endpoint = |step: f64| -> Result<f64, String> {
        let t = geodesic_trace(&m, &x0, &u0, 2.0 * PI, step).map_err(err)?;
        Ok(linalg::distance(&t.last().x, &oracle))
    };
    let fine = endpoint(1e-3)?;
    let errors = [endpoint(1e-1)?, endpoint(5e-2)?, endpoint(2.5e-2)?];
    let order = errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min);
    let mut c = Checks::new();
    c.at_most("endpoint error at step 1e-3", fine, 1e-6);
    c.at_least("observed order", order, 3.7);
    c.finish()
}

fn holonomies() -> Outcome {
    let sphere = Manifold::sphere(1.0, 3).map_err(err)?;
    let octant = sphere_loop(1.0, "octant", 1e-3).map_err(err)?;
    let r = holonomy(&sphere, &octant).map_err(err)?;
    let angle = (r.rotation_angle() - FRAC_PI_2).abs();
    let back = holonomy(&sphere, &octant.reversed()).map_err(err)?;
    let inverse = back.value().distance(r.reverse().value());

    let plane = Manifold::plane(3).map_err(err)?;
    let corners = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 2.0, 0.0], [0.0, 2.0, 0.0]];
    let mut sides = Vec::new();
    for k in 0..4 {
        let (p, q) = (corners[k], corners[(k + 1) % 4]);
        let d = linalg::sub(&q, &p);
        let len = linalg::norm(&d);
        let u = linalg::scale(&d, 1.0 / len);
        sides.push(
            CurveTrace::from_fn(len, 50, |t| (linalg::axpy(&p, t, &u), u.clone())).map_err(err)?,
        );
    }
    let square = CurveTrace::concat(&sides).map_err(err)?;
    let flat = holonomy(&plane, &square).map_err(err)?;
    let identity = flat.value().distance(Rotor::identity(3).value());
    let mut c = Checks::new();
    c.at_most("octant angle error", angle, 1e-3);
    c.at_most("planar loop vs identity", identity, 1e-8);
    c.at_most("reverse loop vs inverse", inverse, 1e-6);
    c.finish()
}

fn shape_minimizers() -> Outcome {
    let mut c = Checks::new();
    // (a) spheres
    let mut sphere_dev = 0.0f64;
    for r in [1.0, 2.0] {
        let m = Manifold::sphere(r, 3).map_err(err)?;
        let x0 = [0.0, 0.0, r];
        let u0 = linalg::unit(&[1.0, 2.0, 0.0]).unwrap();
        let sol = shape_min_solve(&ShapeMinProblem::new(m.clone(), &x0, &u0, 3.0, 1e-2)).map_err(err)?;
        let geo = geodesic_trace(&m, &x0, &u0, 3.0, 1e-2).map_err(err)?;
        sphere_dev = sphere_dev.max(max_pointwise_deviation(&sol.trace, &geo).map_err(err)?);
    }
    c.at_most("(a) sphere vs geodesic", sphere_dev, 1e-5);

    // (b) ellipsoid
    let a_map = ellipsoid_matrix();
    let m = ellipsoid();
    let generic_x0 = {
        let d = linalg::unit(&[0.5, 1.0, 1.5]).unwrap();
        linalg::scale(&d, 1.0 / linalg::dot(&d, &a_map.apply(&d)).sqrt())
    };
    let generic_u0 =
        linalg::unit(&m.project_vector(&generic_x0, &[1.0, 0.2, 0.0]).map_err(err)?).unwrap();
    let starts = [
        (vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]),
        (generic_x0, generic_u0),
    ];
    let (mut dev, mut on_surface, mut planar, mut residual) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (x0, u0) in &starts {
        let curve = EllipsoidCurve::new(&a_map, x0, u0).map_err(err)?;
        let oracle = curve.arc_length_trace(2.0, 1e-2).map_err(err)?;
        let sol = shape_min_solve(&ShapeMinProblem::new(m.clone(), x0, u0, oracle.length(), oracle.step()))
            .map_err(err)?;
        dev = dev.max(max_pointwise_deviation(&sol.trace, &oracle).map_err(err)?);
        let b0 = Multivector::vector(x0).outer(&Multivector::vector(u0)).map_err(err)?;
        for k in 0..=200 {
            let x = curve.position(0.01 * k as f64).map_err(err)?;
            on_surface = on_surface.max((linalg::dot(&x, &a_map.apply(&x)) - 1.0).abs());
            planar = planar.max(Multivector::vector(&x).outer(&b0).map_err(err)?.magnitude());
        }
        let dense = curve.arc_length_trace(2.0, 1e-3).map_err(err)?;
        for i in 1..dense.len() - 1 {
            residual = residual.max(linalg::norm(&euler_lagrange_residual(&m, &dense, i).map_err(err)?));
        }
    }
    c.at_most("(b) integrator vs closed form", dev, 1e-4);
    c.at_most("closed form on surface", on_surface, 1e-9);
    c.at_most("closed form planarity", planar, 1e-9);
    c.at_most("closed form EL residual", residual, 1e-3);

    // (c) minimality of a great-circle arc
    let sphere = Manifold::sphere(1.0, 3).map_err(err)?;
    let arc = great_circle_arc(1.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 2.0, 1e-2).map_err(err)?;
    let report = verify_minimality(&sphere, &arc, 20, 1e-2, 0).map_err(err)?;
    c.at_most("(c) largest Σ decrease", -report.min, 1e-6);
    c.at_least("first-order ratio slope", report.ratio_slope.unwrap_or(0.0), 0.8);
    c.finish()
}

fn fermi_walker() -> Outcome {
    let m = helix();
    let (length, count) = (10.0, 2000);
    let trace = CurveTrace::from_fn(length, count, helix_at).map_err(err)?;
    let report = transport_rotors(&m, &trace).map_err(err)?;
    let (_, u0) = helix_at(0.0);
    let n1 = vec![-1.0, 0.0, 0.0];
    let n2 = vec![
        u0[1] * n1[2] - u0[2] * n1[1],
        u0[2] * n1[0] - u0[0] * n1[2],
        u0[0] * n1[1] - u0[1] * n1[0],
    ];
    let initial = [u0.clone(), n1, n2];
    let frames: Vec<Vec<Vec<f64>>> = report
        .rotors
        .iter()
        .map(|r| initial.iter().map(|v| r.apply_vector(v)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut drift = 0.0f64;
    for f in &frames {
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                drift = drift.max((linalg::dot(&f[i], &f[j]) - target).abs());
            }
        }
    }
    let h = length / count as f64;
    let (mut tangent_err, mut normal_part) = (0.0f64, 0.0f64);
    for k in 1..count {
        let s = &trace.samples()[k];
        let shape = shape_tensor(&m, &s.x, &s.u).map_err(err)?;
        for v in 1..3 {
            let dv = linalg::scale(&linalg::sub(&frames[k + 1][v], &frames[k - 1][v]), 0.5 / h);
            let predicted = Multivector::vector(&frames[k][v]).inner(&shape).map_err(err)?.to_vector();
            tangent_err = tangent_err.max((linalg::dot(&dv, &s.u) - linalg::dot(&predicted, &s.u)).abs());
            normal_part = normal_part.max(linalg::norm(&linalg::axpy(&dv, -linalg::dot(&dv, &s.u), &s.u)));
        }
    }
    let mut c = Checks::new();
    c.at_most("frame drift per unit length", drift / length, 1e-7);
    c.at_most("tangent component vs shape rotor", tangent_err, 1e-5);
    c.at_most("normal rotation rate", normal_part, 1e-5);
    c.finish()
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_shapeflow");
    let dir = tempfile::tempdir().map_err(err)?;
    let path = |name: &str| dir.path().join(name);
    std::fs::write(path("sphere.json"), r#"{"kind":"sphere","radius":1.0,"ambient_dim":3}"#).map_err(err)?;
    std::fs::write(path("plane.json"), r#"{"kind":"implicit","ambient_dim":3,"expr":"x3","level":0}"#)
        .map_err(err)?;
    let run = |args: &[&str]| -> Result<std::process::Output, String> {
        Command::new(bin).current_dir(dir.path()).args(args).output().map_err(err)
    };
    let geodesic = |out: &str| {
        run(&[
            "geodesic", "--manifold", "sphere.json", "--x0", "1,0,0", "--u0", "0,1,0",
            "--length", "1.5707963267948966", "--step", "0.001", "--out", out,
        ])
    };
    let mut c = Checks::new();
    let first = geodesic("trace.csv")?;
    let second = geodesic("again.csv")?;
    c.holds("geodesic exit 0", first.status.code() == Some(0) && second.status.code() == Some(0));
    let bytes = std::fs::read(path("trace.csv")).map_err(err)?;
    c.holds("byte-identical reruns", bytes == std::fs::read(path("again.csv")).map_err(err)?);
    let trace = CurveTrace::read_csv(bytes.as_slice()).map_err(err)?;
    c.at_most("geodesic end vs (0,1,0)", linalg::distance(&trace.last().x, &[0.0, 1.0, 0.0]), 1e-6);
    let sphere = Manifold::sphere(1.0, 3).map_err(err)?;
    let direct = geodesic_trace(&sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.5707963267948966, 0.001)
        .map_err(err)?;
    c.holds("CSV round trip bit-exact", trace == direct);
    c.holds("CSV rewrite identical", direct.to_csv_string(true).map_err(err)?.as_bytes() == bytes.as_slice());

    let shape = run(&["shape", "--manifold", "plane.json", "--x0", "0,0,0", "--a", "1,0,0"])?;
    let value: serde_json::Value = serde_json::from_slice(&shape.stdout).map_err(err)?;
    let zero = value["shape"]
        .as_object()
        .map_or(false, |o| o.values().all(|v| v.as_f64() == Some(0.0)));
    c.holds("plane shape all-zero", shape.status.code() == Some(0) && zero);

    let hol = run(&["holonomy", "--manifold", "sphere.json", "--loop", "octant"])?;
    let value: serde_json::Value = serde_json::from_slice(&hol.stdout).map_err(err)?;
    let angle = value["rotation_angle"].as_f64().unwrap_or(f64::NAN);
    c.at_most("holonomy angle error", (angle - FRAC_PI_2).abs(), 1e-3);
    c.finish()
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "GA law suite", ga_laws),
        ("AC2", "sphere shape tensor", sphere_shape),
        ("AC3", "ellipsoid shape tensor", ellipsoid_shape),
        ("AC4", "identity suite", identities),
        ("AC5", "curvature", curvature),
        ("AC6", "geodesics", geodesics),
        ("AC7", "holonomy", holonomies),
        ("AC8", "shape-minimizing curves", shape_minimizers),
        ("AC9", "Fermi-Walker transport", fermi_walker),
        ("AC10", "CLI determinism and round trip", cli),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(result) => result,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {id} {name}: {detail} ({:.2} s)",
            start.elapsed().as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
