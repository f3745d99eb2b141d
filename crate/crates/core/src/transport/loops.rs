//! Closed-form curves on round spheres in `R^3`, used as named holonomy loops.

use std::f64::consts::{FRAC_PI_2, PI};

use super::trace::CurveTrace;
use crate::error::{Error, Result};
use crate::linalg;

/// Names accepted by [`sphere_loop`]; `latitude:<deg>` takes a latitude in degrees.
pub const LOOP_NAMES: &[&str] = &["octant", "equator", "latitude:<deg>"];

fn sample_count(length: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step must be positive"));
    }
    Ok(((length / step).ceil() as usize).max(1))
}

/// Arc of the great circle through `x0` (on the sphere of radius `radius`)
/// with unit tangent `u0`, sampled by arc length.
pub fn great_circle_arc(
    radius: f64,
    x0: &[f64],
    u0: &[f64],
    length: f64,
    step: f64,
) -> Result<CurveTrace> {
    if (linalg::norm(x0) - radius).abs() > 1e-10 * radius
        || linalg::dot(x0, u0).abs() > 1e-10 * radius
        || (linalg::norm(u0) - 1.0).abs() > 1e-10
    {
        return Err(Error::invalid(
            "great-circle arc needs |x0| = radius and a unit tangent u0",
        ));
    }
    let count = sample_count(length, step)?;
    CurveTrace::from_fn(length, count, |tau| {
        let (s, c) = (tau / radius).sin_cos();
        let x = linalg::add(&linalg::scale(x0, c), &linalg::scale(u0, radius * s));
        let u = linalg::add(&linalg::scale(x0, -s / radius), &linalg::scale(u0, c));
        (x, u)
    })
}

/// Circle of constant latitude (radians) on the sphere in `R^3`, traversed
/// once eastward starting from the meridian through `e1`.
pub fn latitude_circle(radius: f64, latitude: f64, step: f64) -> Result<CurveTrace> {
    if !(latitude.abs() < FRAC_PI_2) {
        return Err(Error::invalid("latitude must lie strictly between the poles"));
    }
    let ring = radius * latitude.cos();
    let z = radius * latitude.sin();
    let length = 2.0 * PI * ring;
    let count = sample_count(length, step)?;
    CurveTrace::from_fn(length, count, |tau| {
        let (s, c) = (tau / ring).sin_cos();
        (vec![ring * c, ring * s, z], vec![-s, c, 0.0])
    })
}

/// A named closed loop on the sphere of radius `radius` in `R^3`.
///
/// `octant` runs along great circles `e1 → e2 → e3 → e1`, `equator` is the
/// great circle in the `e1e2` plane, and `latitude:<deg>` is a parallel.
pub fn sphere_loop(radius: f64, name: &str, step: f64) -> Result<CurveTrace> {
    let e = |i: usize| linalg::scale(&linalg::basis(3, i), radius);
    let unit = |i: usize| linalg::basis(3, i);
    let quarter = FRAC_PI_2 * radius;
    match name {
        "octant" => CurveTrace::concat(&[
            great_circle_arc(radius, &e(0), &unit(1), quarter, step)?,
            great_circle_arc(radius, &e(1), &unit(2), quarter, step)?,
            great_circle_arc(radius, &e(2), &unit(0), quarter, step)?,
        ]),
        "equator" => latitude_circle(radius, 0.0, step),
        _ => {
            let degrees = name
                .strip_prefix("latitude:")
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "unknown loop `{name}` (expected one of {})",
                        LOOP_NAMES.join(", ")
                    ))
                })?;
            latitude_circle(radius, degrees.to_radians(), step)
        }
    }
}
