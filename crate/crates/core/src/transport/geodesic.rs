//! RK4 integration of curves on a manifold, with per-step re-projection.

use super::trace::{CurveTrace, TraceSample};
use crate::error::{Error, Result};
use crate::ga::Multivector;
use crate::linalg;
use crate::manifold::{Manifold, Point};

/// Start-point tolerance for integrators.
const START_TOL: f64 = 1e-6;

/// Second-order system `x' = u`, `u' = accel(x, u)`.
pub(crate) type Acceleration<'a> = dyn FnMut(&Point, &[f64], f64) -> Result<Vec<f64>> + 'a;

/// Checks and normalizes an initial point and direction.
pub(crate) fn start_state(m: &Manifold, x0: &[f64], u0: &[f64]) -> Result<(Point, Vec<f64>)> {
    crate::error::check_dim(m.ambient_dim(), x0.len())?;
    crate::error::check_dim(m.ambient_dim(), u0.len())?;
    let p = m.project_point(x0, None)?;
    let offset = linalg::distance(&p.x, x0);
    if offset > START_TOL * (1.0 + linalg::norm(x0)) {
        return Err(Error::invalid(format!(
            "start point is {offset:e} away from the manifold"
        )));
    }
    let u = m.tangent_space(&p)?.project(u0);
    let un = linalg::norm(&u);
    if !(un > 1e-8 * linalg::norm(u0).max(1.0)) {
        return Err(Error::invalid("start direction has no tangential component"));
    }
    Ok((p, linalg::scale(&u, 1.0 / un)))
}

/// Point at which to evaluate a stage of the integrator: hypersurfaces use the
/// off-surface extension directly, charts pull the point back.
pub(crate) fn stage_point(m: &Manifold, x: &[f64], hint: &Point) -> Result<Point> {
    if m.is_hypersurface() {
        Ok(Point {
            x: x.to_vec(),
            params: None,
        })
    } else {
        m.locate_near(x, Some(hint))
    }
}

/// Classical RK4 in ambient coordinates over `[0, length]` with uniform step
/// `length / ceil(length / step)`. After each step the position is projected
/// back onto the manifold and the velocity onto its tangent space, then
/// normalized.
pub(crate) fn integrate_curve(
    m: &Manifold,
    start: Point,
    u0: Vec<f64>,
    length: f64,
    step: f64,
    accel: &mut Acceleration<'_>,
) -> Result<CurveTrace> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step must be positive"));
    }
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::invalid("length must be non-negative"));
    }
    let count = ((length / step).ceil() as usize).max(1);
    let h = length / count as f64;
    let mut samples = vec![TraceSample::new(0.0, start.x.clone(), u0.clone())];
    if length == 0.0 {
        return CurveTrace::new(samples, step);
    }
    let mut p = start;
    let mut u = u0;
    for k in 0..count {
        let tau = k as f64 * h;
        let a1 = accel(&p, &u, tau)?;
        let x2 = linalg::axpy(&p.x, 0.5 * h, &u);
        let u2 = linalg::axpy(&u, 0.5 * h, &a1);
        let a2 = accel(&stage_point(m, &x2, &p)?, &u2, tau + 0.5 * h)?;
        let x3 = linalg::axpy(&p.x, 0.5 * h, &u2);
        let u3 = linalg::axpy(&u, 0.5 * h, &a2);
        let a3 = accel(&stage_point(m, &x3, &p)?, &u3, tau + 0.5 * h)?;
        let x4 = linalg::axpy(&p.x, h, &u3);
        let u4 = linalg::axpy(&u, h, &a3);
        let a4 = accel(&stage_point(m, &x4, &p)?, &u4, tau + h)?;
        let mut x_next = p.x.clone();
        let mut u_next = u.clone();
        for i in 0..x_next.len() {
            x_next[i] += h / 6.0 * (u[i] + 2.0 * u2[i] + 2.0 * u3[i] + u4[i]);
            u_next[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        let q = m.project_point(&x_next, Some(&p))?;
        let u_proj = m.tangent_space(&q)?.project(&u_next);
        u = linalg::unit(&u_proj).ok_or_else(|| {
            Error::invalid(format!("velocity lost its tangential part at tau = {}", tau + h))
        })?;
        p = q;
        samples.push(TraceSample::new((k + 1) as f64 * h, p.x.clone(), u.clone()));
    }
    CurveTrace::new(samples, h)
}

/// Geodesic from `x0` in direction `u0`: integrates `x' = u`, `u' = u·S(u)`.
///
/// ```
/// use shapeflow::manifold::Manifold;
/// use shapeflow::transport::geodesic_trace;
/// let sphere = Manifold::sphere(1.0, 3).unwrap();
/// let quarter = std::f64::consts::FRAC_PI_2;
/// let trace = geodesic_trace(&sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], quarter, 1e-2).unwrap();
/// let end = &trace.last().x;
/// assert!(end[0].abs() < 1e-6 && (end[1] - 1.0).abs() < 1e-6);
/// ```
pub fn geodesic_trace(
    m: &Manifold,
    x0: &[f64],
    u0: &[f64],
    length: f64,
    step: f64,
) -> Result<CurveTrace> {
    let (p, u) = start_state(m, x0, u0)?;
    let mut accel = |q: &Point, u: &[f64], _tau: f64| -> Result<Vec<f64>> {
        let s = m.shape_bivector(q, u)?;
        Ok(Multivector::vector(u).inner(&s)?.to_vector())
    };
    integrate_curve(m, p, u, length, step, &mut accel)
}
