//! Parallel transport by shape-tensor rotors, the covariant derivative,
//! geodesics and holonomy.

mod geodesic;
mod loops;
mod trace;

pub use geodesic::geodesic_trace;
pub(crate) use geodesic::{integrate_curve, start_state};
pub use loops::{great_circle_arc, latitude_circle, sphere_loop, LOOP_NAMES};
pub use trace::{format_float, CurveTrace, TraceSample};

use crate::error::{check_dim, Error, Result};
use crate::ga::{Multivector, Rotor};
use crate::linalg;
use crate::manifold::{fd_step, Manifold, MultivectorField, Point};

/// Holonomy loops must close to within this distance.
pub const LOOP_CLOSURE_TOL: f64 = 1e-8;
/// Rotor defects above this are reported by [`TransportReport::defect_exceeded`].
pub const ROTOR_DEFECT_LIMIT: f64 = 1e-6;

/// One finite transport step `e^{−(ε/2)S(a)} A e^{(ε/2)S(a)}` at `x`.
///
/// ```
/// use shapeflow::ga::Multivector;
/// use shapeflow::manifold::Manifold;
/// use shapeflow::transport::transport_step;
/// let sphere = Manifold::sphere(1.0, 3).unwrap();
/// let e2 = Multivector::basis_vector(3, 1);
/// let moved = transport_step(&sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &e2,
///     std::f64::consts::FRAC_PI_2).unwrap();
/// assert!(moved.distance(&Multivector::basis_vector(3, 0).scale(-1.0)) < 1e-12);
/// ```
pub fn transport_step(
    m: &Manifold,
    x: &[f64],
    a: &[f64],
    value: &Multivector,
    eps: f64,
) -> Result<Multivector> {
    check_dim(m.ambient_dim(), a.len())?;
    check_dim(m.ambient_dim(), value.dim())?;
    let p = m.locate(x)?;
    let s = m.shape_bivector(&p, a)?;
    Rotor::exp(&s.scale(-0.5 * eps))?.apply(value)
}

/// Accumulated rotors of a transport along a trace.
#[derive(Debug, Clone)]
pub struct TransportReport {
    /// `R(τ_i)` at every sample, starting from the identity.
    pub rotors: Vec<Rotor>,
    /// Largest `|R̃R − 1|` seen before renormalization.
    pub max_defect: f64,
}

impl TransportReport {
    pub fn final_rotor(&self) -> &Rotor {
        self.rotors.last().expect("at least one rotor")
    }

    pub fn defect_exceeded(&self) -> bool {
        self.max_defect > ROTOR_DEFECT_LIMIT
    }
}

fn rotor_rate(s: &Multivector, r: &Multivector) -> Multivector {
    (s * r).scale(-0.5)
}

/// Integrates `R' = −S(u) R / 2` with RK4 over the samples of `trace`.
///
/// Midpoint shape tensors are evaluated on the cubic Hermite interpolant of
/// the positions and tangents, projected back onto the manifold. The rotor is
/// renormalized after every step.
pub fn transport_rotors(m: &Manifold, trace: &CurveTrace) -> Result<TransportReport> {
    check_dim(m.ambient_dim(), trace.dim())?;
    let dim = m.ambient_dim();
    let samples = trace.samples();
    let mut rotors = vec![Rotor::identity(dim)];
    let mut max_defect = 0.0f64;
    let mut point = m.locate(&samples[0].x)?;
    let mut shape = m.shape_bivector(&point, &samples[0].u)?;
    for w in samples.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        let h = s1.tau - s0.tau;
        let next = m.locate_near(&s1.x, Some(&point))?;
        let current = rotors.last().expect("rotor history").value().clone();
        if h == 0.0 {
            // corner of a piecewise curve: position is unchanged
            point = next;
            shape = m.shape_bivector(&point, &s1.u)?;
            rotors.push(rotors.last().expect("rotor history").clone());
            continue;
        }
        let x_mid = linalg::axpy(
            &linalg::scale(&linalg::add(&s0.x, &s1.x), 0.5),
            h / 8.0,
            &linalg::sub(&s0.u, &s1.u),
        );
        let u_mid = linalg::axpy(
            &linalg::scale(&linalg::sub(&s1.x, &s0.x), 1.5 / h),
            -0.25,
            &linalg::add(&s0.u, &s1.u),
        );
        let mid = m.project_point(&x_mid, Some(&point))?;
        let u_mid = m.tangent_space(&mid)?.project(&u_mid);
        let s_mid = m.shape_bivector(&mid, &u_mid)?;
        let s_end = m.shape_bivector(&next, &s1.u)?;
        let k1 = rotor_rate(&shape, &current);
        let k2 = rotor_rate(&s_mid, &(&current + &k1.scale(0.5 * h)));
        let k3 = rotor_rate(&s_mid, &(&current + &k2.scale(0.5 * h)));
        let k4 = rotor_rate(&s_end, &(&current + &k3.scale(h)));
        let increment = (k1 + (k2 + k3).scale(2.0) + k4).scale(h / 6.0);
        let mut r = Rotor::from_multivector_unchecked(&current + &increment);
        max_defect = max_defect.max(r.unitarity_defect());
        r.renormalize()?;
        rotors.push(r);
        point = next;
        shape = s_end;
    }
    Ok(TransportReport { rotors, max_defect })
}

/// Transports `value` along the whole trace; returns `R A R̃` and `R`.
pub fn transport_along(
    m: &Manifold,
    trace: &CurveTrace,
    value: &Multivector,
) -> Result<(Multivector, Rotor)> {
    check_dim(m.ambient_dim(), value.dim())?;
    let report = transport_rotors(m, trace)?;
    let r = report.final_rotor().clone();
    Ok((r.apply(value)?, r))
}

/// The trace with the accumulated rotor stored at every sample.
pub fn with_transport(m: &Manifold, trace: &CurveTrace) -> Result<CurveTrace> {
    let report = transport_rotors(m, trace)?;
    let mut out = trace.clone();
    out.set_rotors(report.rotors);
    Ok(out)
}

/// Covariant derivative `a·DA = a·∂A − A×S(a)`.
pub fn covariant_derivative(
    m: &Manifold,
    field: &MultivectorField,
    x: &[f64],
    a: &[f64],
) -> Result<Multivector> {
    check_dim(m.ambient_dim(), a.len())?;
    let p = m.locate(x)?;
    covariant_derivative_at(m, &p, a, fd_step(x), &|q: &Point| field.eval(&q.x))
}

pub(crate) fn covariant_derivative_at(
    m: &Manifold,
    p: &Point,
    a: &[f64],
    h: f64,
    eval: &dyn Fn(&Point) -> Result<Multivector>,
) -> Result<Multivector> {
    let derivative = crate::manifold::derivative_along(m, p, a, h, eval)?;
    let s = m.shape_bivector(p, a)?;
    Ok(derivative - eval(p)?.commutator(&s)?)
}

/// Rotor accumulated around a closed loop.
pub fn holonomy(m: &Manifold, loop_trace: &CurveTrace) -> Result<Rotor> {
    if !loop_trace.is_closed(LOOP_CLOSURE_TOL) {
        return Err(Error::invalid(format!(
            "loop is not closed: end point is {:e} from the start",
            linalg::distance(&loop_trace.first().x, &loop_trace.last().x)
        )));
    }
    Ok(transport_rotors(m, loop_trace)?.final_rotor().clone())
}
