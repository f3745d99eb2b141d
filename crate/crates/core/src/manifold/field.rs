//! Multivector-valued fields on a neighborhood of a manifold.

use std::fmt;
use std::sync::Arc;

use super::{fd_step, Manifold, Point};
use crate::error::Result;
use crate::ga::Multivector;
use crate::linalg;

/// Tangent vector field, evaluated at ambient points on the manifold.
pub type VectorField<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + 'a;

type Evaluator = dyn Fn(&[f64]) -> Result<Multivector> + Send + Sync;

/// A multivector field `A(x)` with a short description.
#[derive(Clone)]
pub struct MultivectorField {
    evaluator: Arc<Evaluator>,
    descriptor: String,
}

impl fmt::Debug for MultivectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultivectorField({})", self.descriptor)
    }
}

impl MultivectorField {
    pub fn new(
        descriptor: impl Into<String>,
        evaluator: impl Fn(&[f64]) -> Result<Multivector> + Send + Sync + 'static,
    ) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            descriptor: descriptor.into(),
        }
    }

    pub fn constant(value: Multivector) -> Self {
        let descriptor = format!("constant {value}");
        Self::new(descriptor, move |_| Ok(value.clone()))
    }

    /// The pseudoscalar field `I_M(x)`.
    pub fn pseudoscalar(m: &Manifold) -> Self {
        let m = m.clone();
        Self::new("pseudoscalar", move |x| m.pseudoscalar_at(x))
    }

    /// `P(v)` at each point: the tangential part of a fixed ambient vector.
    pub fn tangent_projection(m: &Manifold, v: &[f64]) -> Self {
        let (m, v) = (m.clone(), v.to_vec());
        Self::new(format!("tangent part of {v:?}"), move |x| {
            Ok(Multivector::vector(&m.project_vector(x, &v)?))
        })
    }

    /// `P⊥(v)` at each point: the transverse part of a fixed ambient vector.
    pub fn transverse_projection(m: &Manifold, v: &[f64]) -> Self {
        let (m, v) = (m.clone(), v.to_vec());
        Self::new(format!("transverse part of {v:?}"), move |x| {
            let t = m.project_vector(x, &v)?;
            Ok(Multivector::vector(&linalg::sub(&v, &t)))
        })
    }

    /// Pointwise geometric product of two fields.
    pub fn product(a: &Self, b: &Self) -> Self {
        let (a, b) = (a.clone(), b.clone());
        let descriptor = format!("({}) ({})", a.descriptor, b.descriptor);
        Self::new(descriptor, move |x| a.eval(x)?.geometric_product(&b.eval(x)?))
    }

    pub fn eval(&self, x: &[f64]) -> Result<Multivector> {
        (self.evaluator)(x)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }
}

/// Central difference of `eval` along the manifold: `a·∂A` with step `h`
/// along the unit direction of `a`.
pub(crate) fn derivative_along(
    m: &Manifold,
    p: &Point,
    a: &[f64],
    h: f64,
    eval: &dyn Fn(&Point) -> Result<Multivector>,
) -> Result<Multivector> {
    let scale = linalg::norm(a);
    if scale == 0.0 {
        return Ok(Multivector::zero(m.ambient_dim()));
    }
    let dir = linalg::scale(a, 1.0 / scale);
    let plus = eval(&m.step_along(p, &dir, h)?)?;
    let minus = eval(&m.step_along(p, &dir, -h)?)?;
    Ok((plus - minus).scale(scale / (2.0 * h)))
}

impl Manifold {
    /// `a·∂A` for a field, by central differences along the manifold.
    pub fn field_derivative(
        &self,
        field: &MultivectorField,
        x: &[f64],
        a: &[f64],
    ) -> Result<Multivector> {
        let p = self.locate(x)?;
        derivative_along(self, &p, a, fd_step(x), &|q| field.eval(&q.x))
    }
}
