//! The shape tensor `S(a) = I_M⁻¹ a·∂I_M` and the shape operator at a point.

use super::{fd_step, FrameChoice, FrameField, Manifold, Point};
use crate::error::{check_dim, Result};
use crate::ga::Multivector;
use crate::linalg;

/// A finite-difference shape tensor together with the magnitude of the
/// non-bivector parts that were discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEstimate {
    pub value: Multivector,
    pub discarded: f64,
}

impl Manifold {
    /// `I_M⁻¹ (a·∂I_M)` by central differences of the pseudoscalar field,
    /// keeping the grade-2 part.
    pub(crate) fn shape_fd(&self, p: &Point, a: &[f64]) -> Result<ShapeEstimate> {
        let a = self.tangent_space(p)?.project(a);
        let scale = linalg::norm(&a);
        let dim = self.ambient_dim();
        if scale == 0.0 {
            return Ok(ShapeEstimate {
                value: Multivector::zero(dim),
                discarded: 0.0,
            });
        }
        let dir = linalg::scale(&a, 1.0 / scale);
        let h = fd_step(&p.x);
        let pseudo = |q: &Point| match &q.params {
            None => self.hypersurface_pseudoscalar(&q.x),
            Some(u) => self.chart_pseudoscalar(u),
        };
        let plus = pseudo(&self.offset_point(p, &dir, h)?)?;
        let minus = pseudo(&self.offset_point(p, &dir, -h)?)?;
        let derivative = (plus - minus).scale(scale / (2.0 * h));
        let inverse = self.pseudoscalar(p)?.reverse();
        let full = inverse.geometric_product(&derivative)?;
        Ok(ShapeEstimate {
            discarded: full.without_grade(2).magnitude(),
            value: full.grade(2),
        })
    }

    /// `Σ_k e_k ∧ P⊥(a·∂e_k)` over an orthonormal tangent frame field.
    pub(crate) fn shape_from_frame(&self, p: &Point, a: &[f64]) -> Result<Multivector> {
        let space = self.tangent_space(p)?;
        let a = space.project(a);
        let scale = linalg::norm(&a);
        let dim = self.ambient_dim();
        let mut s = Multivector::zero(dim);
        if scale == 0.0 {
            return Ok(s);
        }
        let dir = linalg::scale(&a, 1.0 / scale);
        let h = fd_step(&p.x);
        let field = FrameField::new(self, p, FrameChoice::Orthonormal)?;
        let here = field.at(p)?;
        let plus = field.at_offset(p, &dir, h)?;
        let minus = field.at_offset(p, &dir, -h)?;
        for (k, e) in here.tangent.iter().enumerate() {
            let de = linalg::scale(
                &linalg::sub(&plus.tangent[k], &minus.tangent[k]),
                scale / (2.0 * h),
            );
            let transverse = space.reject(&de);
            s += &Multivector::vector(e).outer(&Multivector::vector(&transverse))?;
        }
        Ok(s)
    }

    /// Shape bivector used by the integrators.
    ///
    /// Hypersurfaces use the closed form `S(a) = n̂ ∧ H(a) / |∂φ|` from the
    /// Hessian `H` of the defining function; charts use [`Manifold::shape_fd`].
    pub(crate) fn shape_bivector(&self, p: &Point, a: &[f64]) -> Result<Multivector> {
        if p.params.is_some() {
            return Ok(self.shape_fd(p, a)?.value);
        }
        let n = self.unit_normal(&p.x)?;
        let a = linalg::axpy(a, -linalg::dot(a, &n), &n);
        let (g, hess) = self.level_hessian(&p.x)?;
        let ha: Vec<f64> = hess.iter().map(|row| linalg::dot(row, &a)).collect();
        let gn = linalg::norm(&g);
        let n_hat = linalg::scale(&g, 1.0 / gn);
        Multivector::vector(&n_hat).outer(&Multivector::vector(&linalg::scale(&ha, 1.0 / gn)))
    }

    /// Shape tensor with its finite-difference noise diagnostic.
    pub fn shape_tensor_estimate(&self, x: &[f64], a: &[f64]) -> Result<ShapeEstimate> {
        check_dim(self.ambient_dim(), a.len())?;
        let p = self.locate(x)?;
        self.shape_fd(&p, a)
    }
}

/// `S(a) = I_M⁻¹ a·∂I_M` at `x`; `a` is first projected onto the tangent space.
///
/// ```
/// use shapeflow::manifold::{shape_tensor, Manifold};
/// use shapeflow::ga::Multivector;
/// let sphere = Manifold::sphere(1.0, 3).unwrap();
/// let s = shape_tensor(&sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
/// assert!(s.distance(&Multivector::blade(3, 0b011, 1.0)) < 1e-9);
/// ```
pub fn shape_tensor(m: &Manifold, x: &[f64], a: &[f64]) -> Result<Multivector> {
    Ok(m.shape_tensor_estimate(x, a)?.value)
}

/// The shape tensor from an orthonormal frame field, `S(a) = e_k ∧ P⊥(a·∂e_k)`.
pub fn shape_tensor_frame(m: &Manifold, x: &[f64], a: &[f64]) -> Result<Multivector> {
    check_dim(m.ambient_dim(), a.len())?;
    let p = m.locate(x)?;
    m.shape_from_frame(&p, a)
}

/// The linear map `a ↦ S(a)` at a point, stored on an orthonormal tangent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperator {
    pub base_point: Vec<f64>,
    pub tangent_basis: Vec<Vec<f64>>,
    pub values: Vec<Multivector>,
}

impl ShapeOperator {
    /// `S(a) = Σ_j (a·e_j) S(e_j)`.
    pub fn apply(&self, a: &[f64]) -> Multivector {
        let dim = self.base_point.len();
        self.tangent_basis
            .iter()
            .zip(&self.values)
            .fold(Multivector::zero(dim), |acc, (e, s)| {
                acc + s.scale(linalg::dot(a, e))
            })
    }
}

pub fn shape_operator_at(m: &Manifold, x: &[f64]) -> Result<ShapeOperator> {
    let p = m.locate(x)?;
    let basis = m.tangent_space(&p)?.basis;
    let values = basis
        .iter()
        .map(|e| Ok(m.shape_fd(&p, e)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeOperator {
        base_point: p.x,
        tangent_basis: basis,
        values,
    })
}

/// `|S(a)|`.
pub fn shape_magnitude(op: &ShapeOperator, a: &[f64]) -> f64 {
    op.apply(a).magnitude()
}

/// `<S̃(a) S(b)>_0`, the shape metric.
pub fn shape_metric(op: &ShapeOperator, a: &[f64], b: &[f64]) -> f64 {
    op.apply(a)
        .reverse()
        .scalar_product(&op.apply(b))
        .expect("shape values share the ambient dimension")
}
