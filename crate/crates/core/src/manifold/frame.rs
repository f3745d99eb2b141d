//! Tangent and transverse frames, and Lie brackets of tangent vector fields.

use super::{fd_step, Manifold, Point};
use crate::error::{Error, Result};
use crate::linalg;

/// Seeds whose orthogonalized remainder is shorter than this are unusable.
const SEED_TOL: f64 = 1e-6;

/// Gram–Schmidt in the given order; fails if the vectors are (nearly) dependent.
pub(crate) fn orthonormalize(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let r = linalg::orthogonalize(v, &basis);
        let rn = linalg::norm(&r);
        if !(rn > super::DEGENERACY_TOL * linalg::norm(v).max(1.0)) {
            return Err(Error::DegenerateChart { wedge_norm: rn });
        }
        basis.push(linalg::scale(&r, 1.0 / rn));
    }
    Ok(basis)
}

/// Orthonormal basis of the complement of `span(against)` (orthonormal input)
/// built from the ambient basis vectors.
///
/// Without a fixed `order` the seed with the largest remainder is taken at each
/// step; the chosen order is returned so that nearby points can reuse it and
/// obtain a smooth frame field.
pub(crate) fn complete_basis(
    against: &[Vec<f64>],
    dim: usize,
    order: Option<&[usize]>,
) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let count = dim - against.len();
    let mut span: Vec<Vec<f64>> = against.to_vec();
    let mut basis = Vec::with_capacity(count);
    let mut chosen = Vec::with_capacity(count);
    for step in 0..count {
        let (seed, r) = match order {
            Some(order) => {
                let i = order[step];
                (i, linalg::orthogonalize(&linalg::basis(dim, i), &span))
            }
            None => (0..dim)
                .filter(|i| !chosen.contains(i))
                .map(|i| (i, linalg::orthogonalize(&linalg::basis(dim, i), &span)))
                .max_by(|a, b| linalg::norm(&a.1).total_cmp(&linalg::norm(&b.1)))
                .expect("a seed remains while the basis is incomplete"),
        };
        let rn = linalg::norm(&r);
        if rn < SEED_TOL {
            return Err(Error::Singular(format!(
                "frame seed e{} degenerates (remainder {rn:e})",
                seed + 1
            )));
        }
        let e = linalg::scale(&r, 1.0 / rn);
        span.push(e.clone());
        basis.push(e);
        chosen.push(seed);
    }
    Ok((basis, chosen))
}

/// Tangent vectors `e_j`, transverse vectors `e_b`, and their reciprocal frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    pub tangent: Vec<Vec<f64>>,
    pub transverse: Vec<Vec<f64>>,
    pub reciprocal_tangent: Vec<Vec<f64>>,
    pub reciprocal_transverse: Vec<Vec<f64>>,
}

fn reciprocal(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let gram: Vec<Vec<f64>> = vectors
        .iter()
        .map(|a| vectors.iter().map(|b| linalg::dot(a, b)).collect())
        .collect();
    let inv = linalg::invert(&gram).ok_or_else(|| Error::Singular("frame is degenerate".into()))?;
    Ok(inv
        .iter()
        .map(|row| {
            row.iter()
                .zip(vectors)
                .fold(vec![0.0; vectors[0].len()], |acc, (c, v)| {
                    linalg::axpy(&acc, *c, v)
                })
        })
        .collect())
}

impl FrameData {
    /// Builds the reciprocal frames from the Gram matrices.
    pub fn new(tangent: Vec<Vec<f64>>, transverse: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self {
            reciprocal_tangent: reciprocal(&tangent)?,
            reciprocal_transverse: reciprocal(&transverse)?,
            tangent,
            transverse,
        })
    }

    /// Metric `g_ij = e_i·e_j` of the tangent frame.
    pub fn metric(&self) -> Vec<Vec<f64>> {
        self.tangent
            .iter()
            .map(|a| self.tangent.iter().map(|b| linalg::dot(a, b)).collect())
            .collect()
    }

    /// Largest deviation of `e_j·e^k` and `e_b·e^c` from the identity.
    pub fn duality_defect(&self) -> f64 {
        let defect = |a: &[Vec<f64>], b: &[Vec<f64>]| {
            let mut worst = 0.0f64;
            for (j, ej) in a.iter().enumerate() {
                for (k, ek) in b.iter().enumerate() {
                    let target = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((linalg::dot(ej, ek) - target).abs());
                }
            }
            worst
        };
        defect(&self.tangent, &self.reciprocal_tangent)
            .max(defect(&self.transverse, &self.reciprocal_transverse))
    }
}

/// Which tangent frame field to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameChoice {
    /// Orthonormal, from Gram–Schmidt.
    Orthonormal,
    /// Coordinate vectors `∂f/∂u_j` of a chart.
    Coordinate,
}

/// A smooth frame field near a base point: the Gram–Schmidt seed order is
/// fixed at the base point and reused everywhere.
#[derive(Debug, Clone)]
pub(crate) struct FrameField<'m> {
    manifold: &'m Manifold,
    choice: FrameChoice,
    tangent_order: Vec<usize>,
    transverse_order: Vec<usize>,
}

impl<'m> FrameField<'m> {
    pub fn new(manifold: &'m Manifold, base: &Point, choice: FrameChoice) -> Result<Self> {
        if choice == FrameChoice::Coordinate && base.params.is_none() {
            return Err(Error::invalid("coordinate frames need a parametric manifold"));
        }
        let mut field = Self {
            manifold,
            choice,
            tangent_order: Vec::new(),
            transverse_order: Vec::new(),
        };
        let dim = manifold.ambient_dim();
        match &base.params {
            None => {
                let n = manifold.unit_normal(&base.x)?;
                field.tangent_order = complete_basis(&[n], dim, None)?.1;
            }
            Some(u) => {
                let tangent = orthonormalize(&manifold.chart_tangents(u)?)?;
                field.transverse_order = complete_basis(&tangent, dim, None)?.1;
            }
        }
        Ok(field)
    }

    /// Frame at `p`. Off-manifold points of a hypersurface are allowed and use
    /// the normalized gradient field.
    pub fn at(&self, p: &Point) -> Result<FrameData> {
        let dim = self.manifold.ambient_dim();
        match &p.params {
            None => {
                let n = self.manifold.unit_normal(&p.x)?;
                let (tangent, _) = complete_basis(&[n.clone()], dim, Some(&self.tangent_order))?;
                FrameData::new(tangent, vec![n])
            }
            Some(u) => {
                let coordinate = self.manifold.chart_tangents(u)?;
                let orthonormal = orthonormalize(&coordinate)?;
                let (transverse, _) =
                    complete_basis(&orthonormal, dim, Some(&self.transverse_order))?;
                let tangent = match self.choice {
                    FrameChoice::Orthonormal => orthonormal,
                    FrameChoice::Coordinate => coordinate,
                };
                FrameData::new(tangent, transverse)
            }
        }
    }

    /// Frame at a point displaced by `h` along `a` from `p`, without projecting
    /// hypersurface points back (the frame field extends off the surface).
    pub fn at_offset(&self, p: &Point, a: &[f64], h: f64) -> Result<FrameData> {
        self.at(&self.manifold.offset_point(p, a, h)?)
    }
}

impl Manifold {
    /// `x + h a` for hypersurfaces (no projection), `f(u + h du)` for charts.
    pub(crate) fn offset_point(&self, p: &Point, a: &[f64], h: f64) -> Result<Point> {
        match &p.params {
            None => Ok(Point {
                x: linalg::axpy(&p.x, h, a),
                params: None,
            }),
            Some(u) => {
                let du = self.parameter_velocity(u, a)?;
                self.point_from_params(linalg::axpy(u, h, &du))
            }
        }
    }
}

/// Orthonormal tangent frame plus orthonormal transverse completion at `x`.
pub fn tangent_frame(m: &Manifold, x: &[f64]) -> Result<FrameData> {
    let p = m.locate(x)?;
    FrameField::new(m, &p, FrameChoice::Orthonormal)?.at(&p)
}

/// Coordinate tangent frame of a chart at `x`, with its reciprocal frame.
pub fn coordinate_frame(m: &Manifold, x: &[f64]) -> Result<FrameData> {
    let p = m.locate(x)?;
    FrameField::new(m, &p, FrameChoice::Coordinate)?.at(&p)
}

/// Derivative `a·∂v` of a vector field along the manifold, by central differences.
pub fn directional_derivative(
    m: &Manifold,
    field: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    a: &[f64],
) -> Result<Vec<f64>> {
    let p = m.locate(x)?;
    let scale = linalg::norm(a);
    if scale == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let dir = linalg::scale(a, 1.0 / scale);
    let h = fd_step(x);
    let plus = field(&m.step_along(&p, &dir, h)?.x)?;
    let minus = field(&m.step_along(&p, &dir, -h)?.x)?;
    Ok(linalg::scale(&linalg::sub(&plus, &minus), scale / (2.0 * h)))
}

/// `[f, g] = f·∂g − g·∂f`, projected onto the tangent space at `x`.
pub fn lie_bracket(
    m: &Manifold,
    f: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    g: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
) -> Result<Vec<f64>> {
    let fx = f(x)?;
    let gx = g(x)?;
    let raw = linalg::sub(
        &directional_derivative(m, g, x, &fx)?,
        &directional_derivative(m, f, x, &gx)?,
    );
    let p = m.locate(x)?;
    Ok(m.tangent_space(&p)?.project(&raw))
}
