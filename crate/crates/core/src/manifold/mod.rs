//! Embedded manifolds: level sets and parametric charts in `R^N`.
//!
//! A [`Manifold`] supplies its unit pseudoscalar field `I_M(x)`, projection of
//! nearby points back onto itself, tangent frames, and the shape tensor
//! `S(a) = I_M⁻¹ a·∂I_M`.

mod field;
mod frame;
mod shape;
mod spec;

use crate::error::{check_dim, Error, Result};
use crate::expr::ScalarFieldExpr;
use crate::ga::{LinearMapN, Multivector, MAX_DIM};
use crate::linalg;

pub(crate) use field::derivative_along;
pub use field::{MultivectorField, VectorField};
pub use frame::{
    coordinate_frame, directional_derivative, lie_bracket, tangent_frame, FrameChoice, FrameData,
};
pub(crate) use frame::FrameField;
pub use shape::{
    shape_magnitude, shape_metric, shape_operator_at, shape_tensor, shape_tensor_frame,
    ShapeEstimate, ShapeOperator,
};

/// Gradient (or chart-wedge) magnitude below which a point counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;

/// Central-difference step `eps^{1/3} (1 + |x|)`.
pub(crate) fn fd_step(x: &[f64]) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + linalg::norm(x))
}

/// Outer step for a difference of differences, `eps^{1/4} (1 + |x|)`.
pub(crate) fn nested_fd_step(x: &[f64]) -> f64 {
    f64::EPSILON.powf(0.25) * (1.0 + linalg::norm(x))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldKind {
    /// `|x| = radius`.
    Sphere { radius: f64, ambient_dim: usize },
    /// `x·A(x) = level`.
    Quadric { matrix: LinearMapN, level: f64 },
    /// `φ(x) = level`.
    Implicit {
        expr: ScalarFieldExpr,
        ambient_dim: usize,
        level: f64,
    },
    /// Image of `u ↦ (f1(u), …, fN(u))` over a parameter box.
    Parametric {
        maps: Vec<ScalarFieldExpr>,
        dim: usize,
        ambient_dim: usize,
        domain: Vec<(f64, f64)>,
    },
}

/// An `n`-dimensional manifold embedded in `R^N`, with a fixed orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    kind: ManifoldKind,
    orientation: f64,
}

/// A point of the manifold, with its chart parameters for parametric manifolds.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Point {
    pub x: Vec<f64>,
    pub params: Option<Vec<f64>>,
}

fn check_ambient(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::invalid(format!(
            "ambient dimension {n} outside 2..={MAX_DIM}"
        )));
    }
    Ok(())
}

impl Manifold {
    pub fn sphere(radius: f64, ambient_dim: usize) -> Result<Self> {
        check_ambient(ambient_dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("sphere radius must be positive"));
        }
        Ok(Self::from_kind(ManifoldKind::Sphere {
            radius,
            ambient_dim,
        }))
    }

    pub fn quadric(matrix: LinearMapN, level: f64) -> Result<Self> {
        check_ambient(matrix.dim())?;
        if !matrix.is_symmetric() || !matrix.is_positive_definite() {
            return Err(Error::invalid(
                "quadric matrix must be symmetric positive-definite",
            ));
        }
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::invalid("quadric level must be positive"));
        }
        Ok(Self::from_kind(ManifoldKind::Quadric { matrix, level }))
    }

    /// Level set `expr = level` in `R^ambient_dim`, variables `x1..xN`.
    pub fn implicit(expr: &str, ambient_dim: usize, level: f64) -> Result<Self> {
        check_ambient(ambient_dim)?;
        let expr = ScalarFieldExpr::parse(expr, ambient_dim)?;
        Ok(Self::from_kind(ManifoldKind::Implicit {
            expr,
            ambient_dim,
            level,
        }))
    }

    /// The hyperplane `x_N = 0`.
    pub fn plane(ambient_dim: usize) -> Result<Self> {
        Self::implicit(&format!("x{ambient_dim}"), ambient_dim, 0.0)
    }

    /// Chart `u ↦ (maps[0](u), …)` with parameters `u1..un` ranging over `domain`.
    pub fn parametric<S: AsRef<str>>(maps: &[S], domain: &[(f64, f64)]) -> Result<Self> {
        let ambient_dim = maps.len();
        let dim = domain.len();
        check_ambient(ambient_dim)?;
        if dim == 0 || dim >= ambient_dim {
            return Err(Error::invalid(format!(
                "chart dimension {dim} must lie in 1..{ambient_dim}"
            )));
        }
        if domain.iter().any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::invalid("parameter domain needs finite lo < hi"));
        }
        let maps = maps
            .iter()
            .map(|m| ScalarFieldExpr::parse(m.as_ref(), dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_kind(ManifoldKind::Parametric {
            maps,
            dim,
            ambient_dim,
            domain: domain.to_vec(),
        }))
    }

    fn from_kind(kind: ManifoldKind) -> Self {
        Self {
            kind,
            orientation: 1.0,
        }
    }

    /// Parses the JSON manifold description used by the command line.
    pub fn from_json(text: &str) -> Result<Self> {
        spec::from_json(text)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        spec::from_value(value)
    }

    /// Flips to the other unit pseudoscalar when `sign` is negative.
    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.kind
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.kind {
            ManifoldKind::Sphere { ambient_dim, .. }
            | ManifoldKind::Implicit { ambient_dim, .. }
            | ManifoldKind::Parametric { ambient_dim, .. } => *ambient_dim,
            ManifoldKind::Quadric { matrix, .. } => matrix.dim(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ManifoldKind::Parametric { dim, .. } => *dim,
            _ => self.ambient_dim() - 1,
        }
    }

    pub fn is_hypersurface(&self) -> bool {
        !matches!(self.kind, ManifoldKind::Parametric { .. })
    }

    /// Defining function `φ` and its target value, for hypersurfaces.
    pub fn level_value(&self, x: &[f64]) -> Result<(f64, f64)> {
        check_dim(self.ambient_dim(), x.len())?;
        match &self.kind {
            ManifoldKind::Sphere { radius, .. } => Ok((linalg::dot(x, x), radius * radius)),
            ManifoldKind::Quadric { matrix, level } => {
                Ok((linalg::dot(x, &matrix.apply(x)), *level))
            }
            ManifoldKind::Implicit { expr, level, .. } => Ok((expr.eval(x)?, *level)),
            ManifoldKind::Parametric { .. } => {
                Err(Error::invalid("parametric manifolds have no level function"))
            }
        }
    }

    /// `φ(x)` and `∂φ(x)`.
    pub(crate) fn level_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        match &self.kind {
            ManifoldKind::Sphere { .. } => Ok((linalg::dot(x, x), linalg::scale(x, 2.0))),
            ManifoldKind::Quadric { matrix, .. } => {
                let ax = matrix.apply(x);
                Ok((linalg::dot(x, &ax), linalg::scale(&ax, 2.0)))
            }
            ManifoldKind::Implicit { expr, .. } => expr.gradient(x),
            ManifoldKind::Parametric { .. } => {
                Err(Error::invalid("parametric manifolds have no level function"))
            }
        }
    }

    /// `∂φ(x)` and the Hessian of `φ`.
    pub(crate) fn level_hessian(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = x.len();
        match &self.kind {
            ManifoldKind::Sphere { .. } => {
                let h = (0..n)
                    .map(|i| linalg::scale(&linalg::basis(n, i), 2.0))
                    .collect();
                Ok((linalg::scale(x, 2.0), h))
            }
            ManifoldKind::Quadric { matrix, .. } => {
                let h = matrix
                    .rows()
                    .into_iter()
                    .map(|r| linalg::scale(&r, 2.0))
                    .collect();
                Ok((linalg::scale(&matrix.apply(x), 2.0), h))
            }
            ManifoldKind::Implicit { expr, .. } => {
                let (_, g, h) = expr.hessian(x)?;
                Ok((g, h))
            }
            ManifoldKind::Parametric { .. } => {
                Err(Error::invalid("parametric manifolds have no level function"))
            }
        }
    }

    /// Oriented unit normal `± ∂φ/|∂φ|` of a hypersurface, also off the surface.
    pub fn unit_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.ambient_dim(), x.len())?;
        let (_, g) = self.level_gradient(x)?;
        let gn = linalg::norm(&g);
        if !(gn >= DEGENERACY_TOL) {
            return Err(Error::DegeneratePoint { gradient_norm: gn });
        }
        Ok(linalg::scale(&g, self.orientation / gn))
    }

    fn chart(&self) -> Option<(&[ScalarFieldExpr], &[(f64, f64)])> {
        match &self.kind {
            ManifoldKind::Parametric { maps, domain, .. } => Some((maps, domain)),
            _ => None,
        }
    }

    /// Chart image of the parameters `u`.
    pub fn chart_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        let (maps, _) = self
            .chart()
            .ok_or_else(|| Error::invalid("manifold has no chart"))?;
        maps.iter().map(|m| m.eval(u)).collect()
    }

    /// Coordinate tangent vectors `∂f/∂u_j`, one per parameter.
    pub fn chart_tangents(&self, u: &[f64]) -> Result<Vec<Vec<f64>>> {
        let (maps, _) = self
            .chart()
            .ok_or_else(|| Error::invalid("manifold has no chart"))?;
        let grads = maps
            .iter()
            .map(|m| m.gradient(u).map(|(_, g)| g))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..u.len())
            .map(|j| grads.iter().map(|g| g[j]).collect())
            .collect())
    }

    /// Least-squares chart parameters of `x`, refined from `start` when given
    /// and otherwise from the best point of a grid over the parameter box.
    pub fn pull_back(&self, x: &[f64], start: Option<&[f64]>) -> Result<Vec<f64>> {
        check_dim(self.ambient_dim(), x.len())?;
        let (_, domain) = self
            .chart()
            .ok_or_else(|| Error::invalid("manifold has no chart"))?;
        if let Some(u0) = start {
            if let Ok(u) = self.gauss_newton(x, u0) {
                return Ok(u);
            }
        }
        let u0 = self.grid_search(x, domain)?;
        self.gauss_newton(x, &u0)
    }

    fn grid_search(&self, x: &[f64], domain: &[(f64, f64)]) -> Result<Vec<f64>> {
        let n = domain.len();
        let per_dim = (512f64.powf(1.0 / n as f64).round() as usize).clamp(3, 64);
        let total = per_dim.pow(n as u32);
        let mut best = (f64::INFINITY, vec![0.0; n]);
        let mut u = vec![0.0; n];
        for k in 0..total {
            let mut idx = k;
            for (j, &(lo, hi)) in domain.iter().enumerate() {
                let t = (idx % per_dim) as f64 / (per_dim - 1) as f64;
                u[j] = lo + t * (hi - lo);
                idx /= per_dim;
            }
            let d = linalg::distance(&self.chart_point(&u)?, x);
            if d < best.0 {
                best = (d, u.clone());
            }
        }
        Ok(best.1)
    }

    fn gauss_newton(&self, x: &[f64], start: &[f64]) -> Result<Vec<f64>> {
        let mut u = start.to_vec();
        let mut r = linalg::sub(x, &self.chart_point(&u)?);
        let mut rn = linalg::norm(&r);
        for _ in 0..NEWTON_MAX_ITER {
            let tangents = self.chart_tangents(&u)?;
            let (du, _) = linalg::least_squares(&tangents, &r).ok_or(Error::DegenerateChart {
                wedge_norm: 0.0,
            })?;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = linalg::axpy(&u, step, &du);
                let tr = linalg::sub(x, &self.chart_point(&trial)?);
                let tn = linalg::norm(&tr);
                if tn <= rn * (1.0 + 1e-12) {
                    u = trial;
                    r = tr;
                    rn = tn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            let small = linalg::norm(&du) <= 1e-12 * (1.0 + linalg::norm(&u));
            if !accepted || small {
                return Ok(u);
            }
        }
        Err(Error::ProjectionFailure {
            residual: rn,
            iterations: NEWTON_MAX_ITER,
        })
    }

    /// Attaches chart parameters when needed; `x` is assumed on the manifold.
    pub(crate) fn locate(&self, x: &[f64]) -> Result<Point> {
        self.locate_near(x, None)
    }

    pub(crate) fn locate_near(&self, x: &[f64], hint: Option<&Point>) -> Result<Point> {
        check_dim(self.ambient_dim(), x.len())?;
        if self.is_hypersurface() {
            return Ok(Point {
                x: x.to_vec(),
                params: None,
            });
        }
        let start = hint.and_then(|p| p.params.as_deref());
        let u = self.pull_back(x, start)?;
        Ok(Point {
            x: self.chart_point(&u)?,
            params: Some(u),
        })
    }

    pub(crate) fn point_from_params(&self, u: Vec<f64>) -> Result<Point> {
        Ok(Point {
            x: self.chart_point(&u)?,
            params: Some(u),
        })
    }

    /// Closest-point style projection of `x` onto the manifold.
    ///
    /// Hypersurfaces use Newton steps along the gradient until
    /// `|φ − c| ≤ 1e-12 (1 + |c|)`; charts use the least-squares pull-back.
    pub fn project_to_manifold(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.project_point(x, None)?.x)
    }

    pub(crate) fn project_point(&self, x: &[f64], hint: Option<&Point>) -> Result<Point> {
        check_dim(self.ambient_dim(), x.len())?;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        match &self.kind {
            ManifoldKind::Parametric { .. } => self.locate_near(x, hint),
            ManifoldKind::Sphere { radius, .. } => {
                let r = linalg::norm(x);
                if r < DEGENERACY_TOL {
                    return Err(Error::DegeneratePoint { gradient_norm: 2.0 * r });
                }
                Ok(Point {
                    x: linalg::scale(x, radius / r),
                    params: None,
                })
            }
            _ => {
                let mut y = x.to_vec();
                let (_, level) = self.level_value(x)?;
                let tol = 1e-12 * (1.0 + level.abs());
                let mut residual = f64::INFINITY;
                for _ in 0..=NEWTON_MAX_ITER {
                    let (phi, g) = self.level_gradient(&y)?;
                    residual = phi - level;
                    if residual.abs() <= tol {
                        return Ok(Point { x: y, params: None });
                    }
                    let g2 = linalg::dot(&g, &g);
                    if !(g2.sqrt() >= DEGENERACY_TOL) {
                        return Err(Error::DegeneratePoint {
                            gradient_norm: g2.sqrt(),
                        });
                    }
                    y = linalg::axpy(&y, -residual / g2, &g);
                }
                Err(Error::ProjectionFailure {
                    residual: residual.abs(),
                    iterations: NEWTON_MAX_ITER,
                })
            }
        }
    }

    /// Distance-like measure of how far `x` is from the manifold.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        if self.is_hypersurface() {
            let (phi, level) = self.level_value(x)?;
            Ok((phi - level).abs())
        } else {
            let y = self.project_to_manifold(x)?;
            Ok(linalg::distance(x, &y))
        }
    }

    /// Unit pseudoscalar `I_M(x)`.
    ///
    /// ```
    /// use shapeflow::manifold::Manifold;
    /// use shapeflow::ga::Multivector;
    /// let sphere = Manifold::sphere(1.0, 3).unwrap();
    /// let i = sphere.pseudoscalar_at(&[1.0, 0.0, 0.0]).unwrap();
    /// assert!(i.distance(&Multivector::blade(3, 0b110, 1.0)) < 1e-15);
    /// ```
    pub fn pseudoscalar_at(&self, x: &[f64]) -> Result<Multivector> {
        let p = self.locate(x)?;
        self.pseudoscalar(&p)
    }

    pub(crate) fn pseudoscalar(&self, p: &Point) -> Result<Multivector> {
        match &p.params {
            None => self.hypersurface_pseudoscalar(&p.x),
            Some(u) => self.chart_pseudoscalar(u),
        }
    }

    /// `I n(x)`, defined wherever the gradient is nonzero.
    pub(crate) fn hypersurface_pseudoscalar(&self, x: &[f64]) -> Result<Multivector> {
        let n = self.unit_normal(x)?;
        Multivector::pseudoscalar(x.len()).geometric_product(&Multivector::vector(&n))
    }

    pub(crate) fn chart_pseudoscalar(&self, u: &[f64]) -> Result<Multivector> {
        let tangents = self.chart_tangents(u)?;
        let mut wedge = Multivector::scalar(self.ambient_dim(), 1.0);
        for t in &tangents {
            wedge = wedge.outer(&Multivector::vector(t))?;
        }
        let mag = wedge.magnitude();
        if !(mag >= DEGENERACY_TOL) {
            return Err(Error::DegenerateChart { wedge_norm: mag });
        }
        Ok(wedge.scale(self.orientation / mag))
    }

    /// Moves from `p` by `h` along the tangent direction `a`, staying on the manifold.
    ///
    /// Hypersurfaces project `x + h a`; charts move to `f(u + h du)` with
    /// `J du = a`. Either way the offset is `h a` plus a second-order term that
    /// cancels in central differences.
    pub(crate) fn step_along(&self, p: &Point, a: &[f64], h: f64) -> Result<Point> {
        match &p.params {
            None => self.project_point(&linalg::axpy(&p.x, h, a), Some(p)),
            Some(u) => {
                let du = self.parameter_velocity(u, a)?;
                self.point_from_params(linalg::axpy(u, h, &du))
            }
        }
    }

    /// Parameter velocity `du` with `J du` the tangential part of `a`.
    pub(crate) fn parameter_velocity(&self, u: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        let tangents = self.chart_tangents(u)?;
        linalg::least_squares(&tangents, a)
            .map(|(c, _)| c)
            .ok_or(Error::DegenerateChart { wedge_norm: 0.0 })
    }

    /// Orthonormal tangent basis and projections at `p`.
    pub(crate) fn tangent_space(&self, p: &Point) -> Result<TangentSpace> {
        match &p.params {
            None => {
                let normal = self.unit_normal(&p.x)?;
                Ok(TangentSpace {
                    basis: frame::complete_basis(&[normal.clone()], p.x.len(), None)?.0,
                    normal: Some(normal),
                })
            }
            Some(u) => {
                let tangents = self.chart_tangents(u)?;
                let basis = frame::orthonormalize(&tangents)?;
                Ok(TangentSpace {
                    basis,
                    normal: None,
                })
            }
        }
    }

    /// Tangential part `P(v)` of a vector at `x`.
    pub fn project_vector(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.ambient_dim(), v.len())?;
        let p = self.locate(x)?;
        Ok(self.tangent_space(&p)?.project(v))
    }
}

/// Orthonormal tangent basis at a point, plus the unit normal of a hypersurface.
#[derive(Debug, Clone)]
pub(crate) struct TangentSpace {
    pub basis: Vec<Vec<f64>>,
    pub normal: Option<Vec<f64>>,
}

impl TangentSpace {
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match &self.normal {
            Some(n) => linalg::axpy(v, -linalg::dot(v, n), n),
            None => {
                let mut out = vec![0.0; v.len()];
                for e in &self.basis {
                    out = linalg::axpy(&out, linalg::dot(v, e), e);
                }
                out
            }
        }
    }

    pub fn reject(&self, v: &[f64]) -> Vec<f64> {
        linalg::sub(v, &self.project(v))
    }
}
