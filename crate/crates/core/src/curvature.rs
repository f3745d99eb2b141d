//! Curvature of an embedded manifold: the total curvature `Ω(a∧b) = S(a)×S(b)`,
//! its split into intrinsic and extrinsic parts, and the frame formulation in
//! terms of connection coefficients and connection bivectors.

use crate::error::{check_dim, Result};
use crate::ga::{Multivector, Subspace};
use crate::linalg;
use crate::manifold::{
    fd_step, lie_bracket, nested_fd_step, FrameChoice, FrameData, FrameField, Manifold, Point,
    VectorField,
};
use crate::transport::covariant_derivative_at;

/// `Ω(a∧b)` at a point, with `R = P(Ω)` and `F = P⊥(Ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureValue {
    pub base_point: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub total: Multivector,
    pub intrinsic: Multivector,
    pub extrinsic: Multivector,
}

impl CurvatureValue {
    /// Part of `Ω` that is neither tangent nor transverse.
    pub fn mixed(&self) -> Multivector {
        &(&self.total - &self.intrinsic) - &self.extrinsic
    }
}

fn split(m: &Manifold, p: &Point, total: &Multivector) -> Result<(Multivector, Multivector)> {
    let space = Subspace::from_blade(&m.pseudoscalar(p)?)?;
    Ok((space.project(total)?, space.reject(total)?))
}

/// `Ω(a∧b) = S(a)×S(b)` at `x`, split by the tangent blade `I_M(x)`.
///
/// ```
/// use shapeflow::curvature::total_curvature;
/// use shapeflow::ga::Multivector;
/// use shapeflow::manifold::Manifold;
/// let sphere = Manifold::sphere(1.0, 3).unwrap();
/// let c = total_curvature(&sphere, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
/// assert!(c.total.distance(&Multivector::blade(3, 0b110, -1.0)) < 1e-12);
/// assert!(c.extrinsic.is_zero(1e-12));
/// ```
pub fn total_curvature(m: &Manifold, x: &[f64], a: &[f64], b: &[f64]) -> Result<CurvatureValue> {
    check_dim(m.ambient_dim(), a.len())?;
    check_dim(m.ambient_dim(), b.len())?;
    let p = m.locate(x)?;
    let total = m
        .shape_bivector(&p, a)?
        .commutator(&m.shape_bivector(&p, b)?)?;
    let (intrinsic, extrinsic) = split(m, &p, &total)?;
    Ok(CurvatureValue {
        base_point: p.x,
        a: a.to_vec(),
        b: b.to_vec(),
        total,
        intrinsic,
        extrinsic,
    })
}

/// `Ω(B)` for a tangent bivector `B`, extended linearly from simple bivectors
/// over an orthonormal tangent basis: `Ω(B) = Σ_{j<k} B^{jk} S(e_j)×S(e_k)`.
pub fn curvature_of_bivector(m: &Manifold, x: &[f64], bivector: &Multivector) -> Result<Multivector> {
    check_dim(m.ambient_dim(), bivector.dim())?;
    let p = m.locate(x)?;
    let basis = m.tangent_space(&p)?.basis;
    let shapes = basis
        .iter()
        .map(|e| m.shape_bivector(&p, e))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Multivector::zero(m.ambient_dim());
    for j in 0..basis.len() {
        for k in j + 1..basis.len() {
            let ejk = Multivector::vector(&basis[j]).outer(&Multivector::vector(&basis[k]))?;
            let coefficient = bivector.scalar_product(&ejk.reverse())?;
            if coefficient != 0.0 {
                out += &shapes[j].commutator(&shapes[k])?.scale(coefficient);
            }
        }
    }
    Ok(out)
}

fn tangent_value(m: &Manifold, q: &Point, field: &VectorField<'_>) -> Result<Vec<f64>> {
    let v = field(&q.x)?;
    check_dim(m.ambient_dim(), v.len())?;
    Ok(m.tangent_space(q)?.project(&v))
}

/// `a·D M = a·∂M − M×S(a)` for a field `M` evaluated on manifold points, with
/// the outer finite-difference step.
fn outer_covariant(
    m: &Manifold,
    p: &Point,
    a: &[f64],
    eval: &dyn Fn(&Point) -> Result<Multivector>,
) -> Result<Multivector> {
    covariant_derivative_at(m, p, a, nested_fd_step(&p.x), eval)
}

/// `(a·D b·D − b·D a·D)A − [a,b]·DA` by nested central differences; equals
/// `A×Ω(a∧b)` up to discretization error.
pub fn curvature_from_commutator(
    m: &Manifold,
    x: &[f64],
    fa: &VectorField<'_>,
    fb: &VectorField<'_>,
    test: &crate::manifold::MultivectorField,
) -> Result<Multivector> {
    let p = m.locate(x)?;
    let eval = |q: &Point| test.eval(&q.x);
    let inner = |q: &Point, field: &VectorField<'_>| -> Result<Multivector> {
        let dir = tangent_value(m, q, field)?;
        covariant_derivative_at(m, q, &dir, fd_step(&q.x), &eval)
    };
    let a = tangent_value(m, &p, fa)?;
    let b = tangent_value(m, &p, fb)?;
    let ab = outer_covariant(m, &p, &a, &|q| inner(q, fb))?;
    let ba = outer_covariant(m, &p, &b, &|q| inner(q, fa))?;
    let bracket = lie_bracket(m, fa, fb, &p.x)?;
    let along_bracket = covariant_derivative_at(m, &p, &bracket, fd_step(&p.x), &eval)?;
    Ok(&(&ab - &ba) - &along_bracket)
}

/// Frame, connection coefficients and connection bivectors in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    pub frame: FrameData,
    /// `Γ(a)_j^k = (a·∂e_j)·e^k`, indexed `[j][k]`.
    pub gamma: Vec<Vec<f64>>,
    /// `Π(a)_b^c = (a·∂e_b)·e^c`, indexed `[b][c]` over the transverse frame.
    pub pi: Vec<Vec<f64>>,
    /// `ω(a) = ½ e^j ∧ P(a·∂e_j)`.
    pub omega_bivector: Multivector,
    /// `A(a) = ½ e^b ∧ P⊥(a·∂e_b)`.
    pub a_bivector: Multivector,
}

fn half_wedge_sum(reciprocal: &[Vec<f64>], derivatives: &[Vec<f64>], dim: usize) -> Result<Multivector> {
    let mut out = Multivector::zero(dim);
    for (r, d) in reciprocal.iter().zip(derivatives) {
        out += &Multivector::vector(r).outer(&Multivector::vector(d))?;
    }
    Ok(out.scale(0.5))
}

fn coefficients(derivatives: &[Vec<f64>], reciprocal: &[Vec<f64>]) -> Vec<Vec<f64>> {
    derivatives
        .iter()
        .map(|d| reciprocal.iter().map(|r| linalg::dot(d, r)).collect())
        .collect()
}

/// Connection data at a manifold point `q` of a frame field, differentiating
/// the frames along the manifold with step `h`.
fn connection_at(
    m: &Manifold,
    field: &FrameField<'_>,
    q: &Point,
    a: &[f64],
    h: f64,
) -> Result<ConnectionData> {
    let frame = field.at(q)?;
    let dim = m.ambient_dim();
    let space = m.tangent_space(q)?;
    let scale = linalg::norm(a);
    let (d_tangent, d_transverse) = if scale == 0.0 {
        (
            vec![vec![0.0; dim]; frame.tangent.len()],
            vec![vec![0.0; dim]; frame.transverse.len()],
        )
    } else {
        let dir = linalg::scale(a, 1.0 / scale);
        let plus = field.at(&m.step_along(q, &dir, h)?)?;
        let minus = field.at(&m.step_along(q, &dir, -h)?)?;
        let diff = |p: &[Vec<f64>], n: &[Vec<f64>]| -> Vec<Vec<f64>> {
            p.iter()
                .zip(n)
                .map(|(u, v)| linalg::scale(&linalg::sub(u, v), scale / (2.0 * h)))
                .collect()
        };
        (
            diff(&plus.tangent, &minus.tangent),
            diff(&plus.transverse, &minus.transverse),
        )
    };
    let gamma = coefficients(&d_tangent, &frame.reciprocal_tangent);
    let pi = coefficients(&d_transverse, &frame.reciprocal_transverse);
    let tangent_parts: Vec<Vec<f64>> = d_tangent.iter().map(|d| space.project(d)).collect();
    let transverse_parts: Vec<Vec<f64>> = d_transverse.iter().map(|d| space.reject(d)).collect();
    let omega_bivector = half_wedge_sum(&frame.reciprocal_tangent, &tangent_parts, dim)?;
    let a_bivector = half_wedge_sum(&frame.reciprocal_transverse, &transverse_parts, dim)?;
    Ok(ConnectionData {
        frame,
        gamma,
        pi,
        omega_bivector,
        a_bivector,
    })
}

/// Connection data at `x` along the tangent vector `a`.
///
/// The connection bivectors are only meaningful for frames with constant
/// inner products, i.e. [`FrameChoice::Orthonormal`].
pub fn connection_data(m: &Manifold, x: &[f64], a: &[f64], choice: FrameChoice) -> Result<ConnectionData> {
    check_dim(m.ambient_dim(), a.len())?;
    let p = m.locate(x)?;
    let field = FrameField::new(m, &p, choice)?;
    let a = m.tangent_space(&p)?.project(a);
    connection_at(m, &field, &p, &a, fd_step(&p.x))
}

/// Pair `(R, F)` of intrinsic and extrinsic curvature bivectors.
pub type CurvaturePair = (Multivector, Multivector);

struct ConnectionSetup<'m> {
    p: Point,
    field: FrameField<'m>,
    a: Vec<f64>,
    b: Vec<f64>,
    at_a: ConnectionData,
    at_b: ConnectionData,
    at_bracket: ConnectionData,
}

fn connection_setup<'m>(
    m: &'m Manifold,
    x: &[f64],
    fa: &VectorField<'_>,
    fb: &VectorField<'_>,
) -> Result<ConnectionSetup<'m>> {
    let p = m.locate(x)?;
    let field = FrameField::new(m, &p, FrameChoice::Orthonormal)?;
    let a = tangent_value(m, &p, fa)?;
    let b = tangent_value(m, &p, fb)?;
    let bracket = lie_bracket(m, fa, fb, &p.x)?;
    let h = fd_step(&p.x);
    Ok(ConnectionSetup {
        at_a: connection_at(m, &field, &p, &a, h)?,
        at_b: connection_at(m, &field, &p, &b, h)?,
        at_bracket: connection_at(m, &field, &p, &bracket, h)?,
        p,
        field,
        a,
        b,
    })
}

/// `R(a∧b) = a·Dω(b) − b·Dω(a) + ω(a)×ω(b) − ω([a,b])` and the analogous
/// `F` from the transverse connection bivector, over an orthonormal frame field.
pub fn curvature_from_connection(
    m: &Manifold,
    x: &[f64],
    fa: &VectorField<'_>,
    fb: &VectorField<'_>,
) -> Result<CurvaturePair> {
    let s = connection_setup(m, x, fa, fb)?;
    let along = |q: &Point, f: &VectorField<'_>| -> Result<ConnectionData> {
        connection_at(m, &s.field, q, &tangent_value(m, q, f)?, fd_step(&q.x))
    };
    let omega_b = |q: &Point| Ok(along(q, fb)?.omega_bivector);
    let omega_a = |q: &Point| Ok(along(q, fa)?.omega_bivector);
    let big_a_b = |q: &Point| Ok(along(q, fb)?.a_bivector);
    let big_a_a = |q: &Point| Ok(along(q, fa)?.a_bivector);
    let r = &(&outer_covariant(m, &s.p, &s.a, &omega_b)? - &outer_covariant(m, &s.p, &s.b, &omega_a)?)
        + &(&s.at_a.omega_bivector.commutator(&s.at_b.omega_bivector)? - &s.at_bracket.omega_bivector);
    let f = &(&outer_covariant(m, &s.p, &s.a, &big_a_b)? - &outer_covariant(m, &s.p, &s.b, &big_a_a)?)
        + &(&s.at_a.a_bivector.commutator(&s.at_b.a_bivector)? - &s.at_bracket.a_bivector);
    Ok((r, f))
}

/// Bivector basis `e_J = e_{j1}∧e_{j2}` (`j1 < j2`) and reciprocals
/// `e^J = e^{j2}∧e^{j1}`.
fn bivector_basis(frame: &[Vec<f64>], reciprocal: &[Vec<f64>]) -> Result<Vec<(Multivector, Multivector)>> {
    let mut out = Vec::new();
    for j1 in 0..frame.len() {
        for j2 in j1 + 1..frame.len() {
            let e = Multivector::vector(&frame[j1]).outer(&Multivector::vector(&frame[j2]))?;
            let r = Multivector::vector(&reciprocal[j2]).outer(&Multivector::vector(&reciprocal[j1]))?;
            out.push((e, r));
        }
    }
    Ok(out)
}

fn components(value: &Multivector, basis: &[(Multivector, Multivector)]) -> Result<Vec<f64>> {
    basis.iter().map(|(_, r)| value.scalar_product(r)).collect()
}

/// Component form: `R(a∧b) = (a·∂ω(b)^J − b·∂ω(a)^J) e_J + ω(b)×ω(a) − ω([a,b])`
/// with `ω(a)^J = ω(a)·e^J`, and likewise for `F`.
pub fn curvature_from_connection_components(
    m: &Manifold,
    x: &[f64],
    fa: &VectorField<'_>,
    fb: &VectorField<'_>,
) -> Result<CurvaturePair> {
    let s = connection_setup(m, x, fa, fb)?;
    let h = nested_fd_step(&s.p.x);
    let tangent_basis = bivector_basis(&s.at_a.frame.tangent, &s.at_a.frame.reciprocal_tangent)?;
    let transverse_basis =
        bivector_basis(&s.at_a.frame.transverse, &s.at_a.frame.reciprocal_transverse)?;
    // (tangent components, transverse components) of (ω(f), A(f)) at q
    let comps = |q: &Point, f: &VectorField<'_>| -> Result<(Vec<f64>, Vec<f64>)> {
        let data = connection_at(m, &s.field, q, &tangent_value(m, q, f)?, fd_step(&q.x))?;
        let tb = bivector_basis(&data.frame.tangent, &data.frame.reciprocal_tangent)?;
        let nb = bivector_basis(&data.frame.transverse, &data.frame.reciprocal_transverse)?;
        Ok((
            components(&data.omega_bivector, &tb)?,
            components(&data.a_bivector, &nb)?,
        ))
    };
    let derivative = |dir: &[f64], f: &VectorField<'_>| -> Result<(Vec<f64>, Vec<f64>)> {
        let scale = linalg::norm(dir);
        if scale == 0.0 {
            return Ok((vec![0.0; tangent_basis.len()], vec![0.0; transverse_basis.len()]));
        }
        let unit = linalg::scale(dir, 1.0 / scale);
        let plus = comps(&m.step_along(&s.p, &unit, h)?, f)?;
        let minus = comps(&m.step_along(&s.p, &unit, -h)?, f)?;
        let c = scale / (2.0 * h);
        Ok((
            linalg::scale(&linalg::sub(&plus.0, &minus.0), c),
            linalg::scale(&linalg::sub(&plus.1, &minus.1), c),
        ))
    };
    let (db_t, db_n) = derivative(&s.a, fb)?;
    let (da_t, da_n) = derivative(&s.b, fa)?;
    let dim = m.ambient_dim();
    let assemble = |d1: &[f64], d2: &[f64], basis: &[(Multivector, Multivector)]| {
        basis
            .iter()
            .zip(d1.iter().zip(d2))
            .fold(Multivector::zero(dim), |acc, ((e, _), (x, y))| acc + e.scale(x - y))
    };
    let r = assemble(&db_t, &da_t, &tangent_basis)
        + (&s.at_b.omega_bivector.commutator(&s.at_a.omega_bivector)? - &s.at_bracket.omega_bivector);
    let f = assemble(&db_n, &da_n, &transverse_basis)
        + (&s.at_b.a_bivector.commutator(&s.at_a.a_bivector)? - &s.at_bracket.a_bivector);
    Ok((r, f))
}
