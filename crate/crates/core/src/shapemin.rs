//! Shape-minimizing curves: the functional `Σ[γ] = ∫|S(dΓ)|`, its
//! Euler–Lagrange residual, an initial-value integrator for
//! `u·∂(S(u)/|S(u)|) = 0`, closed-form sphere and ellipsoid solutions, and an
//! empirical stationarity check by random perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::ga::{LinearMapN, Multivector, Rotor};
use crate::linalg;
use crate::manifold::{fd_step, nested_fd_step, Manifold, Point};
use crate::transport::{integrate_curve, start_state, CurveTrace, TraceSample};

/// Default lower bound on `|S(u)|`.
pub const MIN_SHAPE_MAGNITUDE: f64 = 1e-8;
/// Integration aborts when the least-squares residual exceeds this fraction of `|S(u)|`.
pub const SPAN_RESIDUAL_LIMIT: f64 = 1e-3;

/// `Σ[γ]` by the composite trapezoidal rule over the trace's arc length,
/// using the stored unit tangents.
///
/// ```
/// use shapeflow::manifold::Manifold;
/// use shapeflow::shapemin::sigma_functional;
/// use shapeflow::transport::great_circle_arc;
/// let sphere = Manifold::sphere(1.0, 3).unwrap();
/// let arc = great_circle_arc(1.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.5, 1e-2).unwrap();
/// assert!((sigma_functional(&sphere, &arc).unwrap() - 1.5).abs() < 1e-9);
/// ```
pub fn sigma_functional(m: &Manifold, trace: &CurveTrace) -> Result<f64> {
    check_dim(m.ambient_dim(), trace.dim())?;
    let samples = trace.samples();
    let mut hint: Option<Point> = None;
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        let p = m.locate_near(&s.x, hint.as_ref())?;
        values.push(m.shape_bivector(&p, &s.u)?.magnitude());
        hint = Some(p);
    }
    Ok(samples
        .windows(2)
        .zip(values.windows(2))
        .map(|(s, v)| 0.5 * (s[1].tau - s[0].tau) * (v[0] + v[1]))
        .sum())
}

fn unit_shape(m: &Manifold, p: &Point, u: &[f64], tau: f64, threshold: f64) -> Result<Multivector> {
    let s = m.shape_bivector(p, u)?;
    let magnitude = s.magnitude();
    if !(magnitude > threshold) {
        return Err(Error::DegenerateShape {
            magnitude,
            tau: Some(tau),
        });
    }
    Ok(s.scale(1.0 / magnitude))
}

/// Components `S̃(a_j)·[u·∂(S(u)/|S(u)|)]` at interior sample `i`, over an
/// orthonormal tangent basis `{a_j}`, with `u·∂` by central differences
/// along the trace.
pub fn euler_lagrange_residual(m: &Manifold, trace: &CurveTrace, i: usize) -> Result<Vec<f64>> {
    check_dim(m.ambient_dim(), trace.dim())?;
    let samples = trace.samples();
    if i == 0 || i + 1 >= samples.len() {
        return Err(Error::invalid(format!(
            "sample {i} is not interior to a trace of {} samples",
            samples.len()
        )));
    }
    let (prev, here, next) = (&samples[i - 1], &samples[i], &samples[i + 1]);
    let p = m.locate(&here.x)?;
    let dtau = next.tau - prev.tau;
    if !(dtau > 0.0) {
        return Err(Error::invalid("trace samples around the index coincide"));
    }
    let shat = |s: &TraceSample| -> Result<Multivector> {
        let q = m.locate_near(&s.x, Some(&p))?;
        unit_shape(m, &q, &s.u, s.tau, MIN_SHAPE_MAGNITUDE)
    };
    unit_shape(m, &p, &here.u, here.tau, MIN_SHAPE_MAGNITUDE)?;
    let derivative = (shat(next)? - shat(prev)?).scale(1.0 / dtau);
    m.tangent_space(&p)?
        .basis
        .iter()
        .map(|a| m.shape_bivector(&p, a)?.reverse().scalar_product(&derivative))
        .collect()
}

/// Initial-value problem for a shape-minimizing curve.
#[derive(Debug, Clone)]
pub struct ShapeMinProblem {
    pub manifold: Manifold,
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
    pub length: f64,
    pub step: f64,
    pub min_shape_magnitude: f64,
}

impl ShapeMinProblem {
    pub fn new(manifold: Manifold, x0: &[f64], u0: &[f64], length: f64, step: f64) -> Self {
        Self {
            manifold,
            x0: x0.to_vec(),
            u0: u0.to_vec(),
            length,
            step,
            min_shape_magnitude: MIN_SHAPE_MAGNITUDE,
        }
    }
}

/// A computed shape-minimizing curve with the largest least-squares residual
/// met during integration.
#[derive(Debug, Clone)]
pub struct ShapeMinSolution {
    pub trace: CurveTrace,
    pub max_span_residual: f64,
}

/// Orthonormal basis of the tangent directions orthogonal to `u`.
fn transverse_to(basis: &[Vec<f64>], u: &[f64]) -> Vec<Vec<f64>> {
    let mut span = vec![match linalg::unit(u) {
        Some(v) => v,
        None => return basis.to_vec(),
    }];
    let mut out = Vec::new();
    for e in basis {
        let r = linalg::orthogonalize(e, &span);
        if let Some(r) = linalg::unit(&r).filter(|_| linalg::norm(&r) > 1e-8) {
            span.push(r.clone());
            out.push(r);
        }
    }
    out
}

/// `X − Ŝ⟨S̃̂ X⟩₀`: removes the component of `X` along the unit bivector `Ŝ`.
fn drop_along(x: &Multivector, shat: &Multivector) -> Result<Vec<f64>> {
    let along = shat.reverse().scalar_product(x)?;
    Ok((x - &shat.scale(along)).coeffs().to_vec())
}

/// Integrates the strong form `d/dτ (S(u)/|S(u)|) = 0` in arc length.
///
/// With `u' = u·S(u) + w`, `w` tangent and orthogonal to `u`, the total
/// derivative of `S(u)` along the curve is `(u·∂ₓS)(u) + S(w)`; `w` is chosen
/// by least squares so that this derivative has no component orthogonal to
/// `S(u)`.
pub fn shape_min_solve(problem: &ShapeMinProblem) -> Result<ShapeMinSolution> {
    let m = &problem.manifold;
    let (p, u) = start_state(m, &problem.x0, &problem.u0)?;
    let threshold = problem.min_shape_magnitude;
    unit_shape(m, &p, &u, 0.0, threshold)?;
    let mut max_residual = 0.0f64;
    let mut accel = |q: &Point, v: &[f64], tau: f64| -> Result<Vec<f64>> {
        let space = m.tangent_space(q)?;
        let v_t = space.project(v);
        let s = m.shape_bivector(q, &v_t)?;
        let magnitude = s.magnitude();
        if !(magnitude > threshold) {
            return Err(Error::DegenerateShape {
                magnitude,
                tau: Some(tau),
            });
        }
        let shat = s.scale(1.0 / magnitude);
        let h = if q.params.is_some() {
            nested_fd_step(&q.x)
        } else {
            fd_step(&q.x)
        };
        let plus = m.offset_point(q, &v_t, h)?;
        let minus = m.offset_point(q, &v_t, -h)?;
        let d = (m.shape_bivector(&plus, &v_t)? - m.shape_bivector(&minus, &v_t)?)
            .scale(1.0 / (2.0 * h));
        let directions = transverse_to(&space.basis, &v_t);
        let columns = directions
            .iter()
            .map(|t| drop_along(&m.shape_bivector(q, t)?, &shat))
            .collect::<Result<Vec<_>>>()?;
        let target = linalg::scale(&drop_along(&d, &shat)?, -1.0);
        let (coef, residual) = linalg::least_squares(&columns, &target).ok_or(
            Error::SpanCondition {
                tau,
                residual: f64::INFINITY,
            },
        )?;
        if residual > SPAN_RESIDUAL_LIMIT * magnitude {
            return Err(Error::SpanCondition { tau, residual });
        }
        max_residual = max_residual.max(residual / magnitude);
        let mut acc = Multivector::vector(&v_t).inner(&s)?.to_vector();
        for (c, t) in coef.iter().zip(&directions) {
            acc = linalg::axpy(&acc, *c, t);
        }
        Ok(acc)
    };
    let trace = integrate_curve(m, p, u, problem.length, problem.step, &mut accel)?;
    Ok(ShapeMinSolution {
        trace,
        max_span_residual: max_residual,
    })
}

/// The curve of [`shape_min_solve`] without diagnostics.
pub fn shape_min_trace(problem: &ShapeMinProblem) -> Result<CurveTrace> {
    Ok(shape_min_solve(problem)?.trace)
}

const CLOSED_FORM_TOL: f64 = 1e-10;

/// Great circle `x(τ) = e^{−τS₀/2} x₀ e^{τS₀/2}`, `S₀ = x₀u₀/r²`; returns
/// `(x(τ), u(τ) = x(τ)·S₀)`.
///
/// ```
/// use shapeflow::shapemin::sphere_geodesic_closed_form;
/// let (x, u) = sphere_geodesic_closed_form(1.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0],
///     std::f64::consts::FRAC_PI_2).unwrap();
/// assert!((x[1] - 1.0).abs() < 1e-15 && (u[0] + 1.0).abs() < 1e-15);
/// ```
pub fn sphere_geodesic_closed_form(
    r: f64,
    x0: &[f64],
    u0: &[f64],
    tau: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(x0.len(), u0.len())?;
    if !(r > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    if (linalg::norm(x0) - r).abs() > CLOSED_FORM_TOL * r {
        return Err(Error::invalid("start point is not on the sphere"));
    }
    if linalg::dot(x0, u0).abs() > CLOSED_FORM_TOL * r
        || (linalg::norm(u0) - 1.0).abs() > CLOSED_FORM_TOL
    {
        return Err(Error::invalid("start direction must be a unit tangent"));
    }
    let s0 = Multivector::vector(x0)
        .outer(&Multivector::vector(u0))?
        .scale(1.0 / (r * r));
    let x = Rotor::exp(&s0.scale(-0.5 * tau))?.apply_vector(x0)?;
    let u = Multivector::vector(&x).inner(&s0)?.to_vector();
    Ok((x, u))
}

/// The closed-form ellipsoid curve with its parameter derivative.
#[derive(Debug, Clone)]
pub struct EllipsoidCurve {
    inv_sqrt: LinearMapN,
    y0: Vec<f64>,
    generator: Multivector,
}

impl EllipsoidCurve {
    /// Checks `x₀·A(x₀) = 1`, `u₀·A(x₀) = 0`, `|u₀| = 1` and builds
    /// `A^{1/2}(B₀)` with `B₀ = (x₀∧u₀)/|A(x₀∧u₀)|`.
    pub fn new(a: &LinearMapN, x0: &[f64], u0: &[f64]) -> Result<Self> {
        check_dim(a.dim(), x0.len())?;
        check_dim(a.dim(), u0.len())?;
        let ax = a.apply(x0);
        if (linalg::dot(x0, &ax) - 1.0).abs() > CLOSED_FORM_TOL {
            return Err(Error::invalid("start point does not satisfy x·A(x) = 1"));
        }
        if linalg::dot(u0, &ax).abs() > CLOSED_FORM_TOL * linalg::norm(&ax)
            || (linalg::norm(u0) - 1.0).abs() > CLOSED_FORM_TOL
        {
            return Err(Error::invalid("start direction must be a unit tangent"));
        }
        let sqrt = a.sqrt()?;
        let wedge = Multivector::vector(x0).outer(&Multivector::vector(u0))?;
        let b0 = wedge.scale(1.0 / a.outermorphism(&wedge)?.magnitude());
        Ok(Self {
            inv_sqrt: a.inv_sqrt()?,
            y0: sqrt.apply(x0),
            generator: sqrt.outermorphism(&b0)?,
        })
    }

    fn rotated(&self, tau: f64) -> Result<Vec<f64>> {
        Rotor::exp(&self.generator.scale(-0.5 * tau))?.apply_vector(&self.y0)
    }

    /// `x(τ) = A^{−1/2}(R(τ) A^{1/2}(x₀) R̃(τ))`, `R(τ) = e^{−τA^{1/2}(B₀)/2}`.
    pub fn position(&self, tau: f64) -> Result<Vec<f64>> {
        Ok(self.inv_sqrt.apply(&self.rotated(tau)?))
    }

    /// `dx/dτ = A^{−1/2}(y·A^{1/2}(B₀))` with `y = A^{1/2}(x)`.
    pub fn velocity(&self, tau: f64) -> Result<Vec<f64>> {
        let y = Multivector::vector(&self.rotated(tau)?);
        Ok(self.inv_sqrt.apply(&y.inner(&self.generator)?.to_vector()))
    }

    /// Resamples `τ ∈ [0, tau_max]` at uniform arc length (step at most
    /// `step`), with unit tangents.
    pub fn arc_length_trace(&self, tau_max: f64, step: f64) -> Result<CurveTrace> {
        let speed = |t: f64| -> Result<f64> { Ok(linalg::norm(&self.velocity(t)?)) };
        arc_length_resample(&speed, tau_max, step, |t| {
            let v = self.velocity(t)?;
            let u = linalg::unit(&v).ok_or_else(|| Error::invalid("curve has zero speed"))?;
            Ok((self.position(t)?, u))
        })
    }
}

/// A point of the closed-form ellipsoid curve at parameter `tau`.
///
/// ```
/// use shapeflow::ga::LinearMapN;
/// use shapeflow::shapemin::ellipsoid_closed_form;
/// let a = LinearMapN::diagonal(&[1.0, 0.25, 1.0 / 9.0]);
/// let x = ellipsoid_closed_form(&a, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.3).unwrap();
/// assert!((x[0] - 0.6f64.cos()).abs() < 1e-12 && (x[1] - 2.0 * 0.6f64.sin()).abs() < 1e-12);
/// ```
pub fn ellipsoid_closed_form(a: &LinearMapN, x0: &[f64], u0: &[f64], tau: f64) -> Result<Vec<f64>> {
    EllipsoidCurve::new(a, x0, u0)?.position(tau)
}

/// Simpson's rule for `∫_a^b f`.
fn simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    Ok((b - a) / 6.0 * (f(a)? + 4.0 * f(0.5 * (a + b))? + f(b)?))
}

/// Samples a regular curve given by its speed and a `(position, unit tangent)`
/// map at uniform arc length.
fn arc_length_resample(
    speed: &dyn Fn(f64) -> Result<f64>,
    t_max: f64,
    step: f64,
    mut point: impl FnMut(f64) -> Result<(Vec<f64>, Vec<f64>)>,
) -> Result<CurveTrace> {
    if !(step > 0.0 && t_max >= 0.0) {
        return Err(Error::invalid("step must be positive and the range non-negative"));
    }
    const CELLS: usize = 4096;
    let dt = t_max / CELLS as f64;
    let mut knots = vec![0.0];
    for k in 0..CELLS {
        let t = k as f64 * dt;
        let cell = simpson(speed, t, t + dt)?;
        knots.push(knots[k] + cell);
    }
    let total = knots[CELLS];
    let count = ((total / step).ceil() as usize).max(1);
    let ds = total / count as f64;
    let mut samples = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let s = (i as f64 * ds).min(total);
        let k = match knots.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(k) => k.min(CELLS - 1),
            Err(k) => k.saturating_sub(1).min(CELLS - 1),
        };
        let t0 = k as f64 * dt;
        // Newton on ∫_{t0}^{t} speed = s − knots[k]
        let mut t = t0 + dt * (s - knots[k]) / (knots[k + 1] - knots[k]).max(f64::MIN_POSITIVE);
        for _ in 0..20 {
            let v = speed(t)?;
            let delta = (simpson(speed, t0, t)? - (s - knots[k])) / v;
            t -= delta;
            if delta.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        let (x, u) = point(t)?;
        samples.push(TraceSample::new(s, x, u));
    }
    CurveTrace::new(samples, ds)
}

/// Maximum distance between samples at matching arc length.
pub fn max_pointwise_deviation(a: &CurveTrace, b: &CurveTrace) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "traces have {} and {} samples",
            a.len(),
            b.len()
        )));
    }
    Ok(a.samples()
        .iter()
        .zip(b.samples())
        .map(|(p, q)| linalg::distance(&p.x, &q.x))
        .fold(0.0, f64::max))
}

/// `Σ` of a polyline sampled at a uniform parameter: tangents by second-order
/// differences of the positions, `∫|S(u)| |dx/dt| dt` by the trapezoidal rule.
fn discrete_sigma(m: &Manifold, points: &[Point]) -> Result<f64> {
    let n = points.len();
    if n < 3 {
        return Err(Error::invalid("need at least three samples"));
    }
    let mut total = 0.0;
    for i in 0..n {
        let x = |j: usize| &points[j].x;
        let d = if i == 0 {
            linalg::scale(
                &linalg::add(&linalg::scale(x(0), -3.0), &linalg::sub(&linalg::scale(x(1), 4.0), x(2))),
                0.5,
            )
        } else if i == n - 1 {
            linalg::scale(
                &linalg::add(
                    &linalg::scale(x(n - 1), 3.0),
                    &linalg::sub(x(n - 3), &linalg::scale(x(n - 2), 4.0)),
                ),
                0.5,
            )
        } else {
            linalg::scale(&linalg::sub(x(i + 1), x(i - 1)), 0.5)
        };
        let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        total += weight * m.shape_bivector(&points[i], &d)?.magnitude();
    }
    Ok(total)
}

/// One point of an ε-sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub delta: f64,
    pub ratio: f64,
}

/// Outcome of [`verify_minimality`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub sigma_base: f64,
    pub deltas: Vec<f64>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub epsilon_sweep: Vec<SweepEntry>,
    /// Log-log slope of `|ratio|` against `ε`; absent when the ratios vanish.
    pub ratio_slope: Option<f64>,
}

/// Epsilons of the first-order sweep.
pub const EPSILON_SWEEP: [f64; 3] = [1e-2, 1e-3, 1e-4];

struct Perturbation {
    mode: f64,
    direction: Vec<f64>,
}

fn perturbed(
    m: &Manifold,
    base: &[Point],
    length: f64,
    taus: &[f64],
    field: &Perturbation,
    eps: f64,
) -> Result<Vec<Point>> {
    base.iter()
        .zip(taus)
        .map(|(p, &tau)| {
            let bump = (field.mode * std::f64::consts::PI * tau / length).sin();
            let a = m.tangent_space(p)?.project(&field.direction);
            m.project_point(&linalg::axpy(&p.x, eps * bump, &a), Some(p))
        })
        .collect()
}

fn slope(sweep: &[SweepEntry]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = sweep
        .iter()
        .filter(|e| e.ratio != 0.0 && e.ratio.is_finite())
        .map(|e| (e.epsilon.ln(), e.ratio.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

/// Perturbs the trace by `num_perturbations` endpoint-fixing sine bumps
/// `sin(kπτ/L)·P(d)` (random `k ∈ {1,2,3}`, random unit `d`) of size
/// `amplitude`, and reports `Σ[γ′] − Σ[γ]`. The first perturbation is also
/// swept over [`EPSILON_SWEEP`] to expose the first-order variation.
pub fn verify_minimality(
    m: &Manifold,
    trace: &CurveTrace,
    num_perturbations: usize,
    amplitude: f64,
    seed: u64,
) -> Result<MinimalityReport> {
    check_dim(m.ambient_dim(), trace.dim())?;
    let length = trace.length();
    if !(length > 0.0) {
        return Err(Error::invalid("trace has zero length"));
    }
    let mut base = Vec::with_capacity(trace.len());
    for s in trace.samples() {
        let p = m.locate_near(&s.x, base.last())?;
        base.push(p);
    }
    let taus: Vec<f64> = trace.samples().iter().map(|s| s.tau - trace.first().tau).collect();
    let sigma_base = discrete_sigma(m, &base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = m.ambient_dim();
    let fields: Vec<Perturbation> = (0..num_perturbations.max(1))
        .map(|_| {
            let mode = rng.gen_range(1..=3) as f64;
            let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let direction = linalg::unit(&raw).unwrap_or_else(|| linalg::basis(dim, 0));
            Perturbation { mode, direction }
        })
        .collect();
    let mut deltas = Vec::with_capacity(num_perturbations);
    for field in fields.iter().take(num_perturbations) {
        let points = perturbed(m, &base, length, &taus, field, amplitude)?;
        deltas.push(discrete_sigma(m, &points)? - sigma_base);
    }
    let mut epsilon_sweep = Vec::with_capacity(EPSILON_SWEEP.len());
    for eps in EPSILON_SWEEP {
        let points = perturbed(m, &base, length, &taus, &fields[0], eps)?;
        let delta = discrete_sigma(m, &points)? - sigma_base;
        epsilon_sweep.push(SweepEntry {
            epsilon: eps,
            delta,
            ratio: delta / eps,
        });
    }
    let mut sorted = deltas.clone();
    sorted.sort_by(f64::total_cmp);
    let (min, median, max) = if sorted.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2]
        } else {
            0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
        };
        (sorted[0], median, sorted[k - 1])
    };
    Ok(MinimalityReport {
        sigma_base,
        deltas,
        min,
        median,
        max,
        ratio_slope: slope(&epsilon_sweep),
        epsilon_sweep,
    })
}
