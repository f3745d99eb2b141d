use crate::error::{Error, Result};
use crate::ga::Multivector;

/// Terms of the exponential series are summed until they drop below this
/// fraction of the partial sum.
const SERIES_TOL: f64 = 1e-15;
const SERIES_MAX_TERMS: usize = 60;

/// Unit even multivector implementing the rotation `A ↦ R A R̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotor {
    value: Multivector,
}

impl Rotor {
    pub fn identity(dim: usize) -> Self {
        Self {
            value: Multivector::scalar(dim, 1.0),
        }
    }

    /// Wraps an even multivector, rescaling it so that `<R̃R>_0 = 1`.
    pub fn from_multivector(value: Multivector) -> Result<Self> {
        let odd = value
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask.count_ones() % 2 == 1)
            .fold(0.0f64, |m, (_, c)| m.max(c.abs()));
        if odd > 1e-12 * value.magnitude().max(1.0) {
            return Err(Error::invalid("rotor must be an even multivector"));
        }
        let mut r = Self { value };
        r.renormalize()?;
        Ok(r)
    }

    /// Wraps an even multivector as is, for integrators that renormalize later.
    pub(crate) fn from_multivector_unchecked(value: Multivector) -> Self {
        Self { value }
    }

    /// `exp(B)` for a bivector `B`, by scaling and squaring of the Taylor series.
    ///
    /// The rotor that rotates by angle `θ` in the plane of a unit bivector `b̂`
    /// is `exp(-θ b̂ / 2)`.
    pub fn exp(bivector: &Multivector) -> Result<Self> {
        let mag = bivector.magnitude();
        if bivector.without_grade(2).max_abs() > 1e-12 * (1.0 + mag) {
            return Err(Error::invalid("rotor exponent must be a pure bivector"));
        }
        let b = bivector.grade(2);
        let dim = b.dim();
        let mut squarings = 0;
        let mut scaled_mag = mag;
        while scaled_mag > 0.5 {
            scaled_mag *= 0.5;
            squarings += 1;
        }
        let small = b.scale(0.5f64.powi(squarings));
        let mut sum = Multivector::scalar(dim, 1.0);
        let mut term = Multivector::scalar(dim, 1.0);
        for k in 1..SERIES_MAX_TERMS {
            term = (&term * &small).scale(1.0 / k as f64);
            sum += &term;
            if term.magnitude() < SERIES_TOL * sum.magnitude() {
                break;
            }
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        let mut r = Self { value: sum };
        r.renormalize()?;
        Ok(r)
    }

    pub fn value(&self) -> &Multivector {
        &self.value
    }

    pub fn into_multivector(self) -> Multivector {
        self.value
    }

    pub fn dim(&self) -> usize {
        self.value.dim()
    }

    pub fn reverse(&self) -> Self {
        Self {
            value: self.value.reverse(),
        }
    }

    /// `R A R̃`.
    pub fn apply(&self, a: &Multivector) -> Result<Multivector> {
        let ra = self.value.geometric_product(a)?;
        ra.geometric_product(&self.value.reverse())
    }

    /// Rotation of a plain vector.
    pub fn apply_vector(&self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self.apply(&Multivector::vector(v))?.to_vector())
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            value: self.value.geometric_product(&other.value)?,
        })
    }

    /// `<R̃R>_0`.
    pub fn norm_squared(&self) -> f64 {
        self.value.norm_squared()
    }

    /// `|R̃R − 1|`, the full deviation from unit norm.
    pub fn unitarity_defect(&self) -> f64 {
        let rr = &self.value.reverse() * &self.value;
        rr.distance(&Multivector::scalar(self.dim(), 1.0))
    }

    /// Divide by `sqrt(<R̃R>_0)`.
    pub fn renormalize(&mut self) -> Result<()> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Singular("rotor has zero norm".into()));
        }
        self.value = self.value.scale(1.0 / n2.sqrt());
        Ok(())
    }

    /// Rotation angle `2 atan2(|<R>_2|, <R>_0)`; exact for rotations in a single plane.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self
            .value
            .grade(2)
            .magnitude()
            .atan2(self.value.scalar_part())
    }
}
