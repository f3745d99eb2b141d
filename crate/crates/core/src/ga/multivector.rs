use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{check_dim, Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 12;

/// Dimensions up to this one get a precomputed blade-product sign table.
const TABLE_DIM: usize = 6;

/// Sign picked up when the basis blade `a` is multiplied by the basis blade `b`.
///
/// Counts, for every factor of `a`, the factors of `b` with a smaller index;
/// each of them has to be swapped past it.
#[inline]
pub fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn sign_table(dim: usize) -> &'static [i8] {
    static TABLES: [OnceLock<Vec<i8>>; TABLE_DIM + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    TABLES[dim].get_or_init(|| {
        let size = 1usize << dim;
        let mut table = vec![0i8; size * size];
        for a in 0..size {
            for b in 0..size {
                table[a * size + b] = reorder_sign(a, b) as i8;
            }
        }
        table
    })
}

/// Grade of a basis blade given by its index bitmask.
#[inline]
pub fn blade_grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Reversion sign `(-1)^{r(r-1)/2}` of a grade-`r` blade.
#[inline]
pub fn reverse_sign(grade: usize) -> f64 {
    if (grade / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense multivector of the geometric algebra over Euclidean `R^N`.
///
/// Coefficient `i` belongs to the basis blade whose factors are the set bits of
/// `i` in ascending order, so `e1 = 0b1`, `e2 = 0b10`, `e12 = 0b11`.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "ambient dimension {dim} outside 1..={MAX_DIM}"
        );
        Self {
            dim,
            coeffs: vec![0.0; 1 << dim],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = value;
        m
    }

    /// Single basis blade `coef * e_mask`.
    pub fn blade(dim: usize, mask: usize, coef: f64) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[mask] = coef;
        m
    }

    /// Basis vector `e_{i+1}` (zero-based index).
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        Self::blade(dim, 1 << i, 1.0)
    }

    /// Grade-1 multivector with the given components; dimension is `v.len()`.
    pub fn vector(v: &[f64]) -> Self {
        let mut m = Self::zero(v.len());
        for (i, &c) in v.iter().enumerate() {
            m.coeffs[1 << i] = c;
        }
        m
    }

    /// Unit pseudoscalar `e1 e2 ... eN`.
    pub fn pseudoscalar(dim: usize) -> Self {
        Self::blade(dim, (1 << dim) - 1, 1.0)
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::invalid(format!(
                "ambient dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        check_dim(1 << dim, coeffs.len())?;
        Ok(Self { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, value: f64) {
        self.coeffs[mask] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Grade-1 components as a plain vector.
    pub fn to_vector(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Grade-`r` part.
    pub fn grade(&self, r: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if blade_grade(mask) == r {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    /// Everything except the grade-`r` part.
    pub fn without_grade(&self, r: usize) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if blade_grade(mask) == r {
                *c = 0.0;
            }
        }
        out
    }

    /// Grades with a coefficient larger than `tol` in absolute value.
    pub fn grades(&self, tol: f64) -> Vec<usize> {
        let mut present = vec![false; self.dim + 1];
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c.abs() > tol {
                present[blade_grade(mask)] = true;
            }
        }
        (0..=self.dim).filter(|&r| present[r]).collect()
    }

    /// The unique grade of a nonzero homogeneous multivector.
    pub fn homogeneous_grade(&self, tol: f64) -> Option<usize> {
        match self.grades(tol).as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }

    pub fn reverse(&self) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            *c *= reverse_sign(blade_grade(mask));
        }
        out
    }

    /// `<Ã A>_0`, which for a positive signature is the sum of squared coefficients.
    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `|A| = sqrt(<Ã A>_0)`.
    pub fn magnitude(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Largest coefficient in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Sum of the coefficient products restricted by `keep(mask_a, mask_b)`.
    fn product_filtered(&self, other: &Self, keep: impl Fn(usize, usize) -> bool) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let size = 1usize << dim;
        let mut out = vec![0.0; size];
        let table = (dim <= TABLE_DIM).then(|| sign_table(dim));
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 || !keep(a, b) {
                    continue;
                }
                let sign = match table {
                    Some(t) => t[a * size + b] as f64,
                    None => reorder_sign(a, b),
                };
                out[a ^ b] += sign * ca * cb;
            }
        }
        Self { dim, coeffs: out }
    }

    /// Geometric (Clifford) product with `e_i^2 = +1`.
    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.product_filtered(other, |_, _| true))
    }

    /// Inner product: for every pair of grades `r, s >= 1` keeps grade `|r - s|`.
    ///
    /// Scalars have zero inner product with everything, matching
    /// `a·A_r = ½(a A_r − (−1)^r A_r a)` for `r = 0`.
    pub fn inner(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.product_filtered(other, |a, b| {
            a != 0 && b != 0 && {
                let common = a & b;
                common == a || common == b
            }
        }))
    }

    /// Outer product: for every pair of grades `r, s` keeps grade `r + s`.
    pub fn outer(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(self.product_filtered(other, |a, b| a & b == 0))
    }

    /// Commutator product `A × B = ½(AB − BA)`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.geometric_product(other)?;
        let ba = other.geometric_product(self)?;
        Ok((ab - ba).scale(0.5))
    }

    /// Scalar product `<A B>_0`, computed without forming the full product.
    pub fn scalar_product(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(mask, (a, b))| reverse_sign(blade_grade(mask)) * a * b)
            .sum())
    }

    /// Inverse `Ã_r / |A_r|^2` of a blade.
    ///
    /// Fails with [`Error::Singular`] for a zero input and with
    /// [`Error::InvalidArgument`] when the input is not a blade.
    pub fn blade_inverse(&self) -> Result<Self> {
        let norm2 = self.norm_squared();
        if norm2 == 0.0 || !norm2.is_finite() {
            return Err(Error::Singular("blade has zero magnitude".into()));
        }
        let tol = 1e-10;
        let scale = norm2.sqrt();
        if self.homogeneous_grade(tol * scale).is_none() {
            return Err(Error::invalid("blade inverse needs a homogeneous multivector"));
        }
        let rev = self.reverse();
        let square = self.geometric_product(&rev)?;
        if square.without_grade(0).max_abs() > tol * norm2 {
            return Err(Error::invalid("multivector is not a blade (A Ã is not a scalar)"));
        }
        Ok(rev.scale(1.0 / norm2))
    }

    /// `|self - other|`, the magnitude of the difference.
    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Bivector components as `(i, j, value)` with one-based `i < j`.
    pub fn bivector_components(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                out.push((i + 1, j + 1, self.coeffs[(1 << i) | (1 << j)]));
            }
        }
        out
    }

    fn blade_name(mask: usize) -> String {
        let mut s = String::from("e");
        for i in 0..MAX_DIM {
            if mask & (1 << i) != 0 {
                s.push_str(&(i + 1).to_string());
            }
        }
        s
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[{}](", self.dim)?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut order: Vec<usize> = (0..self.coeffs.len()).collect();
        order.sort_by_key(|&m| (blade_grade(m), m));
        let mut first = true;
        for mask in order {
            let c = self.coeffs[mask];
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}{}", Self::blade_name(mask))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<'a> Add<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<'a> Sub<&'a Multivector> for &'a Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&Multivector> for Multivector {
    fn sub_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

/// Geometric product. Panics on dimension mismatch; use
/// [`Multivector::geometric_product`] for a fallible version.
impl Mul for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs).expect("dimension mismatch")
    }
}

impl Mul for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, mask: usize) -> Multivector {
        Multivector::blade(dim, mask, 1.0)
    }

    #[test]
    fn basis_vectors_square_to_one() {
        let e1 = e(3, 0b001);
        assert_eq!(&e1 * &e1, Multivector::scalar(3, 1.0));
    }

    #[test]
    fn orthogonal_vectors_give_bivector() {
        assert_eq!(&e(3, 0b001) * &e(3, 0b010), e(3, 0b011));
        assert_eq!(&e(3, 0b010) * &e(3, 0b001), -e(3, 0b011));
    }

    #[test]
    fn bivector_product_by_hand() {
        // e12 e23 = e1 e2 e2 e3 = e13
        assert_eq!(&e(3, 0b011) * &e(3, 0b110), e(3, 0b101));
    }

    #[test]
    fn sign_table_matches_direct_count() {
        for dim in 1..=TABLE_DIM {
            let t = sign_table(dim);
            let size = 1 << dim;
            for a in 0..size {
                for b in 0..size {
                    assert_eq!(t[a * size + b] as f64, reorder_sign(a, b));
                }
            }
        }
    }

    #[test]
    fn inner_and_outer_blade_cases() {
        let e1 = e(3, 0b001);
        let e3 = e(3, 0b100);
        let e12 = e(3, 0b011);
        assert_eq!(e1.inner(&e12).unwrap(), e(3, 0b010));
        assert!(e3.inner(&e12).unwrap().is_zero(0.0));
        assert!(e1.outer(&e12).unwrap().is_zero(0.0));
        // scalars have no inner product
        assert!(Multivector::scalar(3, 2.0).inner(&e1).unwrap().is_zero(0.0));
        assert_eq!(Multivector::scalar(3, 2.0).outer(&e1).unwrap(), e1.scale(2.0));
    }

    #[test]
    fn commutator_cases() {
        let e1 = e(3, 0b001);
        let e2 = e(3, 0b010);
        let e12 = e(3, 0b011);
        let e13 = e(3, 0b101);
        assert_eq!(e1.commutator(&e2).unwrap(), e12);
        assert_eq!(e1.commutator(&e12).unwrap(), e2);
        assert_eq!(e12.commutator(&e13).unwrap(), -e(3, 0b110));
    }

    #[test]
    fn magnitudes() {
        assert_eq!(e(2, 0b11).magnitude(), 1.0);
        assert_eq!(Multivector::vector(&[3.0, 0.0]).magnitude(), 3.0);
        let m = Multivector::scalar(2, 1.0) + e(2, 0b11);
        assert!((m.magnitude() - 2f64.sqrt()).abs() < 1e-15);
        // same value from the defining product
        let direct = (&m.reverse() * &m).scalar_part().sqrt();
        assert!((direct - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reversion_signs_by_grade() {
        let signs: Vec<f64> = (0..6).map(reverse_sign).collect();
        assert_eq!(signs, vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn blade_inverse_cases() {
        assert_eq!(e(2, 0b11).blade_inverse().unwrap(), -e(2, 0b11));
        assert_eq!(
            Multivector::vector(&[2.0, 0.0]).blade_inverse().unwrap(),
            Multivector::vector(&[0.5, 0.0])
        );
        assert!(matches!(
            Multivector::zero(2).blade_inverse(),
            Err(Error::Singular(_))
        ));
        let not_blade = e(4, 0b0011) + e(4, 0b1100);
        assert!(matches!(
            not_blade.blade_inverse(),
            Err(Error::InvalidArgument(_))
        ));
        let mixed = Multivector::scalar(2, 1.0) + e(2, 0b01);
        assert!(matches!(mixed.blade_inverse(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn blade_inverse_of_skew_blade() {
        let a = Multivector::vector(&[1.0, 2.0, 0.5]);
        let b = Multivector::vector(&[-0.3, 1.0, 2.0]);
        let c = Multivector::vector(&[0.7, 0.1, -1.0]);
        let blade = a.outer(&b).unwrap().outer(&c).unwrap();
        let inv = blade.blade_inverse().unwrap();
        let prod = &blade * &inv;
        assert!(prod.distance(&Multivector::scalar(3, 1.0)) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Multivector::zero(2);
        let b = Multivector::zero(3);
        assert!(matches!(
            a.geometric_product(&b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(a.inner(&b).is_err());
        assert!(a.outer(&b).is_err());
        assert!(a.commutator(&b).is_err());
    }

    #[test]
    fn display_lists_blades_by_grade() {
        let m = Multivector::scalar(3, 1.0) + e(3, 0b011).scale(-2.0) + e(3, 0b100);
        assert_eq!(m.to_string(), "1 + 1e3 + -2e12");
    }
}
