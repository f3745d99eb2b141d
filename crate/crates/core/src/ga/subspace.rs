//! Orthogonal projections onto the subspace represented by a unit blade.

use crate::error::{check_dim, Error, Result};
use crate::ga::{LinearMapN, Multivector};

/// Subspace of `R^N` identified with a blade `I_n`.
///
/// Holds the tangent projector `P(a) = (a·I_n) I_n^{-1}` as a matrix. On
/// multivectors both projectors act factor-wise (as outermorphisms), so a
/// bivector component with one factor inside and one outside the subspace is
/// dropped by both.
#[derive(Debug, Clone)]
pub struct Subspace {
    blade: Multivector,
    tangent: LinearMapN,
    transverse: LinearMapN,
}

impl Subspace {
    pub fn from_blade(blade: &Multivector) -> Result<Self> {
        let grade = blade
            .homogeneous_grade(1e-12 * blade.magnitude().max(1e-300))
            .ok_or_else(|| Error::invalid("subspace blade must be homogeneous and nonzero"))?;
        let inverse = blade.blade_inverse()?;
        let n = blade.dim();
        let mut tangent_rows = vec![vec![0.0; n]; n];
        for j in 0..n {
            let ej = Multivector::basis_vector(n, j);
            let pj = if grade == 0 {
                Multivector::zero(n)
            } else {
                ej.inner(blade)?.geometric_product(&inverse)?.grade(1)
            };
            for (i, row) in tangent_rows.iter_mut().enumerate() {
                row[j] = pj.get(1 << i);
            }
        }
        let mut transverse_rows = tangent_rows.clone();
        for (i, row) in transverse_rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if i == j { 1.0 } else { 0.0 } - *v;
            }
        }
        Ok(Self {
            blade: blade.clone(),
            tangent: LinearMapN::from_rows(&tangent_rows)?,
            transverse: LinearMapN::from_rows(&transverse_rows)?,
        })
    }

    pub fn blade(&self) -> &Multivector {
        &self.blade
    }

    pub fn project_vector(&self, v: &[f64]) -> Vec<f64> {
        self.tangent.apply(v)
    }

    pub fn reject_vector(&self, v: &[f64]) -> Vec<f64> {
        self.transverse.apply(v)
    }

    /// `P(A)`.
    pub fn project(&self, a: &Multivector) -> Result<Multivector> {
        check_dim(self.blade.dim(), a.dim())?;
        self.tangent.outermorphism(a)
    }

    /// `P⊥(A)`.
    pub fn reject(&self, a: &Multivector) -> Result<Multivector> {
        check_dim(self.blade.dim(), a.dim())?;
        self.transverse.outermorphism(a)
    }
}

/// Tangent projection of `a` relative to the unit blade `blade`.
pub fn project_tangent(a: &Multivector, blade: &Multivector) -> Result<Multivector> {
    Subspace::from_blade(blade)?.project(a)
}

/// Transverse projection of `a` relative to the unit blade `blade`.
pub fn project_transverse(a: &Multivector, blade: &Multivector) -> Result<Multivector> {
    Subspace::from_blade(blade)?.reject(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, mask: usize) -> Multivector {
        Multivector::blade(dim, mask, 1.0)
    }

    #[test]
    fn vector_split() {
        let i = e(3, 0b011);
        let a = e(3, 0b001) + e(3, 0b100);
        assert_eq!(project_tangent(&a, &i).unwrap(), e(3, 0b001));
        assert_eq!(project_transverse(&a, &i).unwrap(), e(3, 0b100));
    }

    #[test]
    fn mixed_bivector_has_no_pure_part() {
        let i = e(3, 0b011);
        let b = e(3, 0b101);
        assert!(project_tangent(&b, &i).unwrap().is_zero(0.0));
        assert!(project_transverse(&b, &i).unwrap().is_zero(0.0));
    }

    /// Classify basis bivectors of an adapted orthonormal frame by hand.
    #[test]
    fn bivector_classification_in_r4() {
        let i = e(4, 0b0011);
        let b = e(4, 0b0011).scale(2.0) + e(4, 0b1100).scale(3.0) + e(4, 0b0101).scale(5.0);
        assert_eq!(project_tangent(&b, &i).unwrap(), e(4, 0b0011).scale(2.0));
        assert_eq!(project_transverse(&b, &i).unwrap(), e(4, 0b1100).scale(3.0));
    }

    #[test]
    fn literal_formula_for_vectors() {
        let a = Multivector::vector(&[1.0, 2.0, 0.0]);
        let b = Multivector::vector(&[0.0, 1.0, 1.0]);
        let blade = a.outer(&b).unwrap();
        let blade = blade.scale(1.0 / blade.magnitude());
        let v = Multivector::vector(&[0.3, -1.0, 2.0]);
        let inv = blade.blade_inverse().unwrap();
        let p = v.inner(&blade).unwrap().geometric_product(&inv).unwrap();
        let q = v.outer(&blade).unwrap().geometric_product(&inv).unwrap();
        let sub = Subspace::from_blade(&blade).unwrap();
        assert!(sub.project(&v).unwrap().distance(&p) < 1e-14);
        assert!(sub.reject(&v).unwrap().distance(&q) < 1e-14);
        assert!((&p + &q).distance(&v) < 1e-14);
        // idempotent
        let pp = sub.project(&sub.project(&v).unwrap()).unwrap();
        assert!(pp.distance(&p) < 1e-14);
    }

    #[test]
    fn rejects_non_blade() {
        let not_blade = e(4, 0b0011) + e(4, 0b1100);
        assert!(Subspace::from_blade(&not_blade).is_err());
    }
}
