//! Small dense linear maps on `R^N` and their extension to multivectors.

use crate::error::{check_dim, Error, Result};
use crate::ga::Multivector;

/// Off-diagonal tolerance (relative to the Frobenius norm) for Jacobi sweeps.
const JACOBI_TOL: f64 = 1e-13;
/// Eigenvalues at or below this (relative to the largest) are not positive.
const PD_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Linear map on `R^N` stored as a row-major `N × N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapN {
    dim: usize,
    entries: Vec<f64>,
    symmetric: bool,
    positive_definite: bool,
}

impl LinearMapN {
    /// General map from rows; no structural flags are set.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("linear map needs at least one row"));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("linear map entries must be finite"));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self {
            dim,
            entries,
            symmetric: false,
            positive_definite: false,
        })
    }

    /// Map flagged symmetric; entries must match their transposes exactly.
    pub fn symmetric(rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::from_rows(rows)?;
        for i in 0..m.dim {
            for j in 0..i {
                if m.at(i, j) != m.at(j, i) {
                    return Err(Error::invalid(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        m.symmetric = true;
        Ok(m)
    }

    /// Map flagged symmetric positive-definite, checked through its eigenvalues.
    pub fn symmetric_positive_definite(rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::symmetric(rows)?;
        let (values, _) = m.symmetric_eigen()?;
        let largest = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if values.iter().any(|&v| v <= PD_THRESHOLD * largest.max(1e-300)) || largest == 0.0 {
            return Err(Error::invalid("matrix is not positive-definite"));
        }
        m.positive_definite = true;
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    /// Diagonal map, flagged symmetric (and positive-definite when all entries are > 0).
    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Self {
            dim,
            entries,
            symmetric: true,
            positive_definite: dim > 0 && diag.iter().all(|&d| d > 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.at(i, k) * other.at(k, j)).sum();
            }
        }
        Ok(Self {
            dim: n,
            entries,
            symmetric: false,
            positive_definite: false,
        })
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Eigen-decomposition of a symmetric map by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues and the matching unit eigenvectors (as columns, i.e.
    /// `vectors[k]` is the eigenvector of `values[k]`).
    pub fn symmetric_eigen(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        if !self.symmetric {
            return Err(Error::invalid("eigen-decomposition needs a symmetric map"));
        }
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut v = Self::identity(n).entries;
        let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_TOL * frob {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let values = (0..n).map(|i| a[i * n + i]).collect();
        let vectors = (0..n)
            .map(|k| (0..n).map(|i| v[i * n + k]).collect())
            .collect();
        Ok((values, vectors))
    }

    /// `Σ f(λ_k) v_k v_kᵀ` for a symmetric positive-definite map.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !self.symmetric {
            return Err(Error::invalid("map is not symmetric"));
        }
        let (values, vectors) = self.symmetric_eigen()?;
        let largest = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if largest == 0.0 || values.iter().any(|&v| v <= PD_THRESHOLD * largest) {
            return Err(Error::invalid("map is not positive-definite"));
        }
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for (lambda, vec) in values.iter().zip(&vectors) {
            let w = f(*lambda);
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += w * vec[i] * vec[j];
                }
            }
        }
        // symmetrize exactly so the symmetric flag holds as stored
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (entries[i * n + j] + entries[j * n + i]);
                entries[i * n + j] = m;
                entries[j * n + i] = m;
            }
        }
        Ok(Self {
            dim: n,
            entries,
            symmetric: true,
            positive_definite: true,
        })
    }

    /// Symmetric positive-definite square root.
    pub fn sqrt(&self) -> Result<Self> {
        self.spectral_map(f64::sqrt)
    }

    /// Inverse of the symmetric positive-definite square root.
    pub fn inv_sqrt(&self) -> Result<Self> {
        self.spectral_map(|l| 1.0 / l.sqrt())
    }

    /// Inverse of a symmetric positive-definite map.
    pub fn spd_inverse(&self) -> Result<Self> {
        self.spectral_map(|l| 1.0 / l)
    }

    /// Outermorphism: `f(a1 ∧ … ∧ ar) = f(a1) ∧ … ∧ f(ar)`, extended linearly.
    pub fn outermorphism(&self, a: &Multivector) -> Result<Multivector> {
        check_dim(self.dim, a.dim())?;
        let n = self.dim;
        let columns: Vec<Multivector> = (0..n)
            .map(|j| Multivector::vector(&(0..n).map(|i| self.at(i, j)).collect::<Vec<_>>()))
            .collect();
        let mut out = Multivector::scalar(n, a.get(0));
        for (mask, &c) in a.coeffs().iter().enumerate().skip(1) {
            if c != 0.0 {
                out += &Self::blade_image(&columns, mask, n).scale(c);
            }
        }
        Ok(out)
    }

    fn blade_image(columns: &[Multivector], mask: usize, n: usize) -> Multivector {
        let mut img = Multivector::scalar(n, 1.0);
        for i in (0..n).rev() {
            if mask & (1 << i) != 0 {
                img = columns[i].outer(&img).expect("same dimension");
            }
        }
        img
    }
}
