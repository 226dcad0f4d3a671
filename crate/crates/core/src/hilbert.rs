//! Truncated bosonic operator algebra on small composite Fock spaces.
//!
//! All matrices are dense. Composite spaces order their factors as given;
//! the rest of the crate always builds them in (L, R, C) order, dropping
//! modes that do not take part in a calculation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// A single-mode operator on a Fock space truncated to `dim` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    matrix: CMatrix,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

impl FockOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NonSquare { rows, cols });
        }
        check_dim(rows)?;
        Ok(Self { dim: rows, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Truncated lowering operator: `(n, n+1) = sqrt(n+1)`.
pub fn annihilation(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..dim - 1 {
        m[(n, n + 1)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { dim, matrix: m })
}

pub fn creation(dim: usize) -> Result<FockOperator> {
    Ok(annihilation(dim)?.dagger())
}

/// `a^dagger a`, built directly as `diag(0, 1, ..., dim-1)` so it is exact.
pub fn number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let diag = nalgebra::DVector::from_iterator(
        dim,
        (0..dim).map(|n| Complex64::new(n as f64, 0.0)),
    );
    Ok(FockOperator {
        dim,
        matrix: CMatrix::from_diagonal(&diag),
    })
}

/// Tensor-product space with a fixed factor ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    factor_dims: Vec<usize>,
}

impl CompositeSpace {
    /// Factors of dimension 1 are allowed; they stand for a mode held in its
    /// ground state.
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::param("factor_dims", "at least one factor required"));
        }
        if let Some(&dim) = factor_dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDimension { dim, min: 1 });
        }
        Ok(Self { factor_dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Row-major flat index of a basis state `|n_0, n_1, ...>`.
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.factor_dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factor_dims.len(),
                actual: occupations.len(),
            });
        }
        let mut idx = 0;
        for (&n, &d) in occupations.iter().zip(&self.factor_dims) {
            if n >= d {
                return Err(Error::DimensionMismatch { expected: d, actual: n + 1 });
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Inverse of [`CompositeSpace::index`].
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.factor_dims.len()];
        for (slot, &d) in self.factor_dims.iter().enumerate().rev() {
            occ[slot] = index % d;
            index /= d;
        }
        occ
    }

    /// `I (x) ... (x) op (x) ... (x) I` with `op` on factor `slot`.
    pub fn embed(&self, op: &FockOperator, slot: usize) -> Result<CMatrix> {
        self.embed_matrix(op.matrix(), slot)
    }

    pub(crate) fn embed_matrix(&self, op: &CMatrix, slot: usize) -> Result<CMatrix> {
        let factors = self.factor_dims.len();
        if slot >= factors {
            return Err(Error::SlotOutOfRange { slot, factors });
        }
        if op.nrows() != self.factor_dims[slot] || op.ncols() != op.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.factor_dims[slot],
                actual: op.nrows(),
            });
        }
        let left: usize = self.factor_dims[..slot].iter().product();
        let right: usize = self.factor_dims[slot + 1..].iter().product();
        let mut out = CMatrix::identity(left, left).kronecker(op);
        out = out.kronecker(&CMatrix::identity(right, right));
        Ok(out)
    }

    /// Total excitation number summed over all factors, as a diagonal matrix.
    pub fn total_number(&self) -> CMatrix {
        let n = self.total_dim();
        let diag = nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|i| Complex64::new(self.occupations(i).iter().sum::<usize>() as f64, 0.0)),
        );
        CMatrix::from_diagonal(&diag)
    }
}

/// Largest entrywise `|m - m^dagger|`.
pub fn hermitian_deviation(m: &CMatrix) -> Result<f64> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    let mut worst = 0.0_f64;
    for i in 0..rows {
        for j in i..cols {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    Ok(worst)
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<bool> {
    Ok(hermitian_deviation(m)? <= tol)
}

/// Frobenius norm of `a b - b a`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn annihilation_dim2_is_qubit_lowering() {
        let a = annihilation(2).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(a.matrix(), &expected);
    }

    #[test]
    fn annihilation_dim3_entries() {
        let a = annihilation(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 2) => 2.0_f64.sqrt(),
                    _ => 0.0,
                };
                assert_eq!(a.matrix()[(i, j)], c(want), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn truncated_commutator_dim4() {
        let a = annihilation(4).unwrap().into_matrix();
        let ad = a.adjoint();
        let comm = &a * &ad - &ad * &a;
        let expected = [1.0, 1.0, 1.0, -3.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert!((comm[(i, j)] - c(want)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn number_is_a_dagger_a() {
        for dim in 2..8 {
            let a = annihilation(dim).unwrap().into_matrix();
            let n = number(dim).unwrap().into_matrix();
            assert!((a.adjoint() * &a - &n).norm() < 1e-13);
            for k in 0..dim {
                assert_eq!(n[(k, k)], c(k as f64));
            }
        }
    }

    #[test]
    fn too_small_dimension_rejected() {
        assert_eq!(annihilation(1), Err(Error::InvalidDimension { dim: 1, min: 2 }));
        assert!(number(0).is_err());
    }

    #[test]
    fn embed_number_slots() {
        let space = CompositeSpace::new(vec![2, 2]).unwrap();
        let n = number(2).unwrap();
        let first = space.embed(&n, 0).unwrap();
        let second = space.embed(&n, 1).unwrap();
        let d0: Vec<f64> = first.diagonal().iter().map(|z| z.re).collect();
        let d1: Vec<f64> = second.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d0, vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(d1, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn embedded_ladder_action() {
        let space = CompositeSpace::new(vec![3, 2]).unwrap();
        let a = space.embed(&annihilation(3).unwrap(), 0).unwrap();
        let mut psi = nalgebra::DVector::<Complex64>::zeros(6);
        psi[space.index(&[2, 0]).unwrap()] = c(1.0);
        let out = a * psi;
        let target = space.index(&[1, 0]).unwrap();
        for i in 0..6 {
            let want = if i == target { 2.0_f64.sqrt() } else { 0.0 };
            assert!((out[i] - c(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn embed_errors() {
        let space = CompositeSpace::new(vec![3, 2]).unwrap();
        let a2 = annihilation(2).unwrap();
        assert_eq!(
            space.embed(&a2, 0),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        );
        assert_eq!(
            space.embed(&a2, 2),
            Err(Error::SlotOutOfRange { slot: 2, factors: 2 })
        );
    }

    #[test]
    fn index_round_trip() {
        let space = CompositeSpace::new(vec![3, 1, 4]).unwrap();
        for i in 0..space.total_dim() {
            assert_eq!(space.index(&space.occupations(i)).unwrap(), i);
        }
    }

    #[test]
    fn hermitian_checks() {
        let id = CMatrix::identity(4, 4);
        assert!(check_hermitian(&id, 1e-12).unwrap());
        let a = annihilation(3).unwrap().into_matrix();
        assert!(!check_hermitian(&a, 1e-12).unwrap());
        let a5 = annihilation(5).unwrap().into_matrix();
        let x = &a5 + a5.adjoint();
        assert!(check_hermitian(&x, 1e-12).unwrap());
        let rect = CMatrix::zeros(2, 3);
        assert_eq!(check_hermitian(&rect, 1e-12), Err(Error::NonSquare { rows: 2, cols: 3 }));
    }
}
