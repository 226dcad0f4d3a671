use nalgebra::{DVectorView, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_deviation, CMatrix};

/// Relative Hermiticity tolerance accepted by [`diagonalize`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Bare basis state with the largest weight in a dressed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateLabel {
    pub basis: usize,
    pub weight: f64,
}

/// Ascending spectrum of a Hermitian matrix with its eigenbasis.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    energies: Vec<f64>,
    vectors: CMatrix,
    labels: Vec<StateLabel>,
}

pub fn diagonalize(h: &CMatrix) -> Result<EigenSolution> {
    let dev = hermitian_deviation(h)?;
    let scale = h.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let n = order.len();
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let labels = (0..n)
        .map(|j| {
            let (basis, weight) = vectors
                .column(j)
                .iter()
                .map(|z| z.norm_sqr())
                .enumerate()
                .fold((0, -1.0), |best, (i, w)| if w > best.1 { (i, w) } else { best });
            StateLabel { basis, weight }
        })
        .collect();

    Ok(EigenSolution {
        energies,
        vectors,
        labels,
    })
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, in the order of [`Self::energies`].
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> DVectorView<'_, Complex64> {
        self.vectors.column(k)
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    /// Dressed state with the largest overlap onto bare state `basis`, and
    /// that overlap.
    pub fn dressed_index(&self, basis: usize) -> (usize, f64) {
        self.vectors
            .row(basis)
            .iter()
            .map(|z| z.norm_sqr())
            .enumerate()
            .fold((0, -1.0), |best, (k, w)| if w > best.1 { (k, w) } else { best })
    }

    /// `||H - V diag(E) V^dagger||_F` for the matrix this came from.
    pub fn reconstruction_residual(&self, h: &CMatrix) -> f64 {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.len(),
            self.energies.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        (h - &self.vectors * d * self.vectors.adjoint()).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5)
    }

    #[test]
    fn diagonal_input_sorted_with_permutation_vectors() {
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        let sol = diagonalize(&h).unwrap();
        assert_eq!(sol.energies(), &[1.0, 2.0, 3.0]);
        let bases: Vec<usize> = sol.labels().iter().map(|l| l.basis).collect();
        assert_eq!(bases, vec![1, 2, 0]);
        for l in sol.labels() {
            assert!((l.weight - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_level_closed_form() {
        let (g, d) = (0.3, 1.7);
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(g), c(g), c(d)]);
        let sol = diagonalize(&h).unwrap();
        let r = (g * g + d * d / 4.0).sqrt();
        assert!((sol.energies()[0] - (d / 2.0 - r)).abs() < 1e-14);
        assert!((sol.energies()[1] - (d / 2.0 + r)).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(diagonalize(&h), Err(Error::NotHermitian { .. })));
        assert!(matches!(diagonalize(&CMatrix::zeros(2, 3)), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn random_50_reconstruction() {
        let h = random_hermitian(50, 7);
        let sol = diagonalize(&h).unwrap();
        assert!(sol.reconstruction_residual(&h) < 1e-9 * h.norm());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn eigenbasis_orthonormal_and_sorted(n in 2usize..24, seed in any::<u64>()) {
            let h = random_hermitian(n, seed);
            let sol = diagonalize(&h).unwrap();
            prop_assert!(sol.energies().windows(2).all(|w| w[0] <= w[1]));
            let v = sol.vectors();
            let gram = v.adjoint() * v;
            prop_assert!((gram - CMatrix::identity(n, n)).norm() < 1e-10);
            prop_assert!(sol.reconstruction_residual(&h) < 1e-9 * h.norm());
        }

        #[test]
        fn labels_injective_above_half(n in 2usize..12, seed in any::<u64>(), eps in 0.0f64..0.05) {
            let d = CMatrix::from_fn(n, n, |i, j| if i == j { c(i as f64) } else { c(0.0) });
            let h = d + random_hermitian(n, seed) * c(eps);
            let sol = diagonalize(&h).unwrap();
            let mut seen = std::collections::HashSet::new();
            for l in sol.labels().iter().filter(|l| l.weight > 0.5) {
                prop_assert!(seen.insert(l.basis));
            }
        }
    }
}
