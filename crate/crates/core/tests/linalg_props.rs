mod common;

use conespec::linalg::{count_signs, eig_sym, kernel_basis, Matrix, SymMatrix};
use proptest::prelude::*;
use rand::Rng;

use common::rng;

fn random_sym(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> SymMatrix<f64> {
    let a = Matrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    SymMatrix::from_fn(n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Orthogonal matrix from the eigenvectors of a random symmetric matrix.
fn random_orthogonal(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Matrix<f64> {
    eig_sym(&random_sym(r, n)).unwrap().vectors
}

/// `Q diag(values) Qᵀ` with a random orthogonal `Q`.
fn with_spectrum(r: &mut rand_chacha::ChaCha8Rng, values: &[f64]) -> SymMatrix<f64> {
    let n = values.len();
    let q = random_orthogonal(r, n);
    SymMatrix::from_fn(n, |i, j| (0..n).map(|k| q[(i, k)] * values[k] * q[(j, k)]).sum())
}

proptest! {
    #![proptest_config(common::config(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..=50) {
        let mut r = rng(seed);
        let a = random_sym(&mut r, n);
        let e = eig_sym(&a).unwrap();
        let back = e.reconstruct();
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        let diff = Matrix::from_fn(n, n, |i, j| back[(i, j)] - a.get(i, j));
        prop_assert!(diff.frobenius_norm() <= 1e-8 * scale);
        for w in e.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let gram = e.vectors.transpose().matmul(&e.vectors);
        let ortho = Matrix::from_fn(n, n, |i, j| gram[(i, j)] - if i == j { 1.0 } else { 0.0 });
        prop_assert!(ortho.max_abs() <= 1e-10);
    }

    #[test]
    fn signs_invariant_under_conjugation(seed in any::<u64>(), n in 2usize..=20) {
        let mut r = rng(seed);
        let values: Vec<f64> = (0..n)
            .map(|_| match r.gen_range(0..3) {
                0 => r.gen_range(-2.0..-0.1),
                1 => 0.0,
                _ => r.gen_range(0.1..2.0),
            })
            .collect();
        let a = with_spectrum(&mut r, &values);
        let q = random_orthogonal(&mut r, n);
        let b = a.congruence(&q);
        let sa = count_signs(&a, 1e-9).unwrap();
        let sb = count_signs(&b, 1e-9).unwrap();
        prop_assert_eq!(sa, sb);
        prop_assert_eq!(sa.negative, values.iter().filter(|&&v| v < 0.0).count());
        prop_assert_eq!(sa.zero, values.iter().filter(|&&v| v == 0.0).count());
        prop_assert_eq!(sa.negative + sa.zero + sa.positive, n);
    }

    #[test]
    fn kernel_dimension_monotone_in_tolerance(seed in any::<u64>(), n in 2usize..=16) {
        let mut r = rng(seed);
        let values: Vec<f64> = (0..n).map(|k| r.gen_range(-1.0..1.0) * 10f64.powi(-(k as i32))).collect();
        let a = with_spectrum(&mut r, &values);
        let mut last = usize::MAX;
        for p in 1..=14 {
            let dim = kernel_basis(&a, 10f64.powi(-p)).unwrap().len();
            prop_assert!(dim <= last);
            last = dim;
        }
    }

    #[test]
    fn kernel_vectors_are_null(seed in any::<u64>(), n in 2usize..=12, zeros in 1usize..=3) {
        let mut r = rng(seed);
        let zeros = zeros.min(n);
        let values: Vec<f64> = (0..n).map(|k| if k < zeros { 0.0 } else { r.gen_range(0.5..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 } }).collect();
        let a = with_spectrum(&mut r, &values);
        let ker = kernel_basis(&a, 1e-9).unwrap();
        prop_assert_eq!(ker.len(), zeros);
        for v in &ker {
            let av = a.mul_vec(v);
            prop_assert!(conespec::linalg::norm(&av) <= 1e-10);
        }
    }
}
