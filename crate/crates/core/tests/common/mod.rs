#![allow(dead_code)]

use cur_spca::cursampler::seeded_rng;
use cur_spca::DenseMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian(n: usize, p: usize, seed: u64) -> DenseMatrix {
    let mut rng = seeded_rng(seed);
    DenseMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `p x k` with orthonormal columns.
pub fn orthonormal(p: usize, k: usize, seed: u64) -> DenseMatrix {
    gaussian(p, k, seed).qr().q()
}

/// Least-squares residual `min_B ||X - X^I B||_F` via the normal equations.
/// Only valid when `X^I` has full column rank.
pub fn normal_equations_error(x: &DenseMatrix, idx: &[usize]) -> f64 {
    let xi = x.select_columns(idx);
    let gram = xi.transpose() * &xi;
    let rhs = xi.transpose() * x;
    let b = gram.cholesky().expect("full column rank").solve(&rhs);
    (x - xi * b).norm()
}

/// Trailing eigenvalues of `X^T X`, summed: `||X - X_k||_F^2`.
pub fn tail_energy(x: &DenseMatrix, k: usize) -> f64 {
    let mut ev: Vec<f64> = (x.transpose() * x).symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev[k..].iter().sum()
}
