//! Seeded random states, unitaries and channels.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::channel::KrausChannel;
use super::matrix::ComplexMatrix;
use super::state::PureState;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state on `n_qubits`.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, n_qubits: usize) -> PureState {
    let amps = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("gaussian vector is nonzero")
}

/// Matrix with orthonormal columns (Gram-Schmidt on a Gaussian matrix).
fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<Complex64>> {
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian(rng)).collect();
        for u in &columns {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            columns.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    columns
}

/// Haar-random unitary of dimension `dim`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let cols = random_isometry(rng, dim, dim);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m.set(i, j, *z);
        }
    }
    m
}

/// Random channel on `dim` with `n_kraus` operators, cut from a random isometry.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> KrausChannel {
    let cols = random_isometry(rng, dim * n_kraus, dim);
    let ops = (0..n_kraus)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for (j, col) in cols.iter().enumerate() {
                for i in 0..dim {
                    m.set(i, j, col[k * dim + i]);
                }
            }
            m
        })
        .collect();
    KrausChannel::with_tolerance(ops, 1e-10).expect("isometry blocks are complete")
}
