//! Pure states and density matrices over qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor and the most significant bit of a
//! basis-state index, so `|q0 q1 ... q(n-1)⟩` has index `q0·2^(n-1) + ... + q(n-1)`.

use num_complex::Complex64;

use super::matrix::{apply_local_left, bit_of, check_indices, qubits_for_dim, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Checked constructor; amplitudes must already be normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if n_qubits == 0 {
            return Err(Error::NotQubitDimension(1));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Basis state from a bit string such as `"0101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::UnknownLabel(bits.to_string()))?;
        if n == 0 {
            return Err(Error::UnknownLabel(bits.to_string()));
        }
        Ok(Self::basis(n, index))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Applies `op` to the listed qubits.
    pub fn apply(&self, op: &ComplexMatrix, qubits: &[usize]) -> Result<Self> {
        check_indices(qubits, self.n_qubits)?;
        if op.rows() != 1 << qubits.len() || !op.is_square() {
            return Err(Error::DimensionMismatch {
                expected: 1 << qubits.len(),
                found: op.rows(),
            });
        }
        let column = ComplexMatrix::from_row_major(self.dim(), 1, self.amplitudes.clone())?;
        let out = apply_local_left(op, qubits, self.n_qubits, &column);
        Self::normalized(out.row_major())
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checked constructor enforcing Hermiticity, positivity and unit trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.rows())?;
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min_eig = matrix.hermitian_eigenvalues()[0];
        if min_eig < -PSD_TOL {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Builds from an unnormalized positive operator by dividing by its trace.
    ///
    /// Hermitian symmetrization absorbs rounding from products like `KρK†`.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::VanishingProbability(tr));
        }
        Self::new(matrix.hermitian_part().scale_real(1.0 / tr))
    }

    pub(crate) fn from_trusted(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `tr(Aρ)`
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        (op * &self.matrix).trace()
    }

    /// `⟨v|ρ|v⟩` for a vector of full dimension.
    pub fn overlap(&self, v: &[Complex64]) -> f64 {
        self.matrix.sandwich(v).re
    }

    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: self.matrix.conjugate_by(unitary).hermitian_part(),
        }
    }

    /// `U ρ U†` with `U` acting on `qubits`.
    pub fn apply_unitary(&self, unitary: &ComplexMatrix, qubits: &[usize]) -> Result<Self> {
        check_indices(qubits, self.n_qubits)?;
        if unitary.rows() != 1 << qubits.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << qubits.len(),
                found: unitary.rows(),
            });
        }
        let left = apply_local_left(unitary, qubits, self.n_qubits, &self.matrix);
        let full = apply_local_left(unitary, qubits, self.n_qubits, &left.adjoint());
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: full.hermitian_part(),
        })
    }

    /// `(1 - p)ρ + p·I/d`
    pub fn mix_with_white_noise(&self, p: f64) -> Self {
        let mixed = Self::maximally_mixed(self.n_qubits);
        Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix.scale_real(1.0 - p) + &mixed.matrix.scale_real(p),
        }
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.matrix - &other.matrix;
        0.5 * diff.hermitian_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Weighted sum of states; weights are renormalized to sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::TooSmall {
            what: "mixture components",
            min: 1,
            found: 0,
        })?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        Self::from_unnormalized(acc)
    }
}

/// Kronecker product for matrices and kets.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced state on `keep`, in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let n = rho.n_qubits;
    check_indices(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let out_dim = 1usize << k;
    let env_dim = 1usize << traced.len();
    let compose = |sub: usize, env: usize| -> usize {
        let mut full = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            full |= ((sub >> (k - 1 - pos)) & 1) << bit_of(q, n);
        }
        for (pos, &q) in traced.iter().enumerate() {
            full |= ((env >> (traced.len() - 1 - pos)) & 1) << bit_of(q, n);
        }
        full
    };
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut acc = ZERO;
            for e in 0..env_dim {
                acc += rho.matrix.get(compose(a, e), compose(b, e));
            }
            out.set(a, b, acc);
        }
    }
    Ok(DensityMatrix::from_trusted(k, out.hermitian_part()))
}

/// Uhlmann fidelity `(tr√(√ρ σ √ρ))²`, evaluated as the squared trace norm of `√ρ√σ`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(root_fidelity(rho.matrix(), sigma.matrix())?.powi(2))
}

/// `tr√(√A B √A)` for positive semidefinite `A`, `B` of equal dimension.
pub fn root_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let prod = &a.psd_sqrt() * &b.psd_sqrt();
    let f: f64 = prod.singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}
