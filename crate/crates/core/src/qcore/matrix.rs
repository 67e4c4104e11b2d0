//! Dense complex matrices and the handful of qubit-indexed helpers built on them.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalues at or below this magnitude are treated as numerical zero when
/// taking matrix square roots.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Row-major complex matrix backed by `nalgebra::DMatrix`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Build from nested rows of complex numbers. Panics on ragged input; meant
    /// for literals.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let flat: Vec<Complex64> = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), c, "ragged matrix literal");
                row.iter().copied()
            })
            .collect();
        Self(DMatrix::from_row_slice(r, c, &flat))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[Complex64]> = converted.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&refs)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO }))
    }

    /// `|a⟩⟨b|`
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Self {
        Self(DMatrix::from_fn(ket.len(), bra.len(), |i, j| {
            ket[i] * bra[j].conj()
        }))
    }

    pub fn from_inner(inner: DMatrix<Complex64>) -> Self {
        Self(inner)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Kronecker product; the left factor occupies the high-order index bits.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let h = self.hermitian_part().0;
        let n = h.nrows();
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (values, vectors)
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .hermitian_part()
            .0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Square root of a positive semidefinite matrix; eigenvalues at or below
    /// [`EIGEN_FLOOR`] are dropped.
    pub fn psd_sqrt(&self) -> Self {
        let (values, vectors) = self.hermitian_eigen();
        let n = self.rows();
        let mut out = DMatrix::zeros(n, n);
        for (lambda, v) in values.iter().zip(&vectors) {
            if *lambda > EIGEN_FLOOR {
                let s = Complex64::new(lambda.sqrt(), 0.0);
                for r in 0..n {
                    for c in 0..n {
                        out[(r, c)] += s * v[r] * v[c].conj();
                    }
                }
            }
        }
        Self(out)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.0.singular_values().iter().copied().collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols(), v.len());
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `⟨v|A|v⟩`
    pub fn sandwich(&self, v: &[Complex64]) -> Complex64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// Conjugation `U A U†`.
    pub fn conjugate_by(&self, unitary: &Self) -> Self {
        Self(&unitary.0 * &self.0 * unitary.0.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (self.adjoint() * self.clone()).max_abs_diff(&Self::identity(self.rows())) <= tol
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "  ")?;
            for c in 0..self.cols() {
                let z = self.0[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Number of qubits for a dimension that must be a power of two.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn check_indices(qubits: &[usize], n_qubits: usize) -> Result<()> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange { index: q, n_qubits });
        }
        if qubits[..k].contains(&q) {
            return Err(Error::RepeatedIndex(q));
        }
    }
    Ok(())
}

/// Bit position (from the least significant end) of qubit `q` in an n-qubit index.
#[inline]
pub(crate) fn bit_of(q: usize, n_qubits: usize) -> usize {
    n_qubits - 1 - q
}

/// Left-multiply `m` by `op` acting on `qubits` (identity elsewhere).
///
/// `op` is a `2^k x 2^k` matrix whose index bits follow the order of `qubits`.
pub(crate) fn apply_local_left(
    op: &ComplexMatrix,
    qubits: &[usize],
    n_qubits: usize,
    m: &ComplexMatrix,
) -> ComplexMatrix {
    let k = qubits.len();
    let sub_dim = 1usize << k;
    let dim = 1usize << n_qubits;
    debug_assert_eq!(op.rows(), sub_dim);
    debug_assert_eq!(m.rows(), dim);
    let shifts: Vec<usize> = qubits.iter().map(|&q| bit_of(q, n_qubits)).collect();
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let sub_index = |full: usize| -> usize {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((full >> s) & 1))
    };
    let compose = |rest: usize, sub: usize| -> usize {
        let mut full = rest;
        for (pos, &s) in shifts.iter().enumerate() {
            let bit = (sub >> (k - 1 - pos)) & 1;
            full |= bit << s;
        }
        full
    };
    let cols = m.cols();
    let mut out = DMatrix::<Complex64>::zeros(dim, cols);
    for row in 0..dim {
        let rest = row & !mask;
        let a = sub_index(row);
        for b in 0..sub_dim {
            let coeff = op.0[(a, b)];
            if coeff == ZERO {
                continue;
            }
            let src = compose(rest, b);
            for c in 0..cols {
                out[(row, c)] += coeff * m.0[(src, c)];
            }
        }
    }
    ComplexMatrix(out)
}

/// Full `2^n x 2^n` matrix of `op` embedded on `qubits`.
pub fn embed_operator(op: &ComplexMatrix, qubits: &[usize], n_qubits: usize) -> ComplexMatrix {
    apply_local_left(op, qubits, n_qubits, &ComplexMatrix::identity(1 << n_qubits))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

/// `R_z(θ) = exp(-iθσ_z/2)`
pub fn rz(theta: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    ])
}

/// Controlled-phase `diag(1, 1, 1, -1)`.
pub fn controlled_phase() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, ONE, ONE, -ONE])
}
