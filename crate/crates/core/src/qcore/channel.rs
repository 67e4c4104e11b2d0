use super::matrix::{apply_local_left, check_indices, ComplexMatrix};
use super::state::DensityMatrix;
use crate::error::{Error, Result};

pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Quantum channel in Kraus form, `ε(ρ) = Σ K ρ K†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checked constructor: equal square dimensions and `Σ K†K = I` within 1e-12.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(operators, COMPLETENESS_TOL)
    }

    pub fn with_tolerance(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let dim = operators.first().ok_or(Error::EmptyChannel)?.rows();
        for op in &operators {
            if !op.is_square() || op.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.rows(),
                });
            }
        }
        let deviation = completeness_deviation(&operators);
        if deviation > tol {
            return Err(Error::Completeness(deviation));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Fully depolarizing qubit channel, every input to I/2.
    pub fn fully_depolarizing() -> Self {
        use super::matrix::{pauli_x, pauli_y, pauli_z};
        let ops = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
            .into_iter()
            .map(|p| p.scale_real(0.5))
            .collect();
        Self { operators: ops }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.operators)
    }

    /// Applies the channel to the whole register.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let qubits: Vec<usize> = (0..rho.n_qubits()).collect();
        apply_channel(rho, self, &qubits)
    }

    /// Sequential composition: `self` after `first`.
    pub fn compose_after(&self, first: &KrausChannel) -> Result<KrausChannel> {
        let mut ops = Vec::with_capacity(self.operators.len() * first.operators.len());
        for a in &self.operators {
            for b in &first.operators {
                ops.push(a * b);
            }
        }
        KrausChannel::with_tolerance(ops, 1e-10)
    }
}

fn completeness_deviation(ops: &[ComplexMatrix]) -> f64 {
    let dim = ops[0].rows();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for k in ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim))
}

/// Applies `ch` to the tensor factors listed in `qubits`.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    qubits: &[usize],
) -> Result<DensityMatrix> {
    check_indices(qubits, rho.n_qubits())?;
    if ch.dim() != 1 << qubits.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << qubits.len(),
            found: ch.dim(),
        });
    }
    let n = rho.n_qubits();
    let dim = rho.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for k in ch.operators() {
        // K ρ K† = K (K ρ)† for Hermitian ρ
        let left = apply_local_left(k, qubits, n, rho.matrix());
        let full = apply_local_left(k, qubits, n, &left.adjoint());
        acc = &acc + &full;
    }
    Ok(DensityMatrix::from_trusted(n, acc.hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{c, pauli_z};
    use crate::qcore::state::PureState;

    #[test]
    fn identity_channel_leaves_state() {
        let rho = PureState::normalized(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap().to_density();
        let out = apply_channel(&rho, &KrausChannel::identity(2), &[0]).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn full_dephasing_of_plus() {
        // ½(ρ + ZρZ) for ρ = |+⟩⟨+| is I/2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ch = KrausChannel::new(vec![
            ComplexMatrix::identity(2).scale_real(h),
            pauli_z().scale_real(h),
        ])
        .unwrap();
        let plus = PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap().to_density();
        let out = apply_channel(&plus, &ch, &[0]).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }

    #[test]
    fn rejects_incomplete_and_mismatched() {
        let bad = KrausChannel::new(vec![ComplexMatrix::identity(2).scale_real(0.5)]);
        assert!(matches!(bad, Err(Error::Completeness(_))));
        assert_eq!(KrausChannel::new(vec![]), Err(Error::EmptyChannel));
        let rho = DensityMatrix::maximally_mixed(2);
        let err = apply_channel(&rho, &KrausChannel::identity(2), &[0, 1]);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let err = apply_channel(&rho, &KrausChannel::identity(4), &[1, 1]);
        assert_eq!(err, Err(Error::RepeatedIndex(1)));
    }

    #[test]
    fn depolarizing_sends_everything_to_center() {
        let rho = PureState::from_bits("1").unwrap().to_density();
        let out = KrausChannel::fully_depolarizing().apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    }
}
