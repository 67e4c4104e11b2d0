//! JSON wire forms for states, operators and channels.
//!
//! States and operators: `{"kind":"pure"|"density"|"matrix","n_qubits":N,"data":[[re,im],...]}`
//! with row-major data. Channels: `{"kind":"kraus","dim":d,"operators":[<matrix>,...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::KrausChannel;
use super::matrix::{qubits_for_dim, ComplexMatrix};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub kind: StateKind,
    pub n_qubits: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kind: String,
    pub dim: usize,
    pub operators: Vec<StateJson>,
}

fn pack(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn unpack(data: &[[f64; 2]]) -> Vec<Complex64> {
    data.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        Self {
            kind: StateKind::Pure,
            n_qubits: s.n_qubits(),
            data: pack(s.amplitudes()),
        }
    }
}

impl From<&DensityMatrix> for StateJson {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            kind: StateKind::Density,
            n_qubits: rho.n_qubits(),
            data: pack(&rho.matrix().row_major()),
        }
    }
}

impl StateJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            kind: StateKind::Matrix,
            n_qubits: qubits_for_dim(m.rows())?,
            data: pack(&m.row_major()),
        })
    }

    pub fn to_pure(&self) -> Result<PureState> {
        if self.kind != StateKind::Pure {
            return Err(Error::Json(format!("expected a pure state, got {:?}", self.kind)));
        }
        let state = PureState::new(unpack(&self.data))?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        Ok(state)
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let dim = 1usize << self.n_qubits;
        ComplexMatrix::from_row_major(dim, dim, unpack(&self.data))
    }

    /// Density matrix of either a pure or a density entry.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self.kind {
            StateKind::Pure => Ok(self.to_pure()?.to_density()),
            StateKind::Density => DensityMatrix::new(self.to_matrix()?),
            StateKind::Matrix => Err(Error::Json("expected a state, got a bare matrix".into())),
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<KrausChannel> {
        if self.kind != "kraus" {
            return Err(Error::Json(format!("expected kind \"kraus\", got {:?}", self.kind)));
        }
        let ops = self
            .operators
            .iter()
            .map(StateJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        if ops.iter().any(|m| m.rows() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ops.first().map_or(0, |m| m.rows()),
            });
        }
        // reconstructed channels arrive with ~1e-8 completeness error
        KrausChannel::with_tolerance(ops, 1e-8)
    }
}

impl TryFrom<&KrausChannel> for ChannelJson {
    type Error = Error;

    fn try_from(ch: &KrausChannel) -> Result<Self> {
        Ok(Self {
            kind: "kraus".into(),
            dim: ch.dim(),
            operators: ch
                .operators()
                .iter()
                .map(StateJson::from_matrix)
                .collect::<Result<_>>()?,
        })
    }
}
