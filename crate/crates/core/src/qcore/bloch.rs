use serde::{Deserialize, Serialize};

use super::matrix::{c, pauli_x, pauli_y, pauli_z, ComplexMatrix};
use super::state::DensityMatrix;
use crate::error::{Error, Result};

pub const BLOCH_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if v.norm() > 1.0 + BLOCH_NORM_TOL {
            return Err(Error::BlochNorm(v.norm()));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

/// `(tr σ_x ρ, tr σ_y ρ, tr σ_z ρ)` of a single-qubit state.
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    Ok(BlochVector {
        x: rho.expectation(&pauli_x()).re,
        y: rho.expectation(&pauli_y()).re,
        z: rho.expectation(&pauli_z()).re,
    })
}

/// `(I + xσ_x + yσ_y + zσ_z)/2`
pub fn density_from_bloch(v: &BlochVector) -> Result<DensityMatrix> {
    if v.norm() > 1.0 + BLOCH_NORM_TOL {
        return Err(Error::BlochNorm(v.norm()));
    }
    let m = ComplexMatrix::from_rows(&[
        &[c(0.5 * (1.0 + v.z), 0.0), c(0.5 * v.x, -0.5 * v.y)],
        &[c(0.5 * v.x, 0.5 * v.y), c(0.5 * (1.0 - v.z), 0.0)],
    ]);
    DensityMatrix::new(m)
}
