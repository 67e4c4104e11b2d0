//! Phase-damping channels, their symmetric-pair variant, and the discrete
//! quarter-duration realization of full dephasing.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qcore::{apply_channel, embed_operator, pauli_z, ComplexMatrix, DensityMatrix, KrausChannel};

/// Dimensionless coupling-time product `Γt`; `Infinite` is full dephasing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseDampingParams {
    Finite(f64),
    Infinite,
}

impl PhaseDampingParams {
    pub fn new(gamma_t: f64) -> Result<Self> {
        if gamma_t.is_nan() || gamma_t < 0.0 {
            return Err(Error::InvalidSchedule(format!("gamma_t must be >= 0, got {gamma_t}")));
        }
        if gamma_t.is_infinite() {
            return Ok(Self::Infinite);
        }
        Ok(Self::Finite(gamma_t))
    }

    /// Surviving coherence factor `e^{-Γt}`, exactly 0 at infinity.
    pub fn coherence(&self) -> f64 {
        match self {
            Self::Finite(g) => (-g).exp(),
            Self::Infinite => 0.0,
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// `(√((1+e^{-Γt})/2), √((1−e^{-Γt})/2))`
    fn weights(&self) -> (f64, f64) {
        let e = self.coherence();
        (((1.0 + e) / 2.0).sqrt(), ((1.0 - e) / 2.0).sqrt())
    }
}

impl fmt::Display for PhaseDampingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(g) => write!(f, "{g}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for PhaseDampingParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(g) => s.serialize_f64(*g),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PhaseDampingParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(g) => PhaseDampingParams::new(g).map_err(serde::de::Error::custom),
            Raw::Text(t) if t == "inf" => Ok(PhaseDampingParams::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "gamma_t must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// `{√((1+e^{-Γt})/2)·I, √((1−e^{-Γt})/2)·σ_z}`
pub fn pd_kraus_single(p: PhaseDampingParams) -> KrausChannel {
    let (a, b) = p.weights();
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real(a),
        pauli_z().scale_real(b),
    ])
    .expect("phase damping is complete")
}

/// Correlated dephasing of a pair: `{√((1+e^{-Γt})/2)·I⊗I, √((1−e^{-Γt})/2)·σ_z⊗σ_z}`.
pub fn pd_kraus_pair_symmetric(p: PhaseDampingParams) -> KrausChannel {
    let (a, b) = p.weights();
    let zz = pauli_z().kron(&pauli_z());
    KrausChannel::new(vec![ComplexMatrix::identity(4).scale_real(a), zz.scale_real(b)])
        .expect("phase damping is complete")
}

/// `diag(e^{iφ₀}, e^{iφ₁})`
pub fn random_phase_unitary(phi0: f64, phi1: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, phi0), Complex64::from_polar(1.0, phi1)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Single,
    SymmetricPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseTarget {
    Qubit(usize),
    Pair([usize; 2]),
}

impl NoiseTarget {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            NoiseTarget::Qubit(q) => vec![*q],
            NoiseTarget::Pair([a, b]) => vec![*a, *b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseAssignment {
    pub target: NoiseTarget,
    pub mode: NoiseMode,
    pub gamma_t: PhaseDampingParams,
}

impl NoiseAssignment {
    pub fn single(qubit: usize, gamma_t: PhaseDampingParams) -> Self {
        Self {
            target: NoiseTarget::Qubit(qubit),
            mode: NoiseMode::Single,
            gamma_t,
        }
    }

    pub fn pair(a: usize, b: usize, gamma_t: PhaseDampingParams) -> Self {
        Self {
            target: NoiseTarget::Pair([a, b]),
            mode: NoiseMode::SymmetricPair,
            gamma_t,
        }
    }

    /// Single mode on a pair target dephases both qubits independently.
    pub fn channel_parts(&self) -> Vec<(KrausChannel, Vec<usize>)> {
        match (self.mode, &self.target) {
            (NoiseMode::SymmetricPair, t) => vec![(pd_kraus_pair_symmetric(self.gamma_t), t.qubits())],
            (NoiseMode::Single, t) => t
                .qubits()
                .into_iter()
                .map(|q| (pd_kraus_single(self.gamma_t), vec![q]))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    pub assignments: Vec<NoiseAssignment>,
}

impl NoiseSchedule {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Checks pair shape, target disjointness and range against `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = Vec::new();
        for a in &self.assignments {
            if let NoiseTarget::Pair([x, y]) = a.target {
                if x == y {
                    return Err(Error::InvalidSchedule(format!(
                        "pair target [{x},{y}] needs two distinct qubits"
                    )));
                }
            } else if a.mode == NoiseMode::SymmetricPair {
                return Err(Error::InvalidSchedule("symmetric_pair mode needs a pair target".into()));
            }
            for q in a.target.qubits() {
                if q >= n_qubits {
                    return Err(Error::IndexOutOfRange { index: q, n_qubits });
                }
                if seen.contains(&q) {
                    return Err(Error::OverlappingTargets(q));
                }
                seen.push(q);
            }
        }
        Ok(())
    }

    pub fn is_full_dephasing(&self) -> bool {
        self.assignments.iter().all(|a| a.gamma_t.is_full())
    }
}

pub fn apply_noise_schedule(rho: &DensityMatrix, s: &NoiseSchedule) -> Result<DensityMatrix> {
    s.validate(rho.n_qubits())?;
    let mut out = rho.clone();
    for a in &s.assignments {
        for (ch, qubits) in a.channel_parts() {
            out = apply_channel(&out, &ch, &qubits)?;
        }
    }
    Ok(out)
}

/// The full-dephasing schedule as an equal-weight mixture of `σ_z` insertions.
///
/// Every assignment contributes the choice `{I, Z}` (or `{I⊗I, Z⊗Z}` for
/// pairs); the result lists all combinations on the whole `n_qubits`
/// register, first assignment varying slowest, each with weight `2^-k`. Two
/// assignments give the four quarter slices.
pub fn quarter_slice_realization(
    s: &NoiseSchedule,
    n_qubits: usize,
) -> Result<Vec<(ComplexMatrix, f64)>> {
    s.validate(n_qubits)?;
    if !s.is_full_dephasing() {
        return Err(Error::InvalidSchedule(
            "slice realization requires gamma_t = inf on every assignment".into(),
        ));
    }
    if s.assignments.is_empty() {
        return Err(Error::InvalidSchedule("slice realization needs at least one assignment".into()));
    }
    // each independent σ_z insertion point
    let mut flips: Vec<Vec<usize>> = Vec::new();
    for a in &s.assignments {
        match a.mode {
            NoiseMode::SymmetricPair => flips.push(a.target.qubits()),
            NoiseMode::Single => flips.extend(a.target.qubits().into_iter().map(|q| vec![q])),
        }
    }
    let k = flips.len();
    let weight = 1.0 / (1usize << k) as f64;
    let dim = 1usize << n_qubits;
    let z_ops: Vec<ComplexMatrix> = flips
        .iter()
        .map(|qs| {
            let local = qs.iter().skip(1).fold(pauli_z(), |acc, _| acc.kron(&pauli_z()));
            embed_operator(&local, qs, n_qubits)
        })
        .collect();
    let mut out = Vec::with_capacity(1 << k);
    for combo in 0..(1usize << k) {
        let mut u = ComplexMatrix::identity(dim);
        for (pos, z) in z_ops.iter().enumerate() {
            if (combo >> (k - 1 - pos)) & 1 == 1 {
                u = &u * z;
            }
        }
        out.push((u, weight));
    }
    Ok(out)
}

/// `Σ w U ρ U†`
pub fn apply_slices(rho: &DensityMatrix, slices: &[(ComplexMatrix, f64)]) -> Result<DensityMatrix> {
    let parts: Vec<(f64, DensityMatrix)> = slices
        .iter()
        .map(|(u, w)| (*w, rho.conjugate_by(u)))
        .collect();
    let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|(w, r)| (*w, r)).collect();
    DensityMatrix::mixture(&refs)
}

/// Schedule for full dephasing of a transfer register: symmetric pairs
/// `(1a,1b)`, `(2a,2b)` for the four-qubit DFS register; independent
/// single-qubit dephasing of the effective qubits otherwise.
pub fn full_pd_schedule(
    kind: crate::resource::ResourceKind,
    effective_qubits: &[usize],
) -> NoiseSchedule {
    use crate::resource::ResourceKind;
    let inf = PhaseDampingParams::Infinite;
    let assignments = match kind {
        ResourceKind::Dfs => effective_qubits
            .iter()
            .map(|&a| NoiseAssignment::pair(a, a + 1, inf))
            .collect(),
        ResourceKind::Standard => effective_qubits
            .iter()
            .map(|&q| NoiseAssignment::single(q, inf))
            .collect(),
    };
    NoiseSchedule { assignments }
}
