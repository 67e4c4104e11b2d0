//! One-way information transfer across a two-site cluster.
//!
//! A logical qubit on the first site is moved to the second by measuring the
//! first site. For a standard cluster that is qubit `1`; for the DFS cluster
//! it is the pair `(1a, 1b)`, where `1b` in `B(0)` strips the redundancy of
//! the encoding and `1a` carries the rotation angle.
//!
//! Measuring in `B(θ) = {(|0⟩ ± e^{iθ}|1⟩)/√2}` applies `H R_z(−θ)` with
//! `R_z(α) = exp(−iασ_z/2)`, so a transfer that realizes `H R_z(α)` measures
//! `1a` in `B(−α)`. At `α = 0` (every probe pattern) the two coincide.
//!
//! Probe inputs `{|0⟩, |1⟩, |+⟩, |L⟩}` are written by measurement patterns on
//! the four-qubit resources: the DFS cluster for `dfs`, and the linear cluster
//! (projected onto the two-qubit standard cluster on `1a, 2b`) for `standard`.
//! Direct inputs `μ|0⟩ + ν|1⟩` are prepared in the resource itself.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{apply_noise_schedule, full_pd_schedule, NoiseSchedule};
use crate::qcore::matrix::{c, ZERO};
use crate::qcore::{
    pauli_x, pauli_y, pauli_z, rz, state_fidelity, ComplexMatrix, DensityMatrix, Label, PureState,
    StateJson,
};
use crate::resource::{
    build_dfs_cluster, build_standard_cluster, code_words, linear_cluster, project_out, ResourceKind,
};

/// Branches below this probability are reported with no post-measurement state.
pub const NULL_BRANCH: f64 = 1e-15;
/// Minimum probability for a branch that has to be renormalized.
pub const MIN_REFERENCE_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalQubit {
    pub mu: Complex64,
    pub nu: Complex64,
}

impl LogicalQubit {
    pub fn new(mu: Complex64, nu: Complex64) -> Result<Self> {
        let norm = mu.norm_sqr() + nu.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { mu, nu })
    }

    pub fn normalized(mu: Complex64, nu: Complex64) -> Result<Self> {
        let norm = (mu.norm_sqr() + nu.norm_sqr()).sqrt();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(mu / norm, nu / norm)
    }

    pub fn from_state(state: &PureState) -> Result<Self> {
        if state.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: state.n_qubits(),
            });
        }
        Self::new(state.amplitude(0), state.amplitude(1))
    }

    pub fn ket(&self) -> Result<PureState> {
        PureState::new(vec![self.mu, self.nu])
    }

    pub fn density(&self) -> DensityMatrix {
        self.ket().expect("validated on construction").to_density()
    }
}

/// Logical probe inputs used for process tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Probe {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "L")]
    L,
}

impl Probe {
    pub const ALL: [Probe; 4] = [Probe::Zero, Probe::One, Probe::Plus, Probe::L];

    pub fn label(&self) -> Label {
        match self {
            Probe::Zero => Label::Zero,
            Probe::One => Label::One,
            Probe::Plus => Label::Plus,
            Probe::L => Label::L,
        }
    }

    pub fn logical(&self) -> LogicalQubit {
        let k = self.label().ket();
        LogicalQubit { mu: k[0], nu: k[1] }
    }

    pub fn as_str(&self) -> &'static str {
        self.label().as_str()
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Probe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Probe::Zero),
            "1" => Ok(Probe::One),
            "+" => Ok(Probe::Plus),
            "L" => Ok(Probe::L),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasurementBasis {
    Computational,
    /// `B(α)`: `|α_±⟩ = (|0⟩ ± e^{iα}|1⟩)/√2`
    Equatorial { alpha: f64 },
}

/// Single-qubit projective measurement, optionally preceded by `R_z(θ)` on the
/// measured qubit (a wave plate placed in front of the analyzer).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub qubit: usize,
    pub basis: MeasurementBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_rotation: Option<f64>,
}

impl MeasurementSetting {
    pub fn computational(qubit: usize) -> Self {
        Self {
            qubit,
            basis: MeasurementBasis::Computational,
            pre_rotation: None,
        }
    }

    pub fn equatorial(qubit: usize, alpha: f64) -> Self {
        Self {
            qubit,
            basis: MeasurementBasis::Equatorial { alpha },
            pre_rotation: None,
        }
    }

    /// Ket of outcome `bit` in the bare basis (0 ↔ `|0⟩` or `|α_+⟩`).
    fn basis_ket(&self, bit: u8) -> [Complex64; 2] {
        match self.basis {
            MeasurementBasis::Computational => {
                if bit == 0 {
                    [c(1.0, 0.0), ZERO]
                } else {
                    [ZERO, c(1.0, 0.0)]
                }
            }
            MeasurementBasis::Equatorial { alpha } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                [c(h, 0.0), Complex64::from_polar(sign * h, alpha)]
            }
        }
    }

    /// Ket whose projector is measured once the pre-rotation is folded in:
    /// `R_z(θ)†|b⟩`.
    pub fn effective_ket(&self, bit: u8) -> [Complex64; 2] {
        let k = self.basis_ket(bit);
        match self.pre_rotation {
            None => k,
            Some(theta) => {
                let r = rz(theta).adjoint();
                let v = r.mul_vec(&k);
                [v[0], v[1]]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match self.basis {
            MeasurementBasis::Computational => true,
            MeasurementBasis::Equatorial { alpha } => alpha.is_finite(),
        } && self.pre_rotation.is_none_or(f64::is_finite);
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidSchedule("measurement angle must be finite".into()))
        }
    }
}

/// Projectors for outcomes 0 and 1 (`|α_+⟩`, `|α_−⟩` or `|0⟩`, `|1⟩`).
pub fn basis_projectors(s: &MeasurementSetting) -> (ComplexMatrix, ComplexMatrix) {
    let p = |bit| {
        let k = s.effective_ket(bit);
        ComplexMatrix::outer(&k, &k)
    };
    (p(0), p(1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcome {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Normalized state of the unmeasured qubits; `None` for null branches
    /// or when nothing is left unmeasured.
    pub post_state: Option<DensityMatrix>,
}

/// Born-rule branches of one measurement, outcome 0 first.
pub fn measure(rho: &DensityMatrix, s: &MeasurementSetting) -> Result<Vec<BranchOutcome>> {
    s.validate()?;
    if s.qubit >= rho.n_qubits() {
        return Err(Error::IndexOutOfRange {
            index: s.qubit,
            n_qubits: rho.n_qubits(),
        });
    }
    (0..2u8)
        .map(|bit| {
            let ket = s.effective_ket(bit);
            if rho.n_qubits() == 1 {
                return Ok(BranchOutcome {
                    outcomes: vec![bit],
                    probability: rho.overlap(&ket).max(0.0),
                    post_state: None,
                });
            }
            let (reduced, prob) = project_out(rho, &[(s.qubit, ket)])?;
            let post_state = if prob > NULL_BRANCH {
                Some(DensityMatrix::from_unnormalized(reduced)?)
            } else {
                None
            };
            Ok(BranchOutcome {
                outcomes: vec![bit],
                probability: prob,
                post_state,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum StepRole {
    /// Fixed outcome that prepares the input; always postselected.
    Encode { outcome: u8 },
    /// Transfer measurement; outcome 0 is the reference branch and the
    /// others are handled by byproduct corrections.
    Process,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternStep {
    pub setting: MeasurementSetting,
    #[serde(flatten)]
    pub role: StepRole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePattern {
    pub kind: ResourceKind,
    pub probe: Probe,
    pub steps: Vec<PatternStep>,
}

const Q1A: usize = 0;
const Q1B: usize = 1;
const Q2A: usize = 2;

/// Measurement pattern writing `probe` onto the first site of a four-qubit
/// resource and transferring it with `α = 0`.
pub fn encode_probe(kind: ResourceKind, probe: Probe) -> ProbePattern {
    let process_1a = |pre_rotation| PatternStep {
        setting: MeasurementSetting {
            qubit: Q1A,
            basis: MeasurementBasis::Equatorial { alpha: 0.0 },
            pre_rotation,
        },
        role: StepRole::Process,
    };
    let encode = |setting, outcome| PatternStep {
        setting,
        role: StepRole::Encode { outcome },
    };
    let quarter_wave = Some(std::f64::consts::FRAC_PI_2);
    let steps = match (kind, probe) {
        (ResourceKind::Dfs, Probe::Zero) => vec![
            encode(MeasurementSetting::computational(Q1B), 1),
            process_1a(None),
        ],
        (ResourceKind::Dfs, Probe::One) => vec![
            encode(MeasurementSetting::computational(Q1B), 0),
            process_1a(None),
        ],
        (ResourceKind::Dfs, Probe::Plus | Probe::L) => vec![
            process_1a(if probe == Probe::L { quarter_wave } else { None }),
            PatternStep {
                setting: MeasurementSetting::equatorial(Q1B, 0.0),
                role: StepRole::Process,
            },
        ],
        (ResourceKind::Standard, _) => {
            let first = match probe {
                Probe::Zero => encode(MeasurementSetting::computational(Q1B), 0),
                Probe::One => encode(MeasurementSetting::computational(Q1B), 1),
                Probe::Plus | Probe::L => encode(MeasurementSetting::equatorial(Q1B, 0.0), 0),
            };
            vec![
                process_1a(if probe == Probe::L { quarter_wave } else { None }),
                first,
                encode(MeasurementSetting::equatorial(Q2A, 0.0), 0),
            ]
        }
    };
    ProbePattern { kind, probe, steps }
}

impl ProbePattern {
    /// Same pattern with the `1a` transfer measurement set to realize `H R_z(α)`.
    pub fn with_rotation(mut self, alpha: f64) -> Self {
        for step in &mut self.steps {
            if step.setting.qubit == Q1A && step.role == StepRole::Process {
                step.setting.basis = MeasurementBasis::Equatorial { alpha: -alpha };
            }
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    PostselectReference,
    FeedforwardAverage,
}

impl FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "postselect" | "postselect_reference" => Ok(Policy::PostselectReference),
            "feedforward" | "feedforward_average" => Ok(Policy::FeedforwardAverage),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LogicalPauli {
    I,
    X,
    Y,
    Z,
}

impl LogicalPauli {
    pub const ALL: [LogicalPauli; 4] = [LogicalPauli::I, LogicalPauli::X, LogicalPauli::Y, LogicalPauli::Z];

    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            LogicalPauli::I => ComplexMatrix::identity(2),
            LogicalPauli::X => pauli_x(),
            LogicalPauli::Y => pauli_y(),
            LogicalPauli::Z => pauli_z(),
        }
    }

    /// Physical operator realizing this logical Pauli on the output site.
    ///
    /// On the dual-rail pair `X_L ∝ σ_x⊗σ_x`, `Z_L = σ_z⊗I`, `Y_L ∝ σ_y⊗σ_x`.
    pub fn physical(&self, kind: ResourceKind) -> ComplexMatrix {
        match kind {
            ResourceKind::Standard => self.matrix(),
            ResourceKind::Dfs => match self {
                LogicalPauli::I => ComplexMatrix::identity(4),
                LogicalPauli::X => pauli_x().kron(&pauli_x()),
                LogicalPauli::Y => pauli_y().kron(&pauli_x()),
                LogicalPauli::Z => pauli_z().kron(&ComplexMatrix::identity(2)),
            },
        }
    }
}

/// Outcome-dependent corrections, keyed by the outcome bits of the
/// transfer measurements (`1a`, then `1b` for DFS).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ByproductTable {
    pub kind: ResourceKind,
    pub alpha: f64,
    pub entries: BTreeMap<String, LogicalPauli>,
}

fn outcome_key(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

impl ByproductTable {
    pub fn correction(&self, bits: &[u8]) -> Option<LogicalPauli> {
        self.entries.get(&outcome_key(bits)).copied()
    }
}

/// Inputs to a transfer run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransferInput {
    Probe(Probe),
    Direct(LogicalQubit),
}

/// Everything needed to run one transfer: the prepared resource, the
/// measurement steps and the bookkeeping for outputs and corrections.
#[derive(Clone, Debug)]
pub struct TransferSetup {
    pub kind: ResourceKind,
    pub input: TransferInput,
    pub alpha: f64,
    pub resource: PureState,
    pub steps: Vec<PatternStep>,
    pub output_qubits: Vec<usize>,
    /// `a` qubit of each effective site (the noise targets).
    pub effective_qubits: Vec<usize>,
}

/// Qubits whose outcomes index the byproduct table.
fn table_qubits(kind: ResourceKind) -> &'static [usize] {
    match kind {
        ResourceKind::Standard => &[Q1A],
        ResourceKind::Dfs => &[Q1A, Q1B],
    }
}

impl TransferSetup {
    pub fn new(kind: ResourceKind, input: TransferInput, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidSchedule("alpha must be finite".into()));
        }
        let setup = match (kind, input) {
            (ResourceKind::Dfs, TransferInput::Probe(p)) => Self {
                kind,
                input,
                alpha,
                resource: build_dfs_cluster(2, None)?,
                steps: encode_probe(kind, p).with_rotation(alpha).steps,
                output_qubits: vec![2, 3],
                effective_qubits: vec![0, 2],
            },
            (ResourceKind::Standard, TransferInput::Probe(p)) => Self {
                kind,
                input,
                alpha,
                resource: linear_cluster(),
                steps: encode_probe(kind, p).with_rotation(alpha).steps,
                output_qubits: vec![3],
                effective_qubits: vec![0, 3],
            },
            (ResourceKind::Dfs, TransferInput::Direct(q)) => Self {
                kind,
                input,
                alpha,
                resource: build_dfs_cluster(2, Some(&q))?,
                steps: vec![
                    PatternStep {
                        setting: MeasurementSetting::equatorial(Q1A, -alpha),
                        role: StepRole::Process,
                    },
                    PatternStep {
                        setting: MeasurementSetting::equatorial(Q1B, 0.0),
                        role: StepRole::Process,
                    },
                ],
                output_qubits: vec![2, 3],
                effective_qubits: vec![0, 2],
            },
            (ResourceKind::Standard, TransferInput::Direct(q)) => Self {
                kind,
                input,
                alpha,
                resource: build_standard_cluster(2, Some(&q))?,
                steps: vec![PatternStep {
                    setting: MeasurementSetting::equatorial(Q1A, -alpha),
                    role: StepRole::Process,
                }],
                output_qubits: vec![1],
                effective_qubits: vec![0, 1],
            },
        };
        Ok(setup)
    }

    pub fn n_qubits(&self) -> usize {
        self.resource.n_qubits()
    }

    pub fn full_pd_schedule(&self) -> NoiseSchedule {
        full_pd_schedule(self.kind, &self.effective_qubits)
    }

    fn process_steps(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == StepRole::Process)
            .map(|(k, _)| k)
            .collect()
    }

    /// Every branch over the transfer measurements, encode outcomes fixed.
    pub fn branches(&self, rho: &DensityMatrix) -> Result<Vec<Branch>> {
        let process = self.process_steps();
        let keyed = table_qubits(self.kind);
        let mut out = Vec::with_capacity(1 << process.len());
        for combo in 0..(1usize << process.len()) {
            let mut bits = vec![0u8; self.steps.len()];
            for (pos, &k) in process.iter().enumerate() {
                bits[k] = ((combo >> (process.len() - 1 - pos)) & 1) as u8;
            }
            let projections: Vec<(usize, [Complex64; 2])> = self
                .steps
                .iter()
                .zip(&bits)
                .map(|(step, &bit)| {
                    let outcome = match step.role {
                        StepRole::Encode { outcome } => outcome,
                        StepRole::Process => bit,
                    };
                    (step.setting.qubit, step.setting.effective_ket(outcome))
                })
                .collect();
            let (reduced, prob) = project_out(rho, &projections)?;
            let key: Vec<u8> = keyed
                .iter()
                .map(|q| {
                    self.steps
                        .iter()
                        .zip(&bits)
                        .find(|(s, _)| s.setting.qubit == *q && s.role == StepRole::Process)
                        .map_or(0, |(_, b)| *b)
                })
                .collect();
            out.push(Branch {
                key,
                probability: prob,
                output: reduced,
            });
        }
        Ok(out)
    }

    /// Runs the measurements on a prepared (possibly noisy) resource state.
    pub fn execute(
        &self,
        rho: &DensityMatrix,
        policy: Policy,
        table: Option<&ByproductTable>,
    ) -> Result<TransferOutcome> {
        for step in &self.steps {
            step.setting.validate()?;
        }
        let branches = self.branches(rho)?;
        let reference_probability = branches
            .iter()
            .find(|b| b.is_reference())
            .map_or(0.0, |b| b.probability);
        let (output, kept) = match policy {
            Policy::PostselectReference => {
                if reference_probability < MIN_REFERENCE_PROBABILITY {
                    return Err(Error::VanishingProbability(reference_probability));
                }
                let b = branches
                    .into_iter()
                    .find(Branch::is_reference)
                    .expect("reference branch enumerated");
                (b.output, b.probability)
            }
            Policy::FeedforwardAverage => {
                let owned;
                let table = match table {
                    Some(t) => t,
                    None => {
                        owned = derive_byproduct_table(self.kind, self.alpha)?;
                        &owned
                    }
                };
                let dim = 1 << self.output_qubits.len();
                let mut acc = ComplexMatrix::zeros(dim, dim);
                let mut total = 0.0;
                for b in branches {
                    let pauli = table.correction(&b.key).ok_or_else(|| Error::ByproductNotFound {
                        branch: b.key.clone(),
                        best: 0.0,
                    })?;
                    let u = pauli.physical(self.kind);
                    acc = &acc + &b.output.conjugate_by(&u);
                    total += b.probability;
                }
                if total < MIN_REFERENCE_PROBABILITY {
                    return Err(Error::VanishingProbability(total));
                }
                (acc, total)
            }
        };
        let physical_output = DensityMatrix::from_unnormalized(output)?;
        let (logical_output, leakage) = match self.kind {
            ResourceKind::Standard => (physical_output.clone(), 0.0),
            ResourceKind::Dfs => decode_logical(&physical_output)?,
        };
        Ok(TransferOutcome {
            physical_output,
            logical_output,
            leakage,
            reference_probability,
            kept_probability: kept,
        })
    }
}

/// One combination of transfer-measurement outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Outcome bits in byproduct-table order (`1a`, then `1b` for DFS).
    pub key: Vec<u8>,
    pub probability: f64,
    /// Unnormalized operator on the output qubits; its trace is `probability`.
    pub output: ComplexMatrix,
}

impl Branch {
    pub fn is_reference(&self) -> bool {
        self.key.iter().all(|b| *b == 0)
    }

    /// Normalized logical output (decoded for DFS).
    pub fn logical_output(&self, kind: ResourceKind) -> Result<DensityMatrix> {
        let phys = DensityMatrix::from_unnormalized(self.output.clone())?;
        match kind {
            ResourceKind::Standard => Ok(phys),
            ResourceKind::Dfs => Ok(decode_logical(&phys)?.0),
        }
    }

    /// Logical output after the table's correction for this branch.
    pub fn corrected_logical(&self, kind: ResourceKind, table: &ByproductTable) -> Result<DensityMatrix> {
        let pauli = table.correction(&self.key).ok_or_else(|| Error::ByproductNotFound {
            branch: self.key.clone(),
            best: 0.0,
        })?;
        Ok(self.logical_output(kind)?.conjugate_by(&pauli.matrix()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferOutcome {
    pub physical_output: DensityMatrix,
    pub logical_output: DensityMatrix,
    pub leakage: f64,
    pub reference_probability: f64,
    /// Probability of all branches contributing to the output.
    pub kept_probability: f64,
}

/// Builds the resource, applies `noise`, measures, and returns the output of
/// the second site.
pub fn run_transfer(
    kind: ResourceKind,
    input: TransferInput,
    alpha: f64,
    noise: Option<&NoiseSchedule>,
    policy: Policy,
) -> Result<TransferOutcome> {
    let setup = TransferSetup::new(kind, input, alpha)?;
    let mut rho = setup.resource.to_density();
    if let Some(schedule) = noise {
        rho = apply_noise_schedule(&rho, schedule)?;
    }
    setup.execute(&rho, policy, None)
}

/// Logical state of a dual-rail pair: `ρ_L[a][b] = ⟨a_E|ρ|b_E⟩`, renormalized,
/// together with the weight outside `span{|01⟩, |10⟩}`.
pub fn decode_logical(rho_pair: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    if rho_pair.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_pair.n_qubits(),
        });
    }
    let words = code_words();
    let mut m = ComplexMatrix::zeros(2, 2);
    for (a, wa) in words.iter().enumerate() {
        for (b, wb) in words.iter().enumerate() {
            let rb = rho_pair.matrix().mul_vec(wb);
            let v: Complex64 = wa.iter().zip(&rb).map(|(x, y)| x.conj() * y).sum();
            m.set(a, b, v);
        }
    }
    let weight = m.trace().re;
    if weight < 1e-12 {
        return Err(Error::NoCodeSpaceSupport(weight));
    }
    let leakage = (1.0 - weight).max(0.0);
    Ok((DensityMatrix::from_unnormalized(m)?, leakage))
}

/// Probe set and one generic state; agreement on all of them pins a Pauli.
fn table_test_inputs() -> Vec<LogicalQubit> {
    let mut inputs: Vec<LogicalQubit> = Probe::ALL.iter().map(Probe::logical).collect();
    inputs.push(LogicalQubit::normalized(c(0.6, 0.0), c(0.48, 0.64)).expect("nonzero"));
    inputs
}

/// Finds, for every transfer outcome, the Pauli that maps the branch output
/// onto the reference-branch output, by brute force over `{I, X, Y, Z}`.
pub fn derive_byproduct_table(kind: ResourceKind, alpha: f64) -> Result<ByproductTable> {
    let inputs = table_test_inputs();
    // per input: branch key → normalized logical output
    let mut per_input: Vec<BTreeMap<Vec<u8>, DensityMatrix>> = Vec::new();
    for q in &inputs {
        let setup = TransferSetup::new(kind, TransferInput::Direct(*q), alpha)?;
        let rho = setup.resource.to_density();
        let mut outputs = BTreeMap::new();
        for b in setup.branches(&rho)? {
            if b.probability < MIN_REFERENCE_PROBABILITY {
                continue;
            }
            outputs.insert(b.key.clone(), b.logical_output(kind)?);
        }
        per_input.push(outputs);
    }
    let keys: Vec<Vec<u8>> = per_input[0].keys().cloned().collect();
    let reference_key = vec![0u8; table_qubits(kind).len()];
    let mut entries = BTreeMap::new();
    for key in keys {
        let mut best = (LogicalPauli::I, f64::NEG_INFINITY);
        for pauli in LogicalPauli::ALL {
            let u = pauli.matrix();
            let mut worst = f64::INFINITY;
            for outputs in &per_input {
                let (Some(branch), Some(reference)) = (outputs.get(&key), outputs.get(&reference_key))
                else {
                    continue;
                };
                let corrected = branch.conjugate_by(&u);
                worst = worst.min(state_fidelity(&corrected, reference)?);
            }
            if worst > best.1 {
                best = (pauli, worst);
            }
        }
        if best.1 < 1.0 - 1e-8 {
            return Err(Error::ByproductNotFound {
                branch: key,
                best: best.1,
            });
        }
        entries.insert(outcome_key(&key), best.0);
    }
    Ok(ByproductTable {
        kind,
        alpha,
        entries,
    })
}

/// Wire form of a transfer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRunJson {
    pub kind: ResourceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<Probe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<LogicalInputJson>,
    pub alpha: f64,
    pub policy: Policy,
    pub physical_output: StateJson,
    pub logical_output: StateJson,
    pub leakage: f64,
    pub reference_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalInputJson {
    pub mu: [f64; 2],
    pub nu: [f64; 2],
}

impl TransferRunJson {
    pub fn new(
        kind: ResourceKind,
        input: TransferInput,
        alpha: f64,
        policy: Policy,
        outcome: &TransferOutcome,
    ) -> Self {
        let (probe, direct) = match input {
            TransferInput::Probe(p) => (Some(p), None),
            TransferInput::Direct(q) => (
                None,
                Some(LogicalInputJson {
                    mu: [q.mu.re, q.mu.im],
                    nu: [q.nu.re, q.nu.im],
                }),
            ),
        };
        Self {
            kind,
            probe,
            input: direct,
            alpha,
            policy,
            physical_output: StateJson::from(&outcome.physical_output),
            logical_output: StateJson::from(&outcome.logical_output),
            leakage: outcome.leakage,
            reference_probability: outcome.reference_probability,
        }
    }
}
