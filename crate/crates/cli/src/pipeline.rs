//! Transfer → output tomography → decode → process tomography, for the four
//! probes of one resource configuration.

use std::collections::BTreeMap;

use dfs_oneway::noise::quarter_slice_realization;
use dfs_oneway::protocol::{decode_logical, Policy, Probe, TransferInput, TransferSetup};
use dfs_oneway::qcore::{hadamard, pauli_x, rz, state_fidelity, ComplexMatrix, DensityMatrix, KrausChannel};
use dfs_oneway::resource::ResourceKind;
use dfs_oneway::tomography::{
    kraus_from_chi, mle_state, qpt_chi, settings_overcomplete, simulate_counts_mixture, ChiMatrix,
    MleInit, MleOptions, QptResult, Slicing,
};
use dfs_oneway::Error;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{MeanCount, NoiseArg};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct ProcessRequest {
    pub kind: ResourceKind,
    pub alpha: f64,
    pub noise: NoiseArg,
    pub policy: Policy,
    pub mean_count: MeanCount,
    pub seed: u64,
    pub slicing: Slicing,
    pub white_noise: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub probe: Probe,
    pub dataset_seed: u64,
    pub reference_probability: f64,
    pub kept_probability: f64,
    pub total_counts: f64,
    pub mle_iterations: usize,
    pub mle_converged: bool,
    /// Reconstructed weight outside the code space (DFS only).
    pub leakage: f64,
    /// Fidelity of the reconstructed logical output with the exact one.
    pub fidelity_to_exact: f64,
}

#[derive(Clone, Debug)]
pub struct ProcessEstimate {
    pub probes: Vec<ProbeReport>,
    /// Reconstructed logical outputs, keyed by probe.
    pub outputs: BTreeMap<Probe, DensityMatrix>,
    pub qpt: QptResult,
    pub channel: KrausChannel,
}

/// Stream index of a dataset inside a run seeded by the master seed.
pub fn dataset_stream(kind: ResourceKind, noisy: bool, probe: Probe) -> u64 {
    let k = match kind {
        ResourceKind::Dfs => 0,
        ResourceKind::Standard => 1,
    };
    let p = Probe::ALL.iter().position(|q| *q == probe).expect("probe listed") as u64;
    k * 8 + u64::from(noisy) * 4 + p
}

/// Seed for one dataset, drawn from substream `stream` of the master seed.
pub fn derived_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Logical channel realized by a clean transfer through `B(−α)`.
pub fn ideal_unitary(kind: ResourceKind, alpha: f64) -> ComplexMatrix {
    let u = &hadamard() * &rz(alpha);
    match kind {
        ResourceKind::Standard => u,
        ResourceKind::Dfs => &pauli_x() * &u,
    }
}

pub fn ideal_chi(kind: ResourceKind, alpha: f64) -> CliResult<ChiMatrix> {
    let ch = KrausChannel::unitary(ideal_unitary(kind, alpha))?;
    Ok(ChiMatrix::from_channel(&ch)?)
}

struct Exposures {
    parts: Vec<(f64, DensityMatrix)>,
    reference_probability: f64,
    kept_probability: f64,
}

/// Normalized physical outputs with their exposure weights.
///
/// With quarter slicing each unitary realization of the schedule is run
/// separately and weighted by its share of the kept events.
fn exposures(req: &ProcessRequest, setup: &TransferSetup) -> CliResult<Exposures> {
    let mut rho = setup.resource.to_density();
    if req.white_noise > 0.0 {
        rho = rho.mix_with_white_noise(req.white_noise);
    }
    let schedule = req.noise.resolve(setup)?;
    let slices = match (&schedule, req.slicing) {
        (Some(s), Slicing::QuarterSlices) => Some(
            quarter_slice_realization(s, setup.n_qubits())
                .map_err(|e| CliError::config(format!("quarter slicing: {e}")))?,
        ),
        _ => None,
    };
    match slices {
        None => {
            if let Some(s) = &schedule {
                rho = dfs_oneway::noise::apply_noise_schedule(&rho, s)?;
            }
            let out = setup.execute(&rho, req.policy, None)?;
            Ok(Exposures {
                parts: vec![(1.0, out.physical_output)],
                reference_probability: out.reference_probability,
                kept_probability: out.kept_probability,
            })
        }
        Some(slices) => {
            let mut parts = Vec::new();
            let (mut reference, mut kept) = (0.0, 0.0);
            for (u, w) in &slices {
                match setup.execute(&rho.conjugate_by(u), req.policy, None) {
                    Ok(out) => {
                        reference += w * out.reference_probability;
                        kept += w * out.kept_probability;
                        parts.push((w * out.kept_probability, out.physical_output));
                    }
                    Err(Error::VanishingProbability(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
            if kept <= 0.0 {
                return Err(CliError::Numerical(Error::VanishingProbability(kept)));
            }
            for p in &mut parts {
                p.0 /= kept;
            }
            Ok(Exposures {
                parts,
                reference_probability: reference,
                kept_probability: kept,
            })
        }
    }
}

fn logical(kind: ResourceKind, physical: &DensityMatrix) -> CliResult<(DensityMatrix, f64)> {
    Ok(match kind {
        ResourceKind::Standard => (physical.clone(), 0.0),
        ResourceKind::Dfs => decode_logical(physical)?,
    })
}

/// MLE options used by the pipeline: exact data starts from linear
/// inversion, which is already the answer up to rounding.
pub fn mle_options(exact: bool) -> MleOptions {
    MleOptions {
        init: if exact { MleInit::LinearInversion } else { MleInit::MaximallyMixed },
        ..MleOptions::default()
    }
}

pub fn estimate_process(req: &ProcessRequest) -> CliResult<ProcessEstimate> {
    let noisy = req.noise != NoiseArg::None;
    let mut probes = Vec::new();
    let mut outputs = BTreeMap::new();
    for probe in Probe::ALL {
        let setup = TransferSetup::new(req.kind, TransferInput::Probe(probe), req.alpha)?;
        let Exposures {
            parts,
            reference_probability,
            kept_probability,
        } = exposures(req, &setup)?;
        let n_out = parts[0].1.n_qubits();
        let settings = settings_overcomplete(n_out)?;
        let seed = derived_seed(req.seed, dataset_stream(req.kind, noisy, probe));
        let data = simulate_counts_mixture(&parts, &settings, req.mean_count.0, seed, req.slicing)?;
        let mle = mle_state(&data, &mle_options(req.mean_count.is_exact()))?;
        let (rec, leakage) = logical(req.kind, &mle.state)?;

        let refs: Vec<(f64, &DensityMatrix)> = parts.iter().map(|(w, r)| (*w, r)).collect();
        let exact_physical = DensityMatrix::mixture(&refs)?;
        let (exact_logical, _) = logical(req.kind, &exact_physical)?;

        probes.push(ProbeReport {
            probe,
            dataset_seed: seed,
            reference_probability,
            kept_probability,
            total_counts: data.total_counts(),
            mle_iterations: mle.diagnostics.iterations,
            mle_converged: mle.diagnostics.converged,
            leakage,
            fidelity_to_exact: state_fidelity(&rec, &exact_logical)?,
        });
        outputs.insert(probe, rec);
    }
    let qpt = qpt_chi(&outputs)?;
    let channel = kraus_from_chi(&qpt.chi)?;
    Ok(ProcessEstimate {
        probes,
        outputs,
        qpt,
        channel,
    })
}
