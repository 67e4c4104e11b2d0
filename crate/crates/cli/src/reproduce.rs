//! End-to-end comparison of the standard and DFS transfers, clean and under
//! full phase damping.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use dfs_oneway::protocol::{Policy, Probe};
use dfs_oneway::qcore::{state_fidelity, DensityMatrix};
use dfs_oneway::resource::ResourceKind;
use dfs_oneway::tomography::{average_state_fidelity, ChiJson};
use serde::Serialize;

use crate::commands::{bloch_csv, FidelityPair, TOOL, VERSION};
use crate::config::{check_finite, check_white_noise, MeanCount, NoiseArg, SlicingArg};
use crate::error::{CliError, CliResult};
use crate::output::{to_json_bytes, write_atomic};
use crate::pipeline::{derived_seed, estimate_process, ideal_chi, ProbeReport, ProcessEstimate, ProcessRequest};

pub const SUMMARY_FILE: &str = "summary.json";
/// Substream of the master seed reserved for Haar sampling.
const HAAR_STREAM: u64 = 100;
const BLOCH_STREAM: u64 = 101;

#[derive(Args, Clone, Debug, Serialize)]
pub struct ReproduceArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "1000")]
    pub mean_count: MeanCount,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "exact")]
    pub slicing: SlicingArg,
    #[arg(long, default_value = "postselect")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub white_noise: f64,
    /// Haar samples for the average state fidelity.
    #[arg(long, default_value_t = 1000)]
    pub haar_samples: usize,
    /// Input points per Bloch CSV.
    #[arg(long, default_value_t = 200)]
    pub bloch_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub kind: ResourceKind,
    pub noise: String,
    pub chi: ChiJson,
    pub cp_flag: bool,
    pub clamp_change: f64,
    pub fidelity_to_ideal: FidelityPair,
    pub bloch_csv: String,
    pub probes: Vec<ProbeReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub kind: ResourceKind,
    /// Noisy against clean reconstructed process.
    pub process_fidelity: FidelityPair,
    pub average_state_fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedCollapse {
    pub per_probe: BTreeMap<Probe, f64>,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ReproduceArgs,
    pub haar_seed: u64,
    pub bloch_seed: u64,
    pub runs: Vec<RunSummary>,
    pub comparisons: Vec<Comparison>,
    /// Fidelity of the noisy standard outputs with I/2.
    pub standard_noisy_vs_mixed: MixedCollapse,
}

impl Summary {
    pub fn comparison(&self, kind: ResourceKind) -> &Comparison {
        self.comparisons.iter().find(|c| c.kind == kind).expect("both kinds compared")
    }
}

fn noise_label(noise: &NoiseArg) -> &'static str {
    match noise {
        NoiseArg::None => "none",
        _ => "full_pd",
    }
}

fn csv_name(kind: ResourceKind, noise: &NoiseArg) -> String {
    format!("bloch_{kind}_{}.csv", noise_label(noise))
}

/// Runs the comparison and writes the Bloch CSVs and `summary.json` into `args.out`.
pub fn reproduce(args: &ReproduceArgs) -> CliResult<Summary> {
    check_finite("--alpha", args.alpha)?;
    check_white_noise(args.white_noise)?;
    if args.haar_samples == 0 || args.bloch_samples == 0 {
        return Err(CliError::config("sample counts must be positive"));
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let haar_seed = derived_seed(args.seed, HAAR_STREAM);
    let bloch_seed = derived_seed(args.seed, BLOCH_STREAM);

    let mut runs = Vec::new();
    let mut estimates: BTreeMap<(u8, bool), ProcessEstimate> = BTreeMap::new();
    let kinds = [ResourceKind::Dfs, ResourceKind::Standard];
    for (ki, kind) in kinds.into_iter().enumerate() {
        let ideal = ideal_chi(kind, args.alpha)?;
        for noise in [NoiseArg::None, NoiseArg::FullPd] {
            let req = ProcessRequest {
                kind,
                alpha: args.alpha,
                noise: noise.clone(),
                policy: args.policy,
                mean_count: args.mean_count,
                seed: args.seed,
                slicing: args.slicing.0,
                white_noise: args.white_noise,
            };
            let est = estimate_process(&req)?;
            let name = csv_name(kind, &noise);
            let csv = bloch_csv(&est.channel, args.bloch_samples, bloch_seed)?;
            write_atomic(&args.out.join(&name), csv.as_bytes())?;
            runs.push(RunSummary {
                kind,
                noise: noise_label(&noise).to_string(),
                chi: ChiJson::from(&est.qpt.chi),
                cp_flag: est.qpt.cp_flag,
                clamp_change: est.qpt.clamp_change,
                fidelity_to_ideal: FidelityPair::between(&est.qpt.chi, &ideal)?,
                bloch_csv: name,
                probes: est.probes.clone(),
            });
            estimates.insert((ki as u8, noise != NoiseArg::None), est);
        }
    }

    let mut comparisons = Vec::new();
    for (ki, kind) in kinds.into_iter().enumerate() {
        let clean = &estimates[&(ki as u8, false)];
        let noisy = &estimates[&(ki as u8, true)];
        comparisons.push(Comparison {
            kind,
            process_fidelity: FidelityPair::between(&noisy.qpt.chi, &clean.qpt.chi)?,
            average_state_fidelity: average_state_fidelity(
                &clean.channel,
                &noisy.channel,
                args.haar_samples,
                haar_seed,
            )?,
        });
    }

    let mixed = DensityMatrix::maximally_mixed(1);
    let std_noisy = &estimates[&(1, true)];
    let mut per_probe = BTreeMap::new();
    for (probe, rho) in &std_noisy.outputs {
        per_probe.insert(*probe, state_fidelity(rho, &mixed)?);
    }
    let mean = per_probe.values().sum::<f64>() / per_probe.len() as f64;

    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "reproduce",
        config: args.clone(),
        haar_seed,
        bloch_seed,
        runs,
        comparisons,
        standard_noisy_vs_mixed: MixedCollapse { per_probe, mean },
    };
    write_atomic(&summary_path(&args.out), &to_json_bytes(&summary)?)?;
    Ok(summary)
}

pub fn summary_path(dir: &Path) -> PathBuf {
    dir.join(SUMMARY_FILE)
}

pub fn cmd_reproduce(args: &ReproduceArgs) -> CliResult<()> {
    let s = reproduce(args)?;
    for c in &s.comparisons {
        println!(
            "{:<8} noisy vs clean: process fidelity {:.6} (sqrt) {:.6} (squared), average state fidelity {:.6}",
            c.kind.to_string(),
            c.process_fidelity.sqrt,
            c.process_fidelity.squared,
            c.average_state_fidelity
        );
    }
    println!("standard noisy outputs vs I/2: mean fidelity {:.6}", s.standard_noisy_vs_mixed.mean);
    println!("wrote {}", summary_path(&args.out).display());
    Ok(())
}
