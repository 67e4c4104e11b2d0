//! One pipeline stage per command. Every JSON output carries the command's
//! full argument set under `config`.

use std::path::PathBuf;

use clap::Args;
use dfs_oneway::protocol::{LogicalQubit, Policy, Probe, TransferInput, TransferRunJson, TransferSetup};
use dfs_oneway::qcore::{state_fidelity, ChannelJson, KrausChannel, StateJson};
use dfs_oneway::resource::{ResourceKind, ResourceSpec};
use dfs_oneway::tomography::{
    bloch_csv_string, bloch_deformation, mle_state, process_fidelity, settings_overcomplete, simulate_counts,
    ChiJson, FidelityConvention,
};
use serde::Serialize;

use crate::config::{
    check_finite, check_white_noise, load_channel, load_chi, load_dataset, load_state, logical_input, ComplexArg,
    MeanCount, NoiseArg, SlicingArg,
};
use crate::error::{CliError, CliResult};
use crate::output::{emit, emit_json, to_json_bytes};
use crate::pipeline::{estimate_process, mle_options, ProbeReport, ProcessRequest};

pub const TOOL: &str = "dfs-oneway";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, B: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    #[serde(flatten)]
    body: B,
}

fn envelope<'a, C: Serialize, B: Serialize>(command: &'a str, config: &'a C, body: B) -> Envelope<'a, C, B> {
    Envelope {
        tool: TOOL,
        version: VERSION,
        command,
        config,
        body,
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct BuildArgs {
    #[arg(long, default_value = "dfs")]
    pub kind: ResourceKind,
    /// Effective cluster sites.
    #[arg(long, default_value_t = 2)]
    pub sites: usize,
    /// Input amplitude μ of the first site (`re` or `re,im`); needs --nu.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<ComplexArg>,
    /// Mix the resource with p·I/d.
    #[arg(long, default_value_t = 0.0)]
    pub white_noise: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BuildBody {
    physical_qubits: usize,
    state: StateJson,
}

pub fn cmd_build(args: &BuildArgs) -> CliResult<()> {
    check_white_noise(args.white_noise)?;
    let spec = match args.kind {
        ResourceKind::Standard => ResourceSpec::standard(args.sites)?,
        ResourceKind::Dfs => ResourceSpec::dfs(args.sites)?,
    };
    let input = logical_input(args.mu, args.nu)?;
    let pure = spec.build(input.as_ref())?;
    let state = if args.white_noise > 0.0 {
        StateJson::from(&pure.to_density().mix_with_white_noise(args.white_noise))
    } else {
        StateJson::from(&pure)
    };
    let body = BuildBody {
        physical_qubits: spec.physical_qubits(),
        state,
    };
    emit_json(args.out.as_deref(), &envelope("build", args, body))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value = "dfs")]
    pub kind: ResourceKind,
    /// Probe input; alternatively give --mu/--nu.
    #[arg(long)]
    pub probe: Option<Probe>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<ComplexArg>,
    /// Rotation angle in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "none")]
    pub noise: NoiseArg,
    #[arg(long, default_value = "postselect")]
    pub policy: Policy,
    #[arg(long, default_value_t = 0.0)]
    pub white_noise: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunBody {
    noise_schedule: Option<dfs_oneway::noise::NoiseSchedule>,
    kept_probability: f64,
    result: TransferRunJson,
}

fn transfer_input(probe: Option<Probe>, direct: Option<LogicalQubit>) -> CliResult<TransferInput> {
    match (probe, direct) {
        (Some(p), None) => Ok(TransferInput::Probe(p)),
        (None, Some(q)) => Ok(TransferInput::Direct(q)),
        (None, None) => Err(CliError::config("give either --probe or --mu/--nu")),
        (Some(_), Some(_)) => Err(CliError::config("--probe and --mu/--nu are mutually exclusive")),
    }
}

pub fn cmd_run(args: &RunArgs) -> CliResult<()> {
    check_finite("--alpha", args.alpha)?;
    check_white_noise(args.white_noise)?;
    let input = transfer_input(args.probe, logical_input(args.mu, args.nu)?)?;
    let setup = TransferSetup::new(args.kind, input, args.alpha)?;
    let schedule = args.noise.resolve(&setup)?;
    let mut rho = setup.resource.to_density();
    if args.white_noise > 0.0 {
        rho = rho.mix_with_white_noise(args.white_noise);
    }
    if let Some(s) = &schedule {
        rho = dfs_oneway::noise::apply_noise_schedule(&rho, s)?;
    }
    let outcome = setup.execute(&rho, args.policy, None)?;
    let body = RunBody {
        noise_schedule: schedule,
        kept_probability: outcome.kept_probability,
        result: TransferRunJson::new(args.kind, input, args.alpha, args.policy, &outcome),
    };
    emit_json(args.out.as_deref(), &envelope("run", args, body))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct TomoStateArgs {
    /// State to measure: a state file, or the output of `build` or `run`.
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    pub input: Option<PathBuf>,
    /// Reconstruct an existing dataset instead of simulating one.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value = "1000")]
    pub mean_count: MeanCount,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "exact")]
    pub slicing: SlicingArg,
    /// Schedule applied to the input state before measurement (`none` or a file).
    #[arg(long, default_value = "none")]
    pub noise: NoiseArg,
    /// Also write the simulated dataset here.
    #[arg(long)]
    pub dataset_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct TomoStateBody {
    n_qubits: usize,
    settings: usize,
    total_counts: f64,
    iterations: usize,
    converged: bool,
    log_likelihood: f64,
    floor_hits: usize,
    state: StateJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity_to_input: Option<f64>,
}

pub fn cmd_tomo_state(args: &TomoStateArgs) -> CliResult<()> {
    let (data, truth) = match (&args.input, &args.dataset) {
        (Some(path), None) => {
            let rho = load_state(path)?;
            let schedule = args.noise.resolve_standalone(rho.n_qubits())?;
            let settings = settings_overcomplete(rho.n_qubits())?;
            let d = simulate_counts(&rho, &settings, args.mean_count.0, args.seed, args.slicing.0, schedule.as_ref())?;
            let truth = match &schedule {
                Some(s) => dfs_oneway::noise::apply_noise_schedule(&rho, s)?,
                None => rho,
            };
            (d, Some(truth))
        }
        (None, Some(path)) => (load_dataset(path)?, None),
        _ => return Err(CliError::config("give exactly one of --input or --dataset")),
    };
    if let Some(p) = &args.dataset_out {
        crate::output::write_atomic(p, &to_json_bytes(&data)?)?;
    }
    let mle = mle_state(&data, &mle_options(data.is_exact()))?;
    let fidelity_to_input = truth.map(|t| state_fidelity(&mle.state, &t)).transpose()?;
    let body = TomoStateBody {
        n_qubits: data.n_qubits,
        settings: data.records.len(),
        total_counts: data.total_counts(),
        iterations: mle.diagnostics.iterations,
        converged: mle.diagnostics.converged,
        log_likelihood: mle.diagnostics.log_likelihood.last().copied().unwrap_or(f64::NAN),
        floor_hits: mle.diagnostics.floor_hits,
        state: StateJson::from(&mle.state),
        fidelity_to_input,
    };
    emit_json(args.out.as_deref(), &envelope("tomo-state", args, body))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct TomoProcessArgs {
    #[arg(long, default_value = "dfs")]
    pub kind: ResourceKind,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value = "none")]
    pub noise: NoiseArg,
    #[arg(long, default_value = "postselect")]
    pub policy: Policy,
    #[arg(long, default_value = "1000")]
    pub mean_count: MeanCount,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "exact")]
    pub slicing: SlicingArg,
    #[arg(long, default_value_t = 0.0)]
    pub white_noise: f64,
    /// χ file or `tomo-process` output to compare against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FidelityPair {
    pub sqrt: f64,
    pub squared: f64,
}

impl FidelityPair {
    pub fn between(
        a: &dfs_oneway::tomography::ChiMatrix,
        b: &dfs_oneway::tomography::ChiMatrix,
    ) -> CliResult<Self> {
        Ok(Self {
            sqrt: process_fidelity(a, b, FidelityConvention::Sqrt)?,
            squared: process_fidelity(a, b, FidelityConvention::Squared)?,
        })
    }
}

#[derive(Serialize)]
struct TomoProcessBody {
    probes: Vec<ProbeReport>,
    chi: ChiJson,
    cp_flag: bool,
    clamp_change: f64,
    channel: ChannelJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity_to_reference: Option<FidelityPair>,
}

pub fn process_request(args: &TomoProcessArgs) -> CliResult<ProcessRequest> {
    check_finite("--alpha", args.alpha)?;
    check_white_noise(args.white_noise)?;
    Ok(ProcessRequest {
        kind: args.kind,
        alpha: args.alpha,
        noise: args.noise.clone(),
        policy: args.policy,
        mean_count: args.mean_count,
        seed: args.seed,
        slicing: args.slicing.0,
        white_noise: args.white_noise,
    })
}

pub fn cmd_tomo_process(args: &TomoProcessArgs) -> CliResult<()> {
    let reference = args.reference.as_deref().map(load_chi).transpose()?;
    let est = estimate_process(&process_request(args)?)?;
    let fidelity_to_reference = reference
        .map(|r| FidelityPair::between(&est.qpt.chi, &r))
        .transpose()?;
    let body = TomoProcessBody {
        probes: est.probes,
        chi: ChiJson::from(&est.qpt.chi),
        cp_flag: est.qpt.cp_flag,
        clamp_change: est.qpt.clamp_change,
        channel: ChannelJson::try_from(&est.channel)?,
        fidelity_to_reference,
    };
    emit_json(args.out.as_deref(), &envelope("tomo-process", args, body))
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct BlochArgs {
    /// Kraus channel file, χ file, or `tomo-process` output.
    #[arg(long)]
    pub channel: PathBuf,
    /// Number of input points on the sphere.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// CSV destination; the config goes next to it in `<out>.meta.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn bloch_csv(channel: &KrausChannel, n: usize, seed: u64) -> CliResult<String> {
    if n == 0 {
        return Err(CliError::config("--n must be positive"));
    }
    Ok(bloch_csv_string(&bloch_deformation(channel, n, seed)?)?)
}

pub fn meta_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn cmd_bloch(args: &BlochArgs) -> CliResult<()> {
    let channel = load_channel(&args.channel)?;
    let csv = bloch_csv(&channel, args.n, args.seed)?;
    emit(args.out.as_deref(), csv.as_bytes())?;
    if let Some(out) = &args.out {
        #[derive(Serialize)]
        struct Meta {
            rows: usize,
        }
        let meta = envelope("bloch", args, Meta { rows: args.n });
        crate::output::write_atomic(&meta_path(out), &to_json_bytes(&meta)?)?;
    }
    Ok(())
}
