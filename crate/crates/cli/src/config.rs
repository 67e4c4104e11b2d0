//! Argument value types shared by the commands, and the loaders for their
//! input files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dfs_oneway::noise::NoiseSchedule;
use dfs_oneway::protocol::{LogicalQubit, TransferSetup};
use dfs_oneway::qcore::{ChannelJson, DensityMatrix, KrausChannel, StateJson};
use dfs_oneway::tomography::{kraus_from_chi, ChiJson, Slicing, TomographyDataset};
use num_complex::Complex64;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Expected counts at probability 1, or `inf` for exact probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCount(pub f64);

impl MeanCount {
    pub fn is_exact(&self) -> bool {
        self.0.is_infinite()
    }
}

impl FromStr for MeanCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "inf" {
            return Ok(MeanCount(f64::INFINITY));
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(MeanCount(v)),
            _ => Err(format!("mean count must be a positive number or \"inf\", got {s:?}")),
        }
    }
}

impl fmt::Display for MeanCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for MeanCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_exact() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Complex number written `re` or `re,im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("expected re or re,im, got {s:?}"))
        };
        match parts.as_slice() {
            [re] => Ok(ComplexArg(Complex64::new(num(re)?, 0.0))),
            [re, im] => Ok(ComplexArg(Complex64::new(num(re)?, num(im)?))),
            _ => Err(format!("expected re or re,im, got {s:?}")),
        }
    }
}

impl Serialize for ComplexArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

/// `--noise none | full-pd | <schedule.json>`
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseArg {
    None,
    FullPd,
    File(PathBuf),
}

impl FromStr for NoiseArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "none" => NoiseArg::None,
            "full-pd" => NoiseArg::FullPd,
            "" => return Err("empty noise argument".into()),
            path => NoiseArg::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for NoiseArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseArg::None => f.write_str("none"),
            NoiseArg::FullPd => f.write_str("full-pd"),
            NoiseArg::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for NoiseArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl NoiseArg {
    /// Concrete schedule for a transfer; `full-pd` follows the setup's layout.
    pub fn resolve(&self, setup: &TransferSetup) -> CliResult<Option<NoiseSchedule>> {
        let schedule = match self {
            NoiseArg::None => return Ok(None),
            NoiseArg::FullPd => setup.full_pd_schedule(),
            NoiseArg::File(path) => load_schedule(path)?,
        };
        schedule
            .validate(setup.n_qubits())
            .map_err(|e| CliError::config(format!("noise schedule: {e}")))?;
        Ok(Some(schedule))
    }

    /// Schedule for a bare state, where there is no transfer layout.
    pub fn resolve_standalone(&self, n_qubits: usize) -> CliResult<Option<NoiseSchedule>> {
        match self {
            NoiseArg::None => Ok(None),
            NoiseArg::FullPd => Err(CliError::config(
                "full-pd needs a transfer layout; pass a schedule file for a bare state",
            )),
            NoiseArg::File(path) => {
                let s = load_schedule(path)?;
                s.validate(n_qubits)
                    .map_err(|e| CliError::config(format!("noise schedule: {e}")))?;
                Ok(Some(s))
            }
        }
    }
}

/// `--slicing exact | quarters`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlicingArg(pub Slicing);

impl FromStr for SlicingArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(SlicingArg(Slicing::ExactChannel)),
            "quarters" => Ok(SlicingArg(Slicing::QuarterSlices)),
            other => Err(format!("slicing must be exact or quarters, got {other:?}")),
        }
    }
}

impl fmt::Display for SlicingArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            Slicing::ExactChannel => "exact",
            Slicing::QuarterSlices => "quarters",
        })
    }
}

impl Serialize for SlicingArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn check_white_noise(p: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::config(format!("--white-noise must lie in [0, 1], got {p}")))
    }
}

pub fn check_finite(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{name} must be finite, got {v}")))
    }
}

/// `(μ, ν)` from the two flags; both or neither must be present.
pub fn logical_input(mu: Option<ComplexArg>, nu: Option<ComplexArg>) -> CliResult<Option<LogicalQubit>> {
    match (mu, nu) {
        (None, None) => Ok(None),
        (Some(m), Some(n)) => LogicalQubit::new(m.0, n.0)
            .map(Some)
            .map_err(|e| CliError::config(format!("--mu/--nu: {e} (|μ|²+|ν|² must be 1)"))),
        _ => Err(CliError::config("--mu and --nu must be given together")),
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: dfs_oneway::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn load_schedule(path: &Path) -> CliResult<NoiseSchedule> {
    let v = read_json(path)?;
    serde_json::from_value(v).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// A state file, or the output of `build` (`state`) or `run` (`result.physical_output`).
pub fn load_state(path: &Path) -> CliResult<DensityMatrix> {
    let v = read_json(path)?;
    let candidates = [
        Some(&v),
        v.get("state"),
        v.get("result").and_then(|r| r.get("physical_output")),
    ];
    for c in candidates.into_iter().flatten() {
        if let Ok(s) = serde_json::from_value::<StateJson>(c.clone()) {
            return in_file(path, s.to_density());
        }
    }
    Err(CliError::config(format!("{}: no state found", path.display())))
}

/// A dataset file.
pub fn load_dataset(path: &Path) -> CliResult<TomographyDataset> {
    in_file(path, TomographyDataset::from_json(&read_text(path)?))
}

/// A Kraus channel file, a χ file, or the output of `tomo-process`.
pub fn load_channel(path: &Path) -> CliResult<KrausChannel> {
    let v = read_json(path)?;
    for c in [Some(&v), v.get("channel")].into_iter().flatten() {
        if let Ok(ch) = serde_json::from_value::<ChannelJson>(c.clone()) {
            return in_file(path, ch.to_channel());
        }
    }
    for c in [Some(&v), v.get("chi")].into_iter().flatten() {
        if let Ok(chi) = serde_json::from_value::<ChiJson>(c.clone()) {
            let chi = in_file(path, chi.to_chi())?;
            return Ok(kraus_from_chi(&chi)?);
        }
    }
    Err(CliError::config(format!("{}: no channel or chi matrix found", path.display())))
}

/// A χ file or the output of `tomo-process`.
pub fn load_chi(path: &Path) -> CliResult<dfs_oneway::tomography::ChiMatrix> {
    let v = read_json(path)?;
    for c in [Some(&v), v.get("chi")].into_iter().flatten() {
        if let Ok(chi) = serde_json::from_value::<ChiJson>(c.clone()) {
            return in_file(path, chi.to_chi());
        }
    }
    Err(CliError::config(format!("{}: no chi matrix found", path.display())))
}
