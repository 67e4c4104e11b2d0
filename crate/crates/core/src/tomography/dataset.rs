use std::collections::HashSet;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::noise::{apply_noise_schedule, quarter_slice_realization, NoiseSchedule};
use crate::qcore::matrix::ONE;
use crate::qcore::{ComplexMatrix, DensityMatrix, Label};

pub const MAX_SETTING_QUBITS: usize = 6;

/// Product projector `|l_1⟩⟨l_1| ⊗ … ⊗ |l_n⟩⟨l_n|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectorSetting {
    pub labels: Vec<Label>,
}

impl ProjectorSetting {
    pub fn new(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn parse(labels: &[&str]) -> Result<Self> {
        Ok(Self::new(
            labels.iter().map(|l| l.parse()).collect::<Result<_>>()?,
        ))
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    /// Product ket, qubit 0 leftmost.
    pub fn vector(&self) -> Vec<Complex64> {
        self.labels.iter().fold(vec![ONE], |acc, l| {
            let k = l.ket();
            acc.iter().flat_map(|a| [a * k[0], a * k[1]]).collect()
        })
    }

    pub fn projector(&self) -> ComplexMatrix {
        let v = self.vector();
        ComplexMatrix::outer(&v, &v)
    }

    /// `tr(Π ρ)`
    pub fn probability(&self, rho: &DensityMatrix) -> f64 {
        rho.overlap(&self.vector()).max(0.0)
    }
}

/// All `6^n` settings, lexicographic in `(0, 1, +, −, L, R)` with qubit 0 slowest.
pub fn settings_overcomplete(n: usize) -> Result<Vec<ProjectorSetting>> {
    if n == 0 || n > MAX_SETTING_QUBITS {
        return Err(Error::Tomography(format!(
            "overcomplete settings need 1..={MAX_SETTING_QUBITS} qubits, got {n}"
        )));
    }
    let total = 6usize.pow(n as u32);
    Ok((0..total)
        .map(|mut index| {
            let mut labels = vec![Label::Zero; n];
            for slot in labels.iter_mut().rev() {
                *slot = Label::ALL[index % 6];
                index /= 6;
            }
            ProjectorSetting::new(labels)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slicing {
    ExactChannel,
    QuarterSlices,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: ProjectorSetting,
    /// Integer for sampled data; the exact expected frequency when the
    /// dataset's mean count is infinite.
    #[serde(with = "count_format")]
    pub count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyDataset {
    pub n_qubits: usize,
    /// Expected counts at probability 1; `inf` marks exact probabilities.
    #[serde(with = "mean_format")]
    pub mean_count: f64,
    pub seed: u64,
    pub slicing: Slicing,
    pub records: Vec<CountRecord>,
}

impl TomographyDataset {
    pub fn is_exact(&self) -> bool {
        self.mean_count.is_infinite()
    }

    pub fn total_counts(&self) -> f64 {
        self.records.iter().map(|r| r.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::Tomography("dataset has no records".into()));
        }
        if !(self.mean_count > 0.0) {
            return Err(Error::Tomography(format!(
                "mean_count must be positive, got {}",
                self.mean_count
            )));
        }
        let mut seen = HashSet::new();
        for r in &self.records {
            if r.setting.n_qubits() != self.n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: self.n_qubits,
                    found: r.setting.n_qubits(),
                });
            }
            if !(r.count >= 0.0) || !r.count.is_finite() {
                return Err(Error::Tomography(format!("invalid count {}", r.count)));
            }
            if !seen.insert(&r.setting) {
                return Err(Error::Tomography("repeated setting in dataset".into()));
            }
        }
        if self.total_counts() <= 0.0 {
            return Err(Error::Tomography("dataset has zero total counts".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }
}

/// Substream for record `index`: ChaCha8 keyed by `seed`, stream number `index`.
pub fn record_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn poisson_draw(rng: &mut ChaCha8Rng, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    Poisson::new(lambda)
        .expect("positive finite rate")
        .sample(rng)
}

/// Counts for a weighted mixture of exposures: record `j` receives
/// `Σ_k Poisson(mean_count · w_k · tr(Π_j ρ_k))`. With `mean_count = ∞` the
/// record holds the exact expected frequency `Σ_k w_k tr(Π_j ρ_k)`.
pub fn simulate_counts_mixture(
    components: &[(f64, DensityMatrix)],
    settings: &[ProjectorSetting],
    mean_count: f64,
    seed: u64,
    slicing: Slicing,
) -> Result<TomographyDataset> {
    if !(mean_count > 0.0) {
        return Err(Error::Tomography(format!(
            "mean_count must be positive, got {mean_count}"
        )));
    }
    let n_qubits = components
        .first()
        .ok_or_else(|| Error::Tomography("no exposures given".into()))?
        .1
        .n_qubits();
    for (w, rho) in components {
        if rho.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: rho.n_qubits(),
            });
        }
        if !(*w >= 0.0) {
            return Err(Error::Tomography(format!("negative exposure weight {w}")));
        }
    }
    let records = settings
        .iter()
        .enumerate()
        .map(|(j, setting)| {
            if setting.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    found: setting.n_qubits(),
                });
            }
            let v = setting.vector();
            let count = if mean_count.is_infinite() {
                components.iter().map(|(w, rho)| w * rho.overlap(&v).max(0.0)).sum()
            } else {
                let mut rng = record_rng(seed, j);
                components
                    .iter()
                    .map(|(w, rho)| poisson_draw(&mut rng, mean_count * w * rho.overlap(&v).max(0.0)))
                    .sum()
            };
            Ok(CountRecord {
                setting: setting.clone(),
                count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = TomographyDataset {
        n_qubits,
        mean_count,
        seed,
        slicing,
        records,
    };
    let mut seen = HashSet::new();
    if !d.records.iter().all(|r| seen.insert(&r.setting)) {
        return Err(Error::Tomography("repeated setting".into()));
    }
    Ok(d)
}

/// Poisson counts for `noise(ρ)`.
///
/// `QuarterSlices` splits the exposure over the unitary realizations of a
/// full-dephasing schedule and sums the draws; without a schedule the
/// exposure is split in four identical parts.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[ProjectorSetting],
    mean_count: f64,
    seed: u64,
    slicing: Slicing,
    noise: Option<&NoiseSchedule>,
) -> Result<TomographyDataset> {
    let components = match (slicing, noise) {
        (Slicing::ExactChannel, None) => vec![(1.0, rho.clone())],
        (Slicing::ExactChannel, Some(s)) => vec![(1.0, apply_noise_schedule(rho, s)?)],
        (Slicing::QuarterSlices, None) => vec![(0.25, rho.clone()); 4],
        (Slicing::QuarterSlices, Some(s)) => {
            s.validate(rho.n_qubits())?;
            quarter_slice_realization(s, rho.n_qubits())?
                .into_iter()
                .map(|(u, w)| (w, rho.conjugate_by(&u)))
                .collect()
        }
    };
    simulate_counts_mixture(&components, settings, mean_count, seed, slicing)
}

/// Dataset with counts `round(scale · tr(Π ρ))`.
pub fn rounded_dataset(
    rho: &DensityMatrix,
    settings: &[ProjectorSetting],
    scale: f64,
) -> Result<TomographyDataset> {
    let mut d = simulate_counts_mixture(&[(1.0, rho.clone())], settings, f64::INFINITY, 0, Slicing::ExactChannel)?;
    for r in &mut d.records {
        r.count = (r.count * scale).round();
    }
    d.mean_count = scale;
    Ok(d)
}

mod count_format {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.fract() == 0.0 && *v >= 0.0 && *v < 9.0e15 {
            s.serialize_u64(*v as u64)
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

mod mean_format {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid mean_count {t:?}"))),
        }
    }
}
