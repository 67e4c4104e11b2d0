//! Synthetic tomography: count generation, state reconstruction, process
//! tomography and channel comparison.

pub mod bloch;
pub mod dataset;
pub mod process;
pub mod reconstruct;

pub use bloch::{bloch_csv_string, bloch_deformation, fibonacci_sphere, write_bloch_csv, BlochRow};
pub use dataset::{
    record_rng, rounded_dataset, settings_overcomplete, simulate_counts, simulate_counts_mixture,
    CountRecord, ProjectorSetting, Slicing, TomographyDataset,
};
pub use process::{
    average_state_fidelity, choi_from_chi, kraus_from_chi, pauli_basis, process_fidelity, qpt_chi,
    ChiJson, ChiMatrix, FidelityConvention, QptResult,
};
pub use reconstruct::{
    clamp_to_density, linear_inversion_state, mle_state, MleDiagnostics, MleInit, MleOptions,
    MleResult, PROBABILITY_FLOOR,
};
