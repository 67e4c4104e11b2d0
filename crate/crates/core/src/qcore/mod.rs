//! Complex linear algebra and qubit primitives: states, channels, fidelities,
//! Bloch geometry.

pub mod bloch;
pub mod channel;
pub mod json;
pub mod labels;
pub mod matrix;
pub mod sampling;
pub mod state;

pub use bloch::{bloch_from_density, density_from_bloch, BlochVector};
pub use channel::{apply_channel, KrausChannel};
pub use json::{ChannelJson, StateJson, StateKind};
pub use labels::{projector_for_label, Label};
pub use matrix::{
    c, controlled_phase, embed_operator, hadamard, pauli_x, pauli_y, pauli_z, rz, ComplexMatrix,
};
pub use state::{partial_trace, root_fidelity, state_fidelity, tensor, DensityMatrix, PureState, Tensor};
