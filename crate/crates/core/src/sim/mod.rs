//! Dense statevector engine.

mod circuit;
mod gate;
pub mod noise;
mod state;

pub use circuit::Circuit;
pub use gate::{block_xy_unitary, kick, xy_hamiltonian, GateOp, Mat2, XyPropagator};
pub use noise::{compile_to_noisy, depolarizing_strength, gate_error_rate, kick_angle};
pub use state::{Projection, Statevector};
