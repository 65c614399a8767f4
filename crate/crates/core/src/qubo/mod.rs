//! Binary quadratic models, their spin form, and problem encoders.
mod model;
mod problems;

pub use model::{assemble, bits_to_index, index_to_bits, Assembled, IsingModel, QuadraticJson, Qubo};
pub use problems::{
    maxkcut_qubit, qap_qubit, CopInstance, Encoding, LinearConstraint, QuboSpec, VarLabel, VariableLayout,
};
