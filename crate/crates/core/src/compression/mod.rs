//! Constraint-compression unitaries and their training.

mod ansatz;
mod compose;
mod compressor;
mod database;
mod energy;
mod hamiltonian;
mod spec;

pub use compressor::{
    build_onehot_binary, build_onehot_product, build_parity, build_qap_compressor, classical_gate_map,
    onehot4_circuit_table, onehot4_gates, onehot_stage, onehot_table, onehot_width, parity_stage, remap_circuit,
    synthesize_permutation, Compressor, Stage,
};
pub use hamiltonian::{CompressedHamiltonian, HcsAudit, DEGENERACY_GAP, MAX_REDRAWS};
pub use spec::{width_for, ConstraintFunction, ConstraintKind, ConstraintSpec};
pub use energy::{
    e_direct, e_entangled, estimate_compressed_width, feasible_register_states, pulled_back, sector_probability,
    survival_rate, Readout,
};
pub use ansatz::{
    ansatz_compressor, reachable_energy_bound, train_c_ansatz, train_d_ansatz, AnsatzKind, Attempt, CAnsatz,
    CTrainConfig, DAnsatz, DTrainConfig, Escalation, Trained,
};
pub use compose::{compose_constraints, Composed, StepReport, Strategy, ENUMERATION_CAP};
pub use database::{load_database, save_database, CompressorRecord, ConstraintRecord};
