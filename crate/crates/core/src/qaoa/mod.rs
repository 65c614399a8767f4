//! Conventional and compressed-space QAOA.

mod engine;
mod protocol;

pub use engine::{success_probability, w_product, Built, Engine, Mode, Outcome, QaoaConfig, DISCARDED_ENERGY};
pub use protocol::{
    energy_fluctuation, optimize_qaoa, tune_penalty, Fluctuation, OptimizeConfig, PenaltyScan, PenaltySearch,
    QaoaResult, StartTrace,
};
