//! Classical optimizers used by the compressor trainers and the QAOA loop.
mod anneal;
mod powell;

pub use anneal::{anneal_binary, SaConfig, SaResult};
pub use powell::{brent, powell_minimize, PowellConfig, PowellResult};
