pub mod compression;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod optim;
pub mod qaoa;
pub mod qubo;
pub mod sim;

pub use error::{Error, Result};
