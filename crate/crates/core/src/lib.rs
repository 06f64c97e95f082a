pub mod cli;
pub mod coherence;
pub mod conversion;
pub mod entanglement;
pub mod error;
pub mod grover;
pub mod linalg;
mod optim;
pub mod roof;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
