//! Finite-dimensional quantum channel toolkit: channel algebra, entropic
//! quantities, capacity optimizers and the quantum switch.

pub mod capacity;
pub mod channels;
pub mod entropics;
pub mod error;
pub mod numerics;
mod optim;
pub mod switch;
pub mod zoo;

pub use error::{QcapError, Result};
