//! Energy-cost estimation for classical and quantum proof-of-work miners.
//!
//! The crate computes the Landauer minimum per block of a classical ASIC
//! miner and of quantum miners running Grover search with zero, one or two
//! layers of concatenated Shor-code error correction, scales those minima
//! by observed efficiency ratios, and derives break-even ratios, advantage
//! factors and annual savings. Two simulators back the probability model:
//! [`grover`] runs the mining search exactly on a toy hash, and [`race`]
//! plays out seeded block races between miners.
//!
//! Inner loops use rayon when the `parallel` feature is on (the default);
//! results are bit-identical either way.

pub mod classical;
pub mod cli;
pub mod error;
pub mod exec;
pub mod grover;
pub mod netstats;
pub mod physics;
pub mod pipeline;
pub mod quantum;
pub mod race;

pub use error::{ModelError, Result};
pub use exec::Execution;
