//! Detection of latent market states in a panel of asset returns.
//!
//! Each state is a Gaussian with its own mean and a sparse precision matrix
//! estimated on a Triangulated Maximally Filtered Graph (TMFG) through the
//! LoGo clique/separator inversion. Time points are assigned to states by
//! maximizing the per-point log-likelihood minus a constant penalty for every
//! change of state, solved exactly by dynamic programming.
//!
//! The pipeline is:
//!
//! 1. [`ingest`]: load a price CSV and turn it into log-returns.
//! 2. [`ifn`]: TMFG construction, LoGo precision, decomposable log-determinant.
//! 3. [`segment`]: scoring, the switching-penalty path solver and the fit loop.
//! 4. [`analysis`]: likelihood-ratio series, occupancy statistics, label matching.

pub mod analysis;
pub mod error;
pub mod ifn;
pub mod ingest;
pub mod segment;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
