//! Honest efficiently simulable approximations of quantum channel errors.
//!
//! The crate covers channel representations, diamond-norm and honesty metrics,
//! constrained approximation by Pauli or Clifford mixtures, noisy gate generation
//! from stochastic physical models, and a five-qubit code error-correction gadget
//! simulated densely and by stabilizer Monte Carlo.

pub mod approx;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod physics;
pub mod qec;
pub mod report;
pub mod stabilizer;

pub use channel::{Channel, DensityMatrix};
pub use error::{Error, Result};
