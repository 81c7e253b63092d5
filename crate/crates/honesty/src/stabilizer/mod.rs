//! Stabilizer-tableau Monte Carlo of the error-correction gadget.

pub mod sample;
pub mod tableau;

pub use sample::{sample_gadget, sample_gadget_with, wilson_interval, LogicalEstimate, PauliFault, PauliFaultModel};
pub use tableau::{Clifford, Tableau};
