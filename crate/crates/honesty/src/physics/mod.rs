//! Noisy gates from stochastic physical models via a second-order cumulant expansion.

pub mod acf;
pub mod cumulant;
pub mod gateset;
pub mod hamiltonian;
pub mod model;
pub mod pulses;

pub use cumulant::{cumulant_gate, cumulant_gate_with, CumulantResult};
pub use gateset::{generate_gateset, Gate, GateName, GateSet, Recipe};
pub use hamiltonian::{dissipator, hamiltonian_pm1, hamiltonian_pm2, ControlSchedule, Controls, Segment};
pub use model::{ModelKind, NoiseModel, Pm1Params, Pm2Params};
pub use pulses::{hard_pulse_schedule, xy_sequence, XyKind};
