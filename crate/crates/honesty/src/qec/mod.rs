//! Five-qubit code error-correction gadget: code, syndrome schedule, dense
//! logical-channel simulation and its statistics.

pub mod code;
pub mod gadget;
pub mod report;
pub mod schedule;

pub use code::{PauliString, StabilizerCode};
pub use gadget::{gadget_choi, gadget_choi_full, gadget_choi_with, Fault, GadgetResult, GateTable};
pub use report::{gadget_stats, GadgetReport, Variant, VariantReport, VariantStats};
pub use schedule::{syndrome_circuit, Placement, ScheduledCircuit};
