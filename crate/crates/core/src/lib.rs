//! Truthful mechanisms for scheduling on stars, hyperstars and graphs.
//!
//! The crate bundles the allocation rules with exhaustive optimality oracles,
//! black-box truthfulness verifiers and generators for the classic hard
//! instance families, so that approximation ratios and incentive properties can
//! be checked end to end on small inputs.

pub mod allocation;
pub mod cost;
pub mod decomposition;
pub mod error;
pub mod instance;
pub mod instances;
pub mod mechanisms;
pub mod objective;
pub mod oracle;
pub mod subset;
pub mod verify;

pub use allocation::Allocation;
pub use cost::Cost;
pub use error::{Error, Result};
pub use instance::{Edge, GraphInstance, HyperstarInstance, InstanceKind, SchedulingInstance, StarInstance};
pub use mechanisms::{GFunction, Mechanism, PaymentVector, TieBreak};
pub use objective::{objective_value, Objective, Sense};
