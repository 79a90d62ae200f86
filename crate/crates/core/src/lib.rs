//! Entanglement-cost bounds for exchanging quantum information between two
//! parties that hold quantum side information.
//!
//! Given a pure state on `A C_A B C_B R`, the crate evaluates the
//! merge-and-merge upper bounds `u1`, `u2`, the computable converse bounds
//! `l1`–`l4`, searches referee channels for stronger converse values, and
//! checks the QCMI conditions under which the optimal cost is exact.

pub mod bounds;
pub mod channelopt;
pub mod conditions;
pub mod entropics;
pub mod error;
pub mod statespec;
pub mod verify;

pub use error::{Error, Result};
pub use statespec::{LabeledPureState, ParamEnv, Role, SubsystemLayout};
