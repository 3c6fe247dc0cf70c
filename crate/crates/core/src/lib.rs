//! Gate-level simulator for a quantum-walk RAM built on perfect binary trees.
//!
//! Data and address words are dual-rail encoded into walkers with a two-level
//! internal state (red/blue). Routers at the tree nodes steer the walkers by
//! color, a log-depth CNOT cascade copies one address bit into every walker's
//! color per level, and the memory row is loaded at the leaves. The crate
//! models the whole pipeline on a sparse complex state vector over the
//! (address, bus, color, data) registers and counts exact circuit resources.

pub mod encoder;
pub mod error;
pub mod gates;
pub mod query;
pub mod resources;
pub mod schemes;
pub mod state;
pub mod tree;

pub use error::{DomainError, Error, Result};
pub use state::{BasisState, Shape, SparseState};
pub use tree::NodeId;
