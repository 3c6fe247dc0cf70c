//! Error types shared across the simulator.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A scheme-sequencing violation: an operator was applied to a basis term
/// outside its domain (mixed colors at a router, bus at the wrong level, a
/// quantum query on a classical cell, ...). Carries enough context to print
/// the offending operator and term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("operator {operator} undefined on term [{term}]: {reason}")]
pub struct DomainError {
    pub operator: String,
    pub term: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("address {address} out of range for n={n}")]
    AddressOutOfRange { address: u64, n: u8 },

    #[error("address set is empty")]
    EmptyAddresses,

    #[error("duplicate address {address}")]
    DuplicateAddress { address: u64 },

    #[error("{given} weights given for {expected} addresses")]
    WeightCountMismatch { given: usize, expected: usize },

    #[error("weight vector has zero norm")]
    ZeroNormWeights,

    #[error("register shape mismatch: n={n1},m={m1} vs n={n2},m={m2}")]
    ShapeMismatch { n1: u8, m1: u8, n2: u8, m2: u8 },

    #[error("unsupported register widths n={n}, m={m} (need n,m >= 1 and n+m <= 32)")]
    BadShape { n: u8, m: u8 },

    #[error("level {level} out of range (tree depth {depth})")]
    LevelOutOfRange { level: u8, depth: u8 },

    #[error("node ({w},{level}) does not exist in a depth-{depth} tree")]
    NoSuchNode { w: u32, level: u8, depth: u8 },

    #[error("node ({w},{level}) has no designated leaves under it")]
    UnreachableNode { w: u32, level: u8 },

    #[error("cascade for {walkers} walkers is not conflict-free: walker {walker} touched twice in layer {layer}")]
    CascadeConflict {
        walkers: u16,
        walker: u16,
        layer: usize,
    },

    #[error("cascade for {walkers} walkers left walker {walker} unencoded")]
    CascadeIncomplete { walkers: u16, walker: u16 },

    #[error("memory cell {address}: {reason}")]
    BadCell { address: u32, reason: String },

    #[error("the scheme requires a designated address set")]
    MissingDesignated,

    #[error("the scheme requires memory contents")]
    MissingMemory,

    #[error("no stage of the requested kind at index {index} ({available} available)")]
    NoSuchStage { index: usize, available: usize },

    #[error("device census enumerates 2^n cells; n={n} is too large (max 12)")]
    CensusTooLarge { n: u8 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("roundabout slots must be pairwise distinct")]
    DuplicateSlots,
}

impl Error {
    /// True for scheme-sequencing failures, as opposed to bad input.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}
