//! Perfect-binary-tree arithmetic and the dual-rail path layout.
//!
//! Nodes are labeled (w, level): the w-th node from the left at the given
//! level, root at (0,0), leaves at level n. Address bit n-1-level steers
//! level `level`, most significant bit first.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Label of a tree node, or of the bus moving toward that node from its
/// parent. (0,0) doubles as the input/output terminal label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub w: u32,
    pub level: u8,
}

impl NodeId {
    pub fn new(w: u32, level: u8) -> Self {
        NodeId { w, level }
    }

    /// The root / terminal label (0,0).
    pub fn root() -> Self {
        NodeId { w: 0, level: 0 }
    }

    pub fn is_root(&self) -> bool {
        self.w == 0 && self.level == 0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.w, self.level)
    }
}

/// A perfect binary tree of depth n >= 1 with 2^(n+1)-1 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeGeometry {
    depth: u8,
}

impl TreeGeometry {
    pub fn new(depth: u8) -> Result<Self> {
        if depth == 0 || depth > 20 {
            return Err(Error::LevelOutOfRange {
                level: depth,
                depth,
            });
        }
        Ok(TreeGeometry { depth })
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn node_count(&self) -> u64 {
        (1u64 << (self.depth + 1)) - 1
    }

    pub fn nodes_at(&self, level: u8) -> u64 {
        1u64 << level
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.level <= self.depth && u64::from(node.w) < self.nodes_at(node.level)
    }

    /// Left and right child of an internal node: (2w, level+1) and
    /// (2w+1, level+1).
    pub fn children(&self, node: NodeId) -> Result<(NodeId, NodeId)> {
        if node.level >= self.depth || !self.contains(node) {
            return Err(Error::NoSuchNode {
                w: node.w,
                level: node.level,
                depth: self.depth,
            });
        }
        Ok((
            NodeId::new(2 * node.w, node.level + 1),
            NodeId::new(2 * node.w + 1, node.level + 1),
        ))
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        if node.level == 0 || !self.contains(node) {
            return None;
        }
        Some(NodeId::new(node.w / 2, node.level - 1))
    }

    /// The leaf storing address `a`, namely (a, n).
    pub fn leaf_of(&self, address: u32) -> NodeId {
        NodeId::new(address, self.depth)
    }
}

/// Path indices occupied by a dual-rail encoded word: bit j of `word`
/// selects path 2j (bit 0) or 2j+1 (bit 1). Returned sorted ascending.
pub fn dual_rail_paths(word: u32, len: u8) -> Vec<u32> {
    (0..u32::from(len))
        .map(|j| 2 * j + ((word >> j) & 1))
        .collect()
}

/// Number of designated addresses whose leaf lies under the left resp. right
/// child subtree of `node`, in a depth-n tree. `node` must be internal.
pub fn subtree_leaf_counts(designated: &BTreeSet<u32>, node: NodeId, n: u8) -> (usize, usize) {
    assert!(node.level < n, "subtree_leaf_counts needs an internal node");
    // Leaf a sits under (v, level) iff the top `level` bits of a equal v.
    let shift = n - node.level - 1;
    let left = 2 * node.w;
    let right = 2 * node.w + 1;
    let mut counts = (0usize, 0usize);
    for &a in designated {
        let prefix = a >> shift;
        if prefix == left {
            counts.0 += 1;
        } else if prefix == right {
            counts.1 += 1;
        }
    }
    counts
}
