//! The top-level operator pipelines: routing to the addressed leaves, the
//! leaf queries, the mirrored output scheme, and the superposition-building
//! variant that routes by subtree-weighted beam splitters instead of an
//! address register.
//!
//! Every scheme is an explicit list of stages. The output scheme is the
//! routing list reversed with each stage inverted, which makes adjointness
//! exact by construction; the mutation hooks below remove or flip single
//! stages so verification tests can prove they are load-bearing.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::encoder::{self, build_cascade, CascadeLayer};
use crate::error::{Error, Result};
use crate::gates::{ColorUnitary, Orientation};
use crate::query::{self, MemorySpec};
use crate::resources::{stage_events_at, GateEvent};
use crate::state::{Shape, SparseState};
use crate::tree::{subtree_leaf_counts, NodeId};

/// Which leaf query a pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryFlavor {
    Classical,
    Tilde,
    Quantum,
}

/// One elementary stage of a scheme; each stage is a single conflict-free
/// gate layer (devices at every node of its level act in parallel).
#[derive(Debug, Clone, PartialEq)]
pub enum StageOp {
    /// Parity reset at every node of `level`: odd-w nodes flip all colors.
    ColorReset { level: u8 },
    /// CX from address walker n-1-level onto its own color.
    AddressColorCx { level: u8 },
    /// One layer of the fan-out cascade sitting between levels.
    Cascade {
        level: u8,
        index: usize,
        layer: CascadeLayer,
    },
    /// The per-node router: red to the left child, blue to the right.
    /// `toward_leaves` false is the mirrored (upward) traversal.
    Roundabout {
        level: u8,
        orientation: Orientation,
        toward_leaves: bool,
    },
    /// Subtree-weighted beam splitter on walker 0's color, per node.
    HadamardSplit {
        level: u8,
        gates: BTreeMap<u32, ColorUnitary>,
    },
    /// Leaf query against the memory configuration.
    Query { flavor: QueryFlavor },
}

impl StageOp {
    pub fn name(&self) -> String {
        match self {
            StageOp::ColorReset { level } => format!("color_reset@{level}"),
            StageOp::AddressColorCx { level } => format!("address_color_cx@{level}"),
            StageOp::Cascade { level, index, .. } => format!("cascade@{level}#{index}"),
            StageOp::Roundabout {
                level,
                toward_leaves,
                ..
            } => {
                if *toward_leaves {
                    format!("roundabout@{level}")
                } else {
                    format!("roundabout@{level}^")
                }
            }
            StageOp::HadamardSplit { level, .. } => format!("hadamard_split@{level}"),
            StageOp::Query { flavor } => match flavor {
                QueryFlavor::Classical => "query_classical".into(),
                QueryFlavor::Tilde => "query_tilde".into(),
                QueryFlavor::Quantum => "query_quantum".into(),
            },
        }
    }

    /// The device node index a term at `bus` passes through: the bus label
    /// itself, except at a mirrored router where the device sits one level
    /// above the bus.
    pub fn device_node_of(&self, bus: NodeId) -> u32 {
        match self {
            StageOp::Roundabout {
                toward_leaves: false,
                ..
            } => bus.w >> 1,
            _ => bus.w,
        }
    }

    /// Tree level the stage's devices sit at, if any.
    pub fn level(&self) -> Option<u8> {
        match self {
            StageOp::ColorReset { level }
            | StageOp::AddressColorCx { level }
            | StageOp::Cascade { level, .. }
            | StageOp::Roundabout { level, .. }
            | StageOp::HadamardSplit { level, .. } => Some(*level),
            StageOp::Query { .. } => None,
        }
    }

    /// Conflict-free layers this stage occupies in the schedule.
    pub fn layer_count(&self) -> usize {
        match self {
            // Encoder, three CNOTs, decoder run in sequence per data qubit.
            StageOp::Query {
                flavor: QueryFlavor::Quantum,
            } => 5,
            _ => 1,
        }
    }

    /// The exact inverse stage: routers reverse their traversal, everything
    /// else is self-inverse.
    pub fn inverted(&self) -> StageOp {
        match self {
            StageOp::Roundabout {
                level,
                orientation,
                toward_leaves,
            } => StageOp::Roundabout {
                level: *level,
                orientation: *orientation,
                toward_leaves: !*toward_leaves,
            },
            other => other.clone(),
        }
    }

    /// Applies this single stage; query stages need the memory.
    pub fn apply(&self, state: &SparseState, memory: Option<&MemorySpec>) -> Result<SparseState> {
        let shape = *state.shape();
        let walkers = shape.walkers();
        let mask = shape.color_mask();
        let one = Complex64::new(1.0, 0.0);
        match self {
            StageOp::ColorReset { level } => state.apply(&self.name(), |b| {
                if b.bus.level != *level {
                    return Err(format!(
                        "bus at level {}, reset sits at {level}",
                        b.bus.level
                    ));
                }
                let mut out = *b;
                out.colors = encoder::color_reset(b.bus.w, b.colors, walkers)?;
                Ok(vec![(out, one)])
            }),
            StageOp::AddressColorCx { level } => {
                let source = shape.n - 1 - level;
                state.apply(&self.name(), |b| {
                    if b.bus.level != *level {
                        return Err(format!(
                            "bus at level {}, encoder sits at {level}",
                            b.bus.level
                        ));
                    }
                    let mut out = *b;
                    out.colors ^= ((b.address >> source) & 1) << source;
                    Ok(vec![(out, one)])
                })
            }
            StageOp::Cascade { level, layer, .. } => state.apply(&self.name(), |b| {
                if b.bus.level != *level {
                    return Err(format!(
                        "bus at level {}, cascade sits at {level}",
                        b.bus.level
                    ));
                }
                let mut out = *b;
                out.colors = layer.apply_word(b.colors);
                Ok(vec![(out, one)])
            }),
            StageOp::Roundabout {
                level,
                orientation,
                toward_leaves,
            } => state.apply(&self.name(), |b| {
                let color = if b.colors == 0 {
                    0u32
                } else if b.colors == mask {
                    1u32
                } else {
                    return Err(format!("mixed colors {:#b} entering roundabout", b.colors));
                };
                // A right-oriented router swaps the children.
                let steer = color ^ u32::from(*orientation == Orientation::Right);
                let mut out = *b;
                if *toward_leaves {
                    if b.bus.level != *level {
                        return Err(format!(
                            "bus at level {}, router sits at {level}",
                            b.bus.level
                        ));
                    }
                    out.bus = NodeId::new(2 * b.bus.w + steer, level + 1);
                } else {
                    if b.bus.level != *level + 1 {
                        return Err(format!(
                            "bus at level {}, mirrored router sits below {level}",
                            b.bus.level
                        ));
                    }
                    if b.bus.w & 1 != steer {
                        return Err(format!(
                            "bus parity {} inconsistent with colors at mirrored router",
                            b.bus.w & 1
                        ));
                    }
                    out.bus = NodeId::new(b.bus.w >> 1, *level);
                }
                Ok(vec![(out, one)])
            }),
            StageOp::HadamardSplit { level, gates } => state.apply(&self.name(), |b| {
                if b.bus.level != *level {
                    return Err(format!(
                        "bus at level {}, splitter sits at {level}",
                        b.bus.level
                    ));
                }
                let gate = match gates.get(&b.bus.w) {
                    Some(g) => *g,
                    None => ColorUnitary::identity(),
                };
                let image = gate
                    .column(b.colors & 1)
                    .into_iter()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(bit, c)| {
                        let mut out = *b;
                        out.colors = (b.colors & !1) | bit;
                        (out, c)
                    })
                    .collect();
                Ok(image)
            }),
            StageOp::Query { flavor } => {
                let memory = memory.ok_or(Error::MissingMemory)?;
                memory.shape().matches(&shape)?;
                match flavor {
                    QueryFlavor::Classical => {
                        state.apply(&self.name(), |b| query::classical_image(memory, b))
                    }
                    QueryFlavor::Tilde => {
                        state.apply(&self.name(), |b| query::tilde_image(memory, b))
                    }
                    QueryFlavor::Quantum => {
                        state.apply(&self.name(), |b| query::quantum_image(memory, b))
                    }
                }
            }
        }
    }
}

/// Per-stage record of a traced run: which operator ran, where, the devices
/// the reachable terms passed through, and an optional state snapshot.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub name: String,
    pub level: Option<u8>,
    pub events: Vec<GateEvent>,
    pub snapshot: Option<SparseState>,
}

/// Ordered per-stage trace of one scheme application.
#[derive(Debug, Clone, Default)]
pub struct SchemeTrace {
    pub entries: Vec<TraceEntry>,
}

/// A scheme as an explicit stage list plus the memory it queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    shape: Shape,
    stages: Vec<StageOp>,
    memory: Option<MemorySpec>,
}

fn level_stages(shape: &Shape, level: u8) -> Result<Vec<StageOp>> {
    let mut stages = vec![
        StageOp::ColorReset { level },
        StageOp::AddressColorCx { level },
    ];
    for (index, layer) in build_cascade(level, shape.n, shape.m)?
        .into_iter()
        .enumerate()
    {
        stages.push(StageOp::Cascade {
            level,
            index,
            layer,
        });
    }
    stages.push(StageOp::Roundabout {
        level,
        orientation: Orientation::Left,
        toward_leaves: true,
    });
    Ok(stages)
}

impl Pipeline {
    /// The routing scheme: per level, reset colors, write the address bit,
    /// fan it out, route; then clear colors at the leaves.
    pub fn routing(n: u8, m: u8) -> Result<Self> {
        let shape = Shape::new(n, m)?;
        let mut stages = Vec::new();
        for level in 0..n {
            stages.extend(level_stages(&shape, level)?);
        }
        stages.push(StageOp::ColorReset { level: n });
        Ok(Pipeline {
            shape,
            stages,
            memory: None,
        })
    }

    /// The mirrored output scheme: routing reversed, stage by stage.
    pub fn output(n: u8, m: u8) -> Result<Self> {
        Ok(Self::routing(n, m)?.inverted())
    }

    /// The superposition-building routing scheme: beam splitters weighted by
    /// designated-leaf counts steer walker 0, whose color is fanned out to
    /// the whole bus before each router. The address register stays cleared.
    pub fn routing_tilde(n: u8, m: u8, designated: &BTreeSet<u32>) -> Result<Self> {
        let shape = Shape::new(n, m)?;
        if designated.is_empty() {
            return Err(Error::EmptyAddresses);
        }
        for &a in designated {
            if u64::from(a) >= shape.address_count() {
                return Err(Error::AddressOutOfRange {
                    address: u64::from(a),
                    n,
                });
            }
        }
        let mut stages = Vec::new();
        for level in 0..n {
            stages.push(StageOp::ColorReset { level });
            let mut gates = BTreeMap::new();
            for w in 0..(1u32 << level) {
                let node = NodeId::new(w, level);
                let (l, r) = subtree_leaf_counts(designated, node, n);
                if l + r > 0 {
                    gates.insert(w, hadamard_like_matrix(l, r));
                }
            }
            stages.push(StageOp::HadamardSplit { level, gates });
            // Fan-out always sources from walker 0 here.
            for (index, layer) in build_cascade(n - 1, n, m)?.into_iter().enumerate() {
                stages.push(StageOp::Cascade {
                    level,
                    index,
                    layer,
                });
            }
            stages.push(StageOp::Roundabout {
                level,
                orientation: Orientation::Left,
                toward_leaves: true,
            });
        }
        stages.push(StageOp::ColorReset { level: n });
        Ok(Pipeline {
            shape,
            stages,
            memory: None,
        })
    }

    /// A lone query stage against `memory`.
    pub fn query_only(memory: &MemorySpec, flavor: QueryFlavor) -> Result<Self> {
        Ok(Pipeline {
            shape: *memory.shape(),
            stages: vec![StageOp::Query { flavor }],
            memory: Some(memory.clone()),
        })
    }

    /// The full map: route, load the addressed words, route back.
    pub fn qram(memory: &MemorySpec) -> Result<Self> {
        let (n, m) = (memory.n(), memory.m());
        Self::routing(n, m)?
            .chain(Self::query_only(memory, QueryFlavor::Classical)?)?
            .chain(Self::output(n, m)?)
    }

    /// The superposition builder: split-route over the designated set, tag
    /// address and data at the leaves, route back through the standard
    /// mirror.
    pub fn qram_tilde(memory: &MemorySpec) -> Result<Self> {
        let designated = memory.designated().ok_or(Error::MissingDesignated)?;
        let (n, m) = (memory.n(), memory.m());
        Self::routing_tilde(n, m, designated)?
            .chain(Self::query_only(memory, QueryFlavor::Tilde)?)?
            .chain(Self::output(n, m)?)
    }

    /// The quantum-transfer map: route, swap the addressed cell register
    /// into the data register, route back.
    pub fn qram_quantum(memory: &MemorySpec) -> Result<Self> {
        let (n, m) = (memory.n(), memory.m());
        Self::routing(n, m)?
            .chain(Self::query_only(memory, QueryFlavor::Quantum)?)?
            .chain(Self::output(n, m)?)
    }

    /// Concatenates two schemes over the same registers, keeping whichever
    /// memory configuration is present.
    pub fn chain(mut self, other: Pipeline) -> Result<Self> {
        self.shape.matches(&other.shape)?;
        self.stages.extend(other.stages);
        if self.memory.is_none() {
            self.memory = other.memory;
        }
        Ok(self)
    }

    /// The exact adjoint: reversed stage list with each stage inverted.
    pub fn inverted(&self) -> Self {
        Pipeline {
            shape: self.shape,
            stages: self.stages.iter().rev().map(StageOp::inverted).collect(),
            memory: self.memory.clone(),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn stages(&self) -> &[StageOp] {
        &self.stages
    }

    pub fn memory(&self) -> Option<&MemorySpec> {
        self.memory.as_ref()
    }

    /// Total conflict-free layers in the schedule.
    pub fn depth(&self) -> u64 {
        self.stages.iter().map(|s| s.layer_count() as u64).sum()
    }

    pub fn apply(&self, state: &SparseState) -> Result<SparseState> {
        self.shape.matches(state.shape())?;
        let mut current = state.clone();
        for stage in &self.stages {
            let next = stage.apply(&current, self.memory.as_ref())?;
            debug_assert!(
                (next.norm() - current.norm()).abs() < 1e-9,
                "stage {} broke the norm",
                stage.name()
            );
            current = next;
        }
        Ok(current)
    }

    /// Applies the scheme, recording per-stage device events at the nodes
    /// the reachable terms actually visit (and state snapshots on request).
    pub fn apply_traced(
        &self,
        state: &SparseState,
        snapshots: bool,
    ) -> Result<(SparseState, SchemeTrace)> {
        self.shape.matches(state.shape())?;
        let mut current = state.clone();
        let mut trace = SchemeTrace::default();
        let mut layer = 0usize;
        for stage in &self.stages {
            let visited: BTreeSet<u32> = current
                .terms()
                .map(|(b, _)| stage.device_node_of(b.bus))
                .collect();
            let mut events = Vec::new();
            for &w in &visited {
                events.extend(stage_events_at(stage, &self.shape, layer, w));
            }
            current = stage.apply(&current, self.memory.as_ref())?;
            trace.entries.push(TraceEntry {
                name: stage.name(),
                level: stage.level(),
                events,
                snapshot: snapshots.then(|| current.clone()),
            });
            layer += stage.layer_count();
        }
        Ok((current, trace))
    }

    pub fn cascade_stage_count(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| matches!(s, StageOp::Cascade { .. }))
            .count()
    }

    pub fn roundabout_stage_count(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| matches!(s, StageOp::Roundabout { .. }))
            .count()
    }

    /// Mutation hook: drops the k-th cascade layer stage outright.
    pub fn skip_cascade_stage(&mut self, index: usize) -> Result<()> {
        let available = self.cascade_stage_count();
        let position = self
            .stages
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, StageOp::Cascade { .. }))
            .map(|(i, _)| i)
            .nth(index)
            .ok_or(Error::NoSuchStage { index, available })?;
        self.stages.remove(position);
        Ok(())
    }

    /// Mutation hook: flips the orientation of the k-th roundabout stage.
    pub fn flip_roundabout(&mut self, index: usize) -> Result<()> {
        let available = self.roundabout_stage_count();
        let position = self
            .stages
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, StageOp::Roundabout { .. }))
            .map(|(i, _)| i)
            .nth(index)
            .ok_or(Error::NoSuchStage { index, available })?;
        if let StageOp::Roundabout { orientation, .. } = &mut self.stages[position] {
            *orientation = orientation.flipped();
        }
        Ok(())
    }
}

fn hadamard_like_matrix(l: usize, r: usize) -> ColorUnitary {
    let total = (l + r) as f64;
    let sl = Complex64::new((l as f64 / total).sqrt(), 0.0);
    let sr = Complex64::new((r as f64 / total).sqrt(), 0.0);
    ColorUnitary::new([[sl, sr], [sr, -sl]]).expect("weighted splitter is unitary")
}

/// The subtree-weighted splitter at `node`: amplitudes proportional to the
/// square roots of the designated-leaf counts under each child. Errors when
/// no designated leaf lies under the node.
pub fn hadamard_like(designated: &BTreeSet<u32>, node: NodeId, n: u8) -> Result<ColorUnitary> {
    let (l, r) = subtree_leaf_counts(designated, node, n);
    if l + r == 0 {
        return Err(Error::UnreachableNode {
            w: node.w,
            level: node.level,
        });
    }
    Ok(hadamard_like_matrix(l, r))
}

/// One routing step: reset, encode the level's address bit, fan out, route.
pub fn route_step(level: u8, state: &SparseState) -> Result<SparseState> {
    let shape = *state.shape();
    if level >= shape.n {
        return Err(Error::LevelOutOfRange {
            level,
            depth: shape.n,
        });
    }
    let pipeline = Pipeline {
        shape,
        stages: level_stages(&shape, level)?,
        memory: None,
    };
    pipeline.apply(state)
}

/// Delivers each branch's bus from the terminal to its addressed leaf,
/// colors cleared.
pub fn route_full(state: &SparseState) -> Result<SparseState> {
    Pipeline::routing(state.shape().n, state.shape().m)?.apply(state)
}

/// The mirrored return trip: each branch's bus from its leaf back to the
/// terminal. Exact adjoint of `route_full`.
pub fn output_full(state: &SparseState) -> Result<SparseState> {
    Pipeline::output(state.shape().n, state.shape().m)?.apply(state)
}

/// Builds the uniform superposition of designated leaves from the all-zero
/// input: amplitude 1/sqrt(|designated|) on each leaf, address register
/// still cleared.
pub fn route_tilde(designated: &BTreeSet<u32>, n: u8, m: u8) -> Result<SparseState> {
    let input = SparseState::make_input(&[0], None, n, m)?;
    Pipeline::routing_tilde(n, m, designated)?.apply(&input)
}

/// The full map on a prepared address superposition: every branch gains its
/// cell's data word, everything else returns to the terminal configuration.
pub fn qram(memory: &MemorySpec, input: &SparseState) -> Result<SparseState> {
    Pipeline::qram(memory)?.apply(input)
}

/// The superposition builder: from the all-zero input to the uniform
/// address-and-data superposition over the designated set.
pub fn qram_tilde(memory: &MemorySpec) -> Result<SparseState> {
    let input = SparseState::make_input(&[0], None, memory.n(), memory.m())?;
    Pipeline::qram_tilde(memory)?.apply(&input)
}

/// The quantum-transfer map: like `qram` but swapping quantum cell contents
/// into the data register.
pub fn qram_quantum(memory: &MemorySpec, input: &SparseState) -> Result<SparseState> {
    Pipeline::qram_quantum(memory)?.apply(input)
}
