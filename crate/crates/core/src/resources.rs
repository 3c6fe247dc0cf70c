//! Exact depth, gate, and qubit accounting for every scheme, with the
//! qutrit-router baseline formulas for comparison.
//!
//! Counting conventions: a step is one conflict-free layer of elementary
//! gates, routers count one device per walker per node, parity-reset X
//! devices exist only at odd nodes, and query devices are counted per cell
//! at full data width (the census is content-independent). Counts come from
//! enumerating the constructed stage lists, never from asymptotics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::query::MemorySpec;
use crate::schemes::{Pipeline, QueryFlavor, StageOp};
use crate::state::Shape;

/// Kinds of elementary devices in the gate census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Roundabout,
    Rotation,
    CxColorColor,
    CxAddressColor,
    PauliX,
    HadamardLike,
    ControlledPhase,
}

impl GateKind {
    pub fn label(&self) -> &'static str {
        match self {
            GateKind::Roundabout => "roundabout",
            GateKind::Rotation => "rotation",
            GateKind::CxColorColor => "cx_cc",
            GateKind::CxAddressColor => "cx_ac",
            GateKind::PauliX => "pauli_x",
            GateKind::HadamardLike => "hadamard_like",
            GateKind::ControlledPhase => "cp",
        }
    }
}

/// Where a device sits: at a tree node (the terminal being node (0,0)), or
/// at a memory cell between the two trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Node { w: u32, level: u8 },
    Cell { address: u32 },
}

/// One elementary device application in the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct GateEvent {
    pub kind: GateKind,
    pub walkers: Vec<u8>,
    pub location: Location,
    pub layer: usize,
}

/// Devices of one stage at one location (tree node w for level stages, cell
/// address for query stages). Layers inside a multi-layer stage are offset
/// from `layer`.
pub fn stage_events_at(op: &StageOp, shape: &Shape, layer: usize, w: u32) -> Vec<GateEvent> {
    let walkers = shape.walkers();
    let mut events = Vec::new();
    match op {
        StageOp::ColorReset { level } => {
            if w % 2 == 1 {
                for j in 0..walkers {
                    events.push(GateEvent {
                        kind: GateKind::PauliX,
                        walkers: vec![j],
                        location: Location::Node { w, level: *level },
                        layer,
                    });
                }
            }
        }
        StageOp::AddressColorCx { level } => {
            events.push(GateEvent {
                kind: GateKind::CxAddressColor,
                walkers: vec![shape.n - 1 - level],
                location: Location::Node { w, level: *level },
                layer,
            });
        }
        StageOp::Cascade {
            level,
            layer: cascade_layer,
            ..
        } => {
            for &(c, t) in cascade_layer.pairs() {
                events.push(GateEvent {
                    kind: GateKind::CxColorColor,
                    walkers: vec![c as u8, t as u8],
                    location: Location::Node { w, level: *level },
                    layer,
                });
            }
        }
        StageOp::Roundabout { level, .. } => {
            for j in 0..walkers {
                events.push(GateEvent {
                    kind: GateKind::Roundabout,
                    walkers: vec![j],
                    location: Location::Node { w, level: *level },
                    layer,
                });
            }
        }
        StageOp::HadamardSplit { level, gates } => {
            if gates.contains_key(&w) {
                events.push(GateEvent {
                    kind: GateKind::HadamardLike,
                    walkers: vec![0],
                    location: Location::Node { w, level: *level },
                    layer,
                });
            }
        }
        StageOp::Query { flavor } => {
            let location = Location::Cell { address: w };
            match flavor {
                QueryFlavor::Classical => {
                    for j in shape.n..walkers {
                        events.push(GateEvent {
                            kind: GateKind::PauliX,
                            walkers: vec![j],
                            location,
                            layer,
                        });
                    }
                }
                QueryFlavor::Tilde => {
                    for j in 0..walkers {
                        events.push(GateEvent {
                            kind: GateKind::PauliX,
                            walkers: vec![j],
                            location,
                            layer,
                        });
                    }
                }
                QueryFlavor::Quantum => {
                    // Per data walker: encoder, three CNOTs, decoder.
                    for j in shape.n..walkers {
                        events.push(GateEvent {
                            kind: GateKind::Rotation,
                            walkers: vec![j],
                            location,
                            layer,
                        });
                        for step in 1..=3 {
                            events.push(GateEvent {
                                kind: GateKind::CxColorColor,
                                walkers: vec![j],
                                location,
                                layer: layer + step,
                            });
                        }
                        events.push(GateEvent {
                            kind: GateKind::Rotation,
                            walkers: vec![j],
                            location,
                            layer: layer + 4,
                        });
                    }
                }
            }
        }
    }
    events
}

/// The schemes the census covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Routing,
    Query,
    Output,
    RoutingTilde,
    QueryTilde,
    Qram,
    QramTilde,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Routing => "routing",
            Scheme::Query => "query",
            Scheme::Output => "output",
            Scheme::RoutingTilde => "routing-tilde",
            Scheme::QueryTilde => "query-tilde",
            Scheme::Qram => "qram",
            Scheme::QramTilde => "qram-tilde",
        }
    }
}

/// Exact counts for one scheme at one register size, plus the qutrit-router
/// baseline formulas evaluated at the same size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub scheme: Scheme,
    pub n: u8,
    pub m: u8,
    /// Conflict-free layers in the schedule.
    pub depth: u64,
    /// Installed elementary devices across the whole architecture.
    pub gate_count: u64,
    /// Walkers in flight: always n+m.
    pub qubit_count: u64,
    /// Baseline steps: n^2 + n*m.
    pub baseline_steps: u64,
    /// Baseline qubit resources: 2^n + m.
    pub baseline_qubits: u64,
    /// Baseline gate order: 2^n.
    pub baseline_gates: u64,
}

fn counting_pipeline(scheme: Scheme, n: u8, m: u8) -> Result<Pipeline> {
    let memory = MemorySpec::new(n, m)?;
    let all: std::collections::BTreeSet<u32> = (0..(1u32 << n)).collect();
    match scheme {
        Scheme::Routing => Pipeline::routing(n, m),
        Scheme::Output => Pipeline::output(n, m),
        Scheme::Query => Pipeline::query_only(&memory, QueryFlavor::Classical),
        Scheme::QueryTilde => Pipeline::query_only(&memory, QueryFlavor::Tilde),
        Scheme::RoutingTilde => Pipeline::routing_tilde(n, m, &all),
        Scheme::Qram => Pipeline::qram(&memory),
        Scheme::QramTilde => {
            let mut memory = memory;
            memory.set_designated(all)?;
            Pipeline::qram_tilde(&memory)
        }
    }
}

/// Enumerates every device of the scheme and checks that each layer only
/// touches disjoint walkers per location.
pub fn count_scheme(scheme: Scheme, n: u8, m: u8) -> Result<ResourceReport> {
    let shape = Shape::new(n, m)?;
    if n > 12 {
        return Err(Error::CensusTooLarge { n });
    }
    let pipeline = counting_pipeline(scheme, n, m)?;
    let mut gate_count = 0u64;
    let mut layer = 0usize;
    let mut per_slot: BTreeMap<(usize, Location), Vec<u8>> = BTreeMap::new();
    for stage in pipeline.stages() {
        let locations: Vec<u32> = match stage {
            StageOp::Query { .. } => (0..(1u32 << n)).collect(),
            other => {
                let level = other.level().expect("level stage");
                (0..(1u32 << level)).collect()
            }
        };
        for w in locations {
            for event in stage_events_at(stage, &shape, layer, w) {
                gate_count += 1;
                let slot = per_slot.entry((event.layer, event.location)).or_default();
                for &walker in &event.walkers {
                    if slot.contains(&walker) {
                        return Err(Error::CascadeConflict {
                            walkers: u16::from(shape.walkers()),
                            walker: u16::from(walker),
                            layer: event.layer,
                        });
                    }
                    slot.push(walker);
                }
            }
        }
        layer += stage.layer_count();
    }
    Ok(ResourceReport {
        scheme,
        n,
        m,
        depth: pipeline.depth(),
        gate_count,
        qubit_count: u64::from(shape.walkers()),
        baseline_steps: u64::from(n) * u64::from(n) + u64::from(n) * u64::from(m),
        baseline_qubits: (1u64 << n) + u64::from(m),
        baseline_gates: 1u64 << n,
    })
}

/// One row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingRow {
    pub n: u8,
    pub m: u8,
    pub depth: u64,
    pub gates: u64,
    pub qubits: u64,
    pub baseline_steps: u64,
    pub baseline_qubits: u64,
}

/// The comparison table over a grid of register sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub scheme: Scheme,
    pub rows: Vec<ScalingRow>,
}

pub fn scaling_table(
    scheme: Scheme,
    n_range: RangeInclusive<u8>,
    m_range: RangeInclusive<u8>,
) -> Result<ScalingTable> {
    let mut rows = Vec::new();
    for n in n_range.clone() {
        for m in m_range.clone() {
            let report = count_scheme(scheme, n, m)?;
            rows.push(ScalingRow {
                n,
                m,
                depth: report.depth,
                gates: report.gate_count,
                qubits: report.qubit_count,
                baseline_steps: report.baseline_steps,
                baseline_qubits: report.baseline_qubits,
            });
        }
    }
    Ok(ScalingTable { scheme, rows })
}

pub const TABLE_HEADER: [&str; 7] = [
    "n",
    "m",
    "depth",
    "gates",
    "qubits",
    "baseline_steps",
    "baseline_qubits",
];

impl ScalingRow {
    fn values(&self) -> [u64; 7] {
        [
            u64::from(self.n),
            u64::from(self.m),
            self.depth,
            self.gates,
            self.qubits,
            self.baseline_steps,
            self.baseline_qubits,
        ]
    }
}

impl ScalingTable {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = TABLE_HEADER.iter().map(|h| h.len()).collect();
        let rendered: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| r.values().map(|v| v.to_string()))
            .collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let header: Vec<String> = TABLE_HEADER
            .iter()
            .zip(&widths)
            .map(|(h, w)| format!("{h:>w$}"))
            .collect();
        out.push_str(&header.join("  "));
        out.push('\n');
        for row in &rendered {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(&line.join("  "));
            out.push('\n');
        }
        out
    }

    /// Comma-separated rendering: one header row, exact integers.
    pub fn to_csv(&self) -> String {
        let mut out = TABLE_HEADER.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.values().iter().map(u64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV rendering back; used to prove the table round-trips.
    pub fn parse_csv(text: &str) -> std::result::Result<Vec<ScalingRow>, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty table")?;
        if header != TABLE_HEADER.join(",") {
            return Err(format!("unexpected header {header:?}"));
        }
        let mut rows = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<u64> = line
                .split(',')
                .map(|c| c.trim().parse::<u64>().map_err(|e| format!("{c:?}: {e}")))
                .collect::<std::result::Result<_, _>>()?;
            if cells.len() != 7 {
                return Err(format!("row has {} cells", cells.len()));
            }
            rows.push(ScalingRow {
                n: cells[0] as u8,
                m: cells[1] as u8,
                depth: cells[2],
                gates: cells[3],
                qubits: cells[4],
                baseline_steps: cells[5],
                baseline_qubits: cells[6],
            });
        }
        Ok(rows)
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} m={}: depth={} gates={} qubits={} | baseline steps={} qubits={} gates={}",
            self.scheme.label(),
            self.n,
            self.m,
            self.depth,
            self.gate_count,
            self.qubit_count,
            self.baseline_steps,
            self.baseline_qubits,
            self.baseline_gates
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_counts_and_baselines() {
        let report = count_scheme(Scheme::Routing, 3, 2).unwrap();
        assert_eq!(report.qubit_count, 5);
        assert_eq!(report.baseline_qubits, 10);
        assert_eq!(report.baseline_steps, 9 + 6);
        assert_eq!(report.baseline_gates, 8);

        let tiny = count_scheme(Scheme::Routing, 1, 1).unwrap();
        assert_eq!(tiny.qubit_count, 2);
    }

    #[test]
    fn qram_depth_is_mirror_symmetric() {
        for n in 1..=4u8 {
            for m in 1..=3u8 {
                let f = count_scheme(Scheme::Routing, n, m).unwrap();
                let q = count_scheme(Scheme::Query, n, m).unwrap();
                let full = count_scheme(Scheme::Qram, n, m).unwrap();
                assert_eq!(full.depth, 2 * f.depth + q.depth);
                let out = count_scheme(Scheme::Output, n, m).unwrap();
                assert_eq!(out.depth, f.depth);
                assert_eq!(out.gate_count, f.gate_count);
            }
        }
    }

    #[test]
    fn routing_depth_formula() {
        // Per level: reset, address write, p cascade layers, router; plus
        // the leaf reset.
        for (n, m) in [(1u8, 1u8), (3, 2), (8, 8), (5, 1)] {
            let p = (u32::from(n) + u32::from(m))
                .next_power_of_two()
                .trailing_zeros() as u64;
            let report = count_scheme(Scheme::Routing, n, m).unwrap();
            assert_eq!(report.depth, u64::from(n) * (p + 3) + 1);
        }
    }

    #[test]
    fn depth_is_monotone_in_n() {
        for m in 1..=4u8 {
            let mut last = 0;
            for n in 1..=6u8 {
                let depth = count_scheme(Scheme::Routing, n, m).unwrap().depth;
                assert!(depth >= last);
                last = depth;
            }
        }
    }

    #[test]
    fn scaling_ratios_stay_in_a_narrow_band() {
        let mut depth_ratios = Vec::new();
        let mut gate_ratios = Vec::new();
        for n in 1..=8u8 {
            for m in 1..=8u8 {
                let report = count_scheme(Scheme::Routing, n, m).unwrap();
                let p = (u32::from(n) + u32::from(m))
                    .next_power_of_two()
                    .trailing_zeros() as f64;
                depth_ratios.push(report.depth as f64 / (f64::from(n) * p));
                let scale = f64::from(n + m) * (1u64 << n) as f64;
                gate_ratios.push(report.gate_count as f64 / scale);
                assert_eq!(report.qubit_count, u64::from(n) + u64::from(m));
            }
        }
        for ratios in [depth_ratios, gate_ratios] {
            let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
            assert!(max / min <= 4.0, "band too wide: {min}..{max}");
        }
    }

    #[test]
    fn csv_round_trips() {
        let table = scaling_table(Scheme::Qram, 1..=3, 1..=2).unwrap();
        let parsed = ScalingTable::parse_csv(&table.to_csv()).unwrap();
        assert_eq!(parsed, table.rows);
        // Re-render for byte identity.
        let again = ScalingTable {
            scheme: Scheme::Qram,
            rows: parsed,
        };
        assert_eq!(again.to_csv(), table.to_csv());
    }

    #[test]
    fn table_grid_size() {
        let table = scaling_table(Scheme::Routing, 1..=8, 1..=8).unwrap();
        assert_eq!(table.rows.len(), 64);
        let text = table.to_text();
        assert_eq!(text.lines().count(), 65);
        assert!(text.lines().next().unwrap().contains("baseline_qubits"));
    }

    #[test]
    fn conflict_check_passes_for_all_schemes() {
        for scheme in [
            Scheme::Routing,
            Scheme::Query,
            Scheme::Output,
            Scheme::RoutingTilde,
            Scheme::QueryTilde,
            Scheme::Qram,
            Scheme::QramTilde,
        ] {
            assert!(count_scheme(scheme, 3, 2).is_ok(), "{scheme:?}");
        }
    }
}
