//! Querying at the leaves: XOR-loading classical rows into the data
//! register, the variant that also writes the cell address back into the
//! address register, and the swap-based transfer of quantum cell contents.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{BasisState, OpImage, Shape, SparseState, NORM_TOLERANCE};

/// Contents of one memory cell: an m-bit word, or an m-qubit state vector of
/// 2^m amplitudes for the quantum-transfer mode.
#[derive(Debug, Clone, PartialEq)]
pub enum CellContents {
    Classical(u32),
    Quantum(Vec<Complex64>),
}

/// The memory configuration: register widths, per-cell contents (unlisted
/// cells hold the zero word), and the optional designated address set used
/// by the superposition-building scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct MemorySpec {
    shape: Shape,
    cells: BTreeMap<u32, CellContents>,
    designated: Option<BTreeSet<u32>>,
}

impl MemorySpec {
    pub fn new(n: u8, m: u8) -> Result<Self> {
        Ok(MemorySpec {
            shape: Shape::new(n, m)?,
            cells: BTreeMap::new(),
            designated: None,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n(&self) -> u8 {
        self.shape.n
    }

    pub fn m(&self) -> u8 {
        self.shape.m
    }

    pub fn set_cell(&mut self, address: u32, contents: CellContents) -> Result<()> {
        if u64::from(address) >= self.shape.address_count() {
            return Err(Error::AddressOutOfRange {
                address: u64::from(address),
                n: self.shape.n,
            });
        }
        if self.cells.contains_key(&address) {
            return Err(Error::BadCell {
                address,
                reason: "duplicate cell".into(),
            });
        }
        match &contents {
            CellContents::Classical(word) => {
                if u64::from(*word) >= (1u64 << self.shape.m) {
                    return Err(Error::BadCell {
                        address,
                        reason: format!("word {word:#b} wider than m={}", self.shape.m),
                    });
                }
            }
            CellContents::Quantum(vec) => {
                if vec.len() != 1usize << self.shape.m {
                    return Err(Error::BadCell {
                        address,
                        reason: format!(
                            "quantum cell needs {} amplitudes, got {}",
                            1usize << self.shape.m,
                            vec.len()
                        ),
                    });
                }
                let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(Error::BadCell {
                        address,
                        reason: format!("quantum cell has norm {norm}"),
                    });
                }
            }
        }
        self.cells.insert(address, contents);
        Ok(())
    }

    pub fn set_designated(&mut self, designated: BTreeSet<u32>) -> Result<()> {
        if designated.is_empty() {
            return Err(Error::EmptyAddresses);
        }
        for &a in &designated {
            if u64::from(a) >= self.shape.address_count() {
                return Err(Error::AddressOutOfRange {
                    address: u64::from(a),
                    n: self.shape.n,
                });
            }
        }
        self.designated = Some(designated);
        Ok(())
    }

    pub fn designated(&self) -> Option<&BTreeSet<u32>> {
        self.designated.as_ref()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&u32, &CellContents)> {
        self.cells.iter()
    }

    pub fn has_quantum_cells(&self) -> bool {
        self.cells
            .values()
            .any(|c| matches!(c, CellContents::Quantum(_)))
    }

    /// The classical word stored at `address`; unlisted cells read as zero.
    pub fn classical_word(&self, address: u32) -> std::result::Result<u32, String> {
        match self.cells.get(&address) {
            None => Ok(0),
            Some(CellContents::Classical(word)) => Ok(*word),
            Some(CellContents::Quantum(_)) => Err(format!(
                "cell {address} holds quantum contents; classical query undefined"
            )),
        }
    }

    /// The quantum vector stored at `address`; a classical or unlisted cell
    /// has no walker register to transfer from.
    pub fn quantum_vector(&self, address: u32) -> std::result::Result<&[Complex64], String> {
        match self.cells.get(&address) {
            Some(CellContents::Quantum(vec)) => Ok(vec),
            Some(CellContents::Classical(_)) | None => Err(format!(
                "cell {address} is classical; quantum query undefined"
            )),
        }
    }
}

fn at_leaf(basis: &BasisState, n: u8) -> std::result::Result<(), String> {
    if basis.bus.level != n {
        return Err(format!("bus at level {} is not a leaf", basis.bus.level));
    }
    Ok(())
}

/// Basis action of the classical query: XOR the addressed cell's word into
/// the data register. Address, bus, and colors are untouched.
pub(crate) fn classical_image(
    memory: &MemorySpec,
    basis: &BasisState,
) -> std::result::Result<OpImage, String> {
    at_leaf(basis, memory.n())?;
    let word = memory.classical_word(basis.bus.w)?;
    let mut out = *basis;
    out.data ^= word;
    Ok(vec![(out, Complex64::new(1.0, 0.0))])
}

/// Basis action of the address-writing query: requires a cleared address
/// register, then XORs the leaf index into it alongside the data word.
pub(crate) fn tilde_image(
    memory: &MemorySpec,
    basis: &BasisState,
) -> std::result::Result<OpImage, String> {
    at_leaf(basis, memory.n())?;
    if basis.address != 0 {
        return Err(format!(
            "address register {:#b} not cleared at entry",
            basis.address
        ));
    }
    let word = memory.classical_word(basis.bus.w)?;
    let mut out = *basis;
    out.address ^= basis.bus.w;
    out.data ^= word;
    Ok(vec![(out, Complex64::new(1.0, 0.0))])
}

/// Basis action of the quantum transfer. On first contact the addressed
/// cell's register joins the tracked basis (the data register must be
/// cleared so the joint state stays representable); the swap itself is the
/// three-CNOT exchange between the cell register and the data register, and
/// leaves the cell cleared.
pub(crate) fn quantum_image(
    memory: &MemorySpec,
    basis: &BasisState,
) -> std::result::Result<OpImage, String> {
    at_leaf(basis, memory.n())?;
    let vec = memory.quantum_vector(basis.bus.w)?;
    let swap = |cell: u32, data: u32| -> (u32, u32) {
        let data = data ^ cell;
        let cell = cell ^ data;
        let data = data ^ cell;
        (cell, data)
    };
    match basis.cell {
        None => {
            if basis.data != 0 {
                return Err(format!(
                    "data register {:#b} not cleared at quantum query",
                    basis.data
                ));
            }
            let mut image = Vec::new();
            for (x, amp) in vec.iter().enumerate() {
                if amp.norm() == 0.0 {
                    continue;
                }
                let (cell, data) = swap(x as u32, basis.data);
                let mut out = *basis;
                out.cell = Some(cell);
                out.data = data;
                image.push((out, *amp));
            }
            Ok(image)
        }
        Some(cell) => {
            let (cell, data) = swap(cell, basis.data);
            let mut out = *basis;
            out.cell = Some(cell);
            out.data = data;
            Ok(vec![(out, Complex64::new(1.0, 0.0))])
        }
    }
}

/// Loads the classical word of the cell under each leaf into the data
/// register, branch by branch.
pub fn query_classical(memory: &MemorySpec, state: &SparseState) -> Result<SparseState> {
    memory.shape().matches(state.shape())?;
    state.apply("query_classical", |b| classical_image(memory, b))
}

/// Loads the data word and writes the cell address into the (cleared)
/// address register, branch by branch.
pub fn query_tilde(memory: &MemorySpec, state: &SparseState) -> Result<SparseState> {
    memory.shape().matches(state.shape())?;
    state.apply("query_tilde", |b| tilde_image(memory, b))
}

/// Transfers the quantum contents of the addressed cell into the data
/// register by the three-CNOT swap, leaving the cell register cleared.
pub fn query_quantum(memory: &MemorySpec, state: &SparseState) -> Result<SparseState> {
    memory.shape().matches(state.shape())?;
    state.apply("query_quantum", |b| quantum_image(memory, b))
}
