//! The composite register basis and the sparse complex state vector every
//! scheme operates on.
//!
//! A basis term fixes one classical configuration of the address register,
//! the bus label (w, level), the n+m walker colors, the data register, and
//! (in quantum-query mode only) the addressed cell's internal register. The
//! reachable support of the schemes stays tiny, so states are kept as maps
//! from term to amplitude; dense vectors over the full product space are
//! never materialized.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DomainError, Error, Result};
use crate::tree::NodeId;

/// Amplitudes with modulus below this are dropped after every operator; the
/// cut is five orders under the 1e-10 verification tolerance, so only
/// floating-point dust goes.
pub const PRUNE_TOLERANCE: f64 = 1e-15;

/// Norm and fidelity checks throughout the crate default to this.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Register widths: n address qubits, m data qubits, n+m walkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    /// Address register width.
    pub n: u8,
    /// Data register width.
    pub m: u8,
}

impl Shape {
    pub fn new(n: u8, m: u8) -> Result<Self> {
        if n == 0 || m == 0 || n + m > 32 {
            return Err(Error::BadShape { n, m });
        }
        Ok(Shape { n, m })
    }

    pub fn walkers(&self) -> u8 {
        self.n + self.m
    }

    pub fn color_mask(&self) -> u32 {
        mask(self.walkers())
    }

    pub fn address_count(&self) -> u64 {
        1u64 << self.n
    }

    pub fn matches(&self, other: &Shape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                n1: self.n,
                m1: self.m,
                n2: other.n,
                m2: other.m,
            });
        }
        Ok(())
    }
}

fn mask(bits: u8) -> u32 {
    if bits >= 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

/// One classical configuration of the composite register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub address: u32,
    pub bus: NodeId,
    pub colors: u32,
    pub data: u32,
    /// Internal register of the addressed memory cell; tracked only once a
    /// quantum query has entangled it with the walkers.
    pub cell: Option<u32>,
}

impl BasisState {
    /// A term parked at the terminal: bus (0,0), colors 0, data 0.
    pub fn terminal(address: u32) -> Self {
        BasisState {
            address,
            bus: NodeId::root(),
            colors: 0,
            data: 0,
            cell: None,
        }
    }

    /// Render with register widths, for dumps and error messages:
    /// `a=101 bus=(5,3) c=00000 d=10`.
    pub fn render(&self, shape: &Shape) -> String {
        let mut s = format!(
            "a={:0aw$b} bus={} c={:0cw$b} d={:0dw$b}",
            self.address,
            self.bus,
            self.colors,
            self.data,
            aw = shape.n as usize,
            cw = shape.walkers() as usize,
            dw = shape.m as usize,
        );
        if let Some(cell) = self.cell {
            s.push_str(&format!(" cell={:0dw$b}", cell, dw = shape.m as usize));
        }
        s
    }

    fn validate(&self, shape: &Shape) -> Result<()> {
        let ok = u64::from(self.address) < shape.address_count()
            && self.bus.level <= shape.n
            && u64::from(self.bus.w) < (1u64 << self.bus.level)
            && self.colors <= shape.color_mask()
            && self.data <= mask(shape.m)
            && self.cell.is_none_or(|c| c <= mask(shape.m));
        if ok {
            Ok(())
        } else {
            Err(Error::BadShape {
                n: shape.n,
                m: shape.m,
            })
        }
    }
}

/// Image of one basis term under an operator: a few (term, coefficient)
/// pairs. Permutation-like operators return one pair; splitters return two.
pub type OpImage = Vec<(BasisState, Complex64)>;

/// A superposition as a sorted map from basis term to amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    shape: Shape,
    terms: BTreeMap<BasisState, Complex64>,
}

impl SparseState {
    /// The input superposition over `addresses` with the bus, colors and
    /// data registers zeroed. Weights default to uniform and are normalized.
    pub fn make_input(
        addresses: &[u32],
        weights: Option<&[Complex64]>,
        n: u8,
        m: u8,
    ) -> Result<Self> {
        let shape = Shape::new(n, m)?;
        if addresses.is_empty() {
            return Err(Error::EmptyAddresses);
        }
        for (i, &a) in addresses.iter().enumerate() {
            if u64::from(a) >= shape.address_count() {
                return Err(Error::AddressOutOfRange {
                    address: u64::from(a),
                    n,
                });
            }
            if addresses[..i].contains(&a) {
                return Err(Error::DuplicateAddress {
                    address: u64::from(a),
                });
            }
        }
        let weights: Vec<Complex64> = match weights {
            Some(w) => {
                if w.len() != addresses.len() {
                    return Err(Error::WeightCountMismatch {
                        given: w.len(),
                        expected: addresses.len(),
                    });
                }
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < PRUNE_TOLERANCE {
                    return Err(Error::ZeroNormWeights);
                }
                w.iter().map(|z| z / norm).collect()
            }
            None => {
                let amp = Complex64::new(1.0 / (addresses.len() as f64).sqrt(), 0.0);
                vec![amp; addresses.len()]
            }
        };
        let terms = addresses
            .iter()
            .zip(weights)
            .map(|(&a, w)| (BasisState::terminal(a), w))
            .collect();
        let mut state = SparseState { shape, terms };
        state.prune();
        Ok(state)
    }

    /// Builds a state from explicit terms, validating ranges and summing
    /// duplicates. No normalization is applied.
    pub fn from_terms<I>(shape: Shape, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, Complex64)>,
    {
        let mut map: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for (basis, amp) in terms {
            basis.validate(&shape)?;
            *map.entry(basis).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut state = SparseState { shape, terms: map };
        state.prune();
        Ok(state)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, basis: &BasisState) -> Complex64 {
        self.terms
            .get(basis)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.terms
            .values()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Linear extension of a basis map. The closure returns the image of a
    /// single term, or a reason string when the operator is undefined there
    /// (which becomes a DomainError naming the operator and term).
    pub fn apply<F>(&self, operator: &str, mut op: F) -> Result<Self>
    where
        F: FnMut(&BasisState) -> std::result::Result<OpImage, String>,
    {
        let mut out: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for (basis, amp) in &self.terms {
            let image = op(basis).map_err(|reason| {
                Error::Domain(DomainError {
                    operator: operator.to_string(),
                    term: basis.render(&self.shape),
                    reason,
                })
            })?;
            for (target, coeff) in image {
                debug_assert!(target.validate(&self.shape).is_ok());
                *out.entry(target).or_insert(Complex64::new(0.0, 0.0)) += amp * coeff;
            }
        }
        let mut state = SparseState {
            shape: self.shape,
            terms: out,
        };
        state.prune();
        Ok(state)
    }

    /// Drops terms with |amplitude| below PRUNE_TOLERANCE. Surviving
    /// amplitudes are untouched.
    pub fn prune(&mut self) {
        self.terms.retain(|_, amp| amp.norm() >= PRUNE_TOLERANCE);
    }

    /// |<self|other>|^2, clamped into the unit interval against rounding.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.shape.matches(&other.shape)?;
        let mut overlap = Complex64::new(0.0, 0.0);
        for (basis, amp) in &self.terms {
            overlap += amp.conj() * other.amplitude(basis);
        }
        Ok(overlap.norm_sqr().clamp(0.0, 1.0))
    }

    /// Scales every amplitude by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let terms = self.terms.iter().map(|(b, a)| (*b, a * factor)).collect();
        let mut state = SparseState {
            shape: self.shape,
            terms,
        };
        state.prune();
        state
    }

    /// Term-wise sum of two states over the same registers.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.shape.matches(&other.shape)?;
        let mut terms = self.terms.clone();
        for (basis, amp) in &other.terms {
            *terms.entry(*basis).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut state = SparseState {
            shape: self.shape,
            terms,
        };
        state.prune();
        Ok(state)
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (basis, amp) in &self.terms {
            writeln!(
                f,
                "{} amp={:.12},{:.12}",
                basis.render(&self.shape),
                amp.re + 0.0,
                amp.im + 0.0
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn single_address_input() {
        let s = SparseState::make_input(&[5], None, 3, 2).unwrap();
        assert_eq!(s.len(), 1);
        let term = BasisState::terminal(5);
        assert_eq!(s.amplitude(&term), ONE);
        assert_eq!(term.render(s.shape()), "a=101 bus=(0,0) c=00000 d=00");
    }

    #[test]
    fn three_address_uniform_input() {
        let s = SparseState::make_input(&[1, 3, 6], None, 3, 1).unwrap();
        assert_eq!(s.len(), 3);
        let expected = 1.0 / 3.0f64.sqrt();
        for a in [1, 3, 6] {
            let amp = s.amplitude(&BasisState::terminal(a));
            assert!((amp.re - expected).abs() < 1e-15 && amp.im == 0.0);
        }
    }

    #[test]
    fn signed_weights_are_normalized() {
        let w = [ONE, -ONE];
        let s = SparseState::make_input(&[0, 1], Some(&w), 1, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(&BasisState::terminal(0)).re - r).abs() < 1e-15);
        assert!((s.amplitude(&BasisState::terminal(1)).re + r).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_validation_errors() {
        assert!(matches!(
            SparseState::make_input(&[], None, 2, 1),
            Err(Error::EmptyAddresses)
        ));
        assert!(matches!(
            SparseState::make_input(&[4], None, 2, 1),
            Err(Error::AddressOutOfRange { .. })
        ));
        assert!(matches!(
            SparseState::make_input(&[1, 1], None, 2, 1),
            Err(Error::DuplicateAddress { .. })
        ));
        let zeros = [Complex64::new(0.0, 0.0); 2];
        assert!(matches!(
            SparseState::make_input(&[0, 1], Some(&zeros), 1, 1),
            Err(Error::ZeroNormWeights)
        ));
        assert!(matches!(
            SparseState::make_input(&[0, 1], Some(&[ONE]), 1, 1),
            Err(Error::WeightCountMismatch { .. })
        ));
    }

    #[test]
    fn identity_and_bitflip_ops() {
        let s = SparseState::make_input(&[2], None, 2, 1).unwrap();
        let id = s.apply("identity", |b| Ok(vec![(*b, ONE)])).unwrap();
        assert_eq!(id, s);

        // Pauli-X on data bit 0.
        let flipped = s
            .apply("x_data0", |b| {
                let mut out = *b;
                out.data ^= 1;
                Ok(vec![(out, ONE)])
            })
            .unwrap();
        let mut expect = BasisState::terminal(2);
        expect.data = 1;
        assert_eq!(flipped.amplitude(&expect), ONE);
    }

    #[test]
    fn global_phase_op_negates_amplitude() {
        use crate::gates::ColorUnitary;
        let u = ColorUnitary::from_angles(std::f64::consts::PI, 0.0, 0.0, 0.0);
        let s = SparseState::make_input(&[0], None, 1, 1).unwrap();
        let out = s
            .apply("global_phase", |b| {
                // Apply u to walker 0's color and rebuild the word.
                let imgs = u
                    .column(b.colors & 1)
                    .into_iter()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(bit, c)| {
                        let mut t = *b;
                        t.colors = (t.colors & !1) | bit;
                        (t, c)
                    })
                    .collect();
                Ok(imgs)
            })
            .unwrap();
        let amp = out.amplitude(&BasisState::terminal(0));
        assert!((amp + ONE).norm() < 1e-12);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_error_carries_operator_and_term() {
        let s = SparseState::make_input(&[1], None, 2, 2).unwrap();
        let err = s
            .apply("router", |_| Err("mixed colors".to_string()))
            .unwrap_err();
        match err {
            Error::Domain(d) => {
                assert_eq!(d.operator, "router");
                assert!(d.term.contains("a=01"));
                assert_eq!(d.reason, "mixed colors");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn fidelity_examples() {
        let s = SparseState::make_input(&[0, 1], None, 1, 1).unwrap();
        assert!((s.fidelity(&s).unwrap() - 1.0).abs() < 1e-14);

        let a = SparseState::make_input(&[0], None, 1, 1).unwrap();
        let b = SparseState::make_input(&[1], None, 1, 1).unwrap();
        assert_eq!(a.fidelity(&b).unwrap(), 0.0);

        assert!((s.fidelity(&a).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fidelity_shape_mismatch() {
        let a = SparseState::make_input(&[0], None, 1, 1).unwrap();
        let b = SparseState::make_input(&[0], None, 2, 1).unwrap();
        assert!(matches!(a.fidelity(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn pruning_only_removes_dust() {
        let shape = Shape::new(1, 1).unwrap();
        let big = BasisState::terminal(0);
        let mut small = BasisState::terminal(1);
        small.data = 1;
        let state =
            SparseState::from_terms(shape, [(big, ONE), (small, Complex64::new(1e-16, 0.0))])
                .unwrap();
        assert_eq!(state.len(), 1);
        assert_eq!(state.amplitude(&big), ONE);
    }

    #[test]
    fn from_terms_rejects_out_of_range() {
        let shape = Shape::new(1, 1).unwrap();
        let mut bad = BasisState::terminal(0);
        bad.colors = 0b100; // only two walkers exist
        assert!(SparseState::from_terms(shape, [(bad, ONE)]).is_err());
    }
}
