//! Color encoding: the parity reset, the address-to-color write, and the
//! logarithmic-depth CNOT fan-out cascade that copies one walker's color to
//! all n+m walkers.
//!
//! The cascade doubles the encoded set every round, so ceil(log2(n+m))
//! conflict-free layers and exactly n+m-1 CNOTs suffice. Walker indices are
//! cyclic (mod n+m). When n+m is a power of two the construction emits the
//! closed-form schedule verbatim; otherwise offsets are generated over the
//! enclosing power of two and pairs whose target is already encoded are
//! dropped.

use crate::error::{Error, Result};
use crate::state::SparseState;

/// One conflict-free layer of color-color CNOTs, stored as (control, target)
/// walker pairs with pairwise distinct indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeLayer {
    pairs: Vec<(u16, u16)>,
}

impl CascadeLayer {
    /// Wraps a pair list, rejecting any layer that touches a walker twice.
    pub fn new(pairs: Vec<(u16, u16)>, walkers: u16, layer: usize) -> Result<Self> {
        let mut seen = vec![false; usize::from(walkers)];
        for &(c, t) in &pairs {
            for idx in [c, t] {
                if idx >= walkers || seen[usize::from(idx)] {
                    return Err(Error::CascadeConflict {
                        walkers,
                        walker: idx,
                        layer,
                    });
                }
                seen[usize::from(idx)] = true;
            }
        }
        Ok(CascadeLayer { pairs })
    }

    pub fn pairs(&self) -> &[(u16, u16)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// XOR action on a color word (walkers must fit in 32 bits here).
    pub fn apply_word(&self, colors: u32) -> u32 {
        let mut out = colors;
        for &(c, t) in &self.pairs {
            if (out >> c) & 1 == 1 {
                out ^= 1 << t;
            }
        }
        out
    }
}

/// The fan-out schedule sourced from walker r = n-1-level. Layer k doubles
/// the encoded set; after ceil(log2(n+m)) layers every walker carries the
/// source color (given all other colors start at 0).
pub fn build_cascade(level: u8, n: u8, m: u8) -> Result<Vec<CascadeLayer>> {
    if n == 0 || m == 0 {
        return Err(Error::BadShape { n, m });
    }
    if level >= n {
        return Err(Error::LevelOutOfRange { level, depth: n });
    }
    let walkers = u32::from(n) + u32::from(m);
    let source = i64::from(n) - 1 - i64::from(level);
    let p = walkers.next_power_of_two().trailing_zeros();
    let period = 1i64 << p;
    let reduce = |v: i64| -> u16 { v.rem_euclid(i64::from(walkers)) as u16 };

    let mut encoded = vec![false; walkers as usize];
    encoded[reduce(source) as usize] = true;
    let mut layers = Vec::with_capacity(p as usize);
    for round in 1..=p {
        let mut formula: Vec<(i64, i64)> = Vec::new();
        if round == 1 {
            formula.push((source, source + period / 2));
        } else {
            let k = round - 1;
            let src_gap = 1i64 << (p - k);
            let tgt_gap = 1i64 << (p - k - 1);
            for s in 0..(1i64 << (k - 1)) {
                let a = source - s * src_gap;
                let b = source + period / 2 - s * src_gap;
                formula.push((a, a - tgt_gap));
                formula.push((b, b - tgt_gap));
            }
        }
        let mut pairs = Vec::new();
        for (ctl, tgt) in formula {
            let (ctl, tgt) = (reduce(ctl), reduce(tgt));
            // Controls always reduce onto already-encoded walkers; a target
            // that is already encoded would be a redundant (and conflicting)
            // write, which only happens off the power-of-two sizes.
            assert!(encoded[ctl as usize], "cascade control not yet encoded");
            if encoded[tgt as usize] {
                continue;
            }
            encoded[tgt as usize] = true;
            pairs.push((ctl, tgt));
        }
        layers.push(CascadeLayer::new(
            pairs,
            walkers as u16,
            round as usize - 1,
        )?);
    }
    if let Some(idx) = encoded.iter().position(|&e| !e) {
        return Err(Error::CascadeIncomplete {
            walkers: walkers as u16,
            walker: idx as u16,
        });
    }
    Ok(layers)
}

/// Applies every layer in order to a color word.
pub fn apply_cascade_word(layers: &[CascadeLayer], colors: u32) -> u32 {
    layers.iter().fold(colors, |c, layer| layer.apply_word(c))
}

/// The parity reset at node (w, level): identity for even w, flip of all
/// colors for odd w. Defined only on uniform color words.
pub fn color_reset(w: u32, colors: u32, walkers: u8) -> std::result::Result<u32, String> {
    let mask = if walkers >= 32 {
        u32::MAX
    } else {
        (1u32 << walkers) - 1
    };
    if colors != 0 && colors != mask {
        return Err(format!("mixed colors {colors:#b} at parity reset"));
    }
    Ok(if w % 2 == 1 { colors ^ mask } else { colors })
}

/// Writes address bit n-1-level into walker n-1-level's color and fans it
/// out to every walker. Colors must be reset to red on entry; afterwards all
/// n+m colors equal the address bit and the address register is untouched.
pub fn encode_address_bit(level: u8, state: &SparseState) -> Result<SparseState> {
    let shape = *state.shape();
    let layers = build_cascade(level, shape.n, shape.m)?;
    let source = shape.n - 1 - level;
    state.apply(&format!("encode_address_bit@{level}"), |basis| {
        if basis.colors != 0 {
            return Err(format!(
                "colors {:#b} not reset before encoding",
                basis.colors
            ));
        }
        let bit = (basis.address >> source) & 1;
        let mut out = *basis;
        out.colors = apply_cascade_word(&layers, bit << source);
        Ok(vec![(out, num_complex::Complex64::new(1.0, 0.0))])
    })
}

/// Fans walker 0's color out to every walker, branchwise: the cascade with
/// source r = 0 and no address write. Walkers 1..n+m-1 must be red on entry.
pub fn fan_out_color(state: &SparseState) -> Result<SparseState> {
    let shape = *state.shape();
    let layers = build_cascade(shape.n - 1, shape.n, shape.m)?;
    state.apply("fan_out_color", |basis| {
        if basis.colors & !1 != 0 {
            return Err(format!(
                "colors {:#b}: walkers other than 0 must be red before fan-out",
                basis.colors
            ));
        }
        let mut out = *basis;
        out.colors = apply_cascade_word(&layers, basis.colors);
        Ok(vec![(out, num_complex::Complex64::new(1.0, 0.0))])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{BasisState, Shape, SparseState};
    use num_complex::Complex64;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    /// Direct expansion of the closed-form power-of-two schedule, kept
    /// independent of the builder's clipping logic.
    fn closed_form_layers(level: u8, n: u8, m: u8) -> Vec<Vec<(u16, u16)>> {
        let walkers = i64::from(n) + i64::from(m);
        assert!(walkers.count_ones() == 1);
        let p = walkers.trailing_zeros() as i64;
        let r = i64::from(n) - 1 - i64::from(level);
        let md = |v: i64| v.rem_euclid(walkers) as u16;
        let mut layers = vec![vec![(md(r), md(r + walkers / 2))]];
        for k in 1..p {
            let mut layer = Vec::new();
            for s in 0..(1i64 << (k - 1)) {
                let a = r - s * (1 << (p - k));
                let b = r + (1 << (p - 1)) - s * (1 << (p - k));
                layer.push((md(a), md(a - (1 << (p - k - 1)))));
                layer.push((md(b), md(b - (1 << (p - k - 1)))));
            }
            layers.push(layer);
        }
        layers
    }

    #[test]
    fn golden_layers_for_sixteen_walkers() {
        // n=8, m=8, level 2: source walker 5, period 16. All four layers
        // expanded by hand from the closed form.
        let layers = build_cascade(2, 8, 8).unwrap();
        assert_eq!(layers.len(), 4);
        assert_eq!(layers[0].pairs(), &[(5, 13)]);
        assert_eq!(layers[1].pairs(), &[(5, 1), (13, 9)]);
        assert_eq!(layers[2].pairs(), &[(5, 3), (13, 11), (1, 15), (9, 7)]);
        assert_eq!(
            layers[3].pairs(),
            &[
                (5, 4),
                (13, 12),
                (3, 2),
                (11, 10),
                (1, 0),
                (9, 8),
                (15, 14),
                (7, 6)
            ]
        );
    }

    #[test]
    fn two_walker_cascade_is_one_cnot() {
        let layers = build_cascade(0, 1, 1).unwrap();
        assert_eq!(layers.len(), 1);
        assert_eq!(layers[0].pairs(), &[(0, 1)]);
    }

    #[test]
    fn power_of_two_matches_closed_form() {
        for (n, m) in [
            (1u8, 1u8),
            (2, 2),
            (3, 1),
            (4, 4),
            (5, 3),
            (8, 8),
            (16, 16),
            (20, 12),
        ] {
            for level in 0..n {
                let built = build_cascade(level, n, m).unwrap();
                let expected = closed_form_layers(level, n, m);
                assert_eq!(built.len(), expected.len());
                for (b, e) in built.iter().zip(&expected) {
                    assert_eq!(b.pairs(), e.as_slice(), "n={n} m={m} level={level}");
                }
            }
        }
    }

    #[test]
    fn layer_and_gate_counts_for_all_sizes() {
        for total in 2..=256u16 {
            let splits = [
                (1, total - 1),
                (total / 2, total - total / 2),
                (total - 1, 1),
            ];
            for &(n, m) in &splits {
                if n == 0 || m == 0 || n > 255 || m > 255 {
                    continue;
                }
                let (n, m) = (n as u8, m as u8);
                for level in [0, n / 2, n - 1] {
                    let layers = build_cascade(level, n, m).unwrap();
                    let p = (u32::from(total)).next_power_of_two().trailing_zeros();
                    assert_eq!(
                        layers.len(),
                        p as usize,
                        "total={total} n={n} level={level}"
                    );
                    let gates: usize = layers.iter().map(CascadeLayer::len).sum();
                    assert_eq!(gates, usize::from(total) - 1);
                }
            }
        }
    }

    #[test]
    fn fan_out_correctness_exhaustive_small() {
        // All sizes up to 16 walkers, all splits, all levels, both bits.
        for total in 2..=16u8 {
            for n in 1..total {
                let m = total - n;
                for level in 0..n {
                    let layers = build_cascade(level, n, m).unwrap();
                    let source = n - 1 - level;
                    let mask = (1u32 << total) - 1;
                    for bit in 0..2u32 {
                        let out = apply_cascade_word(&layers, bit << source);
                        assert_eq!(
                            out,
                            if bit == 1 { mask } else { 0 },
                            "total={total} n={n} level={level} bit={bit}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cascade_then_mirror_is_identity_on_all_words() {
        // The output scheme u-turns through the mirrored cascade; each layer
        // is self-inverse, so reversing the layer order inverts the whole
        // schedule on every color word, not just the reachable ones.
        for total in 2..=8u8 {
            for n in 1..total {
                let m = total - n;
                for level in 0..n {
                    let layers = build_cascade(level, n, m).unwrap();
                    let reversed: Vec<CascadeLayer> = layers.iter().rev().cloned().collect();
                    for word in 0..(1u32 << total) {
                        let there = apply_cascade_word(&layers, word);
                        assert_eq!(apply_cascade_word(&reversed, there), word);
                    }
                }
            }
        }
    }

    #[test]
    fn layers_are_self_inverse() {
        for (n, m) in [(3u8, 5u8), (4, 3), (2, 2)] {
            for layer in build_cascade(0, n, m).unwrap() {
                for word in 0..(1u32 << (n + m)) {
                    assert_eq!(layer.apply_word(layer.apply_word(word)), word);
                }
            }
        }
    }

    #[test]
    fn conflicting_layer_is_rejected() {
        assert!(matches!(
            CascadeLayer::new(vec![(0, 1), (1, 2)], 4, 0),
            Err(Error::CascadeConflict { walker: 1, .. })
        ));
        assert!(CascadeLayer::new(vec![(0, 1), (2, 3)], 4, 0).is_ok());
    }

    #[test]
    fn bad_level_is_rejected() {
        assert!(matches!(
            build_cascade(3, 3, 1),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn color_reset_examples() {
        assert_eq!(color_reset(3, 0b1111, 4), Ok(0));
        assert_eq!(color_reset(2, 0b1111, 4), Ok(0b1111));
        assert_eq!(color_reset(2, 0, 4), Ok(0));
        assert_eq!(color_reset(1, 0, 4), Ok(0b1111));
        assert!(color_reset(1, 0b0101, 4).is_err());
    }

    fn one_term(address: u32, n: u8, m: u8) -> SparseState {
        SparseState::make_input(&[address], None, n, m).unwrap()
    }

    #[test]
    fn encode_sets_all_colors_to_the_address_bit() {
        // 16 walkers, level 2 reads address bit 5 of 10110110, which is 1.
        let state = one_term(0b1011_0110, 8, 8);
        let out = encode_address_bit(2, &state).unwrap();
        assert_eq!(out.len(), 1);
        let (basis, _) = out.terms().next().unwrap();
        assert_eq!(basis.colors, 0xffff);
        assert_eq!(basis.address, 0b1011_0110);

        // Bit 0 case: colors stay red.
        let state = one_term(0b0001_0110, 8, 8);
        let out = encode_address_bit(2, &state).unwrap();
        assert_eq!(out.terms().next().unwrap().0.colors, 0);

        // Four walkers by hand: n=2, m=2, level 0 reads a_1 of a=10.
        let out = encode_address_bit(0, &one_term(0b10, 2, 2)).unwrap();
        assert_eq!(out.terms().next().unwrap().0.colors, 0b1111);
    }

    #[test]
    fn encode_rejects_unreset_colors() {
        let shape = Shape::new(2, 2).unwrap();
        let mut dirty = BasisState::terminal(1);
        dirty.colors = 0b0010;
        let state = SparseState::from_terms(shape, [(dirty, ONE)]).unwrap();
        let err = encode_address_bit(0, &state).unwrap_err();
        assert!(err.is_domain());
    }

    #[test]
    fn fan_out_copies_walker_zero_branchwise() {
        let shape = Shape::new(2, 2).unwrap();
        let mut red = BasisState::terminal(0);
        red.colors = 0;
        let mut blue = BasisState::terminal(0);
        blue.colors = 1;
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::new(0.0, 0.8);
        let state = SparseState::from_terms(shape, [(red, alpha), (blue, beta)]).unwrap();
        let out = fan_out_color(&state).unwrap();
        assert_eq!(out.len(), 2);
        let mut all_red = red;
        all_red.colors = 0;
        let mut all_blue = blue;
        all_blue.colors = 0b1111;
        assert!((out.amplitude(&all_red) - alpha).norm() < 1e-15);
        assert!((out.amplitude(&all_blue) - beta).norm() < 1e-15);

        // All-red input is untouched.
        let zeros = SparseState::from_terms(shape, [(red, ONE)]).unwrap();
        assert_eq!(fan_out_color(&zeros).unwrap(), zeros);

        // Blue walker 0 alone becomes four blue walkers after two layers.
        let solo = SparseState::from_terms(shape, [(blue, ONE)]).unwrap();
        let out = fan_out_color(&solo).unwrap();
        assert_eq!(out.terms().next().unwrap().0.colors, 0b1111);
        assert_eq!(build_cascade(1, 2, 2).unwrap().len(), 2);
    }

    #[test]
    fn fan_out_rejects_nonred_companions() {
        let shape = Shape::new(2, 2).unwrap();
        let mut dirty = BasisState::terminal(0);
        dirty.colors = 0b0100;
        let state = SparseState::from_terms(shape, [(dirty, ONE)]).unwrap();
        assert!(fan_out_color(&state).unwrap_err().is_domain());
    }
}
