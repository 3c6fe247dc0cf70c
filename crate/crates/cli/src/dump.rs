//! Deterministic state dumps: one line per basis term, lexicographic order,
//! amplitudes at 12 decimal digits. Dumps parse back to the identical state
//! and re-render byte for byte.

use num_complex::Complex64;
use qwram_core::state::{BasisState, Shape, SparseState};
use qwram_core::NodeId;

pub fn render_state(state: &SparseState) -> String {
    // SparseState's Display is the dump format; keep one renderer.
    state.to_string()
}

fn parse_field<'a>(token: &'a str, key: &str) -> Result<&'a str, String> {
    token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| format!("expected {key}=... , got {token:?}"))
}

fn parse_bits(word: &str) -> Result<u32, String> {
    u32::from_str_radix(word, 2).map_err(|_| format!("bad bit word {word:?}"))
}

pub fn parse_state(text: &str) -> Result<SparseState, String> {
    let mut shape: Option<Shape> = None;
    let mut terms: Vec<(BasisState, Complex64)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 5 {
            return Err(format!("short dump line {line:?}"));
        }
        let a_word = parse_field(tokens[0], "a")?;
        let bus_word = parse_field(tokens[1], "bus")?;
        let c_word = parse_field(tokens[2], "c")?;
        let d_word = parse_field(tokens[3], "d")?;
        let (cell_word, amp_token) = if tokens.len() == 6 {
            (Some(parse_field(tokens[4], "cell")?), tokens[5])
        } else {
            (None, tokens[4])
        };

        let n = a_word.len() as u8;
        let m = d_word.len() as u8;
        let line_shape = Shape::new(n, m).map_err(|e| e.to_string())?;
        if c_word.len() != usize::from(line_shape.walkers()) {
            return Err(format!("color word width mismatch in {line:?}"));
        }
        match &shape {
            None => shape = Some(line_shape),
            Some(s) if *s == line_shape => {}
            Some(_) => return Err(format!("inconsistent register widths at {line:?}")),
        }

        let bus = bus_word
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .and_then(|b| b.split_once(','))
            .ok_or_else(|| format!("bad bus label {bus_word:?}"))?;
        let w: u32 = bus
            .0
            .parse()
            .map_err(|_| format!("bad bus w {:?}", bus.0))?;
        let level: u8 = bus
            .1
            .parse()
            .map_err(|_| format!("bad bus level {:?}", bus.1))?;

        let amp_body = parse_field(amp_token, "amp")?;
        let (re, im) = amp_body
            .split_once(',')
            .ok_or_else(|| format!("bad amplitude {amp_body:?}"))?;
        let re: f64 = re.parse().map_err(|_| format!("bad amplitude {re:?}"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad amplitude {im:?}"))?;

        let basis = BasisState {
            address: parse_bits(a_word)?,
            bus: NodeId::new(w, level),
            colors: parse_bits(c_word)?,
            data: parse_bits(d_word)?,
            cell: cell_word.map(parse_bits).transpose()?,
        };
        terms.push((basis, Complex64::new(re, im)));
    }
    let shape = shape.ok_or("empty dump")?;
    SparseState::from_terms(shape, terms).map_err(|e| e.to_string())
}
