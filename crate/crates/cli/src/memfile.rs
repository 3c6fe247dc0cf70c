//! The line-oriented memory file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! n=3 m=4
//! designated=1,3,6
//! cell 110 = 1001
//! cell 001 = [0.707106781187,0; 0.707106781187,0]
//! ```
//!
//! The header fixes the register widths. Address and data words are written
//! most significant bit first and must match the declared widths; unlisted
//! cells hold the zero word. A bracketed cell lists all 2^m complex
//! amplitudes as `re,im` pairs separated by semicolons and must be unit
//! norm. `designated` is a comma list of decimal addresses.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use qwram_core::query::{CellContents, MemorySpec};

use crate::CliError;

fn parse_bits(word: &str, width: u8, what: &str) -> Result<u32, String> {
    if word.len() != usize::from(width) {
        return Err(format!(
            "{what} {word:?} has {} bits, expected {width}",
            word.len()
        ));
    }
    u32::from_str_radix(word, 2).map_err(|_| format!("{what} {word:?} is not a bit word"))
}

fn parse_complex(entry: &str) -> Result<Complex64, String> {
    let entry = entry.trim();
    let (re, im) = match entry.split_once(',') {
        Some((re, im)) => (re.trim(), im.trim()),
        None => (entry, "0"),
    };
    let re: f64 = re.parse().map_err(|_| format!("bad real part {re:?}"))?;
    let im: f64 = im
        .parse()
        .map_err(|_| format!("bad imaginary part {im:?}"))?;
    Ok(Complex64::new(re, im))
}

pub fn parse_memory(text: &str) -> Result<MemorySpec, String> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or("missing header line `n=<int> m=<int>`")?;
    let mut n = None;
    let mut m = None;
    for token in header.split_whitespace() {
        match token.split_once('=') {
            Some(("n", v)) => n = Some(v.parse::<u8>().map_err(|_| format!("bad n={v:?}"))?),
            Some(("m", v)) => m = Some(v.parse::<u8>().map_err(|_| format!("bad m={v:?}"))?),
            _ => return Err(format!("unexpected header token {token:?}")),
        }
    }
    let (n, m) = (
        n.ok_or("header is missing n=")?,
        m.ok_or("header is missing m=")?,
    );
    let mut memory = MemorySpec::new(n, m).map_err(|e| e.to_string())?;

    for line in lines {
        if let Some(list) = line.strip_prefix("designated=") {
            let mut designated = BTreeSet::new();
            for item in list.split(',') {
                let a: u32 = item
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad designated address {item:?}"))?;
                designated.insert(a);
            }
            memory
                .set_designated(designated)
                .map_err(|e| e.to_string())?;
            continue;
        }
        let Some(rest) = line.strip_prefix("cell") else {
            return Err(format!("unrecognized line {line:?}"));
        };
        let (addr_word, value) = rest
            .split_once('=')
            .ok_or_else(|| format!("cell line {line:?} is missing `=`"))?;
        let address = parse_bits(addr_word.trim(), n, "address")?;
        let value = value.trim();
        let contents = if let Some(body) = value.strip_prefix('[') {
            let body = body
                .strip_suffix(']')
                .ok_or_else(|| format!("unterminated amplitude list in {line:?}"))?;
            let amps: Vec<Complex64> = body
                .split(';')
                .map(parse_complex)
                .collect::<Result<_, _>>()?;
            CellContents::Quantum(amps)
        } else {
            CellContents::Classical(parse_bits(value, m, "data word")?)
        };
        memory
            .set_cell(address, contents)
            .map_err(|e| e.to_string())?;
    }
    Ok(memory)
}

pub fn load_memory(path: &Path) -> Result<MemorySpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_memory(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
