//! The four commands: run, trace, verify, resources.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::ValueEnum;
use num_complex::Complex64;
use qwram_core::query::MemorySpec;
use qwram_core::resources::{scaling_table, Scheme};
use qwram_core::schemes::Pipeline;
use qwram_core::state::{BasisState, SparseState};

use crate::{dump, memfile, CliError};

/// Which map to run: the plain lookup, the quantum-transfer lookup, or the
/// superposition builder (which takes its addresses from the memory file's
/// designated set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Quantum,
    Tilde,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub memory: PathBuf,
    pub mode: Mode,
    pub addresses: Option<String>,
    pub weights: Option<String>,
    pub tolerance: f64,
    pub snapshots: bool,
    pub exhaustive: bool,
    pub skip_cascade_layer: Option<usize>,
    pub flip_roundabout: Option<usize>,
}

fn parse_addresses(raw: &str, n: u8) -> Result<Vec<u32>, CliError> {
    if raw.trim() == "all" {
        return Ok((0..(1u32 << n)).collect());
    }
    let mut addresses = Vec::new();
    for item in raw.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let a: u32 = item
            .parse()
            .map_err(|_| CliError::Input(format!("bad address {item:?}")))?;
        addresses.push(a);
    }
    if addresses.is_empty() {
        return Err(CliError::Input("empty address list".into()));
    }
    Ok(addresses)
}

fn parse_weights(raw: &str) -> Result<Vec<Complex64>, CliError> {
    let mut weights = Vec::new();
    for entry in raw.split(';') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (re, im) = match entry.split_once(',') {
            Some((re, im)) => (re.trim(), im.trim()),
            None => (entry, "0"),
        };
        let re: f64 = re
            .parse()
            .map_err(|_| CliError::Input(format!("bad weight {entry:?}")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| CliError::Input(format!("bad weight {entry:?}")))?;
        weights.push(Complex64::new(re, im));
    }
    if weights.is_empty() {
        return Err(CliError::Input("empty weight list".into()));
    }
    Ok(weights)
}

struct Job {
    input: SparseState,
    addresses: Vec<u32>,
    weights: Option<Vec<Complex64>>,
}

fn build_job(config: &RunConfig, memory: &MemorySpec) -> Result<Job, CliError> {
    let (n, m) = (memory.n(), memory.m());
    match config.mode {
        Mode::Tilde => {
            if config.addresses.is_some() || config.weights.is_some() {
                return Err(CliError::Input(
                    "tilde mode takes its addresses from the memory file's designated set".into(),
                ));
            }
            memory.designated().ok_or_else(|| {
                CliError::Input("tilde mode needs designated= in the memory file".into())
            })?;
            Ok(Job {
                input: SparseState::make_input(&[0], None, n, m)?,
                addresses: Vec::new(),
                weights: None,
            })
        }
        Mode::Classical | Mode::Quantum => {
            let raw = config
                .addresses
                .as_deref()
                .ok_or_else(|| CliError::Input("--addresses is required in this mode".into()))?;
            let addresses = parse_addresses(raw, n)?;
            let weights = config.weights.as_deref().map(parse_weights).transpose()?;
            let input = SparseState::make_input(&addresses, weights.as_deref(), n, m)?;
            Ok(Job {
                input,
                addresses,
                weights,
            })
        }
    }
}

fn build_pipeline(mode: Mode, memory: &MemorySpec) -> Result<Pipeline, CliError> {
    let pipeline = match mode {
        Mode::Classical => Pipeline::qram(memory)?,
        Mode::Quantum => Pipeline::qram_quantum(memory)?,
        Mode::Tilde => Pipeline::qram_tilde(memory)?,
    };
    Ok(pipeline)
}

fn apply_mutations(pipeline: &mut Pipeline, config: &RunConfig) -> Result<(), CliError> {
    if let Some(k) = config.skip_cascade_layer {
        pipeline.skip_cascade_stage(k)?;
    }
    if let Some(k) = config.flip_roundabout {
        pipeline.flip_roundabout(k)?;
    }
    Ok(())
}

/// The definitional target the pipeline must reproduce.
fn target_state(mode: Mode, memory: &MemorySpec, job: &Job) -> Result<SparseState, CliError> {
    let shape = *memory.shape();
    match mode {
        Mode::Classical => {
            let weights = normalized_weights(job);
            let mut terms = Vec::new();
            for (&a, w) in job.addresses.iter().zip(weights) {
                let mut t = BasisState::terminal(a);
                t.data = memory.classical_word(a).map_err(CliError::Input)?;
                terms.push((t, w));
            }
            Ok(SparseState::from_terms(shape, terms)?)
        }
        Mode::Tilde => {
            let designated = memory
                .designated()
                .ok_or_else(|| CliError::Input("missing designated set".into()))?;
            let amp = Complex64::new(1.0 / (designated.len() as f64).sqrt(), 0.0);
            let mut terms = Vec::new();
            for &a in designated {
                let mut t = BasisState::terminal(a);
                t.data = memory.classical_word(a).map_err(CliError::Input)?;
                terms.push((t, amp));
            }
            Ok(SparseState::from_terms(shape, terms)?)
        }
        Mode::Quantum => {
            let weights = normalized_weights(job);
            let mut terms = Vec::new();
            for (&a, w) in job.addresses.iter().zip(weights) {
                let vector = memory.quantum_vector(a).map_err(CliError::Input)?;
                for (x, amp) in vector.iter().enumerate() {
                    let mut t = BasisState::terminal(a);
                    t.data = x as u32;
                    t.cell = Some(0);
                    terms.push((t, amp * w));
                }
            }
            Ok(SparseState::from_terms(shape, terms)?)
        }
    }
}

fn normalized_weights(job: &Job) -> Vec<Complex64> {
    match &job.weights {
        Some(w) => {
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w.iter().map(|z| z / norm).collect()
        }
        None => {
            let amp = Complex64::new(1.0 / (job.addresses.len() as f64).sqrt(), 0.0);
            vec![amp; job.addresses.len()]
        }
    }
}

pub fn cmd_run(config: &RunConfig) -> Result<String, CliError> {
    let memory = memfile::load_memory(&config.memory)?;
    let job = build_job(config, &memory)?;
    let pipeline = build_pipeline(config.mode, &memory)?;
    let out = pipeline.apply(&job.input)?;
    Ok(dump::render_state(&out))
}

pub fn cmd_trace(config: &RunConfig) -> Result<String, CliError> {
    let memory = memfile::load_memory(&config.memory)?;
    let job = build_job(config, &memory)?;
    let pipeline = build_pipeline(config.mode, &memory)?;
    let (out, trace) = pipeline.apply_traced(&job.input, config.snapshots)?;
    let mut text = String::new();
    for (i, entry) in trace.entries.iter().enumerate() {
        let level = entry
            .level
            .map(|l| format!(" level={l}"))
            .unwrap_or_default();
        let mut kinds: std::collections::BTreeMap<&str, usize> = Default::default();
        for event in &entry.events {
            *kinds.entry(event.kind.label()).or_default() += 1;
        }
        let breakdown = if kinds.is_empty() {
            String::new()
        } else {
            let parts: Vec<String> = kinds
                .iter()
                .map(|(kind, count)| format!("{kind} x{count}"))
                .collect();
            format!(" ({})", parts.join(", "))
        };
        writeln!(
            text,
            "stage {i}: {}{} devices={}{}",
            entry.name,
            level,
            entry.events.len(),
            breakdown
        )
        .unwrap();
        if let Some(snapshot) = &entry.snapshot {
            for line in dump::render_state(snapshot).lines() {
                writeln!(text, "  {line}").unwrap();
            }
        }
    }
    text.push_str("final state:\n");
    text.push_str(&dump::render_state(&out));
    Ok(text)
}

fn verify_one(
    pipeline: &Pipeline,
    input: &SparseState,
    target: &SparseState,
) -> Result<f64, String> {
    match pipeline.apply(input) {
        Ok(out) => out.fidelity(target).map_err(|e| e.to_string()),
        Err(e) if e.is_domain() => Err(e.to_string()),
        Err(e) => Err(e.to_string()),
    }
}

pub fn cmd_verify(config: &RunConfig) -> Result<String, CliError> {
    if config.exhaustive {
        return cmd_verify_exhaustive(config);
    }
    let memory = memfile::load_memory(&config.memory)?;
    let job = build_job(config, &memory)?;
    let target = target_state(config.mode, &memory, &job)?;
    let mut pipeline = build_pipeline(config.mode, &memory)?;
    apply_mutations(&mut pipeline, config)?;

    match verify_one(&pipeline, &job.input, &target) {
        Ok(fidelity) => {
            let mut report = format!("fidelity {fidelity:.12}\n");
            if fidelity >= 1.0 - config.tolerance {
                report.push_str("PASS\n");
                Ok(report)
            } else {
                report.push_str("FAIL\n");
                Err(CliError::Verification(report))
            }
        }
        Err(reason) => {
            let report = format!("{reason}\nfidelity 0.000000000000\nFAIL\n");
            Err(CliError::Verification(report))
        }
    }
}

/// Every memory assignment and every nonempty address set for the file's
/// register sizes. The file's cell contents are ignored; its header fixes
/// (n, m).
fn cmd_verify_exhaustive(config: &RunConfig) -> Result<String, CliError> {
    let file_memory = memfile::load_memory(&config.memory)?;
    let (n, m) = (file_memory.n(), file_memory.m());
    if matches!(config.mode, Mode::Quantum) {
        return Err(CliError::Input(
            "exhaustive verification covers classical and tilde modes".into(),
        ));
    }
    let cells = 1u32 << n;
    let bits = u32::from(m) * cells;
    if bits > 12 {
        return Err(CliError::Input(format!(
            "exhaustive verification needs m*2^n <= 12 (got {bits})"
        )));
    }

    let mut total = 0u64;
    let mut failures = 0u64;
    let mut min_fidelity = 1.0f64;
    for assignment in 0u64..(1u64 << bits) {
        let mut memory = MemorySpec::new(n, m)?;
        for cell in 0..cells {
            let word = ((assignment >> (cell * u32::from(m))) & ((1u64 << m) - 1)) as u32;
            memory.set_cell(cell, qwram_core::query::CellContents::Classical(word))?;
        }
        for subset in 1u32..(1u32 << cells) {
            let addresses: Vec<u32> = (0..cells).filter(|a| subset >> a & 1 == 1).collect();
            let (job, target, mut pipeline) = match config.mode {
                Mode::Classical => {
                    let input = SparseState::make_input(&addresses, None, n, m)?;
                    let job = Job {
                        input,
                        addresses: addresses.clone(),
                        weights: None,
                    };
                    let target = target_state(Mode::Classical, &memory, &job)?;
                    let pipeline = Pipeline::qram(&memory)?;
                    (job, target, pipeline)
                }
                Mode::Tilde => {
                    let mut memory = memory.clone();
                    memory.set_designated(addresses.iter().copied().collect::<BTreeSet<u32>>())?;
                    let job = Job {
                        input: SparseState::make_input(&[0], None, n, m)?,
                        addresses: Vec::new(),
                        weights: None,
                    };
                    let target = target_state(Mode::Tilde, &memory, &job)?;
                    let pipeline = Pipeline::qram_tilde(&memory)?;
                    (job, target, pipeline)
                }
                Mode::Quantum => unreachable!(),
            };
            apply_mutations(&mut pipeline, config)?;
            total += 1;
            match verify_one(&pipeline, &job.input, &target) {
                Ok(f) => {
                    min_fidelity = min_fidelity.min(f);
                    if f < 1.0 - config.tolerance {
                        failures += 1;
                    }
                }
                Err(_) => {
                    min_fidelity = 0.0;
                    failures += 1;
                }
            }
        }
    }
    let mut report = format!(
        "exhaustive: {total} configurations, {failures} failures, min fidelity {min_fidelity:.12}\n"
    );
    if failures == 0 {
        report.push_str("PASS\n");
        Ok(report)
    } else {
        report.push_str("FAIL\n");
        Err(CliError::Verification(report))
    }
}

#[derive(Debug, Clone)]
pub struct ResourcesConfig {
    pub n: String,
    pub m: String,
    pub scheme: SchemeArg,
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Routing,
    Query,
    Output,
    RoutingTilde,
    QueryTilde,
    Qram,
    QramTilde,
}

impl From<SchemeArg> for Scheme {
    fn from(arg: SchemeArg) -> Self {
        match arg {
            SchemeArg::Routing => Scheme::Routing,
            SchemeArg::Query => Scheme::Query,
            SchemeArg::Output => Scheme::Output,
            SchemeArg::RoutingTilde => Scheme::RoutingTilde,
            SchemeArg::QueryTilde => Scheme::QueryTilde,
            SchemeArg::Qram => Scheme::Qram,
            SchemeArg::QramTilde => Scheme::QramTilde,
        }
    }
}

fn parse_range(spec: &str) -> Result<std::ops::RangeInclusive<u8>, CliError> {
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u8 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad range bound {lo:?}")))?;
        let hi: u8 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| CliError::Input(format!("bad range bound {hi:?}")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::Input(format!("bad range {spec:?}")));
        }
        Ok(lo..=hi)
    } else {
        let v: u8 = spec
            .parse()
            .map_err(|_| CliError::Input(format!("bad size {spec:?}")))?;
        if v == 0 {
            return Err(CliError::Input("sizes start at 1".into()));
        }
        Ok(v..=v)
    }
}

pub fn cmd_resources(config: &ResourcesConfig) -> Result<String, CliError> {
    let table = scaling_table(
        config.scheme.into(),
        parse_range(&config.n)?,
        parse_range(&config.m)?,
    )?;
    Ok(if config.csv {
        table.to_csv()
    } else {
        table.to_text()
    })
}
