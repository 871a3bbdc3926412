use std::io::{self, BufRead, Write};
use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};
use thinlab_core::bounds::{self, CTable};
use thinlab_core::group::GroupDescriptor;
use thinlab_core::oracle;
use thinlab_core::selftest::{self, SelftestConfig};
use thinlab_core::symbolic::SymbolicSet;
use thinlab_core::tau::{Budget, Engine, IntegerUniverse, LevelVerdict};

use crate::dsl;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_NOT_IN_TAU_STAR: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub base: u32,
    pub budget: Budget,
}

impl RunConfig {
    fn engine(&self) -> Engine<IntegerUniverse> {
        Engine::new(IntegerUniverse, self.budget)
    }
}

pub fn parse_expr(expr: &str, cfg: &RunConfig) -> Result<SymbolicSet, CliError> {
    dsl::parse(expr, cfg.base).map_err(|e| CliError::Parse(e.render(expr)))
}

/// `z<n>` for the cyclic group of order n, `b<d>` for `(Z/2)^d`.
pub fn parse_group(s: &str) -> Result<GroupDescriptor, CliError> {
    let bad = || CliError::Config(format!("unknown group '{s}' (expected z<n> or b<d>)"));
    let (kind, rest) = s.split_at(s.len().min(1));
    let n: u64 = rest.parse().map_err(|_| bad())?;
    let g = match kind {
        "z" => GroupDescriptor::cyclic(n),
        "b" => GroupDescriptor::boolean(u32::try_from(n).map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    g.map_err(|e| CliError::Config(e.to_string()))
}

fn exit_for(v: &LevelVerdict<BigInt>) -> i32 {
    match v {
        LevelVerdict::ExactLevel(_) => EXIT_OK,
        LevelVerdict::NotInTauStar(_) => EXIT_NOT_IN_TAU_STAR,
        LevelVerdict::Unknown { .. } => EXIT_UNKNOWN,
    }
}

fn classify_json(
    e: &Engine<IntegerUniverse>,
    set: &SymbolicSet,
    v: &LevelVerdict<BigInt>,
) -> Value {
    json!({
        "set": set.to_string(),
        "terms": set.to_json(),
        "verdict": e.verdict_json(v),
    })
}

pub fn classify(
    expr: &str,
    format: Format,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let set = parse_expr(expr, cfg)?;
    let e = cfg.engine();
    let v = e
        .exact_level(&set)
        .map_err(|err| CliError::Config(err.to_string()))?;
    match format {
        Format::Json => writeln!(out, "{}", classify_json(&e, &set, &v))?,
        _ => {
            writeln!(out, "set: {set}")?;
            writeln!(out, "verdict: {}", e.format_verdict(&v))?;
            if let LevelVerdict::NotInTauStar(w) = &v {
                let replayed = e
                    .replay(&set, w)
                    .map_err(|err| CliError::Config(err.to_string()))?;
                writeln!(
                    out,
                    "replay: {}",
                    if replayed { "verified" } else { "FAILED" }
                )?;
            }
        }
    }
    Ok(exit_for(&v))
}

/// One JSON object per nonblank input line, in input order. Lines are
/// classified in parallel, each by a fresh engine so that budget-limited
/// verdicts do not depend on scheduling.
pub fn classify_batch(
    input: &mut dyn BufRead,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    let results: Vec<(Value, bool)> = lines
        .par_iter()
        .map(|(n, line)| match parse_expr(line, cfg) {
            Ok(set) => {
                let e = cfg.engine();
                match e.exact_level(&set) {
                    Ok(v) => {
                        let mut obj = classify_json(&e, &set, &v);
                        obj["line"] = json!(n);
                        (obj, false)
                    }
                    Err(err) => (
                        json!({"line": n, "expr": line, "error": err.to_string()}),
                        true,
                    ),
                }
            }
            Err(err) => (
                json!({"line": n, "expr": line, "error": err.to_string()}),
                true,
            ),
        })
        .collect();
    let mut failed = false;
    for (obj, err) in results {
        writeln!(out, "{obj}")?;
        failed |= err;
    }
    Ok(if failed { EXIT_ERROR } else { EXIT_OK })
}

pub fn tree(
    expr: &str,
    depth: usize,
    format: Format,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let set = parse_expr(expr, cfg)?;
    let dump = cfg
        .engine()
        .tree_dump(&set, depth)
        .map_err(|err| CliError::Config(err.to_string()))?;
    match format {
        Format::Text => write!(out, "{}", dump.to_text())?,
        Format::Json => writeln!(out, "{}", dump.to_json())?,
        Format::Dot => write!(out, "{}", dump.to_dot())?,
    }
    Ok(EXIT_OK)
}

/// Writes the level table (CSV, or JSON when `format` is JSON) to `path` or
/// to `out`, then the cross-check summary to `out` (or `err` when the table
/// went to `out`).
pub fn oracle_sweep(
    group: GroupDescriptor,
    t: u64,
    format: Format,
    path: Option<&Path>,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let table = oracle::build_table(group, t).map_err(|e| CliError::Config(e.to_string()))?;
    let body = match format {
        Format::Json => format!("{}\n", table.to_json()),
        _ => table.to_csv(),
    };
    let report =
        oracle::cross_check(&table, cfg.budget).map_err(|e| CliError::Config(e.to_string()))?;
    let summary = format!(
        "oracle {} t={}: {} subsets, {} level mismatches, {} rank mismatches, {} witness failures, {} unclassified: {}",
        group.short_name(),
        t,
        report.subsets,
        report.level_mismatches.len(),
        report.rank_mismatches.len(),
        report.witness_failures.len(),
        report.unknown,
        if report.agrees() { "agreement" } else { "DISAGREEMENT" }
    );
    match path {
        Some(p) => {
            std::fs::write(p, body)?;
            writeln!(out, "{summary}")?;
        }
        None => {
            write!(out, "{body}")?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(if report.agrees() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

pub fn selftest(
    seed: u64,
    criterion: Option<u8>,
    timing: bool,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let scfg = SelftestConfig {
        seed,
        budget: cfg.budget,
    };
    let report = match criterion {
        Some(id) if selftest::CRITERIA.contains(&id) => selftest::SelftestReport {
            seed,
            results: vec![selftest::run_criterion(id, &scfg)],
        },
        Some(id) => {
            return Err(CliError::Config(format!(
                "no criterion {id} (expected 1 to 8)"
            )))
        }
        None => selftest::run_all(&scfg),
    };
    write!(out, "{}", report.render(timing))?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

/// The escalation chain starting at `expr`, one line per iterate.
pub fn escalate(
    expr: &str,
    steps: u32,
    format: Format,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut set = parse_expr(expr, cfg)?;
    let e = cfg.engine();
    let mut code = EXIT_OK;
    for i in 0..=steps {
        let v = e
            .exact_level(&set)
            .map_err(|err| CliError::Config(err.to_string()))?;
        match format {
            Format::Json => {
                let mut obj = classify_json(&e, &set, &v);
                obj["step"] = json!(i);
                writeln!(out, "{obj}")?;
            }
            _ => writeln!(out, "{i}\t{}\t{set}", e.format_verdict(&v))?,
        }
        code = code.max(exit_for(&v));
        if i < steps {
            set = bounds::escalate_unchecked(&set)
                .map_err(|err| CliError::Config(err.to_string()))?;
        }
    }
    Ok(code)
}

pub fn ctable(
    n_max: u64,
    k_max: u32,
    entry_bound: u64,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let table =
        CTable::build(n_max, k_max, entry_bound).map_err(|e| CliError::Config(e.to_string()))?;
    write!(out, "{}", table.to_csv())?;
    Ok(EXIT_OK)
}
