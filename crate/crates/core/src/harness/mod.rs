//! Experiment harness: the classical baseline scan, deterministic sweeps
//! over `(algorithm, size, M, seed)` grids, CSV interchange, and scaling-law
//! fits.
//!
//! Determinism contract: a sweep is a pure function of its
//! [`SweepConfig`] — cells run in parallel but results are sorted by
//! `(algorithm, size, M, seed)` before emission, every cell derives its
//! instance from the recorded seed, and `elapsed_ms` is fixed at `0.0` in
//! sweep rows (wall-clock timing would break byte-identical output; the CLI
//! reports real timing for single runs instead).

pub mod csv;
pub mod fit;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::amplification::ScheduleMode;
use crate::error::{Error, Result};
use crate::flat_search::run_flat_search;
use crate::instances::{FlatInstance, StructuredInstance};
use crate::structured_search::run_structured_search;

/// Largest structured grid dimension the dense simulator accepts
/// (L² amplitudes ≈ 16 MB of complex doubles at the limit).
pub const MAX_STRUCTURED_L: u32 = 1024;

/// Largest flat domain the dense simulator accepts (2²⁰ amplitudes).
pub const MAX_FLAT_N: u32 = 1 << 20;

/// Which experiment a sweep row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Quantum structured search on the L×L grid.
    StructuredQ,
    /// Quantum flat search on the size-N domain.
    FlatQ,
    /// Classical structured scan baseline.
    Classical,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::StructuredQ => "structured_q",
            Algorithm::FlatQ => "flat_q",
            Algorithm::Classical => "classical",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structured_q" => Ok(Algorithm::StructuredQ),
            "flat_q" => Ok(Algorithm::FlatQ),
            "classical" => Ok(Algorithm::Classical),
            other => Err(Error::Config(format!(
                "unknown algorithm {other:?} (expected structured_q, flat_q, or classical)"
            ))),
        }
    }
}

/// One experiment result, in the exact shape of one CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    /// L for structured/classical rows, N for flat rows.
    pub size: u32,
    pub m: u32,
    pub seed: u64,
    /// `None` serializes as `n/a` (classical rows have no schedule).
    pub mode: Option<ScheduleMode>,
    pub f_calls: u64,
    pub g_calls: u64,
    /// Always `f_calls + g_calls`.
    pub total_calls: u64,
    /// Exact success probability; classical scans always succeed (1.0).
    pub success_probability: f64,
    pub outcome_x: u32,
    /// 0 where no second coordinate exists (flat rows).
    pub outcome_y: u32,
    /// Wall-clock milliseconds for single CLI runs; 0.0 in sweep rows to keep
    /// sweep output byte-deterministic.
    pub elapsed_ms: f64,
}

/// Memory-guard check for one algorithm/size pair. Sizes beyond the dense
/// statevector limits are rejected up front, before any allocation.
pub fn ensure_feasible(algorithm: Algorithm, size: u32) -> Result<()> {
    let limit = match algorithm {
        Algorithm::StructuredQ | Algorithm::Classical => MAX_STRUCTURED_L,
        Algorithm::FlatQ => MAX_FLAT_N,
    };
    if size > limit {
        return Err(Error::InfeasibleSize {
            what: match algorithm {
                Algorithm::FlatQ => "N",
                _ => "L",
            },
            value: u64::from(size),
            limit: u64::from(limit),
        });
    }
    Ok(())
}

/// The classical baseline: consider each x in ascending order, query G, and
/// for each hinted x scan y in ascending order querying F until the marked
/// cell is found. Deterministic scan order; all randomness lives in the
/// instance. Always succeeds, in at most `L + M·L` total queries.
pub fn classical_structured_scan(inst: &mut StructuredInstance) -> Result<SweepRow> {
    let (f_before, g_before) = inst.counter_snapshot();
    let mut found = None;
    'scan: for x in 1..=inst.l() {
        if inst.query_g(x)? {
            for y in 1..=inst.l() {
                if inst.query_f(x, y)? {
                    found = Some((x, y));
                    break 'scan;
                }
            }
        }
    }
    let (x, y) = found.expect("the marked cell is hinted, so the scan always finds it");
    let (f_after, g_after) = inst.counter_snapshot();
    let f_calls = f_after - f_before;
    let g_calls = g_after - g_before;
    Ok(SweepRow {
        algorithm: Algorithm::Classical,
        size: inst.l(),
        m: inst.m(),
        seed: inst.seed(),
        mode: None,
        f_calls,
        g_calls,
        total_calls: f_calls + g_calls,
        success_probability: 1.0,
        outcome_x: x,
        outcome_y: y,
        elapsed_ms: 0.0,
    })
}

/// Generates an instance and runs the structured quantum search, shaping the
/// outcome as a sweep row (`elapsed_ms = 0.0`).
pub fn structured_sweep_row(l: u32, m: u32, seed: u64, mode: ScheduleMode) -> Result<SweepRow> {
    ensure_feasible(Algorithm::StructuredQ, l)?;
    let mut inst = StructuredInstance::generate(l, m, seed)?;
    let result = run_structured_search(&mut inst, mode)?;
    Ok(SweepRow {
        algorithm: Algorithm::StructuredQ,
        size: l,
        m,
        seed,
        mode: Some(mode),
        f_calls: result.f_calls,
        g_calls: result.g_calls,
        total_calls: result.total_calls(),
        success_probability: result.success_probability,
        outcome_x: result.outcome_x,
        outcome_y: result.outcome_y,
        elapsed_ms: 0.0,
    })
}

/// Generates an instance and runs the flat quantum search as a sweep row.
pub fn flat_sweep_row(n: u32, m: u32, seed: u64, mode: ScheduleMode) -> Result<SweepRow> {
    ensure_feasible(Algorithm::FlatQ, n)?;
    let mut inst = FlatInstance::generate(n, m, seed)?;
    let result = run_flat_search(&mut inst, mode)?;
    Ok(SweepRow {
        algorithm: Algorithm::FlatQ,
        size: n,
        m,
        seed,
        mode: Some(mode),
        f_calls: result.f_calls,
        g_calls: result.g_calls,
        total_calls: result.total_calls(),
        success_probability: result.success_probability,
        outcome_x: result.outcome_x,
        outcome_y: result.outcome_y,
        elapsed_ms: 0.0,
    })
}

/// Generates an instance and runs the classical scan as a sweep row.
pub fn classical_sweep_row(l: u32, m: u32, seed: u64) -> Result<SweepRow> {
    ensure_feasible(Algorithm::Classical, l)?;
    let mut inst = StructuredInstance::generate(l, m, seed)?;
    classical_structured_scan(&mut inst)
}

/// A parsed sweep description: the full cross product
/// `algorithms × sizes × ms × (seed_base .. seed_base + seeds)`.
///
/// Text format: `key=value` lines; `#` starts a comment line; blank lines
/// ignored. Required keys: `algorithms` (comma list of `structured_q`,
/// `flat_q`, `classical`), `sizes`, `ms` (comma lists of integers), `seeds`
/// (count per cell), `mode` (`paper` or `optimal`). Optional: `seed_base`
/// (default 0). Empty list values are allowed and yield an empty sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub algorithms: Vec<Algorithm>,
    pub sizes: Vec<u32>,
    pub ms: Vec<u32>,
    pub seeds: u64,
    pub seed_base: u64,
    pub mode: ScheduleMode,
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|e| Error::Config(format!("bad {key} entry {:?}: {e}", item.trim())))
        })
        .collect()
}

impl FromStr for SweepConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut algorithms = None;
        let mut sizes = None;
        let mut ms = None;
        let mut seeds = None;
        let mut seed_base = None;
        let mut mode = None;

        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {line:?}", line_no + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let duplicate = |k: &str| Error::Config(format!("duplicate key {k:?}"));
            match key {
                "algorithms" => {
                    if algorithms.replace(parse_list(value, key)?).is_some() {
                        return Err(duplicate(key));
                    }
                }
                "sizes" => {
                    if sizes.replace(parse_list(value, key)?).is_some() {
                        return Err(duplicate(key));
                    }
                }
                "ms" => {
                    if ms.replace(parse_list(value, key)?).is_some() {
                        return Err(duplicate(key));
                    }
                }
                "seeds" => {
                    let parsed = value
                        .parse::<u64>()
                        .map_err(|e| Error::Config(format!("bad seeds value {value:?}: {e}")))?;
                    if parsed == 0 {
                        return Err(Error::Config("seeds must be at least 1".into()));
                    }
                    if seeds.replace(parsed).is_some() {
                        return Err(duplicate(key));
                    }
                }
                "seed_base" => {
                    let parsed = value.parse::<u64>().map_err(|e| {
                        Error::Config(format!("bad seed_base value {value:?}: {e}"))
                    })?;
                    if seed_base.replace(parsed).is_some() {
                        return Err(duplicate(key));
                    }
                }
                "mode" => {
                    if mode.replace(value.parse::<ScheduleMode>()?).is_some() {
                        return Err(duplicate(key));
                    }
                }
                other => {
                    return Err(Error::Config(format!("unknown key {other:?}")));
                }
            }
        }

        let missing = |k: &str| Error::Config(format!("missing required key {k:?}"));
        Ok(SweepConfig {
            algorithms: algorithms.ok_or_else(|| missing("algorithms"))?,
            sizes: sizes.ok_or_else(|| missing("sizes"))?,
            ms: ms.ok_or_else(|| missing("ms"))?,
            seeds: seeds.ok_or_else(|| missing("seeds"))?,
            seed_base: seed_base.unwrap_or(0),
            mode: mode.ok_or_else(|| missing("mode"))?,
        })
    }
}

/// Runs every cell of the config's cross product and returns rows sorted by
/// `(algorithm, size, M, seed)`.
///
/// All validity checks happen up front — infeasible sizes and impossible
/// `(size, M)` pairs reject the whole sweep before any cell runs. Cells run
/// in parallel; each owns its instance and state, and the deterministic sort
/// plus seeded generation make the output a pure function of the config.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    for &algorithm in &config.algorithms {
        for &size in &config.sizes {
            ensure_feasible(algorithm, size)?;
            if size < 2 {
                return Err(Error::InvalidDimension { dim: size });
            }
            for &m in &config.ms {
                if m < 1 || m > size {
                    return Err(Error::InvalidMarkedCount { m, dim: size });
                }
            }
        }
    }

    let mut cells = Vec::new();
    for &algorithm in &config.algorithms {
        for &size in &config.sizes {
            for &m in &config.ms {
                for i in 0..config.seeds {
                    cells.push((algorithm, size, m, config.seed_base.wrapping_add(i)));
                }
            }
        }
    }

    let mut rows = cells
        .into_par_iter()
        .map(|(algorithm, size, m, seed)| match algorithm {
            Algorithm::StructuredQ => structured_sweep_row(size, m, seed, config.mode),
            Algorithm::FlatQ => flat_sweep_row(size, m, seed, config.mode),
            Algorithm::Classical => classical_sweep_row(size, m, seed),
        })
        .collect::<Result<Vec<SweepRow>>>()?;

    rows.sort_by_key(|row| (row.algorithm, row.size, row.m, row.seed));
    Ok(rows)
}
