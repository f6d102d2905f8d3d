//! Command-line front end: single runs of each search, config-driven sweeps,
//! and scaling fits over sweep CSVs.
//!
//! Exit codes: 0 on success, 2 for invalid arguments or malformed input,
//! 3 when a requested size exceeds the dense-simulation memory guard.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use nested_grover::amplification::ScheduleMode;
use nested_grover::error::Error;
use nested_grover::flat_search::run_flat_search;
use nested_grover::harness::csv::{read_csv, write_csv};
use nested_grover::harness::fit::{fit_by_algorithm, XVariable};
use nested_grover::harness::{
    classical_structured_scan, ensure_feasible, run_sweep, Algorithm, SweepConfig, SweepRow,
};
use nested_grover::instances::{FlatInstance, StructuredInstance};
use nested_grover::structured_search::{run_structured_search, SearchResult};

#[derive(Parser)]
#[command(
    name = "nested-grover",
    version,
    about = "Statevector experiments: nested amplitude amplification on a \
hinted grid, its flat no-speedup counterpart, and the classical baseline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<ScheduleMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_x(s: &str) -> Result<XVariable, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Run the structured two-register search on one seeded instance
    Structured {
        /// Grid dimension (L×L grid, 2 ≤ L ≤ 1024)
        #[arg(long = "L")]
        l: u32,
        /// Number of hinted rows (1 ≤ M ≤ L)
        #[arg(long = "M")]
        m: u32,
        /// Instance seed
        #[arg(long)]
        seed: u64,
        /// Iteration-count rule: paper | optimal
        #[arg(long, default_value = "paper", value_parser = parse_mode)]
        mode: ScheduleMode,
        /// Also append the run as one CSV row (with header) to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the flat single-register search on one seeded instance
    Flat {
        /// Domain size (2 ≤ N ≤ 2^20)
        #[arg(long = "N")]
        n: u32,
        /// Hint support size (1 ≤ M ≤ N)
        #[arg(long = "M")]
        m: u32,
        /// Instance seed
        #[arg(long)]
        seed: u64,
        /// Iteration-count rule: paper | optimal
        #[arg(long, default_value = "paper", value_parser = parse_mode)]
        mode: ScheduleMode,
        /// Also write the run as one CSV row (with header) to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the classical row-by-row scan on one seeded instance
    Classical {
        /// Grid dimension (L×L grid, 2 ≤ L ≤ 1024)
        #[arg(long = "L")]
        l: u32,
        /// Number of hinted rows (1 ≤ M ≤ L)
        #[arg(long = "M")]
        m: u32,
        /// Instance seed
        #[arg(long)]
        seed: u64,
        /// Also write the run as one CSV row (with header) to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a full experiment grid from a key=value config file
    Sweep {
        /// Config file: algorithms=, sizes=, ms=, seeds=, mode=, [seed_base=]
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (overwritten)
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit log(total_calls) against log(M·size) or log(size) over a sweep CSV
    Fit {
        /// Input sweep CSV
        #[arg(long = "in")]
        input: PathBuf,
        /// x variable: ml (M·size) | n (size)
        #[arg(long = "x", value_parser = parse_x)]
        x: XVariable,
    },
}

fn write_rows(path: &Path, rows: &[SweepRow]) -> Result<(), Error> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    write_csv(&mut out, rows)?;
    Ok(())
}

fn print_quantum_run(result: &SearchResult, elapsed_ms: f64, expected: (u32, u32)) {
    let sched = result.schedule_used;
    println!(
        "schedule: mode={} k={} j={} h={} path={}{}",
        sched.mode,
        sched.k,
        sched.j,
        sched.h,
        result.path,
        if result.zero_count_schedule {
            " (degenerate zero-count schedule)"
        } else {
            ""
        }
    );
    println!(
        "outcome: x={} y={} expected=({}, {}) hit={}",
        result.outcome_x,
        result.outcome_y,
        expected.0,
        expected.1,
        (result.outcome_x, result.outcome_y) == expected
    );
    println!("success_probability={:.16e}", result.success_probability);
    println!(
        "joint_success_probability={:.16e}",
        result.joint_success_probability
    );
    println!(
        "calls: f={} g={} total={}",
        result.f_calls,
        result.g_calls,
        result.total_calls()
    );
    println!("elapsed_ms={elapsed_ms:.3}");
}

fn cmd_structured(
    l: u32,
    m: u32,
    seed: u64,
    mode: ScheduleMode,
    csv: Option<PathBuf>,
) -> Result<(), Error> {
    ensure_feasible(Algorithm::StructuredQ, l)?;
    let started = Instant::now();
    let mut inst = StructuredInstance::generate(l, m, seed)?;
    let result = run_structured_search(&mut inst, mode)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    print!("{}", inst.audit_text());
    print_quantum_run(&result, elapsed_ms, (inst.x0(), inst.y0()));
    if let Some(path) = csv {
        let row = SweepRow {
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
            elapsed_ms,
        };
        write_rows(&path, &[row])?;
    }
    Ok(())
}

fn cmd_flat(
    n: u32,
    m: u32,
    seed: u64,
    mode: ScheduleMode,
    csv: Option<PathBuf>,
) -> Result<(), Error> {
    ensure_feasible(Algorithm::FlatQ, n)?;
    let started = Instant::now();
    let mut inst = FlatInstance::generate(n, m, seed)?;
    let result = run_flat_search(&mut inst, mode)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    print!("{}", inst.audit_text());
    print_quantum_run(&result, elapsed_ms, (inst.z0(), 0));
    if let Some(path) = csv {
        let row = SweepRow {
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
            elapsed_ms,
        };
        write_rows(&path, &[row])?;
    }
    Ok(())
}

fn cmd_classical(l: u32, m: u32, seed: u64, csv: Option<PathBuf>) -> Result<(), Error> {
    ensure_feasible(Algorithm::Classical, l)?;
    let started = Instant::now();
    let mut inst = StructuredInstance::generate(l, m, seed)?;
    let mut row = classical_structured_scan(&mut inst)?;
    row.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    print!("{}", inst.audit_text());
    println!(
        "outcome: x={} y={} hit={}",
        row.outcome_x,
        row.outcome_y,
        (row.outcome_x, row.outcome_y) == (inst.x0(), inst.y0())
    );
    println!(
        "calls: f={} g={} total={}",
        row.f_calls, row.g_calls, row.total_calls
    );
    println!("elapsed_ms={:.3}", row.elapsed_ms);
    if let Some(path) = csv {
        write_rows(&path, &[row])?;
    }
    Ok(())
}

fn cmd_sweep(config_path: &Path, out: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(config_path)?;
    let config: SweepConfig = text.parse()?;
    let rows = run_sweep(&config)?;
    write_rows(out, &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_fit(input: &Path, x: XVariable) -> Result<(), Error> {
    let file = fs::File::open(input)?;
    let rows = read_csv(BufReader::new(file))?;
    if rows.is_empty() {
        return Err(Error::Fit("no rows in input".to_string()));
    }
    for (algorithm, report) in fit_by_algorithm(&rows, x)? {
        println!("algorithm={algorithm} x={x} {report}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Structured { l, m, seed, mode, csv } => cmd_structured(l, m, seed, mode, csv),
        Command::Flat { n, m, seed, mode, csv } => cmd_flat(n, m, seed, mode, csv),
        Command::Classical { l, m, seed, csv } => cmd_classical(l, m, seed, csv),
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Fit { input, x } => cmd_fit(&input, x),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InfeasibleSize { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
