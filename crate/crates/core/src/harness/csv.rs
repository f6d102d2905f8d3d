//! CSV serialization for sweep rows.
//!
//! Hand-rolled on purpose: the format is a fixed 12-column contract with no
//! quoting, no escaping, and byte-exact float formatting (`{:.16e}`, 17
//! significant digits, so every f64 round-trips exactly). A general CSV
//! dependency would add configuration surface without buying anything here.

use std::io::{self, BufRead, Write};
use std::str::FromStr;

use crate::amplification::ScheduleMode;
use crate::error::{Error, Result};
use crate::harness::{Algorithm, SweepRow};
use crate::statevector::decimal17;

/// The exact header line (without trailing newline) of every sweep CSV.
pub const CSV_HEADER: &str = "algorithm,size,M,seed,mode,f_calls,g_calls,\
total_calls,success_probability,outcome_x,outcome_y,elapsed_ms";

fn mode_field(mode: Option<ScheduleMode>) -> String {
    match mode {
        Some(m) => m.to_string(),
        None => "n/a".to_string(),
    }
}

fn row_line(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        row.algorithm,
        row.size,
        row.m,
        row.seed,
        mode_field(row.mode),
        row.f_calls,
        row.g_calls,
        row.total_calls,
        decimal17(row.success_probability),
        row.outcome_x,
        row.outcome_y,
        decimal17(row.elapsed_ms),
    )
}

/// Writes the header and one line per row, `\n`-terminated throughout.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row_line(row))?;
    }
    Ok(())
}

/// Renders rows to an in-memory CSV string (same bytes `write_csv` emits).
pub fn rows_to_csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

fn parse_field<T: FromStr>(field: &str, name: &str, line: usize) -> Result<T> {
    field.parse::<T>().map_err(|_| Error::Csv {
        line,
        reason: format!("bad {name} field {field:?}"),
    })
}

/// Reads a sweep CSV produced by [`write_csv`], validating the header and
/// every field. Line numbers in errors are 1-based (header is line 1).
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<SweepRow>> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) => {
            let header = header?;
            if header != CSV_HEADER {
                return Err(Error::Csv {
                    line: 1,
                    reason: format!("unexpected header {header:?}"),
                });
            }
        }
        None => {
            return Err(Error::Csv {
                line: 1,
                reason: "empty input, expected a header line".to_string(),
            })
        }
    }

    let mut rows = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Csv {
                line: line_no,
                reason: format!("expected 12 fields, found {}", fields.len()),
            });
        }
        let mode = match fields[4] {
            "n/a" => None,
            other => Some(other.parse::<ScheduleMode>().map_err(|_| Error::Csv {
                line: line_no,
                reason: format!("bad mode field {other:?}"),
            })?),
        };
        rows.push(SweepRow {
            algorithm: fields[0].parse::<Algorithm>().map_err(|_| Error::Csv {
                line: line_no,
                reason: format!("bad algorithm field {:?}", fields[0]),
            })?,
            size: parse_field(fields[1], "size", line_no)?,
            m: parse_field(fields[2], "M", line_no)?,
            seed: parse_field(fields[3], "seed", line_no)?,
            mode,
            f_calls: parse_field(fields[5], "f_calls", line_no)?,
            g_calls: parse_field(fields[6], "g_calls", line_no)?,
            total_calls: parse_field(fields[7], "total_calls", line_no)?,
            success_probability: parse_field(fields[8], "success_probability", line_no)?,
            outcome_x: parse_field(fields[9], "outcome_x", line_no)?,
            outcome_y: parse_field(fields[10], "outcome_y", line_no)?,
            elapsed_ms: parse_field(fields[11], "elapsed_ms", line_no)?,
        });
    }
    Ok(rows)
}
