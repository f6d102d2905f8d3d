//! Least-squares scaling fits on log-log axes.
//!
//! The experiments produce total query counts over a grid of problem sizes;
//! a straight-line fit of `log(total_calls)` against `log(M·L)` (structured)
//! or `log(N)` (flat) recovers the scaling exponent — ~0.5 for the quantum
//! searches, ~1.0 for the classical scan.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::{Algorithm, SweepRow};

/// Result of one least-squares fit of `ln y` against `ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    /// Scaling exponent: y ≈ e^intercept · x^slope.
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination in log space; 1.0 for exact power laws
    /// and, by convention, for perfectly constant data.
    pub r_squared: f64,
    pub n_points: usize,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "slope={:.6} intercept={:.6} r_squared={:.6} n_points={}",
            self.slope, self.intercept, self.r_squared, self.n_points
        )
    }
}

/// Which column plays the role of x in a scaling fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XVariable {
    /// x = M·size — the structured grid's M·L work measure.
    Ml,
    /// x = size — the flat domain size N.
    N,
}

impl fmt::Display for XVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XVariable::Ml => "ml",
            XVariable::N => "n",
        })
    }
}

impl FromStr for XVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(XVariable::Ml),
            "n" => Ok(XVariable::N),
            other => Err(Error::InvalidArgument(format!(
                "unknown x variable {other:?} (expected ml or n)"
            ))),
        }
    }
}

impl XVariable {
    fn of_row(self, row: &SweepRow) -> f64 {
        match self {
            XVariable::Ml => f64::from(row.m) * f64::from(row.size),
            XVariable::N => f64::from(row.size),
        }
    }
}

/// Least-squares fit of `ln y` against `ln x` over raw points.
///
/// Requires at least 3 points, all strictly positive, with at least two
/// distinct x values. Constant y data fits slope 0 with r² defined as 1.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<FitReport> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points
        .iter()
        .find(|&&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::Fit(format!(
            "all points must be finite and positive, got ({x}, {y})"
        )));
    }

    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let var_x = logs.iter().map(|&(x, _)| (x - mean_x).powi(2)).sum::<f64>();
    if var_x == 0.0 {
        return Err(Error::Fit(
            "all x values coincide; the slope is undefined".to_string(),
        ));
    }
    let cov_xy = logs
        .iter()
        .map(|&(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>();

    let slope = cov_xy / var_x;
    let intercept = mean_y - slope * mean_x;
    let ss_tot = logs.iter().map(|&(_, y)| (y - mean_y).powi(2)).sum::<f64>();
    let ss_res = logs
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum::<f64>();
    // Constant y leaves ss_tot at rounding-noise scale (the mean of equal
    // values is not bitwise exact); call that a perfect fit rather than
    // dividing noise by noise.
    let noise_floor = n * f64::EPSILON * f64::EPSILON * (1.0 + mean_y * mean_y);
    let r_squared = if ss_tot <= noise_floor {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };

    Ok(FitReport {
        slope,
        intercept,
        r_squared,
        n_points: points.len(),
    })
}

/// Fits the scaling of total query counts across sweep rows.
///
/// Rows are grouped into `(size, M)` cells and `total_calls` is averaged over
/// seeds within each cell (quantum counts are schedule-determined, so their
/// mean is exact; classical counts genuinely vary by seed). The fit then runs
/// on the cell points. All rows must belong to a single algorithm — mixing
/// baselines into one power law would be meaningless.
pub fn fit_scaling(rows: &[SweepRow], x: XVariable) -> Result<FitReport> {
    let Some(first) = rows.first() else {
        return Err(Error::Fit("no rows to fit".to_string()));
    };
    if let Some(stray) = rows.iter().find(|r| r.algorithm != first.algorithm) {
        return Err(Error::Fit(format!(
            "rows mix algorithms {} and {}; fit them separately",
            first.algorithm, stray.algorithm
        )));
    }

    let mut cells: std::collections::BTreeMap<(u32, u32), (f64, u64)> =
        std::collections::BTreeMap::new();
    for row in rows {
        let entry = cells.entry((row.size, row.m)).or_insert((0.0, 0));
        entry.0 += row.total_calls as f64;
        entry.1 += 1;
    }

    let points: Vec<(f64, f64)> = cells
        .iter()
        .map(|(&(size, m), &(sum, count))| {
            let stand_in = SweepRow {
                size,
                m,
                ..first.clone()
            };
            (x.of_row(&stand_in), sum / count as f64)
        })
        .collect();
    fit_log_log(&points)
}

/// Splits rows by algorithm (in enum order) and fits each group, for CSV
/// files that interleave several experiments.
pub fn fit_by_algorithm(rows: &[SweepRow], x: XVariable) -> Result<Vec<(Algorithm, FitReport)>> {
    let mut present: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    present.sort();
    present.dedup();
    present
        .into_iter()
        .map(|algorithm| {
            let group: Vec<SweepRow> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .cloned()
                .collect();
            Ok((algorithm, fit_scaling(&group, x)?))
        })
        .collect()
}
