//! Grover building blocks: phase oracles, per-register diffusion reflections,
//! iteration schedules, and the analytic success-probability formula used as
//! an independent cross-check on the simulator.
//!
//! Oracle applications tally exactly one call on the owning instance per
//! application (see [`crate::instances`]); diffusions touch no counters.
//! Every operator here is an exact involution up to floating-point error, and
//! diffusion is implemented as a per-slice mean reflection — `O(L²)` per
//! application without materializing any matrix, which keeps the largest
//! supported sizes (L = 1024, N = 2²⁰) fast.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instances::{FlatInstance, StructuredInstance};
use crate::statevector::{ComplexAmplitude, SingleRegisterState, TwoRegisterState};

/// Which register a diffusion reflects about its uniform state.
///
/// `X` and `Y` address the two registers of a [`TwoRegisterState`]; `Whole`
/// is only valid for a [`SingleRegisterState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterSelector {
    X,
    Y,
    Whole,
}

impl fmt::Display for RegisterSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegisterSelector::X => "X",
            RegisterSelector::Y => "Y",
            RegisterSelector::Whole => "WHOLE",
        })
    }
}

/// How iteration counts are rounded from their `(π/4)·√·` targets.
///
/// * `Paper` — round-half-up of `(π/4)√L`, `(π/4)√(L/M)`, `(π/4)√M`
///   (and `(π/4)√(N/M)` for the flat preparation count).
/// * `Optimal` — each count `t` maximizes the rotation formula instead:
///   `t = round(π/(4·arcsin√(m/d)) − 1/2)`, floored at 0, for that count's
///   `(d, m)` pair. Identical asymptotics; much better success probability at
///   small dimensions, where plain rounding can badly overshoot the angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScheduleMode {
    Paper,
    Optimal,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMode::Paper => "paper",
            ScheduleMode::Optimal => "optimal",
        })
    }
}

impl FromStr for ScheduleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ScheduleMode::Paper),
            "optimal" => Ok(ScheduleMode::Optimal),
            other => Err(Error::Config(format!(
                "unknown schedule mode {other:?} (expected \"paper\" or \"optimal\")"
            ))),
        }
    }
}

/// The three iteration counts of the structured pipeline.
///
/// `k` drives the inner y-search operator, `j` the hint-state preparation,
/// `h` the outer loop. Flat runs reuse this shape with `k = 0` and the
/// preparation count in the `j` slot, so the query-count identities
/// `f_calls = h(2k+1) + k` and `g_calls = j(2h+1)` hold for every run the
/// crate produces (see [`crate::structured_search::SearchResult`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationSchedule {
    pub k: u32,
    pub j: u32,
    pub h: u32,
    pub mode: ScheduleMode,
}

impl IterationSchedule {
    /// True when any count is zero; such schedules are legal (the operators
    /// degenerate to the identity) but flagged in results.
    pub fn has_zero_count(&self) -> bool {
        self.k == 0 || self.j == 0 || self.h == 0
    }
}

/// Round-half-up, the fixed tie rule for "the closest integer".
/// (Half-integers essentially never arise from √-based targets, but the rule
/// must be pinned for reproducibility.)
pub(crate) fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor().max(0.0) as u32
}

/// Count targeting `(π/4)·√ratio` rounded half-up.
pub(crate) fn paper_count(ratio: f64) -> u32 {
    round_half_up(FRAC_PI_4 * ratio.sqrt())
}

/// Count maximizing `sin²((2t+1)·arcsin√(m/d))` over integers `t ≥ 0`.
///
/// The `1e-9` nudge keeps exact-half boundary cases (e.g. `m/d = 1/2`, where
/// the target is exactly 0.5 but evaluates to 0.49999999999999994 in doubles)
/// on the intended round-up side.
pub(crate) fn optimal_count(d: f64, m: f64) -> u32 {
    let theta = (m / d).sqrt().asin();
    round_half_up(PI / (4.0 * theta) - 0.5 + 1e-9)
}

/// Computes the iteration counts for a structured `(L, M)` problem.
pub fn schedule(l: u32, m: u32, mode: ScheduleMode) -> Result<IterationSchedule> {
    if l < 2 {
        return Err(Error::InvalidDimension { dim: l });
    }
    if m < 1 || m > l {
        return Err(Error::InvalidMarkedCount { m, dim: l });
    }
    let (lf, mf) = (f64::from(l), f64::from(m));
    let (k, j, h) = match mode {
        ScheduleMode::Paper => (
            paper_count(lf),
            paper_count(lf / mf),
            paper_count(mf),
        ),
        ScheduleMode::Optimal => (
            optimal_count(lf, 1.0),
            optimal_count(lf, mf),
            optimal_count(mf, 1.0),
        ),
    };
    Ok(IterationSchedule { k, j, h, mode })
}

/// Probability mass on the marked set after `t` standard Grover iterations
/// from uniform: `sin²((2t+1)·arcsin√(marked/dim))`.
///
/// Purely analytic; the simulator must reproduce it within `1e-9`, which is
/// the main cross-validation between the two.
pub fn grover_success_probability(dim: u32, marked: u32, t: u32) -> Result<f64> {
    if dim < 1 {
        return Err(Error::InvalidDimension { dim });
    }
    if marked < 1 || marked > dim {
        return Err(Error::InvalidMarkedCount { m: marked, dim });
    }
    let theta = (f64::from(marked) / f64::from(dim)).sqrt().asin();
    Ok(((2.0 * f64::from(t) + 1.0) * theta).sin().powi(2))
}

fn check_two_register(state: &TwoRegisterState, l: u32) -> Result<()> {
    if state.l() != l {
        return Err(Error::DimensionMismatch {
            left: state.l(),
            right: l,
        });
    }
    Ok(())
}

fn check_single_register(state: &SingleRegisterState, n: u32) -> Result<()> {
    if state.n() != n {
        return Err(Error::DimensionMismatch {
            left: state.n(),
            right: n,
        });
    }
    Ok(())
}

/// Phase oracle of F on the joint state: negates the amplitude at
/// `(x0, y0)`, leaves every other basis state unchanged. One f-call.
pub fn apply_phase_f(state: &mut TwoRegisterState, inst: &mut StructuredInstance) -> Result<()> {
    check_two_register(state, inst.l())?;
    let idx = state.index_of(inst.x0(), inst.y0());
    state.amps[idx] = -state.amps[idx];
    inst.tally_f();
    Ok(())
}

/// Phase oracle of G on the joint state: negates every amplitude whose
/// first-register value is hinted. One g-call.
pub fn apply_phase_g(state: &mut TwoRegisterState, inst: &mut StructuredInstance) -> Result<()> {
    check_two_register(state, inst.l())?;
    let l = inst.l() as usize;
    for x in 1..=inst.l() {
        if inst.hinted(x) {
            let row = (x as usize - 1) * l;
            for amp in &mut state.amps[row..row + l] {
                *amp = -*amp;
            }
        }
    }
    inst.tally_g();
    Ok(())
}

/// Phase oracle of the restricted predicate `y ↦ F(x, y)` on a single
/// register: negates the amplitude at `y0` when `x = x0`, otherwise acts as
/// the identity. One f-call either way — the oracle is consulted regardless
/// of what it returns. Drives the final y-search stage.
pub fn apply_phase_f_row(
    state: &mut SingleRegisterState,
    inst: &mut StructuredInstance,
    x: u32,
) -> Result<()> {
    check_single_register(state, inst.l())?;
    if x < 1 || x > inst.l() {
        return Err(Error::IndexOutOfRange { index: x, dim: inst.l() });
    }
    if x == inst.x0() {
        let idx = inst.y0() as usize - 1;
        state.amps[idx] = -state.amps[idx];
    }
    inst.tally_f();
    Ok(())
}

/// Phase oracle of G as a single-register operator on the x register alone:
/// negates amplitudes at hinted values. One g-call. Used when the hint set
/// is a singleton and the search degenerates to two independent stages.
pub fn apply_phase_g_x(
    state: &mut SingleRegisterState,
    inst: &mut StructuredInstance,
) -> Result<()> {
    check_single_register(state, inst.l())?;
    for z in 1..=inst.l() {
        if inst.hinted(z) {
            state.amps[z as usize - 1] = -state.amps[z as usize - 1];
        }
    }
    inst.tally_g();
    Ok(())
}

/// Single-register phase oracle of the flat marked point: negates the
/// amplitude at `z0`. One f-call.
pub fn apply_phase_f_flat(state: &mut SingleRegisterState, inst: &mut FlatInstance) -> Result<()> {
    check_single_register(state, inst.n())?;
    let idx = inst.z0() as usize - 1;
    state.amps[idx] = -state.amps[idx];
    inst.tally_f();
    Ok(())
}

/// Single-register phase oracle of the flat hint predicate: negates
/// amplitudes at hinted values. One g-call.
pub fn apply_phase_g_flat(state: &mut SingleRegisterState, inst: &mut FlatInstance) -> Result<()> {
    check_single_register(state, inst.n())?;
    for z in 1..=inst.n() {
        if inst.hinted(z) {
            state.amps[z as usize - 1] = -state.amps[z as usize - 1];
        }
    }
    inst.tally_g();
    Ok(())
}

/// Reflects amplitudes about their mean over a slice: `a ← 2·mean − a`.
fn reflect_about_mean(amps: &mut [ComplexAmplitude]) {
    let mean = amps.iter().sum::<ComplexAmplitude>() / amps.len() as f64;
    let twice = 2.0 * mean;
    for a in amps {
        *a = twice - *a;
    }
}

/// Diffusion `2|s⟩⟨s| − 1` on one register of a two-register state.
///
/// Selector `Y` reflects the amplitudes over `y` about their mean for each
/// fixed `x`; selector `X` does the same over `x` for each fixed `y`.
/// `Whole` is invalid here. No oracle counters change.
pub fn apply_diffusion(state: &mut TwoRegisterState, selector: RegisterSelector) -> Result<()> {
    let l = state.l() as usize;
    match selector {
        RegisterSelector::Y => {
            for row in state.amps.chunks_exact_mut(l) {
                reflect_about_mean(row);
            }
        }
        RegisterSelector::X => {
            // Column means in one linear pass, then one linear update pass:
            // strided per-column loops would thrash the cache at L = 1024.
            let mut means = vec![ComplexAmplitude::ZERO; l];
            for row in state.amps.chunks_exact(l) {
                for (mean, amp) in means.iter_mut().zip(row) {
                    *mean += amp;
                }
            }
            let scale = 2.0 / l as f64;
            for mean in &mut means {
                *mean *= scale;
            }
            for row in state.amps.chunks_exact_mut(l) {
                for (mean, amp) in means.iter().zip(row) {
                    *amp = mean - *amp;
                }
            }
        }
        RegisterSelector::Whole => {
            return Err(Error::InvalidSelector {
                selector: "WHOLE",
                shape: "two-register",
            })
        }
    }
    Ok(())
}

/// Diffusion `2|σ⟩⟨σ| − 1` over the whole single register.
/// Only the `Whole` selector is valid for this shape.
pub fn apply_diffusion_single(
    state: &mut SingleRegisterState,
    selector: RegisterSelector,
) -> Result<()> {
    match selector {
        RegisterSelector::Whole => {
            reflect_about_mean(&mut state.amps);
            Ok(())
        }
        RegisterSelector::X | RegisterSelector::Y => Err(Error::InvalidSelector {
            selector: match selector {
                RegisterSelector::X => "X",
                _ => "Y",
            },
            shape: "single-register",
        }),
    }
}
