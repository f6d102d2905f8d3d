//! The flat single-register counterpart: the same nested pattern run over an
//! unstructured domain of size N, where the hint buys nothing — total cost
//! stays of order √N — plus the adversary hint constructors that turn any
//! plain marked-point oracle into a hint oracle.
//!
//! Pipeline (`f` marks `z0`, `g` hints `M` values including `z0`, `D` is the
//! whole-register diffusion):
//!
//! * `|φ⟩ = [D·(−1)^g]^ℓ |σ⟩` — hint-set amplification ([`prepare_phi`]).
//! * Reflection about `|φ⟩`: `[(−1)^g·D]^ℓ · D · [D·(−1)^g]^ℓ`
//!   ([`apply_reflection_phi`]). The naive reading `Û^ℓ·D·Û^ℓ` with
//!   `Û = D·(−1)^g` is **not** an involution (`Û` is not self-adjoint); this
//!   crate implements the adjoint-ordered conjugation — the same pattern as
//!   the structured reflector — which is an exact reflection fixing `|φ⟩`'s
//!   preparation axis.
//! * Outer loop: `h` rounds of reflection ∘ f-phase, then measure
//!   ([`run_flat_search`]).
//!
//! Costs: `g_calls = ℓ(2h+1) = ℓ + 2ℓh` and `f_calls = h`. Degenerate hint
//! sizes (`M = 1`, `M = N`) run the same loop with `ℓ = 0` — the reflection
//! collapses to the plain diffusion — and the outer count raised to the full
//! 1-in-N schedule, i.e. an explicitly-flagged plain Grover search on `f`.

use crate::amplification::{
    apply_diffusion_single, apply_phase_f_flat, apply_phase_g_flat, optimal_count, paper_count,
    IterationSchedule, RegisterSelector, ScheduleMode,
};
use crate::error::{Error, Result};
use crate::instances::FlatInstance;
use crate::statevector::{sample_flat, SingleRegisterState};
use crate::structured_search::{SearchPath, SearchResult};

/// The two iteration counts of the flat pipeline: `ell` preparation steps,
/// `h` outer rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatSchedule {
    pub ell: u32,
    pub h: u32,
    pub mode: ScheduleMode,
}

/// Computes the flat iteration counts for an `(N, M)` problem: `ell` targets
/// `(π/4)√(N/M)` and `h` targets `(π/4)√M`, rounded per the mode.
pub fn flat_schedule(n: u32, m: u32, mode: ScheduleMode) -> Result<FlatSchedule> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n });
    }
    if m < 1 || m > n {
        return Err(Error::InvalidMarkedCount { m, dim: n });
    }
    let (nf, mf) = (f64::from(n), f64::from(m));
    let (ell, h) = match mode {
        ScheduleMode::Paper => (paper_count(nf / mf), paper_count(mf)),
        ScheduleMode::Optimal => (optimal_count(nf, mf), optimal_count(mf, 1.0)),
    };
    Ok(FlatSchedule { ell, h, mode })
}

/// Prepares `|φ⟩`: from uniform, `ell` repetitions of the Grover step built
/// from the g phase oracle. Counts `ell` g-calls.
pub fn prepare_phi(inst: &mut FlatInstance, sched: &FlatSchedule) -> Result<SingleRegisterState> {
    let mut state = SingleRegisterState::uniform(inst.n())?;
    for _ in 0..sched.ell {
        apply_phase_g_flat(&mut state, inst)?;
        apply_diffusion_single(&mut state, RegisterSelector::Whole)?;
    }
    Ok(state)
}

/// Applies the reflection about the prepared state,
/// `[(−1)^g·D]^ℓ · D · [D·(−1)^g]^ℓ` (rightmost factor first).
/// Counts `2ℓ` g-calls. Exact involution; fixes `[(−1)^g·D]^ℓ |σ⟩`.
pub fn apply_reflection_phi(
    state: &mut SingleRegisterState,
    inst: &mut FlatInstance,
    sched: &FlatSchedule,
) -> Result<()> {
    for _ in 0..sched.ell {
        apply_phase_g_flat(state, inst)?;
        apply_diffusion_single(state, RegisterSelector::Whole)?;
    }
    apply_diffusion_single(state, RegisterSelector::Whole)?;
    for _ in 0..sched.ell {
        apply_diffusion_single(state, RegisterSelector::Whole)?;
        apply_phase_g_flat(state, inst)?;
    }
    Ok(())
}

/// Runs the flat search with exact amplitude readout.
///
/// `2 ≤ M ≤ N−1` runs the nested loop on the scheduled `(ℓ, h)`; degenerate
/// `M` runs the same loop with `ℓ = 0` and the full 1-in-N outer count — a
/// plain Grover search on `f`, flagged as [`SearchPath::FOnly`]. The result
/// reports the measured value in `outcome_x` (`outcome_y = 0`), and its
/// reported schedule stores `ell` in the `j` slot with `k = 0`, so the
/// query-count identities hold in the same form as for structured runs.
pub fn run_flat_search(inst: &mut FlatInstance, mode: ScheduleMode) -> Result<SearchResult> {
    run_flat(inst, mode, None)
}

/// Demonstration variant of [`run_flat_search`]: outcomes and probabilities
/// estimated from `shots` seeded draws (`exact = false`).
pub fn run_flat_search_sampled(
    inst: &mut FlatInstance,
    mode: ScheduleMode,
    shots: u32,
    sample_seed: u64,
) -> Result<SearchResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument(
            "sampling requires at least one shot".into(),
        ));
    }
    run_flat(inst, mode, Some((shots, sample_seed)))
}

fn run_flat(
    inst: &mut FlatInstance,
    mode: ScheduleMode,
    sampling: Option<(u32, u64)>,
) -> Result<SearchResult> {
    let (f_before, g_before) = inst.counter_snapshot();
    let scheduled = flat_schedule(inst.n(), inst.m(), mode)?;

    let degenerate = inst.m() == 1 || inst.m() == inst.n();
    let effective = if degenerate {
        let t = match mode {
            ScheduleMode::Paper => paper_count(f64::from(inst.n())),
            ScheduleMode::Optimal => optimal_count(f64::from(inst.n()), 1.0),
        };
        FlatSchedule { ell: 0, h: t, mode }
    } else {
        scheduled
    };

    let mut state = prepare_phi(inst, &effective)?;
    for _ in 0..effective.h {
        apply_phase_f_flat(&mut state, inst)?;
        apply_reflection_phi(&mut state, inst, &effective)?;
    }

    let probabilities = state.probabilities();
    let p_z0_exact = probabilities[inst.z0() as usize - 1];
    let (outcome, success_probability, exact) = match sampling {
        None => {
            let mut best = 0usize;
            for (i, p) in probabilities.iter().enumerate() {
                if *p > probabilities[best] {
                    best = i;
                }
            }
            (best as u32 + 1, p_z0_exact, true)
        }
        Some((shots, seed)) => {
            let draws = sample_flat(&probabilities, shots, seed);
            let mut counts = vec![0u32; probabilities.len()];
            for &d in &draws {
                counts[d] += 1;
            }
            let mut best = 0usize;
            for (i, c) in counts.iter().enumerate() {
                if *c > counts[best] {
                    best = i;
                }
            }
            let fraction =
                counts[inst.z0() as usize - 1] as f64 / draws.len() as f64;
            (best as u32 + 1, fraction, false)
        }
    };

    let (f_after, g_after) = inst.counter_snapshot();
    let result = SearchResult {
        outcome_x: outcome,
        outcome_y: 0,
        success_probability,
        joint_success_probability: success_probability,
        f_calls: f_after - f_before,
        g_calls: g_after - g_before,
        schedule_used: IterationSchedule {
            k: 0,
            j: effective.ell,
            h: effective.h,
            mode,
        },
        exact,
        path: if degenerate { SearchPath::FOnly } else { SearchPath::Nested },
        zero_count_schedule: if degenerate {
            effective.h == 0
        } else {
            effective.ell == 0 || effective.h == 0
        },
    };
    debug_assert!(result.counts_match_schedule());
    Ok(result)
}

/// A hint predicate built from a plain marked-point oracle: true when the
/// argument falls in a fixed prefix `1..=prefix` or the f-oracle fires.
/// Every evaluation routes through the instrumented f-oracle (exactly one
/// f-call, never short-circuited), so reductions built from it keep honest
/// query accounts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HintPredicate {
    prefix: u32,
    n: u32,
}

impl HintPredicate {
    /// Prefix length this predicate unions with the f-oracle.
    pub fn prefix(&self) -> u32 {
        self.prefix
    }

    /// Evaluates the predicate at `z`, counting one f-call.
    pub fn eval(&self, inst: &mut FlatInstance, z: u32) -> Result<bool> {
        if inst.n() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: inst.n() });
        }
        let fires = inst.query_f(z)?;
        Ok(fires || z <= self.prefix)
    }

    /// Evaluates the predicate on the whole domain (costing N f-calls) and
    /// returns the sorted set where it is true.
    pub fn ones(&self, inst: &mut FlatInstance) -> Result<Vec<u32>> {
        (1..=self.n)
            .filter_map(|z| match self.eval(inst, z) {
                Ok(true) => Some(Ok(z)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect()
    }
}

/// First adversary constructor: true on `1..=M−1` or where f fires.
/// Has exactly `M` ones (including `z0`) whenever `z0 ≥ M`.
pub fn build_g1(inst: &FlatInstance, m: u32) -> Result<HintPredicate> {
    if m < 1 || m > inst.n() {
        return Err(Error::InvalidMarkedCount { m, dim: inst.n() });
    }
    Ok(HintPredicate { prefix: m - 1, n: inst.n() })
}

/// Second adversary constructor: true on `1..=M` or where f fires.
/// Has exactly `M` ones (including `z0`) whenever `z0 ≤ M`.
pub fn build_g2(inst: &FlatInstance, m: u32) -> Result<HintPredicate> {
    if m < 1 || m > inst.n() {
        return Err(Error::InvalidMarkedCount { m, dim: inst.n() });
    }
    Ok(HintPredicate { prefix: m, n: inst.n() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{ComplexAmplitude, NORM_TOLERANCE};

    fn max_deviation(a: &SingleRegisterState, b: &SingleRegisterState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn random_state(n: u32, seed: u64) -> SingleRegisterState {
        let amps = (0..n as usize)
            .map(|i| {
                let t = (seed as f64 + 3.5) * (i as f64 + 0.6);
                ComplexAmplitude::new(t.sin(), (t * 0.7).cos())
            })
            .collect();
        SingleRegisterState::from_amplitudes(n, amps).unwrap()
    }

    #[test]
    fn flat_schedule_paper_values() {
        let s = flat_schedule(16, 4, ScheduleMode::Paper).unwrap();
        assert_eq!((s.ell, s.h), (2, 2));
        let s = flat_schedule(1024, 16, ScheduleMode::Paper).unwrap();
        assert_eq!((s.ell, s.h), (6, 3));
        let s = flat_schedule(256, 16, ScheduleMode::Paper).unwrap();
        assert_eq!((s.ell, s.h), (3, 3));
        assert!(flat_schedule(1, 1, ScheduleMode::Paper).is_err());
        assert!(flat_schedule(8, 0, ScheduleMode::Paper).is_err());
    }

    #[test]
    fn prepare_phi_amplifies_the_hinted_mass() {
        let mut inst = FlatInstance::generate(256, 16, 7).unwrap();
        let sched = flat_schedule(256, 16, ScheduleMode::Paper).unwrap();
        assert_eq!(sched.ell, 3);
        let state = prepare_phi(&mut inst, &sched).unwrap();
        assert_eq!(inst.counter_snapshot(), (0, 3));
        let mass: f64 = inst
            .g_set()
            .iter()
            .map(|&z| state.probability_of(z).unwrap())
            .sum();
        assert!((mass - 0.9613189697265625).abs() < 1e-9);
        assert!((state.squared_norm() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn prepare_phi_degenerate_cases() {
        let mut inst = FlatInstance::generate(64, 4, 3).unwrap();
        let zero = FlatSchedule { ell: 0, h: 0, mode: ScheduleMode::Paper };
        let state = prepare_phi(&mut inst, &zero).unwrap();
        let mass: f64 = inst
            .g_set()
            .iter()
            .map(|&z| state.probability_of(z).unwrap())
            .sum();
        assert!((mass - 4.0 / 64.0).abs() < 1e-12);

        let mut all = FlatInstance::generate(16, 16, 3).unwrap();
        let sched = FlatSchedule { ell: 2, h: 0, mode: ScheduleMode::Paper };
        let state = prepare_phi(&mut all, &sched).unwrap();
        let mass: f64 = all
            .g_set()
            .iter()
            .map(|&z| state.probability_of(z).unwrap())
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution_and_counts_2ell() {
        let mut inst = FlatInstance::generate(64, 4, 19).unwrap();
        let sched = flat_schedule(64, 4, ScheduleMode::Paper).unwrap();
        for seed in 0..10 {
            let mut state = random_state(64, seed);
            let before = state.clone();
            apply_reflection_phi(&mut state, &mut inst, &sched).unwrap();
            apply_reflection_phi(&mut state, &mut inst, &sched).unwrap();
            assert!(max_deviation(&state, &before) < 1e-10);
        }

        let mut counting = FlatInstance::generate(64, 4, 19).unwrap();
        let six = FlatSchedule { ell: 6, h: 1, mode: ScheduleMode::Paper };
        let mut state = SingleRegisterState::uniform(64).unwrap();
        apply_reflection_phi(&mut state, &mut counting, &six).unwrap();
        assert_eq!(counting.counter_snapshot(), (0, 12));
    }

    #[test]
    fn reflection_fixes_its_preparation_axis() {
        let mut inst = FlatInstance::generate(64, 4, 23).unwrap();
        let sched = flat_schedule(64, 4, ScheduleMode::Paper).unwrap();
        // axis = [(−1)^g·D]^ℓ |σ⟩: apply D first, then the phase, ℓ times.
        let mut axis = SingleRegisterState::uniform(64).unwrap();
        for _ in 0..sched.ell {
            apply_diffusion_single(&mut axis, RegisterSelector::Whole).unwrap();
            apply_phase_g_flat(&mut axis, &mut inst).unwrap();
        }
        let mut image = axis.clone();
        apply_reflection_phi(&mut image, &mut inst, &sched).unwrap();
        assert!(max_deviation(&image, &axis) < 1e-12);
    }

    #[test]
    fn paper_run_counts_match_hand_computation() {
        let mut inst = FlatInstance::generate(16, 4, 2).unwrap();
        let result = run_flat_search(&mut inst, ScheduleMode::Paper).unwrap();
        assert_eq!(result.g_calls, 10); // ℓ+2ℓh = 2+8
        assert_eq!(result.f_calls, 2); // h
        assert!(result.counts_match_schedule());
        assert_eq!(result.path, SearchPath::Nested);
        assert_eq!(result.outcome_y, 0);

        let mut big = FlatInstance::generate(1024, 16, 2).unwrap();
        let result = run_flat_search(&mut big, ScheduleMode::Paper).unwrap();
        assert_eq!(result.g_calls, 42); // 6+2·6·3
        assert_eq!(result.f_calls, 3);
        let ratio = result.g_calls as f64 / f64::from(1024u32).sqrt();
        assert!((ratio - 1.3125).abs() < 1e-12);
    }

    #[test]
    fn medium_paper_run_matches_frozen_reference_probability() {
        let mut inst = FlatInstance::generate(256, 16, 42).unwrap();
        let result = run_flat_search(&mut inst, ScheduleMode::Paper).unwrap();
        assert_eq!(result.outcome_x, inst.z0());
        assert!((result.success_probability - 0.9735269683354144).abs() < 1e-9);
        assert!(result.success_probability >= 0.8);
        assert!(result.counts_match_schedule());
    }

    #[test]
    fn degenerate_hint_sizes_run_plain_grover_on_f() {
        for m in [1u32, 16] {
            let mut inst = FlatInstance::generate(16, m, 5).unwrap();
            let result = run_flat_search(&mut inst, ScheduleMode::Paper).unwrap();
            assert_eq!(result.path, SearchPath::FOnly);
            assert_eq!(result.f_calls, 3); // round((π/4)√16)
            assert_eq!(result.g_calls, 0);
            assert!(result.counts_match_schedule());
            assert_eq!(result.outcome_x, inst.z0());
            // sin²(7·arcsin(1/4)) — plain 1-in-16 Grover at t=3
            assert!((result.success_probability - 0.9613189697265625).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_flat_run_is_deterministic() {
        let mut a = FlatInstance::generate(64, 4, 31).unwrap();
        let ra = run_flat_search_sampled(&mut a, ScheduleMode::Paper, 300, 5).unwrap();
        let mut b = FlatInstance::generate(64, 4, 31).unwrap();
        let rb = run_flat_search_sampled(&mut b, ScheduleMode::Paper, 300, 5).unwrap();
        assert_eq!(ra, rb);
        assert!(!ra.exact);
        assert_eq!(ra.outcome_x, a.z0());
        assert!(matches!(
            run_flat_search_sampled(&mut a, ScheduleMode::Paper, 0, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn hint_constructors_match_the_worked_cases() {
        // N=8, M=3, z0=7: g1 fires exactly on {1,2,7}.
        let mut inst = FlatInstance::from_parts(8, 1, 7, &[7], 0).unwrap();
        let g1 = build_g1(&inst, 3).unwrap();
        assert_eq!(g1.ones(&mut inst).unwrap(), vec![1, 2, 7]);
        // ...while g2 fires on {1,2,3,7}: M+1 values, so g2 is invalid here.
        let g2 = build_g2(&inst, 3).unwrap();
        assert_eq!(g2.ones(&mut inst).unwrap(), vec![1, 2, 3, 7]);

        // N=8, M=3, z0=2: g2 fires exactly on {1,2,3}.
        let mut inst = FlatInstance::from_parts(8, 1, 2, &[2], 0).unwrap();
        let g2 = build_g2(&inst, 3).unwrap();
        assert_eq!(g2.ones(&mut inst).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn hint_predicate_always_spends_one_f_call() {
        let mut inst = FlatInstance::from_parts(8, 1, 7, &[7], 0).unwrap();
        let g1 = build_g1(&inst, 3).unwrap();
        // true via prefix, true via f, false: all three cost one f-call
        assert!(g1.eval(&mut inst, 1).unwrap());
        assert!(g1.eval(&mut inst, 7).unwrap());
        assert!(!g1.eval(&mut inst, 5).unwrap());
        assert_eq!(inst.counter_snapshot(), (3, 0));
        assert!(g1.eval(&mut inst, 9).is_err());
        assert_eq!(inst.counter_snapshot(), (3, 0));
    }

    #[test]
    fn reduction_run_matches_a_generated_instance_exactly() {
        // Build the hint from the adversary constructor, then check the
        // nested flat run behaves identically to a generated hint set of the
        // same size: success probability depends only on (N, M, z0 ∈ set).
        let n = 256u32;
        let m = 16u32;
        let mut generated = FlatInstance::generate(n, m, 77).unwrap();
        let reference = run_flat_search(&mut generated, ScheduleMode::Paper).unwrap();

        let z0 = generated.z0();
        let mut oracle_only = FlatInstance::from_parts(n, 1, z0, &[z0], 77).unwrap();
        let predicate = if z0 >= m {
            build_g1(&oracle_only, m).unwrap()
        } else {
            build_g2(&oracle_only, m).unwrap()
        };
        let ones = predicate.ones(&mut oracle_only).unwrap();
        assert_eq!(ones.len(), m as usize);
        assert!(ones.contains(&z0));

        let mut reduced = FlatInstance::from_parts(n, m, z0, &ones, 77).unwrap();
        let via_reduction = run_flat_search(&mut reduced, ScheduleMode::Paper).unwrap();
        assert!(
            (via_reduction.success_probability - reference.success_probability).abs() < 1e-12
        );
        assert_eq!(via_reduction.f_calls, reference.f_calls);
        assert_eq!(via_reduction.g_calls, reference.g_calls);
        assert_eq!(via_reduction.outcome_x, z0);
    }
}
