//! Random problem instances with instrumented, counted oracle access.
//!
//! An instance owns the hidden answer, the hint set, and two call counters.
//! Cost accounting follows one global convention:
//!
//! * a **classical point query** ([`StructuredInstance::query_f`] etc.)
//!   counts as one call;
//! * a **quantum phase-oracle application** over a full superposition also
//!   counts as exactly one call — the operators in [`crate::amplification`]
//!   receive the instance and tally once per application.
//!
//! Counters are the single source of truth for every reported cost. Reading
//! instance metadata (dimensions, the hint set, the audit dump) is free; only
//! oracle evaluations and operator applications count.
//!
//! Generation is deterministic for a fixed `(dims, M, seed)`: a ChaCha8
//! stream cipher RNG keyed by `seed_from_u64` draws, in this order, the
//! marked point (both coordinates for the structured case), then a partial
//! Fisher–Yates shuffle of the remaining domain picks the other `M-1` hinted
//! elements. ChaCha8's output is fixed by the cipher definition, so instances
//! reproduce across platforms and library versions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

fn check_instance_dims(dim: u32, m: u32) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim });
    }
    if m < 1 || m > dim {
        return Err(Error::InvalidMarkedCount { m, dim });
    }
    Ok(())
}

/// Draws a sorted hint set of size `m` containing `special`, uniformly over
/// all such subsets of `1..=dim`: partial Fisher–Yates over the domain minus
/// `special`, take `m-1`, insert `special`.
fn draw_hint_set(rng: &mut ChaCha8Rng, dim: u32, m: u32, special: u32) -> Vec<u32> {
    let mut candidates: Vec<u32> = (1..=dim).filter(|&v| v != special).collect();
    let take = (m - 1) as usize;
    for i in 0..take {
        let pick = rng.random_range(i..candidates.len());
        candidates.swap(i, pick);
    }
    let mut set: Vec<u32> = candidates[..take].to_vec();
    set.push(special);
    set.sort_unstable();
    set
}

fn build_mask(dim: u32, set: &[u32]) -> Vec<bool> {
    let mut mask = vec![false; dim as usize + 1];
    for &v in set {
        mask[v as usize] = true;
    }
    mask
}

fn validate_parts(dim: u32, m: u32, special: u32, set: &[u32]) -> Result<Vec<u32>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() || sorted.len() != m as usize {
        return Err(Error::InvalidInstance {
            reason: format!("hint set must contain exactly M={m} distinct elements"),
        });
    }
    if sorted.iter().any(|&v| v < 1 || v > dim) {
        return Err(Error::InvalidInstance {
            reason: format!("hint set element out of range 1..={dim}"),
        });
    }
    if !sorted.contains(&special) {
        return Err(Error::InvalidInstance {
            reason: format!("hint set must contain the marked element {special}"),
        });
    }
    Ok(sorted)
}

/// A structured instance over the L×L grid: unique marked cell `(x0, y0)`,
/// hint predicate G true on `M` first-register values including `x0`.
#[derive(Debug, Clone)]
pub struct StructuredInstance {
    l: u32,
    m: u32,
    x0: u32,
    y0: u32,
    g_sorted: Vec<u32>,
    g_mask: Vec<bool>,
    f_calls: u64,
    g_calls: u64,
    seed: u64,
}

impl StructuredInstance {
    /// Generates an instance: `x0`, `y0` uniform on `1..=L`, hint set uniform
    /// among size-`M` subsets containing `x0`, counters zero. Deterministic
    /// for fixed `(L, M, seed)`.
    pub fn generate(l: u32, m: u32, seed: u64) -> Result<Self> {
        check_instance_dims(l, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = rng.random_range(1..=l);
        let y0 = rng.random_range(1..=l);
        let g_sorted = draw_hint_set(&mut rng, l, m, x0);
        let g_mask = build_mask(l, &g_sorted);
        Ok(Self {
            l,
            m,
            x0,
            y0,
            g_sorted,
            g_mask,
            f_calls: 0,
            g_calls: 0,
            seed,
        })
    }

    /// Builds an instance from explicit parts (tests, reductions). Validates
    /// every invariant; `seed` is recorded verbatim for audit.
    pub fn from_parts(l: u32, m: u32, x0: u32, y0: u32, g_set: &[u32], seed: u64) -> Result<Self> {
        check_instance_dims(l, m)?;
        if x0 < 1 || x0 > l {
            return Err(Error::IndexOutOfRange { index: x0, dim: l });
        }
        if y0 < 1 || y0 > l {
            return Err(Error::IndexOutOfRange { index: y0, dim: l });
        }
        let g_sorted = validate_parts(l, m, x0, g_set)?;
        let g_mask = build_mask(l, &g_sorted);
        Ok(Self {
            l,
            m,
            x0,
            y0,
            g_sorted,
            g_mask,
            f_calls: 0,
            g_calls: 0,
            seed,
        })
    }

    /// Classical point query of F: true iff `(x, y) = (x0, y0)`.
    /// Counts one f-call. Out-of-range arguments are rejected without
    /// touching the counter.
    pub fn query_f(&mut self, x: u32, y: u32) -> Result<bool> {
        if x < 1 || x > self.l {
            return Err(Error::IndexOutOfRange { index: x, dim: self.l });
        }
        if y < 1 || y > self.l {
            return Err(Error::IndexOutOfRange { index: y, dim: self.l });
        }
        self.f_calls += 1;
        Ok(x == self.x0 && y == self.y0)
    }

    /// Classical point query of G: true iff `x` is hinted. Counts one g-call;
    /// out-of-range rejected without counting.
    pub fn query_g(&mut self, x: u32) -> Result<bool> {
        if x < 1 || x > self.l {
            return Err(Error::IndexOutOfRange { index: x, dim: self.l });
        }
        self.g_calls += 1;
        Ok(self.g_mask[x as usize])
    }

    /// Current `(f_calls, g_calls)`.
    pub fn counter_snapshot(&self) -> (u64, u64) {
        (self.f_calls, self.g_calls)
    }

    /// Zeroes both counters.
    pub fn reset_counters(&mut self) {
        self.f_calls = 0;
        self.g_calls = 0;
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn x0(&self) -> u32 {
        self.x0
    }

    pub fn y0(&self) -> u32 {
        self.y0
    }

    /// The hint set, sorted ascending. Reading it is free (audit interface);
    /// counted access goes through the oracles.
    pub fn g_set(&self) -> &[u32] {
        &self.g_sorted
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Audit serialization: `L=`, `M=`, `x0=`, `y0=`, `g_set=` (comma list),
    /// `seed=`, one per line.
    pub fn audit_text(&self) -> String {
        let set = self
            .g_sorted
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "L={}\nM={}\nx0={}\ny0={}\ng_set={}\nseed={}\n",
            self.l, self.m, self.x0, self.y0, set, self.seed
        )
    }

    /// Uncounted membership test for operator kernels; `x` must be in range.
    pub(crate) fn hinted(&self, x: u32) -> bool {
        self.g_mask[x as usize]
    }

    /// One quantum F-oracle application (phase over a superposition).
    pub(crate) fn tally_f(&mut self) {
        self.f_calls += 1;
    }

    /// One quantum G-oracle application.
    pub(crate) fn tally_g(&mut self) {
        self.g_calls += 1;
    }
}

/// A flat instance over `1..=N`: unique marked `z0`, hint predicate true on
/// `M` values including `z0`, no exploitable structure.
#[derive(Debug, Clone)]
pub struct FlatInstance {
    n: u32,
    m: u32,
    z0: u32,
    g_sorted: Vec<u32>,
    g_mask: Vec<bool>,
    f_calls: u64,
    g_calls: u64,
    seed: u64,
}

impl FlatInstance {
    /// Generates an instance: `z0` uniform on `1..=N`, hint set uniform among
    /// size-`M` subsets containing `z0`. Deterministic for fixed `(N, M, seed)`.
    pub fn generate(n: u32, m: u32, seed: u64) -> Result<Self> {
        check_instance_dims(n, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z0 = rng.random_range(1..=n);
        let g_sorted = draw_hint_set(&mut rng, n, m, z0);
        let g_mask = build_mask(n, &g_sorted);
        Ok(Self {
            n,
            m,
            z0,
            g_sorted,
            g_mask,
            f_calls: 0,
            g_calls: 0,
            seed,
        })
    }

    /// Builds an instance from explicit parts, validating every invariant.
    pub fn from_parts(n: u32, m: u32, z0: u32, g_set: &[u32], seed: u64) -> Result<Self> {
        check_instance_dims(n, m)?;
        if z0 < 1 || z0 > n {
            return Err(Error::IndexOutOfRange { index: z0, dim: n });
        }
        let g_sorted = validate_parts(n, m, z0, g_set)?;
        let g_mask = build_mask(n, &g_sorted);
        Ok(Self {
            n,
            m,
            z0,
            g_sorted,
            g_mask,
            f_calls: 0,
            g_calls: 0,
            seed,
        })
    }

    /// Classical point query of f: true iff `z = z0`. Counts one f-call.
    pub fn query_f(&mut self, z: u32) -> Result<bool> {
        if z < 1 || z > self.n {
            return Err(Error::IndexOutOfRange { index: z, dim: self.n });
        }
        self.f_calls += 1;
        Ok(z == self.z0)
    }

    /// Classical point query of g: true iff `z` is hinted. Counts one g-call.
    pub fn query_g(&mut self, z: u32) -> Result<bool> {
        if z < 1 || z > self.n {
            return Err(Error::IndexOutOfRange { index: z, dim: self.n });
        }
        self.g_calls += 1;
        Ok(self.g_mask[z as usize])
    }

    /// Current `(f_calls, g_calls)`.
    pub fn counter_snapshot(&self) -> (u64, u64) {
        (self.f_calls, self.g_calls)
    }

    /// Zeroes both counters.
    pub fn reset_counters(&mut self) {
        self.f_calls = 0;
        self.g_calls = 0;
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn z0(&self) -> u32 {
        self.z0
    }

    /// The hint set, sorted ascending; reading it is free.
    pub fn g_set(&self) -> &[u32] {
        &self.g_sorted
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Audit serialization: `N=`, `M=`, `z0=`, `g_set=`, `seed=` lines.
    pub fn audit_text(&self) -> String {
        let set = self
            .g_sorted
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "N={}\nM={}\nz0={}\ng_set={}\nseed={}\n",
            self.n, self.m, self.z0, set, self.seed
        )
    }

    pub(crate) fn hinted(&self, z: u32) -> bool {
        self.g_mask[z as usize]
    }

    pub(crate) fn tally_f(&mut self) {
        self.f_calls += 1;
    }

    pub(crate) fn tally_g(&mut self) {
        self.g_calls += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_hint_set_is_whole_domain() {
        let inst = StructuredInstance::generate(4, 4, 123).unwrap();
        assert_eq!(inst.g_set(), &[1, 2, 3, 4]);
        let flat = FlatInstance::generate(8, 8, 9).unwrap();
        assert_eq!(flat.g_set(), (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn singleton_hint_set_is_the_marked_element() {
        let inst = StructuredInstance::generate(4, 1, 55).unwrap();
        assert_eq!(inst.g_set(), &[inst.x0()]);
        let flat = FlatInstance::generate(8, 1, 55).unwrap();
        assert_eq!(flat.g_set(), &[flat.z0()]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = StructuredInstance::generate(64, 8, 7).unwrap();
        let b = StructuredInstance::generate(64, 8, 7).unwrap();
        assert_eq!((a.x0(), a.y0(), a.g_set()), (b.x0(), b.y0(), b.g_set()));

        let fa = FlatInstance::generate(64, 8, 7).unwrap();
        let fb = FlatInstance::generate(64, 8, 7).unwrap();
        assert_eq!((fa.z0(), fa.g_set()), (fb.z0(), fb.g_set()));

        let c = StructuredInstance::generate(64, 8, 8).unwrap();
        assert!(
            (a.x0(), a.y0()) != (c.x0(), c.y0()) || a.g_set() != c.g_set(),
            "different seeds should essentially always differ"
        );
    }

    #[test]
    fn query_f_marks_only_the_answer_and_counts() {
        let mut inst = StructuredInstance::generate(16, 4, 3).unwrap();
        let (x0, y0) = (inst.x0(), inst.y0());
        assert!(inst.query_f(x0, y0).unwrap());
        let y_other = if y0 == 16 { 1 } else { y0 + 1 };
        assert!(!inst.query_f(x0, y_other).unwrap());
        assert!(!inst.query_f(if x0 == 16 { 1 } else { x0 + 1 }, y0).unwrap());
        assert_eq!(inst.counter_snapshot(), (3, 0));
    }

    #[test]
    fn query_g_counts_and_sums_to_m() {
        let mut inst = StructuredInstance::generate(32, 5, 11).unwrap();
        assert!(inst.query_g(inst.x0()).unwrap());
        inst.reset_counters();
        let ones = (1..=32)
            .filter(|&x| inst.query_g(x).unwrap())
            .count();
        assert_eq!(ones, 5);
        assert_eq!(inst.counter_snapshot(), (0, 32));
    }

    #[test]
    fn out_of_range_queries_are_rejected_without_counting() {
        let mut inst = StructuredInstance::generate(8, 2, 0).unwrap();
        assert!(inst.query_f(0, 1).is_err());
        assert!(inst.query_f(1, 9).is_err());
        assert!(inst.query_g(9).is_err());
        assert_eq!(inst.counter_snapshot(), (0, 0));

        let mut flat = FlatInstance::generate(8, 2, 0).unwrap();
        assert!(flat.query_f(0).is_err());
        assert!(flat.query_g(9).is_err());
        assert_eq!(flat.counter_snapshot(), (0, 0));
    }

    #[test]
    fn snapshot_and_reset() {
        let mut inst = FlatInstance::generate(8, 3, 1).unwrap();
        assert_eq!(inst.counter_snapshot(), (0, 0));
        inst.query_f(1).unwrap();
        assert_eq!(inst.counter_snapshot(), (1, 0));
        inst.query_g(2).unwrap();
        assert_eq!(inst.counter_snapshot(), (1, 1));
        inst.reset_counters();
        assert_eq!(inst.counter_snapshot(), (0, 0));
    }

    #[test]
    fn invalid_dimensions_and_sizes_rejected() {
        assert!(matches!(
            StructuredInstance::generate(1, 1, 0),
            Err(Error::InvalidDimension { dim: 1 })
        ));
        assert!(matches!(
            StructuredInstance::generate(8, 0, 0),
            Err(Error::InvalidMarkedCount { m: 0, dim: 8 })
        ));
        assert!(matches!(
            StructuredInstance::generate(8, 9, 0),
            Err(Error::InvalidMarkedCount { m: 9, dim: 8 })
        ));
        assert!(matches!(
            FlatInstance::generate(4, 5, 0),
            Err(Error::InvalidMarkedCount { m: 5, dim: 4 })
        ));
    }

    #[test]
    fn from_parts_validates_invariants() {
        let ok = StructuredInstance::from_parts(8, 3, 2, 5, &[7, 2, 4], 99).unwrap();
        assert_eq!(ok.g_set(), &[2, 4, 7]);
        assert_eq!(ok.seed(), 99);

        // x0 missing from the hint set
        assert!(StructuredInstance::from_parts(8, 3, 1, 5, &[2, 4, 7], 0).is_err());
        // duplicate element
        assert!(StructuredInstance::from_parts(8, 3, 2, 5, &[2, 2, 7], 0).is_err());
        // wrong size
        assert!(StructuredInstance::from_parts(8, 3, 2, 5, &[2, 7], 0).is_err());
        // element out of range
        assert!(StructuredInstance::from_parts(8, 3, 2, 5, &[2, 7, 9], 0).is_err());
        // marked element out of range
        assert!(FlatInstance::from_parts(8, 2, 9, &[1, 9], 0).is_err());
    }

    #[test]
    fn audit_text_round_trips_the_facts() {
        let inst = StructuredInstance::from_parts(8, 3, 2, 5, &[2, 4, 7], 42).unwrap();
        assert_eq!(
            inst.audit_text(),
            "L=8\nM=3\nx0=2\ny0=5\ng_set=2,4,7\nseed=42\n"
        );
        let flat = FlatInstance::from_parts(8, 2, 3, &[3, 6], 42).unwrap();
        assert_eq!(flat.audit_text(), "N=8\nM=2\nz0=3\ng_set=3,6\nseed=42\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn generated_structured_instances_satisfy_invariants(
            seed in 0u64..u64::MAX,
            l in 2u32..128,
            m_frac in 0.0f64..1.0,
        ) {
            let m = 1 + ((m_frac * (l - 1) as f64) as u32).min(l - 1);
            let inst = StructuredInstance::generate(l, m, seed).unwrap();
            prop_assert_eq!(inst.g_set().len(), m as usize);
            prop_assert!(inst.g_set().contains(&inst.x0()));
            prop_assert!(inst.g_set().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(inst.g_set().iter().all(|&v| (1..=l).contains(&v)));
            prop_assert!((1..=l).contains(&inst.x0()));
            prop_assert!((1..=l).contains(&inst.y0()));
            prop_assert_eq!(inst.counter_snapshot(), (0, 0));
        }

        #[test]
        fn generated_flat_instances_satisfy_invariants(
            seed in 0u64..u64::MAX,
            n in 2u32..128,
            m_frac in 0.0f64..1.0,
        ) {
            let m = 1 + ((m_frac * (n - 1) as f64) as u32).min(n - 1);
            let inst = FlatInstance::generate(n, m, seed).unwrap();
            prop_assert_eq!(inst.g_set().len(), m as usize);
            prop_assert!(inst.g_set().contains(&inst.z0()));
            prop_assert!(inst.g_set().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn generation_is_frozen() {
        // Pinned outputs of the seeded generator: any change to the RNG
        // stream, the draw order, or the hint-set sampling shows up here
        // before it silently re-labels every seeded experiment.
        let s = StructuredInstance::generate(64, 8, 7).unwrap();
        assert_eq!((s.x0(), s.y0()), (9, 11));
        assert_eq!(s.g_set(), &[1, 7, 9, 12, 13, 20, 47, 49]);

        let f = FlatInstance::generate(256, 16, 3).unwrap();
        assert_eq!(f.z0(), 28);
        assert_eq!(
            f.g_set(),
            &[23, 27, 28, 63, 68, 84, 87, 89, 157, 160, 165, 180, 202, 206, 210, 235]
        );
    }
}
