//! Dense statevector simulation of a nested amplitude-amplification search
//! on a structured domain, plus the flat counterpart it is measured against.
//!
//! The structured problem: an L×L grid holds exactly one marked cell
//! (x₀, y₀), and a hint predicate G marks M rows, one of which is x₀'s row.
//! The quantum search amplifies the hinted rows on the first register while
//! nested inner loops amplify the marked cell's column on the second, finding
//! the cell in O(√(M·L)) oracle calls where the classical row-by-row scan
//! needs O(M·L).
//!
//! The flat problem drops the grid structure: one marked point in a size-N
//! domain, with a hint predicate whose support has size M but no product
//! structure. There the hint buys nothing — the search still costs O(√N).
//!
//! Everything is simulated exactly (complex `f64` amplitudes, no shot
//! noise unless sampling is requested), and every oracle application over a
//! superposition is counted as one call, so query-count claims can be checked
//! against closed forms.
//!
//! Module map:
//! - [`statevector`]: two-register and single-register dense states.
//! - [`instances`]: seeded problem instances with query-counting oracles.
//! - [`amplification`]: phase oracles, partial diffusions, and iteration
//!   schedules.
//! - [`structured_search`]: the nested search on the grid.
//! - [`flat_search`]: the unstructured search and the hint predicates that
//!   show the no-speedup result.
//! - [`harness`]: classical baseline, sweeps, CSV, and scaling fits.

pub mod amplification;
pub mod error;
pub mod flat_search;
pub mod harness;
pub mod instances;
pub mod statevector;
pub mod structured_search;

pub use amplification::{IterationSchedule, RegisterSelector, ScheduleMode};
pub use error::{Error, Result};
pub use flat_search::{FlatSchedule, HintPredicate};
pub use instances::{FlatInstance, StructuredInstance};
pub use statevector::{ComplexAmplitude, SingleRegisterState, TwoRegisterState};
pub use structured_search::{SearchPath, SearchResult};
