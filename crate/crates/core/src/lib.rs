//! Sinusoidal partial tracking.
//!
//! Audio is decomposed into per-frame chirp atoms (frequency, chirp rate and
//! phase estimated at spectral peaks) and the atoms are connected into partial
//! trajectories. Two trackers are provided:
//!
//! * [`greedy`]: the generalized McAulay-Quatieri tuple search, which picks the
//!   cheapest remaining K-frame tuple until `L` tuples are found or a
//!   connection exceeds its threshold.
//! * [`lpsolve`]: the L-best node-disjoint paths through the whole lattice,
//!   posed as a sparse linear program and solved exactly through its
//!   min-cost-flow structure.
//!
//! The [`eval`] module runs the noisy three-chirp comparison between the two.

pub mod analysis;
pub mod error;
pub mod eval;
pub mod greedy;
pub mod lattice;
pub mod lpsolve;
mod par;
pub mod paths;
pub mod signal;
pub mod window;

pub use par::is_parallel;
pub use analysis::{ChirpAtom, Lattice, PeakPickConfig, StftConfig};
pub use error::{Error, Result};
pub use lattice::{CostFn, Distance, PairSet};
pub use paths::{PathSet, TrackMethod};
pub use signal::{ChirpSpec, SignalBuffer};
pub use window::CosineSumWindow;
