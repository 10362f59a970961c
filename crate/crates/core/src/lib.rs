//! First-passage percolation on finite boxes of `Z^d`: exact geodesic and
//! directed passage times, shifted environments, detour patterns and the
//! Monte Carlo harness built on top of them.

pub mod chain;
pub mod directed;
pub mod distribution;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod geodesic;
pub mod lattice;
pub mod pattern;
mod queue;
pub mod report;
pub mod rng;
pub mod stats;
pub mod weight;

pub use chain::{verify_inequality_chain, ChainReport};
pub use directed::{directed_time, directed_time_enumerate, directed_time_value, DirectedResult};
pub use distribution::{check_useful, AtomValue, CriticalConstants, DistributionSpec, UsefulFlags};
pub use environment::Environment;
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentParams, ExperimentRun, TrialOutcome};
pub use geodesic::{geodesic_time, geodesic_time_all_minhops, GeodesicResult, QueueKind};
pub use lattice::{BoxLattice, Edge, LatticePath, Point};
pub use pattern::{Pattern, PatternEvent};
pub use weight::{Ticks, Weight};
