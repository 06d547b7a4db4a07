//! Dynamic distance potential fields for pedestrian route choice.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the pure algorithmic
//! parts: grid geometry, Manhattan/Chebyshev wavefront fills and their
//! combination into an approximately Euclidean floor field, the dynamic
//! potential that measures how much a crowd lengthens the way to the exit,
//! a cellular-automaton agent model coupled to it, a deterministic run
//! engine, and the small statistics used by parameter sweeps.
//!
//! File formats, sweeps across threads and the command line live in the
//! `ddpf` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod correlation;
pub mod engine;
mod error;
pub mod grid;
pub mod model;
pub mod potential;
mod queue;
pub mod scenario;
pub mod sight;
pub mod stats;

pub use engine::{AgentRecord, DynamicField, Geometry, RunConfig, RunMetrics, Simulation};
pub use error::Error;
pub use grid::{CellKind, Grid, Occupancy, Pos};
pub use model::{Agent, CouplingParams, SpeedDistribution};
pub use potential::{CostModel, FieldPair, Neighborhood, PotentialField};

pub type Result<T, E = Error> = core::result::Result<T, E>;
