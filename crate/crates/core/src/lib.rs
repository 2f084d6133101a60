//! Deterministic simulator for the leaderless exact population-size counting
//! protocol.
//!
//! - [`bits`]: packed binary codes with prefix-lexicographic comparison.
//! - [`rng`]: seeded bit/pair streams and per-trial seed derivation.
//! - [`protocol`]: the per-interaction state machine.
//! - [`engine`]: populations, the uniform scheduler, run loop and metrics.
//! - [`primitives`]: the building blocks run in isolation, with exact oracles.

pub mod bits;
pub mod engine;
pub mod error;
pub mod primitives;
pub mod protocol;
pub mod rng;
pub mod stats;

pub use bits::BitString;
pub use engine::{
    agent_bits, convergence_time, is_output_stable, run, schedule_next, ConvergenceError, CountWriteRecord,
    LevelTransition, Population, RunSummary, RunTrace, SimConfig, Simulation, StopCondition,
};
pub use error::{Error, Result};
pub use protocol::{AgentState, LevelSchedule, ProtocolParams, DEFAULT_MAX_PHASE};
pub use rng::{derive_seed, RandomBits, RandomSource, ScriptedBits};
