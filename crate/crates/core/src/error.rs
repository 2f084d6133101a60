use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid bit character {0:?}, expected '0' or '1'")]
    InvalidBit(char),

    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(u64),

    #[error("population size {0} exceeds the supported maximum of 2^32 - 1")]
    PopulationTooLarge(u64),

    #[error("max_phase must be at least 1")]
    ZeroMaxPhase,

    #[error("stop condition `interactions` requires an interaction budget")]
    MissingInteractionBudget,

    #[error("unknown level schedule {0:?} (expected double, increment or square)")]
    UnknownSchedule(String),

    #[error("unknown stop condition {0:?} (expected correct, stable or interactions)")]
    UnknownStop(String),

    #[error("arithmetic overflow: n * M must fit in 128 bits (n = {n}, M = {m})")]
    AveragingOverflow { n: u64, m: u128 },

    #[error("M must be at least 1")]
    ZeroScale,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
