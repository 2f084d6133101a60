//! The exact-counting agent state machine.
//!
//! Every interaction runs, in order: unique-ID growth, leader election, and,
//! only when receiver and sender now carry the same leader code, averaging
//! followed by the restartable timer. All transitions mutate the two states
//! in place; randomness comes from an injected [`RandomBits`] source.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::RandomBits;

/// Timer length used by the analysis (32 · 37).
pub const DEFAULT_MAX_PHASE: u32 = 1184;

/// How many bits to append when two agents with identical codes meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelSchedule {
    /// Level ℓ → 2ℓ.
    #[default]
    Double,
    /// Level ℓ → ℓ + 1.
    Increment,
    /// Level ℓ → ℓ².
    Square,
}

impl LevelSchedule {
    /// Number of bits to append to a code of length `level` on a collision.
    pub fn grow(self, level: usize) -> usize {
        match self {
            LevelSchedule::Double => level.max(1),
            LevelSchedule::Increment => 1,
            LevelSchedule::Square => (level * level).saturating_sub(level).max(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LevelSchedule::Double => "double",
            LevelSchedule::Increment => "increment",
            LevelSchedule::Square => "square",
        }
    }
}

impl fmt::Display for LevelSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LevelSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(LevelSchedule::Double),
            "increment" => Ok(LevelSchedule::Increment),
            "square" => Ok(LevelSchedule::Square),
            other => Err(Error::UnknownSchedule(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub max_phase: u32,
    pub schedule: LevelSchedule,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            max_phase: DEFAULT_MAX_PHASE,
            schedule: LevelSchedule::Double,
        }
    }
}

impl ProtocolParams {
    pub fn new(max_phase: u32, schedule: LevelSchedule) -> Result<Self> {
        let p = Self { max_phase, schedule };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_phase == 0 {
            return Err(Error::ZeroMaxPhase);
        }
        Ok(())
    }
}

/// One agent's full record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentState {
    /// Agent's code; grown until unique.
    pub code: BitString,
    /// Leader code, always of even length.
    pub leader_code: BitString,
    pub is_leader: bool,
    /// Scale constant M; a pure function of `leader_code` once one is installed.
    pub scale: BigUint,
    /// Averaging tokens.
    pub ave: BigUint,
    /// Reported population size.
    pub count: BigUint,
    /// Timer phase in `[1, max_phase]`.
    pub phase: u32,
}

impl Default for AgentState {
    fn default() -> Self {
        Self::initial()
    }
}

impl AgentState {
    /// `C = LC = ε`, leader, `M = ave = count = phase = 1`.
    pub fn initial() -> Self {
        Self {
            code: BitString::new(),
            leader_code: BitString::new(),
            is_leader: true,
            scale: BigUint::one(),
            ave: BigUint::one(),
            count: BigUint::one(),
            phase: 1,
        }
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.code.len()
    }
}

/// `3 · 2^(3·level)`: the scale constant attached to a leader code of length `2·level`.
pub fn scale_for_leader_code_len(lc_len: usize) -> BigUint {
    BigUint::from(3u32) << (3 * (lc_len / 2))
}

/// A change of an agent's `count` field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountWrite {
    pub old: BigUint,
    pub new: BigUint,
}

/// Installs a new leader code and restarts averaging and the timer.
pub fn set_new_leader_code(rec: &mut AgentState, new_lc: BitString) {
    assert!(
        new_lc.len() >= 2 && new_lc.len() % 2 == 0,
        "leader codes have even length >= 2, got {}",
        new_lc.len()
    );
    rec.scale = scale_for_leader_code_len(new_lc.len());
    rec.leader_code = new_lc;
    rec.phase = 1;
    rec.ave = if rec.is_leader {
        rec.scale.clone()
    } else {
        BigUint::zero()
    };
}

/// Appends `num_bits` to the receiver's code. A leader draws twice as many
/// bits into its leader code and copies the next `num_bits` of it into `C`,
/// keeping `C` a prefix of `LC`.
pub fn extend_code<R: RandomBits + ?Sized>(rec: &mut AgentState, num_bits: usize, src: &mut R) {
    assert!(num_bits >= 1, "extend_code needs num_bits >= 1");
    if rec.is_leader {
        let start = rec.code.len();
        let new_lc = rec.leader_code.append(&src.rand_bits(2 * num_bits));
        let tail = new_lc.slice(start, start + num_bits);
        set_new_leader_code(rec, new_lc);
        rec.code.extend_from(&tail);
    } else {
        let tail = src.rand_bits(num_bits);
        rec.code.extend_from(&tail);
    }
}

/// Catch up to the sender's code length, then grow further if the codes collide.
pub fn unique_id_step<R: RandomBits + ?Sized>(
    rec: &mut AgentState,
    sen_code: &BitString,
    src: &mut R,
    schedule: LevelSchedule,
) {
    if rec.code.len() < sen_code.len() {
        extend_code(rec, sen_code.len() - rec.code.len(), src);
    }
    if rec.code == *sen_code {
        let grow = schedule.grow(rec.code.len());
        extend_code(rec, grow, src);
    }
}

/// Drop out on seeing a lexicographically greater leader code; followers
/// also adopt any longer leader code.
pub fn elect_leader_step(rec: &mut AgentState, sen_lc: &BitString) {
    if rec.leader_code.lex_precedes(sen_lc) {
        rec.is_leader = false;
        set_new_leader_code(rec, sen_lc.clone());
    }
    if !rec.is_leader && rec.leader_code.len() < sen_lc.len() {
        set_new_leader_code(rec, sen_lc.clone());
    }
}

/// `(⌈(a+b)/2⌉, ⌊(a+b)/2⌋)`.
pub fn averaging_step(rec_ave: &BigUint, sen_ave: &BigUint) -> (BigUint, BigUint) {
    let sum = rec_ave + sen_ave;
    let floor = &sum >> 1u32;
    let ceil = (sum + 1u32) >> 1u32;
    (ceil, floor)
}

/// In-place form of [`averaging_step`]; the receiver takes the ceiling.
pub fn average_in_place(rec_ave: &mut BigUint, sen_ave: &mut BigUint) {
    if rec_ave == sen_ave {
        return;
    }
    let mut sum = std::mem::take(rec_ave);
    sum += &*sen_ave;
    *sen_ave = &sum >> 1u32;
    sum += 1u32;
    sum >>= 1u32;
    *rec_ave = sum;
}

/// `⌊M/ave + 1/2⌋`, or `None` when `ave = 0`.
pub fn size_estimate(scale: &BigUint, ave: &BigUint) -> Option<BigUint> {
    if ave.is_zero() {
        return None;
    }
    // ⌊(2M + ave) / (2·ave)⌋ = q + [2r ≥ ave] with M = q·ave + r
    let (q, r) = scale.div_rem(ave);
    if (r << 1u32) >= *ave {
        Some(q + 1u32)
    } else {
        Some(q)
    }
}

/// Phase-clock update followed by the guarded write of `count`.
pub fn timer_step(rec: &mut AgentState, sen_phase: u32, params: &ProtocolParams) -> Option<CountWrite> {
    if rec.is_leader {
        if rec.phase == sen_phase && rec.phase < params.max_phase {
            rec.phase += 1;
        }
    } else if rec.phase < sen_phase {
        rec.phase = sen_phase;
    }
    if rec.phase != params.max_phase {
        return None;
    }
    let new_count = size_estimate(&rec.scale, &rec.ave)?;
    if rec.count == new_count {
        return None;
    }
    let cube = &new_count * &new_count * &new_count * 3u32;
    if rec.scale < cube {
        return None;
    }
    let old = std::mem::replace(&mut rec.count, new_count.clone());
    Some(CountWrite { old, new: new_count })
}

/// One full interaction. Returns the receiver's count write, if any.
pub fn interact<R: RandomBits + ?Sized>(
    rec: &mut AgentState,
    sen: &mut AgentState,
    src: &mut R,
    params: &ProtocolParams,
) -> Option<CountWrite> {
    unique_id_step(rec, &sen.code, src, params.schedule);
    elect_leader_step(rec, &sen.leader_code);
    if rec.leader_code == sen.leader_code {
        average_in_place(&mut rec.ave, &mut sen.ave);
        timer_step(rec, sen.phase, params)
    } else {
        None
    }
}
