//! Population container, uniform pair scheduler, run loop and metrics.
//!
//! Parallel time is the interaction count divided by `n`. Interaction
//! indices in traces are 1-based: the `k`-th interaction has index `k`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::protocol::{interact, size_estimate, AgentState, ProtocolParams};
use crate::rng::RandomSource;

/// When a run ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StopCondition {
    /// Run exactly the interaction budget.
    #[serde(rename = "interactions")]
    MaxInteractions,
    /// Stop at the first moment every agent reports `count = n`.
    #[serde(rename = "correct")]
    UntilAllCountCorrect,
    /// Stop once the configuration is output-stable.
    #[serde(rename = "stable")]
    UntilOutputStable,
}

impl StopCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            StopCondition::MaxInteractions => "interactions",
            StopCondition::UntilAllCountCorrect => "correct",
            StopCondition::UntilOutputStable => "stable",
        }
    }
}

impl fmt::Display for StopCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interactions" | "max-interactions" => Ok(StopCondition::MaxInteractions),
            "correct" | "all-count-correct" => Ok(StopCondition::UntilAllCountCorrect),
            "stable" | "output-stable" => Ok(StopCondition::UntilOutputStable),
            other => Err(Error::UnknownStop(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u64,
    pub seed: u64,
    pub params: ProtocolParams,
    pub stop: StopCondition,
    /// Interaction budget. Required for [`StopCondition::MaxInteractions`];
    /// a safety cap otherwise (`None` = unbounded).
    pub max_interactions: Option<u64>,
    /// Also keep the full `(receiver, sender)` log.
    pub record_trace: bool,
}

impl SimConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        Self {
            n,
            seed,
            params: ProtocolParams::default(),
            stop: StopCondition::UntilOutputStable,
            max_interactions: None,
            record_trace: false,
        }
    }

    pub fn with_params(mut self, params: ProtocolParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_stop(mut self, stop: StopCondition) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_max_interactions(mut self, cap: u64) -> Self {
        self.max_interactions = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::PopulationTooSmall(self.n));
        }
        if self.n > u32::MAX as u64 {
            return Err(Error::PopulationTooLarge(self.n));
        }
        self.params.validate()?;
        if self.stop == StopCondition::MaxInteractions && self.max_interactions.is_none() {
            return Err(Error::MissingInteractionBudget);
        }
        Ok(())
    }
}

fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    // plain JSON number when it fits, decimal string otherwise
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// One change of some agent's `count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountWriteRecord {
    pub interaction: u64,
    pub agent: u32,
    #[serde(serialize_with = "serialize_big")]
    pub old_count: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub new_count: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelTransition {
    pub interaction: u64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub n: u64,
    pub seed: u64,
    pub interactions: u64,
    pub parallel_time: f64,
    pub final_counts_correct: bool,
    /// First moment all counts equalled `n`.
    pub all_correct_parallel_time: Option<f64>,
    /// Last count write divided by `n`; only for runs that reached stability.
    pub convergence_parallel_time: Option<f64>,
    /// When the stability check first succeeded (checked at most once per `n` interactions).
    pub stabilization_parallel_time: Option<f64>,
    pub final_level: usize,
    pub max_code_len: usize,
    pub max_agent_bits: u64,
    pub leader_count_final: u64,
    /// Whether the requested stop condition was met (false = budget exhausted).
    pub stop_condition_met: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub count_writes: Vec<CountWriteRecord>,
    pub level_transitions: Vec<LevelTransition>,
    /// Full `(receiver, sender)` log when `record_trace` is set.
    pub interaction_log: Option<Vec<(u32, u32)>>,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub agents: Vec<AgentState>,
    pub interactions: u64,
}

impl Population {
    pub fn new(n: usize) -> Self {
        Self {
            agents: vec![AgentState::initial(); n],
            interactions: 0,
        }
    }

    pub fn from_agents(agents: Vec<AgentState>) -> Self {
        Self {
            agents,
            interactions: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn parallel_time(&self) -> Ratio<u64> {
        Ratio::new(self.interactions, self.agents.len() as u64)
    }

    pub fn level(&self) -> usize {
        self.agents.iter().map(AgentState::level).max().unwrap_or(0)
    }

    pub fn leader_count(&self) -> u64 {
        self.agents.iter().filter(|a| a.is_leader).count() as u64
    }

    /// Runs one interaction between the given agents.
    pub fn interact_pair(
        &mut self,
        receiver: usize,
        sender: usize,
        src: &mut RandomSource,
        params: &ProtocolParams,
    ) -> Option<crate::protocol::CountWrite> {
        let (rec, sen) = pair_mut(&mut self.agents, receiver, sender);
        self.interactions += 1;
        interact(rec, sen, src, params)
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b, "an agent cannot interact with itself");
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Uniform ordered pair of distinct agents `(receiver, sender)`.
#[inline]
pub fn schedule_next(src: &mut RandomSource, n: u32) -> (u32, u32) {
    src.ordered_pair(n)
}

fn bitlen(x: &BigUint) -> u64 {
    x.bits().max(1)
}

/// Memory footprint of one agent in bits: both codes, the three integers,
/// the leader flag and the phase. Zero-valued integers still occupy one bit.
pub fn agent_bits(a: &AgentState) -> u64 {
    a.code.len() as u64
        + a.leader_code.len() as u64
        + bitlen(&a.scale)
        + bitlen(&a.ave)
        + bitlen(&a.count)
        + 1
        + (32 - a.phase.leading_zeros()).max(1) as u64
}

/// Sufficient condition for output stability: unique equal-length codes, one
/// shared leader code, a single leader, every timer finished, averaging
/// settled on `{⌊M/n⌋, ⌈M/n⌉}` with both values rounding to `n`, and every
/// count already `n`. From such a configuration no interaction changes any count.
pub fn is_output_stable(pop: &Population, params: &ProtocolParams) -> bool {
    let n = pop.len();
    if n < 2 {
        return false;
    }
    let n_big = BigUint::from(n as u64);
    let first = &pop.agents[0];
    let code_len = first.code.len();
    let lc = &first.leader_code;
    if lc.is_empty() {
        return false;
    }
    let scale = &first.scale;
    let floor = scale / &n_big;
    let ceil = if (&floor * &n_big) == *scale {
        floor.clone()
    } else {
        &floor + 1u32
    };
    let settles = |v: &BigUint| v.is_zero() || size_estimate(scale, v).as_ref() == Some(&n_big);
    if !settles(&floor) || !settles(&ceil) {
        return false;
    }

    let mut leaders = 0usize;
    for a in &pop.agents {
        if a.code.len() != code_len
            || a.leader_code != *lc
            || a.phase != params.max_phase
            || a.count != n_big
            || (a.ave != floor && a.ave != ceil)
        {
            return false;
        }
        leaders += a.is_leader as usize;
    }
    if leaders != 1 {
        return false;
    }
    let mut seen = HashSet::with_capacity(n);
    pop.agents.iter().all(|a| seen.insert(&a.code))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ConvergenceError {
    #[error("run did not reach an output-stable configuration")]
    NotStabilized,
    #[error("trace contains no count writes")]
    NoCountWrites,
}

/// Parallel time of the last count write, `index / n`, for a trace that was
/// run to stability. This is the maximum over agents of the time each agent
/// last wrote its count.
pub fn convergence_time(trace: &RunTrace, n: u64) -> std::result::Result<Ratio<u64>, ConvergenceError> {
    if trace.summary.stabilization_parallel_time.is_none() {
        return Err(ConvergenceError::NotStabilized);
    }
    last_write_time(&trace.count_writes, n)
}

fn last_write_time(writes: &[CountWriteRecord], n: u64) -> std::result::Result<Ratio<u64>, ConvergenceError> {
    writes
        .last()
        .map(|w| Ratio::new(w.interaction, n))
        .ok_or(ConvergenceError::NoCountWrites)
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// A running simulation with the incremental bookkeeping used for stop
/// conditions. [`run`] drives one of these to completion.
pub struct Simulation {
    pub pop: Population,
    pub src: RandomSource,
    pub params: ProtocolParams,
    n_big: BigUint,
    correct: u64,
    at_max_phase: u64,
    leaders: u64,
    level: usize,
    pub count_writes: Vec<CountWriteRecord>,
    pub level_transitions: Vec<LevelTransition>,
    pub interaction_log: Option<Vec<(u32, u32)>>,
    first_all_correct: Option<u64>,
}

impl Simulation {
    pub fn new(n: u32, seed: u64, params: ProtocolParams, record_trace: bool) -> Self {
        let pop = Population::new(n as usize);
        let at_max_phase = if params.max_phase == 1 { n as u64 } else { 0 };
        Self {
            pop,
            src: RandomSource::new(seed),
            params,
            n_big: BigUint::from(n),
            correct: 0,
            at_max_phase,
            leaders: n as u64,
            level: 0,
            count_writes: Vec::new(),
            level_transitions: Vec::new(),
            interaction_log: record_trace.then(Vec::new),
            first_all_correct: None,
        }
    }

    pub fn n(&self) -> u32 {
        self.pop.len() as u32
    }

    pub fn all_counts_correct(&self) -> bool {
        self.correct == self.pop.len() as u64
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn leaders(&self) -> u64 {
        self.leaders
    }

    /// Cheap necessary condition for [`is_output_stable`].
    fn maybe_stable(&self) -> bool {
        let n = self.pop.len() as u64;
        self.correct == n && self.at_max_phase == n && self.leaders == 1
    }

    pub fn step(&mut self) {
        let n = self.n();
        let (r, s) = schedule_next(&mut self.src, n);
        let (ri, si) = (r as usize, s as usize);
        if let Some(log) = self.interaction_log.as_mut() {
            log.push((r, s));
        }
        let (was_leader, old_phase) = {
            let rec = &self.pop.agents[ri];
            (rec.is_leader, rec.phase)
        };
        let write = self.pop.interact_pair(ri, si, &mut self.src, &self.params);
        let rec = &self.pop.agents[ri];
        let idx = self.pop.interactions;

        if was_leader && !rec.is_leader {
            self.leaders -= 1;
        }
        if old_phase != rec.phase {
            let max = self.params.max_phase;
            match (old_phase == max, rec.phase == max) {
                (false, true) => self.at_max_phase += 1,
                (true, false) => self.at_max_phase -= 1,
                _ => {}
            }
        }
        if rec.code.len() > self.level {
            self.level = rec.code.len();
            self.level_transitions.push(LevelTransition {
                interaction: idx,
                level: self.level,
            });
        }
        if let Some(w) = write {
            if w.old == self.n_big {
                self.correct -= 1;
            }
            if w.new == self.n_big {
                self.correct += 1;
                if self.all_counts_correct() && self.first_all_correct.is_none() {
                    self.first_all_correct = Some(idx);
                }
            }
            self.count_writes.push(CountWriteRecord {
                interaction: idx,
                agent: r,
                old_count: w.old,
                new_count: w.new,
            });
        }
    }

    /// Steps until `stop` holds or the budget runs out. Returns whether the
    /// condition was met and, for stability runs, the interaction at which
    /// stability was detected.
    pub fn run_until(&mut self, stop: StopCondition, budget: Option<u64>) -> (bool, Option<u64>) {
        let n = self.pop.len() as u64;
        let budget = budget.unwrap_or(u64::MAX);
        let mut next_check = 0u64;
        loop {
            match stop {
                StopCondition::MaxInteractions => {
                    if self.pop.interactions >= budget {
                        return (true, None);
                    }
                }
                StopCondition::UntilAllCountCorrect => {
                    if self.all_counts_correct() {
                        return (true, None);
                    }
                }
                StopCondition::UntilOutputStable => {
                    if self.maybe_stable() && self.pop.interactions >= next_check {
                        if is_output_stable(&self.pop, &self.params) {
                            return (true, Some(self.pop.interactions));
                        }
                        next_check = self.pop.interactions + n;
                    }
                }
            }
            if self.pop.interactions >= budget {
                return (false, None);
            }
            self.step();
        }
    }

    /// Summary of the current state; `met`/`stable_at` are what [`Self::run_until`] returned.
    pub fn summarize(&self, seed: u64, met: bool, stable_at: Option<u64>) -> RunSummary {
        let n = self.pop.len() as u64;
        let to_time = |i: u64| ratio_f64(Ratio::new(i, n));
        let convergence = stable_at
            .and_then(|_| last_write_time(&self.count_writes, n).ok())
            .map(ratio_f64);
        RunSummary {
            n,
            seed,
            interactions: self.pop.interactions,
            parallel_time: to_time(self.pop.interactions),
            final_counts_correct: self.all_counts_correct(),
            all_correct_parallel_time: self.first_all_correct.map(to_time),
            convergence_parallel_time: convergence,
            stabilization_parallel_time: stable_at.map(to_time),
            final_level: self.level,
            // |C| never shrinks, so the longest code ever held is the final level
            max_code_len: self.pop.agents.iter().map(|a| a.code.len()).max().unwrap_or(0),
            max_agent_bits: self.pop.agents.iter().map(agent_bits).max().unwrap_or(0),
            leader_count_final: self.leaders,
            stop_condition_met: met,
        }
    }
}

/// Runs a full simulation. Deterministic in `config`.
pub fn run(config: &SimConfig) -> Result<RunTrace> {
    config.validate()?;
    let mut sim = Simulation::new(config.n as u32, config.seed, config.params, config.record_trace);
    let (met, stable_at) = sim.run_until(config.stop, config.max_interactions);
    let summary = sim.summarize(config.seed, met, stable_at);
    Ok(RunTrace {
        count_writes: sim.count_writes,
        level_transitions: sim.level_transitions,
        interaction_log: sim.interaction_log,
        summary,
    })
}
