//! Leader-driven phase clock in isolation.
//!
//! One leader and `n − 1` followers start in phase 0. The leader advances
//! when, as receiver, it meets an agent in its own phase; followers jump to
//! any larger phase they see. A run ends when the leader reaches phase `p`,
//! i.e. after exactly `p` leader increments. (Inside the full protocol the
//! timer starts at phase 1, so a `max_phase` of `p` means `p − 1` increments.)

use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseClockParams {
    pub beta_l: f64,
    pub epsilon_l: f64,
    pub epsilon_u: f64,
}

impl Default for PhaseClockParams {
    fn default() -> Self {
        Self {
            beta_l: 37.0,
            epsilon_l: 1.0,
            epsilon_u: 1.0,
        }
    }
}

impl PhaseClockParams {
    /// Number of phases `p = max(8 ε_l, 32 β_l)`, rounded up.
    pub fn phases(&self) -> u32 {
        (8.0 * self.epsilon_l).max(32.0 * self.beta_l).ceil() as u32
    }

    /// Upper time constant `β_u = 4p(ε_u + 2)`.
    pub fn beta_u(&self) -> f64 {
        4.0 * self.phases() as f64 * (self.epsilon_u + 2.0)
    }
}

/// Phase clock state; agent 0 is the leader.
#[derive(Debug, Clone)]
pub struct PhaseClock {
    phases: Vec<u32>,
    target: u32,
    interactions: u64,
}

impl PhaseClock {
    pub fn new(n: u32, target: u32) -> Self {
        assert!(n >= 2, "phase clock needs n >= 2");
        Self {
            phases: vec![0; n as usize],
            target,
            interactions: 0,
        }
    }

    pub fn leader_phase(&self) -> u32 {
        self.phases[0]
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    pub fn interactions(&self) -> u64 {
        self.interactions
    }

    pub fn done(&self) -> bool {
        self.phases[0] >= self.target
    }

    #[inline]
    pub fn step(&mut self, src: &mut RandomSource) {
        let (r, s) = src.ordered_pair(self.phases.len() as u32);
        let (r, s) = (r as usize, s as usize);
        let sen = self.phases[s];
        let rec = &mut self.phases[r];
        if r == 0 {
            if *rec == sen && *rec < self.target {
                *rec += 1;
            }
        } else if *rec < sen {
            *rec = sen;
        }
        self.interactions += 1;
    }
}

/// Interactions until the leader reaches phase `params.phases()`.
pub fn phase_clock_run(n: u32, params: &PhaseClockParams, src: &mut RandomSource) -> u64 {
    let mut clock = PhaseClock::new(n, params.phases());
    while !clock.done() {
        clock.step(src);
    }
    clock.interactions()
}
