//! Fixtures shared by the benchmarks.

use exactcount_core::{ProtocolParams, Simulation};

/// A simulation advanced by `warmup` parallel time units, so benchmarks
/// measure steady-state interactions rather than the first few levels.
pub fn warmed_simulation(n: u32, seed: u64, warmup: u64) -> Simulation {
    let mut sim = Simulation::new(n, seed, ProtocolParams::default(), false);
    for _ in 0..warmup * n as u64 {
        sim.step();
    }
    sim
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warmup_advances_interactions() {
        let sim = warmed_simulation(10, 1, 3);
        assert_eq!(sim.pop.interactions, 30);
    }
}
