//! The protocol's building blocks run in isolation, each paired with an
//! exact or analytic reference so its behaviour can be checked on its own.

pub mod averaging;
pub mod birthday;
pub mod epidemic;
pub mod phase_clock;
pub mod rounding;

pub use averaging::{averaging_isolated_run, potential_phi, AveragingRun};
pub use birthday::{birthday_collision_exact, birthday_collision_monte_carlo, birthday_no_collision_bound};
pub use epidemic::{epidemic_expected_interactions_exact, epidemic_run};
pub use phase_clock::{phase_clock_run, PhaseClock, PhaseClockParams};
pub use rounding::{rounding_check, rounding_counterexample};
