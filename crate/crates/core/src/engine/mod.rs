//! Monte Carlo simulation of the monomial RDS with Bernoulli noise.

mod chain;
mod noise;
mod orbit;
mod pullback;

pub use chain::{empirical_transition_matrix, empirical_transition_matrix_with, EmpiricalChain, EntryCheck};
pub use noise::{NoiseProcess, Stream};
pub use orbit::{
    recurrence_counters, run_trials, simulate_orbit, CocycleProduct, OrbitStep, OrbitTrace, Simulator, TrialSummary,
};
pub use pullback::{pullback_closed_form, pullback_distance, pullback_distance_with, PullbackDistance};

/// Default burn-in before empirical statistics: `10·(p−1)` steps.
pub fn default_burn_in(p: u64) -> u64 {
    10 * (p - 1)
}
