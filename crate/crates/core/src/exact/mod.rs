//! Exact steady-state statistics for any detailed-balance kernel:
//! normalization tables, conditional configuration probabilities, moments,
//! separation/formation rates, the cluster-count distribution (stationary
//! and transient) and the colocalization probability ⟨P₂⟩.

mod chain;
mod nucleation;
pub mod reference;
mod stats;
mod table;

pub use chain::{
    default_transient_dt, rate_schedule, steady_state_pi, transient_pi,
    ClusterCountDistribution, RateSchedule,
};
pub use nucleation::{nucleation_limit, NucleationLimit};
pub use stats::{
    config_probability, marginal_moments, mean_count_given_k, moments_given_k, p2_exact,
    p2_of_config, size_squared_mean_sum, MomentReport,
};
pub use table::{compute_cnk, CnkMethod, CnkTable};
