//! Structural checks on chain ground spaces: monotonicity under partial trace,
//! correlation decay, region exclusion and the Nachtergaele overlap.

mod correlation;
mod exclusion;
mod gauge;
mod monotonicity;

pub use correlation::{
    correlation_table, decay_fit, dense_trace_expectation, ground_expectation, ket_bra, sigma_max, tau_pair,
    tau_single, theta, xi, CorrelationTable, DecayFit, Observable, PairEntry,
};
pub use exclusion::{nachtergaele_overlap, region_exclusion, ExclusionLemma};
pub use gauge::{gauge, Gauge};
pub use monotonicity::{
    monotonicity_check, monotonicity_prefixes, random_subspace_guard, MonotonicityReport, RnBranch, SubspaceGuard,
    CONDITION_CAP, MONOTONICITY_MAX_N,
};
