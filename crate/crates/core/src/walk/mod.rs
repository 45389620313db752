//! Event-driven simulation of the dynamical walk and its functionals.

mod engine;
mod field;
mod hits;
mod path;
mod quenched;

pub use engine::{
    checkpoint_sups, walk_pair, walk_sup, walk_sup_occupation, Increments, Walker, RESUM_INTERVAL,
};
pub use field::{
    block_increment, floor_index, neighboring, rescaled_field, Block, RescaledFieldSample,
};
pub use hits::HitCounter;
pub use path::{
    brute_force_path, occupation_time, path_sup, running_max, running_max_sup, simulate_path,
    RunningMax, WalkPath, BRUTE_FORCE_BUDGET,
};
pub use quenched::{
    conditional_law, conditional_moments_check, conditional_moments_from_pairs, evaluate,
    member_seed, quenched_resample, ConditionalFit, ConditionalLaw, ConditionalMomentsReport,
    Functional, FunctionalValue, QuenchedEnsemble, TailBin,
};
