//! Correlated randomly growing trees.
//!
//! Two trees grown by uniform (UA) or preferential (PA) attachment share their
//! history up to time `t_star` and then evolve independently. This crate
//! simulates such pairs, computes tree statistics that detect the shared
//! history, and estimates `t_star` from a single snapshot.
//!
//! - [`tree`]: seeds, growth rules, correlated pairs and the text file format.
//! - [`stats`]: maximum degree, `H`, anti-centrality, centroids, ranked subtrees.
//! - [`detect`]: calibrated hypothesis tests and power estimation.
//! - [`estimate`]: the coarse and fine estimators of `t_star`.
//! - [`oracle`]: urn, Beta and moment oracles used to check all of the above.

pub mod detect;
pub mod estimate;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod tree;

pub use rng::RngSpec;
pub use tree::{
    grow, grow_correlated, grow_with, make_seed, CorrelatedPair, GrowingTree, GrowthRule,
    SeedSpec, SeedTree, TreeError,
};
