//! Distributional oracles: Pólya urns, Beta/Dirichlet/beta-binomial laws, the
//! limiting anti-centrality representation, closed-form moments, and
//! Kolmogorov–Smirnov tests. They are independent of the tree simulator and
//! exist to check it.

mod dist;
mod ks;
mod moments;
mod urn;

pub use dist::{
    beta_binomial_pmf, beta_cdf, beta_sample, dirichlet3_sample, limit_anticentrality_sample,
    BetaParams, LimitSample,
};
pub use ks::{kolmogorov_survival, ks_one_sample, ks_two_sample, KsResult};
pub use moments::{
    dirichlet_sq_cov, dirichlet_sq_cov_bound, expected_edge_h, expected_h_diff,
    expected_h_diff_limit, fourth_moment_beta_diff, mori_tail_constant,
};
pub use urn::{polya_run, Replacement, UrnState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("k = {k} is outside the support 0..={n}")]
    OutOfSupport { k: u64, n: u64 },
    #[error("parameter out of domain: {0}")]
    Domain(String),
}
