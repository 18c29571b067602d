//! Feature selection by maximizing `Î(X_A; C) - cost(A)`.
//!
//! Mutual information is a difference of entropies,
//! `Î(X_A; C) = Ĥ(X_A) - Ĥ(X_A | C)`, so the objective is a DS function and
//! the descent solvers apply. Entropies are plug-in estimates in bits.

mod cost;
mod data;
mod entropy;
mod nb;
mod objective;
mod synthetic;

pub use cost::{evaluate_cost, BlocksSpec, CostModel};
pub use data::{parse_dense, parse_sparse, parse_sparse_dataset, DataFormat, Dataset};
pub use entropy::{conditional_entropy, empirical_entropy, mutual_information, MiMode};
pub use nb::{naive_bayes_cv, stratified_folds};
pub use objective::{
    build_objective, greedy_select, select, FeatSelObjective, GreedyMode, GreedySelection, Method,
};
pub use synthetic::{duplicated_feature_dataset, informative_with_noise};
