//! Descent procedures for `min_X f(X) - g(X)` with `f`, `g` submodular.
//!
//! All three start at `∅` and replace one or both of `f`, `g` by a modular
//! bound that is tight at the current iterate:
//!
//! - [`sub_sup`]: `g` by a lower bound `h`; the surrogate `f - h` is minimized exactly.
//! - [`sup_sub`]: `f` by an upper bound `m`; `g - m` is maximized approximately.
//! - [`mod_mod`]: both; the surrogate `m - h` is modular and minimized exactly,
//!   under any [`Constraint`].
//!
//! A candidate is taken only if it strictly lowers `v` and passes
//! [`accept_step`]. When the primary step stalls, a sweep over chains with each
//! element at the boundary of the iterate (and both upper bounds) is tried
//! before declaring convergence, so unconstrained runs stop at local minima.

mod constraint;
mod permutation;
mod solvers;
mod trace;

use serde::{Deserialize, Serialize};

pub use constraint::{
    modular_minimize_constrained, Constraint, ConstraintSpec, KNAPSACK_BUDGET_LIMIT,
};
pub use permutation::{boundary_permutation, choose_permutation, PermutationHeuristic};
pub use solvers::{mod_mod, solve, sub_sup, sup_sub, SolveFailure};
pub use trace::{Iterate, OptimizationTrace, Termination, TraceRecord};

use crate::brute::TOL;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::sfm::SfmSolver;
use crate::sfmax::MaxSolver;
use crate::subset::Subset;

/// A pair of normalized submodular oracles over one ground set.
#[derive(Debug, Clone)]
pub struct DsInstance {
    pub f: Oracle,
    pub g: Oracle,
}

impl DsInstance {
    /// Normalizes both parts so that `f(∅) = g(∅) = 0`.
    pub fn new(f: Oracle, g: Oracle) -> Result<Self> {
        if f.n() != g.n() {
            return Err(Error::Domain(format!(
                "f has n = {} but g has n = {}",
                f.n(),
                g.n()
            )));
        }
        Ok(Self {
            f: f.normalized(),
            g: g.normalized(),
        })
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn value(&self, s: &Subset) -> f64 {
        self.f.eval(s) - self.g.eval(s)
    }

    /// `v = f - g` as an oracle evaluating through both parts.
    pub fn v(&self) -> Oracle {
        self.f.minus(&self.g)
    }

    pub fn calls(&self) -> u64 {
        self.f.calls() + self.g.calls()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBoundStrategy {
    /// Try both upper bounds each iteration and keep the better candidate.
    #[default]
    BestOfBoth,
    /// Switch upper bound every iteration.
    Alternate,
}

impl std::str::FromStr for UpperBoundStrategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "best_of_both" | "best-of-both" | "both" => Ok(Self::BestOfBoth),
            "alternate" => Ok(Self::Alternate),
            _ => Err(format!(
                "unknown upper-bound strategy {s:?} (best_of_both, alternate)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    SubSup,
    SupSub,
    ModMod,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::SubSup, Algorithm::SupSub, Algorithm::ModMod];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::SubSup => "subsup",
            Algorithm::SupSub => "supsub",
            Algorithm::ModMod => "modmod",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "subsup" => Ok(Self::SubSup),
            "supsub" => Ok(Self::SupSub),
            "modmod" => Ok(Self::ModMod),
            _ => Err(format!("unknown algorithm {s:?} (subsup, supsub, modmod)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Multiplicative step tolerance; 0 takes every strict decrease.
    pub epsilon: f64,
    pub max_iters: usize,
    pub heuristic: PermutationHeuristic,
    pub ub_strategy: UpperBoundStrategy,
    pub seed: u64,
    pub sfm: SfmSolver,
    pub maximizer: MaxSolver,
    /// Record wall-clock time per iterate. Off keeps traces reproducible byte for byte.
    pub record_time: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            max_iters: 1000,
            heuristic: PermutationHeuristic::default(),
            ub_strategy: UpperBoundStrategy::default(),
            seed: 0,
            sfm: SfmSolver::default(),
            maximizer: MaxSolver::default(),
            record_time: false,
        }
    }
}

/// Step rule with tolerance `epsilon ≥ 0`.
///
/// From a negative value the next must reach `v_prev (1 + ε)`; from zero it
/// must be negative; from a positive value (possible under constraints) it
/// must drop by at least `ε |v_prev|`.
pub fn accept_step(v_prev: f64, v_next: f64, epsilon: f64) -> bool {
    if v_prev < 0.0 {
        v_next <= v_prev * (1.0 + epsilon)
    } else if v_prev == 0.0 {
        v_next < 0.0
    } else {
        v_next <= v_prev - epsilon * v_prev.abs()
    }
}

/// True when no single addition or deletion lowers `v` by more than `1e-9`.
pub fn local_optimality_check(v: &Oracle, x: &Subset) -> bool {
    let vx = v.eval(x);
    (0..v.n()).all(|j| {
        let neighbor = if x.contains(j) {
            x.without(j)
        } else {
            x.with(j)
        };
        vx <= v.eval(&neighbor) + TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::AffineModular;

    #[test]
    fn accept_step_examples() {
        assert!(accept_step(-1.0, -1.05, 0.01));
        assert!(!accept_step(-1.0, -1.005, 0.01));
        assert!(accept_step(0.0, -0.2, 0.5));
        assert!(!accept_step(0.0, 0.0, 0.0));
        assert!(accept_step(-1.0, -1.0, 0.0));
        assert!(accept_step(2.0, 1.0, 0.5));
        assert!(!accept_step(2.0, 1.5, 0.5));
    }

    #[test]
    fn local_optimality_examples() {
        let v = AffineModular::linear(vec![-1.0, 2.0, -0.5]).into_oracle();
        assert!(local_optimality_check(
            &v,
            &Subset::from_indices(3, [0, 2]).unwrap()
        ));
        assert!(!local_optimality_check(&v, &Subset::empty(3)));
    }

    #[test]
    fn instance_normalizes() {
        let f = Oracle::from_fn(2, |s| 3.0 + s.len() as f64);
        let g = Oracle::from_fn(2, |_| 1.0);
        let inst = DsInstance::new(f, g).unwrap();
        assert_eq!(inst.value(&Subset::empty(2)), 0.0);
        assert_eq!(inst.value(&Subset::full(2)), 2.0);
        assert!(DsInstance::new(Oracle::from_fn(2, |_| 0.0), Oracle::from_fn(3, |_| 0.0)).is_err());
    }
}
