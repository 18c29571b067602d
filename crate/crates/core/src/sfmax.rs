//! Approximate submodular maximization: double greedy, cardinality greedy and
//! single-swap local search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::brute::brute_force_maximize;
use crate::error::Result;
use crate::oracle::Oracle;
use crate::subset::Subset;

/// Minimum improvement local search treats as strict.
const STRICT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyMode {
    Deterministic,
    Randomized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerResult {
    pub set: Subset,
    pub value: f64,
    pub method: &'static str,
    pub seed: Option<u64>,
}

/// Double greedy over elements in index order.
///
/// Keeps `A ⊆ B`, starting from `A = ∅`, `B = V`. For each element the add
/// gain `a = f(A+j) - f(A)` and the remove gain `b = f(B-j) - f(B)` decide
/// whether `j` joins `A` or leaves `B`. Deterministic mode adds when `a >= b`;
/// randomized mode adds with probability `a⁺ / (a⁺ + b⁺)` and adds when both
/// are zero. Exactly `4n` evaluations.
pub fn double_greedy(f: &Oracle, mode: GreedyMode, seed: u64) -> MaximizerResult {
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Subset::empty(n);
    let mut b = Subset::full(n);
    let mut value = 0.0;
    for j in 0..n {
        let a_plus = a.with(j);
        let b_minus = b.without(j);
        let fa_plus = f.eval(&a_plus);
        let add = fa_plus - f.eval(&a);
        let fb_minus = f.eval(&b_minus);
        let remove = fb_minus - f.eval(&b);
        let take = match mode {
            GreedyMode::Deterministic => add >= remove,
            GreedyMode::Randomized => {
                let (ap, bp) = (add.max(0.0), remove.max(0.0));
                if ap + bp == 0.0 {
                    true
                } else {
                    rng.gen::<f64>() * (ap + bp) < ap
                }
            }
        };
        if take {
            a = a_plus;
            value = fa_plus;
        } else {
            b = b_minus;
            value = fb_minus;
        }
    }
    let (method, seed) = match mode {
        GreedyMode::Deterministic => ("double_greedy_deterministic", None),
        GreedyMode::Randomized => ("double_greedy_randomized", Some(seed)),
    };
    MaximizerResult {
        set: a,
        value,
        method,
        seed,
    }
}

/// Up to `k` greedy additions of the best strictly positive gain (ties to the
/// lowest index), restricted to elements `allowed` accepts.
pub fn greedy_cardinality_max_where(
    f: &Oracle,
    k: usize,
    allowed: impl Fn(usize) -> bool,
) -> MaximizerResult {
    let n = f.n();
    let mut set = Subset::empty(n);
    let mut value = f.eval(&set);
    for _ in 0..k.min(n) {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..n).filter(|&j| !set.contains(j) && allowed(j)) {
            let v = f.eval(&set.with(j));
            if v - value > 0.0 && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        match best {
            Some((j, v)) => {
                set.insert(j);
                value = v;
            }
            None => break,
        }
    }
    MaximizerResult {
        set,
        value,
        method: "greedy_cardinality",
        seed: None,
    }
}

pub fn greedy_cardinality_max(f: &Oracle, k: usize) -> MaximizerResult {
    greedy_cardinality_max_where(f, k, |_| true)
}

/// Best single addition or deletion while it strictly increases `f`.
/// `max_size` caps the cardinality of sets visited.
pub fn local_search_max_bounded(
    f: &Oracle,
    start: &Subset,
    max_size: Option<usize>,
) -> MaximizerResult {
    let n = f.n();
    let mut set = start.clone();
    let mut value = f.eval(&set);
    loop {
        let mut best: Option<(Subset, f64)> = None;
        for j in 0..n {
            let cand = if set.contains(j) {
                set.without(j)
            } else {
                set.with(j)
            };
            if max_size.is_some_and(|m| cand.len() > m) {
                continue;
            }
            let v = f.eval(&cand);
            if v > value + STRICT && best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((cand, v));
            }
        }
        match best {
            Some((s, v)) => {
                set = s;
                value = v;
            }
            None => {
                return MaximizerResult {
                    set,
                    value,
                    method: "local_search",
                    seed: None,
                }
            }
        }
    }
}

pub fn local_search_max(f: &Oracle, start: &Subset) -> MaximizerResult {
    local_search_max_bounded(f, start, None)
}

/// Inner maximizer selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxSolver {
    /// Double greedy followed by a local-search polish.
    DoubleGreedy(GreedyMode),
    BruteForce,
}

impl Default for MaxSolver {
    fn default() -> Self {
        MaxSolver::DoubleGreedy(GreedyMode::Deterministic)
    }
}

impl MaxSolver {
    pub fn maximize(&self, f: &Oracle, seed: u64) -> Result<MaximizerResult> {
        match *self {
            MaxSolver::DoubleGreedy(mode) => {
                let dg = double_greedy(f, mode, seed);
                let mut polished = local_search_max(f, &dg.set);
                polished.method = dg.method;
                polished.seed = dg.seed;
                Ok(polished)
            }
            MaxSolver::BruteForce => {
                let (set, value) = brute_force_maximize(f)?;
                Ok(MaximizerResult {
                    set,
                    value,
                    method: "brute_force",
                    seed: None,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::AffineModular;

    fn triangle_cut() -> Oracle {
        Oracle::from_fn(3, |s| {
            [(0, 1), (0, 2), (1, 2)]
                .iter()
                .filter(|&&(a, b)| s.contains(a) != s.contains(b))
                .count() as f64
        })
    }

    #[test]
    fn double_greedy_examples() {
        let f = AffineModular::linear(vec![1.0, -2.0, 3.0]).into_oracle();
        let r = double_greedy(&f, GreedyMode::Deterministic, 0);
        assert_eq!(r.set.to_vec(), vec![0, 2]);
        assert_eq!(r.value, 4.0);
        assert_eq!(f.calls(), 12);

        let g = Oracle::from_fn(5, |s| (s.len() as f64).sqrt());
        for mode in [GreedyMode::Deterministic, GreedyMode::Randomized] {
            let r = double_greedy(&g, mode, 3);
            assert_eq!(r.set.len(), 5);
            assert!((r.value - 5f64.sqrt()).abs() < 1e-12);
            assert_eq!(r.value, g.eval(&r.set));
        }
    }

    #[test]
    fn randomized_is_seed_deterministic() {
        let f = triangle_cut();
        let a = double_greedy(&f, GreedyMode::Randomized, 42);
        let b = double_greedy(&f, GreedyMode::Randomized, 42);
        assert_eq!(a, b);
    }

    #[test]
    fn cardinality_greedy_examples() {
        let f = AffineModular::linear(vec![3.0, 1.0, 2.0]).into_oracle();
        let r = greedy_cardinality_max(&f, 2);
        assert_eq!(r.set.to_vec(), vec![0, 2]);
        assert_eq!(r.value, 5.0);
        let g = Oracle::from_fn(3, |s| (s.len() as f64).sqrt());
        let r = greedy_cardinality_max(&g, 2);
        assert_eq!(r.set.to_vec(), vec![0, 1]);
        let neg = AffineModular::linear(vec![-1.0, -2.0]).into_oracle();
        assert!(greedy_cardinality_max(&neg, 2).set.is_empty());
    }

    #[test]
    fn local_search_examples() {
        let f = AffineModular::linear(vec![-1.0, 2.0]).into_oracle();
        let r = local_search_max(&f, &Subset::empty(2));
        assert_eq!(r.set.to_vec(), vec![1]);
        assert_eq!(r.value, 2.0);
        let r = local_search_max(&triangle_cut(), &Subset::empty(3));
        assert_eq!(r.set.to_vec(), vec![0]);
        assert_eq!(r.value, 2.0);
    }
}
