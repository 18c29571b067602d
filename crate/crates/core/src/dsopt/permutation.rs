use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::oracle::{gain_unchecked, Oracle};
use crate::subset::{Permutation, Subset};

/// How the chain through the current iterate is ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationHeuristic {
    Random,
    /// Decreasing gains of `g`.
    #[default]
    GGain,
    /// Decreasing gains of `v = f - g`.
    VGain,
}

impl std::str::FromStr for PermutationHeuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(Self::Random),
            "g_gain" | "g-gain" => Ok(Self::GGain),
            "v_gain" | "v-gain" => Ok(Self::VGain),
            _ => Err(format!("unknown heuristic {s:?} (random, g_gain, v_gain)")),
        }
    }
}

/// A permutation whose chain contains `x`: the members of `x` first, then the rest.
///
/// Gain heuristics sort members by decreasing `scorer(j | x∖j)` and
/// non-members by decreasing `scorer(j | x)`, ties by index. `Random`
/// shuffles each segment with `seed`.
pub fn choose_permutation(
    heuristic: PermutationHeuristic,
    x: &Subset,
    scorer: &Oracle,
    seed: u64,
) -> Permutation {
    let n = x.n();
    let mut inside: Vec<usize> = x.iter().collect();
    let mut outside: Vec<usize> = (0..n).filter(|&j| !x.contains(j)).collect();
    match heuristic {
        PermutationHeuristic::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            inside.shuffle(&mut rng);
            outside.shuffle(&mut rng);
        }
        PermutationHeuristic::GGain | PermutationHeuristic::VGain => {
            let by_gain = |items: &mut Vec<usize>, ctx: &dyn Fn(usize) -> Subset| {
                let mut scored: Vec<(usize, f64)> = items
                    .iter()
                    .map(|&j| (j, gain_unchecked(scorer, j, &ctx(j))))
                    .collect();
                scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                *items = scored.into_iter().map(|(j, _)| j).collect();
            };
            by_gain(&mut inside, &|j| x.without(j));
            by_gain(&mut outside, &|_| x.clone());
        }
    }
    inside.extend(outside);
    Permutation::new(inside).expect("segments partition the ground set")
}

/// `base` with `j` moved to the boundary of `x`'s segment: last member when
/// `j ∈ x`, first non-member otherwise. The chain then passes through both
/// `x` and `x ± j`.
pub fn boundary_permutation(base: &Permutation, x: &Subset, j: usize) -> Permutation {
    let k = x.len();
    let mut order: Vec<usize> = base.order().iter().copied().filter(|&e| e != j).collect();
    let pos = if x.contains(j) { k - 1 } else { k };
    order.insert(pos, j);
    Permutation::new(order).expect("reordering keeps a permutation")
}
