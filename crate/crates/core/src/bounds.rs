//! Tight modular bounds of submodular functions, total normalization,
//! decomposition of arbitrary set functions into a difference of submodular
//! functions, and lower bounds on the minimum of such differences.

use serde::{Deserialize, Serialize};

use crate::brute::{tabulate, SUBMODULAR_CHECK_LIMIT, TOL};
use crate::error::{Error, Result};
use crate::modular::AffineModular;
use crate::oracle::Oracle;
use crate::sfm::SfmSolver;
use crate::spec::{table_spec, FunctionSpec, Term};
use crate::subset::{Permutation, Subset};

/// Modular lower bound (subgradient) of `g` that is exact on every prefix of
/// `order`'s chain. The chain must pass through `y`, and `g(∅)` must be 0.
pub fn modular_lower_bound(g: &Oracle, y: &Subset, order: &Permutation) -> Result<AffineModular> {
    if !order.chain_contains(y) {
        return Err(Error::Domain(format!(
            "permutation chain does not contain {y}"
        )));
    }
    let vertex = crate::sfm::vertex_for_order(g, order);
    if vertex.chain_values[0].abs() > TOL {
        return Err(Error::Domain(format!(
            "lower bound needs g(∅) = 0, got {}",
            vertex.chain_values[0]
        )));
    }
    Ok(AffineModular::linear(vertex.coords))
}

/// Which of the two tight modular upper bounds to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBound {
    /// In-set weights `f(j | X∖j)`, out-of-set weights `f(j | ∅)`.
    First,
    /// In-set weights `f(j | V∖j)`, out-of-set weights `f(j | X)`.
    Second,
}

impl UpperBound {
    pub const BOTH: [UpperBound; 2] = [UpperBound::First, UpperBound::Second];

    pub fn other(self) -> Self {
        match self {
            UpperBound::First => UpperBound::Second,
            UpperBound::Second => UpperBound::First,
        }
    }
}

/// Modular upper bound of a submodular `f`, tight at `x`.
pub fn modular_upper_bound(f: &Oracle, x: &Subset, variant: UpperBound) -> AffineModular {
    let n = f.n();
    let fx = f.eval(x);
    let mut weights = vec![0.0; n];
    match variant {
        UpperBound::First => {
            let f_empty = f.eval(&Subset::empty(n));
            for (j, w) in weights.iter_mut().enumerate() {
                *w = if x.contains(j) {
                    fx - f.eval(&x.without(j))
                } else {
                    f.eval(&Subset::from_indices(n, [j]).expect("in range")) - f_empty
                };
            }
        }
        UpperBound::Second => {
            let full = Subset::full(n);
            let f_full = f.eval(&full);
            for (j, w) in weights.iter_mut().enumerate() {
                *w = if x.contains(j) {
                    f_full - f.eval(&full.without(j))
                } else {
                    f.eval(&x.with(j)) - fx
                };
            }
        }
    }
    let offset = fx - x.iter().map(|j| weights[j]).sum::<f64>();
    AffineModular::new(offset, weights)
}

/// `f = f' + k_f` with `k_f[j] = f(j | V∖j)` and `f'` monotone, normalized.
#[derive(Debug, Clone)]
pub struct NormalizedPart {
    pub prime: Oracle,
    pub modular: AffineModular,
}

/// Splits a normalized submodular function into a polymatroid rank function
/// plus a modular function.
pub fn totally_normalize(f: &Oracle) -> NormalizedPart {
    let n = f.n();
    let full = Subset::full(n);
    let f_full = f.eval(&full);
    let k: Vec<f64> = (0..n).map(|j| f_full - f.eval(&full.without(j))).collect();
    let modular = AffineModular::linear(k);
    let prime = f.minus(&modular.clone().into_oracle());
    NormalizedPart { prime, modular }
}

/// `v = f' - g' + k` with `k = k_f - k_g`.
#[derive(Debug, Clone)]
pub struct TotalNormalization {
    pub f_prime: Oracle,
    pub g_prime: Oracle,
    pub k: AffineModular,
    pub k_g: AffineModular,
}

impl TotalNormalization {
    pub fn of(f: &Oracle, g: &Oracle) -> Self {
        let nf = totally_normalize(f);
        let ng = totally_normalize(g);
        let k = nf.modular.sub(&ng.modular);
        TotalNormalization {
            f_prime: nf.prime,
            g_prime: ng.prime,
            k,
            k_g: ng.modular,
        }
    }
}

/// Smallest difference of gains of `√|X|` over `X ⊂ Y ⊆ V∖j`: `2√(n-1) - √n - √(n-2)`.
/// Infinite for `n < 2`, where no such pair exists.
pub fn sqrt_beta(n: usize) -> f64 {
    if n < 2 {
        return f64::INFINITY;
    }
    let n = n as f64;
    2.0 * (n - 1.0).sqrt() - n.sqrt() - (n - 2.0).sqrt()
}

/// `α = min_{j, X ⊂ Y ⊆ V∖j} v(j|X) - v(j|Y)`, exactly, from a value table.
///
/// For each `j` and `Y`, the minimum gain over strict subsets of `Y` comes from
/// a subset-minimum sweep, so the cost is `O(n² 2ⁿ)` after tabulation.
/// Returns `+∞` when no pair `X ⊂ Y` exists (`n = 1`).
pub fn submodularity_defect(v: &Oracle) -> Result<f64> {
    let n = v.n();
    if n > SUBMODULAR_CHECK_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: SUBMODULAR_CHECK_LIMIT,
        });
    }
    let table = tabulate(v)?;
    Ok(defect_from_table(&table, n))
}

fn defect_from_table(table: &[f64], n: usize) -> f64 {
    let size = 1usize << n;
    let mut alpha = f64::INFINITY;
    let mut sub_min = vec![0.0; size];
    for j in 0..n {
        let bj = 1usize << j;
        for (mask, m) in sub_min.iter_mut().enumerate() {
            *m = if mask & bj == 0 {
                table[mask | bj] - table[mask]
            } else {
                f64::INFINITY
            };
        }
        let gains = sub_min.clone();
        for i in 0..n {
            let bi = 1usize << i;
            for mask in 0..size {
                if mask & bi != 0 {
                    let cand = sub_min[mask ^ bi];
                    if cand < sub_min[mask] {
                        sub_min[mask] = cand;
                    }
                }
            }
        }
        for y in 1..size {
            if y & bj != 0 {
                continue;
            }
            let strict = (0..n)
                .filter(|&i| y >> i & 1 == 1)
                .map(|i| sub_min[y ^ (1 << i)])
                .fold(f64::INFINITY, f64::min);
            alpha = alpha.min(strict - gains[y]);
        }
    }
    alpha
}

/// `v = f - g` with `g = scale · √|X|`.
#[derive(Debug, Clone)]
pub struct DsDecomposition {
    pub f: Oracle,
    pub g: Oracle,
    /// The defect used to size `g` (the exact one when it was computed).
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
}

impl DsDecomposition {
    /// Serializable form of both parts; `v` is tabulated, so `n ≤ 20`.
    pub fn to_specs(&self, v: &Oracle) -> Result<(FunctionSpec, FunctionSpec)> {
        let n = v.n();
        let sqrt = FunctionSpec::sqrt_cardinality(n);
        let f = FunctionSpec::ScaledSum {
            terms: vec![
                Term {
                    coef: 1.0,
                    spec: table_spec(v)?,
                },
                Term {
                    coef: self.scale,
                    spec: sqrt.clone(),
                },
            ],
        };
        Ok((f, FunctionSpec::scaled(self.scale, sqrt)))
    }
}

/// Writes `v` as a difference of submodular functions using `g ∝ √|X|`.
///
/// Without `alpha_lb` the defect is computed exhaustively (`n ≤ 16`). A
/// supplied lower bound is verified when `n ≤ 16` and trusted otherwise.
pub fn ds_decompose(v: &Oracle, alpha_lb: Option<f64>) -> Result<DsDecomposition> {
    let n = v.n();
    let exact = if n <= SUBMODULAR_CHECK_LIMIT {
        Some(submodularity_defect(v)?)
    } else {
        None
    };
    let alpha = match (alpha_lb, exact) {
        (None, None) => {
            return Err(Error::TooLarge {
                n,
                limit: SUBMODULAR_CHECK_LIMIT,
            })
        }
        (None, Some(a)) => a,
        (Some(lb), Some(a)) => {
            if lb > a + TOL {
                return Err(Error::Domain(format!(
                    "alpha lower bound {lb} exceeds the true defect {a}"
                )));
            }
            lb.min(a)
        }
        (Some(lb), None) => lb,
    };
    let beta = sqrt_beta(n);
    if alpha >= 0.0 {
        let zero = Oracle::from_fn(n, |_| 0.0);
        return Ok(DsDecomposition {
            f: v.clone(),
            g: zero,
            alpha,
            beta,
            scale: 0.0,
        });
    }
    let scale = alpha.abs() / beta;
    let g = Oracle::from_fn(n, move |s| scale * (s.len() as f64).sqrt());
    let f = v.plus(&g);
    Ok(DsDecomposition {
        f,
        g,
        alpha,
        beta,
        scale,
    })
}

/// The two certified lower bounds on `min_X f(X) - g(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    /// `min_X [f'(X) + k(X)] - g'(V)`; needs one submodular minimization.
    pub bound1: f64,
    /// `f'(∅) - g'(V) + Σ_j min(k_j, 0)`; closed form.
    pub bound2: f64,
}

/// Lower bounds from total normalization. `f` and `g` must be normalized.
pub fn minima_lower_bounds(f: &Oracle, g: &Oracle, solver: &SfmSolver) -> Result<LowerBounds> {
    let n = f.n();
    let tn = TotalNormalization::of(f, g);
    let full = Subset::full(n);
    let g_prime_full = tn.g_prime.eval(&full);
    // f' + k = f - k_g, which is submodular.
    let surrogate = f.minus(&tn.k_g.clone().into_oracle());
    let (_, inner) = solver.minimize(&surrogate)?;
    let f_prime_empty = tn.f_prime.eval(&Subset::empty(n));
    let bound2 =
        f_prime_empty - g_prime_full + tn.k.weights.iter().map(|&k| k.min(0.0)).sum::<f64>();
    Ok(LowerBounds {
        bound1: inner - g_prime_full,
        bound2,
    })
}
