use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::subset::Subset;

/// Price of a feature subset.
#[derive(Debug, Clone, PartialEq)]
pub enum CostModel {
    /// `λ |A|`.
    ModularCardinality { lambda: f64 },
    /// `λ Σ_i √(m(A ∩ S_i))` over disjoint blocks covering all features.
    PartitionSqrt {
        blocks: Vec<Vec<usize>>,
        weights: Vec<f64>,
        lambda: f64,
    },
}

/// JSON form of a partition: 1-based blocks and optional per-feature weights (default 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksSpec {
    pub blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

impl CostModel {
    pub fn modular(lambda: f64) -> Self {
        CostModel::ModularCardinality { lambda }
    }

    /// Checks that `blocks` (0-based) partition `0..n` and that weights are non-negative.
    pub fn partition_sqrt(
        n: usize,
        blocks: Vec<Vec<usize>>,
        weights: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::Domain(format!(
                "{} weights for {n} features",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::Domain(format!("cost weights must be >= 0, got {w}")));
        }
        let mut seen = vec![false; n];
        for &j in blocks.iter().flatten() {
            if j >= n {
                return Err(Error::Domain(format!(
                    "block element {} out of range 1..={n}",
                    j + 1
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::Domain(format!("feature {} is in two blocks", j + 1)));
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("feature {} is in no block", j + 1)));
        }
        Ok(CostModel::PartitionSqrt {
            blocks,
            weights,
            lambda,
        })
    }

    pub fn from_blocks_spec(n: usize, spec: &BlocksSpec, lambda: f64) -> Result<Self> {
        let blocks = spec
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&j| {
                        j.checked_sub(1)
                            .ok_or_else(|| Error::Domain("blocks are 1-based".into()))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        Self::partition_sqrt(
            n,
            blocks,
            spec.weights.clone().unwrap_or_else(|| vec![1.0; n]),
            lambda,
        )
    }

    pub fn lambda(&self) -> f64 {
        match self {
            CostModel::ModularCardinality { lambda } | CostModel::PartitionSqrt { lambda, .. } => {
                *lambda
            }
        }
    }

    /// The same model with another `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        match self {
            CostModel::ModularCardinality { .. } => CostModel::ModularCardinality { lambda },
            CostModel::PartitionSqrt {
                blocks, weights, ..
            } => CostModel::PartitionSqrt {
                blocks: blocks.clone(),
                weights: weights.clone(),
                lambda,
            },
        }
    }

    pub fn into_oracle(self, n: usize) -> Oracle {
        Oracle::from_fn(n, move |a| evaluate_cost(&self, a))
    }
}

pub fn evaluate_cost(cm: &CostModel, a: &Subset) -> f64 {
    match cm {
        CostModel::ModularCardinality { lambda } => lambda * a.len() as f64,
        CostModel::PartitionSqrt {
            blocks,
            weights,
            lambda,
        } => {
            lambda
                * blocks
                    .iter()
                    .map(|b| {
                        b.iter()
                            .filter(|&&j| a.contains(j))
                            .map(|&j| weights[j])
                            .sum::<f64>()
                            .sqrt()
                    })
                    .sum::<f64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::check_submodular;

    #[test]
    fn partition_examples() {
        let cm =
            CostModel::partition_sqrt(3, vec![vec![0, 1], vec![2]], vec![1.0; 3], 1.0).unwrap();
        let s = |v: &[usize]| Subset::from_indices(3, v.iter().copied()).unwrap();
        assert!((evaluate_cost(&cm, &s(&[0, 1])) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(evaluate_cost(&cm, &s(&[])), 0.0);
        assert!((evaluate_cost(&cm, &s(&[0, 2])) - 2.0).abs() < 1e-12);
        assert_eq!(evaluate_cost(&CostModel::modular(0.5), &s(&[0, 2])), 1.0);
    }

    #[test]
    fn partition_validation() {
        assert!(CostModel::partition_sqrt(3, vec![vec![0, 1]], vec![1.0; 3], 1.0).is_err());
        assert!(
            CostModel::partition_sqrt(3, vec![vec![0, 1], vec![1, 2]], vec![1.0; 3], 1.0).is_err()
        );
        assert!(CostModel::partition_sqrt(2, vec![vec![0, 1]], vec![1.0, -1.0], 1.0).is_err());
        let spec: BlocksSpec = serde_json::from_str(r#"{"blocks": [[1, 2], [3]]}"#).unwrap();
        assert!(CostModel::from_blocks_spec(3, &spec, 2.0).is_ok());
    }

    #[test]
    fn partition_cost_is_submodular() {
        let blocks = vec![vec![0, 3, 5], vec![1, 2], vec![4, 6, 7, 8, 9]];
        let weights = (0..10).map(|j| 0.5 + j as f64 * 0.3).collect();
        let cm = CostModel::partition_sqrt(10, blocks, weights, 1.5).unwrap();
        assert!(check_submodular(&cm.into_oracle(10)).unwrap());
    }
}
