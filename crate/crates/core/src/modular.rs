use serde::{Deserialize, Serialize};

use crate::oracle::{Oracle, SetFunction};
use crate::subset::Subset;

/// `X -> offset + Σ_{j∈X} weights[j]`.
///
/// Used for every modular bound: lower bounds (subgradients) carry a zero
/// offset, upper bounds carry `f(X) - Σ` of the in-set gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineModular {
    pub offset: f64,
    pub weights: Vec<f64>,
}

impl AffineModular {
    pub fn new(offset: f64, weights: Vec<f64>) -> Self {
        Self { offset, weights }
    }

    pub fn linear(weights: Vec<f64>) -> Self {
        Self {
            offset: 0.0,
            weights,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::linear(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn value(&self, s: &Subset) -> f64 {
        self.offset + s.iter().map(|j| self.weights[j]).sum::<f64>()
    }

    /// Element-wise `self - other`, offsets included.
    pub fn sub(&self, other: &AffineModular) -> AffineModular {
        assert_eq!(self.n(), other.n());
        AffineModular {
            offset: self.offset - other.offset,
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn into_oracle(self) -> Oracle {
        Oracle::new(self)
    }
}

impl SetFunction for AffineModular {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, s: &Subset) -> f64 {
        self.value(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_and_difference() {
        let m = AffineModular::new(1.5, vec![3.0, 1.0, 2.0]);
        assert_eq!(m.value(&Subset::empty(3)), 1.5);
        assert_eq!(m.value(&Subset::from_indices(3, [1, 2]).unwrap()), 4.5);
        let d = m.sub(&AffineModular::linear(vec![1.0, 1.0, 1.0]));
        assert_eq!(d.value(&Subset::full(3)), 4.5);
    }
}
