use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::subset::Subset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// No candidate lowered the objective.
    Converged,
    /// Some candidate lowered the objective but not enough for the ε rule.
    EpsilonStop,
    IterCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub set: Subset,
    pub value: f64,
    /// Evaluations of `f` and `g` so far.
    pub oracle_calls: u64,
    pub elapsed_ms: Option<f64>,
}

/// Accepted iterates of one run, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub algorithm: Algorithm,
    pub n: usize,
    pub iterates: Vec<Iterate>,
    pub termination: Termination,
    pub locally_optimal: bool,
}

impl OptimizationTrace {
    pub(crate) fn new(algorithm: Algorithm, n: usize) -> Self {
        Self {
            algorithm,
            n,
            iterates: Vec::new(),
            termination: Termination::Converged,
            locally_optimal: false,
        }
    }

    pub fn final_set(&self) -> Subset {
        self.iterates
            .last()
            .map_or_else(|| Subset::empty(self.n), |it| it.set.clone())
    }

    pub fn final_value(&self) -> f64 {
        self.iterates.last().map_or(0.0, |it| it.value)
    }

    /// Moves taken after the starting point.
    pub fn accepted_steps(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn oracle_calls(&self) -> u64 {
        self.iterates.last().map_or(0, |it| it.oracle_calls)
    }

    pub fn is_monotone(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1].value <= w[0].value)
    }

    pub fn to_record(&self) -> TraceRecord {
        TraceRecord {
            algorithm: self.algorithm,
            n: self.n,
            termination: self.termination,
            locally_optimal: self.locally_optimal,
            final_set: self.final_set().to_one_based(),
            final_value: self.final_value(),
            oracle_calls: self.oracle_calls(),
            iterates: self
                .iterates
                .iter()
                .enumerate()
                .map(|(i, it)| IterateRecord {
                    iteration: i,
                    set: it.set.to_one_based(),
                    value: it.value,
                    oracle_calls: it.oracle_calls,
                    elapsed_ms: it.elapsed_ms,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("trace serializes")
    }

    /// `iteration,value,oracle_calls,millis`; `millis` is empty when time was not recorded.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,value,oracle_calls,millis\n");
        for (i, it) in self.iterates.iter().enumerate() {
            let ms = it.elapsed_ms.map(|m| format!("{m:.3}")).unwrap_or_default();
            out.push_str(&format!("{i},{},{},{ms}\n", it.value, it.oracle_calls));
        }
        out
    }
}

/// Serialized trace. Sets are sorted 1-based element arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub termination: Termination,
    pub locally_optimal: bool,
    pub final_set: Vec<usize>,
    pub final_value: f64,
    pub oracle_calls: u64,
    pub iterates: Vec<IterateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub iteration: usize,
    pub set: Vec<usize>,
    pub value: f64,
    pub oracle_calls: u64,
    pub elapsed_ms: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_csv_shapes() {
        let mut t = OptimizationTrace::new(Algorithm::ModMod, 3);
        t.iterates.push(Iterate {
            set: Subset::empty(3),
            value: 0.0,
            oracle_calls: 0,
            elapsed_ms: None,
        });
        t.iterates.push(Iterate {
            set: Subset::full(3),
            value: -1.5,
            oracle_calls: 12,
            elapsed_ms: None,
        });
        let rec: TraceRecord = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(rec.final_set, vec![1, 2, 3]);
        assert_eq!(rec.algorithm, Algorithm::ModMod);
        assert_eq!(
            t.to_csv(),
            "iteration,value,oracle_calls,millis\n0,0,0,\n1,-1.5,12,\n"
        );
        assert!(t.is_monotone());
        assert_eq!(t.accepted_steps(), 1);
    }
}
