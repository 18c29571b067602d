use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::entropy::rows_by_class;
use super::Dataset;
use crate::error::{Error, Result};
use crate::subset::Subset;

/// Fold index of every row: each class is shuffled with `seed` and dealt round-robin.
pub fn stratified_folds(ds: &Dataset, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; ds.rows()];
    let mut next = 0;
    for mut rows in rows_by_class(ds) {
        rows.shuffle(&mut rng);
        for r in rows {
            assignment[r] = next % folds;
            next += 1;
        }
    }
    assignment
}

struct NaiveBayes {
    log_prior: Vec<f64>,
    /// `log_lik[c][k][v]` for the `k`-th selected feature.
    log_lik: Vec<Vec<Vec<f64>>>,
}

impl NaiveBayes {
    fn fit(ds: &Dataset, features: &[usize], rows: &[usize], alpha: f64) -> Self {
        let k = ds.classes();
        let mut class_count = vec![0usize; k];
        let mut counts: Vec<Vec<Vec<usize>>> = vec![
            features
                .iter()
                .map(|&j| vec![0; ds.arity(j) as usize])
                .collect();
            k
        ];
        for &r in rows {
            let c = ds.labels()[r] as usize;
            class_count[c] += 1;
            for (slot, &j) in counts[c].iter_mut().zip(features) {
                slot[ds.column(j)[r] as usize] += 1;
            }
        }
        let ln = |num: f64, den: f64| {
            if num > 0.0 {
                (num / den).ln()
            } else {
                f64::NEG_INFINITY
            }
        };
        let total = rows.len() as f64 + alpha * k as f64;
        let log_prior = class_count
            .iter()
            .map(|&c| ln(c as f64 + alpha, total))
            .collect();
        let log_lik = counts
            .iter()
            .zip(&class_count)
            .map(|(per_feature, &cc)| {
                per_feature
                    .iter()
                    .map(|cells| {
                        let den = cc as f64 + alpha * cells.len() as f64;
                        cells.iter().map(|&n| ln(n as f64 + alpha, den)).collect()
                    })
                    .collect()
            })
            .collect();
        Self { log_prior, log_lik }
    }

    /// Most probable class; ties go to the smaller class id.
    fn predict(&self, ds: &Dataset, features: &[usize], r: usize) -> u32 {
        let mut best = (0, f64::NEG_INFINITY);
        for (c, prior) in self.log_prior.iter().enumerate() {
            let score = prior
                + features
                    .iter()
                    .zip(&self.log_lik[c])
                    .map(|(&j, lik)| lik[ds.column(j)[r] as usize])
                    .sum::<f64>();
            if score > best.1 || (c == 0 && best.1 == f64::NEG_INFINITY) {
                best = (c as u32, score);
            }
        }
        best.0
    }
}

/// Mean accuracy of categorical naive Bayes on features `a` over stratified
/// folds. With `a = ∅` the classifier predicts the majority training class.
pub fn naive_bayes_cv(
    ds: &Dataset,
    a: &Subset,
    folds: usize,
    alpha: f64,
    seed: u64,
) -> Result<f64> {
    if folds < 2 || folds > ds.rows() {
        return Err(Error::Domain(format!(
            "folds must be in 2..={}, got {folds}",
            ds.rows()
        )));
    }
    if a.n() != ds.features() {
        return Err(Error::Domain(format!(
            "subset over {} elements, dataset has {} features",
            a.n(),
            ds.features()
        )));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "smoothing must be >= 0, got {alpha}"
        )));
    }
    let features = a.to_vec();
    let assignment = stratified_folds(ds, folds, seed);
    let accuracies: Vec<f64> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let train: Vec<usize> = (0..ds.rows()).filter(|&r| assignment[r] != k).collect();
            let test: Vec<usize> = (0..ds.rows()).filter(|&r| assignment[r] == k).collect();
            let model = NaiveBayes::fit(ds, &features, &train, alpha);
            let correct = test
                .iter()
                .filter(|&&r| model.predict(ds, &features, r) == ds.labels()[r])
                .count();
            correct as f64 / test.len() as f64
        })
        .collect();
    Ok(accuracies.iter().sum::<f64>() / folds as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featsel::informative_with_noise;

    #[test]
    fn label_copy_is_perfect() {
        let ds = informative_with_noise(50, 3, 0.0, 1);
        let a = Subset::from_indices(4, [0]).unwrap();
        assert_eq!(naive_bayes_cv(&ds, &a, 5, 1.0, 0).unwrap(), 1.0);
    }

    #[test]
    fn folds_are_stratified_and_seeded() {
        let ds = informative_with_noise(40, 1, 0.3, 9);
        let f = stratified_folds(&ds, 4, 3);
        assert_eq!(f, stratified_folds(&ds, 4, 3));
        for k in 0..4 {
            assert_eq!(f.iter().filter(|&&x| x == k).count(), 10);
        }
    }

    #[test]
    fn empty_selection_predicts_majority() {
        let rows = vec![vec![0]; 6];
        let labels: Vec<String> = ["a", "a", "a", "a", "b", "b"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let ds = Dataset::from_rows(&rows, &labels).unwrap();
        let acc = naive_bayes_cv(&ds, &Subset::empty(1), 2, 1.0, 0).unwrap();
        assert!((acc - 4.0 / 6.0).abs() < 1e-12);
        assert!(naive_bayes_cv(&ds, &Subset::empty(1), 1, 1.0, 0).is_err());
    }
}
