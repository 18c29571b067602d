use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::subset::Subset;

/// How `H(X_A | C)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMode {
    /// Joint conditional entropy of the selected columns.
    #[default]
    NonFactored,
    /// `Σ_j H(X_j | C)`, as if the features were independent given the class.
    Factored,
}

impl std::str::FromStr for MiMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "factored" => Ok(Self::Factored),
            "non_factored" | "non-factored" => Ok(Self::NonFactored),
            _ => Err(format!("unknown mode {s:?} (factored, non_factored)")),
        }
    }
}

/// Rows grouped by the joint value of some columns; `ids[r] < cells`.
struct Partition {
    ids: Vec<u32>,
    cells: usize,
}

/// Bytes of cached row partitions kept per [`Entropies`].
const PARTITION_CACHE_BYTES: usize = 64 << 20;

/// Plug-in entropies of one dataset. The row partition of each evaluated
/// column set is cached, so evaluating `A ∪ {j}` after `A` costs one pass
/// over the rows.
pub(crate) struct Entropies {
    ds: Arc<Dataset>,
    classes: Vec<Vec<usize>>,
    cache: Mutex<HashMap<Subset, Arc<Partition>>>,
    capacity: usize,
}

impl Entropies {
    pub(crate) fn new(ds: Arc<Dataset>) -> Self {
        let classes = rows_by_class(&ds);
        let capacity = (PARTITION_CACHE_BYTES / (4 * ds.rows().max(1))).max(8);
        Self {
            ds,
            classes,
            cache: Mutex::new(HashMap::new()),
            capacity,
        }
    }

    fn refine(&self, p: &Partition, j: usize) -> Partition {
        let col = self.ds.column(j);
        let arity = self.ds.arity(j) as usize;
        let mut slots = vec![u32::MAX; p.cells * arity];
        let mut cells = 0u32;
        let ids = p
            .ids
            .iter()
            .zip(col)
            .map(|(&id, &v)| {
                let slot = &mut slots[id as usize * arity + v as usize];
                if *slot == u32::MAX {
                    *slot = cells;
                    cells += 1;
                }
                *slot
            })
            .collect();
        Partition {
            ids,
            cells: cells as usize,
        }
    }

    fn partition(&self, a: &Subset) -> Arc<Partition> {
        let parent = {
            let cache = self.cache.lock().expect("cache lock");
            if let Some(p) = cache.get(a) {
                return p.clone();
            }
            a.iter()
                .find_map(|j| cache.get(&a.without(j)).map(|p| (j, p.clone())))
        };
        let p = match parent {
            Some((j, p)) => self.refine(&p, j),
            None => {
                let trivial = Partition {
                    ids: vec![0; self.ds.rows()],
                    cells: 1,
                };
                a.iter().fold(trivial, |p, j| self.refine(&p, j))
            }
        };
        let p = Arc::new(p);
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.len() >= self.capacity {
            cache.clear();
        }
        cache.insert(a.clone(), p.clone());
        p
    }

    /// `Ĥ(X_A)`.
    pub(crate) fn joint(&self, a: &Subset, alpha: f64) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        let p = self.partition(a);
        let mut counts = vec![0u64; p.cells];
        for &id in &p.ids {
            counts[id as usize] += 1;
        }
        smoothed_entropy(&counts, alpha)
    }

    /// `Ĥ(X_A | C)` under `mode`.
    pub(crate) fn conditional(&self, a: &Subset, alpha: f64, mode: MiMode) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        if mode == MiMode::Factored && a.len() > 1 {
            let n = a.n();
            return a
                .iter()
                .map(|j| {
                    self.conditional(
                        &Subset::from_indices(n, [j]).expect("in range"),
                        alpha,
                        mode,
                    )
                })
                .sum();
        }
        let p = self.partition(a);
        let m = self.ds.rows() as f64;
        let mut counts = vec![0u64; p.cells];
        let mut total = 0.0;
        for rows in self.classes.iter().filter(|rows| !rows.is_empty()) {
            counts.iter_mut().for_each(|c| *c = 0);
            for &r in rows {
                counts[p.ids[r] as usize] += 1;
            }
            let observed: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
            total += rows.len() as f64 / m * smoothed_entropy(&observed, alpha);
        }
        total
    }
}

/// Entropy in bits of the counts, with `alpha` added to every observed cell
/// and to one pooled cell for all unobserved values.
fn smoothed_entropy(counts: &[u64], alpha: f64) -> f64 {
    let total: f64 = counts.iter().sum::<u64>() as f64 + alpha * (counts.len() + 1) as f64;
    let term = |c: f64| {
        if c > 0.0 {
            -(c / total) * (c / total).log2()
        } else {
            0.0
        }
    };
    counts.iter().map(|&c| term(c as f64 + alpha)).sum::<f64>() + term(alpha)
}

fn check(ds: &Dataset, a: &Subset, alpha: f64) -> Result<()> {
    if ds.rows() == 0 {
        return Err(Error::Domain("empty dataset".into()));
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
    Ok(())
}

/// Plug-in entropy `Ĥ(X_A)` in bits; `Ĥ(X_∅) = 0`.
pub fn empirical_entropy(ds: &Dataset, a: &Subset, alpha: f64) -> Result<f64> {
    check(ds, a, alpha)?;
    Ok(Entropies::new(Arc::new(ds.clone())).joint(a, alpha))
}

/// Row indices per class id.
pub(crate) fn rows_by_class(ds: &Dataset) -> Vec<Vec<usize>> {
    let mut by = vec![Vec::new(); ds.classes()];
    for (r, &c) in ds.labels().iter().enumerate() {
        by[c as usize].push(r);
    }
    by
}

/// `Ĥ(X_A | C) = Σ_c p̂(c) Ĥ(X_A | C = c)` in bits under `mode`.
pub fn conditional_entropy(ds: &Dataset, a: &Subset, alpha: f64, mode: MiMode) -> Result<f64> {
    check(ds, a, alpha)?;
    Ok(Entropies::new(Arc::new(ds.clone())).conditional(a, alpha, mode))
}

/// `Î(X_A; C) = Ĥ(X_A) - Ĥ(X_A | C)`.
pub fn mutual_information(ds: &Dataset, a: &Subset, alpha: f64, mode: MiMode) -> Result<f64> {
    check(ds, a, alpha)?;
    let e = Entropies::new(Arc::new(ds.clone()));
    Ok(e.joint(a, alpha) - e.conditional(a, alpha, mode))
}
