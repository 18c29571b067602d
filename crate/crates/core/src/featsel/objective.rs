use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::entropy::Entropies;
use super::{evaluate_cost, CostModel, Dataset, MiMode};
use crate::dsopt::{solve, Algorithm, DsInstance, SolverOptions};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::subset::Subset;

/// Minimize `v(A) = [Ĥ(X_A | C) + cost(A)] - Ĥ(X_A)`, that is, maximize
/// `Î(X_A; C) - cost(A)`.
#[derive(Debug, Clone)]
pub struct FeatSelObjective {
    pub instance: DsInstance,
    pub mode: MiMode,
    pub cost: CostModel,
    pub alpha: f64,
}

impl FeatSelObjective {
    pub fn value(&self, a: &Subset) -> f64 {
        self.instance.value(a)
    }

    pub fn cost(&self, a: &Subset) -> f64 {
        evaluate_cost(&self.cost, a)
    }

    /// `Î(X_A; C)` under this objective's mode.
    pub fn mutual_information(&self, a: &Subset) -> f64 {
        self.cost(a) - self.value(a)
    }
}

pub fn build_objective(
    ds: Arc<Dataset>,
    cost: CostModel,
    alpha: f64,
    mode: MiMode,
) -> Result<FeatSelObjective> {
    let n = ds.features();
    if n == 0 {
        return Err(Error::Domain("dataset has no features".into()));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "smoothing must be >= 0, got {alpha}"
        )));
    }
    let entropies = Arc::new(Entropies::new(ds));
    let f = {
        let (e, cost) = (entropies.clone(), cost.clone());
        Oracle::from_fn(n, move |a| {
            e.conditional(a, alpha, mode) + evaluate_cost(&cost, a)
        })
    };
    let g = Oracle::from_fn(n, move |a| entropies.joint(a, alpha));
    let instance = DsInstance::new(f.memoized(), g.memoized())?;
    Ok(FeatSelObjective {
        instance,
        mode,
        cost,
        alpha,
    })
}

/// Greedy forward selection on the factored (GrF) or joint (GrNF) objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyMode {
    GrF,
    GrNF,
}

impl GreedyMode {
    pub fn mi_mode(self) -> MiMode {
        match self {
            GreedyMode::GrF => MiMode::Factored,
            GreedyMode::GrNF => MiMode::NonFactored,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedySelection {
    pub set: Subset,
    /// Objective after each addition, starting with `v(∅) = 0`.
    pub values: Vec<f64>,
}

/// Adds the feature with the largest strict decrease of `v` until none
/// decreases it or `budget` features are chosen.
pub fn greedy_select(
    ds: Arc<Dataset>,
    cost: CostModel,
    alpha: f64,
    mode: GreedyMode,
    budget: usize,
) -> Result<GreedySelection> {
    let n = ds.features();
    if budget > n {
        return Err(Error::Domain(format!(
            "budget {budget} exceeds {n} features"
        )));
    }
    let obj = build_objective(ds, cost, alpha, mode.mi_mode())?;
    let mut set = Subset::empty(n);
    let mut values = vec![obj.value(&set)];
    while set.len() < budget {
        let current = *values.last().expect("non-empty");
        let best = (0..n)
            .filter(|&j| !set.contains(j))
            .map(|j| (j, obj.value(&set.with(j))))
            .fold(None, |acc: Option<(usize, f64)>, c| match acc {
                Some(a) if a.1 <= c.1 => Some(a),
                _ => Some(c),
            });
        match best {
            Some((j, v)) if v < current - 1e-12 => {
                set.insert(j);
                values.push(v);
            }
            _ => break,
        }
    }
    Ok(GreedySelection { set, values })
}

/// A selection procedure compared in feature-selection runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    GrF,
    GrNF,
    SubSup,
    SupSub,
    ModMod,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::GrF,
        Method::GrNF,
        Method::SubSup,
        Method::SupSub,
        Method::ModMod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::GrF => "grf",
            Method::GrNF => "grnf",
            Method::SubSup => "subsup",
            Method::SupSub => "supsub",
            Method::ModMod => "modmod",
        }
    }

    pub fn parse_list(s: &str) -> std::result::Result<Vec<Method>, String> {
        if s.trim() == "all" {
            return Ok(Method::ALL.to_vec());
        }
        let mut out: Vec<Method> = s
            .split(',')
            .map(|m| m.trim().parse())
            .collect::<std::result::Result<_, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "grf" => Ok(Method::GrF),
            "grnf" => Ok(Method::GrNF),
            other => other
                .parse::<Algorithm>()
                .map(|a| match a {
                    Algorithm::SubSup => Method::SubSup,
                    Algorithm::SupSub => Method::SupSub,
                    Algorithm::ModMod => Method::ModMod,
                })
                .map_err(|_| {
                    format!("unknown method {s:?} (grf, grnf, subsup, supsub, modmod, all)")
                }),
        }
    }
}

/// Runs `method` and returns its selection. DS methods minimize the joint
/// (non-factored) objective; greedy ones use their own mode with no budget.
pub fn select(
    ds: Arc<Dataset>,
    cost: &CostModel,
    alpha: f64,
    method: Method,
    opts: &SolverOptions,
) -> Result<Subset> {
    let n = ds.features();
    let algo = match method {
        Method::GrF => return Ok(greedy_select(ds, cost.clone(), alpha, GreedyMode::GrF, n)?.set),
        Method::GrNF => return Ok(greedy_select(ds, cost.clone(), alpha, GreedyMode::GrNF, n)?.set),
        Method::SubSup => Algorithm::SubSup,
        Method::SupSub => Algorithm::SupSub,
        Method::ModMod => Algorithm::ModMod,
    };
    let obj = build_objective(ds, cost.clone(), alpha, MiMode::NonFactored)?;
    Ok(solve(&obj.instance, algo, opts, &crate::dsopt::Constraint::None)?.final_set())
}
