//! Combinatorial constraints and exact minimization of modular functions under them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::AffineModular;
use crate::subset::Subset;

/// Largest knapsack budget the dynamic program accepts.
pub const KNAPSACK_BUDGET_LIMIT: u64 = 10_000_000;

/// Feasible-set families. Elements, blocks and graph nodes are 0-based here;
/// the JSON form ([`ConstraintSpec`]) is 1-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Constraint {
    #[default]
    None,
    CardinalityLe(usize),
    CardinalityEq(usize),
    /// At most `quotas[i]` elements from `blocks[i]`; elements in no block are free.
    PartitionMatroid {
        blocks: Vec<Vec<usize>>,
        quotas: Vec<usize>,
    },
    /// Ground element `j` is edge `edges[j]`; feasible sets are spanning trees.
    SpanningTree {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Non-negative integer costs with a budget.
    Knapsack {
        costs: Vec<u64>,
        budget: u64,
    },
}

/// JSON form of [`Constraint`], 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ConstraintSpec {
    None,
    CardinalityLe {
        k: usize,
    },
    CardinalityEq {
        k: usize,
    },
    PartitionMatroid {
        blocks: Vec<Vec<usize>>,
        quotas: Vec<usize>,
    },
    SpanningTree {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    },
    Knapsack {
        costs: Vec<f64>,
        budget: f64,
    },
}

fn one_based(label: usize, upper: usize, what: &str) -> Result<usize> {
    if label == 0 || label > upper {
        Err(Error::Parse(format!("{what} {label} outside 1..={upper}")))
    } else {
        Ok(label - 1)
    }
}

fn integral(x: f64, what: &str) -> Result<u64> {
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(Error::Domain(format!(
            "knapsack {what} {x} is not a non-negative integer"
        )))
    }
}

impl ConstraintSpec {
    pub fn into_constraint(self, n: usize) -> Result<Constraint> {
        let c = match self {
            ConstraintSpec::None => Constraint::None,
            ConstraintSpec::CardinalityLe { k } => Constraint::CardinalityLe(k),
            ConstraintSpec::CardinalityEq { k } => Constraint::CardinalityEq(k),
            ConstraintSpec::PartitionMatroid { blocks, quotas } => Constraint::PartitionMatroid {
                blocks: blocks
                    .into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|j| one_based(j, n, "element"))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?,
                quotas,
            },
            ConstraintSpec::SpanningTree { nodes, edges } => Constraint::SpanningTree {
                nodes,
                edges: edges
                    .into_iter()
                    .map(|(a, b)| Ok((one_based(a, nodes, "node")?, one_based(b, nodes, "node")?)))
                    .collect::<Result<_>>()?,
            },
            ConstraintSpec::Knapsack { costs, budget } => Constraint::Knapsack {
                costs: costs
                    .iter()
                    .map(|&c| integral(c, "cost"))
                    .collect::<Result<_>>()?,
                budget: integral(budget, "budget")?,
            },
        };
        c.validate(n)?;
        Ok(c)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

impl Constraint {
    pub fn is_none(&self) -> bool {
        matches!(self, Constraint::None)
    }

    /// Checks the constraint is well formed over `n` elements and has a feasible set.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Constraint::None | Constraint::CardinalityLe(_) => Ok(()),
            Constraint::CardinalityEq(k) => {
                if *k > n {
                    Err(Error::Infeasible(format!(
                        "cardinality {k} exceeds n = {n}"
                    )))
                } else {
                    Ok(())
                }
            }
            Constraint::PartitionMatroid { blocks, quotas } => {
                if blocks.len() != quotas.len() {
                    return Err(Error::Parse(format!(
                        "{} blocks but {} quotas",
                        blocks.len(),
                        quotas.len()
                    )));
                }
                let mut seen = vec![false; n];
                for &j in blocks.iter().flatten() {
                    if j >= n {
                        return Err(Error::Parse(format!(
                            "block element {} outside 1..={n}",
                            j + 1
                        )));
                    }
                    if seen[j] {
                        return Err(Error::Parse(format!(
                            "element {} appears in two blocks",
                            j + 1
                        )));
                    }
                    seen[j] = true;
                }
                Ok(())
            }
            Constraint::SpanningTree { nodes, edges } => {
                if edges.len() != n {
                    return Err(Error::Parse(format!(
                        "{} edges for a ground set of {n}",
                        edges.len()
                    )));
                }
                if *nodes == 0 {
                    return Err(Error::Parse("spanning tree over zero nodes".into()));
                }
                let mut uf = UnionFind::new(*nodes);
                let mut components = *nodes;
                for &(a, b) in edges {
                    if a >= *nodes || b >= *nodes {
                        return Err(Error::Parse(format!(
                            "edge ({}, {}) outside 1..={nodes}",
                            a + 1,
                            b + 1
                        )));
                    }
                    if uf.union(a, b) {
                        components -= 1;
                    }
                }
                if components != 1 {
                    return Err(Error::Infeasible("graph is disconnected".into()));
                }
                Ok(())
            }
            Constraint::Knapsack { costs, budget } => {
                if costs.len() != n {
                    return Err(Error::Parse(format!(
                        "{} costs for a ground set of {n}",
                        costs.len()
                    )));
                }
                if *budget > KNAPSACK_BUDGET_LIMIT {
                    return Err(Error::TooLarge {
                        n: *budget as usize,
                        limit: KNAPSACK_BUDGET_LIMIT as usize,
                    });
                }
                Ok(())
            }
        }
    }

    pub fn is_feasible(&self, s: &Subset) -> bool {
        match self {
            Constraint::None => true,
            Constraint::CardinalityLe(k) => s.len() <= *k,
            Constraint::CardinalityEq(k) => s.len() == *k,
            Constraint::PartitionMatroid { blocks, quotas } => blocks
                .iter()
                .zip(quotas)
                .all(|(b, &q)| b.iter().filter(|&&j| s.contains(j)).count() <= q),
            Constraint::SpanningTree { nodes, edges } => {
                if s.len() + 1 != *nodes {
                    return false;
                }
                let mut uf = UnionFind::new(*nodes);
                s.iter().all(|j| uf.union(edges[j].0, edges[j].1))
            }
            Constraint::Knapsack { costs, budget } => {
                s.iter().map(|j| costs[j]).sum::<u64>() <= *budget
            }
        }
    }
}

fn ascending(weights: &[f64], items: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = items.into_iter().collect();
    v.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    v
}

/// Exact minimizer of an affine modular function over the feasible sets.
///
/// Only weights matter (the offset is constant). Ties go to lower indices, and
/// under `None`, `CardinalityLe` and the partition matroid only strictly
/// negative weights are taken, which gives the smallest minimizer.
pub fn modular_minimize_constrained(m: &AffineModular, constraint: &Constraint) -> Result<Subset> {
    let n = m.n();
    let w = &m.weights;
    constraint.validate(n)?;
    let negatives = || (0..n).filter(|&j| w[j] < 0.0);
    let set = match constraint {
        Constraint::None => Subset::from_indices(n, negatives())?,
        Constraint::CardinalityLe(k) => {
            Subset::from_indices(n, ascending(w, negatives()).into_iter().take(*k))?
        }
        Constraint::CardinalityEq(k) => {
            Subset::from_indices(n, ascending(w, 0..n).into_iter().take(*k))?
        }
        Constraint::PartitionMatroid { blocks, quotas } => {
            let mut s = Subset::from_indices(n, negatives())?;
            for (block, &q) in blocks.iter().zip(quotas) {
                let chosen = ascending(w, block.iter().copied().filter(|&j| w[j] < 0.0));
                for &j in block {
                    s.remove(j);
                }
                for &j in chosen.iter().take(q) {
                    s.insert(j);
                }
            }
            s
        }
        Constraint::SpanningTree { nodes, edges } => {
            let mut uf = UnionFind::new(*nodes);
            let mut s = Subset::empty(n);
            for j in ascending(w, 0..n) {
                if uf.union(edges[j].0, edges[j].1) {
                    s.insert(j);
                }
            }
            s
        }
        Constraint::Knapsack { costs, budget } => knapsack_min(w, costs, *budget),
    };
    debug_assert!(constraint.is_feasible(&set));
    Ok(set)
}

/// 0/1 knapsack over the negative-weight items, minimizing total weight.
fn knapsack_min(w: &[f64], costs: &[u64], budget: u64) -> Subset {
    let n = w.len();
    let cap = budget as usize;
    let items: Vec<usize> = (0..n).filter(|&j| w[j] < 0.0).collect();
    // best[b]: least total weight with cost at most b.
    let mut best = vec![0.0f64; cap + 1];
    let mut take = vec![vec![false; cap + 1]; items.len()];
    for (i, &j) in items.iter().enumerate() {
        let c = costs[j] as usize;
        if c > cap {
            continue;
        }
        for b in (c..=cap).rev() {
            let cand = best[b - c] + w[j];
            if cand < best[b] {
                best[b] = cand;
                take[i][b] = true;
            }
        }
    }
    let mut s = Subset::empty(n);
    let mut b = cap;
    for (i, &j) in items.iter().enumerate().rev() {
        if take[i][b] {
            s.insert(j);
            b -= costs[j] as usize;
        }
    }
    s
}
