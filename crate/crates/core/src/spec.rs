//! Instance vocabulary: serializable descriptions of set functions.
//!
//! A [`FunctionSpec`] is the JSON form read by the CLI. Element and node
//! indices in the JSON are 1-based. Every kind except `explicit_table` builds
//! a function that is submodular by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::AffineModular;
use crate::oracle::{Oracle, SetFunction};
use crate::subset::Subset;

/// Largest ground set an `explicit_table` may describe.
pub const TABLE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ConcaveShape {
    Sqrt,
    Log1p,
    /// `t^exponent` with `0 < exponent <= 1`.
    Power {
        exponent: f64,
    },
    /// `min(t, cap)`.
    Min {
        cap: f64,
    },
}

impl ConcaveShape {
    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            ConcaveShape::Sqrt => t.sqrt(),
            ConcaveShape::Log1p => t.ln_1p(),
            ConcaveShape::Power { exponent } => t.powf(exponent),
            ConcaveShape::Min { cap } => t.min(cap),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ConcaveShape::Power { exponent } if !(exponent > 0.0 && exponent <= 1.0) => Err(
                Error::Domain(format!("power exponent {exponent} not in (0, 1]")),
            ),
            ConcaveShape::Min { cap } if cap.is_nan() || cap < 0.0 => {
                Err(Error::Domain(format!("negative cap {cap}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge(pub usize, pub usize, pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub spec: FunctionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FunctionSpec {
    /// `Σ_{j∈X} weights[j]`.
    Modular { weights: Vec<f64> },
    /// `shape(Σ_{j∈X} weights[j])` with non-negative weights.
    ConcaveOfModular {
        shape: ConcaveShape,
        weights: Vec<f64>,
    },
    /// Total weight of edges with exactly one endpoint in `X`; the ground set is the node set.
    GraphCut {
        nodes: usize,
        edges: Vec<WeightedEdge>,
    },
    /// `Σ_i max_{j∈X} benefits[i][j]` (0 for the empty set); one row per client.
    FacilityLocation { benefits: Vec<Vec<f64>> },
    /// `values[mask]` where bit `j-1` of `mask` marks element `j`.
    ExplicitTable { n: usize, values: Vec<f64> },
    /// `Σ coef_i · spec_i(X)` with non-negative coefficients.
    ScaledSum { terms: Vec<Term> },
}

impl FunctionSpec {
    pub fn modular(weights: Vec<f64>) -> Self {
        FunctionSpec::Modular { weights }
    }

    pub fn sqrt_cardinality(n: usize) -> Self {
        FunctionSpec::ConcaveOfModular {
            shape: ConcaveShape::Sqrt,
            weights: vec![1.0; n],
        }
    }

    /// Unit-weight graph cut from 1-based node pairs.
    pub fn unit_cut(nodes: usize, edges: &[(usize, usize)]) -> Self {
        FunctionSpec::GraphCut {
            nodes,
            edges: edges
                .iter()
                .map(|&(a, b)| WeightedEdge(a, b, 1.0))
                .collect(),
        }
    }

    pub fn scaled(coef: f64, spec: FunctionSpec) -> Self {
        FunctionSpec::ScaledSum {
            terms: vec![Term { coef, spec }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Ground-set size implied by the spec.
    pub fn n(&self) -> Result<usize> {
        let n = match self {
            FunctionSpec::Modular { weights } | FunctionSpec::ConcaveOfModular { weights, .. } => {
                weights.len()
            }
            FunctionSpec::GraphCut { nodes, .. } => *nodes,
            FunctionSpec::FacilityLocation { benefits } => benefits
                .first()
                .map(Vec::len)
                .ok_or_else(|| Error::Parse("facility_location has no clients".into()))?,
            FunctionSpec::ExplicitTable { n, .. } => *n,
            FunctionSpec::ScaledSum { terms } => {
                let first = terms
                    .first()
                    .ok_or_else(|| Error::Parse("scaled_sum has no terms".into()))?;
                first.spec.n()?
            }
        };
        if n == 0 {
            return Err(Error::Parse("empty ground set".into()));
        }
        Ok(n)
    }

    /// Whether the kind guarantees submodularity without checking.
    pub fn is_provably_submodular(&self) -> bool {
        match self {
            FunctionSpec::ExplicitTable { .. } => false,
            FunctionSpec::ScaledSum { terms } => {
                terms.iter().all(|t| t.spec.is_provably_submodular())
            }
            _ => true,
        }
    }

    fn validate(&self) -> Result<usize> {
        let n = self.n()?;
        let finite = |xs: &[f64], what: &str| {
            if xs.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::Parse(format!("non-finite {what}")))
            }
        };
        match self {
            FunctionSpec::Modular { weights } => finite(weights, "weight")?,
            FunctionSpec::ConcaveOfModular { shape, weights } => {
                finite(weights, "weight")?;
                shape.validate()?;
                if let Some(w) = weights.iter().find(|&&w| w < 0.0) {
                    return Err(Error::Domain(format!(
                        "concave_of_modular weight {w} is negative"
                    )));
                }
            }
            FunctionSpec::GraphCut { nodes, edges } => {
                for WeightedEdge(a, b, w) in edges {
                    if *a == 0 || *b == 0 || a > nodes || b > nodes {
                        return Err(Error::Parse(format!(
                            "edge ({a}, {b}) outside nodes 1..={nodes}"
                        )));
                    }
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::Domain(format!(
                            "edge ({a}, {b}) has invalid weight {w}"
                        )));
                    }
                }
            }
            FunctionSpec::FacilityLocation { benefits } => {
                for row in benefits {
                    if row.len() != n {
                        return Err(Error::Parse(format!(
                            "benefit row of length {} != {n}",
                            row.len()
                        )));
                    }
                    finite(row, "benefit")?;
                    if row.iter().any(|&b| b < 0.0) {
                        return Err(Error::Domain("negative facility benefit".into()));
                    }
                }
            }
            FunctionSpec::ExplicitTable { n, values } => {
                if *n > TABLE_LIMIT {
                    return Err(Error::TooLarge {
                        n: *n,
                        limit: TABLE_LIMIT,
                    });
                }
                if values.len() != 1usize << n {
                    return Err(Error::Parse(format!(
                        "table for n = {n} needs {} values, got {}",
                        1usize << n,
                        values.len()
                    )));
                }
                finite(values, "table value")?;
            }
            FunctionSpec::ScaledSum { terms } => {
                for t in terms {
                    if !(t.coef.is_finite() && t.coef >= 0.0) {
                        return Err(Error::Domain(format!(
                            "scaled_sum coefficient {} must be >= 0",
                            t.coef
                        )));
                    }
                    if t.spec.validate()? != n {
                        return Err(Error::Parse("scaled_sum terms disagree on n".into()));
                    }
                }
            }
        }
        Ok(n)
    }
}

struct ConcaveOfModular {
    shape: ConcaveShape,
    weights: Vec<f64>,
}

impl SetFunction for ConcaveOfModular {
    fn n(&self) -> usize {
        self.weights.len()
    }
    fn eval(&self, s: &Subset) -> f64 {
        self.shape.apply(s.iter().map(|j| self.weights[j]).sum())
    }
}

struct GraphCut {
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl SetFunction for GraphCut {
    fn n(&self) -> usize {
        self.nodes
    }
    fn eval(&self, s: &Subset) -> f64 {
        self.edges
            .iter()
            .filter(|(a, b, _)| s.contains(*a) != s.contains(*b))
            .map(|e| e.2)
            .sum()
    }
}

struct FacilityLocation {
    n: usize,
    benefits: Vec<Vec<f64>>,
}

impl SetFunction for FacilityLocation {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: &Subset) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        self.benefits
            .iter()
            .map(|row| s.iter().map(|j| row[j]).fold(f64::NEG_INFINITY, f64::max))
            .sum()
    }
}

struct Table {
    n: usize,
    values: Vec<f64>,
}

impl SetFunction for Table {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: &Subset) -> f64 {
        self.values[s.mask() as usize]
    }
}

struct ScaledSum {
    n: usize,
    terms: Vec<(f64, Box<dyn SetFunction>)>,
}

impl SetFunction for ScaledSum {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: &Subset) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.eval(s)).sum()
    }
}

fn build_raw(spec: &FunctionSpec) -> Box<dyn SetFunction> {
    match spec {
        FunctionSpec::Modular { weights } => Box::new(AffineModular::linear(weights.clone())),
        FunctionSpec::ConcaveOfModular { shape, weights } => Box::new(ConcaveOfModular {
            shape: *shape,
            weights: weights.clone(),
        }),
        FunctionSpec::GraphCut { nodes, edges } => Box::new(GraphCut {
            nodes: *nodes,
            edges: edges
                .iter()
                .map(|WeightedEdge(a, b, w)| (a - 1, b - 1, *w))
                .collect(),
        }),
        FunctionSpec::FacilityLocation { benefits } => Box::new(FacilityLocation {
            n: benefits[0].len(),
            benefits: benefits.clone(),
        }),
        FunctionSpec::ExplicitTable { n, values } => Box::new(Table {
            n: *n,
            values: values.clone(),
        }),
        FunctionSpec::ScaledSum { terms } => Box::new(ScaledSum {
            n: terms[0].spec.n().expect("validated"),
            terms: terms.iter().map(|t| (t.coef, build_raw(&t.spec))).collect(),
        }),
    }
}

struct Boxed(Box<dyn SetFunction>);

impl SetFunction for Boxed {
    fn n(&self) -> usize {
        self.0.n()
    }
    fn eval(&self, s: &Subset) -> f64 {
        self.0.eval(s)
    }
}

/// Builds the oracle a spec describes.
pub fn build_function(spec: &FunctionSpec) -> Result<Oracle> {
    spec.validate()?;
    Ok(Oracle::new(Boxed(build_raw(spec))))
}

/// Tabulates any oracle (n ≤ [`TABLE_LIMIT`]) into an `explicit_table` spec.
pub fn table_spec(f: &Oracle) -> Result<FunctionSpec> {
    let n = f.n();
    if n > TABLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: TABLE_LIMIT,
        });
    }
    Ok(FunctionSpec::ExplicitTable {
        n,
        values: crate::brute::tabulate(f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::check_submodular;

    fn set(n: usize, one_based: &[usize]) -> Subset {
        Subset::from_one_based(n, one_based).unwrap()
    }

    #[test]
    fn modular_spec() {
        let f = build_function(&FunctionSpec::modular(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(f.eval(&set(3, &[2, 3])), 5.0);
    }

    #[test]
    fn triangle_cut_spec() {
        let f = build_function(&FunctionSpec::unit_cut(3, &[(1, 2), (1, 3), (2, 3)])).unwrap();
        assert_eq!(f.eval(&set(3, &[1])), 2.0);
        assert_eq!(f.eval(&Subset::full(3)), 0.0);
    }

    #[test]
    fn scaled_sum_spec() {
        let spec = FunctionSpec::scaled(2.0, FunctionSpec::sqrt_cardinality(4));
        let f = build_function(&spec).unwrap();
        for k in 0..=4 {
            let s = Subset::from_indices(4, 0..k).unwrap();
            assert!((f.eval(&s) - 2.0 * (k as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"kind":"scaled_sum","terms":[
            {"coef":1.0,"spec":{"kind":"graph_cut","nodes":3,"edges":[[1,2,1.0],[2,3,0.5]]}},
            {"coef":0.5,"spec":{"kind":"concave_of_modular","shape":{"type":"power","exponent":0.5},"weights":[1,2,3]}}]}"#;
        let spec = FunctionSpec::from_json(text).unwrap();
        assert_eq!(spec.n().unwrap(), 3);
        let back = FunctionSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);
        assert!(check_submodular(&build_function(&spec).unwrap()).unwrap());

        let bad_edge = FunctionSpec::unit_cut(3, &[(1, 4)]);
        assert!(matches!(build_function(&bad_edge), Err(Error::Parse(_))));
        let neg = FunctionSpec::ConcaveOfModular {
            shape: ConcaveShape::Sqrt,
            weights: vec![1.0, -1.0],
        };
        assert!(matches!(build_function(&neg), Err(Error::Domain(_))));
        let short = FunctionSpec::ExplicitTable {
            n: 2,
            values: vec![0.0; 3],
        };
        assert!(build_function(&short).is_err());
        assert!(FunctionSpec::from_json(r#"{"kind":"nope"}"#).is_err());
    }

    #[test]
    fn facility_location_and_table() {
        let spec = FunctionSpec::FacilityLocation {
            benefits: vec![vec![1.0, 3.0], vec![2.0, 0.0]],
        };
        let f = build_function(&spec).unwrap();
        assert_eq!(f.eval(&Subset::empty(2)), 0.0);
        assert_eq!(f.eval(&set(2, &[1])), 3.0);
        assert_eq!(f.eval(&Subset::full(2)), 5.0);
        let t = build_function(&table_spec(&f).unwrap()).unwrap();
        assert_eq!(t.eval(&set(2, &[2])), 3.0);
    }
}
