//! Seeded random instance generators used by the test suites and the CLI.

use rand::Rng;

use crate::spec::{ConcaveShape, FunctionSpec, Term, WeightedEdge};

/// One random submodular spec from a mix of the built-in families.
pub fn random_submodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    match rng.gen_range(0..5) {
        0 => random_cut(rng, n),
        1 => random_concave(rng, n),
        2 => random_facility(rng, n),
        3 => FunctionSpec::ScaledSum {
            terms: vec![
                Term {
                    coef: rng.gen_range(0.2..2.0),
                    spec: random_cut(rng, n),
                },
                Term {
                    coef: rng.gen_range(0.2..2.0),
                    spec: random_concave(rng, n),
                },
                Term {
                    coef: 1.0,
                    spec: random_modular(rng, n, 1.0),
                },
            ],
        },
        _ => FunctionSpec::ScaledSum {
            terms: vec![
                Term {
                    coef: 1.0,
                    spec: random_facility(rng, n),
                },
                Term {
                    coef: 1.0,
                    spec: random_modular(rng, n, 2.0),
                },
            ],
        },
    }
}

/// Random submodular function that is non-negative on every subset: cuts,
/// facility location and concave-of-modular terms with non-negative weights.
pub fn random_nonnegative_submodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    match rng.gen_range(0..3) {
        0 => random_cut(rng, n),
        1 => FunctionSpec::ScaledSum {
            terms: vec![
                Term {
                    coef: 1.0,
                    spec: random_cut(rng, n),
                },
                Term {
                    coef: rng.gen_range(0.1..1.0),
                    spec: random_concave(rng, n),
                },
            ],
        },
        _ => FunctionSpec::ScaledSum {
            terms: vec![
                Term {
                    coef: 1.0,
                    spec: random_cut(rng, n),
                },
                Term {
                    coef: rng.gen_range(0.1..1.0),
                    spec: random_facility(rng, n),
                },
            ],
        },
    }
}

pub fn random_modular<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> FunctionSpec {
    FunctionSpec::Modular {
        weights: (0..n).map(|_| rng.gen_range(-scale..scale)).collect(),
    }
}

/// Erdős–Rényi cut with edge probability 0.5 and uniform weights in (0.1, 2).
pub fn random_cut<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(0.5) {
                edges.push(WeightedEdge(a, b, rng.gen_range(0.1..2.0)));
            }
        }
    }
    FunctionSpec::GraphCut { nodes: n, edges }
}

pub fn random_concave<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    let shape = match rng.gen_range(0..4) {
        0 => ConcaveShape::Sqrt,
        1 => ConcaveShape::Log1p,
        2 => ConcaveShape::Power {
            exponent: rng.gen_range(0.2..0.9),
        },
        _ => ConcaveShape::Min {
            cap: rng.gen_range(0.5..n as f64 + 0.5),
        },
    };
    FunctionSpec::ConcaveOfModular {
        shape,
        weights: (0..n).map(|_| rng.gen_range(0.0..3.0)).collect(),
    }
}

pub fn random_facility<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    let clients = rng.gen_range(2..=n.max(2));
    FunctionSpec::FacilityLocation {
        benefits: (0..clients)
            .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect(),
    }
}

/// Random table with `v(∅) = 0`; almost surely not submodular.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FunctionSpec {
    let mut values: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    values[0] = 0.0;
    FunctionSpec::ExplicitTable { n, values }
}

/// A random pair `(f, g)` of submodular specs, both zero on the empty set.
pub fn random_ds_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (FunctionSpec, FunctionSpec) {
    let f = random_submodular(rng, n);
    let g = FunctionSpec::ScaledSum {
        terms: vec![
            Term {
                coef: rng.gen_range(0.5..3.0),
                spec: random_concave(rng, n),
            },
            Term {
                coef: 1.0,
                spec: random_facility(rng, n),
            },
        ],
    };
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::check_submodular;
    use crate::spec::build_function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_builtin_family_is_submodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=10 {
            for _ in 0..6 {
                let spec = random_submodular(&mut rng, n);
                assert!(spec.is_provably_submodular());
                assert!(
                    check_submodular(&build_function(&spec).unwrap()).unwrap(),
                    "{spec:?}"
                );
                let nn = random_nonnegative_submodular(&mut rng, n);
                assert!(check_submodular(&build_function(&nn).unwrap()).unwrap());
            }
        }
    }
}
