use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dsmin::bounds::{ds_decompose, modular_lower_bound, modular_upper_bound, UpperBound};
use dsmin::brute::{brute_force_minimize, check_submodular, tabulate};
use dsmin::dsopt::{
    local_optimality_check, solve, Algorithm, Constraint, DsInstance, SolverOptions,
};
use dsmin::featsel::{
    build_objective, empirical_entropy, evaluate_cost, informative_with_noise, mutual_information,
    CostModel, MiMode,
};
use dsmin::generate::{random_ds_pair, random_submodular};
use dsmin::sfm::min_norm_point;
use dsmin::{build_function, Oracle, Permutation, Subset};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn submodular(seed: u64, n: usize) -> Oracle {
    build_function(&random_submodular(&mut ChaCha8Rng::seed_from_u64(seed), n)).unwrap()
}

fn instance(seed: u64, n: usize) -> DsInstance {
    let (f, g) = random_ds_pair(&mut ChaCha8Rng::seed_from_u64(seed), n);
    DsInstance::new(build_function(&f).unwrap(), build_function(&g).unwrap()).unwrap()
}

fn permutation(seed: u64, n: usize) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37));
    Permutation::new(order).unwrap()
}

fn every_subset(n: usize) -> impl Iterator<Item = Subset> {
    (0..1u64 << n).map(move |m| Subset::from_mask(n, m))
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::SubSup),
        Just(Algorithm::SupSub),
        Just(Algorithm::ModMod)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lower_bound_is_below_and_tight_on_the_chain(seed in any::<u64>(), n in 1usize..=7) {
        let g = submodular(seed, n);
        let order = permutation(seed, n);
        let h = modular_lower_bound(&g, &order.prefix(n / 2), &order).unwrap();
        for s in every_subset(n) {
            prop_assert!(h.value(&s) <= g.eval(&s) + 1e-9);
        }
        for i in 0..=n {
            prop_assert!((h.value(&order.prefix(i)) - g.eval(&order.prefix(i))).abs() < 1e-9);
        }
    }

    #[test]
    fn upper_bounds_are_above_and_tight_at_the_point(seed in any::<u64>(), n in 1usize..=7, mask in any::<u64>()) {
        let f = submodular(seed, n);
        let x = Subset::from_mask(n, mask & ((1 << n) - 1));
        for variant in UpperBound::BOTH {
            let m = modular_upper_bound(&f, &x, variant);
            prop_assert!((m.value(&x) - f.eval(&x)).abs() < 1e-9);
            for s in every_subset(n) {
                prop_assert!(m.value(&s) >= f.eval(&s) - 1e-9);
            }
        }
    }

    #[test]
    fn surrogates_sandwich_the_objective(seed in any::<u64>(), n in 1usize..=6, mask in any::<u64>()) {
        let inst = instance(seed, n);
        let x = Subset::from_mask(n, mask & ((1 << n) - 1));
        let order = permutation(seed, n);
        let h = modular_lower_bound(&inst.g, &x, &order);
        // Any order works for the bound; only chains through x make it tight.
        let h = match h { Ok(h) => h, Err(_) => return Ok(()) };
        let m = modular_upper_bound(&inst.f, &x, UpperBound::First);
        for s in every_subset(n) {
            prop_assert!(m.value(&s) - h.value(&s) >= inst.value(&s) - 1e-9);
        }
    }

    #[test]
    fn min_norm_point_matches_brute_force(seed in any::<u64>(), n in 1usize..=8) {
        let f = submodular(seed, n);
        let got = min_norm_point(&f, 1e-10).unwrap();
        let (_, want) = brute_force_minimize(&f).unwrap();
        prop_assert!((got.value - want).abs() < 1e-6, "{} vs {}", got.value, want);
        prop_assert!((f.eval(&got.set) - got.value).abs() < 1e-9);
    }

    #[test]
    fn local_optimality_check_agrees_with_a_scan(seed in any::<u64>(), n in 1usize..=6, mask in any::<u64>()) {
        let v = instance(seed, n).v();
        let x = Subset::from_mask(n, mask & ((1 << n) - 1));
        let vx = v.eval(&x);
        let scan = (0..n).all(|j| {
            let y = if x.contains(j) { x.without(j) } else { x.with(j) };
            v.eval(&y) >= vx - 1e-9
        });
        prop_assert_eq!(local_optimality_check(&v, &x), scan);
    }

    #[test]
    fn solver_traces_descend_to_local_optima(seed in any::<u64>(), n in 1usize..=7, algo in algorithm()) {
        let inst = instance(seed, n);
        let opts = SolverOptions { seed, ..SolverOptions::default() };
        let trace = solve(&inst, algo, &opts, &Constraint::None).unwrap();
        prop_assert!(trace.is_monotone());
        for it in &trace.iterates {
            prop_assert!((it.value - inst.value(&it.set)).abs() < 1e-9);
        }
        prop_assert!(trace.locally_optimal);
        prop_assert!(local_optimality_check(&inst.v(), &trace.final_set()));
    }

    #[test]
    fn constrained_iterates_stay_feasible(seed in any::<u64>(), n in 2usize..=7, k in 0usize..=7, equal in any::<bool>()) {
        let k = k.min(n);
        let inst = instance(seed, n);
        let constraint = if equal { Constraint::CardinalityEq(k) } else { Constraint::CardinalityLe(k) };
        let algos: &[Algorithm] = if equal { &[Algorithm::ModMod] } else { &[Algorithm::SupSub, Algorithm::ModMod] };
        for &algo in algos {
            let trace = solve(&inst, algo, &SolverOptions::default(), &constraint).unwrap();
            prop_assert!(trace.is_monotone());
            for it in &trace.iterates {
                prop_assert!(constraint.is_feasible(&it.set), "{:?} {:?}", algo, it.set);
            }
        }
    }

    #[test]
    fn oracle_counts_every_evaluation(n in 1usize..=6, masks in proptest::collection::vec(any::<u64>(), 0..40)) {
        let work = Arc::new(AtomicU64::new(0));
        let counter = work.clone();
        let f = Oracle::from_fn(n, move |s| {
            counter.fetch_add(1, Ordering::Relaxed);
            s.len() as f64
        });
        let memo = f.memoized();
        let mut distinct = HashSet::new();
        for &m in &masks {
            let s = Subset::from_mask(n, m & ((1 << n) - 1));
            distinct.insert(s.mask());
            f.eval(&s);
            memo.eval(&s);
        }
        prop_assert_eq!(f.calls(), masks.len() as u64);
        prop_assert_eq!(memo.calls(), masks.len() as u64);
        prop_assert_eq!(work.load(Ordering::Relaxed), (masks.len() + distinct.len()) as u64);
    }

    #[test]
    fn decomposition_reconstructs_the_function(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        values[0] = 0.0;
        let v = build_function(&dsmin::FunctionSpec::ExplicitTable { n, values }).unwrap();
        let d = ds_decompose(&v, None).unwrap();
        prop_assert!(check_submodular(&d.f).unwrap());
        prop_assert!(check_submodular(&d.g).unwrap());
        let table = tabulate(&v).unwrap();
        for s in every_subset(n) {
            prop_assert!((d.f.eval(&s) - d.g.eval(&s) - table[s.mask() as usize]).abs() < 1e-9);
        }
    }

    #[test]
    fn partition_cost_is_submodular(seed in any::<u64>(), n in 1usize..=7, lambda in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); rng.gen_range(1..=n)];
        for j in 0..n {
            let b = rng.gen_range(0..blocks.len());
            blocks[b].push(j);
        }
        blocks.retain(|b| !b.is_empty());
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let cost = CostModel::partition_sqrt(n, blocks, weights, lambda).unwrap();
        prop_assert_eq!(evaluate_cost(&cost, &Subset::empty(n)), 0.0);
        prop_assert!(check_submodular(&cost.into_oracle(n)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn entropy_is_monotone_and_information_nonnegative(seed in any::<u64>(), noise in 1usize..5, mask in any::<u64>(), j in 0usize..6) {
        let ds = informative_with_noise(60, noise, 0.2, seed);
        let n = ds.features();
        let a = Subset::from_mask(n, mask & ((1 << n) - 1));
        let j = j % n;
        let h = empirical_entropy(&ds, &a, 0.0).unwrap();
        prop_assert!(empirical_entropy(&ds, &a.with(j), 0.0).unwrap() >= h - 1e-12);
        prop_assert!(mutual_information(&ds, &a, 0.0, MiMode::NonFactored).unwrap() >= -1e-12);
    }

    #[test]
    fn featsel_objective_matches_its_parts(seed in any::<u64>(), mask in any::<u64>(), lambda in 0.0f64..0.5, alpha in 0.0f64..2.0) {
        let ds = Arc::new(informative_with_noise(50, 3, 0.1, seed));
        let n = ds.features();
        let obj = build_objective(ds.clone(), CostModel::modular(lambda), alpha, MiMode::NonFactored).unwrap();
        prop_assert_eq!(obj.value(&Subset::empty(n)), 0.0);
        let a = Subset::from_mask(n, mask & ((1 << n) - 1));
        let mi = mutual_information(&ds, &a, alpha, MiMode::NonFactored).unwrap();
        prop_assert!((obj.value(&a) - (lambda * a.len() as f64 - mi)).abs() < 1e-9);
    }
}
