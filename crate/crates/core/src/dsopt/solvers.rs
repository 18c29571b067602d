use std::time::Instant;

use thiserror::Error;

use super::{
    accept_step, boundary_permutation, choose_permutation, local_optimality_check,
    modular_minimize_constrained, Algorithm, Constraint, DsInstance, Iterate, OptimizationTrace,
    PermutationHeuristic, SolverOptions, Termination, UpperBoundStrategy,
};
use crate::bounds::{modular_lower_bound, modular_upper_bound, UpperBound};
use crate::brute::brute_force_maximize_where;
use crate::error::{Error, Result};
use crate::modular::AffineModular;
use crate::oracle::Oracle;
use crate::sfmax::{greedy_cardinality_max, local_search_max_bounded, MaxSolver};
use crate::subset::{Permutation, Subset};

/// Decrease below which a candidate does not count as progress. Keeps runs
/// from cycling between sets of equal value.
const STRICT: f64 = 1e-12;
/// Surrogate weights at or below this count as zero for the largest minimizer.
const ZERO_WEIGHT: f64 = 1e-12;

/// A run that stopped on an error, with the iterates accepted before it.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct SolveFailure {
    #[source]
    pub error: Error,
    pub partial: OptimizationTrace,
}

impl From<SolveFailure> for Error {
    fn from(f: SolveFailure) -> Self {
        f.error
    }
}

fn iteration_seed(seed: u64, iter: usize) -> u64 {
    seed ^ (iter as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn variants(strategy: UpperBoundStrategy, iter: usize) -> Vec<UpperBound> {
    match strategy {
        UpperBoundStrategy::BestOfBoth => UpperBound::BOTH.to_vec(),
        UpperBoundStrategy::Alternate if iter % 2 == 1 => vec![UpperBound::First],
        UpperBoundStrategy::Alternate => vec![UpperBound::Second],
    }
}

/// Fallback search from a stalled iterate; `offer` returns true once a candidate is taken.
type Sweep<'s> = dyn FnMut(&Subset, usize, &mut dyn FnMut(Subset) -> bool) -> Result<()> + 's;

struct Descent<'a> {
    inst: &'a DsInstance,
    opts: &'a SolverOptions,
    constraint: &'a Constraint,
    trace: OptimizationTrace,
    base_calls: u64,
    clock: Instant,
    x: Subset,
    vx: f64,
    moved: Option<(Subset, f64)>,
    epsilon_blocked: bool,
    /// Equal-value sets visited since the last strict decrease, the current one last.
    plateau: Vec<(Subset, f64)>,
    sideways: Option<(Subset, f64)>,
}

impl<'a> Descent<'a> {
    fn new(
        inst: &'a DsInstance,
        opts: &'a SolverOptions,
        constraint: &'a Constraint,
        algo: Algorithm,
    ) -> Self {
        let n = inst.n();
        Self {
            inst,
            opts,
            constraint,
            trace: OptimizationTrace::new(algo, n),
            base_calls: inst.calls(),
            clock: Instant::now(),
            x: Subset::empty(n),
            vx: 0.0,
            moved: None,
            epsilon_blocked: false,
            plateau: Vec::new(),
            sideways: None,
        }
    }

    fn fail(&self, error: Error) -> SolveFailure {
        SolveFailure {
            error,
            partial: self.trace.clone(),
        }
    }

    fn record(&mut self) {
        let elapsed_ms = self
            .opts
            .record_time
            .then(|| self.clock.elapsed().as_secs_f64() * 1e3);
        self.trace.iterates.push(Iterate {
            set: self.x.clone(),
            value: self.vx,
            oracle_calls: self.inst.calls() - self.base_calls,
            elapsed_ms,
        });
    }

    /// Evaluates a candidate; returns true once a step has been accepted.
    fn offer(&mut self, cand: Subset) -> bool {
        if self.moved.is_some() {
            return true;
        }
        if !self.constraint.is_feasible(&cand) || cand == self.x {
            return false;
        }
        let vc = self.inst.value(&cand);
        if vc < self.vx - STRICT {
            if accept_step(self.vx, vc, self.opts.epsilon) {
                self.moved = Some((cand, vc));
                return true;
            }
            self.epsilon_blocked = true;
        } else if self.opts.epsilon == 0.0
            && vc <= self.vx
            && self.sideways.is_none()
            && self.plateau.len() <= self.inst.n()
            && !self.plateau.iter().any(|(s, _)| *s == cand)
        {
            self.sideways = Some((cand, vc));
        }
        false
    }

    /// Offers the best of several candidates (lowest value, then canonical order).
    fn offer_best(&mut self, cands: Vec<Subset>) -> bool {
        let mut best: Option<(Subset, f64)> = None;
        for c in cands {
            if !self.constraint.is_feasible(&c) || c == self.x {
                continue;
            }
            let v = self.inst.value(&c);
            let better = match &best {
                None => true,
                Some((bs, bv)) => v < *bv || (v == *bv && c.canonical_cmp(bs).is_lt()),
            };
            if better {
                best = Some((c, v));
            }
        }
        best.is_some_and(|(c, _)| self.offer(c))
    }

    /// Starting point: `∅` when feasible, else the best feasible primary candidate from `∅`.
    fn start(
        &mut self,
        primary: &mut dyn FnMut(&Subset, usize) -> Result<Vec<Subset>>,
    ) -> Result<()> {
        if !self.constraint.is_feasible(&self.x) {
            let cands = primary(&self.x, 0)?;
            let best = cands
                .into_iter()
                .filter(|c| self.constraint.is_feasible(c))
                .map(|c| {
                    let v = self.inst.value(&c);
                    (c, v)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.canonical_cmp(&b.0)))
                .ok_or_else(|| Error::Infeasible("no feasible starting point".into()))?;
            self.x = best.0;
            self.vx = best.1;
        }
        self.plateau = vec![(self.x.clone(), self.vx)];
        self.record();
        Ok(())
    }

    /// Ends on the canonically smallest plateau set with the current value.
    fn settle_on_plateau(&mut self) {
        let vx = self.vx;
        let smallest = self
            .plateau
            .iter()
            .filter(|(_, v)| *v == vx)
            .map(|(s, _)| s)
            .min_by(|a, b| a.canonical_cmp(b))
            .cloned();
        if let Some(s) = smallest.filter(|s| *s != self.x) {
            self.x = s;
            self.record();
        }
    }

    fn run(
        mut self,
        primary: &mut dyn FnMut(&Subset, usize) -> Result<Vec<Subset>>,
        sweep: &mut Sweep<'_>,
    ) -> std::result::Result<OptimizationTrace, SolveFailure> {
        if let Err(e) = self.start(primary) {
            return Err(self.fail(e));
        }
        let mut termination = Termination::IterCap;
        for iter in 1..=self.opts.max_iters {
            self.moved = None;
            self.sideways = None;
            self.epsilon_blocked = false;
            let cands = match primary(&self.x, iter) {
                Ok(c) => c,
                Err(e) => return Err(self.fail(e)),
            };
            if !self.offer_best(cands) {
                let x = self.x.clone();
                if let Err(e) = sweep(&x, iter, &mut |c| self.offer(c)) {
                    return Err(self.fail(e));
                }
            }
            if let Some((set, value)) = self.moved.take() {
                self.x = set;
                self.vx = value;
                self.plateau = vec![(self.x.clone(), value)];
                self.record();
            } else if let Some((set, value)) = self.sideways.take() {
                // Every set on the plateau was fully swept before leaving it.
                self.x = set;
                self.vx = value;
                self.plateau.push((self.x.clone(), value));
                self.record();
            } else {
                termination = if self.epsilon_blocked {
                    Termination::EpsilonStop
                } else {
                    Termination::Converged
                };
                self.settle_on_plateau();
                break;
            }
        }
        self.trace.termination = termination;
        self.trace.locally_optimal = local_optimality_check(&self.inst.v(), &self.x);
        Ok(self.trace)
    }
}

fn scorer(inst: &DsInstance, heuristic: PermutationHeuristic) -> Oracle {
    match heuristic {
        PermutationHeuristic::VGain => inst.v(),
        _ => inst.g.clone(),
    }
}

/// Base chain for iteration `iter`, from the configured heuristic.
fn base_order(inst: &DsInstance, opts: &SolverOptions, x: &Subset, iter: usize) -> Permutation {
    choose_permutation(
        opts.heuristic,
        x,
        &scorer(inst, opts.heuristic),
        iteration_seed(opts.seed, iter),
    )
}

/// Repeated exact minimization of `f - h`, `h` a modular lower bound of `g`.
/// Unconstrained only.
pub fn sub_sup(
    inst: &DsInstance,
    opts: &SolverOptions,
) -> std::result::Result<OptimizationTrace, SolveFailure> {
    let descent = Descent::new(inst, opts, &Constraint::None, Algorithm::SubSup);
    let surrogate_min = |x: &Subset, order: &Permutation| -> Result<Subset> {
        let h = modular_lower_bound(&inst.g, x, order)?;
        let surrogate = inst.f.minus(&h.into_oracle());
        Ok(opts.sfm.minimize(&surrogate)?.0)
    };
    let mut primary = |x: &Subset, iter: usize| -> Result<Vec<Subset>> {
        Ok(vec![surrogate_min(x, &base_order(inst, opts, x, iter))?])
    };
    let mut sweep =
        |x: &Subset, iter: usize, offer: &mut dyn FnMut(Subset) -> bool| -> Result<()> {
            let seed = iteration_seed(opts.seed, iter);
            for heuristic in [PermutationHeuristic::GGain, PermutationHeuristic::VGain] {
                if heuristic != opts.heuristic {
                    let order = choose_permutation(heuristic, x, &scorer(inst, heuristic), seed);
                    if offer(surrogate_min(x, &order)?) {
                        return Ok(());
                    }
                }
            }
            let base = base_order(inst, opts, x, iter);
            for j in 0..inst.n() {
                if offer(surrogate_min(x, &boundary_permutation(&base, x, j))?) {
                    return Ok(());
                }
            }
            Ok(())
        };
    descent.run(&mut primary, &mut sweep)
}

/// Approximate maximization of `g - m` under an optional cardinality cap.
fn maximize_surrogate(
    obj: &Oracle,
    maximizer: &MaxSolver,
    cap: Option<usize>,
    seed: u64,
) -> Result<Subset> {
    match (cap, maximizer) {
        (None, _) => Ok(maximizer.maximize(obj, seed)?.set),
        (Some(k), MaxSolver::BruteForce) => Ok(brute_force_maximize_where(obj, |s| s.len() <= k)?
            .expect("the empty set satisfies a cardinality cap")
            .0),
        (Some(k), MaxSolver::DoubleGreedy(_)) => {
            let greedy = greedy_cardinality_max(obj, k);
            Ok(local_search_max_bounded(obj, &greedy.set, Some(k)).set)
        }
    }
}

/// Repeated approximate maximization of `g - m`, `m` a modular upper bound of
/// `f`. Supports `Constraint::None` and `Constraint::CardinalityLe`.
pub fn sup_sub(
    inst: &DsInstance,
    opts: &SolverOptions,
    constraint: &Constraint,
) -> std::result::Result<OptimizationTrace, SolveFailure> {
    let descent = Descent::new(inst, opts, constraint, Algorithm::SupSub);
    let cap = match constraint {
        Constraint::None => None,
        Constraint::CardinalityLe(k) => Some(*k),
        other => {
            return Err(descent.fail(Error::Domain(format!(
                "supsub supports no constraint or cardinality_le, got {other:?}"
            ))));
        }
    };
    let objective = |x: &Subset, variant: UpperBound| -> Oracle {
        inst.g
            .minus(&modular_upper_bound(&inst.f, x, variant).into_oracle())
    };
    let mut primary = |x: &Subset, iter: usize| -> Result<Vec<Subset>> {
        variants(opts.ub_strategy, iter)
            .into_iter()
            .map(|variant| {
                maximize_surrogate(
                    &objective(x, variant),
                    &opts.maximizer,
                    cap,
                    iteration_seed(opts.seed, iter),
                )
            })
            .collect()
    };
    // Local search from the iterate under each bound: when neither moves,
    // the iterate is a local maximum of both surrogates.
    let mut sweep =
        |x: &Subset, _iter: usize, offer: &mut dyn FnMut(Subset) -> bool| -> Result<()> {
            for variant in UpperBound::BOTH {
                if offer(local_search_max_bounded(&objective(x, variant), x, cap).set) {
                    break;
                }
            }
            Ok(())
        };
    descent.run(&mut primary, &mut sweep)
}

/// Repeated exact minimization of the modular surrogate `m - h` under `constraint`.
pub fn mod_mod(
    inst: &DsInstance,
    opts: &SolverOptions,
    constraint: &Constraint,
) -> std::result::Result<OptimizationTrace, SolveFailure> {
    let descent = Descent::new(inst, opts, constraint, Algorithm::ModMod);
    if let Err(e) = constraint.validate(inst.n()) {
        return Err(descent.fail(e));
    }
    let upper = |x: &Subset, variant: UpperBound| modular_upper_bound(&inst.f, x, variant);
    let minimize =
        |m: &AffineModular, h: &AffineModular| modular_minimize_constrained(&m.sub(h), constraint);
    let mut primary = |x: &Subset, iter: usize| -> Result<Vec<Subset>> {
        let h = modular_lower_bound(&inst.g, x, &base_order(inst, opts, x, iter))?;
        let mut cands = Vec::new();
        for variant in variants(opts.ub_strategy, iter) {
            let surrogate = upper(x, variant).sub(&h);
            cands.push(modular_minimize_constrained(&surrogate, constraint)?);
            if constraint.is_none() {
                // Largest minimizer: also takes the zero-weight elements.
                let n = inst.n();
                cands.push(Subset::from_indices(
                    n,
                    (0..n).filter(|&j| surrogate.weights[j] <= ZERO_WEIGHT),
                )?);
            }
        }
        Ok(cands)
    };
    let mut sweep =
        |x: &Subset, iter: usize, offer: &mut dyn FnMut(Subset) -> bool| -> Result<()> {
            let bounds = [upper(x, UpperBound::First), upper(x, UpperBound::Second)];
            let base = base_order(inst, opts, x, iter);
            for j in 0..inst.n() {
                let h = modular_lower_bound(&inst.g, x, &boundary_permutation(&base, x, j))?;
                for m in &bounds {
                    if offer(minimize(m, &h)?) {
                        return Ok(());
                    }
                }
            }
            Ok(())
        };
    descent.run(&mut primary, &mut sweep)
}

/// Dispatches to one of the three procedures.
pub fn solve(
    inst: &DsInstance,
    algorithm: Algorithm,
    opts: &SolverOptions,
    constraint: &Constraint,
) -> std::result::Result<OptimizationTrace, SolveFailure> {
    match algorithm {
        Algorithm::SubSup if !constraint.is_none() => Err(SolveFailure {
            error: Error::Domain("subsup does not support constraints".into()),
            partial: OptimizationTrace::new(algorithm, inst.n()),
        }),
        Algorithm::SubSup => sub_sup(inst, opts),
        Algorithm::SupSub => sup_sub(inst, opts, constraint),
        Algorithm::ModMod => mod_mod(inst, opts, constraint),
    }
}
