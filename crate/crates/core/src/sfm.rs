//! Exact submodular minimization by the Fujishige–Wolfe minimum-norm-point
//! algorithm, and the greedy linear oracle over the base polytope.

use nalgebra::{DMatrix, DVector};

use crate::brute::brute_force_minimize;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::subset::{Permutation, Subset};

/// Default convergence tolerance for [`min_norm_point`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Active vertices whose convex coefficient falls below this are dropped.
const DROP: f64 = 1e-12;

/// A vertex of the base polytope and the permutation that generated it.
#[derive(Debug, Clone)]
pub struct BaseVertex {
    pub coords: Vec<f64>,
    pub order: Permutation,
    /// `f(S_i)` along the generating chain, `chain_values[0] = f(∅)`.
    pub chain_values: Vec<f64>,
}

/// Telescoped gains `f(S_i) - f(S_{i-1})` along `order`. Makes `n + 1` evaluations.
pub fn vertex_for_order(f: &Oracle, order: &Permutation) -> BaseVertex {
    let n = f.n();
    let mut coords = vec![0.0; n];
    let mut chain_values = Vec::with_capacity(n + 1);
    let mut s = Subset::empty(n);
    let mut prev = f.eval(&s);
    chain_values.push(prev);
    for &j in order.order() {
        s.insert(j);
        let cur = f.eval(&s);
        coords[j] = cur - prev;
        chain_values.push(cur);
        prev = cur;
    }
    BaseVertex {
        coords,
        order: order.clone(),
        chain_values,
    }
}

/// The vertex of `B_f` minimizing `<direction, x>`.
///
/// Elements are taken in ascending order of `direction` (ties by index), so the
/// element with the smallest direction value receives the first gain.
pub fn greedy_base_vertex(f: &Oracle, direction: &[f64]) -> BaseVertex {
    assert_eq!(direction.len(), f.n());
    let mut order: Vec<usize> = (0..f.n()).collect();
    order.sort_by(|&a, &b| direction[a].total_cmp(&direction[b]).then(a.cmp(&b)));
    vertex_for_order(
        f,
        &Permutation::new(order).expect("sorted indices form a permutation"),
    )
}

/// Wolfe's internal state: active vertices, their convex weights and the current point.
#[derive(Debug, Clone)]
pub struct MinNormState {
    pub vertices: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
    pub x: Vec<f64>,
    pub gap: f64,
}

impl MinNormState {
    fn new(v: Vec<f64>) -> Self {
        Self {
            x: v.clone(),
            vertices: vec![v],
            coeffs: vec![1.0],
            gap: f64::INFINITY,
        }
    }

    fn recompute_x(&mut self) {
        let n = self.x.len();
        self.x = vec![0.0; n];
        for (v, &c) in self.vertices.iter().zip(&self.coeffs) {
            for (xi, vi) in self.x.iter_mut().zip(v) {
                *xi += c * vi;
            }
        }
    }

    /// Minimum-norm point of the affine hull of the active vertices, as
    /// affine coefficients. Normal equations on differences `v_i - v_0`.
    fn affine_minimizer(&self) -> Vec<f64> {
        let k = self.vertices.len();
        if k == 1 {
            return vec![1.0];
        }
        let n = self.x.len();
        let v0 = DVector::from_column_slice(&self.vertices[0]);
        let d = DMatrix::from_fn(n, k - 1, |r, c| {
            self.vertices[c + 1][r] - self.vertices[0][r]
        });
        let gram = d.transpose() * &d;
        let rhs = -(d.transpose() * &v0);
        let sol = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(k - 1)),
        };
        let mut mu = Vec::with_capacity(k);
        mu.push(1.0 - sol.sum());
        mu.extend(sol.iter().copied());
        mu
    }

    fn drop_small(&mut self) {
        let mut i = 0;
        while i < self.coeffs.len() {
            if self.coeffs[i] < DROP {
                self.coeffs.remove(i);
                self.vertices.remove(i);
            } else {
                i += 1;
            }
        }
        let total: f64 = self.coeffs.iter().sum();
        self.coeffs.iter_mut().for_each(|c| *c /= total);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result of an exact minimization.
#[derive(Debug, Clone)]
pub struct SfmResult {
    pub set: Subset,
    pub value: f64,
    /// The (approximate) minimum-norm point of `B_f`.
    pub x: Vec<f64>,
    pub major_cycles: usize,
}

/// Minimizes a submodular `f` with `f(∅) = 0`.
///
/// Every linear-oracle call evaluates `f` on the level sets of the current
/// point, so the best level set and the duality gap `f(best) - Σ min(x_j, 0)`
/// come for free. The returned set is the smallest-cardinality level set
/// attaining the best value, which is the minimal minimizer once `x` is the
/// minimum-norm point.
pub fn min_norm_point(f: &Oracle, tol: f64) -> Result<SfmResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = f.n();
    let cap = 100 * n * n;
    let first = greedy_base_vertex(f, &vec![0.0; n]);
    let mut best = (Subset::empty(n), first.chain_values[0]);
    let mut state = MinNormState::new(first.coords);

    for cycle in 0..cap.max(1) {
        let q = greedy_base_vertex(f, &state.x);
        // Level sets of x are exactly the chain prefixes of q's order.
        let mut prefix = Subset::empty(n);
        for (i, &j) in q.order.order().iter().enumerate() {
            prefix.insert(j);
            let val = q.chain_values[i + 1];
            if val < best.1 - 1e-15 * (1.0 + best.1.abs()) {
                best = (prefix.clone(), val);
            }
        }
        let lower: f64 = state.x.iter().map(|&xi| xi.min(0.0)).sum::<f64>() + q.chain_values[0];
        state.gap = best.1 - lower;
        let scale = 1.0 + state.x.iter().map(|v| v.abs()).sum::<f64>();
        let xx = dot(&state.x, &state.x);
        let xq = dot(&state.x, &q.coords);
        let repeated = state
            .vertices
            .iter()
            .any(|v| v.iter().zip(&q.coords).all(|(a, b)| (a - b).abs() <= 1e-14));
        if state.gap <= tol * scale || xx - xq <= tol * xx.max(1.0) || repeated {
            let (set, value) = minimal_level_set(&q, best);
            return Ok(SfmResult {
                set,
                value,
                x: state.x,
                major_cycles: cycle,
            });
        }
        state.vertices.push(q.coords);
        state.coeffs.push(0.0);

        // Minor cycles.
        loop {
            let mu = state.affine_minimizer();
            if mu.iter().all(|&m| m > DROP) {
                state.coeffs = mu;
                state.recompute_x();
                break;
            }
            let theta = state
                .coeffs
                .iter()
                .zip(&mu)
                .filter(|&(&l, &m)| m <= DROP && l - m > 0.0)
                .map(|(&l, &m)| l / (l - m))
                .fold(1.0f64, f64::min);
            for (l, m) in state.coeffs.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            state.drop_small();
            state.recompute_x();
            if state.vertices.len() == 1 {
                break;
            }
        }
    }
    Err(Error::NotConverged {
        iterations: cap,
        gap: state.gap,
        best_set: best.0,
        best_value: best.1,
    })
}

/// Shortest prefix of `q`'s chain whose value ties the best value found.
fn minimal_level_set(q: &BaseVertex, best: (Subset, f64)) -> (Subset, f64) {
    let tie = best.1 + 1e-9 * (1.0 + best.1.abs());
    match q.chain_values.iter().position(|&v| v <= tie) {
        Some(i) if i < best.0.len() => (q.order.prefix(i), q.chain_values[i]),
        _ => best,
    }
}

/// Inner solver for submodular minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SfmSolver {
    MinNorm { tol: f64 },
    BruteForce,
}

impl Default for SfmSolver {
    fn default() -> Self {
        SfmSolver::MinNorm { tol: DEFAULT_TOL }
    }
}

impl SfmSolver {
    pub fn minimize(&self, f: &Oracle) -> Result<(Subset, f64)> {
        match *self {
            SfmSolver::MinNorm { tol } => min_norm_point(f, tol).map(|r| (r.set, r.value)),
            SfmSolver::BruteForce => brute_force_minimize(f),
        }
    }
}
