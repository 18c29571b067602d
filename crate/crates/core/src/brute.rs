//! Exhaustive reference routines for small ground sets.

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::subset::Subset;

/// Largest `n` accepted by [`brute_force_minimize`] and [`brute_force_maximize`].
pub const BRUTE_FORCE_LIMIT: usize = 25;
/// Largest `n` accepted by [`check_submodular`].
pub const SUBMODULAR_CHECK_LIMIT: usize = 16;
/// Default absolute tolerance for `≤`/`≥` comparisons.
pub const TOL: f64 = 1e-9;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::TooLarge { n, limit })
    } else {
        Ok(())
    }
}

/// All `2^n` values, indexed by bitmask.
pub fn tabulate(f: &Oracle) -> Result<Vec<f64>> {
    let n = f.n();
    guard(n, BRUTE_FORCE_LIMIT)?;
    Ok((0..1u64 << n)
        .map(|mask| f.eval(&Subset::from_mask(n, mask)))
        .collect())
}

fn extremum(
    f: &Oracle,
    pred: impl Fn(&Subset) -> bool,
    sign: f64,
) -> Result<Option<(Subset, f64)>> {
    let n = f.n();
    guard(n, BRUTE_FORCE_LIMIT)?;
    let mut best: Option<(Subset, f64)> = None;
    for mask in 0..1u64 << n {
        let s = Subset::from_mask(n, mask);
        if !pred(&s) {
            continue;
        }
        let v = sign * f.eval(&s);
        let better = match &best {
            None => true,
            Some((bs, bv)) => v < bv - TOL || (v <= bv + TOL && s.canonical_cmp(bs).is_lt()),
        };
        if better {
            best = Some((s, v));
        }
    }
    Ok(best.map(|(s, v)| (s, sign * v)))
}

/// Global minimizer by enumeration. Values within [`TOL`] tie; ties go to the
/// smallest cardinality, then the lexicographically smallest index list.
pub fn brute_force_minimize(f: &Oracle) -> Result<(Subset, f64)> {
    Ok(extremum(f, |_| true, 1.0)?.expect("at least the empty set"))
}

/// Global maximizer by enumeration, same tie-breaking as [`brute_force_minimize`].
pub fn brute_force_maximize(f: &Oracle) -> Result<(Subset, f64)> {
    Ok(extremum(f, |_| true, -1.0)?.expect("at least the empty set"))
}

/// Constrained enumeration; `None` when no subset satisfies `feasible`.
pub fn brute_force_minimize_where(
    f: &Oracle,
    feasible: impl Fn(&Subset) -> bool,
) -> Result<Option<(Subset, f64)>> {
    extremum(f, feasible, 1.0)
}

pub fn brute_force_maximize_where(
    f: &Oracle,
    feasible: impl Fn(&Subset) -> bool,
) -> Result<Option<(Subset, f64)>> {
    extremum(f, feasible, -1.0)
}

/// Exhaustive submodularity test with tolerance [`TOL`].
pub fn check_submodular(f: &Oracle) -> Result<bool> {
    check_submodular_tol(f, TOL)
}

/// Tests `f(X+j) + f(X+k) >= f(X+j+k) + f(X)` for every `X` and `j, k ∉ X`,
/// which is equivalent to diminishing returns over all `X ⊂ Y`.
pub fn check_submodular_tol(f: &Oracle, tol: f64) -> Result<bool> {
    let n = f.n();
    guard(n, SUBMODULAR_CHECK_LIMIT)?;
    let table = tabulate(f)?;
    Ok(table_is_submodular(&table, n, tol))
}

pub(crate) fn table_is_submodular(table: &[f64], n: usize, tol: f64) -> bool {
    for mask in 0..table.len() {
        for j in 0..n {
            let bj = 1 << j;
            if mask & bj != 0 {
                continue;
            }
            for k in j + 1..n {
                let bk = 1 << k;
                if mask & bk != 0 {
                    continue;
                }
                if table[mask | bj] + table[mask | bk] < table[mask | bj | bk] + table[mask] - tol {
                    return false;
                }
            }
        }
    }
    true
}
