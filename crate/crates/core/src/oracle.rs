//! Set-function oracles with evaluation accounting.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::Result;
use crate::subset::{GroundSet, Subset};

/// A deterministic map from subsets of `0..n` to reals.
pub trait SetFunction: Send + Sync {
    fn n(&self) -> usize;
    fn eval(&self, s: &Subset) -> f64;
}

struct FnSetFunction<F> {
    n: usize,
    f: F,
}

impl<F> SetFunction for FnSetFunction<F>
where
    F: Fn(&Subset) -> f64 + Send + Sync,
{
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, s: &Subset) -> f64 {
        (self.f)(s)
    }
}

/// A shared handle on a set function that counts every evaluation.
///
/// Clones share the function, the counter and the memo table. The counter is
/// atomic so one oracle may be evaluated from several threads.
#[derive(Clone)]
pub struct Oracle {
    func: Arc<dyn SetFunction>,
    calls: Arc<AtomicU64>,
    memo: Option<Arc<Mutex<HashMap<Subset, f64>>>>,
}

impl Oracle {
    pub fn new(func: impl SetFunction + 'static) -> Self {
        Self {
            func: Arc::new(func),
            calls: Arc::new(AtomicU64::new(0)),
            memo: None,
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(&Subset) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(FnSetFunction { n, f })
    }

    pub fn n(&self) -> usize {
        self.func.n()
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.n()).expect("oracle over an empty ground set")
    }

    pub fn eval(&self, s: &Subset) -> f64 {
        debug_assert_eq!(s.n(), self.n(), "subset and oracle disagree on n");
        self.calls.fetch_add(1, Ordering::Relaxed);
        match &self.memo {
            None => self.func.eval(s),
            Some(memo) => {
                if let Some(&v) = memo.lock().unwrap().get(s) {
                    return v;
                }
                let v = self.func.eval(s);
                memo.lock().unwrap().insert(s.clone(), v);
                v
            }
        }
    }

    /// Number of evaluations made through this handle and its clones.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// Same function behind a subset -> value cache, with a fresh counter.
    /// Evaluations that hit the cache are still counted.
    pub fn memoized(&self) -> Self {
        Self {
            func: Arc::clone(&self.func),
            calls: Arc::new(AtomicU64::new(0)),
            memo: Some(Arc::new(Mutex::new(HashMap::new()))),
        }
    }

    /// Same function and cache, fresh counter.
    pub fn detached(&self) -> Self {
        Self {
            func: Arc::clone(&self.func),
            calls: Arc::new(AtomicU64::new(0)),
            memo: self.memo.clone(),
        }
    }

    pub fn is_memoized(&self) -> bool {
        self.memo.is_some()
    }

    /// `X -> f(X) - f(∅)`. Evaluates `f(∅)` once, here, without counting it.
    pub fn normalized(&self) -> Self {
        let empty = self.func.eval(&Subset::empty(self.n()));
        if empty == 0.0 {
            return self.clone();
        }
        let inner = self.clone();
        Oracle::from_fn(self.n(), move |s| inner.eval(s) - empty)
    }

    /// `X -> self(X) - other(X)`, evaluating both operands through their handles.
    pub fn minus(&self, other: &Oracle) -> Self {
        assert_eq!(self.n(), other.n(), "operands over different ground sets");
        let (a, b) = (self.clone(), other.clone());
        Oracle::from_fn(self.n(), move |s| a.eval(s) - b.eval(s))
    }

    /// `X -> self(X) + other(X)`.
    pub fn plus(&self, other: &Oracle) -> Self {
        assert_eq!(self.n(), other.n(), "operands over different ground sets");
        let (a, b) = (self.clone(), other.clone());
        Oracle::from_fn(self.n(), move |s| a.eval(s) + b.eval(s))
    }

    /// `X -> c * self(X)`.
    pub fn scaled(&self, c: f64) -> Self {
        let a = self.clone();
        Oracle::from_fn(self.n(), move |s| c * a.eval(s))
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("n", &self.n())
            .field("calls", &self.calls())
            .field("memoized", &self.is_memoized())
            .finish()
    }
}

/// Marginal gain `f(X ∪ {j}) - f(X)`.
///
/// Two evaluations, or one when `j` is already in `X` (the gain is then 0).
pub fn gain(f: &Oracle, j: usize, x: &Subset) -> Result<f64> {
    f.ground().check(j)?;
    if x.contains(j) {
        f.eval(x);
        return Ok(0.0);
    }
    Ok(f.eval(&x.with(j)) - f.eval(x))
}

/// Gain without the range check, for internal loops over known-valid elements.
pub(crate) fn gain_unchecked(f: &Oracle, j: usize, x: &Subset) -> f64 {
    if x.contains(j) {
        return 0.0;
    }
    f.eval(&x.with(j)) - f.eval(x)
}
