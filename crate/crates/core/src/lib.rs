//! Minimization of set functions written as a difference of two submodular
//! functions, `v(X) = f(X) - g(X)`.
//!
//! - [`oracle`], [`subset`], [`spec`], [`brute`]: set functions, subsets,
//!   the JSON instance vocabulary and exhaustive reference routines.
//! - [`bounds`]: tight modular lower and upper bounds, total normalization,
//!   decompositions of arbitrary set functions, lower-bound certificates.
//! - [`sfm`], [`sfmax`]: exact submodular minimization (minimum-norm point)
//!   and approximate maximization (double greedy, local search).
//! - [`dsopt`]: the SubSup, SupSub and ModMod descent procedures.
//! - [`featsel`]: feature selection with mutual-information objectives.

pub mod bounds;
pub mod brute;
pub mod cli;
pub mod dsopt;
pub mod error;
pub mod featsel;
pub mod generate;
pub mod modular;
pub mod oracle;
pub mod sfm;
pub mod sfmax;
pub mod spec;
pub mod subset;

pub use error::{Error, Result};
pub use modular::AffineModular;
pub use oracle::{gain, Oracle, SetFunction};
pub use spec::{build_function, FunctionSpec};
pub use subset::{GroundSet, Permutation, Subset};
