//! Productivity analysis for stream specifications.
//!
//! A stream specification is productive exactly when its rewrite rules,
//! extended with `x:σ → overflow`, are terminating under every balanced
//! outermost strategy. This crate provides the term and rewriting
//! machinery, the format checks and unfolding for specifications, a
//! deterministic balanced outermost scheduler with cycle certificates,
//! bounded stream evaluation, and export to external termination provers.
//!
//! ```
//! use streamprod::io::parse_spec;
//! use streamprod::strategy::{eval_prefix, Budgets};
//!
//! let spec = parse_spec("
//!     ones : s
//!     1 : d
//!     ones -> 1:ones
//! ").unwrap();
//! let prefix = eval_prefix(&spec, &spec.term("ones").unwrap(), 3, &Budgets::default()).unwrap();
//! assert_eq!(prefix.values.iter().map(|t| t.to_string()).collect::<Vec<_>>(), ["1", "1", "1"]);
//! ```

pub mod enumerate;
pub mod error;
pub mod io;
pub mod par;
pub mod rewriting;
pub mod strategy;
pub mod streamspec;
pub mod terms;
pub mod trs;

pub use error::{Error, Result};
pub use streamspec::StreamSpec;
pub use terms::{Position, Sort, Substitution, Symbol, Term, Var};
pub use trs::{Rule, Signature, Trs};
