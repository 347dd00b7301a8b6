//! Lazy evaluation of stream prefixes with the balanced scheduler.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::scheduler::{run_until, Limit, RunOutcome, SchedulerState};
use super::Budgets;
use crate::rewriting::Trace;
use crate::streamspec::StreamSpec;
use crate::terms::{Position, Sort, Term};
use crate::trs::Trs;

/// Why a head could not be produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "snake_case")]
pub enum Failure {
    Budget(Limit),
    /// The scheduler revisited a configuration without producing `:`.
    Cycle,
    /// A normal form without `:` at the root.
    NormalForm(String),
    /// The head has no data normal form within the step budget.
    DataBudget(String),
    InvalidTerm(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Budget(limit) => write!(f, "{limit} exhausted"),
            Failure::Cycle => f.write_str("reduction cycles without producing an element"),
            Failure::NormalForm(t) => write!(f, "normal form {t} has no head"),
            Failure::DataBudget(t) => write!(f, "head {t} did not normalise"),
            Failure::InvalidTerm(e) => f.write_str(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Produced {
    /// The data normal form of the head.
    pub head: Term,
    pub tail: Term,
    /// Reduction from the input to `h:tail`, where `h` normalises to `head`.
    pub trace: Trace,
}

/// Rewrites `t` with the balanced scheduler until its root is `:`, then
/// normalises the head with the data rules.
pub fn produce_head(spec: &StreamSpec, t: &Term, budgets: &Budgets) -> Result<Produced, Failure> {
    if !t.is_ground() || t.sort() != Sort::Stream {
        return Err(Failure::InvalidTerm(format!(
            "{t} is not a ground stream term"
        )));
    }
    spec.signature()
        .check_term(t)
        .map_err(|e| Failure::InvalidTerm(e.to_string()))?;
    let trs = spec.as_trs();
    let state = SchedulerState::new(trs, t.clone());
    let outcome = run_until(trs, state, budgets, &|s| s.term.is_cons())
        .map_err(|e| Failure::InvalidTerm(e.to_string()))?;
    let (trace, term) = match outcome {
        RunOutcome::Stopped { trace, state } => (trace, state.term),
        RunOutcome::Halted { state, .. } => {
            return Err(Failure::NormalForm(state.term.to_string()))
        }
        RunOutcome::Cycle(_) => return Err(Failure::Cycle),
        RunOutcome::BudgetExceeded { limit, .. } => return Err(Failure::Budget(limit)),
    };
    let (h, tail) = term.as_cons().expect("stopped at a cons root");
    let head = spec
        .data_trs()
        .normalize_innermost(h, budgets.max_steps)
        .ok_or_else(|| Failure::DataBudget(h.to_string()))?;
    Ok(Produced {
        head,
        tail: tail.clone(),
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefix {
    pub values: Vec<Term>,
    pub traces: Vec<Trace>,
}

/// The first `n` elements of the stream denoted by `t`. On failure returns
/// the elements obtained so far together with the reason.
pub fn eval_prefix(
    spec: &StreamSpec,
    t: &Term,
    n: usize,
    budgets: &Budgets,
) -> Result<Prefix, (Prefix, Failure)> {
    let mut prefix = Prefix {
        values: Vec::with_capacity(n),
        traces: Vec::with_capacity(n),
    };
    let mut current = t.clone();
    while prefix.values.len() < n {
        match produce_head(spec, &current, budgets) {
            Ok(produced) => {
                prefix.values.push(produced.head);
                prefix.traces.push(produced.trace);
                current = produced.tail;
            }
            Err(failure) => return Err((prefix, failure)),
        }
    }
    Ok(prefix)
}

/// A redex of a ground stream term without `:` at its root that does not
/// lie below any `:`. `None` when the root is `:` or no such redex exists,
/// the latter only for specifications that are not exhaustive.
pub fn find_redex_not_below_cons(trs: &Trs, t: &Term) -> Option<Position> {
    if t.is_cons() || t.is_var() {
        return None;
    }
    if trs.is_redex(t) {
        return Some(Position::root());
    }
    let f = t.root()?;
    let args = t.args();
    for (i, u) in args.iter().enumerate().take(f.data_arity()) {
        // data terms contain no `:`, so any redex will do
        if let Some(p) = trs.redex_positions(u).into_iter().next() {
            return Some(Position::root().child(i + 1).concat(&p));
        }
    }
    for (j, u) in args.iter().enumerate().skip(f.data_arity()) {
        if let Some(p) = find_redex_not_below_cons(trs, u) {
            return Some(Position::root().child(j + 1).concat(&p));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;

    const MORSE: &str = "
        morse : s
        inv : s -> s
        tail : s -> s
        zip : s s -> s
        not : d -> d
        0 : d
        1 : d
        morse -> 0:zip(inv(morse), tail(morse))
        tail(x:σ) -> σ
        inv(x:σ) -> not(x):inv(σ)
        zip(x:σ, τ) -> x:zip(τ, σ)
        not(0) -> 1
        not(1) -> 0
    ";

    #[test]
    fn morse_prefix() {
        let spec = parse_spec(MORSE).unwrap();
        let prefix =
            eval_prefix(&spec, &spec.term("morse").unwrap(), 8, &Budgets::default()).unwrap();
        let shown: Vec<String> = prefix.values.iter().map(Term::to_string).collect();
        assert_eq!(shown, ["0", "1", "1", "0", "1", "0", "0", "1"]);
        assert!(prefix.traces.iter().all(Trace::is_outermost));
    }

    #[test]
    fn failures() {
        let spec = parse_spec("c : s\nf : s -> s\n1 : d\nc -> 1:c\nf(x:σ) -> f(σ)").unwrap();
        let err =
            produce_head(&spec, &spec.term("f(c)").unwrap(), &Budgets::default()).unwrap_err();
        assert_eq!(err, Failure::Cycle);
        let (partial, failure) =
            eval_prefix(&spec, &spec.term("1:f(c)").unwrap(), 3, &Budgets::default()).unwrap_err();
        assert_eq!(partial.values.len(), 1);
        assert_eq!(failure, Failure::Cycle);
        assert!(matches!(
            produce_head(&spec, &spec.term("x:c").unwrap(), &Budgets::default()),
            Err(Failure::InvalidTerm(_))
        ));
    }

    #[test]
    fn redex_outside_cons() {
        let spec = parse_spec(MORSE).unwrap();
        let trs = spec.as_trs();
        let t = spec.term("zip(inv(0:morse), tail(morse))").unwrap();
        assert_eq!(
            find_redex_not_below_cons(trs, &t),
            Some("1".parse().unwrap())
        );
        let t = spec.term("zip(tail(morse), 0:morse)").unwrap();
        assert_eq!(
            find_redex_not_below_cons(trs, &t),
            Some("1.1".parse().unwrap())
        );
        assert_eq!(
            find_redex_not_below_cons(trs, &spec.term("0:morse").unwrap()),
            None
        );
    }
}
