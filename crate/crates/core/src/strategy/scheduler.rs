//! A balanced outermost strategy driven by a FIFO queue of obligations.
//!
//! The queue always holds exactly the maximal redex positions of the
//! current term. Reducing the front entry `q` keeps the entries parallel
//! to `q` in their old order and appends the new maximal positions,
//! leftmost first. Every maximal redex therefore either reaches the front
//! or is consumed by a step at or above it, so infinite runs are balanced.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::Budgets;
use crate::error::{Error, Result};
use crate::rewriting::{Step, Trace};
use crate::terms::{Position, Sort, Term};
use crate::trs::Trs;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchedulerState {
    pub term: Term,
    pub queue: VecDeque<Position>,
    pub step_count: usize,
}

impl SchedulerState {
    pub fn new(trs: &Trs, term: Term) -> SchedulerState {
        let queue = trs.maximal_redex_positions(&term).into();
        SchedulerState {
            term,
            queue,
            step_count: 0,
        }
    }

    /// The state without its step counter.
    pub fn key(&self) -> (Term, Vec<Position>) {
        (self.term.clone(), self.queue.iter().cloned().collect())
    }

    /// Same term and queue.
    pub fn same_configuration(&self, other: &SchedulerState) -> bool {
        self.term == other.term && self.queue == other.queue
    }

    /// Checks that the queue is the set of maximal redex positions.
    pub fn check_invariant(&self, trs: &Trs) -> Result<()> {
        let mut expected = trs.maximal_redex_positions(&self.term);
        let mut actual: Vec<Position> = self.queue.iter().cloned().collect();
        expected.sort();
        actual.sort();
        if expected != actual {
            return Err(Error::Scheduler(format!(
                "queue {actual:?} differs from maximal redexes {expected:?} of {}",
                self.term
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SchedulerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.term)?;
        for (i, p) in self.queue.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)] // built once per step and consumed at once
pub enum SchedulerStep {
    Advanced { step: Step, next: SchedulerState },
    Halted,
}

/// Reduces the front of the queue.
pub fn scheduler_step(trs: &Trs, state: &SchedulerState) -> Result<SchedulerStep> {
    let Some(q) = state.queue.front() else {
        if !trs.redex_positions(&state.term).is_empty() {
            return Err(Error::Scheduler(format!("empty queue for {}", state.term)));
        }
        return Ok(SchedulerStep::Halted);
    };
    let step = Step::new(trs, &state.term, q).map_err(|e| Error::Scheduler(e.to_string()))?;
    if !step.is_outermost() {
        return Err(Error::Scheduler(format!(
            "{q} is not outermost in {}",
            state.term
        )));
    }
    // Only ancestors of q and the contractum can hold new maximal redexes:
    // entries parallel to q keep their subterms.
    let target = step.target();
    let path = q.path();
    let mut sub = target;
    let mut lifted = None;
    for (k, &i) in path.iter().enumerate() {
        if trs.is_redex(sub) {
            lifted = Some(Position::from(&path[..k]));
            break;
        }
        sub = &sub.args()[i - 1];
    }
    let rest = state.queue.iter().skip(1);
    let queue: VecDeque<Position> = match lifted {
        Some(a) => {
            let mut queue: VecDeque<Position> =
                rest.filter(|p| p.is_parallel(&a)).cloned().collect();
            queue.push_back(a);
            queue
        }
        None => rest
            .filter(|p| p.is_parallel(q))
            .cloned()
            .chain(trs.maximal_redex_positions(sub).iter().map(|p| q.concat(p)))
            .collect(),
    };
    let next = SchedulerState {
        term: step.target().clone(),
        queue,
        step_count: state.step_count + 1,
    };
    Ok(SchedulerStep::Advanced { step, next })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "limit", rename_all = "snake_case")]
pub enum Limit {
    Steps(usize),
    TermSize(usize),
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Steps(n) => write!(f, "step budget {n}"),
            Limit::TermSize(n) => write!(f, "term size budget {n}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum RunOutcome {
    /// A normal form was reached.
    Halted {
        trace: Trace,
        state: SchedulerState,
    },
    /// The stop predicate became true.
    Stopped {
        trace: Trace,
        state: SchedulerState,
    },
    Cycle(CycleCertificate),
    BudgetExceeded {
        trace: Trace,
        state: SchedulerState,
        limit: Limit,
    },
}

impl RunOutcome {
    pub fn trace(&self) -> &Trace {
        match self {
            RunOutcome::Halted { trace, .. }
            | RunOutcome::Stopped { trace, .. }
            | RunOutcome::BudgetExceeded { trace, .. } => trace,
            RunOutcome::Cycle(cert) => &cert.trace,
        }
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, RunOutcome::Cycle(_))
    }
}

/// A run that revisits a scheduler configuration. Its loop can be pumped
/// forever, giving an infinite balanced outermost reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCertificate {
    /// From the root term up to the second visit of `state`.
    pub trace: Trace,
    /// Steps before the first visit of `state`.
    pub loop_start: usize,
    /// The repeated configuration.
    pub state: SchedulerState,
}

impl CycleCertificate {
    pub fn loop_len(&self) -> usize {
        self.trace.len() - self.loop_start
    }

    pub fn stem(&self) -> &[Step] {
        &self.trace.steps()[..self.loop_start]
    }

    pub fn loop_steps(&self) -> &[Step] {
        &self.trace.steps()[self.loop_start..]
    }

    /// Re-runs the loop from `state` and checks it comes back to `state`
    /// through the recorded steps.
    pub fn replay(&self, trs: &Trs) -> Result<SchedulerState> {
        let mut current = SchedulerState {
            step_count: 0,
            ..self.state.clone()
        };
        for expected in self.loop_steps() {
            match scheduler_step(trs, &current)? {
                SchedulerStep::Advanced { step, next } if step == *expected => current = next,
                _ => {
                    return Err(Error::InvalidTrace(format!(
                        "loop does not replay at {expected}"
                    )))
                }
            }
        }
        if !current.same_configuration(&self.state) {
            return Err(Error::InvalidTrace(format!(
                "loop ends in {current} instead of {}",
                self.state
            )));
        }
        Ok(current)
    }

    /// The stem followed by `k` passes through the loop.
    pub fn pump(&self, trs: &Trs, k: usize) -> Result<Trace> {
        let mut state = SchedulerState::new(trs, self.trace.initial().clone());
        let mut trace = Trace::new(state.term.clone());
        for _ in 0..self.loop_start + k * self.loop_len() {
            match scheduler_step(trs, &state)? {
                SchedulerStep::Advanced { step, next } => {
                    trace.push(step)?;
                    state = next;
                }
                SchedulerStep::Halted => {
                    return Err(Error::InvalidTrace("pumped run halted".into()));
                }
            }
        }
        Ok(trace)
    }
}

/// Runs the scheduler from `initial` until `stop` holds, a normal form, a
/// repeated configuration or a budget is hit.
pub fn run_until(
    trs: &Trs,
    initial: SchedulerState,
    budgets: &Budgets,
    stop: &dyn Fn(&SchedulerState) -> bool,
) -> Result<RunOutcome> {
    let mut seen: FxHashMap<(Term, Vec<Position>), usize> = FxHashMap::default();
    let mut trace = Trace::new(initial.term.clone());
    let mut state = initial;
    loop {
        if stop(&state) {
            return Ok(RunOutcome::Stopped { trace, state });
        }
        if let Some(&first) = seen.get(&state.key()) {
            return Ok(RunOutcome::Cycle(CycleCertificate {
                trace,
                loop_start: first,
                state,
            }));
        }
        seen.insert(state.key(), trace.len());
        let limit = if trace.len() >= budgets.max_steps {
            Some(Limit::Steps(budgets.max_steps))
        } else if state.term.size() > budgets.max_term_size {
            Some(Limit::TermSize(budgets.max_term_size))
        } else {
            None
        };
        if let Some(limit) = limit {
            return Ok(RunOutcome::BudgetExceeded {
                trace,
                state,
                limit,
            });
        }
        match scheduler_step(trs, &state)? {
            SchedulerStep::Halted => return Ok(RunOutcome::Halted { trace, state }),
            SchedulerStep::Advanced { step, next } => {
                trace.push(step)?;
                state = next;
            }
        }
    }
}

/// Runs the balanced scheduler on a ground stream term.
pub fn run_balanced(trs: &Trs, t: &Term, budgets: &Budgets) -> Result<RunOutcome> {
    if !t.is_ground() || t.sort() != Sort::Stream {
        return Err(Error::NotGroundStream(t.to_string()));
    }
    trs.signature().check_term(t)?;
    run_until(trs, SchedulerState::new(trs, t.clone()), budgets, &|_| {
        false
    })
}
