//! A breadth-first search over all rewrite sequences, used as an
//! independent reference for the scheduler.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::evaluate::{produce_head, Failure};
use super::Budgets;
use crate::par::{self, Exec};
use crate::rewriting::{Step, Trace};
use crate::streamspec::StreamSpec;
use crate::terms::{Position, Term, CONS};
use crate::trs::Trs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_depth: usize,
    pub max_term_size: usize,
    pub max_states: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Some reduction reaches a term with `:` at the root.
    Yes(Trace),
    /// No reduction does.
    No,
    /// The search was cut short by a limit.
    Inconclusive { explored: usize },
}

/// A visited term and the step that first reached it: parent index,
/// position and rule label.
type Node = (Term, Option<(usize, Position, String)>);

/// Searches all reductions of `t` in `R_d ∪ R_s` for one that puts `:` at
/// the root.
pub fn bfs_oracle_produces(spec: &StreamSpec, t: &Term, limits: &OracleLimits) -> OracleOutcome {
    bfs_produces(spec.as_trs(), t, limits)
}

/// [`bfs_oracle_produces`] for an arbitrary rewrite system.
pub fn bfs_produces(trs: &Trs, t: &Term, limits: &OracleLimits) -> OracleOutcome {
    if t.is_cons() {
        return OracleOutcome::Yes(Trace::new(t.clone()));
    }
    if !t.contains_symbol(CONS) && trs.rules().iter().all(|r| !r.rhs().contains_symbol(CONS)) {
        return OracleOutcome::No;
    }

    let mut nodes: Vec<Node> = vec![(t.clone(), None)];
    let mut visited: FxHashMap<Term, usize> = FxHashMap::default();
    visited.insert(t.clone(), 0);
    let mut frontier = vec![0];
    let mut truncated = false;
    for _ in 0..limits.max_depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            let term = nodes[idx].0.clone();
            for p in trs.redex_positions(&term) {
                let Ok((reduct, rule)) = trs.rewrite_at(&term, &p) else {
                    continue;
                };
                if reduct.size() > limits.max_term_size {
                    truncated = true;
                    continue;
                }
                if visited.contains_key(&reduct) {
                    continue;
                }
                let found = reduct.is_cons();
                let child = nodes.len();
                visited.insert(reduct.clone(), child);
                nodes.push((reduct, Some((idx, p, rule.label().to_string()))));
                if found {
                    return OracleOutcome::Yes(path_to(trs, &nodes, child));
                }
                if nodes.len() >= limits.max_states {
                    return OracleOutcome::Inconclusive {
                        explored: nodes.len(),
                    };
                }
                next.push(child);
            }
        }
        if next.is_empty() {
            return if truncated {
                OracleOutcome::Inconclusive {
                    explored: nodes.len(),
                }
            } else {
                OracleOutcome::No
            };
        }
        frontier = next;
    }
    OracleOutcome::Inconclusive {
        explored: nodes.len(),
    }
}

fn path_to(trs: &Trs, nodes: &[Node], end: usize) -> Trace {
    let mut moves = Vec::new();
    let mut at = end;
    while let Some((parent, p, label)) = &nodes[at].1 {
        moves.push((p.clone(), label.clone()));
        at = *parent;
    }
    moves.reverse();
    let mut trace = Trace::new(nodes[0].0.clone());
    for (p, label) in moves {
        let step = Step::with_rule(trs, trace.last(), &p, &label).expect("recorded step replays");
        trace.push(step).expect("recorded steps chain");
    }
    trace
}

/// The first `k` data values reachable by repeatedly searching for a head.
/// `None` if some search is not a `Yes`.
pub fn oracle_prefix(
    trs: &Trs,
    data_trs: &Trs,
    t: &Term,
    k: usize,
    limits: &OracleLimits,
    data_budget: usize,
) -> Option<Vec<Term>> {
    let mut values = Vec::with_capacity(k);
    let mut current = t.clone();
    while values.len() < k {
        let OracleOutcome::Yes(trace) = bfs_produces(trs, &current, limits) else {
            return None;
        };
        let (h, tail) = trace.last().as_cons()?;
        values.push(data_trs.normalize_innermost(h, data_budget)?);
        current = tail.clone();
    }
    Some(values)
}

/// Comparison of the scheduler against the oracle on a batch of terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub checked: usize,
    pub agreed: usize,
    /// The oracle ran out of budget but the scheduler's reduction to a
    /// `:`-rooted term replays step by step in the rewrite system.
    pub certified: usize,
    /// Oracle or scheduler out of budget, without a certificate.
    pub inconclusive: usize,
    pub disagreements: Vec<String>,
}

impl Agreement {
    pub fn holds(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// For each term: the scheduler produces a head iff the oracle finds one.
/// A scheduler cycle counts as "no head"; budgets make a case inconclusive
/// unless the scheduler's trace certifies a head.
pub fn oracle_agreement(
    spec: &StreamSpec,
    terms: &[Term],
    budgets: &Budgets,
    exec: Exec,
) -> Agreement {
    let limits = budgets.oracle_limits();
    let verdicts = par::map(exec, terms, |t| {
        let (scheduler, witness) = match produce_head(spec, t, budgets) {
            Ok(produced) => {
                let trace = produced.trace;
                let replays = trace.verify(spec.as_trs()).is_ok() && trace.last().is_cons();
                (Some(true), replays)
            }
            Err(Failure::Cycle | Failure::NormalForm(_)) => (Some(false), false),
            Err(_) => (None, false),
        };
        let oracle = match bfs_oracle_produces(spec, t, &limits) {
            OracleOutcome::Yes(_) => Some(true),
            OracleOutcome::No => Some(false),
            OracleOutcome::Inconclusive { .. } => None,
        };
        (scheduler, oracle, witness)
    });
    let mut agreement = Agreement::default();
    for (t, (scheduler, oracle, witness)) in terms.iter().zip(verdicts) {
        agreement.checked += 1;
        match (scheduler, oracle) {
            (Some(a), Some(b)) if a == b => agreement.agreed += 1,
            (Some(a), Some(b)) => agreement
                .disagreements
                .push(format!("{t}: scheduler {a}, oracle {b}")),
            (Some(true), None) if witness => agreement.certified += 1,
            _ => agreement.inconclusive += 1,
        }
    }
    agreement
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;

    fn limits() -> OracleLimits {
        Budgets::default().oracle_limits()
    }

    #[test]
    fn top_term_example_has_no_head() {
        let spec = parse_spec("c : s\nf : s -> s\nc = f(c)\nf(x:σ) = c").unwrap();
        assert_eq!(
            bfs_oracle_produces(&spec, &spec.term("c").unwrap(), &limits()),
            OracleOutcome::No
        );
    }

    #[test]
    fn finds_shortest_reduction() {
        let spec = parse_spec("c : s\nf : s -> s\n1 : d\nc -> f(1:c)\nf(x:σ) -> x:f(σ)").unwrap();
        let OracleOutcome::Yes(trace) =
            bfs_oracle_produces(&spec, &spec.term("c").unwrap(), &limits())
        else {
            panic!()
        };
        assert_eq!(trace.len(), 2);
        assert!(trace.last().is_cons());
    }

    #[test]
    fn exhausted_search_without_head() {
        let spec =
            parse_spec("c : s\ne : s\nf : s -> s\nc -> f(e)\ne -> e\nf(x:σ) -> x:f(σ)").unwrap();
        // c → f(e) → f(e): two reducts, neither with `:` on top
        assert_eq!(
            bfs_oracle_produces(&spec, &spec.term("c").unwrap(), &limits()),
            OracleOutcome::No
        );
    }

    #[test]
    fn growth_is_inconclusive() {
        let spec = parse_spec("c : s\nf : s -> s\n1 : d\nc -> f(1:c)\nf(x:σ) -> f(f(σ))").unwrap();
        let small = OracleLimits {
            max_depth: 6,
            ..limits()
        };
        assert!(matches!(
            bfs_oracle_produces(&spec, &spec.term("c").unwrap(), &small),
            OracleOutcome::Inconclusive { .. }
        ));
    }
}
