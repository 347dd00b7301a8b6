//! The productivity verdict.
//!
//! A specification is productive iff its overflow extension is balanced
//! outermost terminating. `NOT_PRODUCTIVE` is reported only with a cycle
//! of the balanced scheduler or when no rule can ever produce `:`.
//! `PRODUCTIVE` is reported only when balancedness comes for free and an
//! external prover shows outermost termination of the extension.

use std::fmt;

use super::evaluate::{eval_prefix, Failure};
use super::scheduler::{run_balanced, CycleCertificate, Limit, RunOutcome};
use super::Budgets;
use crate::enumerate::ground_terms;
use crate::error::{Error, Result};
use crate::io::prover::{ProverConfig, ProverRun};
use crate::io::tpdb::export_tpdb;
use crate::par::{self, Exec};
use crate::streamspec::{ConsReachability, StreamSpec};
use crate::terms::{Sort, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Roots {
    Terms(Vec<Term>),
    /// All ground stream terms up to this size.
    AllSmall(usize),
}

impl Roots {
    pub fn resolve(&self, spec: &StreamSpec) -> Vec<Term> {
        match self {
            Roots::Terms(terms) => terms.clone(),
            Roots::AllSmall(size) => ground_terms(spec.signature().iter(), Sort::Stream, *size),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub roots: Roots,
    pub budgets: Budgets,
    /// Elements demanded from each root for bounded evidence.
    pub prefix_length: usize,
    pub prover: Option<ProverConfig>,
    pub exec: Exec,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            roots: Roots::AllSmall(4),
            budgets: Budgets::default(),
            prefix_length: 10,
            prover: None,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Productive,
    NotProductive,
    BoundedProductive(usize),
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Productive => f.write_str("PRODUCTIVE"),
            Outcome::NotProductive => f.write_str("NOT_PRODUCTIVE"),
            Outcome::BoundedProductive(n) => write!(f, "BOUNDED_PRODUCTIVE({n})"),
            Outcome::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

/// How the balanced run of the extended system ended for one root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalancedRun {
    Halted { steps: usize, normal_form: Term },
    BudgetExceeded { steps: usize, limit: Limit },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEvidence {
    pub root: Term,
    pub balanced: BalancedRun,
    pub prefix: Vec<Term>,
    /// Why the prefix is shorter than requested.
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Cycle {
        root: Term,
        cycle: CycleCertificate,
    },
    ConsUnreachable {
        witness: Term,
    },
    ExternalProof {
        problem: String,
        run: ProverRun,
    },
    BoundedEvidence {
        depth: usize,
        roots: Vec<RootEvidence>,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Cycle { .. } => "cycle",
            Certificate::ConsUnreachable { .. } => "cons_unreachable",
            Certificate::ExternalProof { .. } => "external_proof",
            Certificate::BoundedEvidence { .. } => "bounded_evidence",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Certificate,
    pub budgets: Budgets,
    pub notes: Vec<String>,
}

/// Runs the verdict pipeline on a validated specification in the basic
/// format.
pub fn check_productivity(spec: &StreamSpec, options: &CheckOptions) -> Result<Verdict> {
    let report = spec.validate();
    if !report.passed() {
        return Err(Error::InvalidSpec(report.to_string().trim().to_string()));
    }
    let budgets = options.budgets;
    let mut notes = Vec::new();
    let verdict = |outcome, certificate, notes| Verdict {
        outcome,
        certificate,
        budgets,
        notes,
    };

    if let ConsReachability::Unreachable { witness } = spec.cons_reachability_check() {
        notes.push(format!(
            "no stream rule produces `:` and {witness} is `:`-free"
        ));
        return Ok(verdict(
            Outcome::NotProductive,
            Certificate::ConsUnreachable { witness },
            notes,
        ));
    }

    let extended = spec.extend_with_overflow()?;
    let roots = options.roots.resolve(spec);
    if roots.is_empty() {
        notes.push("there are no root terms to analyse".into());
    }
    let runs = par::map(options.exec, &roots, |t| {
        run_balanced(&extended, t, &budgets)
    });
    let mut balanced = Vec::with_capacity(runs.len());
    for (root, run) in roots.iter().zip(runs) {
        match run? {
            RunOutcome::Cycle(cycle) => {
                notes.push(format!(
                    "balanced outermost run of {root} repeats after {} steps",
                    cycle.loop_len()
                ));
                return Ok(verdict(
                    Outcome::NotProductive,
                    Certificate::Cycle {
                        root: root.clone(),
                        cycle,
                    },
                    notes,
                ));
            }
            RunOutcome::Halted { trace, state } | RunOutcome::Stopped { trace, state } => balanced
                .push(BalancedRun::Halted {
                    steps: trace.len(),
                    normal_form: state.term,
                }),
            RunOutcome::BudgetExceeded { trace, limit, .. } => {
                balanced.push(BalancedRun::BudgetExceeded {
                    steps: trace.len(),
                    limit,
                })
            }
        }
    }

    let free = spec.balancedness_free_check();
    match &options.prover {
        Some(prover) if free.holds => {
            let problem = export_tpdb(&extended)?;
            let run = prover.run(&problem);
            if run.answer.is_yes() {
                return Ok(verdict(
                    Outcome::Productive,
                    Certificate::ExternalProof { problem, run },
                    notes,
                ));
            }
            notes.push(format!("external prover answered {:?}", run.answer));
        }
        Some(_) => notes.push(format!("external prover not consulted: {}", free.reason)),
        None if free.holds => notes.push("no external prover configured".into()),
        None => notes.push(free.reason.clone()),
    }

    let n = options.prefix_length;
    let prefixes = par::map(options.exec, &roots, |t| eval_prefix(spec, t, n, &budgets));
    let mut evidence = Vec::with_capacity(roots.len());
    for ((root, balanced), prefix) in roots.into_iter().zip(balanced).zip(prefixes) {
        let (prefix, failure) = match prefix {
            Ok(prefix) => (prefix.values, None),
            Err((partial, failure)) => (partial.values, Some(failure)),
        };
        evidence.push(RootEvidence {
            root,
            balanced,
            prefix,
            failure,
        });
    }
    let outcome = if evidence.iter().all(|e| e.failure.is_none()) {
        Outcome::BoundedProductive(n)
    } else {
        Outcome::Unknown
    };
    Ok(verdict(
        outcome,
        Certificate::BoundedEvidence {
            depth: n,
            roots: evidence,
        },
        notes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;
    use std::time::Duration;

    fn fc() -> StreamSpec {
        parse_spec("c : s\nf : s -> s\n0 : d\n1 : d\nc -> 1:c\nf(0:σ) -> f(σ)\nf(1:σ) -> 1:f(σ)")
            .unwrap()
            .unfold()
            .unwrap()
    }

    #[test]
    fn bounded_without_prover() {
        let spec = fc();
        let options = CheckOptions {
            prefix_length: 5,
            ..CheckOptions::default()
        };
        let verdict = check_productivity(&spec, &options).unwrap();
        assert_eq!(verdict.outcome, Outcome::BoundedProductive(5));
        assert_eq!(verdict.certificate.kind(), "bounded_evidence");
    }

    #[test]
    fn prover_answers() {
        let spec = fc();
        let with = |template: &str| CheckOptions {
            prover: Some(ProverConfig::new(template, Duration::from_secs(5))),
            ..CheckOptions::default()
        };
        let yes = check_productivity(&spec, &with("echo YES {}")).unwrap();
        assert_eq!(yes.outcome, Outcome::Productive);
        let maybe = check_productivity(&spec, &with("echo MAYBE {}")).unwrap();
        assert_eq!(maybe.outcome, Outcome::BoundedProductive(10));
        assert!(maybe.notes.iter().any(|n| n.contains("Maybe")));
        let no = check_productivity(&spec, &with("echo NO {}")).unwrap();
        assert_ne!(no.outcome, Outcome::NotProductive);
    }

    #[test]
    fn non_productive_cases() {
        let top = parse_spec("c : s\nf : s -> s\nc = f(c)\nf(x:σ) = c").unwrap();
        let v = check_productivity(&top, &CheckOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::NotProductive);
        assert!(matches!(v.certificate, Certificate::ConsUnreachable { .. }));

        let looping = parse_spec("c : s\nf : s -> s\n1 : d\nc -> 1:c\nf(x:σ) -> f(σ)").unwrap();
        let v = check_productivity(&looping, &CheckOptions::default()).unwrap();
        assert_eq!(v.outcome, Outcome::NotProductive);
        assert_eq!(v.certificate.kind(), "cycle");
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let raw = parse_spec("c : s\nf : s -> s\n0 : d\n1 : d\nc -> 1:c\nf(0:σ) -> f(σ)").unwrap();
        assert!(matches!(
            check_productivity(&raw, &CheckOptions::default()),
            Err(Error::InvalidSpec(_))
        ));
    }
}
