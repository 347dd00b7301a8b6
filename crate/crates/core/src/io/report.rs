//! JSON analysis reports. Terms and positions are rendered as strings in
//! the input syntax; the schema lives in `docs/report.schema.json`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::io::print::declaration;
use crate::io::prover::ProverAnswer;
use crate::rewriting::{StepKind, Trace};
use crate::strategy::evaluate::Failure;
use crate::strategy::verdict::{BalancedRun, Certificate, Outcome, Verdict};
use crate::strategy::Budgets;
use crate::streamspec::{StreamSpec, ValidationReport};
use crate::terms::Term;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: SpecSummary,
    pub validation: ValidationReport,
    pub verdict: Option<VerdictSummary>,
    pub certificate: Option<CertificateReport>,
    pub traces: Vec<TraceReport>,
    pub budgets: Budgets,
    /// Milliseconds per phase.
    pub timings: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationReport>,
}

impl AnalysisReport {
    pub fn new(
        name: &str,
        spec: &StreamSpec,
        validation: ValidationReport,
        budgets: Budgets,
    ) -> Self {
        AnalysisReport {
            spec: SpecSummary::new(name, spec),
            validation,
            verdict: None,
            certificate: None,
            traces: Vec::new(),
            budgets,
            timings: BTreeMap::new(),
            evaluation: None,
        }
    }

    /// Records the verdict, its certificate and any traces it carries.
    pub fn with_verdict(mut self, verdict: &Verdict) -> Self {
        self.verdict = Some(VerdictSummary::from(verdict));
        self.certificate = Some(CertificateReport::from(&verdict.certificate));
        if let Certificate::Cycle { cycle, .. } = &verdict.certificate {
            self.traces.push(TraceReport::new("cycle", &cycle.trace));
        }
        self.budgets = verdict.budgets;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub name: String,
    pub declarations: Vec<String>,
    pub rules: Vec<RuleReport>,
}

impl SpecSummary {
    pub fn new(name: &str, spec: &StreamSpec) -> SpecSummary {
        SpecSummary {
            name: name.to_string(),
            declarations: spec
                .signature()
                .iter()
                .filter(|f| !f.is_cons())
                .map(declaration)
                .collect(),
            rules: spec
                .rules()
                .iter()
                .map(|r| RuleReport {
                    label: r.label().to_string(),
                    lhs: r.lhs().to_string(),
                    rhs: r.rhs().to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSummary {
    /// `PRODUCTIVE`, `NOT_PRODUCTIVE`, `BOUNDED_PRODUCTIVE` or `UNKNOWN`.
    pub outcome: String,
    /// The prefix length behind `BOUNDED_PRODUCTIVE`.
    pub bound: Option<usize>,
    pub notes: Vec<String>,
}

impl From<&Verdict> for VerdictSummary {
    fn from(v: &Verdict) -> Self {
        let (outcome, bound) = match v.outcome {
            Outcome::BoundedProductive(n) => ("BOUNDED_PRODUCTIVE".to_string(), Some(n)),
            other => (other.to_string(), None),
        };
        VerdictSummary {
            outcome,
            bound,
            notes: v.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateReport {
    Cycle {
        root: String,
        loop_start: usize,
        loop_len: usize,
        term: String,
        queue: Vec<String>,
    },
    ConsUnreachable {
        witness: String,
    },
    ExternalProof {
        command: Vec<String>,
        answer: ProverAnswer,
        output: String,
        problem: String,
    },
    BoundedEvidence {
        depth: usize,
        roots: Vec<RootReport>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootReport {
    pub root: String,
    /// `halted` or `budget_exceeded`.
    pub balanced_run: String,
    pub steps: usize,
    pub prefix: Vec<String>,
    pub failure: Option<String>,
}

fn strings(terms: &[Term]) -> Vec<String> {
    terms.iter().map(Term::to_string).collect()
}

impl From<&Certificate> for CertificateReport {
    fn from(c: &Certificate) -> Self {
        match c {
            Certificate::Cycle { root, cycle } => CertificateReport::Cycle {
                root: root.to_string(),
                loop_start: cycle.loop_start,
                loop_len: cycle.loop_len(),
                term: cycle.state.term.to_string(),
                queue: cycle.state.queue.iter().map(|p| p.to_string()).collect(),
            },
            Certificate::ConsUnreachable { witness } => CertificateReport::ConsUnreachable {
                witness: witness.to_string(),
            },
            Certificate::ExternalProof { problem, run } => CertificateReport::ExternalProof {
                command: run.command.clone(),
                answer: run.answer.clone(),
                output: run.stdout.clone(),
                problem: problem.clone(),
            },
            Certificate::BoundedEvidence { depth, roots } => CertificateReport::BoundedEvidence {
                depth: *depth,
                roots: roots
                    .iter()
                    .map(|e| {
                        let (balanced_run, steps) = match &e.balanced {
                            BalancedRun::Halted { steps, .. } => ("halted", *steps),
                            BalancedRun::BudgetExceeded { steps, .. } => {
                                ("budget_exceeded", *steps)
                            }
                        };
                        RootReport {
                            root: e.root.to_string(),
                            balanced_run: balanced_run.to_string(),
                            steps,
                            prefix: strings(&e.prefix),
                            failure: e.failure.as_ref().map(Failure::to_string),
                        }
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub label: String,
    pub initial: String,
    pub steps: Vec<StepReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub position: String,
    pub rule: String,
    pub kind: StepKind,
    pub target: String,
}

impl TraceReport {
    pub fn new(label: &str, trace: &Trace) -> TraceReport {
        TraceReport {
            label: label.to_string(),
            initial: trace.initial().to_string(),
            steps: trace
                .steps()
                .iter()
                .map(|s| StepReport {
                    position: s.position().to_string(),
                    rule: s.rule().to_string(),
                    kind: s.kind(),
                    target: s.target().to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub term: String,
    pub requested: usize,
    pub values: Vec<String>,
    pub failure: Option<String>,
}

impl EvaluationReport {
    pub fn new(term: &Term, requested: usize, values: &[Term], failure: Option<&Failure>) -> Self {
        EvaluationReport {
            term: term.to_string(),
            requested,
            values: strings(values),
            failure: failure.map(Failure::to_string),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;
    use crate::strategy::{check_productivity, CheckOptions};

    #[test]
    fn round_trips_through_json() {
        let spec = parse_spec("c : s\nf : s -> s\n1 : d\nc -> 1:c\nf(x:σ) -> f(σ)").unwrap();
        let verdict = check_productivity(&spec, &CheckOptions::default()).unwrap();
        let report = AnalysisReport::new("loop", &spec, spec.validate(), Budgets::default())
            .with_verdict(&verdict);
        let json = report.to_json();
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["verdict"]["outcome"], "NOT_PRODUCTIVE");
        assert_eq!(value["certificate"]["kind"], "cycle");
        assert_eq!(value["certificate"]["loop_len"], 2);
        assert_eq!(value["traces"][0]["steps"][0]["kind"], "outermost");
    }
}
