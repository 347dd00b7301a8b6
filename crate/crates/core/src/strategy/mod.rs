//! Reduction strategies and the productivity verdict.

pub mod evaluate;
pub mod oracle;
pub mod scheduler;
pub mod verdict;

use serde::{Deserialize, Serialize};

pub use evaluate::{
    eval_prefix, find_redex_not_below_cons, produce_head, Failure, Prefix, Produced,
};
pub use oracle::{bfs_oracle_produces, oracle_agreement, Agreement, OracleLimits, OracleOutcome};
pub use scheduler::{
    run_balanced, scheduler_step, CycleCertificate, Limit, RunOutcome, SchedulerState,
    SchedulerStep,
};
pub use verdict::{
    check_productivity, Certificate, CheckOptions, Outcome, RootEvidence, Roots, Verdict,
};

/// Resource limits shared by the scheduler, the evaluator and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Rewrite steps per run.
    pub max_steps: usize,
    /// Largest term the scheduler may build.
    pub max_term_size: usize,
    /// Breadth-first depth explored by the oracle.
    pub oracle_depth: usize,
    /// Distinct terms the oracle may visit.
    pub oracle_states: usize,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            max_steps: 10_000,
            max_term_size: 5_000,
            oracle_depth: 12,
            oracle_states: 200_000,
        }
    }
}

impl Budgets {
    pub fn oracle_limits(&self) -> OracleLimits {
        OracleLimits {
            max_depth: self.oracle_depth,
            max_term_size: self.max_term_size,
            max_states: self.oracle_states,
        }
    }
}
