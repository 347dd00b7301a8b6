//! Rewrite steps, parallel steps and reduction traces, together with the
//! trace transformations that move outermost steps in front of
//! non-outermost ones.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terms::{Position, Substitution, Term, Var};
use crate::trs::{residuals, Rule, Trs};

/// Upper bound on swaps performed by [`split_trace`].
const SURGERY_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Outermost,
    NonOutermost,
}

/// Outermost iff no redex sits strictly above `p`.
pub fn classify_step(trs: &Trs, t: &Term, p: &Position) -> Result<StepKind> {
    if trs.match_at(t, p).is_none() {
        return Err(Error::NotARedex {
            term: t.to_string(),
            position: p.clone(),
        });
    }
    Ok(if trs.has_redex_above(t, p) {
        StepKind::NonOutermost
    } else {
        StepKind::Outermost
    })
}

/// `source →_position target` using the rule named `rule`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    source: Term,
    position: Position,
    rule: String,
    target: Term,
    kind: StepKind,
}

impl Step {
    /// The step at `p` with whichever rule matches there.
    pub fn new(trs: &Trs, source: &Term, p: &Position) -> Result<Step> {
        let (target, rule) = trs.rewrite_at(source, p)?;
        let kind = classify_step(trs, source, p)?;
        Ok(Step {
            source: source.clone(),
            position: p.clone(),
            rule: rule.label().to_string(),
            target,
            kind,
        })
    }

    /// The step at `p` with a named rule.
    pub fn with_rule(trs: &Trs, source: &Term, p: &Position, label: &str) -> Result<Step> {
        let rule = trs.rule(label)?;
        let target = trs.apply_rule_at(source, p, rule)?;
        let kind = classify_step(trs, source, p)?;
        Ok(Step {
            source: source.clone(),
            position: p.clone(),
            rule: label.to_string(),
            target,
            kind,
        })
    }

    pub fn source(&self) -> &Term {
        &self.source
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn rule(&self) -> &str {
        &self.rule
    }

    pub fn target(&self) -> &Term {
        &self.target
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    pub fn is_outermost(&self) -> bool {
        self.kind == StepKind::Outermost
    }

    /// Re-derives the step from `trs` and compares.
    pub fn verify(&self, trs: &Trs) -> Result<()> {
        let again = Step::with_rule(trs, &self.source, &self.position, &self.rule)?;
        if again != *self {
            return Err(Error::InvalidTrace(format!("step {self} does not replay")));
        }
        Ok(())
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.kind {
            StepKind::Outermost => "→o",
            StepKind::NonOutermost => "→no",
        };
        write!(
            f,
            "{} {arrow}[{} @ {}] {}",
            self.source, self.rule, self.position, self.target
        )
    }
}

/// Contraction of a set of pairwise parallel redexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelStep {
    source: Term,
    redexes: Vec<(Position, String)>,
    target: Term,
}

impl ParallelStep {
    pub fn identity(t: &Term) -> ParallelStep {
        ParallelStep {
            source: t.clone(),
            redexes: Vec::new(),
            target: t.clone(),
        }
    }

    pub fn source(&self) -> &Term {
        &self.source
    }

    pub fn target(&self) -> &Term {
        &self.target
    }

    pub fn redexes(&self) -> &[(Position, String)] {
        &self.redexes
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.redexes.iter().map(|(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.redexes.is_empty()
    }

    /// True when every contracted redex has a redex above it in the source.
    pub fn is_non_outermost(&self, trs: &Trs) -> bool {
        self.positions()
            .all(|p| trs.has_redex_above(&self.source, p))
    }

    /// The same contraction as single steps, leftmost first.
    pub fn sequentialize(&self, trs: &Trs) -> Result<Vec<Step>> {
        let mut redexes = self.redexes.clone();
        redexes.sort();
        let mut current = self.source.clone();
        let mut out = Vec::with_capacity(redexes.len());
        for (p, label) in redexes {
            let step = Step::with_rule(trs, &current, &p, &label)?;
            current = step.target.clone();
            out.push(step);
        }
        Ok(out)
    }

    /// Applies the redexes in the given order of indices.
    pub fn apply_in_order(&self, trs: &Trs, order: &[usize]) -> Result<Term> {
        let mut current = self.source.clone();
        for &i in order {
            let (p, label) = &self.redexes[i];
            current = trs.apply_rule_at(&current, p, trs.rule(label)?)?;
        }
        Ok(current)
    }
}

impl fmt::Display for ParallelStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∥→[", self.source)?;
        for (i, (p, r)) in self.redexes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r} @ {p}")?;
        }
        write!(f, "] {}", self.target)
    }
}

/// Builds `t ∥→ t'` contracting the given pairwise parallel redexes.
pub fn parallel_step(trs: &Trs, t: &Term, redexes: &[(Position, String)]) -> Result<ParallelStep> {
    for (i, (p, _)) in redexes.iter().enumerate() {
        for (q, _) in &redexes[i + 1..] {
            if !p.is_parallel(q) {
                return Err(Error::OverlappingPositions(p.clone(), q.clone()));
            }
        }
    }
    let mut current = t.clone();
    for (p, label) in redexes {
        let rule = trs.rule(label)?;
        current = trs.apply_rule_at(&current, p, rule)?;
    }
    let step = ParallelStep {
        source: t.clone(),
        redexes: redexes.to_vec(),
        target: current,
    };
    debug_assert_eq!(
        step.apply_in_order(trs, &(0..redexes.len()).rev().collect::<Vec<_>>())
            .ok()
            .as_ref(),
        Some(&step.target)
    );
    Ok(step)
}

/// Like [`parallel_step`], picking the matching rule at each position.
pub fn parallel_step_at(trs: &Trs, t: &Term, positions: &[Position]) -> Result<ParallelStep> {
    let redexes = positions
        .iter()
        .map(|p| {
            let (rule, _) = trs.match_at(t, p).ok_or_else(|| Error::NotARedex {
                term: t.to_string(),
                position: p.clone(),
            })?;
            Ok((p.clone(), rule.label().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    parallel_step(trs, t, &redexes)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    initial: Term,
    steps: Vec<Step>,
}

impl Trace {
    pub fn new(initial: Term) -> Trace {
        Trace {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(initial: Term, steps: Vec<Step>) -> Result<Trace> {
        let mut trace = Trace::new(initial);
        for step in steps {
            trace.push(step)?;
        }
        Ok(trace)
    }

    /// Replays `(position, rule)` pairs from `initial`.
    pub fn replay(trs: &Trs, initial: &Term, moves: &[(Position, String)]) -> Result<Trace> {
        let mut trace = Trace::new(initial.clone());
        for (p, label) in moves {
            let step = Step::with_rule(trs, trace.last(), p, label)?;
            trace.push(step)?;
        }
        Ok(trace)
    }

    pub fn push(&mut self, step: Step) -> Result<()> {
        if step.source != *self.last() {
            return Err(Error::InvalidTrace(format!(
                "step from {} does not continue {}",
                step.source,
                self.last()
            )));
        }
        self.steps.push(step);
        Ok(())
    }

    pub fn initial(&self) -> &Term {
        &self.initial
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.target)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `t₀, t₁, …, tₙ`.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.target))
    }

    pub fn is_outermost(&self) -> bool {
        self.steps.iter().all(Step::is_outermost)
    }

    pub fn verify(&self, trs: &Trs) -> Result<()> {
        self.steps.iter().try_for_each(|s| s.verify(trs))
    }

    pub fn moves(&self) -> Vec<(Position, String)> {
        self.steps
            .iter()
            .map(|s| (s.position.clone(), s.rule.clone()))
            .collect()
    }

    pub fn concat(mut self, other: Trace) -> Result<Trace> {
        for step in other.steps {
            self.push(step)?;
        }
        Ok(self)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.initial)?;
        for s in &self.steps {
            write!(f, "\n  →[{} @ {}] {}", s.rule, s.position, s.target)?;
        }
        Ok(())
    }
}

/// The two sides of the commuting square given by the parallel moves
/// property for one rule.
#[derive(Clone, Debug)]
pub struct ParallelMoves {
    /// `ℓς ∥→ ℓς'`.
    pub lhs_parallel: ParallelStep,
    /// `ℓς' → rς'`.
    pub lhs_contract: Step,
    /// `ℓς → rς`.
    pub rhs_contract: Step,
    /// `rς ∥→ rς'`.
    pub rhs_parallel: ParallelStep,
}

impl ParallelMoves {
    pub fn lhs_before(&self) -> &Term {
        self.rhs_contract.source()
    }

    pub fn rhs_before(&self) -> &Term {
        self.rhs_contract.target()
    }

    pub fn rhs_after(&self) -> &Term {
        self.lhs_contract.target()
    }
}

/// Joins `ℓς → rς` with variable-wise parallel steps `xς ∥→ xς'`.
///
/// A variable whose two instances agree may be left out of `steps`.
pub fn parallel_moves_join(
    trs: &Trs,
    rule: &Rule,
    before: &Substitution,
    after: &Substitution,
    steps: &BTreeMap<Var, ParallelStep>,
) -> Result<ParallelMoves> {
    if !rule.is_left_linear() {
        return Err(Error::NotLeftLinear(rule.to_string()));
    }
    let identity: BTreeMap<Var, ParallelStep> = rule
        .lhs()
        .vars()
        .into_iter()
        .map(|x| {
            let from = before.apply(&Term::Var(x.clone()));
            let to = after.apply(&Term::Var(x.clone()));
            let step = match steps.get(&x) {
                Some(step) => step.clone(),
                None if from == to => ParallelStep::identity(&from),
                None => return Err(Error::MissingVariableStep(x.to_string())),
            };
            if *step.source() != from || *step.target() != to {
                return Err(Error::InvalidTrace(format!(
                    "step for {x} does not lead from {from} to {to}"
                )));
            }
            Ok((x, step))
        })
        .collect::<Result<_>>()?;

    let shifted = |pattern: &Term| -> Vec<(Position, String)> {
        pattern
            .var_positions()
            .into_iter()
            .flat_map(|(at, x)| {
                identity[&x]
                    .redexes()
                    .iter()
                    .map(move |(q, label)| (at.concat(q), label.clone()))
                    .collect::<Vec<_>>()
            })
            .collect()
    };

    let lhs_before = rule.lhs().apply(before);
    let lhs_parallel = parallel_step(trs, &lhs_before, &shifted(rule.lhs()))?;
    let lhs_contract =
        Step::with_rule(trs, lhs_parallel.target(), &Position::root(), rule.label())?;
    let rhs_contract = Step::with_rule(trs, &lhs_before, &Position::root(), rule.label())?;
    let rhs_parallel = parallel_step(trs, rhs_contract.target(), &shifted(rule.rhs()))?;
    if lhs_contract.target() != rhs_parallel.target() {
        return Err(Error::InvalidTrace(format!(
            "parallel moves do not join: {} vs {}",
            lhs_contract.target(),
            rhs_parallel.target()
        )));
    }
    Ok(ParallelMoves {
        lhs_parallel,
        lhs_contract,
        rhs_contract,
        rhs_parallel,
    })
}

/// `t₁ →o_p t →o* t' ∥no→ t₃`, the result of moving an outermost step in
/// front of a parallel non-outermost step.
#[derive(Clone, Debug)]
pub struct Swapped {
    pub first: Step,
    pub outermost: Vec<Step>,
    pub non_outermost: ParallelStep,
}

impl Swapped {
    pub fn outermost_steps(&self) -> impl Iterator<Item = &Step> {
        std::iter::once(&self.first).chain(self.outermost.iter())
    }
}

/// Rewrites `t₁ ∥no→ t₂ →o_p t₃` into `t₁ →o_p t →o* t' ∥no→ t₃`.
pub fn swap_no_then_o(trs: &Trs, no: &ParallelStep, o: &Step) -> Result<Swapped> {
    if !trs.is_orthogonal() {
        return Err(Error::NotOrthogonal(
            "swapping steps requires an orthogonal system".into(),
        ));
    }
    swap_unchecked(trs, no, o)
}

fn swap_unchecked(trs: &Trs, no: &ParallelStep, o: &Step) -> Result<Swapped> {
    if no.target() != o.source() {
        return Err(Error::InvalidTrace("segment does not chain".into()));
    }
    if !o.is_outermost() {
        return Err(Error::InvalidTrace(format!("{o} is not outermost")));
    }
    if !no.is_non_outermost(trs) {
        return Err(Error::InvalidTrace(format!("{no} has an outermost redex")));
    }
    let p = o.position();
    for q in no.positions() {
        if !(q.is_parallel(p) || p.is_above(q)) {
            return Err(Error::InvalidTrace(format!(
                "outermost step at {p} is not parallel to or above {q}"
            )));
        }
    }

    let t1 = no.source();
    let rule = trs.rule(o.rule())?;
    let first = Step::with_rule(trs, t1, p, o.rule())?;
    if !first.is_outermost() {
        return Err(Error::InvalidTrace(format!("{first} is not outermost")));
    }

    let mut pending: Vec<(Position, String)> = Vec::new();
    for (q, label) in no.redexes() {
        if q.is_parallel(p) {
            pending.push((q.clone(), label.clone()));
        } else {
            for r in residuals(t1, p, rule, q)? {
                pending.push((r, label.clone()));
            }
        }
    }
    pending.sort();

    let mut current = first.target().clone();
    let mut outermost = Vec::new();
    while let Some(i) = pending
        .iter()
        .position(|(q, _)| !trs.has_redex_above(&current, q))
    {
        let (q, label) = pending.remove(i);
        let step = Step::with_rule(trs, &current, &q, &label)?;
        current = step.target().clone();
        outermost.push(step);
    }
    let non_outermost = parallel_step(trs, &current, &pending)?;
    if non_outermost.target() != o.target() {
        return Err(Error::InvalidTrace(format!(
            "swap reached {} instead of {}",
            non_outermost.target(),
            o.target()
        )));
    }
    debug_assert!(non_outermost.is_non_outermost(trs));
    Ok(Swapped {
        first,
        outermost,
        non_outermost,
    })
}

/// Splits `t →* t'` into `t →o* t̂ →no* t'`.
pub fn split_trace(trs: &Trs, trace: &Trace) -> Result<(Trace, Trace)> {
    if !trs.is_orthogonal() {
        return Err(Error::NotOrthogonal(
            "splitting a trace requires an orthogonal system".into(),
        ));
    }
    let mut budget = SURGERY_BUDGET;
    let mut prefix: Vec<Step> = Vec::new();
    let mut suffix: Vec<ParallelStep> = Vec::new();
    let mut current = trace.initial().clone();
    for original in trace.steps() {
        let step = Step::with_rule(trs, &current, original.position(), original.rule())?;
        if step.target() != original.target() {
            return Err(Error::InvalidTrace(format!("{original} does not replay")));
        }
        current = step.target().clone();
        if step.is_outermost() {
            let (outs, rest) = push_back(trs, suffix, step, &mut budget)?;
            prefix.extend(outs);
            suffix = rest;
        } else {
            suffix.push(parallel_step(
                trs,
                step.source(),
                &[(step.position().clone(), step.rule().to_string())],
            )?);
        }
    }
    let outer = Trace::from_steps(trace.initial().clone(), prefix)?;
    let mut inner = Trace::new(outer.last().clone());
    for par in &suffix {
        for step in par.sequentialize(trs)? {
            if step.is_outermost() {
                return Err(Error::InvalidTrace(format!(
                    "{step} became outermost after reordering"
                )));
            }
            inner.push(step)?;
        }
    }
    if inner.last() != trace.last() {
        return Err(Error::InvalidTrace("split changed the final term".into()));
    }
    Ok((outer, inner))
}

fn push_back(
    trs: &Trs,
    mut pars: Vec<ParallelStep>,
    o: Step,
    budget: &mut usize,
) -> Result<(Vec<Step>, Vec<ParallelStep>)> {
    let Some(last) = pars.pop() else {
        return Ok((vec![o], pars));
    };
    if *budget == 0 {
        return Err(Error::SurgeryBudget(SURGERY_BUDGET));
    }
    *budget -= 1;
    let swapped = swap_unchecked(trs, &last, &o)?;
    let mut outs = Vec::new();
    let mut acc = pars;
    for step in swapped.outermost_steps() {
        let (moved, rest) = push_back(trs, acc, step.clone(), budget)?;
        outs.extend(moved);
        acc = rest;
    }
    if !swapped.non_outermost.is_empty() {
        acc.push(swapped.non_outermost);
    }
    Ok((outs, acc))
}

/// A redex position of term `index` not yet hit by a step at or above it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Obligation {
    pub index: usize,
    pub position: Position,
}

/// Redex positions `q` of each `tᵢ` for which no step `j ≥ i` of the
/// finite outermost trace has `pⱼ ≤ q`.
pub fn check_balanced_prefix(trs: &Trs, trace: &Trace) -> Result<Vec<Obligation>> {
    if let Some(step) = trace.steps().iter().find(|s| !s.is_outermost()) {
        return Err(Error::InvalidTrace(format!("{step} is not outermost")));
    }
    let terms: Vec<&Term> = trace.terms().collect();
    let mut later: HashSet<&Position> = HashSet::new();
    let mut pending = Vec::new();
    for i in (0..terms.len()).rev() {
        if let Some(step) = trace.steps().get(i) {
            later.insert(step.position());
        }
        for q in trs.redex_positions(terms[i]) {
            let discharged = later.contains(&q) || q.ancestors().any(|a| later.contains(&a));
            if !discharged {
                pending.push(Obligation {
                    index: i,
                    position: q,
                });
            }
        }
    }
    pending.sort();
    Ok(pending)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;
    use crate::streamspec::StreamSpec;

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

    const FC: &str = "
        c : s
        f : s -> s
        g : d s -> s
        0 : d
        1 : d
        c -> 1:c
        f(x:σ) -> g(x, σ)
        g(0, σ) -> f(σ)
        g(1, σ) -> 1:f(σ)
    ";

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    fn spec(text: &str) -> StreamSpec {
        parse_spec(text).unwrap()
    }

    #[test]
    fn step_classification() {
        let fc = spec(FC);
        let ext = fc.extend_with_overflow().unwrap();
        let t = fc.term("f(1:c)").unwrap();
        assert_eq!(
            classify_step(&ext, &t, &Position::root()).unwrap(),
            StepKind::Outermost
        );
        assert_eq!(
            classify_step(&ext, &t, &pos("1")).unwrap(),
            StepKind::NonOutermost
        );
        let c = fc.term("c").unwrap();
        assert_eq!(
            classify_step(&ext, &c, &Position::root()).unwrap(),
            StepKind::Outermost
        );
        assert!(classify_step(&ext, &c, &pos("1")).is_err());
    }

    #[test]
    fn parallel_steps() {
        let m = spec(MORSE);
        let trs = m.trs();
        let t = m.term("zip(inv(0:morse), tail(1:morse))").unwrap();
        let step = parallel_step_at(&trs, &t, &[pos("1"), pos("2")]).unwrap();
        assert_eq!(step.target().to_string(), "zip(not(0):inv(morse), morse)");
        assert_eq!(parallel_step_at(&trs, &t, &[]).unwrap().target(), &t);
        assert!(matches!(
            parallel_step_at(&trs, &t, &[pos("1"), pos("1.1.2")]),
            Err(Error::OverlappingPositions(..))
        ));
        let single = parallel_step_at(&trs, &t, &[pos("2")]).unwrap();
        let seq = single.sequentialize(&trs).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq[0].target(), single.target());
    }

    #[test]
    fn parallel_moves_tail_example() {
        let text = format!("{FC}\ntail : s -> s\ntail(x:σ) -> σ");
        let s = spec(&text);
        let trs = s.trs();
        let rule = trs.rule("tail#1").unwrap().clone();
        let x = Var::new("x", crate::terms::Sort::Data);
        let sigma = Var::new("sigma", crate::terms::Sort::Stream);
        let zero = s.term("0").unwrap();
        let before: Substitution = [
            (x.clone(), zero.clone()),
            (sigma.clone(), s.term("c").unwrap()),
        ]
        .into_iter()
        .collect();
        let after: Substitution = [(x, zero), (sigma.clone(), s.term("1:c").unwrap())]
            .into_iter()
            .collect();
        let mut steps = BTreeMap::new();
        steps.insert(
            sigma,
            parallel_step_at(&trs, &s.term("c").unwrap(), &[Position::root()]).unwrap(),
        );
        let square = parallel_moves_join(&trs, &rule, &before, &after, &steps).unwrap();
        assert_eq!(square.rhs_after().to_string(), "1:c");
        assert_eq!(square.rhs_parallel.target().to_string(), "1:c");

        let same = parallel_moves_join(&trs, &rule, &before, &before, &BTreeMap::new()).unwrap();
        assert!(same.lhs_parallel.is_empty() && same.rhs_parallel.is_empty());
        assert_eq!(same.rhs_after(), same.rhs_before());

        assert!(matches!(
            parallel_moves_join(&trs, &rule, &before, &after, &BTreeMap::new()),
            Err(Error::MissingVariableStep(_))
        ));
    }

    #[test]
    fn swap_with_parallel_positions() {
        let m = spec(MORSE);
        let trs = m.trs();
        // morse at 2.1.2 sits below the tail redex at 2
        let t1 = m.term("zip(inv(morse), tail(0:morse))").unwrap();
        let no = parallel_step_at(&trs, &t1, &[pos("2.1.2")]).unwrap();
        assert!(no.is_non_outermost(&trs));
        let o = Step::new(&trs, no.target(), &pos("1.1")).unwrap();
        assert!(o.is_outermost());
        let swapped = swap_no_then_o(&trs, &no, &o).unwrap();
        assert_eq!(swapped.first.position(), &pos("1.1"));
        assert_eq!(swapped.non_outermost.target(), o.target());
    }

    #[test]
    fn swap_where_outer_step_erases_inner_redex() {
        let m = spec(MORSE);
        let trs = m.trs();
        // tail(x:σ) → σ discards x, so the inner data step disappears
        let t1 = m.term("tail(not(0):morse)").unwrap();
        let no = parallel_step_at(&trs, &t1, &[pos("1.1")]).unwrap();
        let o = Step::new(&trs, no.target(), &Position::root()).unwrap();
        let swapped = swap_no_then_o(&trs, &no, &o).unwrap();
        assert!(swapped.non_outermost.is_empty());
        assert!(swapped.outermost.is_empty());
        assert_eq!(swapped.first.target(), o.target());
    }

    #[test]
    fn swap_moves_residual_below_copy() {
        let m = spec(MORSE);
        let trs = m.trs();
        // zip(x:σ, τ) → x:zip(τ, σ): the morse in σ moves to 2.2
        let t1 = m.term("zip(0:morse, morse)").unwrap();
        let no = parallel_step_at(&trs, &t1, &[pos("1.2")]).unwrap();
        let o = Step::new(&trs, no.target(), &Position::root()).unwrap();
        let swapped = swap_no_then_o(&trs, &no, &o).unwrap();
        assert_eq!(swapped.non_outermost.target(), o.target());
        // after the root step both morse occurrences are outermost
        assert_eq!(swapped.outermost.len(), 1);
        assert_eq!(swapped.outermost[0].position(), &pos("2.2"));
        assert!(swapped.non_outermost.is_empty());
    }

    #[test]
    fn split_examples() {
        let m = spec(MORSE);
        let trs = m.trs();
        let morse = m.term("morse").unwrap();
        let (o, no) = split_trace(&trs, &Trace::new(morse.clone())).unwrap();
        assert!(o.is_empty() && no.is_empty());

        let moves = vec![(Position::root(), "morse#1".to_string())];
        let trace = Trace::replay(&trs, &morse, &moves).unwrap();
        let (o, no) = split_trace(&trs, &trace).unwrap();
        assert_eq!(o, trace);
        assert!(no.is_empty());

        // morse → 0:zip(inv(morse), tail(morse)) → reduce the inner morse at 2.1.1
        let moves = vec![
            (Position::root(), "morse#1".to_string()),
            (pos("2.1.1"), "morse#1".to_string()),
            (pos("2.1"), "inv#1".to_string()),
        ];
        let trace = Trace::replay(&trs, &morse, &moves).unwrap();
        let (o, no) = split_trace(&trs, &trace).unwrap();
        assert!(o.is_outermost());
        assert!(no.steps().iter().all(|s| !s.is_outermost()));
        assert_eq!(no.last(), trace.last());
        let replayed = Trace::replay(&trs, &morse, &[o.moves(), no.moves()].concat()).unwrap();
        assert_eq!(replayed.last(), trace.last());
    }

    #[test]
    fn balanced_prefix_witnesses() {
        let m = spec(MORSE);
        let trs = m.trs();
        let t0 = m.term("tail(morse)").unwrap();
        let moves: Vec<(Position, String)> = [
            ("1", "morse#1"),
            ("ε", "tail#1"),
            ("2.1", "morse#1"),
            ("2", "tail#1"),
            ("2.2.1", "morse#1"),
            ("2.2", "tail#1"),
        ]
        .iter()
        .map(|(p, r)| (pos(p), r.to_string()))
        .collect();
        let trace = Trace::replay(&trs, &t0, &moves).unwrap();
        assert!(trace.is_outermost());
        let pending = check_balanced_prefix(&trs, &trace).unwrap();
        assert!(pending.contains(&Obligation {
            index: 2,
            position: pos("1.1")
        }));

        let c = spec("c : s\n1 : d\nc -> 1:c");
        let ext = c.extend_with_overflow().unwrap();
        let trace = Trace::replay(
            &ext,
            &c.term("c").unwrap(),
            &[
                (Position::root(), "c#1".into()),
                (Position::root(), "overflow".into()),
            ],
        )
        .unwrap();
        assert!(check_balanced_prefix(&ext, &trace).unwrap().is_empty());
    }

    #[test]
    fn non_outermost_traces_are_rejected_by_balance_check() {
        let m = spec(MORSE);
        let trs = m.trs();
        let t = m.term("tail(0:morse)").unwrap();
        let trace = Trace::replay(&trs, &t, &[(pos("1.2"), "morse#1".into())]).unwrap();
        assert!(check_balanced_prefix(&trs, &trace).is_err());
    }
}
