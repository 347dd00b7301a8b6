//! Stream specifications: validation, unfolding into the basic format,
//! the overflow extension and cheap static checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse::parse_term;
use crate::terms::{Sort, Substitution, Symbol, Term, Var, CONS, OVERFLOW};
use crate::trs::{Rule, Signature, Trs};

/// Innermost steps allowed per data term by the termination heuristic.
const DATA_STEP_BUDGET: usize = 10_000;
/// Depth of the data terms tried by the termination heuristic.
const DATA_TERMINATION_DEPTH: usize = 4;
const DATA_TERMINATION_MAX_TERMS: usize = 5_000;

/// `(Σ_d, Σ_s, R_d, R_s)` together with the builtin `:`.
///
/// Rules keep their input order; `R_d` and `R_s` are the rules whose
/// left-hand side has sort data and stream respectively.
#[derive(Clone, Debug)]
pub struct StreamSpec {
    signature: Signature,
    rules: Vec<Rule>,
    trs: Trs,
    data_trs: Trs,
}

impl PartialEq for StreamSpec {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.rules == other.rules
    }
}

impl StreamSpec {
    /// Builds an unvalidated specification; only well-sortedness is checked.
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<StreamSpec> {
        if let Some(f) = signature.get(CONS) {
            if *f != Symbol::cons() {
                return Err(Error::ReservedSymbol(CONS.into()));
            }
        }
        let trs = Trs::new(signature.clone(), rules.clone())?;
        let data_rules = rules
            .iter()
            .filter(|r| r.sort() == Sort::Data)
            .cloned()
            .collect();
        let data_trs = Trs::new(signature.clone(), data_rules)?;
        Ok(StreamSpec {
            signature,
            rules,
            trs,
            data_trs,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// R_d.
    pub fn data_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.sort() == Sort::Data)
    }

    /// R_s.
    pub fn stream_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.sort() == Sort::Stream)
    }

    /// R_d ∪ R_s.
    pub fn trs(&self) -> Trs {
        self.trs.clone()
    }

    pub fn as_trs(&self) -> &Trs {
        &self.trs
    }

    /// R_d alone.
    pub fn data_trs(&self) -> &Trs {
        &self.data_trs
    }

    /// Parses a term over this signature.
    pub fn term(&self, text: &str) -> Result<Term> {
        parse_term(&self.signature, text)
    }

    pub fn data_universe(&self) -> DataUniverse {
        DataUniverse {
            constructors: self
                .signature
                .data_symbols()
                .filter(|f| !self.data_trs.is_defined(f))
                .cloned()
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn unfold(&self) -> Result<StreamSpec> {
        unfold(self)
    }

    pub fn extend_with_overflow(&self) -> Result<Trs> {
        extend_with_overflow(self)
    }

    pub fn balancedness_free_check(&self) -> FreeBalance {
        balancedness_free_check(self)
    }

    pub fn cons_reachability_check(&self) -> ConsReachability {
        cons_reachability_check(self)
    }
}

/// The data values `D`: ground constructor terms of `R_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataUniverse {
    pub constructors: BTreeSet<Symbol>,
}

impl DataUniverse {
    pub fn is_finite(&self) -> bool {
        self.constructors.iter().all(|c| c.arity() == 0)
    }

    pub fn is_empty(&self) -> bool {
        !self.constructors.iter().any(|c| c.arity() == 0)
    }

    /// Elements of `D` with depth at most `depth`.
    pub fn enumerate(&self, depth: usize) -> Vec<Term> {
        terms_up_to_depth(&self.constructors, depth, usize::MAX).0
    }
}

fn terms_up_to_depth(symbols: &BTreeSet<Symbol>, depth: usize, cap: usize) -> (Vec<Term>, bool) {
    let mut all: Vec<Term> = Vec::new();
    let mut complete = true;
    for _ in 0..depth {
        let mut next: Vec<Term> = Vec::new();
        for f in symbols {
            let mut combos: Vec<Vec<Term>> = vec![vec![]];
            for _ in 0..f.arity() {
                let mut extended = Vec::new();
                for prefix in &combos {
                    for a in &all {
                        let mut v = prefix.clone();
                        v.push(a.clone());
                        extended.push(v);
                        if extended.len() > cap {
                            complete = false;
                            break;
                        }
                    }
                }
                combos = extended;
            }
            next.extend(combos.into_iter().map(|args| Term::app(f.clone(), args)));
            if next.len() > cap {
                next.truncate(cap);
                complete = false;
            }
        }
        let known: BTreeSet<&Term> = all.iter().collect();
        let fresh: Vec<Term> = next.into_iter().filter(|t| !known.contains(t)).collect();
        all.extend(fresh);
        if all.len() > cap {
            all.truncate(cap);
            complete = false;
            break;
        }
    }
    (all, complete)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    WellSorted,
    DataRuleShape,
    StreamRuleShape,
    LeftLinear,
    NoOverlap,
    Exhaustive,
    DataTermination,
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Requirement::WellSorted => "well-sorted",
            Requirement::DataRuleShape => "data rule shape",
            Requirement::StreamRuleShape => "stream rule shape",
            Requirement::LeftLinear => "left-linear",
            Requirement::NoOverlap => "no overlaps",
            Requirement::Exhaustive => "exhaustive",
            Requirement::DataTermination => "data rules terminate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub requirement: Requirement,
    pub message: String,
    /// Offending rule labels, an uncovered instance, or a diverging term.
    pub evidence: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataTermination {
    /// No data rules.
    Trivial,
    /// Every ground data term normalised within budget and the set of
    /// ground data terms is finite.
    Checked,
    /// Bounded check passed on the small terms of an infinite set.
    Assumed,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub data_termination: DataTermination,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, requirement: Requirement) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(move |v| v.requirement == requirement)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            writeln!(f, "PASS")?;
        } else {
            writeln!(f, "FAIL")?;
        }
        for v in &self.violations {
            writeln!(f, "  [{}] {}", v.requirement, v.message)?;
        }
        writeln!(f, "  data termination: {:?}", self.data_termination)
    }
}

/// Checks every requirement of the stream specification format.
pub fn validate(spec: &StreamSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |requirement, message: String, evidence: Vec<String>| {
        violations.push(Violation {
            requirement,
            message,
            evidence,
        })
    };

    for rule in spec.rules() {
        if let Err(e) = rule.lhs().check_sorts().and(rule.rhs().check_sorts()) {
            push(
                Requirement::WellSorted,
                e.to_string(),
                vec![rule.label().into()],
            );
        }
    }

    let data_trs = spec.data_trs();
    for rule in spec.data_rules() {
        if let Some(f) = rule
            .lhs()
            .symbols()
            .into_iter()
            .chain(rule.rhs().symbols())
            .find(|f| f.sort() != Sort::Data)
        {
            push(
                Requirement::DataRuleShape,
                format!("data rule {} uses non-data symbol {f}", rule.label()),
                vec![rule.label().into()],
            );
        }
    }

    for rule in spec.stream_rules() {
        for problem in stream_rule_shape(rule, data_trs) {
            push(
                Requirement::StreamRuleShape,
                format!("rule {} ({rule}): {problem}", rule.label()),
                vec![rule.label().into()],
            );
        }
    }

    for rule in spec.rules().iter().filter(|r| !r.is_left_linear()) {
        push(
            Requirement::LeftLinear,
            format!(
                "left-hand side of {} repeats a variable: {}",
                rule.label(),
                rule.lhs()
            ),
            vec![rule.label().into()],
        );
    }

    for overlap in spec.as_trs().critical_overlaps() {
        push(
            Requirement::NoOverlap,
            overlap.to_string(),
            vec![overlap.outer.clone(), overlap.inner.clone()],
        );
    }

    let universe = spec.data_universe();
    for f in spec.signature().stream_symbols() {
        if let Some(instance) = uncovered_instance(spec, f, &universe) {
            push(
                Requirement::Exhaustive,
                format!("no rule matches {instance}"),
                vec![instance.to_string()],
            );
        }
    }

    let data_termination = check_data_termination(spec);
    if let (DataTermination::Failed, Some(t)) = data_termination {
        push(
            Requirement::DataTermination,
            format!("no normal form of {t} within {DATA_STEP_BUDGET} innermost steps"),
            vec![t.to_string()],
        );
    }

    ValidationReport {
        violations,
        data_termination: data_termination.0,
    }
}

fn is_var_or_cons_of_vars(t: &Term) -> bool {
    match t.as_cons() {
        Some((h, tl)) => h.is_var() && tl.is_var(),
        None => t.is_var(),
    }
}

fn stream_rule_shape(rule: &Rule, data_trs: &Trs) -> Vec<String> {
    let mut problems = Vec::new();
    let f = rule.root();
    if f.is_cons() || f.name() == OVERFLOW {
        problems.push(format!("left-hand side is headed by reserved symbol {f}"));
        return problems;
    }
    let args = rule.lhs().args();
    for (i, arg) in args.iter().enumerate().take(f.data_arity()) {
        match arg {
            Term::Var(_) => {}
            Term::App(c, sub) => {
                if data_trs.is_defined(c) {
                    problems.push(format!(
                        "data argument {} is headed by defined symbol {c}",
                        i + 1
                    ));
                } else if !sub.iter().all(Term::is_var) {
                    problems.push(format!(
                        "data argument {} ({arg}) is nested deeper than one constructor",
                        i + 1
                    ));
                }
            }
        }
    }
    for (i, arg) in args.iter().enumerate().skip(f.data_arity()) {
        if !is_var_or_cons_of_vars(arg) {
            problems.push(format!(
                "stream argument {} ({arg}) must be a variable or x:σ; unfold first",
                i + 1
            ));
        }
    }
    problems
}

#[derive(Clone, Debug)]
enum Pat {
    Wild,
    Ctor(Symbol, Vec<Pat>),
}

fn to_pat(t: &Term) -> Pat {
    match t {
        Term::Var(_) => Pat::Wild,
        Term::App(c, args) => Pat::Ctor(c.clone(), args.iter().map(to_pat).collect()),
    }
}

/// Matrix-style coverage check; returns a vector of patterns matched by no
/// row, or `None` when the rows cover every vector of values.
fn uncovered(rows: &[Vec<Pat>], width: usize, ctors: &[Symbol]) -> Option<Vec<Pat>> {
    if width == 0 {
        return rows.is_empty().then(Vec::new);
    }
    let heads: BTreeSet<&Symbol> = rows
        .iter()
        .filter_map(|r| match &r[0] {
            Pat::Ctor(c, _) => Some(c),
            Pat::Wild => None,
        })
        .collect();
    let complete = ctors.iter().all(|c| heads.contains(c));
    if complete {
        // includes the vacuous case of an empty data universe
        for c in ctors {
            let k = c.arity();
            let specialized: Vec<Vec<Pat>> = rows
                .iter()
                .filter_map(|r| match &r[0] {
                    Pat::Ctor(d, sub) if d == c => {
                        Some(sub.iter().cloned().chain(r[1..].iter().cloned()).collect())
                    }
                    Pat::Ctor(..) => None,
                    Pat::Wild => Some(
                        std::iter::repeat_n(Pat::Wild, k)
                            .chain(r[1..].iter().cloned())
                            .collect(),
                    ),
                })
                .collect();
            if let Some(mut w) = uncovered(&specialized, width - 1 + k, ctors) {
                let rest = w.split_off(k);
                let mut out = vec![Pat::Ctor(c.clone(), w)];
                out.extend(rest);
                return Some(out);
            }
        }
        None
    } else {
        let default: Vec<Vec<Pat>> = rows
            .iter()
            .filter(|r| matches!(r[0], Pat::Wild))
            .map(|r| r[1..].to_vec())
            .collect();
        let mut w = uncovered(&default, width - 1, ctors)?;
        let missing = ctors
            .iter()
            .find(|c| !heads.contains(c))
            .expect("incomplete");
        let mut out = vec![Pat::Ctor(missing.clone(), vec![Pat::Wild; missing.arity()])];
        out.append(&mut w);
        Some(out)
    }
}

fn pat_to_term(p: &Pat, fresh: &mut usize) -> Term {
    match p {
        Pat::Wild => {
            *fresh += 1;
            Term::var(&format!("x{fresh}"), Sort::Data)
        }
        Pat::Ctor(c, sub) => Term::app(
            c.clone(),
            sub.iter().map(|s| pat_to_term(s, fresh)).collect(),
        ),
    }
}

/// A term `f(u₁,…,uₙ, σ₁,…,σₘ)` whose data part no rule of `f` covers.
///
/// Stream columns never restrict coverage: both a variable and `x:σ`
/// match every `u:t`.
fn uncovered_instance(spec: &StreamSpec, f: &Symbol, universe: &DataUniverse) -> Option<Term> {
    let n = f.data_arity();
    let rows: Vec<Vec<Pat>> = spec
        .stream_rules()
        .filter(|r| r.root() == f)
        .map(|r| r.lhs().args()[..n].iter().map(to_pat).collect())
        .collect();
    let ctors: Vec<Symbol> = universe.constructors.iter().cloned().collect();
    let witness = uncovered(&rows, n, &ctors)?;
    let mut fresh = 0;
    let mut args: Vec<Term> = witness.iter().map(|p| pat_to_term(p, &mut fresh)).collect();
    for k in 0..f.stream_arity() {
        let name = match k {
            0 => "sigma".to_string(),
            1 => "tau".to_string(),
            _ => format!("sigma{k}"),
        };
        args.push(Term::var(&name, Sort::Stream));
    }
    Some(Term::app(f.clone(), args))
}

fn check_data_termination(spec: &StreamSpec) -> (DataTermination, Option<Term>) {
    let data_trs = spec.data_trs();
    if data_trs.rules().is_empty() {
        return (DataTermination::Trivial, None);
    }
    let symbols: BTreeSet<Symbol> = spec.signature().data_symbols().cloned().collect();
    let (terms, complete) =
        terms_up_to_depth(&symbols, DATA_TERMINATION_DEPTH, DATA_TERMINATION_MAX_TERMS);
    for t in terms {
        if data_trs.normalize_innermost(&t, DATA_STEP_BUDGET).is_none() {
            return (DataTermination::Failed, Some(t));
        }
    }
    let finite = symbols.iter().all(|f| f.arity() == 0);
    if finite && complete {
        (DataTermination::Checked, None)
    } else {
        (DataTermination::Assumed, None)
    }
}

/// Rewrites nested stream patterns (`d₁:d₂:σ`, `0:σ`) into the basic format
/// by introducing fresh symbols that take the inspected head as an extra
/// data argument.
pub fn unfold(spec: &StreamSpec) -> Result<StreamSpec> {
    if let Some(rule) = spec.as_trs().left_linearity_violation() {
        return Err(Error::NotLeftLinear(format!("{}: {rule}", rule.label())));
    }
    let mut signature = spec.signature().clone();
    let mut out = Vec::new();
    let mut done = BTreeSet::new();
    for rule in spec.rules() {
        if rule.sort() == Sort::Data {
            out.push(rule.clone());
            continue;
        }
        let f = rule.root().clone();
        if !done.insert(f.name().to_string()) {
            continue;
        }
        let group: Vec<Rule> = spec
            .stream_rules()
            .filter(|r| *r.root() == f)
            .cloned()
            .collect();
        out.extend(unfold_group(&mut signature, spec.data_trs(), &f, group)?);
    }
    StreamSpec::new(signature, relabel(out))
}

fn unfold_group(
    signature: &mut Signature,
    data_trs: &Trs,
    f: &Symbol,
    rules: Vec<Rule>,
) -> Result<Vec<Rule>> {
    let n = f.data_arity();
    let m = f.stream_arity();
    for rule in &rules {
        if let Some(arg) = rule.lhs().args()[n..]
            .iter()
            .find(|a| !a.is_var() && !a.is_cons())
        {
            return Err(Error::Unfold(format!(
                "stream argument {arg} of {} is neither a variable nor a ':' pattern",
                rule.label()
            )));
        }
    }
    let column = (0..m).find(|&j| {
        rules
            .iter()
            .any(|r| !is_var_or_cons_of_vars(&r.lhs().args()[n + j]))
    });
    let Some(j) = column else {
        return Ok(rules);
    };

    let g = Symbol::stream(&fresh_symbol_name(signature, f.name()), n + 1, m);
    signature.add(g.clone())?;

    let ys: Vec<Term> = (1..=n)
        .map(|i| Term::var(&format!("y{i}"), Sort::Data))
        .collect();
    let taus: Vec<Term> = (1..=m)
        .map(|k| Term::var(&format!("tau{k}"), Sort::Stream))
        .collect();
    let head = Term::var("x", Sort::Data);
    let tail = Term::var("sigma", Sort::Stream);
    let mut lhs_args = ys.clone();
    let mut rhs_args = ys.clone();
    rhs_args.push(head.clone());
    for (k, tau) in taus.iter().enumerate() {
        if k == j {
            lhs_args.push(Term::cons(head.clone(), tail.clone()));
            rhs_args.push(tail.clone());
        } else {
            lhs_args.push(tau.clone());
            rhs_args.push(tau.clone());
        }
    }
    let generic = Rule::new(
        "",
        Term::app(f.clone(), lhs_args),
        Term::app(g.clone(), rhs_args),
    )?;

    let mut g_rules = Vec::with_capacity(rules.len());
    for rule in &rules {
        let args = rule.lhs().args();
        let (h, t, rhs) = match args[n + j].as_cons() {
            Some((h, t)) => (h.clone(), t.clone(), rule.rhs().clone()),
            None => {
                let v = args[n + j].as_var().expect("checked above").clone();
                let taken = rule.lhs().vars();
                let x = fresh_var(&taken, "x", Sort::Data);
                let s = fresh_var(&taken, "sigma", Sort::Stream);
                let theta: Substitution =
                    [(v, Term::cons(Term::Var(x.clone()), Term::Var(s.clone())))]
                        .into_iter()
                        .collect();
                (Term::Var(x), Term::Var(s), rule.rhs().apply(&theta))
            }
        };
        if let Some(c) = h.root().filter(|c| data_trs.is_defined(c)) {
            return Err(Error::Unfold(format!(
                "rule {} matches on defined data symbol {c}",
                rule.label()
            )));
        }
        let mut new_args: Vec<Term> = args[..n].to_vec();
        new_args.push(h);
        new_args.extend_from_slice(&args[n..n + j]);
        new_args.push(t);
        new_args.extend_from_slice(&args[n + j + 1..]);
        g_rules.push(Rule::new(
            rule.label(),
            Term::app(g.clone(), new_args),
            rhs,
        )?);
    }
    let mut out = vec![generic];
    out.extend(unfold_group(signature, data_trs, &g, g_rules)?);
    Ok(out)
}

/// `f1`, `f2`, ... for `f` and for symbols already named `fk`.
fn fresh_symbol_name(signature: &Signature, name: &str) -> String {
    let base = match name.trim_end_matches(|c: char| c.is_ascii_digit()) {
        "" => name,
        stem => stem,
    };
    (1..)
        .map(|k| format!("{base}{k}"))
        .find(|name| !signature.contains(name))
        .expect("unbounded")
}

fn fresh_var(taken: &BTreeSet<Var>, base: &str, sort: Sort) -> Var {
    let names: BTreeSet<&str> = taken.iter().map(Var::name).collect();
    std::iter::once(base.to_string())
        .chain((1..).map(|k| format!("{base}{k}")))
        .find(|name| !names.contains(name.as_str()))
        .map(|name| Var::new(&name, sort))
        .expect("unbounded")
}

/// Labels rules `root#k`, numbering the rules of each root symbol from 1
/// in order.
pub fn relabel(rules: Vec<Rule>) -> Vec<Rule> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    rules
        .into_iter()
        .map(|r| {
            let k = counts.entry(r.root().name().to_string()).or_default();
            *k += 1;
            let label = format!("{}#{k}", r.root().name());
            r.with_label(label)
        })
        .collect()
}

/// `R_d ∪ R_s ∪ {x:σ → overflow}`.
pub fn extend_with_overflow(spec: &StreamSpec) -> Result<Trs> {
    if spec.signature().contains(OVERFLOW) {
        return Err(Error::ReservedSymbol(OVERFLOW.into()));
    }
    let mut signature = spec.signature().clone();
    signature.add(Symbol::overflow())?;
    let mut rules = spec.rules().to_vec();
    rules.push(Rule::overflow());
    Trs::new(signature, rules)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeBalance {
    pub holds: bool,
    pub reason: String,
}

/// Whether every infinite outermost reduction of the extended system is
/// automatically balanced: no data rules and at most one stream argument
/// per stream symbol.
pub fn balancedness_free_check(spec: &StreamSpec) -> FreeBalance {
    if let Some(f) = spec
        .signature()
        .stream_symbols()
        .find(|f| f.stream_arity() > 1)
    {
        return FreeBalance {
            holds: false,
            reason: format!("{f} has {} stream arguments", f.stream_arity()),
        };
    }
    if let Some(rule) = spec.data_rules().next() {
        return FreeBalance {
            holds: false,
            reason: format!("data rules are present (e.g. {rule})"),
        };
    }
    FreeBalance {
        holds: true,
        reason: "no data rules and every stream symbol has at most one stream argument".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConsReachability {
    /// Some stream rule produces `:`.
    Reachable,
    /// No stream rule produces `:`; the witness is a `:`-free ground stream
    /// term, none of whose reducts is `:`-headed.
    Unreachable { witness: Term },
    /// No rule produces `:` but there are no ground stream terms at all.
    NoGroundStreamTerms,
}

impl ConsReachability {
    /// `false` exactly when non-productivity is certain.
    pub fn holds(&self) -> bool {
        !matches!(self, ConsReachability::Unreachable { .. })
    }
}

pub fn cons_reachability_check(spec: &StreamSpec) -> ConsReachability {
    if spec.stream_rules().any(|r| r.rhs().contains_symbol(CONS)) {
        return ConsReachability::Reachable;
    }
    let smallest_data =
        crate::enumerate::ground_terms(spec.signature().data_symbols(), Sort::Data, 1)
            .into_iter()
            .next();
    let witness = spec
        .signature()
        .stream_symbols()
        .filter(|f| f.stream_arity() == 0)
        .find_map(|f| {
            let args = (0..f.data_arity())
                .map(|_| smallest_data.clone())
                .collect::<Option<Vec<_>>>()?;
            Some(Term::app(f.clone(), args))
        });
    match witness {
        Some(witness) => ConsReachability::Unreachable { witness },
        None => ConsReachability::NoGroundStreamTerms,
    }
}
