//! Rewrite rules, signatures and rewrite systems.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::terms::{
    self, match_term, matches_linear, unify, Position, Sort, Substitution, Symbol, Term, Var, CONS,
    OVERFLOW,
};

/// Label of the rule `x:σ → overflow`.
pub const OVERFLOW_LABEL: &str = "overflow";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    label: String,
    lhs: Term,
    rhs: Term,
}

impl Rule {
    pub fn new(label: impl Into<String>, lhs: Term, rhs: Term) -> Result<Rule> {
        let label = label.into();
        let invalid = |reason: String| Error::InvalidRule {
            label: label.clone(),
            reason,
        };
        if lhs.is_var() {
            return Err(invalid("left-hand side is a variable".into()));
        }
        if lhs.sort() != rhs.sort() {
            return Err(invalid(format!(
                "sides have different sorts ({} and {})",
                lhs.sort(),
                rhs.sort()
            )));
        }
        let lhs_vars = lhs.vars();
        if let Some(v) = rhs.vars().iter().find(|v| !lhs_vars.contains(v)) {
            return Err(invalid(format!("variable {v} does not occur on the left")));
        }
        lhs.check_sorts()?;
        rhs.check_sorts()?;
        Ok(Rule { label, lhs, rhs })
    }

    /// `x:σ → overflow`.
    pub fn overflow() -> Rule {
        let lhs = Term::cons(Term::var("x", Sort::Data), Term::var("sigma", Sort::Stream));
        Rule::new(OVERFLOW_LABEL, lhs, Term::overflow()).expect("overflow rule")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn root(&self) -> &Symbol {
        self.lhs.root().expect("lhs is not a variable")
    }

    pub fn sort(&self) -> Sort {
        self.lhs.sort()
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    pub fn with_label(&self, label: impl Into<String>) -> Rule {
        Rule {
            label: label.into(),
            ..self.clone()
        }
    }

    /// Appends `suffix` to every variable name.
    pub fn rename_vars(&self, suffix: &str) -> Rule {
        let rename = |v: &Var| Var::new(&format!("{}{suffix}", v.name()), v.sort());
        Rule {
            label: self.label.clone(),
            lhs: self.lhs.map_vars(&rename),
            rhs: self.rhs.map_vars(&rename),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A set of symbols keyed by name; always contains `:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, Symbol>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut symbols = BTreeMap::new();
        symbols.insert(CONS.to_string(), Symbol::cons());
        Signature { symbols }
    }
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Adds a symbol; re-adding an identical symbol is a no-op.
    pub fn add(&mut self, symbol: Symbol) -> Result<()> {
        match self.symbols.get(symbol.name()) {
            Some(existing) if *existing == symbol => Ok(()),
            Some(_) => Err(Error::ConflictingSymbol(symbol.name().to_string())),
            None => {
                self.symbols.insert(symbol.name().to_string(), symbol);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    /// Σ_d.
    pub fn data_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.iter().filter(|f| f.sort() == Sort::Data)
    }

    /// Σ_s, without `:` and `overflow`.
    pub fn stream_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.iter()
            .filter(|f| f.sort() == Sort::Stream && !f.is_cons() && f.name() != OVERFLOW)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Checks that every symbol of `t` is declared here with the same type.
    pub fn check_term(&self, t: &Term) -> Result<()> {
        for f in t.symbols() {
            match self.get(f.name()) {
                Some(g) if *g == f => {}
                Some(_) => return Err(Error::ConflictingSymbol(f.name().to_string())),
                None => return Err(Error::UndeclaredSymbol(f.name().to_string())),
            }
        }
        t.check_sorts()
    }
}

/// Two rules whose left-hand sides overlap: `inner`'s lhs unifies with the
/// subterm of `outer`'s lhs at the non-variable `position`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub outer: String,
    pub inner: String,
    pub position: Position,
    pub unifier: String,
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rules {} and {} overlap at position {} with unifier {}",
            self.outer, self.inner, self.position, self.unifier
        )
    }
}

/// Terms deeper than this are treated as diverging by
/// [`Trs::normalize_innermost`].
pub const MAX_NORMALIZE_DEPTH: usize = 512;

#[derive(Clone, Debug)]
pub struct Trs {
    signature: Signature,
    rules: Vec<Rule>,
    by_root: FxHashMap<String, Vec<usize>>,
    /// Per rule: the left-hand side is linear.
    linear: Vec<bool>,
}

impl PartialEq for Trs {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.rules == other.rules
    }
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Trs> {
        let mut by_root: FxHashMap<String, Vec<usize>> = FxHashMap::default();
        let mut labels = BTreeSet::new();
        for (i, rule) in rules.iter().enumerate() {
            if !labels.insert(rule.label()) {
                return Err(Error::DuplicateLabel(rule.label().to_string()));
            }
            signature.check_term(rule.lhs())?;
            signature.check_term(rule.rhs())?;
            by_root
                .entry(rule.root().name().to_string())
                .or_default()
                .push(i);
        }
        let linear = rules.iter().map(Rule::is_left_linear).collect();
        Ok(Trs {
            signature,
            rules,
            by_root,
            linear,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, label: &str) -> Result<&Rule> {
        self.rules
            .iter()
            .find(|r| r.label() == label)
            .ok_or_else(|| Error::UnknownRule(label.to_string()))
    }

    /// The first rule whose left-hand side repeats a variable.
    pub fn left_linearity_violation(&self) -> Option<&Rule> {
        self.rules.iter().find(|r| !r.is_left_linear())
    }

    pub fn is_left_linear(&self) -> bool {
        self.left_linearity_violation().is_none()
    }

    /// All overlaps between rule left-hand sides, except each rule with
    /// itself at the root.
    pub fn critical_overlaps(&self) -> Vec<Overlap> {
        let mut out = Vec::new();
        for (i, outer) in self.rules.iter().enumerate() {
            for (j, inner) in self.rules.iter().enumerate() {
                let inner = inner.rename_vars("'");
                for p in outer.lhs().positions() {
                    let sub = outer.lhs().get(&p).expect("own position");
                    // Root overlaps are symmetric; report each pair once.
                    if sub.is_var() || (p.is_root() && j <= i) {
                        continue;
                    }
                    if let Some(mgu) = unify(sub, inner.lhs()) {
                        out.push(Overlap {
                            outer: outer.label().to_string(),
                            inner: inner.label().to_string(),
                            position: p,
                            unifier: mgu.to_string(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_orthogonal(&self) -> bool {
        self.is_left_linear() && self.critical_overlaps().is_empty()
    }

    /// Symbols heading no left-hand side.
    pub fn constructors(&self) -> BTreeSet<Symbol> {
        self.signature
            .iter()
            .filter(|f| !self.by_root.contains_key(f.name()))
            .cloned()
            .collect()
    }

    pub fn is_defined(&self, symbol: &Symbol) -> bool {
        self.by_root.contains_key(symbol.name())
    }

    /// The first rule (in input order) matching `t` at the root.
    pub fn match_root(&self, t: &Term) -> Option<(&Rule, Substitution)> {
        let root = t.root()?;
        self.by_root
            .get(root.name())?
            .iter()
            .map(|&i| &self.rules[i])
            .find_map(|r| match_term(r.lhs(), t).map(|s| (r, s)))
    }

    pub fn is_redex(&self, t: &Term) -> bool {
        let Some(candidates) = t.root().and_then(|f| self.by_root.get(f.name())) else {
            return false;
        };
        candidates.iter().any(|&i| {
            let lhs = self.rules[i].lhs();
            if self.linear[i] {
                matches_linear(lhs, t)
            } else {
                match_term(lhs, t).is_some()
            }
        })
    }

    pub fn match_at(&self, t: &Term, p: &Position) -> Option<(&Rule, Substitution)> {
        self.match_root(t.get(p)?)
    }

    /// Every position at which some rule matches, in lexicographic order.
    pub fn redex_positions(&self, t: &Term) -> Vec<Position> {
        let mut out = Vec::new();
        t.walk(&mut Position::root(), &mut |p, sub| {
            if self.is_redex(sub) {
                out.push(p.clone());
            }
        });
        out
    }

    /// Redex positions with no redex strictly above them, leftmost first.
    pub fn maximal_redex_positions(&self, t: &Term) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_maximal(t, &mut Vec::new(), &mut out);
        out
    }

    // `path` is extended in place so deep terms cost linear time
    fn collect_maximal(&self, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        if self.is_redex(t) {
            out.push(Position::from(path.as_slice()));
            return;
        }
        for (i, arg) in t.args().iter().enumerate() {
            path.push(i + 1);
            self.collect_maximal(arg, path, out);
            path.pop();
        }
    }

    /// True when some proper prefix of `p` is a redex position of `t`.
    pub fn has_redex_above(&self, t: &Term, p: &Position) -> bool {
        let mut sub = t;
        for &i in p.path() {
            if self.is_redex(sub) {
                return true;
            }
            match sub.args().get(i - 1) {
                Some(next) => sub = next,
                None => return false,
            }
        }
        false
    }

    /// `t[rhs·ς]_p` where `lhs·ς = t|_p`.
    pub fn apply_rule_at(&self, t: &Term, p: &Position, rule: &Rule) -> Result<Term> {
        let redex = t.subterm_at(p)?;
        let subst = match_term(rule.lhs(), redex).ok_or_else(|| Error::NoMatch {
            rule: rule.label().to_string(),
            term: t.to_string(),
            position: p.clone(),
        })?;
        t.splice(p, rule.rhs().apply(&subst))
    }

    /// Rewrites at `p` with whichever rule matches there.
    pub fn rewrite_at(&self, t: &Term, p: &Position) -> Result<(Term, &Rule)> {
        let (rule, subst) = self.match_at(t, p).ok_or_else(|| Error::NotARedex {
            term: t.to_string(),
            position: p.clone(),
        })?;
        Ok((t.splice(p, rule.rhs().apply(&subst))?, rule))
    }

    /// Innermost normalisation; `None` when `budget` steps do not suffice
    /// or the term grows deeper than [`MAX_NORMALIZE_DEPTH`].
    pub fn normalize_innermost(&self, t: &Term, budget: usize) -> Option<Term> {
        let mut current = t.clone();
        let mut steps = 0;
        while let Some(p) = self.innermost_redex(&current) {
            if steps == budget {
                return None;
            }
            steps += 1;
            current = self.rewrite_at(&current, &p).ok()?.0;
            if current.depth() > MAX_NORMALIZE_DEPTH {
                return None;
            }
        }
        Some(current)
    }

    /// A redex none of whose proper subterms is a redex.
    fn innermost_redex(&self, t: &Term) -> Option<Position> {
        // explicit stack: data terms built by diverging rules can be very deep
        let mut stack = vec![(t, Position::root())];
        let mut found = None;
        while let Some((u, at)) = stack.pop() {
            if self.is_redex(u) {
                found = Some(at.clone());
                stack.clear();
                let mut below = Vec::new();
                for (i, a) in u.args().iter().enumerate() {
                    below.push((a, at.child(i + 1)));
                }
                stack.extend(below.into_iter().rev());
                continue;
            }
            for (i, a) in u.args().iter().enumerate().rev() {
                stack.push((a, at.child(i + 1)));
            }
        }
        found
    }

    /// The same system with `rule` appended.
    pub fn with_rule(&self, rule: Rule) -> Result<Trs> {
        let mut rules = self.rules.clone();
        rules.push(rule);
        Trs::new(self.signature.clone(), rules)
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// Descendants of `q` across the step `t →_p` with `rule`.
pub fn residuals(t: &Term, p: &Position, rule: &Rule, q: &Position) -> Result<BTreeSet<Position>> {
    terms::residuals(t, p, rule.lhs(), rule.rhs(), q)
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

    fn morse() -> Trs {
        parse_spec(MORSE).unwrap().trs()
    }

    fn names(set: &BTreeSet<Symbol>) -> Vec<&str> {
        set.iter().map(Symbol::name).collect()
    }

    #[test]
    fn left_linearity() {
        let trs = morse();
        assert!(trs.is_left_linear());
        assert!(Rule::overflow().is_left_linear());

        let spec = parse_spec("f : s s -> s\nf(σ, σ) -> σ").unwrap();
        let trs = spec.trs();
        assert_eq!(
            trs.left_linearity_violation().unwrap().lhs().to_string(),
            "f(sigma, sigma)"
        );
    }

    #[test]
    fn overlaps() {
        assert!(morse().critical_overlaps().is_empty());
        assert!(morse().is_orthogonal());

        let spec = parse_spec("g : d s -> s\n0 : d\ng(0, σ) -> σ\ng(x, σ) -> 0:σ").unwrap();
        let overlaps = spec.trs().critical_overlaps();
        assert_eq!(overlaps.len(), 1);
        assert!(overlaps[0].position.is_root());
        assert_eq!(overlaps[0].outer, spec.rules()[0].label());
        assert_eq!(overlaps[0].inner, spec.rules()[1].label());

        let spec = parse_spec("c : s\n1 : d\nc -> 1:c").unwrap();
        assert!(spec.trs().critical_overlaps().is_empty());
    }

    #[test]
    fn self_overlap_below_root_is_reported() {
        let spec = parse_spec("f : s -> s\nf(f(σ)) -> σ").unwrap();
        let overlaps = spec.trs().critical_overlaps();
        assert_eq!(overlaps.len(), 1);
        assert_eq!(overlaps[0].position.to_string(), "1");
    }

    #[test]
    fn constructor_symbols() {
        let trs = morse();
        assert_eq!(names(&trs.constructors()), vec!["0", "1", ":"]);
        let mut sig = trs.signature().clone();
        sig.add(Symbol::overflow()).unwrap();
        let extended = Trs::new(sig, trs.rules().to_vec())
            .unwrap()
            .with_rule(Rule::overflow())
            .unwrap();
        assert_eq!(names(&extended.constructors()), vec!["0", "1", "overflow"]);
        let empty = Trs::new(trs.signature().clone(), vec![]).unwrap();
        assert_eq!(empty.constructors().len(), trs.signature().len());
    }

    #[test]
    fn redexes_and_maximal_redexes() {
        let spec = parse_spec(MORSE).unwrap();
        let trs = spec.trs();
        let t = spec.term("tail(morse)").unwrap();
        assert_eq!(trs.redex_positions(&t), vec![Position::from([1])]);
        assert_eq!(trs.maximal_redex_positions(&t), vec![Position::from([1])]);
        assert!(trs.redex_positions(&Term::overflow()).is_empty());

        let spec = parse_spec(
            "c : s\nf : s -> s\ng : d s -> s\n0 : d\n1 : d\n\
             c -> 1:c\nf(x:σ) -> g(x, σ)\ng(0, σ) -> f(σ)\ng(1, σ) -> 1:f(σ)",
        )
        .unwrap();
        let extended = spec.extend_with_overflow().unwrap();
        let t = spec.term("f(1:c)").unwrap();
        assert_eq!(
            extended.redex_positions(&t),
            vec![
                Position::root(),
                Position::from([1]),
                Position::from([1, 2])
            ]
        );
        assert_eq!(extended.maximal_redex_positions(&t), vec![Position::root()]);
    }

    #[test]
    fn rule_application() {
        let spec =
            parse_spec("c : s\ntail : s -> s\n0 : d\n1 : d\nc -> 1:c\ntail(x:σ) -> σ").unwrap();
        let trs = spec.trs();
        let c = spec.term("c").unwrap();
        let r = trs
            .apply_rule_at(&c, &Position::root(), &trs.rules()[0])
            .unwrap();
        assert_eq!(r.to_string(), "1:c");
        let t = spec.term("tail(0:c)").unwrap();
        let r = trs
            .apply_rule_at(&t, &Position::root(), &trs.rules()[1])
            .unwrap();
        assert_eq!(r, c);
        let r = Trs::new(spec.signature().clone(), vec![])
            .unwrap()
            .apply_rule_at(
                &spec.term("0:c").unwrap(),
                &Position::root(),
                &Rule::overflow(),
            )
            .unwrap();
        assert_eq!(r, Term::overflow());
        assert!(matches!(
            trs.apply_rule_at(&c, &Position::root(), &trs.rules()[1]),
            Err(Error::NoMatch { .. })
        ));
    }

    #[test]
    fn rewriting_leaves_parallel_positions_alone() {
        let spec = parse_spec(MORSE).unwrap();
        let trs = spec.trs();
        let t = spec.term("zip(inv(morse), tail(0:morse))").unwrap();
        let p = Position::from([2]);
        let (t2, _) = trs.rewrite_at(&t, &p).unwrap();
        for q in t.positions().into_iter().filter(|q| q.is_parallel(&p)) {
            assert_eq!(t.get(&q), t2.get(&q));
        }
    }

    #[test]
    fn at_most_one_rule_per_position() {
        let spec = parse_spec(MORSE).unwrap();
        let trs = spec.trs();
        let t = spec.term("zip(0:inv(morse), tail(not(1):morse))").unwrap();
        for p in t.positions() {
            let sub = t.get(&p).unwrap();
            let matching = trs
                .rules()
                .iter()
                .filter(|r| match_term(r.lhs(), sub).is_some())
                .count();
            assert!(matching <= 1);
        }
    }

    #[test]
    fn innermost_normalisation() {
        let spec = parse_spec(MORSE).unwrap();
        let data = spec.data_trs();
        let t = spec.term("not(not(not(0)))").unwrap();
        assert_eq!(data.normalize_innermost(&t, 10).unwrap().to_string(), "1");
        assert!(data.normalize_innermost(&t, 2).is_none());
    }

    #[test]
    fn rule_validation() {
        let sigma = Term::var("sigma", Sort::Stream);
        let tau = Term::var("tau", Sort::Stream);
        let f = Symbol::stream("f", 0, 1);
        assert!(Rule::new("r", sigma.clone(), sigma.clone()).is_err());
        assert!(Rule::new("r", Term::app(f.clone(), vec![sigma.clone()]), tau).is_err());
        assert!(Rule::new("r", Term::app(f, vec![sigma.clone()]), sigma).is_ok());
    }
}
