//! Two-sorted first-order terms, positions, substitutions, matching and
//! unification.
//!
//! Terms are immutable. Argument lists are reference counted so that
//! replacing a subterm only rebuilds the path from the root to the
//! replaced position.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use rustc_hash::FxHasher;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Name of the builtin stream constructor.
pub const CONS: &str = ":";
/// Name of the builtin constant produced by the overflow rule.
pub const OVERFLOW: &str = "overflow";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Data,
    Stream,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Data => f.write_str("d"),
            Sort::Stream => f.write_str("s"),
        }
    }
}

/// A function symbol of type `d^n × s^m → sort`.
///
/// Data symbols always have `stream_arity == 0`. Data arguments precede
/// stream arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    data_arity: usize,
    stream_arity: usize,
    sort: Sort,
}

impl Symbol {
    pub fn new(name: &str, data_arity: usize, stream_arity: usize, sort: Sort) -> Result<Symbol> {
        if sort == Sort::Data && stream_arity > 0 {
            return Err(Error::InvalidSymbol(format!(
                "data symbol {name} cannot take stream arguments"
            )));
        }
        if name == CONS && (data_arity, stream_arity, sort) != (1, 1, Sort::Stream) {
            return Err(Error::InvalidSymbol(format!("{CONS} is reserved")));
        }
        Ok(Symbol {
            name: name.into(),
            data_arity,
            stream_arity,
            sort,
        })
    }

    pub fn data(name: &str, arity: usize) -> Symbol {
        Symbol::new(name, arity, 0, Sort::Data).expect("data symbol")
    }

    pub fn stream(name: &str, data_arity: usize, stream_arity: usize) -> Symbol {
        Symbol::new(name, data_arity, stream_arity, Sort::Stream).expect("stream symbol")
    }

    pub fn cons() -> Symbol {
        Symbol::stream(CONS, 1, 1)
    }

    pub fn overflow() -> Symbol {
        Symbol::stream(OVERFLOW, 0, 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn data_arity(&self) -> usize {
        self.data_arity
    }

    pub fn stream_arity(&self) -> usize {
        self.stream_arity
    }

    pub fn arity(&self) -> usize {
        self.data_arity + self.stream_arity
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn is_cons(&self) -> bool {
        &*self.name == CONS
    }

    /// Sort of the argument at 0-based index `i`.
    pub fn arg_sort(&self, i: usize) -> Option<Sort> {
        if i < self.data_arity {
            Some(Sort::Data)
        } else if i < self.arity() {
            Some(Sort::Stream)
        } else {
            None
        }
    }

    pub fn arg_sorts(&self) -> impl Iterator<Item = Sort> + '_ {
        (0..self.arity()).map(|i| self.arg_sort(i).unwrap())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    name: Arc<str>,
    sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A path from the root of a term, 1-indexed; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Result<Position> {
        if path.contains(&0) {
            return Err(Error::InvalidPosition(format!("{path:?}")));
        }
        Ok(Position(path))
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, i: usize) -> Position {
        debug_assert!(i > 0);
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut path = self.0.clone();
        path.extend_from_slice(&other.0);
        Position(path)
    }

    pub fn parent(&self) -> Option<Position> {
        let (_, init) = self.0.split_last()?;
        Some(Position(init.to_vec()))
    }

    /// `self ≤ other`: `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self < other`: `self` is a proper prefix of `other`.
    pub fn is_above(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// `self ∥ other`.
    pub fn is_parallel(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// `self ∖ prefix`, defined only when `prefix ≤ self`.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    /// Proper prefixes, from the root downwards.
    pub fn ancestors(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.0.len()).map(|k| Position(self.0[..k].to_vec()))
    }
}

impl From<&[usize]> for Position {
    fn from(path: &[usize]) -> Position {
        Position::new(path.to_vec()).expect("positions are 1-indexed")
    }
}

impl<const N: usize> From<[usize; N]> for Position {
    fn from(path: [usize; N]) -> Position {
        Position::from(&path[..])
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Position> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" || s == "eps" {
            return Ok(Position::root());
        }
        let path = s
            .split('.')
            .map(|part| {
                part.parse::<usize>()
                    .map_err(|_| Error::InvalidPosition(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Position::new(path)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Args),
}

/// The argument list of an application.
///
/// Caches the total size and a structural hash of the arguments, so that
/// hashing, sizing and most failed comparisons of large terms take
/// constant time. Dereferences to `[Term]`.
#[derive(Clone)]
pub struct Args {
    items: Arc<[Term]>,
    size: usize,
    hash: u64,
}

impl Args {
    fn new(items: Arc<[Term]>) -> Args {
        let mut hasher = FxHasher::default();
        let mut size = 0;
        for t in items.iter() {
            hasher.write_u64(t.fingerprint());
            size += t.size();
        }
        Args {
            items,
            size,
            hash: hasher.finish(),
        }
    }
}

impl std::ops::Deref for Args {
    type Target = [Term];

    fn deref(&self) -> &[Term] {
        &self.items
    }
}

impl From<Vec<Term>> for Args {
    fn from(items: Vec<Term>) -> Args {
        Args::new(items.into())
    }
}

impl FromIterator<Term> for Args {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Args {
        Args::new(iter.into_iter().collect())
    }
}

impl PartialEq for Args {
    fn eq(&self, other: &Args) -> bool {
        Arc::ptr_eq(&self.items, &other.items)
            || (self.hash == other.hash && self.size == other.size && self.items == other.items)
    }
}

impl Eq for Args {}

impl Hash for Args {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl PartialOrd for Args {
    fn partial_cmp(&self, other: &Args) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Args {
    fn cmp(&self, other: &Args) -> std::cmp::Ordering {
        self.items.cmp(&other.items)
    }
}

impl fmt::Debug for Args {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.items.fmt(f)
    }
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    /// Builds an application without checking sorts; see [`Term::check_sorts`].
    pub fn app(symbol: Symbol, args: Vec<Term>) -> Term {
        Term::App(symbol, args.into())
    }

    pub fn constant(symbol: Symbol) -> Term {
        Term::App(symbol, Args::from(Vec::new()))
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::app(Symbol::cons(), vec![head, tail])
    }

    pub fn overflow() -> Term {
        Term::constant(Symbol::overflow())
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::App(f, _) => f.sort,
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_cons(&self) -> bool {
        self.root().is_some_and(Symbol::is_cons)
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Splits a `:`-headed term into head and tail.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::App(f, args) if f.is_cons() => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.size,
        }
    }

    /// A structural hash, constant time for applications.
    fn fingerprint(&self) -> u64 {
        let mut hasher = FxHasher::default();
        self.hash(&mut hasher);
        hasher.finish()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Every variable occurrence with its position, in preorder.
    pub fn var_positions(&self) -> Vec<(Position, Var)> {
        let mut out = Vec::new();
        self.walk(&mut Position::root(), &mut |p, t| {
            if let Term::Var(v) = t {
                out.push((p.clone(), v.clone()));
            }
        });
        out
    }

    /// True when no variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let occurrences = self.var_positions();
        let distinct: BTreeSet<_> = occurrences.iter().map(|(_, v)| v).collect();
        distinct.len() == occurrences.len()
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(f, args) => f.name() == name || args.iter().any(|a| a.contains_symbol(name)),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut Position::root(), &mut |_, t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    /// Preorder traversal with positions.
    pub fn walk<F: FnMut(&Position, &Term)>(&self, at: &mut Position, visit: &mut F) {
        visit(at, self);
        for (i, arg) in self.args().iter().enumerate() {
            at.0.push(i + 1);
            arg.walk(at, visit);
            at.0.pop();
        }
    }

    pub fn check_sorts(&self) -> Result<()> {
        if let Term::App(f, args) = self {
            if args.len() != f.arity() {
                return Err(Error::ArityMismatch {
                    symbol: f.name().to_string(),
                    expected: f.arity(),
                    found: args.len(),
                });
            }
            for (arg, expected) in args.iter().zip(f.arg_sorts()) {
                if arg.sort() != expected {
                    return Err(Error::SortMismatch {
                        context: format!("argument of {f}: {arg}"),
                        expected,
                        found: arg.sort(),
                    });
                }
                arg.check_sorts()?;
            }
        }
        Ok(())
    }

    /// `Pos(t)` in preorder, i.e. lexicographic order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.size());
        self.walk(&mut Position::root(), &mut |p, _| out.push(p.clone()));
        out
    }

    pub fn get(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &p.0 {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// `t|_p`.
    pub fn subterm_at(&self, p: &Position) -> Result<&Term> {
        self.get(p).ok_or_else(|| Error::PositionOutOfRange {
            term: self.to_string(),
            position: p.clone(),
        })
    }

    /// `t[replacement]_p`.
    pub fn splice(&self, p: &Position, replacement: Term) -> Result<Term> {
        let old = self.subterm_at(p)?;
        if old.sort() != replacement.sort() {
            return Err(Error::SortMismatch {
                context: format!("replacing {old} at {p}"),
                expected: old.sort(),
                found: replacement.sort(),
            });
        }
        Ok(self.splice_unchecked(&p.0, replacement))
    }

    // Iterative: stream terms can be thousands of levels deep.
    fn splice_unchecked(&self, path: &[usize], replacement: Term) -> Term {
        let mut spine = Vec::with_capacity(path.len());
        let mut t = self;
        for &i in path {
            spine.push((t, i - 1));
            t = &t.args()[i - 1];
        }
        let mut acc = replacement;
        while let Some((node, i)) = spine.pop() {
            let Term::App(f, args) = node else {
                unreachable!("path checked by subterm_at")
            };
            let mut child = Some(acc);
            let new_args = args
                .iter()
                .enumerate()
                .map(|(j, a)| match child.take_if(|_| j == i) {
                    Some(c) => c,
                    None => a.clone(),
                })
                .collect();
            acc = Term::App(f.clone(), new_args);
        }
        acc
    }

    pub fn apply(&self, subst: &Substitution) -> Term {
        subst.apply(self)
    }

    /// Renames every variable through `rename`.
    pub fn map_vars(&self, rename: &impl Fn(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(rename(v)),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.map_vars(rename)).collect())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(sym, args) if sym.is_cons() => {
                let head = &args[0];
                if head.is_cons() {
                    write!(f, "({head})")?;
                } else {
                    write!(f, "{head}")?;
                }
                write!(f, ":{}", args[1])
            }
            Term::App(sym, args) => {
                write!(f, "{sym}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, arg) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{arg}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A finite, sort-preserving map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        debug_assert_eq!(v.sort(), t.sort());
        self.0.insert(v, t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// Simultaneous application; unmapped variables are left alone.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => {
                if self.0.is_empty() {
                    return t.clone();
                }
                Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} := {t}")?;
        }
        f.write_str("}")
    }
}

/// One-sided matching: finds `ς` with `pattern·ς = subject`.
///
/// Variables of the subject are treated as constants. Non-linear patterns
/// are supported by checking repeated bindings for equality.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    match_into(pattern, subject, &mut subst).then_some(subst)
}

/// Whether a linear `pattern` matches `subject`, without building the
/// substitution.
pub(crate) fn matches_linear(pattern: &Term, subject: &Term) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => v.sort() == subject.sort(),
        (Term::App(f, fargs), Term::App(g, gargs)) => {
            f == g
                && fargs.len() == gargs.len()
                && fargs
                    .iter()
                    .zip(gargs.iter())
                    .all(|(p, s)| matches_linear(p, s))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, subst: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => {
            if v.sort() != subject.sort() {
                return false;
            }
            match subst.get(v) {
                Some(bound) => bound == subject,
                None => {
                    subst.insert(v.clone(), subject.clone());
                    true
                }
            }
        }
        (Term::App(f, fargs), Term::App(g, gargs)) => {
            f == g
                && fargs.len() == gargs.len()
                && fargs
                    .iter()
                    .zip(gargs.iter())
                    .all(|(p, s)| match_into(p, s, subst))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// Syntactic unification with occurs check.
///
/// Returns an idempotent most general unifier. The caller is responsible
/// for renaming the two terms apart when that is intended.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut subst = Substitution::new();
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((s, t)) = work.pop() {
        let s = subst.apply(&s);
        let t = subst.apply(&t);
        if s == t {
            continue;
        }
        match (&s, &t) {
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if v.sort() != other.sort() || occurs(v, other) {
                    return None;
                }
                bind(&mut subst, v.clone(), other.clone());
            }
            (Term::App(f, fargs), Term::App(g, gargs)) => {
                if f != g || fargs.len() != gargs.len() {
                    return None;
                }
                work.extend(fargs.iter().cloned().zip(gargs.iter().cloned()));
            }
        }
    }
    Some(subst)
}

fn occurs(v: &Var, t: &Term) -> bool {
    match t {
        Term::Var(w) => v == w,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a)),
    }
}

fn bind(subst: &mut Substitution, v: Var, t: Term) {
    let single: Substitution = [(v.clone(), t.clone())].into_iter().collect();
    for bound in subst.0.values_mut() {
        *bound = single.apply(bound);
    }
    subst.0.insert(v, t);
}

/// Descendants in `t'` of position `q` of `t` across the step that rewrites
/// `t` at `p` with the left-linear rule `lhs → rhs`.
///
/// Positions parallel to or above `p` keep their address. A position
/// inside the substitution part, below the occurrence of variable `x` in
/// `lhs`, is copied to every occurrence of `x` in `rhs`. Positions inside
/// the matched non-variable part of `lhs` have no descendants.
pub fn residuals(
    t: &Term,
    p: &Position,
    lhs: &Term,
    rhs: &Term,
    q: &Position,
) -> Result<BTreeSet<Position>> {
    let redex = t.subterm_at(p)?;
    t.subterm_at(q)?;
    if !lhs.is_linear() {
        return Err(Error::NotLeftLinear(format!("{lhs}")));
    }
    if match_term(lhs, redex).is_none() {
        return Err(Error::NoMatch {
            rule: format!("{lhs} -> {rhs}"),
            term: t.to_string(),
            position: p.clone(),
        });
    }
    let Some(rel) = q.strip_prefix(p) else {
        return Ok(BTreeSet::from([q.clone()]));
    };
    let mut pattern = lhs;
    for (depth, &i) in rel.0.iter().enumerate() {
        match pattern {
            Term::Var(x) => {
                let below = Position(rel.0[depth..].to_vec());
                return Ok(occurrences_of(rhs, x)
                    .into_iter()
                    .map(|r| p.concat(&r).concat(&below))
                    .collect());
            }
            Term::App(_, args) => pattern = &args[i - 1],
        }
    }
    match pattern {
        Term::Var(x) => Ok(occurrences_of(rhs, x)
            .into_iter()
            .map(|r| p.concat(&r))
            .collect()),
        Term::App(..) => Ok(BTreeSet::new()),
    }
}

fn occurrences_of(t: &Term, x: &Var) -> Vec<Position> {
    t.var_positions()
        .into_iter()
        .filter(|(_, v)| v == x)
        .map(|(p, _)| p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(name: &str) -> Term {
        Term::constant(Symbol::data(name, 0))
    }
    fn s(name: &str) -> Term {
        Term::constant(Symbol::stream(name, 0, 0))
    }
    fn un(name: &str, arg: Term) -> Term {
        Term::app(Symbol::stream(name, 0, 1), vec![arg])
    }
    fn bin(name: &str, a: Term, b: Term) -> Term {
        Term::app(Symbol::stream(name, 0, 2), vec![a, b])
    }
    fn x() -> Term {
        Term::var("x", Sort::Data)
    }
    fn sigma() -> Term {
        Term::var("sigma", Sort::Stream)
    }
    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn positions_follow_definition() {
        assert_eq!(Term::overflow().positions(), vec![Position::root()]);
        let t = Term::cons(d("0"), s("c"));
        assert_eq!(t.positions(), vec![pos("ε"), pos("1"), pos("2")]);
        let morse = s("morse");
        let t = bin("zip", un("inv", morse.clone()), un("tail", morse));
        assert_eq!(
            t.positions(),
            ["ε", "1", "1.1", "2", "2.1"].map(pos).to_vec()
        );
    }

    #[test]
    fn splice_and_subterm() {
        let morse = s("morse");
        let t = bin("zip", un("inv", morse.clone()), un("tail", morse.clone()));
        let replacement = Term::cons(d("0"), s("c"));
        assert_eq!(t.splice(&Position::root(), t.clone()).unwrap(), t);
        assert_eq!(
            un("tail", morse.clone()).subterm_at(&pos("1")).unwrap(),
            &morse
        );
        let spliced = t.splice(&pos("1.1"), replacement.clone()).unwrap();
        assert_eq!(
            spliced,
            bin("zip", un("inv", replacement.clone()), un("tail", morse))
        );
        assert!(matches!(
            t.splice(&pos("3"), replacement),
            Err(Error::PositionOutOfRange { .. })
        ));
        assert!(matches!(
            t.splice(&pos("1"), d("0")),
            Err(Error::SortMismatch { .. })
        ));
    }

    #[test]
    fn position_order_relations() {
        let (a, b, c) = (pos("1"), pos("1.2"), pos("2"));
        assert!(a.is_prefix_of(&b) && a.is_above(&b) && !b.is_above(&a));
        assert!(a.is_parallel(&c) && !a.is_parallel(&b));
        assert_eq!(b.strip_prefix(&a), Some(pos("2")));
        assert_eq!(a.concat(&b.strip_prefix(&a).unwrap()), b);
        assert_eq!(c.strip_prefix(&a), None);
        assert_eq!(pos("ε").to_string(), "ε");
        assert_eq!(pos("2.1.1").to_string(), "2.1.1");
    }

    #[test]
    fn matching() {
        let pattern = Term::cons(x(), sigma());
        let subject = Term::cons(d("0"), s("c"));
        let m = match_term(&pattern, &subject).unwrap();
        assert_eq!(m.get(&Var::new("x", Sort::Data)), Some(&d("0")));
        assert_eq!(m.get(&Var::new("sigma", Sort::Stream)), Some(&s("c")));
        assert_eq!(pattern.apply(&m), subject);

        assert!(match_term(&un("f", pattern), &un("f", s("c"))).is_none());

        let t = bin("zip", s("c"), subject);
        let m = match_term(&sigma(), &t).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(sigma().apply(&m), t);
    }

    #[test]
    fn nonlinear_matching_checks_consistency() {
        let pattern = bin("f", sigma(), sigma());
        assert!(match_term(&pattern, &bin("f", s("c"), s("c"))).is_some());
        assert!(match_term(&pattern, &bin("f", s("c"), s("e"))).is_none());
    }

    #[test]
    fn unification() {
        let y = Term::var("y", Sort::Data);
        let tau = Term::var("tau", Sort::Stream);
        let a = Term::cons(x(), sigma());
        let b = Term::cons(y.clone(), tau.clone());
        let u = unify(&a, &b).unwrap();
        assert_eq!(a.apply(&u), b.apply(&u));
        assert_eq!(u.len(), 2);

        let a = un("f", Term::cons(x(), sigma()));
        let b = un("f", tau.clone());
        let u = unify(&a, &b).unwrap();
        assert_eq!(
            u.get(&Var::new("tau", Sort::Stream)),
            Some(&Term::cons(x(), sigma()))
        );
        assert_eq!(u.len(), 1);

        assert!(unify(&sigma(), &un("f", sigma())).is_none());
        assert!(unify(&s("c"), &s("e")).is_none());
    }

    #[test]
    fn residual_examples() {
        let zip_lhs = bin(
            "zip",
            Term::cons(x(), sigma()),
            Term::var("tau", Sort::Stream),
        );
        let zip_rhs = Term::cons(x(), bin("zip", Term::var("tau", Sort::Stream), sigma()));
        let t = bin("zip", Term::cons(d("0"), s("c")), s("t0"));
        let r = residuals(&t, &Position::root(), &zip_lhs, &zip_rhs, &pos("1.2")).unwrap();
        assert_eq!(r, BTreeSet::from([pos("2.2")]));
        assert_eq!(
            t.splice(
                &Position::root(),
                zip_rhs.apply(&match_term(&zip_lhs, &t).unwrap())
            )
            .unwrap()
            .subterm_at(&pos("2.2"))
            .unwrap(),
            &s("c")
        );

        let tail_lhs = un("tail", Term::cons(x(), sigma()));
        let t = un("tail", Term::cons(d("0"), s("c")));
        let r = residuals(&t, &Position::root(), &tail_lhs, &sigma(), &pos("1.1")).unwrap();
        assert!(r.is_empty());
        // matched non-variable part
        let r = residuals(&t, &Position::root(), &tail_lhs, &sigma(), &pos("1")).unwrap();
        assert!(r.is_empty());

        let t = bin("zip", un("tail", Term::cons(d("0"), s("c"))), s("c"));
        let r = residuals(&t, &pos("1"), &tail_lhs, &sigma(), &pos("2")).unwrap();
        assert_eq!(r, BTreeSet::from([pos("2")]));
    }

    #[test]
    fn sort_checking() {
        let bad = Term::app(Symbol::cons(), vec![s("c"), d("0")]);
        assert!(bad.check_sorts().is_err());
        let short = Term::app(Symbol::cons(), vec![d("0")]);
        assert!(matches!(
            short.check_sorts(),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(Term::cons(d("0"), s("c")).check_sorts().is_ok());
    }

    #[test]
    fn display() {
        let t = Term::cons(d("0"), Term::cons(d("1"), un("f", sigma())));
        assert_eq!(t.to_string(), "0:1:f(sigma)");
        let t = bin("zip", Term::cons(x(), sigma()), s("c"));
        assert_eq!(t.to_string(), "zip(x:sigma, c)");
    }
}
