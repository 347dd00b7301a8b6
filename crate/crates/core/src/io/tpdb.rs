//! Export in the TPDB plain-text format with an outermost strategy
//! annotation. The stream constructor `:` is written as `cons`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::terms::{Term, CONS};
use crate::trs::Trs;

/// Name used for `:` in the exported problem.
pub const CONS_NAME: &str = "cons";

const RESERVED: [&str; 6] = ["VAR", "RULES", "STRATEGY", "COMMENT", "OUTERMOST", "THEORY"];

/// Renders `trs` as a TPDB problem.
pub fn export_tpdb(trs: &Trs) -> Result<String> {
    let symbols: BTreeSet<&str> = trs
        .signature()
        .iter()
        .filter(|f| !f.is_cons())
        .map(|f| f.name())
        .collect();
    if symbols.contains(CONS_NAME) {
        return Err(Error::Export(format!(
            "symbol {CONS_NAME} clashes with the exported name of {CONS}"
        )));
    }
    let mut vars = BTreeSet::new();
    for rule in trs.rules() {
        for x in rule.lhs().vars() {
            vars.insert(x.name().to_string());
        }
    }
    for name in symbols
        .iter()
        .copied()
        .chain(vars.iter().map(String::as_str))
    {
        if RESERVED.contains(&name) || !name.chars().all(is_tpdb_char) {
            return Err(Error::Export(format!(
                "{name} is not a valid TPDB identifier"
            )));
        }
    }
    if let Some(clash) = vars
        .iter()
        .find(|x| symbols.contains(x.as_str()) || *x == CONS_NAME)
    {
        return Err(Error::Export(format!(
            "variable {clash} clashes with a function symbol"
        )));
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "(COMMENT stream constructor {CONS} written as {CONS_NAME})"
    );
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let _ = writeln!(out, "(VAR {})", names.join(" "));
    out.push_str("(STRATEGY OUTERMOST)\n(RULES\n");
    for rule in trs.rules() {
        let _ = writeln!(out, "  {} -> {}", render(rule.lhs()), render(rule.rhs()));
    }
    out.push_str(")\n");
    Ok(out)
}

fn is_tpdb_char(ch: char) -> bool {
    !ch.is_whitespace() && !matches!(ch, '(' | ')' | ',' | '"' | '|' | '\\')
}

fn render(t: &Term) -> String {
    match t {
        Term::Var(x) => x.name().to_string(),
        Term::App(f, args) => {
            let name = if f.is_cons() { CONS_NAME } else { f.name() };
            if args.is_empty() {
                return name.to_string();
            }
            let rendered: Vec<String> = args.iter().map(render).collect();
            format!("{name}({})", rendered.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;

    #[test]
    fn exports_extended_system() {
        let spec = parse_spec("c : s\nf : s -> s\n1 : d\nc -> 1:c\nf(x:σ) -> f(σ)").unwrap();
        let text = export_tpdb(&spec.extend_with_overflow().unwrap()).unwrap();
        assert_eq!(
            text,
            "(COMMENT stream constructor : written as cons)\n\
             (VAR sigma x)\n\
             (STRATEGY OUTERMOST)\n\
             (RULES\n  c -> cons(1, c)\n  f(cons(x, sigma)) -> f(sigma)\n  cons(x, sigma) -> overflow\n)\n"
        );
    }

    #[test]
    fn rejects_name_clashes() {
        let spec = parse_spec("cons : s\ncons -> cons").unwrap();
        assert!(matches!(export_tpdb(spec.as_trs()), Err(Error::Export(_))));
        let spec = parse_spec("VAR : s\nVAR -> VAR").unwrap();
        assert!(export_tpdb(spec.as_trs()).is_err());
    }
}
