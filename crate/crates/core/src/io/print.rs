//! Printing specifications back into the text format read by
//! [`parse_spec`](super::parse_spec).

use std::fmt::{self, Write as _};

use crate::streamspec::StreamSpec;
use crate::terms::{Sort, Symbol};

/// `zip : s s -> s`, `0 : d`.
pub fn declaration(symbol: &Symbol) -> String {
    let mut out = format!("{} :", symbol.name());
    let arg_sorts: Vec<Sort> = symbol.arg_sorts().collect();
    for sort in &arg_sorts {
        let _ = write!(out, " {sort}");
    }
    if arg_sorts.is_empty() {
        let _ = write!(out, " {}", symbol.sort());
    } else {
        let _ = write!(out, " -> {}", symbol.sort());
    }
    out
}

/// Declarations (data symbols first) followed by the rules in order.
pub fn print_spec(spec: &StreamSpec) -> String {
    let mut out = String::new();
    let mut symbols: Vec<&Symbol> = spec.signature().iter().filter(|f| !f.is_cons()).collect();
    symbols.sort_by_key(|f| (f.sort() == Sort::Stream, f.name().to_string()));
    for f in symbols {
        out.push_str(&declaration(f));
        out.push('\n');
    }
    if !spec.rules().is_empty() {
        out.push('\n');
    }
    for rule in spec.rules() {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    out
}

impl fmt::Display for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_spec;

    #[test]
    fn declarations_round_trip() {
        assert_eq!(declaration(&Symbol::stream("zip", 0, 2)), "zip : s s -> s");
        assert_eq!(declaration(&Symbol::stream("g", 2, 1)), "g : d d s -> s");
        assert_eq!(declaration(&Symbol::data("0", 0)), "0 : d");
        assert_eq!(declaration(&Symbol::stream("c", 0, 0)), "c : s");
    }

    #[test]
    fn print_then_parse_is_identity() {
        let text = "c : s\nf : s -> s\ng : d s -> s\n0 : d\n1 : d\nc -> 1:c\nf(x:σ) -> g(x, σ)\ng(0, σ) -> f(σ)\ng(1, σ) -> 1:f(σ)";
        let spec = parse_spec(text).unwrap();
        let printed = print_spec(&spec);
        assert!(printed.starts_with("0 : d\n1 : d\nc : s\n"), "{printed}");
        assert_eq!(parse_spec(&printed).unwrap(), spec);
    }
}
