//! Text format for stream specifications.
//!
//! ```text
//! # comment
//! morse : s
//! zip   : s s -> s
//! not   : d -> d
//! g     : d^2 x s -> s
//! 0 : d
//! morse -> 0:zip(inv(morse), tail(morse))
//! tail(x:σ) = σ
//! ```
//!
//! A declaration line is `name : sorts [-> sort]`; every other non-blank
//! line is a rule `lhs -> rhs` or `lhs = rhs`. Identifiers that are not
//! declared are variables, and their sort comes from where they occur.
//! `:` is right-associative and binds looser than application.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::streamspec::{relabel, StreamSpec};
use crate::terms::{Sort, Symbol, Term, Var, CONS};
use crate::trs::{Rule, Signature};

/// Parses a whole specification. Rules are labelled `root#k`.
pub fn parse_spec(text: &str) -> Result<StreamSpec> {
    let mut signature = Signature::new();
    let mut pending_rules = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        if let Some(symbol) = declaration(&tokens, line_no)? {
            signature
                .add(symbol)
                .map_err(|e| parse_error(line_no, 1, e.to_string()))?;
        } else {
            pending_rules.push((line_no, tokens));
        }
    }
    let mut rules = Vec::with_capacity(pending_rules.len());
    for (line_no, tokens) in pending_rules {
        rules.push(rule(&signature, &tokens, line_no)?);
    }
    StreamSpec::new(signature, relabel(rules))
}

/// Parses a ground term or a term with variables over `signature`. The
/// sort of a bare top-level identifier must be determined by a declaration.
pub fn parse_term(signature: &Signature, text: &str) -> Result<Term> {
    if text.contains('\n') {
        return Err(parse_error(1, 1, "a term must fit on one line".into()));
    }
    let tokens = tokenize(text, 1)?;
    let mut parser = Parser::new(&tokens, 1);
    let ast = parser.term()?;
    parser.expect_end()?;
    let mut vars = BTreeMap::new();
    elaborate(signature, &ast, None, &mut vars)
}

/// Maps Greek letters to their ASCII names, leaving other characters alone.
pub fn normalize_identifier(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for ch in name.chars() {
        match greek_name(ch) {
            Some(ascii) => out.push_str(ascii),
            None => out.push(ch),
        }
    }
    out
}

fn greek_name(ch: char) -> Option<&'static str> {
    const LOWER: [&str; 24] = [
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
        "lambda", "mu", "nu", "xi", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi",
        "chi", "psi", "omega",
    ];
    match ch {
        'ς' => Some("sigma"),
        'α'..='ρ' => Some(LOWER[ch as usize - 'α' as usize]),
        // U+03C2 is the final sigma handled above
        'σ'..='ω' => Some(LOWER[ch as usize - 'α' as usize - 1]),
        _ => None,
    }
}

fn parse_error(line: usize, column: usize, message: String) -> Error {
    Error::Parse {
        line,
        column,
        message,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    Equals,
    Caret,
    Times,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    column: usize,
}

fn is_ident_char(ch: char) -> bool {
    ch.is_alphanumeric() || ch == '_' || ch == '\''
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let column = i + 1;
        let single = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            '^' => Some(Tok::Caret),
            '×' | '*' => Some(Tok::Times),
            '→' => Some(Tok::Arrow),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, column });
            i += 1;
        } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
            tokens.push(Token {
                tok: Tok::Arrow,
                column,
            });
            i += 2;
        } else if ch.is_whitespace() {
            i += 1;
        } else if is_ident_char(ch) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            return Err(parse_error(
                line_no,
                column,
                format!("unexpected character {ch:?}"),
            ));
        }
    }
    Ok(tokens)
}

fn is_sort_token(tok: &Tok) -> bool {
    match tok {
        Tok::Ident(s) => s == "d" || s == "s" || s == "x" || s.chars().all(|c| c.is_ascii_digit()),
        Tok::Caret | Tok::Times | Tok::Arrow => true,
        _ => false,
    }
}

/// `Some(symbol)` when the line is a declaration.
fn declaration(tokens: &[Token], line_no: usize) -> Result<Option<Symbol>> {
    let [name, colon, rest @ ..] = tokens else {
        return Ok(None);
    };
    let Tok::Ident(name) = &name.tok else {
        return Ok(None);
    };
    if colon.tok != Tok::Colon || rest.is_empty() || !rest.iter().all(|t| is_sort_token(&t.tok)) {
        return Ok(None);
    }
    let err = |column: usize, message: &str| parse_error(line_no, column, message.to_string());

    let arrow = rest.iter().position(|t| t.tok == Tok::Arrow);
    let (arg_tokens, result) = match arrow {
        Some(i) => {
            let result = &rest[i + 1..];
            let [Token {
                tok: Tok::Ident(r),
                column,
            }] = result
            else {
                return Err(err(
                    rest[i].column,
                    "expected a single result sort after the arrow",
                ));
            };
            let sort = match r.as_str() {
                "d" => Sort::Data,
                "s" => Sort::Stream,
                _ => return Err(err(*column, "result sort must be d or s")),
            };
            (&rest[..i], sort)
        }
        None => {
            if rest.len() != 1 {
                return Err(err(
                    rest[0].column,
                    "a declaration without an arrow declares a constant",
                ));
            }
            (&rest[..0], sort_of_constant(&rest[0], line_no)?)
        }
    };

    let mut args = Vec::new();
    let mut i = 0;
    while i < arg_tokens.len() {
        let t = &arg_tokens[i];
        match &t.tok {
            Tok::Times => {}
            Tok::Ident(x) if x == "x" => {}
            Tok::Ident(s) if s == "d" || s == "s" => {
                let sort = if s == "d" { Sort::Data } else { Sort::Stream };
                let mut count = 1;
                if arg_tokens.get(i + 1).map(|t| &t.tok) == Some(&Tok::Caret) {
                    let Some(Token {
                        tok: Tok::Ident(n),
                        column,
                    }) = arg_tokens.get(i + 2)
                    else {
                        return Err(err(t.column, "expected an exponent after ^"));
                    };
                    count = n
                        .parse::<usize>()
                        .map_err(|_| err(*column, "exponent must be a number"))?;
                    i += 2;
                }
                args.extend(std::iter::repeat_n(sort, count));
            }
            _ => return Err(err(t.column, "expected a sort")),
        }
        i += 1;
    }
    let data_arity = args.iter().take_while(|s| **s == Sort::Data).count();
    let stream_arity = args.len() - data_arity;
    if args[data_arity..].contains(&Sort::Data) {
        return Err(err(
            rest[0].column,
            "data arguments must precede stream arguments",
        ));
    }
    Symbol::new(name, data_arity, stream_arity, result)
        .map(Some)
        .map_err(|e| err(1, &e.to_string()))
}

fn sort_of_constant(token: &Token, line_no: usize) -> Result<Sort> {
    match &token.tok {
        Tok::Ident(s) if s == "d" => Ok(Sort::Data),
        Tok::Ident(s) if s == "s" => Ok(Sort::Stream),
        _ => Err(parse_error(line_no, token.column, "expected d or s".into())),
    }
}

fn rule(signature: &Signature, tokens: &[Token], line_no: usize) -> Result<Rule> {
    let mut parser = Parser::new(tokens, line_no);
    let lhs = parser.term()?;
    match parser.next() {
        Some(Token {
            tok: Tok::Arrow | Tok::Equals,
            ..
        }) => {}
        other => {
            let column = other.map_or(parser.end_column(), |t| t.column);
            return Err(parse_error(
                line_no,
                column,
                "expected -> or = in rule".into(),
            ));
        }
    }
    let rhs = parser.term()?;
    parser.expect_end()?;

    let mut vars = BTreeMap::new();
    let lhs_term = elaborate(signature, &lhs, None, &mut vars)?;
    let rhs_term = elaborate(signature, &rhs, Some(lhs_term.sort()), &mut vars)?;
    Rule::new(format!("line{line_no}"), lhs_term, rhs_term)
        .map_err(|e| parse_error(line_no, 1, e.to_string()))
}

#[derive(Clone, Debug)]
enum Ast {
    Name {
        name: String,
        args: Option<Vec<Ast>>,
        line: usize,
        column: usize,
    },
    Cons(Box<Ast>, Box<Ast>),
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token], line: usize) -> Parser<'a> {
        Parser {
            tokens,
            at: 0,
            line,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.at);
        self.at += 1;
        t
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.column + 1)
    }

    fn error_here(&self, message: &str) -> Error {
        let column = self.peek().map_or(self.end_column(), |t| t.column);
        parse_error(self.line, column, message.to_string())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().map(|t| &t.tok) == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error_here(&format!("expected {what}")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error_here("unexpected trailing input")),
        }
    }

    /// term := app (':' term)?
    fn term(&mut self) -> Result<Ast> {
        let head = self.app()?;
        if self.peek().map(|t| &t.tok) == Some(&Tok::Colon) {
            self.at += 1;
            let tail = self.term()?;
            return Ok(Ast::Cons(Box::new(head), Box::new(tail)));
        }
        Ok(head)
    }

    /// app := ident ('(' term (',' term)* ')')? | '(' term ')'
    fn app(&mut self) -> Result<Ast> {
        match self.next() {
            Some(Token {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.term()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            Some(Token {
                tok: Tok::Ident(name),
                column,
            }) => {
                let mut args = None;
                if self.peek().map(|t| &t.tok) == Some(&Tok::LParen) {
                    self.at += 1;
                    let mut list = vec![self.term()?];
                    while self.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
                        self.at += 1;
                        list.push(self.term()?);
                    }
                    self.expect(Tok::RParen, ", or )")?;
                    args = Some(list);
                }
                Ok(Ast::Name {
                    name: name.clone(),
                    args,
                    line: self.line,
                    column: *column,
                })
            }
            _ => {
                self.at -= 1;
                Err(self.error_here("expected a term"))
            }
        }
    }
}

fn elaborate(
    signature: &Signature,
    ast: &Ast,
    expected: Option<Sort>,
    vars: &mut BTreeMap<String, Sort>,
) -> Result<Term> {
    match ast {
        Ast::Cons(head, tail) => {
            if expected == Some(Sort::Data) {
                return Err(Error::SortMismatch {
                    context: "stream constructor".into(),
                    expected: Sort::Data,
                    found: Sort::Stream,
                });
            }
            let head = elaborate(signature, head, Some(Sort::Data), vars)?;
            let tail = elaborate(signature, tail, Some(Sort::Stream), vars)?;
            Ok(Term::cons(head, tail))
        }
        Ast::Name {
            name,
            args,
            line,
            column,
        } => {
            if let Some(symbol) = signature.get(name).filter(|_| name != CONS) {
                let given = args.as_deref().unwrap_or(&[]);
                if given.len() != symbol.arity() {
                    return Err(parse_error(
                        *line,
                        *column,
                        format!(
                            "{name} expects {} arguments, found {}",
                            symbol.arity(),
                            given.len()
                        ),
                    ));
                }
                if let Some(sort) = expected.filter(|s| *s != symbol.sort()) {
                    return Err(parse_error(
                        *line,
                        *column,
                        format!(
                            "{name} has sort {} where sort {sort} is expected",
                            symbol.sort()
                        ),
                    ));
                }
                let elaborated = given
                    .iter()
                    .zip(symbol.arg_sorts())
                    .map(|(a, sort)| elaborate(signature, a, Some(sort), vars))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Term::app(symbol.clone(), elaborated));
            }
            if args.is_some() {
                return Err(parse_error(
                    *line,
                    *column,
                    format!("undeclared symbol {name}"),
                ));
            }
            let var_name = normalize_identifier(name);
            if signature.contains(&var_name) {
                return Err(parse_error(
                    *line,
                    *column,
                    format!("variable {name} would print as the declared symbol {var_name}"),
                ));
            }
            let Some(sort) = expected.or_else(|| vars.get(&var_name).copied()) else {
                return Err(parse_error(
                    *line,
                    *column,
                    format!("cannot determine the sort of {name}"),
                ));
            };
            match vars.get(&var_name) {
                Some(previous) if *previous != sort => Err(parse_error(
                    *line,
                    *column,
                    format!("variable {name} is used with sorts {previous} and {sort}"),
                )),
                _ => {
                    vars.insert(var_name.clone(), sort);
                    Ok(Term::Var(Var::new(&var_name, sort)))
                }
            }
        }
    }
}
