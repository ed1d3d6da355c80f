//! Concrete syntax for types and terms.
//!
//! Types: `o`, `A -> B` (right associative), parentheses.
//! Terms: identifiers, `\x:T y:T. body` (or `λ`), left-associative application.
//! `#` followed by a letter is a reserved identifier (`#d`); any other `#` starts a comment.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::term::{Const, Term, Var};
use crate::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Lambda,
    Dot,
    Colon,
    Arrow,
    LParen,
    RParen,
    Equals,
    NotEquals,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str, first_line: usize) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let lno = first_line + li;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: lno, col });
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                if i + 1 < chars.len() && chars[i + 1].is_ascii_alphabetic() {
                    let start = i;
                    i += 1;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                } else {
                    break;
                }
            } else if c == '\\' || c == 'λ' {
                push(&mut out, Tok::Lambda);
                i += 1;
            } else if c == '.' {
                push(&mut out, Tok::Dot);
                i += 1;
            } else if c == ':' {
                push(&mut out, Tok::Colon);
                i += 1;
            } else if c == '(' {
                push(&mut out, Tok::LParen);
                i += 1;
            } else if c == ')' {
                push(&mut out, Tok::RParen);
                i += 1;
            } else if c == '=' {
                push(&mut out, Tok::Equals);
                i += 1;
            } else if c == '!' && i + 1 < chars.len() && chars[i + 1] == '=' {
                push(&mut out, Tok::NotEquals);
                i += 2;
            } else if c == '-' && i + 1 < chars.len() && chars[i + 1] == '>' {
                push(&mut out, Tok::Arrow);
                i += 2;
            } else if c == '→' {
                push(&mut out, Tok::Arrow);
                i += 1;
            } else if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else {
                return Err(ParseError { line: lno, col, msg: format!("unexpected character {:?}", c) });
            }
        }
    }
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Names visible to a term: constants and free variables.
#[derive(Default, Clone)]
pub struct Scope {
    pub consts: BTreeMap<String, Type>,
    pub free: HashMap<String, Var>,
}

pub struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    bound: Vec<Var>,
    scope: &'a Scope,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], scope: &'a Scope) -> Parser<'a> {
        let end = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
        Parser { toks, pos: 0, bound: Vec::new(), scope, end }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end);
        Err(ParseError { line, col, msg: msg.into() })
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {:?}", tok))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    pub fn ty(&mut self) -> Result<Type, ParseError> {
        let a = match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            Some(Tok::Ident(s)) if s == "o" => {
                self.pos += 1;
                Type::base()
            }
            _ => return self.err("expected type"),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let b = self.ty()?;
            Ok(Type::fun(a, b))
        } else {
            Ok(a)
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::Lambda))
    }

    /// A full term: a lambda, or an application of atoms.
    pub fn term(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Tok::Lambda) {
            return self.lambda();
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            if self.peek() == Some(&Tok::Lambda) {
                args.push(self.lambda()?);
                break;
            }
            args.push(self.atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            Ok(Term::App(head.into(), args.into()))
        }
    }

    pub fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda)?;
        let mut vars = Vec::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            let name = self.ident()?;
            if name == "o" || name.starts_with('#') {
                return self.err(format!("reserved name {} used as a binder", name));
            }
            self.expect(Tok::Colon)?;
            let t = self.ty()?;
            vars.push(Var::new(&name, t));
        }
        if vars.is_empty() {
            return self.err("lambda needs at least one binder");
        }
        self.expect(Tok::Dot)?;
        let n = vars.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.term();
        self.bound.truncate(self.bound.len() - n);
        Ok(Term::Abs(vars.into(), body?.into()))
    }

    pub fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Lambda) => self.lambda(),
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                self.pos -= 1;
                let t = self.resolve(&name)?;
                self.pos += 1;
                Ok(t)
            }
            _ => self.err("expected term"),
        }
    }

    fn resolve(&self, name: &str) -> Result<Term, ParseError> {
        if let Some(v) = self.bound.iter().rev().find(|v| v.name() == name) {
            return Ok(Term::var(v));
        }
        if let Some(v) = self.scope.free.get(name) {
            return Ok(Term::var(v));
        }
        if name == crate::problem::DUMMY {
            return Ok(Term::cnst(&Const::new(name, Type::base())));
        }
        if name.starts_with('#') {
            return self.err(format!("reserved constant {} may not appear in input", name));
        }
        if let Some(t) = self.scope.consts.get(name) {
            return Ok(Term::cnst(&Const::new(name, t.clone())));
        }
        self.err(format!("unknown identifier {}", name))
    }
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let toks = lex(src, 1)?;
    let scope = Scope::default();
    let mut p = Parser::new(&toks, &scope);
    let t = p.ty()?;
    if !p.at_end() {
        return p.err("trailing input after type");
    }
    Ok(t)
}

/// Parse, type-check, normalize and η-expand a term.
pub fn parse_term(src: &str, scope: &Scope) -> Result<Term, ParseError> {
    let toks = lex(src, 1)?;
    let mut p = Parser::new(&toks, scope);
    let t = p.term()?;
    if !p.at_end() {
        return p.err("trailing input after term");
    }
    finish_term(t).map_err(|msg| ParseError { line: 1, col: 1, msg })
}

pub fn finish_term(t: Term) -> Result<Term, String> {
    t.type_of().map_err(|e| e.to_string())?;
    Ok(t.normalize().eta_long())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope() -> Scope {
        let mut s = Scope::default();
        s.consts.insert("f".into(), Type::fun(Type::base(), Type::base()));
        s.consts.insert("a".into(), Type::base());
        s.consts.insert("b".into(), Type::base());
        s
    }

    #[test]
    fn types_are_right_associative() {
        let t = parse_type("((o -> o) -> o -> o) -> o").unwrap();
        assert_eq!(t.args.len(), 1);
        assert_eq!(t.args[0].args.len(), 2);
        assert_eq!(t.order(), 4);
    }

    #[test]
    fn twice_term_parses_with_its_type() {
        let src = r"\z:((o->o)->o->o). z (\x:o. f (z (\u:o. x) b)) (z (\y:o. z (\s:o. s) y) a)";
        let t = parse_term(src, &scope()).unwrap();
        assert_eq!(t.type_of().unwrap().to_string(), "((o -> o) -> o -> o) -> o");
        let again = parse_term(&t.to_source(), &scope()).unwrap();
        assert!(again.alpha_eq(&t));
    }

    #[test]
    fn comments_and_dummy() {
        let t = parse_term("f #d # trailing comment", &scope()).unwrap();
        assert_eq!(t.to_string(), "f #d");
        assert!(parse_term("f #c1", &scope()).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_term("f (a", &scope()).unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_term("f q", &scope()).unwrap_err();
        assert_eq!(e.col, 3);
    }
}
