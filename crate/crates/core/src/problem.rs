use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::parse::{lex, ParseError, Parser, Scope, Tok};
use crate::term::{Const, Key, Term, Var};
use crate::types::Type;

/// Name of the dummy ground constant that may appear in solutions.
pub const DUMMY: &str = "#d";

pub fn dummy() -> Const {
    Const::new(DUMMY, Type::base())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Neq,
}

/// One (dis)equation `x args ≈ rhs`.
#[derive(Clone, Debug)]
pub struct Item {
    pub args: Vec<Term>,
    pub rel: Rel,
    pub rhs: Term,
    /// Fresh constant standing for each bound variable of the right term.
    pub forbidden: Vec<(Var, Const)>,
}

impl Item {
    pub fn forbidden_consts(&self) -> Vec<Const> {
        self.forbidden.iter().map(|(_, c)| c.clone()).collect()
    }

    pub fn forbidden_for(&self, v: &Var) -> Option<&Const> {
        self.forbidden.iter().find(|(w, _)| w == v).map(|(_, c)| c)
    }

    /// Substitution of forbidden constants for the given right-term binders.
    pub fn forbid_map(&self, vs: &[Var]) -> Vec<(Var, Term)> {
        vs.iter()
            .map(|v| {
                let c = self.forbidden_for(v).expect("binder of a right term has a forbidden constant");
                (v.clone(), Term::cnst(c))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub x: Var,
    pub constants: BTreeMap<String, Type>,
    pub items: Vec<Item>,
    /// Constants introduced by type lowering; they never appear in solutions.
    pub excluded: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    OrderTooLow,
    ArityMismatch(usize),
    ArgType(usize, usize),
    NonGroundRhs(usize),
    NotClosed(usize),
    NotLong(usize),
    SharedBoundVars(usize, usize),
    ReservedConstant(usize),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::OrderTooLow => write!(f, "the free variable must have order greater than 1"),
            Diagnostic::ArityMismatch(i) => write!(f, "item {}: wrong number of arguments", i + 1),
            Diagnostic::ArgType(i, j) => write!(f, "item {}: argument {} has the wrong type", i + 1, j + 1),
            Diagnostic::NonGroundRhs(i) => write!(f, "item {}: right term is not of base type", i + 1),
            Diagnostic::NotClosed(i) => write!(f, "item {}: a term is not closed", i + 1),
            Diagnostic::NotLong(i) => write!(f, "item {}: a term is not in eta-long normal form", i + 1),
            Diagnostic::SharedBoundVars(i, j) => write!(f, "items {} and {} share bound variable names", i + 1, j + 1),
            Diagnostic::ReservedConstant(i) => write!(f, "item {}: reserved constant in input", i + 1),
        }
    }
}

/// Derived sets of a problem.
#[derive(Clone, Debug)]
pub struct ProblemSets {
    pub r: Vec<Term>,
    pub l: Vec<Vec<Term>>,
    pub t: Vec<Type>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub delta: usize,
    pub alpha: usize,
    pub p: usize,
}

fn push_unique(out: &mut Vec<Term>, seen: &mut HashSet<Key>, t: Term) {
    if seen.insert(t.key()) {
        out.push(t);
    }
}

/// Ground closure of a right term: its base-type pieces with forbidden constants for binders.
pub fn ground_closure(w: &Term, c: &[(Var, Const)]) -> Vec<Term> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    cl(w, c, &mut out, &mut seen);
    out
}

fn const_map(vs: &[Var], c: &[(Var, Const)]) -> Vec<(Var, Term)> {
    vs.iter()
        .map(|v| {
            let k = c.iter().find(|(w, _)| w == v).map(|(_, k)| k).expect("constant for every binder");
            (v.clone(), Term::cnst(k))
        })
        .collect()
}

fn cl(w: &Term, c: &[(Var, Const)], out: &mut Vec<Term>, seen: &mut HashSet<Key>) {
    match w {
        Term::Abs(vs, b) => cl(&b.instantiate(&const_map(vs, c)), c, out, seen),
        _ => {
            push_unique(out, seen, w.clone());
            for a in w.split_app().1 {
                cl(a, c, out, seen);
            }
        }
    }
}

/// Subterms of a left term relative to a set of forbidden constants.
pub fn subterms_rel(w: &Term, c: &[Const]) -> Vec<Term> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    sub(w, c, &mut out, &mut seen);
    out
}

fn sub(w: &Term, c: &[Const], out: &mut Vec<Term>, seen: &mut HashSet<Key>) {
    push_unique(out, seen, w.clone());
    match w {
        Term::Abs(_, b) => sub(b, c, out, seen),
        Term::App(h, args) => {
            let var_head = matches!(&**h, Term::Var(_));
            for a in args.iter() {
                if var_head {
                    sub(a, c, out, seen)
                } else {
                    sub_prime(a, c, out, seen)
                }
            }
        }
        _ => {}
    }
}

fn sub_prime(w: &Term, c: &[Const], out: &mut Vec<Term>, seen: &mut HashSet<Key>) {
    match w {
        Term::Abs(vs, b) => {
            let choices: Vec<Vec<&Const>> = vs.iter().map(|v| c.iter().filter(|k| &k.ty == v.ty()).collect()).collect();
            for combo in cartesian(&choices) {
                let map: Vec<(Var, Term)> = vs.iter().cloned().zip(combo.into_iter().map(Term::cnst)).collect();
                sub(&b.instantiate(&map), c, out, seen);
            }
        }
        _ => sub(w, c, out, seen),
    }
}

fn cartesian<'a, T>(choices: &[Vec<&'a T>]) -> Vec<Vec<&'a T>> {
    let mut acc: Vec<Vec<&T>> = vec![Vec::new()];
    for opts in choices {
        let mut next = Vec::new();
        for prefix in &acc {
            for o in opts {
                let mut p = prefix.clone();
                p.push(*o);
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

/// Right size: the number of constant applications, reading binders as forbidden constants.
pub fn right_size(u: &Term, c: &[(Var, Const)]) -> usize {
    match u {
        Term::Abs(vs, b) => right_size(&b.instantiate(&const_map(vs, c)), c),
        Term::App(_, args) => 1 + args.iter().map(|a| right_size(a, c)).sum::<usize>(),
        _ => 0,
    }
}

/// Number of root-to-leaf branches of a right term. A lone constant counts as one branch.
pub fn branch_count(u: &Term) -> usize {
    let (_, body) = u.strip_abs();
    let args = body.split_app().1;
    if args.is_empty() {
        1
    } else {
        args.iter().map(branch_count).sum()
    }
}

fn collect_types(t: &Term, out: &mut Vec<Type>) {
    if let Ok(ty) = t.type_of() {
        ty.subtypes(out);
    }
    match t {
        Term::Var(v) => v.ty().subtypes(out),
        Term::Const(c) => c.ty.subtypes(out),
        Term::Abs(vs, b) => {
            for v in vs.iter() {
                v.ty().subtypes(out);
            }
            collect_types(b, out);
        }
        Term::App(h, args) => {
            collect_types(h, out);
            for a in args.iter() {
                collect_types(a, out);
            }
        }
    }
}

impl Problem {
    pub fn new(x_name: &str, x_ty: Type) -> Problem {
        Problem { x: Var::new(x_name, x_ty), constants: BTreeMap::new(), items: Vec::new(), excluded: BTreeSet::new() }
    }

    pub fn add_const(&mut self, name: &str, ty: Type) {
        self.constants.insert(name.to_string(), ty);
    }

    pub fn constant(&self, name: &str) -> Const {
        Const::new(name, self.constants[name].clone())
    }

    fn forbidden_count(&self) -> usize {
        self.items.iter().map(|i| i.forbidden.len()).sum()
    }

    /// Add an item, creating fresh forbidden constants for the binders of its right term.
    pub fn add_item(&mut self, args: Vec<Term>, rel: Rel, rhs: Term) {
        let mut n = self.forbidden_count();
        let forbidden = rhs
            .bound_vars()
            .into_iter()
            .map(|v| {
                n += 1;
                let c = Const::new(&format!("#c{}", n), v.ty().clone());
                (v, c)
            })
            .collect();
        self.items.push(Item { args, rel, rhs, forbidden });
    }

    /// Add an item whose right term has higher type by applying both sides to fresh
    /// constants. The free variable's type must already accept the extra arguments.
    pub fn add_item_lowered(&mut self, args: Vec<Term>, rel: Rel, rhs: Term) {
        let ty = rhs.type_of().expect("well-typed right term");
        let mut extra = Vec::new();
        for a in &ty.args {
            let name = format!("#f{}", self.excluded.len() + 1);
            self.constants.insert(name.clone(), a.clone());
            self.excluded.insert(name.clone());
            extra.push(Term::cnst(&Const::new(&name, a.clone())).eta_long());
        }
        let rhs = Term::app(rhs, extra.clone()).normalize().eta_long();
        let mut all = args;
        all.extend(extra);
        self.add_item(all, rel, rhs);
    }

    pub fn order(&self) -> usize {
        self.x.ty().order()
    }

    pub fn scope(&self) -> Scope {
        Scope { consts: self.constants.clone(), free: Default::default() }
    }

    /// Constants a solution may use: those in right terms, plus the dummy.
    pub fn alphabet(&self) -> Vec<Const> {
        let mut names = BTreeSet::new();
        for it in &self.items {
            for c in it.rhs.constants() {
                if !c.is_reserved() && !self.excluded.contains(&*c.name) {
                    names.insert(c);
                }
            }
        }
        let mut out: Vec<Const> = names.into_iter().collect();
        out.push(dummy());
        out
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.order() <= 1 {
            out.push(Diagnostic::OrderTooLow);
        }
        let xt = self.x.ty();
        for (i, it) in self.items.iter().enumerate() {
            if it.args.len() != xt.arity() {
                out.push(Diagnostic::ArityMismatch(i));
            } else {
                for (j, a) in it.args.iter().enumerate() {
                    if a.type_of().ok().as_ref() != Some(&xt.args[j]) {
                        out.push(Diagnostic::ArgType(i, j));
                    }
                }
            }
            if !it.rhs.type_of().map(|t| t.is_base()).unwrap_or(false) {
                out.push(Diagnostic::NonGroundRhs(i));
            }
            let all = it.args.iter().chain(std::iter::once(&it.rhs));
            if all.clone().any(|t| !t.free_vars().is_empty()) {
                out.push(Diagnostic::NotClosed(i));
            }
            if all.clone().any(|t| t.type_of().is_ok() && !t.is_eta_long()) {
                out.push(Diagnostic::NotLong(i));
            }
            if all.clone().any(|t| t.constants().iter().any(|c| c.is_reserved() && !self.excluded.contains(&*c.name))) {
                out.push(Diagnostic::ReservedConstant(i));
            }
        }
        let names: Vec<BTreeSet<String>> = self
            .items
            .iter()
            .map(|it| {
                let mut s = BTreeSet::new();
                for t in it.args.iter().chain(std::iter::once(&it.rhs)) {
                    s.extend(t.bound_vars().iter().map(|v| v.name().to_string()));
                }
                s
            })
            .collect();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                if !names[i].is_disjoint(&names[j]) {
                    out.push(Diagnostic::SharedBoundVars(i, j));
                }
            }
        }
        out
    }

    pub fn build_sets(&self) -> (ProblemSets, Metrics) {
        let mut r = Vec::new();
        let mut seen = HashSet::new();
        for it in &self.items {
            for t in ground_closure(&it.rhs, &it.forbidden) {
                push_unique(&mut r, &mut seen, t);
            }
        }
        let mut l = Vec::new();
        for it in &self.items {
            let cs = it.forbidden_consts();
            let mut li: Vec<Term> = Vec::new();
            let mut seen = HashSet::new();
            for c in &cs {
                push_unique(&mut li, &mut seen, Term::cnst(c));
            }
            for a in &it.args {
                for t in subterms_rel(a, &cs) {
                    push_unique(&mut li, &mut seen, t);
                }
            }
            l.push(li);
        }
        let mut t = Vec::new();
        self.x.ty().subtypes(&mut t);
        for it in &self.items {
            collect_types(&it.rhs, &mut t);
        }
        let alpha = t.iter().map(|ty| ty.arity()).max().unwrap_or(0);
        let delta = self.items.iter().map(|it| right_size(&it.rhs, &it.forbidden)).sum();
        let p = self.items.iter().map(|it| branch_count(&it.rhs)).sum();
        (ProblemSets { r, l, t }, Metrics { delta, alpha, p })
    }

    pub fn metrics(&self) -> Metrics {
        self.build_sets().1
    }

    /// Parse the line-based problem format.
    pub fn parse(src: &str) -> Result<Problem, ParseError> {
        let mut consts: BTreeMap<String, Type> = BTreeMap::new();
        let mut prob: Option<Problem> = None;
        for (li, line) in src.lines().enumerate() {
            let lno = li + 1;
            let toks = lex(line, lno)?;
            if toks.is_empty() {
                continue;
            }
            let scope = Scope { consts: consts.clone(), free: Default::default() };
            let mut p = Parser::new(&toks, &scope);
            let kw = p.ident()?;
            match kw.as_str() {
                "base" => {
                    let b = p.ident()?;
                    if b != "o" {
                        return p.err("only the base type o is supported");
                    }
                }
                "const" => {
                    let name = p.ident()?;
                    if name.starts_with('#') || name == "o" {
                        return p.err(format!("reserved name {}", name));
                    }
                    p.expect(Tok::Colon)?;
                    let t = p.ty()?;
                    consts.insert(name, t);
                }
                "var" => {
                    let name = p.ident()?;
                    p.expect(Tok::Colon)?;
                    let t = p.ty()?;
                    prob = Some(Problem::new(&name, t));
                }
                "eq" | "neq" => {
                    let Some(pr) = prob.as_mut() else {
                        return p.err("items must follow the var declaration");
                    };
                    let sep = if kw == "eq" { Tok::Equals } else { Tok::NotEquals };
                    let mut args = Vec::new();
                    while p.peek().is_some() && p.peek() != Some(&sep) {
                        args.push(p.atom()?);
                    }
                    p.expect(sep)?;
                    let rhs = p.term()?;
                    if !p.at_end() {
                        return p.err("trailing input after right term");
                    }
                    let fin = |t: Term| crate::parse::finish_term(t).map_err(|msg| ParseError { line: lno, col: 1, msg });
                    let args = args.into_iter().map(fin).collect::<Result<Vec<_>, _>>()?;
                    let rhs = fin(rhs)?;
                    let rel = if kw == "eq" { Rel::Eq } else { Rel::Neq };
                    pr.add_item(args, rel, rhs);
                }
                _ => return Err(ParseError { line: lno, col: 1, msg: format!("unknown directive {}", kw) }),
            }
            if let Some(pr) = prob.as_mut() {
                pr.constants = consts.clone();
            }
        }
        let pr = prob.ok_or(ParseError { line: 1, col: 1, msg: "missing var declaration".into() })?;
        let diags = pr.validate();
        if let Some(d) = diags.first() {
            return Err(ParseError { line: 1, col: 1, msg: d.to_string() });
        }
        Ok(pr)
    }

    /// Render in the line-based problem format.
    pub fn to_source(&self) -> String {
        let mut s = String::from("base o\n");
        for (n, t) in &self.constants {
            if !self.excluded.contains(n) {
                s.push_str(&format!("const {} : {}\n", n, t));
            }
        }
        s.push_str(&format!("var {} : {}\n", self.x.name(), self.x.ty()));
        for it in &self.items {
            let args: Vec<String> = it.args.iter().map(|a| format!("({})", a.to_source())).collect();
            let (kw, op) = if it.rel == Rel::Eq { ("eq", "=") } else { ("neq", "!=") };
            s.push_str(&format!("{} {} {} {}\n", kw, args.join(" "), op, it.rhs.to_source()));
        }
        s
    }

    /// Parse a candidate solution in the scope of this problem.
    pub fn parse_term(&self, src: &str) -> Result<Term, ParseError> {
        crate::parse::parse_term(src, &self.scope())
    }
}
