use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::types::Type;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug)]
pub struct VarData {
    pub id: u64,
    pub name: Rc<str>,
    pub ty: Type,
}

/// A variable. Identity is the integer id; the name is only for printing.
#[derive(Clone, Debug)]
pub struct Var(pub Rc<VarData>);

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var(Rc::new(VarData { id: fresh_id(), name: name.into(), ty }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    /// Same name and type, new identity.
    pub fn fresh_copy(&self) -> Var {
        Var(Rc::new(VarData { id: fresh_id(), name: self.0.name.clone(), ty: self.0.ty.clone() }))
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for Var {}
impl Hash for Var {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.id.hash(h)
    }
}
impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Var) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Var {
    fn cmp(&self, other: &Var) -> std::cmp::Ordering {
        self.0.id.cmp(&other.0.id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Const {
    pub name: Rc<str>,
    pub ty: Type,
}

impl Const {
    pub fn new(name: &str, ty: Type) -> Const {
        Const { name: name.into(), ty }
    }

    /// Reserved constants (forbidden constants and the dummy `#d`) start with `#`.
    pub fn is_reserved(&self) -> bool {
        self.name.starts_with('#')
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(Var),
    Const(Const),
    Abs(Rc<[Var]>, Rc<Term>),
    App(Rc<Term>, Rc<[Term]>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch at {path}: {msg}")]
    Mismatch { path: String, msg: String },
}

fn path_str(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Canonical form up to renaming of bound variables (de Bruijn levels).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Bound(usize),
    Free(u64),
    Const(Rc<str>),
    Abs(Vec<Type>, Box<Key>),
    App(Box<Key>, Vec<Key>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn cnst(c: &Const) -> Term {
        Term::Const(c.clone())
    }

    /// Abstraction that merges nested binders and drops empty binder lists.
    pub fn abs(vars: Vec<Var>, body: Term) -> Term {
        if vars.is_empty() {
            return body;
        }
        match body {
            Term::Abs(inner, b) => {
                let mut all = vars;
                all.extend(inner.iter().cloned());
                Term::Abs(all.into(), b)
            }
            body => Term::Abs(vars.into(), Rc::new(body)),
        }
    }

    /// Application that flattens nested applications and drops empty argument lists.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App(h, inner) => {
                let mut all: Vec<Term> = inner.to_vec();
                all.extend(args);
                Term::App(h, all.into())
            }
            head => Term::App(Rc::new(head), args.into()),
        }
    }

    /// Binders of a top-level abstraction and its body.
    pub fn strip_abs(&self) -> (&[Var], &Term) {
        match self {
            Term::Abs(vs, b) => (vs, b),
            t => (&[], t),
        }
    }

    /// Head and arguments of an application (the term itself with no arguments otherwise).
    pub fn split_app(&self) -> (&Term, &[Term]) {
        match self {
            Term::App(h, args) => (h, args),
            t => (t, &[]),
        }
    }

    /// Head symbol of the body of a normal form.
    pub fn head(&self) -> &Term {
        self.strip_abs().1.split_app().0
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Const(_))
    }

    pub fn type_of(&self) -> Result<Type, TypeError> {
        let mut path = Vec::new();
        self.type_at(&mut path)
    }

    fn type_at(&self, path: &mut Vec<usize>) -> Result<Type, TypeError> {
        match self {
            Term::Var(v) => Ok(v.ty().clone()),
            Term::Const(c) => Ok(c.ty.clone()),
            Term::Abs(vs, b) => {
                path.push(0);
                let bt = b.type_at(path)?;
                path.pop();
                let mut args: Vec<Type> = vs.iter().map(|v| v.ty().clone()).collect();
                args.extend(bt.args);
                Ok(Type::arrow(args))
            }
            Term::App(h, args) => {
                path.push(0);
                let ht = h.type_at(path)?;
                path.pop();
                if args.len() > ht.arity() {
                    return Err(TypeError::Mismatch {
                        path: path_str(path),
                        msg: format!("head of type {} applied to {} arguments", ht, args.len()),
                    });
                }
                for (i, a) in args.iter().enumerate() {
                    path.push(i + 1);
                    let at = a.type_at(path)?;
                    if at != ht.args[i] {
                        let msg = format!("argument {} has type {}, expected {}", i + 1, at, ht.args[i]);
                        return Err(TypeError::Mismatch { path: path_str(path), msg });
                    }
                    path.pop();
                }
                Ok(ht.drop_args(args.len()))
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut bound = HashSet::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut HashSet<u64>, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(&v.id()) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Abs(vs, b) => {
                let fresh: Vec<u64> = vs.iter().map(|v| v.id()).filter(|id| bound.insert(*id)).collect();
                b.collect_free(bound, out);
                for id in fresh {
                    bound.remove(&id);
                }
            }
            Term::App(h, args) => {
                h.collect_free(bound, out);
                for a in args.iter() {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = BTreeSet::new();
        self.collect_consts(&mut out);
        out
    }

    fn collect_consts(&self, out: &mut BTreeSet<Const>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::Abs(_, b) => b.collect_consts(out),
            Term::App(h, args) => {
                h.collect_consts(out);
                for a in args.iter() {
                    a.collect_consts(out);
                }
            }
        }
    }

    /// Every variable occurring as a binder.
    pub fn bound_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(_) | Term::Const(_) => {}
            Term::Abs(vs, b) => {
                out.extend(vs.iter().cloned());
                b.collect_bound(out);
            }
            Term::App(h, args) => {
                h.collect_bound(out);
                for a in args.iter() {
                    a.collect_bound(out);
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Abs(_, b) => 1 + b.size(),
            Term::App(h, args) => h.size() + args.iter().map(|a| a.size()).sum::<usize>(),
        }
    }

    /// Capture-avoiding simultaneous substitution. Every binder passed through is
    /// renamed, so the result never shares bound variables with the input.
    pub fn subst(&self, map: &[(Var, Term)]) -> Term {
        let mut env: Vec<(u64, Term)> = map.iter().map(|(v, t)| (v.id(), t.clone())).collect();
        self.subst_env(&mut env)
    }

    /// Replace free occurrences of variables by closed terms, keeping binders as they are.
    pub fn instantiate(&self, map: &[(Var, Term)]) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(v) => map.iter().find(|(w, _)| w == v).map(|(_, t)| t.clone()).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Abs(vs, b) => Term::abs(vs.to_vec(), b.instantiate(map)),
            Term::App(h, args) => Term::app(h.instantiate(map), args.iter().map(|a| a.instantiate(map)).collect()),
        }
    }

    /// A copy with all binders renamed apart.
    pub fn refresh(&self) -> Term {
        self.subst(&[])
    }

    fn subst_env(&self, env: &mut Vec<(u64, Term)>) -> Term {
        match self {
            Term::Var(v) => {
                for (id, t) in env.iter().rev() {
                    if *id == v.id() {
                        return t.clone();
                    }
                }
                self.clone()
            }
            Term::Const(_) => self.clone(),
            Term::Abs(vs, b) => {
                let fresh: Vec<Var> = vs.iter().map(|v| v.fresh_copy()).collect();
                for (old, new) in vs.iter().zip(&fresh) {
                    env.push((old.id(), Term::var(new)));
                }
                let nb = b.subst_env(env);
                env.truncate(env.len() - vs.len());
                Term::abs(fresh, nb)
            }
            Term::App(h, args) => {
                let nh = h.subst_env(env);
                let nargs = args.iter().map(|a| a.subst_env(env)).collect();
                Term::app(nh, nargs)
            }
        }
    }

    /// Contract a redex `(λxs.body) args` by one step.
    fn contract(vs: &[Var], body: &Term, args: &[Term]) -> Term {
        let n = vs.len().min(args.len());
        let map: Vec<(Var, Term)> = vs[..n].iter().cloned().zip(args[..n].iter().cloned()).collect();
        let rest_body = if n < vs.len() { Term::abs(vs[n..].to_vec(), body.clone()) } else { body.clone() };
        Term::app(rest_body.subst(&map), args[n..].to_vec())
    }

    /// β-normal form by normal-order (leftmost-outermost) reduction.
    pub fn normalize(&self) -> Term {
        match self {
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Abs(vs, b) => Term::abs(vs.to_vec(), b.normalize()),
            Term::App(h, args) => match &**h {
                Term::Abs(vs, b) => Term::contract(vs, b, args).normalize(),
                _ => {
                    let nh = h.normalize();
                    if let Term::Abs(..) = nh {
                        Term::app(nh, args.to_vec()).normalize()
                    } else {
                        Term::app(nh, args.iter().map(|a| a.normalize()).collect())
                    }
                }
            },
        }
    }

    /// β-normal form by applicative-order reduction (arguments first).
    pub fn normalize_applicative(&self) -> Term {
        match self {
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Abs(vs, b) => Term::abs(vs.to_vec(), b.normalize_applicative()),
            Term::App(h, args) => {
                let nargs: Vec<Term> = args.iter().map(|a| a.normalize_applicative()).collect();
                let nh = h.normalize_applicative();
                match &nh {
                    Term::Abs(vs, b) => Term::contract(vs, b, &nargs).normalize_applicative(),
                    _ => Term::app(nh, nargs),
                }
            }
        }
    }

    pub fn is_normal(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Abs(_, b) => b.is_normal(),
            Term::App(h, args) => h.is_atom() && args.iter().all(|a| a.is_normal()),
        }
    }

    /// η-long form of a β-normal term.
    pub fn eta_long(&self) -> Term {
        let ty = self.type_of().expect("eta_long needs a well-typed term");
        let (vs, body) = self.strip_abs();
        let extra: Vec<Var> = ty.args[vs.len()..].iter().map(|t| Var::new("e", t.clone())).collect();
        let (h, args) = body.split_app();
        let mut all: Vec<Term> = args.iter().map(|a| a.eta_long()).collect();
        all.extend(extra.iter().map(|v| Term::var(v).eta_long()));
        let mut binders = vs.to_vec();
        binders.extend(extra);
        Term::abs(binders, Term::app(h.clone(), all))
    }

    /// True if the term is β-normal and every head is fully applied with long arguments.
    pub fn is_eta_long(&self) -> bool {
        let Ok(ty) = self.type_of() else { return false };
        let (vs, body) = self.strip_abs();
        if vs.len() != ty.arity() {
            return false;
        }
        let (h, args) = body.split_app();
        h.is_atom() && h.type_of().map(|t| t.arity() == args.len()).unwrap_or(false) && args.iter().all(|a| a.is_eta_long())
    }

    pub fn key(&self) -> Key {
        let mut levels = HashMap::new();
        self.key_in(&mut levels, 0)
    }

    fn key_in(&self, levels: &mut HashMap<u64, usize>, depth: usize) -> Key {
        match self {
            Term::Var(v) => match levels.get(&v.id()) {
                Some(l) => Key::Bound(*l),
                None => Key::Free(v.id()),
            },
            Term::Const(c) => Key::Const(c.name.clone()),
            Term::Abs(vs, b) => {
                let saved: Vec<(u64, Option<usize>)> = vs.iter().map(|v| (v.id(), levels.get(&v.id()).copied())).collect();
                for (i, v) in vs.iter().enumerate() {
                    levels.insert(v.id(), depth + i);
                }
                let k = b.key_in(levels, depth + vs.len());
                for (id, old) in saved {
                    match old {
                        Some(l) => levels.insert(id, l),
                        None => levels.remove(&id),
                    };
                }
                Key::Abs(vs.iter().map(|v| v.ty().clone()).collect(), Box::new(k))
            }
            Term::App(h, args) => {
                Key::App(Box::new(h.key_in(levels, depth)), args.iter().map(|a| a.key_in(levels, depth)).collect())
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self == other || self.key() == other.key()
    }

    /// Concrete syntax accepted by the parser, with typed binders.
    pub fn to_source(&self) -> String {
        let mut p = Printer::new(self, true);
        let mut s = String::new();
        p.term(self, &mut s, false);
        s
    }
}

/// Assigns printable names so that distinct variables never print the same way in one scope.
struct Printer {
    typed: bool,
    names: HashMap<u64, String>,
    taken: Vec<String>,
    globals: HashSet<String>,
}

impl Printer {
    fn new(t: &Term, typed: bool) -> Printer {
        let mut globals: HashSet<String> = t.constants().iter().map(|c| c.name.to_string()).collect();
        let mut names = HashMap::new();
        for v in t.free_vars() {
            globals.insert(v.name().to_string());
            names.insert(v.id(), v.name().to_string());
        }
        Printer { typed, names, taken: Vec::new(), globals }
    }

    fn bind(&mut self, v: &Var) -> String {
        let mut n = v.name().to_string();
        while self.globals.contains(&n) || self.taken.contains(&n) || n == "o" {
            n.push('\'');
        }
        self.taken.push(n.clone());
        self.names.insert(v.id(), n.clone());
        n
    }

    fn term(&mut self, t: &Term, out: &mut String, paren: bool) {
        match t {
            Term::Var(v) => out.push_str(self.names.get(&v.id()).map(|s| s.as_str()).unwrap_or(v.name())),
            Term::Const(c) => out.push_str(&c.name),
            Term::Abs(vs, b) => {
                if paren {
                    out.push('(');
                }
                out.push(if self.typed { '\\' } else { 'λ' });
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    let n = self.bind(v);
                    out.push_str(&n);
                    if self.typed {
                        out.push(':');
                        if v.ty().is_base() {
                            out.push('o');
                        } else {
                            out.push_str(&format!("({})", v.ty()));
                        }
                    }
                }
                out.push('.');
                if self.typed {
                    out.push(' ');
                }
                self.term(b, out, false);
                self.taken.truncate(self.taken.len() - vs.len());
                if paren {
                    out.push(')');
                }
            }
            Term::App(h, args) => {
                if paren {
                    out.push('(');
                }
                self.term(h, out, true);
                for a in args.iter() {
                    out.push(' ');
                    self.term(a, out, !a.is_atom());
                }
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(self, false);
        let mut s = String::new();
        p.term(self, &mut s, false);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> Type {
        Type::base()
    }
    fn oo() -> Type {
        Type::arrow(vec![o()])
    }

    #[test]
    fn identity_redex() {
        let a = Const::new("a", o());
        let x = Var::new("x", o());
        let t = Term::app(Term::abs(vec![x.clone()], Term::var(&x)), vec![Term::cnst(&a)]);
        assert_eq!(t.normalize(), Term::cnst(&a));
        assert_eq!(t.normalize_applicative(), Term::cnst(&a));
    }

    #[test]
    fn eta_expands_constant() {
        let f = Const::new("f", oo());
        let t = Term::cnst(&f).eta_long();
        assert_eq!(t.to_string(), "λe.f e");
        assert!(t.is_eta_long());
        let a = Term::cnst(&Const::new("a", o()));
        assert_eq!(a.eta_long(), a);
    }

    #[test]
    fn alpha() {
        let z = Var::new("z", o());
        let w = Var::new("w", o());
        let a = Const::new("a", o());
        let id1 = Term::abs(vec![z.clone()], Term::var(&z));
        let id2 = Term::abs(vec![w.clone()], Term::var(&w));
        assert!(id1.alpha_eq(&id2));
        let k = Term::abs(vec![z.clone()], Term::cnst(&a));
        assert!(!id1.alpha_eq(&k));
    }

    #[test]
    fn type_mismatch_on_base_application() {
        let x = Var::new("x", o());
        let l = Var::new("l", o());
        let t = Term::App(Rc::new(Term::var(&x)), vec![Term::var(&l)].into());
        assert!(t.type_of().is_err());
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λy.λx.y) x  ~>  λx'.x
        let x = Var::new("x", o());
        let y = Var::new("y", o());
        let inner = Term::abs(vec![x.clone()], Term::var(&y));
        let r = Term::contract(&[y.clone()], &inner, &[Term::var(&x)]);
        let (vs, body) = r.strip_abs();
        assert_ne!(vs[0], x);
        assert_eq!(body, &Term::var(&x));
        assert_eq!(r.to_string(), "λx'.x");
    }
}
