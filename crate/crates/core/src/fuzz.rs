//! Seeded random problems with planted solutions, and the game/oracle comparison.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{verdict, DEFAULT_BUDGET};
use crate::{oracle, solver};
use crate::problem::{Problem, Rel};
use crate::term::{Const, Term, Var};
use crate::tree::{NodeId, TermTree};
use crate::types::Type;

pub const MAX_DELTA: usize = 4;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_order: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { seed: 1, count: 1000, max_order: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub problem: String,
    pub term: String,
    pub game: Result<bool, String>,
    pub oracle: bool,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub pairs: usize,
    pub solutions: usize,
    pub mismatches: Vec<Mismatch>,
}

impl FuzzReport {
    pub fn render(&self) -> String {
        let mut s = format!("pairs {}\nsolutions {}\nmismatches {}\n", self.pairs, self.solutions, self.mismatches.len());
        for m in &self.mismatches {
            s.push_str(&format!("mismatch\t{}\tgame {:?}\toracle {}\n{}", m.term, m.game, m.oracle, m.problem));
        }
        s
    }
}

fn signature() -> Vec<Const> {
    let o = Type::base;
    vec![
        Const::new("a", o()),
        Const::new("b", o()),
        Const::new("f", Type::arrow(vec![o()])),
        Const::new("g", Type::arrow(vec![o(), o()])),
        Const::new("h", Type::arrow(vec![Type::arrow(vec![o()])])),
    ]
}

/// A random type of exactly order `order` with at most two arguments per arrow.
pub fn random_type(rng: &mut impl Rng, order: usize) -> Type {
    if order <= 1 {
        return Type::base();
    }
    let n = rng.gen_range(1..=2);
    let hi = rng.gen_range(0..n);
    let mut args = Vec::new();
    for i in 0..n {
        let o = if i == hi { order - 1 } else { rng.gen_range(1..order) };
        args.push(random_type(rng, o));
    }
    Type::arrow(args)
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    consts: &'a [Const],
    next: usize,
    /// Force a variable head at the next body.
    var_head: bool,
}

impl<R: Rng> Gen<'_, R> {
    fn lambda(&mut self, ctx: &mut Vec<Var>, ty: &Type, fuel: usize) -> Term {
        let base = ctx.len();
        let vs: Vec<Var> = ty
            .args
            .iter()
            .map(|a| {
                self.next += 1;
                Var::new(&format!("v{}", self.next), a.clone())
            })
            .collect();
        ctx.extend(vs.iter().cloned());
        let body = self.body(ctx, fuel);
        ctx.truncate(base);
        Term::abs(vs, body)
    }

    fn body(&mut self, ctx: &mut Vec<Var>, fuel: usize) -> Term {
        let vars: Vec<(Term, Type)> = ctx.iter().map(|v| (Term::var(v), v.ty().clone())).collect();
        let consts: Vec<(Term, Type)> = self.consts.iter().map(|c| (Term::cnst(c), c.ty.clone())).collect();
        let forced = std::mem::take(&mut self.var_head) && vars.iter().any(|v| !v.1.is_base());
        let from_vars = !vars.is_empty() && (forced || self.rng.gen_bool(0.65));
        let mut pool: Vec<&(Term, Type)> = if from_vars { vars.iter().collect() } else { consts.iter().collect() };
        if fuel == 0 {
            let ground: Vec<_> = vars.iter().chain(consts.iter()).filter(|h| h.1.is_base()).collect();
            if !ground.is_empty() {
                pool = ground;
            }
        }
        if pool.is_empty() {
            pool = vars.iter().chain(consts.iter()).collect();
        }
        let (h, ty) = (*pool.choose(self.rng).expect("a head")).clone();
        let sub = fuel.saturating_sub(1);
        let args = ty.args.iter().map(|a| self.lambda(ctx, a, sub)).collect();
        Term::app(h, args)
    }
}

/// A random closed η-long term of type `ty`.
pub fn random_term(rng: &mut impl Rng, ty: &Type, consts: &[Const], fuel: usize) -> Term {
    let mut g = Gen { rng, consts, next: 0, var_head: false };
    g.lambda(&mut Vec::new(), ty, fuel)
}

/// Replace one random subterm of base type by a fresh random body in the same scope.
pub fn mutate(rng: &mut impl Rng, t: &Term, consts: &[Const]) -> Term {
    let tree = TermTree::from_term(t);
    let heads: Vec<NodeId> = (0..tree.len()).filter(|&n| !tree.is_lambda(n)).collect();
    let n = *heads.choose(rng).expect("a head node");
    let mut ctx = Vec::new();
    let mut cur = tree.parent(n);
    while let Some(a) = cur {
        if tree.is_lambda(a) {
            ctx.splice(0..0, tree.binders(a).iter().cloned());
        }
        cur = tree.parent(a);
    }
    let mut g = Gen { rng, consts, next: 1000, var_head: false };
    let body = g.body(&mut ctx, 2);
    tree.to_term_with(&HashMap::from([(n, body)]))
}

/// A problem whose equations are computed from a random term, so that term solves it.
/// Returns `None` when the draw exceeds the size limits or is solved by a trivial term.
pub fn try_planted(rng: &mut impl Rng, order: usize) -> Option<(Problem, Term)> {
    let sig = signature();
    let ty = random_type(rng, order);
    let consts: Vec<Const> = sig.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    let mut consts = consts;
    if !consts.iter().any(|c| c.ty.is_base()) {
        consts.push(sig[0].clone());
    }
    let t = Gen { rng: &mut *rng, consts: &consts, next: 0, var_head: true }.lambda(&mut Vec::new(), &ty, 4);
    let mut p = Problem::new("x", ty.clone());
    for c in &sig {
        p.add_const(&c.name, c.ty.clone());
    }
    let items = rng.gen_range(1..=3);
    for _ in 0..items {
        let args: Vec<Term> = ty.args.iter().map(|a| random_term(rng, a, &sig, 3)).collect();
        let nf = Term::app(t.clone(), args.clone()).normalize().eta_long();
        if nf.size() > 40 {
            return None;
        }
        if rng.gen_bool(0.2) {
            let other = random_term(rng, &Type::base(), &sig, 2).strip_abs().1.clone();
            if !other.alpha_eq(&nf) {
                p.add_item(args, Rel::Neq, other);
                continue;
            }
        }
        p.add_item(args, Rel::Eq, nf);
    }
    if !p.validate().is_empty() || p.metrics().delta > MAX_DELTA {
        return None;
    }
    // Skip problems that a term without applications already solves.
    let trivial = solver::terms_of_size(&ty, &p.alphabet(), 0, 0, 64);
    if trivial.iter().any(|u| oracle::solves(u, &p).map_or(false, |r| r.overall)) {
        return None;
    }
    Some((p, t))
}

pub fn planted(rng: &mut impl Rng, order: usize) -> (Problem, Term) {
    loop {
        if let Some(x) = try_planted(rng, order) {
            return x;
        }
    }
}

/// Compare game and oracle on `count` pairs. Even pairs use the planted solution, odd
/// pairs a mutation of it or a random term over the problem's alphabet.
pub fn fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = FuzzReport::default();
    let top = cfg.max_order.max(2);
    let mut current: Option<(Problem, Term)> = None;
    for i in 0..cfg.count {
        let (p, t) = if i % 2 == 0 {
            let order = rng.gen_range(2..=top);
            let pt = planted(&mut rng, order);
            current = Some(pt.clone());
            pt
        } else {
            let (p, planted_term) = current.clone().expect("set on even pairs");
            let t = if rng.gen_bool(0.5) {
                mutate(&mut rng, &planted_term, &p.alphabet())
            } else {
                random_term(&mut rng, p.x.ty(), &p.alphabet(), 3)
            };
            (p, t)
        };
        report.pairs += 1;
        let want = oracle::solves(&t, &p).map(|r| r.overall).unwrap_or(false);
        let got = verdict(&TermTree::from_term(&t), &p, DEFAULT_BUDGET).map_err(|e| e.to_string());
        if want {
            report.solutions += 1;
        }
        if got.as_ref().ok() != Some(&want) {
            report.mismatches.push(Mismatch { problem: p.to_source(), term: t.to_string(), game: got, oracle: want });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_terms_solve_their_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for order in 2..=5 {
            let (p, t) = planted(&mut rng, order);
            assert_eq!(p.order(), order);
            assert!(oracle::solves(&t, &p).unwrap().overall);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = FuzzConfig { seed: 3, count: 40, max_order: 4 };
        assert_eq!(fuzz(&cfg).render(), fuzz(&cfg).render());
    }
}
