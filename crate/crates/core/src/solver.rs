//! Bounded search for solutions: enumerate η-long terms by size and check each one
//! with the game.

use std::collections::HashSet;

use thiserror::Error;

use crate::game::{verdict, GameError, DEFAULT_BUDGET};
use crate::oracle;
use crate::problem::Problem;
use crate::term::{Const, Term, Var};
use crate::transforms;
use crate::tree::TermTree;
use crate::types::Type;

/// Caps used above the explicit ones when the size bound is requested.
pub const PRACTICAL_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_total_tiles: usize,
    pub max_depth_tiles: usize,
    pub step_budget: usize,
    pub use_bound: bool,
    /// Stop after this many candidates.
    pub max_terms: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_total_tiles: 4, max_depth_tiles: 4, step_budget: DEFAULT_BUDGET, use_bound: false, max_terms: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no solution within the caps after {tried} candidates")]
    CapExhausted { tried: usize },
    #[error("game and oracle disagree on {0}")]
    Disagreement(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub term: Term,
    pub tried: usize,
    /// Set when the size bound was requested but clipped.
    pub warning: Option<String>,
}

struct Enumerator<'a> {
    alphabet: &'a [Const],
    budget: usize,
}

impl<'a> Enumerator<'a> {
    fn lambda(&mut self, ctx: &mut Vec<Var>, ty: &Type, size: usize, depth: usize) -> Vec<Term> {
        let base = ctx.len();
        let vs: Vec<Var> = ty.args.iter().enumerate().map(|(i, a)| Var::new(&format!("x{}", base + i + 1), a.clone())).collect();
        ctx.extend(vs.iter().cloned());
        let bodies = self.body(ctx, size, depth);
        ctx.truncate(base);
        bodies.into_iter().map(|b| Term::abs(vs.clone(), b)).collect()
    }

    fn body(&mut self, ctx: &mut Vec<Var>, size: usize, depth: usize) -> Vec<Term> {
        let mut heads: Vec<(Term, Type)> = ctx.iter().map(|v| (Term::var(v), v.ty().clone())).collect();
        heads.extend(self.alphabet.iter().map(|c| (Term::cnst(c), c.ty.clone())));
        let mut out = Vec::new();
        for (h, ty) in heads {
            if self.budget == 0 {
                break;
            }
            if ty.args.is_empty() {
                if size == 0 {
                    self.budget -= 1;
                    out.push(h);
                }
                continue;
            }
            if size == 0 || depth == 0 {
                continue;
            }
            let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
            let k = ty.args.len();
            for parts in compositions(size - 1, k) {
                partial.clear();
                partial.push(Vec::new());
                for (a, &s) in ty.args.iter().zip(&parts) {
                    let opts = self.lambda(ctx, a, s, depth - 1);
                    let mut next = Vec::new();
                    for pre in &partial {
                        for o in &opts {
                            let mut v = pre.clone();
                            v.push(o.clone());
                            next.push(v);
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for args in partial.drain(..) {
                    if self.budget == 0 {
                        break;
                    }
                    self.budget -= 1;
                    out.push(Term::app(h.clone(), args));
                }
            }
        }
        out
    }
}

/// All ways to write `n` as an ordered sum of `k` naturals.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Closed η-long terms of type `ty` with exactly `size` tiles with leaves.
pub fn terms_of_size(ty: &Type, alphabet: &[Const], size: usize, max_depth: usize, limit: usize) -> Vec<Term> {
    let mut e = Enumerator { alphabet, budget: limit };
    let all = e.lambda(&mut Vec::new(), ty, size, max_depth);
    let mut seen = HashSet::new();
    all.into_iter().filter(|t| seen.insert(t.key())).collect()
}

/// Every closed η-long term up to the caps, in nondecreasing size.
pub fn enumerate_terms<'a>(ty: &'a Type, alphabet: &'a [Const], cfg: &'a SearchConfig) -> impl Iterator<Item = Term> + 'a {
    (0..=cfg.max_total_tiles).flat_map(move |s| terms_of_size(ty, alphabet, s, cfg.max_depth_tiles, cfg.max_terms)).take(cfg.max_terms)
}

/// The first enumerated term the game accepts, confirmed by the oracle.
pub fn solve(p: &Problem, cfg: &SearchConfig) -> Result<Solution, SolveError> {
    let mut cfg = cfg.clone();
    let mut warning = None;
    if cfg.use_bound {
        let b = transforms::bounds(p);
        let want = if p.order() <= 3 {
            Some(b.third_order_bound as u64)
        } else {
            b.general_bound
        };
        let cap = want.map_or(PRACTICAL_CAP, |w| (w as usize).min(PRACTICAL_CAP));
        if want.map_or(true, |w| w > PRACTICAL_CAP as u64) {
            warning = Some(format!("size bound {} exceeds the practical cap {}", transforms::show_bound(want), PRACTICAL_CAP));
        }
        cfg.max_total_tiles = cap;
        cfg.max_depth_tiles = cfg.max_depth_tiles.max(cap);
    }
    let alphabet = p.alphabet();
    let ty = p.x.ty().clone();
    let mut tried = 0;
    for t in enumerate_terms(&ty, &alphabet, &cfg) {
        tried += 1;
        if verdict(&TermTree::from_term(&t), p, cfg.step_budget)? {
            let ok = oracle::solves(&t, p).map(|r| r.overall).unwrap_or(false);
            if !ok {
                return Err(SolveError::Disagreement(t.to_string()));
            }
            return Ok(Solution { term: t, tried, warning });
        }
    }
    Err(SolveError::CapExhausted { tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn small_terms_of_a_second_order_type() {
        let a = Const::new("a", Type::base());
        let d = crate::problem::dummy();
        let ty = Type::arrow(vec![Type::arrow(vec![Type::base()])]);
        let alpha = [a, d];
        let cfg = SearchConfig { max_total_tiles: 2, ..Default::default() };
        let got: Vec<String> = enumerate_terms(&ty, &alpha, &cfg).map(|t| t.to_string()).collect();
        assert_eq!(got.len(), 6, "{:?}", got);
        assert_eq!(terms_of_size(&ty, &alpha, 0, 4, 100).len(), 2);
    }

    #[test]
    fn solves_the_curated_problems() {
        for (inst, cap) in [(catalog::TWICE, 4), (catalog::BINDER, 6)] {
            let (p, _) = inst.load();
            let small = inst.load_small().unwrap();
            let cfg = SearchConfig { max_total_tiles: cap, max_depth_tiles: cap, ..Default::default() };
            let s = solve(&p, &cfg).unwrap();
            assert!(oracle::solves(&s.term, &p).unwrap().overall);
            assert!(transforms::total_size(&s.term) <= transforms::total_size(&small));
        }
    }
}
