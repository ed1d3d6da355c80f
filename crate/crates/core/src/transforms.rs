//! Solution-preserving transformations, a greedy shrinker and the size bounds.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::game::{all_plays, child_of, is_ri, verdict, GameError, Play, DEFAULT_BUDGET};
use crate::problem::{dummy, Problem};
use crate::term::Term;
use crate::tree::{Label, NodeId, TermTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("node {0} is visited by a play")]
    NotAvoided(usize),
    #[error("node {0} is not a variable or a higher-type constant")]
    NotReplaceable(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("the transformed term is no longer a solution")]
    NotPreserved,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `|t|` and `||t||`: simple tiles with at least one atomic leaf, on a longest branch and
/// in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeMeasures {
    pub depth_tiles: usize,
    pub total_tiles: usize,
}

pub fn sizes(t: &Term) -> SizeMeasures {
    let tree = TermTree::from_term(t);
    tree_sizes(&tree)
}

pub fn tree_sizes(tree: &TermTree) -> SizeMeasures {
    let counts = |n: NodeId| !tree.is_lambda(n) && !tree.children(n).is_empty();
    let total_tiles = (0..tree.len()).filter(|&n| counts(n)).count();
    let mut depth = vec![0usize; tree.len()];
    let mut depth_tiles = 0;
    for n in 0..tree.len() {
        let above = tree.parent(n).map_or(0, |p| depth[p]);
        depth[n] = above + usize::from(counts(n));
        depth_tiles = depth_tiles.max(depth[n]);
    }
    SizeMeasures { depth_tiles, total_tiles }
}

pub fn total_size(t: &Term) -> usize {
    sizes(t).total_tiles
}

/// A basic tile given by its root, atomic leaves and every node it covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicTile {
    pub root: NodeId,
    pub leaves: Vec<NodeId>,
    pub nodes: BTreeSet<NodeId>,
}

impl BasicTile {
    pub fn simple(tree: &TermTree, root: NodeId) -> BasicTile {
        let leaves = tree.children(root).to_vec();
        let mut nodes: BTreeSet<NodeId> = leaves.iter().copied().collect();
        nodes.insert(root);
        BasicTile { root, leaves, nodes }
    }

    /// Grow the simple tile through every lambda whose body is headed by a variable the
    /// tile itself binds.
    pub fn maximal(tree: &TermTree, root: NodeId) -> BasicTile {
        let mut nodes = BTreeSet::from([root]);
        let mut leaves = Vec::new();
        let mut todo = vec![root];
        while let Some(n) = todo.pop() {
            for &c in tree.children(n) {
                nodes.insert(c);
                let h = tree.children(c)[0];
                match tree.node(h).binder {
                    Some((b, _)) if nodes.contains(&b) => {
                        nodes.insert(h);
                        todo.push(h);
                    }
                    _ => leaves.push(c),
                }
            }
        }
        leaves.sort_unstable();
        BasicTile { root, leaves, nodes }
    }

    pub fn is_composite(&self) -> bool {
        self.nodes.len() > self.leaves.len() + 1
    }

    /// No variable below leaf `j` (1-based) is bound inside the tile.
    pub fn is_j_end(&self, tree: &TermTree, j: usize) -> bool {
        let leaf = self.leaves[j - 1];
        !tree.subtree(leaf).any(|n| matches!(tree.node(n).binder, Some((b, _)) if self.nodes.contains(&b)))
    }

    /// `(i, j, leaf)`: `π(j)` is at a leaf and reaches `π(i)` at the root through
    /// parents inside the tile.
    pub fn plays_on(&self, tree: &TermTree, play: &Play) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for j in 2..play.len() {
            let Some(m) = self.leaves.iter().position(|&l| l == play.at(j).node) else { continue };
            let mut cur = j;
            while let Some(i) = child_of(tree, play, cur) {
                let n = play.at(i).node;
                if n == self.root {
                    out.push((i, j, m + 1));
                    break;
                }
                if !self.nodes.contains(&n) || self.leaves.contains(&n) {
                    break;
                }
                cur = i;
            }
        }
        out
    }

    /// Every visit to the root opens a shortest ri play ending at leaf `j`; the next
    /// visit is looked for after that play ends.
    pub fn is_j_directed_in(&self, tree: &TermTree, play: &Play, j: usize) -> bool {
        let all = self.plays_on(tree, play);
        let mut from = 1;
        loop {
            let Some(i) = (from..=play.len()).find(|&n| play.at(n).node == self.root) else { return true };
            match all.iter().filter(|p| p.0 == i).min_by_key(|p| p.1) {
                Some(&(s, e, m)) if m == j && is_ri(play, s, e) => from = e + 1,
                _ => return false,
            }
        }
    }

    pub fn is_j_directed(&self, tree: &TermTree, plays: &[Play], j: usize) -> bool {
        plays.iter().all(|p| self.is_j_directed_in(tree, p, j))
    }
}

/// Nodes visited by some play.
fn visited(plays: &[Play]) -> BTreeSet<NodeId> {
    plays.iter().flat_map(|p| p.positions.iter().map(|q| q.node)).collect()
}

/// Candidates for T1: maximal unvisited subtrees headed by a variable or a constant with
/// arguments.
pub fn t1_candidates(tree: &TermTree, plays: &[Play]) -> Vec<NodeId> {
    let seen = visited(plays);
    let mut out: Vec<NodeId> = Vec::new();
    for n in 0..tree.len() {
        if tree.is_lambda(n) || seen.contains(&n) || out.iter().any(|&a| tree.is_ancestor(a, n)) {
            continue;
        }
        let ok = match &tree.node(n).label {
            Label::Var(_) => true,
            Label::Const(c) => c.ty.arity() > 0,
            Label::Lambda(_) => false,
        };
        if ok {
            out.push(n);
        }
    }
    out
}

/// Replace the unvisited subtree at `node` by the dummy constant.
pub fn t1_apply(tree: &TermTree, p: &Problem, node: NodeId) -> Result<Term, TransformError> {
    let plays = all_plays(tree, p, DEFAULT_BUDGET)?;
    if visited(&plays).contains(&node) {
        return Err(TransformError::NotAvoided(node + 1));
    }
    if !t1_candidates(tree, &plays).contains(&node) && !tree.is_lambda(node) {
        return Err(TransformError::NotReplaceable(node + 1));
    }
    let out = t1_rewrite(tree, &[node]);
    if !verdict(&TermTree::from_term(&out), p, DEFAULT_BUDGET)? {
        return Err(TransformError::NotPreserved);
    }
    Ok(out)
}

fn t1_rewrite(tree: &TermTree, nodes: &[NodeId]) -> Term {
    let d = Term::cnst(&dummy());
    let overrides: HashMap<NodeId, Term> = nodes.iter().map(|&n| (n, d.clone())).collect();
    tree.to_term_with(&overrides)
}

/// Splice the body of leaf `j` in place of the tile.
fn t2_rewrite(tree: &TermTree, tile: &BasicTile, j: usize) -> Term {
    let leaf = tile.leaves[j - 1];
    let body = tree.head_term(tree.children(leaf)[0], &HashMap::new());
    tree.to_term_with(&HashMap::from([(tile.root, body)]))
}

/// Remove a j-end, j-directed basic tile, keeping the body below leaf `j`.
pub fn t2_apply(tree: &TermTree, p: &Problem, tile: &BasicTile, j: usize) -> Result<Term, TransformError> {
    if j == 0 || j > tile.leaves.len() {
        return Err(TransformError::PreconditionFailed(format!("no leaf {}", j)));
    }
    if !matches!(tree.node(tile.root).label, Label::Var(_)) {
        return Err(TransformError::PreconditionFailed("not headed by a variable".into()));
    }
    if !tile.is_j_end(tree, j) {
        return Err(TransformError::PreconditionFailed(format!("not {}-end", j)));
    }
    let plays = all_plays(tree, p, DEFAULT_BUDGET)?;
    if !tile.is_j_directed(tree, &plays, j) {
        return Err(TransformError::PreconditionFailed(format!("not {}-directed", j)));
    }
    let out = t2_rewrite(tree, tile, j);
    if !verdict(&TermTree::from_term(&out), p, DEFAULT_BUDGET)? {
        return Err(TransformError::NotPreserved);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    T1,
    T2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShrinkStep {
    pub step: usize,
    pub kind: StepKind,
    /// 1-based root node in the term before the step.
    pub node: usize,
    pub before: usize,
    pub after: usize,
    pub term: Term,
}

impl fmt::Display for ShrinkStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{:?}\t{}\t{}\t{}", self.step, self.kind, self.node, self.before, self.after)
    }
}

#[derive(Clone, Debug)]
pub struct ShrinkResult {
    pub term: Term,
    pub steps: Vec<ShrinkStep>,
}

/// T1 on every candidate, then T2 on the deepest qualifying tile, until nothing applies.
/// Every step is re-checked with the game.
pub fn shrink(t: &Term, p: &Problem) -> Result<ShrinkResult, TransformError> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    if !verdict(&TermTree::from_term(&cur), p, DEFAULT_BUDGET)? {
        return Err(TransformError::PreconditionFailed("not a solution".into()));
    }
    'outer: loop {
        let tree = TermTree::from_term(&cur);
        let plays = all_plays(&tree, p, DEFAULT_BUDGET)?;
        let before = tree_sizes(&tree).total_tiles;
        for n in t1_candidates(&tree, &plays) {
            if matches!(&tree.node(n).label, Label::Const(c) if c.name.as_ref() == crate::problem::DUMMY) {
                continue;
            }
            let next = t1_rewrite(&tree, &[n]);
            if verdict(&TermTree::from_term(&next), p, DEFAULT_BUDGET)? {
                steps.push(ShrinkStep { step: steps.len() + 1, kind: StepKind::T1, node: n + 1, before, after: total_size(&next), term: next.clone() });
                cur = next;
                continue 'outer;
            }
        }
        let mut roots: Vec<NodeId> = (0..tree.len()).filter(|&n| matches!(tree.node(n).label, Label::Var(_)) && !tree.children(n).is_empty()).collect();
        roots.sort_by_key(|&n| (std::cmp::Reverse(tree.node(n).depth), n));
        for r in roots {
            let simple = BasicTile::simple(&tree, r);
            let maximal = BasicTile::maximal(&tree, r);
            let mut tiles = vec![simple];
            if maximal.is_composite() {
                tiles.push(maximal);
            }
            for tile in tiles {
                for j in 1..=tile.leaves.len() {
                    if !tile.is_j_end(&tree, j) || !tile.is_j_directed(&tree, &plays, j) {
                        continue;
                    }
                    let next = t2_rewrite(&tree, &tile, j);
                    let after = total_size(&next);
                    if after < before && verdict(&TermTree::from_term(&next), p, DEFAULT_BUDGET)? {
                        steps.push(ShrinkStep { step: steps.len() + 1, kind: StepKind::T2, node: r + 1, before, after, term: next.clone() });
                        cur = next;
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    Ok(ShrinkResult { term: cur, steps })
}

/// Size bounds. `None` stands for a value that exceeds 2^64.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub order: usize,
    pub order_n: usize,
    pub alpha: usize,
    pub delta: usize,
    pub p: usize,
    pub g_table: Vec<Option<u64>>,
    pub n_n: Option<u64>,
    pub third_order_bound: usize,
    pub general_bound: Option<u64>,
}

pub fn g(alpha: u64, k: usize) -> Option<u64> {
    let mut v: u64 = 1;
    for _ in 1..k {
        v = (alpha + 1).checked_pow(u32::try_from(v).ok()?)?;
    }
    Some(v)
}

/// `p · Σ_{i=1..g(n)} α^i`.
pub fn n_of(alpha: u64, p: u64, n: usize) -> Option<u64> {
    let gn = g(alpha, n)?;
    let mut sum: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..gn {
        pow = pow.checked_mul(alpha)?;
        sum = sum.checked_add(pow)?;
        if alpha <= 1 && sum >= gn {
            break;
        }
    }
    if alpha <= 1 {
        sum = gn * alpha;
    }
    p.checked_mul(sum)
}

/// `g(n) · (p² · δ · N(n) + p − 1)`.
pub fn general_bound(alpha: u64, delta: u64, p: u64, n: usize) -> Option<u64> {
    let inner = p.checked_mul(p)?.checked_mul(delta)?.checked_mul(n_of(alpha, p, n)?)?.checked_add(p.saturating_sub(1))?;
    g(alpha, n)?.checked_mul(inner)
}

pub fn third_order_bound(delta: usize, p: usize) -> usize {
    (delta + 2 * p).saturating_sub(1)
}

/// Depth bound for fifth-order problems with `k` top tiles.
pub fn fifth_order_bound(k: usize, alpha: usize, delta: usize, p: usize) -> usize {
    k * (alpha + 1) + delta + p + 1
}

pub fn bounds(p: &Problem) -> BoundReport {
    let m = p.metrics();
    let order = p.order();
    let order_n = order.saturating_sub(1).div_ceil(2).max(1);
    let (a, d, pp) = (m.alpha as u64, m.delta as u64, m.p as u64);
    BoundReport {
        order,
        order_n,
        alpha: m.alpha,
        delta: m.delta,
        p: m.p,
        g_table: (1..=order_n).map(|k| g(a, k)).collect(),
        n_n: n_of(a, pp, order_n),
        third_order_bound: third_order_bound(m.delta, m.p),
        general_bound: general_bound(a, d, pp, order_n),
    }
}

pub fn show_bound(v: Option<u64>) -> String {
    v.map_or_else(|| "exceeds 2^64".to_string(), |x| x.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn g_values() {
        assert_eq!(g(2, 1), Some(1));
        assert_eq!(g(2, 2), Some(3));
        assert_eq!(g(2, 3), Some(27));
        assert_eq!(g(2, 5), None);
        assert_eq!(n_of(2, 1, 2), Some(2 + 4 + 8));
    }

    #[test]
    fn shrink_reaches_the_small_solutions() {
        for inst in [catalog::TWICE, catalog::BINDER] {
            let (p, t) = inst.load();
            let small = inst.load_small().unwrap();
            let r = shrink(&t, &p).unwrap();
            assert!(crate::oracle::solves(&r.term, &p).unwrap().overall);
            assert!(total_size(&r.term) <= total_size(&small), "{} {}", inst.name, r.term);
        }
    }

    #[test]
    fn sizes_of_the_twice_term() {
        let (_, t) = catalog::TWICE.load();
        assert_eq!(total_size(&t), 5);
        assert_eq!(sizes(&t).depth_tiles, 3);
    }
}
