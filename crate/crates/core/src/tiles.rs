//! Static tile structure of a term tree and plays on simple tiles.
//!
//! A simple tile is identified by its root: a variable or constant node together with
//! its lambda successors, which are its atomic leaves.

use std::collections::{BTreeSet, HashSet};

use crate::game::{self, child_of, is_ri, Play};
use crate::tree::{Label, NodeId, TermTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub root: NodeId,
    pub leaves: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileClass {
    pub is_top: bool,
    pub is_constant: bool,
    /// 1-based leaf indices `j` for which the tile is j-end.
    pub j_end: BTreeSet<usize>,
    pub is_end: bool,
    pub is_embedded: bool,
    pub level: Option<usize>,
}

pub fn tile_at(tree: &TermTree, root: NodeId) -> Tile {
    Tile { root, leaves: tree.children(root).to_vec() }
}

/// Every simple tile, in preorder of roots.
pub fn simple_tiles(tree: &TermTree) -> Vec<Tile> {
    (0..tree.len()).filter(|&n| !tree.is_lambda(n)).map(|n| tile_at(tree, n)).collect()
}

/// The tile whose leaf binds the head variable of the tile at `root`. `None` for
/// constant heads and for variables bound by the initial lambda.
pub fn binder_tile(tree: &TermTree, root: NodeId) -> Option<NodeId> {
    let (b, _) = tree.node(root).binder?;
    tree.parent(b)
}

pub fn is_top(tree: &TermTree, root: NodeId) -> bool {
    matches!(tree.node(root).binder, Some((b, _)) if b == tree.root())
}

/// Follow binders up to a constant tile or a top tile.
pub fn family_root(tree: &TermTree, root: NodeId) -> NodeId {
    let mut cur = root;
    while let Some(b) = binder_tile(tree, cur) {
        cur = b;
    }
    cur
}

pub fn is_constant(tree: &TermTree, root: NodeId) -> bool {
    matches!(tree.node(family_root(tree, root)).label, Label::Const(_))
}

/// Tiles whose head variable is bound by leaf `j` (1-based) of the tile.
pub fn immediate_j_dependents(tree: &TermTree, root: NodeId, j: usize) -> Vec<NodeId> {
    let leaf = tree.children(root)[j - 1];
    tree.subtree(leaf).filter(|&n| matches!(tree.node(n).binder, Some((b, _)) if b == leaf)).collect()
}

pub fn immediate_dependents(tree: &TermTree, root: NodeId) -> Vec<NodeId> {
    (1..=tree.children(root).len()).flat_map(|j| immediate_j_dependents(tree, root, j)).collect()
}

/// Transitive dependents.
pub fn dependents(tree: &TermTree, root: NodeId) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut todo = vec![root];
    while let Some(r) = todo.pop() {
        for d in immediate_dependents(tree, r) {
            if out.insert(d) {
                todo.push(d);
            }
        }
    }
    out
}

pub fn family(tree: &TermTree, root: NodeId) -> BTreeSet<NodeId> {
    let r = family_root(tree, root);
    let mut out = dependents(tree, r);
    out.insert(r);
    out
}

pub fn same_family(tree: &TermTree, a: NodeId, b: NodeId) -> bool {
    family_root(tree, a) == family_root(tree, b)
}

pub fn is_j_end(tree: &TermTree, root: NodeId, j: usize) -> bool {
    immediate_j_dependents(tree, root, j).is_empty()
}

/// Tiles with the same head symbol are α-equivalent: their leaves are atomic.
pub fn tile_equiv(tree: &TermTree, a: NodeId, b: NodeId) -> bool {
    match (&tree.node(a).label, &tree.node(b).label) {
        (Label::Var(x), Label::Var(y)) => x == y,
        (Label::Const(c), Label::Const(d)) => c.name == d.name,
        _ => false,
    }
}

/// A non-constant tile with an equivalent tile above it.
pub fn is_embedded(tree: &TermTree, root: NodeId) -> bool {
    if is_constant(tree, root) {
        return false;
    }
    let mut cur = tree.parent(root);
    while let Some(n) = cur {
        if !tree.is_lambda(n) && tile_equiv(tree, n, root) {
            return true;
        }
        cur = tree.parent(n);
    }
    false
}

pub fn level(tree: &TermTree, root: NodeId) -> Option<usize> {
    if is_constant(tree, root) {
        return None;
    }
    let mut l = 1;
    let mut cur = root;
    while let Some(b) = binder_tile(tree, cur) {
        l += 1;
        cur = b;
    }
    Some(l)
}

pub fn classify(tree: &TermTree, root: NodeId) -> TileClass {
    let k = tree.children(root).len();
    let j_end: BTreeSet<usize> = (1..=k).filter(|&j| is_j_end(tree, root, j)).collect();
    TileClass {
        is_top: is_top(tree, root),
        is_constant: is_constant(tree, root),
        is_end: j_end.len() == k,
        j_end,
        is_embedded: is_embedded(tree, root),
        level: level(tree, root),
    }
}

/// Binding lambdas excluded when comparing tables "except for" the tile: the leaves of
/// the tile and of all its dependents.
pub fn excluded_binders(tree: &TermTree, root: NodeId) -> HashSet<NodeId> {
    let mut out: HashSet<NodeId> = tree.children(root).iter().copied().collect();
    for d in dependents(tree, root) {
        out.extend(tree.children(d).iter().copied());
    }
    out
}

/// A play `π(i,j)` on a simple tile, ending at leaf `m` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TilePlay {
    pub start: usize,
    pub end: usize,
    pub leaf: usize,
}

/// Every play on the tile: `π(i)` at its root, `π(j)` at a leaf and a child of `π(i)`.
pub fn plays_on(tree: &TermTree, play: &Play, root: NodeId) -> Vec<TilePlay> {
    let leaves = tree.children(root);
    let mut out = Vec::new();
    for j in 2..play.len() {
        let n = play.at(j).node;
        if let Some(m) = leaves.iter().position(|&l| l == n) {
            if let Some(i) = child_of(tree, play, j) {
                if play.at(i).node == root {
                    out.push(TilePlay { start: i, end: j, leaf: m + 1 });
                }
            }
        }
    }
    out.sort_by_key(|p| (p.start, p.end));
    out
}

pub fn is_shortest(all: &[TilePlay], p: &TilePlay) -> bool {
    !all.iter().any(|q| q.start == p.start && q.end < p.end)
}

pub fn is_shortest_leaf(all: &[TilePlay], p: &TilePlay) -> bool {
    !all.iter().any(|q| q.start == p.start && q.leaf == p.leaf && q.end < p.end)
}

pub fn is_internal(tree: &TermTree, play: &Play, root: NodeId, p: &TilePlay) -> bool {
    let leaves = tree.children(root);
    (p.start..=p.end).all(|n| {
        let node = play.at(n).node;
        node == root || leaves.contains(&node)
    })
}

pub fn is_ri_play(play: &Play, p: &TilePlay) -> bool {
    is_ri(play, p.start, p.end)
}

/// Every visit to the root opens a shortest ri j-play; the next visit is looked for
/// after it ends.
pub fn is_j_directed_in(tree: &TermTree, play: &Play, root: NodeId, j: usize) -> bool {
    let all = plays_on(tree, play, root);
    let mut from = 1;
    loop {
        let Some(m) = (from..=play.len()).find(|&n| play.at(n).node == root) else {
            return true;
        };
        let first = all.iter().filter(|p| p.start == m).min_by_key(|p| p.end);
        match first {
            Some(p) if p.leaf == j && is_ri(play, p.start, p.end) => from = p.end + 1,
            _ => return false,
        }
    }
}

pub fn is_j_directed(tree: &TermTree, plays: &[Play], root: NodeId, j: usize) -> bool {
    plays.iter().all(|p| is_j_directed_in(tree, p, root, j))
}

/// Convenience: the nodes visited by any play.
pub fn visited(plays: &[Play]) -> HashSet<NodeId> {
    plays.iter().flat_map(|p| p.positions.iter().map(|q| q.node)).collect()
}

pub fn vary_tile(tree: &TermTree, play: &Play, j: usize, j2: usize) -> Option<(game::Variance, Tile)> {
    let v = game::vary_at(tree, play, j, j2).ok()?;
    let t = tile_at(tree, v.tile_root);
    Some((v, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn tree(inst: &catalog::Instance) -> TermTree {
        TermTree::from_term(&inst.load().1)
    }

    #[test]
    fn classification_of_the_fourth_order_term() {
        let t = tree(&catalog::TWICE);
        let c = classify(&t, 1);
        assert!(c.is_top);
        assert_eq!(c.j_end, [2].into_iter().collect());
        let c = classify(&t, 5);
        assert!(c.is_top && c.is_end);
    }

    #[test]
    fn families_and_levels() {
        let t = tree(&catalog::FIFTH);
        assert_eq!(family(&t, 15), [3, 7, 15].into_iter().collect());
        assert_eq!(level(&t, 7), Some(2));
        assert!(!tile_equiv(&t, 5, 7));
    }
}
