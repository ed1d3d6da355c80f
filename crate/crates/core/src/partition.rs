//! Play partitions: the staged decomposition of a play into plays on simple tiles.
//!
//! Every stage names a tile occurrence. Occurrence `0` stands for the initial lambda.
//! Positions carry the occurrence of the node they are at; the occurrence of a jump
//! target is the occurrence of the variable position that created the ξ entry.

use std::fmt;

use crate::game::{correspond, is_descendant, vary_at, Move, Play, Similarity, State};
use crate::term::Term;
use crate::tiles::{excluded_binders, same_family};
use crate::tree::{NodeId, TermTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    /// Root node of the simple tile.
    pub tile: NodeId,
    pub start: usize,
    pub end: usize,
    /// `(l, leaf)`: the tile hangs below atomic leaf `leaf` of stage `l` (0 = the initial lambda).
    pub edge: (usize, NodeId),
}

#[derive(Clone, Debug)]
pub struct PPartition {
    pub stages: Vec<Stage>,
    /// Occurrence of each position (index `j - 1`), when known.
    pub tags: Vec<Option<usize>>,
}

impl PPartition {
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        self.stages.iter().map(|s| (s.start, s.end)).collect()
    }

    pub fn stage(&self, k: usize) -> &Stage {
        &self.stages[k - 1]
    }

    /// Stage whose interval contains position `j`.
    pub fn stage_of(&self, j: usize) -> Option<usize> {
        self.stages.iter().position(|s| s.start <= j && j <= s.end).map(|k| k + 1)
    }

    /// Stages on the path from the first stage to stage `k`, following edges.
    pub fn path(&self, k: usize) -> Vec<usize> {
        let mut out = vec![k];
        let mut cur = k;
        while cur > 1 {
            cur = self.stage(cur).edge.0;
            if cur == 0 {
                break;
            }
            out.push(cur);
        }
        out.reverse();
        out
    }

    pub fn render(&self, tree: &TermTree) -> String {
        let mut s = String::new();
        for (k, st) in self.stages.iter().enumerate() {
            let edge = if k == 0 { String::new() } else { format!("=> {}({})@{}", tree.label_string(st.edge.1), st.edge.1 + 1, st.edge.0) };
            s.push_str(&format!("{}\t{}({})\t({},{})\t{}\n", k + 1, tile_label(tree, st.tile), st.tile + 1, st.start, st.end, edge));
        }
        s
    }
}

/// `z(λx,λ)` style rendering of a simple tile.
pub fn tile_label(tree: &TermTree, root: NodeId) -> String {
    let kids = tree.children(root);
    if kids.is_empty() {
        return tree.label_string(root);
    }
    let leaves: Vec<String> = kids.iter().map(|&c| tree.label_string(c)).collect();
    format!("{}({})", tree.label_string(root), leaves.join(","))
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ({},{}) => ({})@{}", self.tile + 1, self.start, self.end, self.edge.1 + 1, self.edge.0)
    }
}

struct Builder<'a> {
    tree: &'a TermTree,
    play: &'a Play,
    stages: Vec<Stage>,
    tags: Vec<Option<usize>>,
}

impl<'a> Builder<'a> {
    fn tag(&self, j: usize) -> Option<usize> {
        self.tags[j - 1]
    }

    /// Occurrence of position `j`, given the occurrences of earlier positions.
    fn compute_tag(&self, j: usize) -> Option<usize> {
        if j == 1 {
            return Some(0);
        }
        let p = self.play.at(j);
        let prev = self.play.at(j - 1);
        match p.mv {
            Move::A1 | Move::A2 | Move::A3 => {
                let l = self.tag(j - 1)?;
                self.stages.iter().rposition(|s| s.edge == (l, prev.node)).map(|k| k + 1)
            }
            Move::B1 | Move::C1 | Move::C2 | Move::C3 => self.tag(j - 1),
            Move::C4 => {
                let State::Value(l, _) = &prev.state else { return None };
                let Term::Var(x) = l.strip_abs().1.head() else { return None };
                let e = p.xi.get(&x.id())?;
                self.tag(e.pos)
            }
            Move::Init => Some(0),
        }
    }

    fn advance_tags(&mut self, upto: usize) {
        while self.tags.len() < upto.min(self.play.len()) {
            let j = self.tags.len() + 1;
            let t = self.compute_tag(j);
            self.tags.push(t);
        }
    }

    fn is_lambda(&self, j: usize) -> bool {
        self.tree.is_lambda(self.play.at(j).node)
    }

    /// Longest continuation from `j + 1` that repeats an earlier one, for stage `k`.
    fn continuation(&self, k: usize, j: usize) -> Option<usize> {
        let play = self.play;
        let n = play.len();
        let node = play.at(j).node;
        let tile_k = self.stages[k - 1].tile;
        let mut best: Option<(usize, usize)> = None;
        for j2 in (1..j).rev() {
            if play.at(j2).node != node {
                continue;
            }
            let Ok(v) = vary_at(self.tree, play, j, j2) else { continue };
            if !same_family(self.tree, v.tile_root, tile_k) {
                continue;
            }
            if j + 1 > n || j2 + 1 > n {
                continue;
            }
            let excluded = excluded_binders(self.tree, v.tile_root);
            let mut sim = Similarity::new(self.tree, &excluded);
            if !sim.theta(&play.at(j + 1).theta, &play.at(j2 + 1).theta) {
                continue;
            }
            let mut h = 0;
            while j + h + 1 < n
                && !is_descendant(self.tree, play, v.jk2, j2 + h + 1)
                && correspond(play, j + 1, j + h + 1, play, j2 + 1, j2 + h + 1)
            {
                h += 1;
            }
            if best.map_or(true, |(bh, _)| h > bh) {
                best = Some((h, j2));
            }
        }
        best.map(|(h, _)| h)
    }
}

/// The staged partition for plays of any order.
pub fn p_partition(tree: &TermTree, play: &Play) -> PPartition {
    build(tree, play, true)
}

/// The partition for third-order problems: each stage ends at the first atomic leaf of
/// its tile, or at the end of the play.
pub fn p_partition_third_order(tree: &TermTree, play: &Play) -> PPartition {
    build(tree, play, false)
}

fn build(tree: &TermTree, play: &Play, general: bool) -> PPartition {
    let n = play.len();
    let mut b = Builder { tree, play, stages: Vec::new(), tags: Vec::new() };
    b.advance_tags(1);
    let mut prev_end = 1;
    while prev_end < n {
        let k = b.stages.len() + 1;
        let start = prev_end + 1;
        let edge = (b.tag(prev_end).unwrap_or(usize::MAX), play.at(prev_end).node);
        b.stages.push(Stage { tile: play.at(start).node, start, end: start, edge });
        let mut j = start;
        let end = loop {
            while j != n && !b.is_lambda(j) {
                j += 1;
            }
            b.advance_tags(j);
            if j == n || b.tag(j) == Some(k) {
                break j;
            }
            if !general {
                if tree.children(b.stages[k - 1].tile).contains(&play.at(j).node) {
                    break j;
                }
                j += 1;
                continue;
            }
            match b.continuation(k, j) {
                Some(h) => j += h + 1,
                None => break j,
            }
        };
        b.advance_tags(end);
        b.stages[k - 1].end = end;
        prev_end = end;
    }
    b.advance_tags(n);
    PPartition { stages: b.stages, tags: b.tags }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::game::{enumerate_plays, DEFAULT_BUDGET};

    #[test]
    fn binder_choice_one() {
        let (p, t) = catalog::BINDER.load();
        let tr = TermTree::from_term(&t);
        let plays = enumerate_plays(&tr, &p, 0, DEFAULT_BUDGET).unwrap();
        let pp = p_partition(&tr, &plays[0]);
        assert_eq!(pp.intervals(), vec![(2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13)]);
        assert_eq!(p_partition_third_order(&tr, &plays[0]).intervals(), pp.intervals());
        let pp = p_partition(&tr, &plays[1]);
        assert_eq!(pp.intervals(), vec![(2, 3), (4, 5), (6, 7), (8, 9), (10, 10)]);
    }
}
