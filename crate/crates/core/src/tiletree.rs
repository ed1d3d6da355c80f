//! The tree of tiles built from the play partitions of every play, with unfolding,
//! the subterm property and extraction of a term.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::game::{all_plays, is_nri, play_with_choices, GameError, Play, DEFAULT_BUDGET};
use crate::partition::p_partition;
use crate::problem::{dummy, Problem};
use crate::term::{Term, Var};
use crate::tree::{NodeId, TermTree};

/// A tile as syntax: a head applied to arguments, each a lambda over a subtile or an
/// atomic leaf.
#[derive(Clone, Debug)]
pub struct TileTerm {
    pub head: Term,
    pub args: Vec<TileArg>,
}

#[derive(Clone, Debug)]
pub struct TileArg {
    pub binders: Vec<Var>,
    pub sub: Option<Box<TileTerm>>,
}

/// Path of argument indices from the root of a tile to one of its lambdas.
pub type LeafPath = Vec<usize>;

impl TileTerm {
    pub fn simple(tree: &TermTree, root: NodeId) -> TileTerm {
        let head = tree.head_term(root, &HashMap::new()).split_app().0.clone();
        let args = tree.children(root).iter().map(|&c| TileArg { binders: tree.binders(c).to_vec(), sub: None }).collect();
        TileTerm { head, args }
    }

    pub fn head_var(&self) -> Option<&Var> {
        match &self.head {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Atomic leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<LeafPath> {
        let mut out = Vec::new();
        self.collect_leaves(&mut Vec::new(), &mut out);
        out
    }

    fn collect_leaves(&self, prefix: &mut Vec<usize>, out: &mut Vec<LeafPath>) {
        for (i, a) in self.args.iter().enumerate() {
            prefix.push(i);
            match &a.sub {
                Some(s) => s.collect_leaves(prefix, out),
                None => out.push(prefix.clone()),
            }
            prefix.pop();
        }
    }

    pub fn arg_at(&self, path: &[usize]) -> Option<&TileArg> {
        let (first, rest) = path.split_first()?;
        let a = self.args.get(*first)?;
        if rest.is_empty() {
            Some(a)
        } else {
            a.sub.as_ref()?.arg_at(rest)
        }
    }

    fn arg_at_mut(&mut self, path: &[usize]) -> Option<&mut TileArg> {
        let (first, rest) = path.split_first()?;
        let a = self.args.get_mut(*first)?;
        if rest.is_empty() {
            Some(a)
        } else {
            a.sub.as_mut()?.arg_at_mut(rest)
        }
    }

    /// Every binder of every lambda in the tile.
    pub fn binders(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for a in &self.args {
            out.extend(a.binders.iter().cloned());
            if let Some(s) = &a.sub {
                out.extend(s.binders());
            }
        }
        out
    }

    /// Path of the lambda that binds `v`, if it is bound in this tile.
    pub fn binding_path(&self, v: &Var) -> Option<LeafPath> {
        for (i, a) in self.args.iter().enumerate() {
            if a.binders.contains(v) {
                return Some(vec![i]);
            }
            if let Some(s) = &a.sub {
                if let Some(mut p) = s.binding_path(v) {
                    p.insert(0, i);
                    return Some(p);
                }
            }
        }
        None
    }

    pub fn rename(&self, map: &HashMap<u64, Var>) -> TileTerm {
        let head = match &self.head {
            Term::Var(v) => map.get(&v.id()).map(Term::var).unwrap_or_else(|| self.head.clone()),
            h => h.clone(),
        };
        let args = self
            .args
            .iter()
            .map(|a| TileArg {
                binders: a.binders.iter().map(|v| map.get(&v.id()).cloned().unwrap_or_else(|| v.clone())).collect(),
                sub: a.sub.as_ref().map(|s| Box::new(s.rename(map))),
            })
            .collect();
        TileTerm { head, args }
    }

    /// Number of simple tiles in this tile.
    pub fn simple_count(&self) -> usize {
        1 + self.args.iter().filter_map(|a| a.sub.as_ref()).map(|s| s.simple_count()).sum::<usize>()
    }

    fn to_term_with(&self, fill: &mut dyn FnMut(&[usize]) -> Term, prefix: &mut Vec<usize>) -> Term {
        let mut args = Vec::new();
        for (i, a) in self.args.iter().enumerate() {
            prefix.push(i);
            let body = match &a.sub {
                Some(s) => s.to_term_with(fill, prefix),
                None => fill(prefix),
            };
            prefix.pop();
            args.push(Term::abs(a.binders.clone(), body));
        }
        Term::app(self.head.clone(), args)
    }

    /// Render with `λ` for atomic leaves.
    pub fn render(&self) -> String {
        let mut s = format!("{}", self.head);
        if self.args.is_empty() {
            return s;
        }
        let parts: Vec<String> = self
            .args
            .iter()
            .map(|a| {
                let names: Vec<&str> = a.binders.iter().map(|v| v.name()).collect();
                let lam = format!("λ{}", names.join(" "));
                match &a.sub {
                    Some(t) => format!("{}.{}", lam, t.render()),
                    None => lam,
                }
            })
            .collect();
        s.push_str(&format!("({})", parts.join(", ")));
        s
    }
}

#[derive(Clone, Debug)]
pub struct Occurrence {
    pub tile: TileTerm,
    /// Static root in the term tree for simple tiles; `None` once composed by unfolding.
    pub root: Option<NodeId>,
    /// Previous stage shared by every play through this occurrence.
    pub prev: Option<usize>,
    /// `⇒` edge: the occurrence and leaf this tile hangs below. `None` for the first tile.
    pub edge: Option<(usize, LeafPath)>,
    pub nri: bool,
    pub final_stage: bool,
    pub separator: bool,
    /// (play index, 1-based stage, interval) of every play through the occurrence.
    pub plays: Vec<(usize, usize, (usize, usize))>,
}

impl Occurrence {
    pub fn special(&self) -> bool {
        self.nri || self.final_stage || self.separator
    }

    pub fn x_special(&self) -> bool {
        self.nri || self.final_stage
    }
}

#[derive(Clone, Debug)]
pub struct TreeOfTiles {
    pub root_binders: Vec<Var>,
    pub occs: Vec<Occurrence>,
    /// Per play, the occurrence at each stage.
    pub sequences: Vec<Vec<usize>>,
    /// ∀ choices of each play, for replaying companions.
    pub choices: Vec<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tile {k} is not unfoldable at {m}: {reason}")]
    NotUnfoldable { k: usize, m: usize, reason: String },
    #[error("tiles {0} and {1} hang from the same leaf but differ")]
    SubtermPropertyFailure(usize, usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Outcome of re-running the game on an extracted term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid,
    ValidationFailure(String),
}

impl TreeOfTiles {
    pub fn build(tree: &TermTree, plays: &[Play]) -> TreeOfTiles {
        let mut occs: Vec<Occurrence> = Vec::new();
        let mut index: HashMap<(Option<usize>, NodeId, Option<(usize, LeafPath)>), usize> = HashMap::new();
        let mut sequences = Vec::new();
        let mut ends: HashMap<usize, BTreeSet<NodeId>> = HashMap::new();
        for (pi, play) in plays.iter().enumerate() {
            let pp = p_partition(tree, play);
            let mut seq: Vec<usize> = Vec::new();
            for (k, st) in pp.stages.iter().enumerate() {
                let prev = seq.last().copied();
                let edge = if k == 0 {
                    None
                } else {
                    let target = seq[st.edge.0 - 1];
                    let troot = occs[target].root.expect("simple tile");
                    let leaf = tree.children(troot).iter().position(|&c| c == st.edge.1).expect("edge to a leaf");
                    Some((target, vec![leaf]))
                };
                let key = (prev, st.tile, edge.clone());
                let id = *index.entry(key).or_insert_with(|| {
                    occs.push(Occurrence {
                        tile: TileTerm::simple(tree, st.tile),
                        root: Some(st.tile),
                        prev,
                        edge,
                        nri: false,
                        final_stage: false,
                        separator: false,
                        plays: Vec::new(),
                    });
                    occs.len() - 1
                });
                let o = &mut occs[id];
                o.plays.push((pi, k + 1, (st.start, st.end)));
                o.nri |= is_nri(play, st.start, st.end);
                o.final_stage |= play.at(st.end).state.is_final();
                ends.entry(id).or_default().insert(play.at(st.end).node);
                seq.push(id);
            }
            sequences.push(seq);
        }
        for (id, e) in ends {
            occs[id].separator = e.len() > 1;
        }
        let choices = plays.iter().map(|p| (p.item, p.choice_sequence())).collect();
        TreeOfTiles { root_binders: tree.binders(tree.root()).to_vec(), occs, sequences, choices }
    }

    /// Build from the game of `t` against `p`.
    pub fn from_game(tree: &TermTree, p: &Problem) -> Result<TreeOfTiles, GameError> {
        let plays = all_plays(tree, p, DEFAULT_BUDGET)?;
        Ok(TreeOfTiles::build(tree, &plays))
    }

    pub fn children_at(&self, occ: usize, path: &[usize]) -> Vec<usize> {
        (0..self.occs.len()).filter(|&o| matches!(&self.occs[o].edge, Some((t, p)) if *t == occ && p == path)).collect()
    }

    /// Occurrences whose edge chain passes through `occ` (excluding it).
    pub fn below(&self, occ: usize) -> BTreeSet<usize> {
        (0..self.occs.len()).filter(|&o| o != occ && self.edge_ancestors(o).contains(&occ)).collect()
    }

    pub fn edge_ancestors(&self, occ: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = occ;
        while let Some((t, _)) = &self.occs[cur].edge {
            out.push(*t);
            cur = *t;
        }
        out
    }

    /// The occurrence binding the head variable of `occ`, looking up its edge chain.
    pub fn binder_occ(&self, occ: usize) -> Option<(usize, LeafPath)> {
        let v = self.occs[occ].tile.head_var()?;
        for a in self.edge_ancestors(occ) {
            if let Some(p) = self.occs[a].tile.binding_path(v) {
                return Some((a, p));
            }
        }
        None
    }

    pub fn is_top(&self, occ: usize) -> bool {
        match self.occs[occ].tile.head_var() {
            Some(v) => self.root_binders.contains(v),
            None => false,
        }
    }

    pub fn is_constant(&self, occ: usize) -> bool {
        let r = self.family_root(occ);
        matches!(self.occs[r].tile.head, Term::Const(_))
    }

    pub fn family_root(&self, occ: usize) -> usize {
        let mut cur = occ;
        while let Some((b, _)) = self.binder_occ(cur) {
            cur = b;
        }
        cur
    }

    pub fn level(&self, occ: usize) -> Option<usize> {
        if self.is_constant(occ) {
            return None;
        }
        let mut l = 1;
        let mut cur = occ;
        while let Some((b, _)) = self.binder_occ(cur) {
            l += 1;
            cur = b;
        }
        Some(l)
    }

    /// An equivalent tile, with the same head, occurs above in the edge chain.
    pub fn is_embedded(&self, occ: usize) -> bool {
        if self.is_constant(occ) {
            return false;
        }
        let h = &self.occs[occ].tile.head;
        self.edge_ancestors(occ).iter().any(|&a| self.occs[a].tile.head.alpha_eq(h) && matches!(h, Term::Var(_)))
    }

    pub fn is_dependent(&self, occ: usize, of: usize) -> bool {
        let mut cur = occ;
        while let Some((b, _)) = self.binder_occ(cur) {
            if b == of {
                return true;
            }
            cur = b;
        }
        false
    }

    /// `b` comes after `a` in some play.
    pub fn is_later(&self, b: usize, a: usize) -> bool {
        self.sequences.iter().any(|s| match (s.iter().position(|&x| x == a), s.iter().position(|&x| x == b)) {
            (Some(i), Some(j)) => j > i,
            _ => false,
        })
    }

    pub fn unfoldable_at(&self, k: usize, m: usize) -> Result<LeafPath, TreeError> {
        let fail = |reason: &str| Err(TreeError::NotUnfoldable { k, m, reason: reason.to_string() });
        if k >= self.occs.len() || m >= self.occs.len() {
            return fail("no such tile");
        }
        if !(self.is_top(k) || self.is_embedded(k)) {
            return fail("not a top or embedded tile");
        }
        let Some((b, path)) = self.binder_occ(m) else { return fail("not a dependent") };
        if b != k || path.len() != 1 {
            return fail("not an immediate dependent bound at a leaf");
        }
        let mut seen = false;
        for s in &self.sequences {
            let (Some(i), Some(j)) = (s.iter().position(|&x| x == k), s.iter().position(|&x| x == m)) else { continue };
            if j <= i {
                continue;
            }
            seen = true;
            if s[i + 1..j].iter().any(|&o| self.is_dependent(o, k)) {
                return fail("not the first dependent");
            }
            match &self.occs[s[i + 1]].edge {
                Some((t, p)) if *t == k && *p == path => {}
                _ => return fail("the next tile does not hang from the binding leaf"),
            }
        }
        if !seen {
            return fail("no play passes through both tiles");
        }
        if self.occs[k].x_special() {
            return fail("x-special");
        }
        let fam = self.family_root(k);
        if (0..self.occs.len()).any(|o| self.is_later(o, k) && self.family_root(o) == fam && self.occs[o].x_special()) {
            return fail("a later tile in the family is x-special");
        }
        Ok(path)
    }

    /// Replace `m` by a copy of `k` whose binding leaf holds `m`, and move edges that
    /// pointed into `k` from `m` and below to the copy.
    pub fn unfold(&self, k: usize, m: usize) -> Result<TreeOfTiles, TreeError> {
        let leaf = self.unfoldable_at(k, m)?;
        let mut out = self.clone();
        let mut ren: HashMap<u64, Var> = HashMap::new();
        for v in self.occs[k].tile.binders() {
            ren.insert(v.id(), v.fresh_copy());
        }
        let mut copy = self.occs[k].tile.rename(&ren);
        copy.arg_at_mut(&leaf).expect("leaf").sub = Some(Box::new(self.occs[m].tile.rename(&ren)));
        let below = self.below(m);
        for &o in &below {
            out.occs[o].tile = self.occs[o].tile.rename(&ren);
        }
        for o in 0..out.occs.len() {
            let Some((t, p)) = out.occs[o].edge.clone() else { continue };
            if t == m {
                let mut np = leaf.clone();
                np.extend(p);
                out.occs[o].edge = Some((m, np));
            } else if t == k && p != leaf {
                if let Some(prev) = out.occs[o].prev {
                    if prev == m || below.contains(&prev) {
                        out.occs[o].edge = Some((m, p));
                    }
                }
            }
        }
        out.occs[m].tile = copy;
        out.occs[m].root = None;
        Ok(out)
    }

    /// Pairs `(k, m)` that can be unfolded now.
    pub fn unfoldable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.occs.len() {
            for m in 0..self.occs.len() {
                if k != m && self.binder_occ(m).map(|(b, _)| b) == Some(k) && self.unfoldable_at(k, m).is_ok() {
                    out.push((k, m));
                }
            }
        }
        out
    }

    /// Unfold a highest-level tile closest to the root until none is unfoldable.
    pub fn saturate(&self, max_steps: usize) -> (TreeOfTiles, Vec<(usize, usize)>) {
        let mut cur = self.clone();
        let mut log = Vec::new();
        for _ in 0..max_steps {
            let pairs = cur.unfoldable_pairs();
            let best = pairs.into_iter().max_by_key(|&(k, m)| (cur.level(k).unwrap_or(0), std::cmp::Reverse(cur.edge_ancestors(k).len()), std::cmp::Reverse((k, m))));
            let Some((k, m)) = best else { break };
            match cur.unfold(k, m) {
                Ok(next) => {
                    log.push((k, m));
                    cur = next;
                }
                Err(_) => break,
            }
        }
        (cur, log)
    }

    fn extract_occ(&self, occ: usize, check: bool) -> Result<Term, TreeError> {
        let tile = self.occs[occ].tile.clone();
        let mut err = None;
        let mut fill = |path: &[usize]| -> Term {
            let kids = self.children_at(occ, path);
            let Some(&first) = kids.first() else { return Term::cnst(&dummy()) };
            let t = match self.extract_occ(first, check) {
                Ok(t) => t,
                Err(e) => {
                    err.get_or_insert(e);
                    return Term::cnst(&dummy());
                }
            };
            if check {
                for &o in &kids[1..] {
                    match self.extract_occ(o, check) {
                        Ok(u) if u.alpha_eq(&t) => {}
                        Ok(_) => {
                            err.get_or_insert(TreeError::SubtermPropertyFailure(first, o));
                        }
                        Err(e) => {
                            err.get_or_insert(e);
                        }
                    }
                }
            }
            t
        };
        let t = tile.to_term_with(&mut fill, &mut Vec::new());
        match err {
            Some(e) => Err(e),
            None => Ok(t),
        }
    }

    /// Tiles hanging from one leaf all extract to the same term.
    pub fn subterm_property(&self) -> Result<(), TreeError> {
        self.extract_occ(0, true).map(|_| ())
    }

    /// Read edges as the subtree relation, put the initial binders on top and the dummy
    /// constant under open leaves.
    pub fn extract(&self) -> Result<Term, TreeError> {
        let body = self.extract_occ(0, true)?;
        Ok(Term::abs(self.root_binders.clone(), body))
    }

    /// Replay every play's choices on the extracted term and compare final states.
    pub fn validate(&self, original: &[Play], p: &Problem) -> Result<Validation, TreeError> {
        let t = self.extract()?;
        let tree = TermTree::from_term(&t);
        for (pi, (item, ch)) in self.choices.iter().enumerate() {
            let comp = play_with_choices(&tree, p, *item, ch, DEFAULT_BUDGET)?;
            let want = original[pi].won_by_exists();
            if comp.won_by_exists() != want {
                return Ok(Validation::ValidationFailure(format!("play {} ends differently", pi + 1)));
            }
        }
        Ok(Validation::Valid)
    }

    /// One row per occurrence: id, tile, edge, flags.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, o) in self.occs.iter().enumerate() {
            let edge = match &o.edge {
                Some((t, p)) => format!("=> {:?}@{}", p.iter().map(|x| x + 1).collect::<Vec<_>>(), t + 1),
                None => String::new(),
            };
            let flags = [(o.nri, "nri"), (o.final_stage, "final"), (o.separator, "separator")]
                .iter()
                .filter(|f| f.0)
                .map(|f| f.1)
                .collect::<Vec<_>>()
                .join(",");
            s.push_str(&format!("{}\t{}\t{}\t{}\n", i + 1, o.tile.render(), edge, flags));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn special_tiles_of_the_binder_game() {
        let (p, t) = catalog::BINDER.load();
        let tree = TermTree::from_term(&t);
        let tt = TreeOfTiles::from_game(&tree, &p).unwrap();
        let special: BTreeSet<usize> = tt.occs.iter().filter(|o| o.special()).map(|o| o.root.unwrap() + 1).collect();
        assert_eq!(special, [6, 8, 12, 16].into_iter().collect());
    }

    #[test]
    fn extraction_of_an_unfolded_tree_is_a_solution() {
        let (p, t) = catalog::TWICE.load();
        let tree = TermTree::from_term(&t);
        let tt = TreeOfTiles::from_game(&tree, &p).unwrap();
        let x = tt.extract().unwrap();
        assert!(crate::oracle::solves(&x, &p).unwrap().overall);
        let pairs = tt.unfoldable_pairs();
        assert!(!pairs.is_empty());
        let (sat, _) = tt.saturate(50);
        let y = sat.extract().unwrap();
        assert!(crate::oracle::solves(&y, &p).unwrap().overall, "{}", y);
    }
}
