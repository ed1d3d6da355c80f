//! The tree-checking game: states, look-up tables, moves and plays.
//!
//! Positions are numbered from 1 in every public function, so `play.at(1)` is the
//! initial position.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::problem::{Item, Problem};
use crate::term::{Const, Term, Var};
use crate::tree::{Label, NodeId, TermTree};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("choice {0} is out of range")]
    IllegalChoice(usize),
    #[error("the term takes {tree} arguments but the item supplies {item}")]
    ArityMismatch { tree: usize, item: usize },
    #[error("step budget exceeded after {0} positions")]
    BudgetExceeded(usize),
    #[error("variable {0} has no table entry")]
    Unbound(String),
    #[error("no item {0}")]
    NoSuchItem(usize),
    #[error("a choice is required at position {0}")]
    ChoiceRequired(usize),
    #[error("position {0} is final")]
    Finished(usize),
}

#[derive(Clone, Debug)]
pub enum State {
    Args(Vec<Term>, Term),
    Value(Term, Term),
    Empty(Term),
    Forall,
    Exists,
}

impl State {
    pub fn right(&self) -> Option<&Term> {
        match self {
            State::Args(_, r) | State::Value(_, r) | State::Empty(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, State::Forall | State::Exists)
    }

    fn kind(&self) -> u8 {
        match self {
            State::Args(..) => 0,
            State::Value(..) => 1,
            State::Empty(_) => 2,
            State::Forall => 3,
            State::Exists => 4,
        }
    }
}

fn join(ts: &[Term]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Args(ls, r) => write!(f, "q[({}), {}]", join(ls), r),
            State::Value(l, r) => write!(f, "q[{}, {}]", l, r),
            State::Empty(r) => write!(f, "q[-, {}]", r),
            State::Forall => write!(f, "q[A]"),
            State::Exists => write!(f, "q[E]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Init,
    A1,
    A2,
    A3,
    B1,
    C1,
    C2,
    C3,
    C4,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Move::Init => "init",
            Move::A1 => "A1",
            Move::A2 => "A2",
            Move::A3 => "A3",
            Move::B1 => "B1",
            Move::C1 => "C1",
            Move::C2 => "C2",
            Move::C3 => "C3",
            Move::C4 => "C4",
        };
        f.write_str(s)
    }
}

/// θ entry: a left term, the ξ table interpreting it, and the position that created it.
#[derive(Debug)]
pub struct ThetaEntry {
    pub left: Term,
    pub xi: Xi,
    pub pos: usize,
}

/// ξ entry: a tree node, the θ table interpreting it, and the position that created it.
#[derive(Debug)]
pub struct XiEntry {
    pub node: NodeId,
    pub theta: Theta,
    pub pos: usize,
}

pub type Theta = Rc<BTreeMap<u64, Rc<ThetaEntry>>>;
pub type Xi = Rc<BTreeMap<u64, Rc<XiEntry>>>;

/// Entries are created once per (variable, position), so the position identifies them.
pub fn extends<E: HasPos>(mu: &Rc<BTreeMap<u64, Rc<E>>>, nu: &Rc<BTreeMap<u64, Rc<E>>>) -> bool {
    nu.iter().all(|(k, e)| mu.get(k).map_or(false, |f| f.pos() == e.pos()))
}

pub fn tables_equal<E: HasPos>(mu: &Rc<BTreeMap<u64, Rc<E>>>, nu: &Rc<BTreeMap<u64, Rc<E>>>) -> bool {
    mu.len() == nu.len() && extends(mu, nu)
}

pub trait HasPos {
    fn pos(&self) -> usize;
}

impl HasPos for ThetaEntry {
    fn pos(&self) -> usize {
        self.pos
    }
}

impl HasPos for XiEntry {
    fn pos(&self) -> usize {
        self.pos
    }
}

#[derive(Clone, Debug)]
pub struct Position {
    /// 1-based index of this position in its play.
    pub index: usize,
    pub node: NodeId,
    pub state: State,
    pub theta: Theta,
    pub xi: Xi,
    pub mv: Move,
    /// The ∀ direction (1-based) chosen to reach this position, when there was a choice.
    pub choice: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Play {
    pub item: usize,
    pub positions: Vec<Position>,
}

impl Play {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position `j`, counted from 1.
    pub fn at(&self, j: usize) -> &Position {
        &self.positions[j - 1]
    }

    pub fn last(&self) -> &Position {
        self.positions.last().expect("plays are nonempty")
    }

    pub fn won_by_exists(&self) -> bool {
        matches!(self.last().state, State::Exists)
    }

    /// The recorded ∀-choices as (position, direction).
    pub fn choices(&self) -> Vec<(usize, usize)> {
        self.positions.iter().filter_map(|p| p.choice.map(|d| (p.index, d))).collect()
    }

    pub fn choice_sequence(&self) -> Vec<usize> {
        self.positions.iter().filter_map(|p| p.choice).collect()
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.positions.iter().map(|p| p.node).collect()
    }
}

pub fn initial_position(tree: &TermTree, problem: &Problem, item: usize) -> Result<Position, GameError> {
    let it = problem.items.get(item).ok_or(GameError::NoSuchItem(item))?;
    let n = tree.binders(tree.root()).len();
    if n != it.args.len() {
        return Err(GameError::ArityMismatch { tree: n, item: it.args.len() });
    }
    Ok(Position {
        index: 1,
        node: tree.root(),
        state: State::Args(it.args.clone(), it.rhs.clone()),
        theta: Rc::new(BTreeMap::new()),
        xi: Rc::new(BTreeMap::new()),
        mv: Move::Init,
        choice: None,
    })
}

fn head_const(t: &Term) -> Option<&Const> {
    match t.head() {
        Term::Const(c) => Some(c),
        _ => None,
    }
}

fn same_head(r: &Term, c: &Const) -> bool {
    head_const(r).map_or(false, |h| h.name == c.name)
}

/// State reached by descending into the argument `s` of a right term: forbidden
/// constants replace its binders.
fn descend_state(it: &Item, s: &Term) -> State {
    let (xs, body) = s.strip_abs();
    if xs.is_empty() {
        State::Args(Vec::new(), s.clone())
    } else {
        let map = it.forbid_map(xs);
        let cs = map.iter().map(|(_, c)| c.clone()).collect();
        State::Args(cs, body.instantiate(&map))
    }
}

/// Number of ∀ directions at a position, or 0 if the next move is deterministic
/// (or the position is final).
pub fn directions(tree: &TermTree, pos: &Position) -> usize {
    match (&tree.node(pos.node).label, &pos.state) {
        (Label::Const(_), State::Empty(r)) => r.split_app().1.len(),
        (Label::Var(_), State::Value(l, r)) => {
            let (_, w) = l.strip_abs();
            match (l, head_const(w)) {
                (Term::Const(c), _) if !c.ty.is_base() => {
                    if same_head(r, c) {
                        r.split_app().1.len()
                    } else {
                        0
                    }
                }
                (_, Some(f)) if !w.split_app().1.is_empty() => {
                    if same_head(r, f) {
                        r.split_app().1.len()
                    } else {
                        0
                    }
                }
                _ => 0,
            }
        }
        _ => 0,
    }
}

/// One move. `choice` is the 1-based ∀ direction; it may be omitted when there is only one.
pub fn step(tree: &TermTree, problem: &Problem, item: usize, pos: &Position, choice: Option<usize>) -> Result<Position, GameError> {
    let it = &problem.items[item];
    let m = pos.index;
    let k = directions(tree, pos);
    let d = match (k, choice) {
        (0, _) => 0,
        (1, None) => 1,
        (_, None) => return Err(GameError::ChoiceRequired(m)),
        (k, Some(d)) if d == 0 || d > k => return Err(GameError::IllegalChoice(d)),
        (_, Some(d)) => d,
    };
    let recorded = if k > 1 { Some(d) } else { None };
    let next = |node, state, theta: Theta, xi: Xi, mv| Position { index: m + 1, node, state, theta, xi, mv, choice: recorded };
    match (&tree.node(pos.node).label, &pos.state) {
        (_, State::Forall) | (_, State::Exists) => Err(GameError::Finished(m)),
        (Label::Lambda(ys), State::Args(ls, r)) => {
            let mut th = (*pos.theta).clone();
            for (y, l) in ys.iter().zip(ls) {
                th.insert(y.id(), Rc::new(ThetaEntry { left: l.clone(), xi: pos.xi.clone(), pos: m }));
            }
            let th = Rc::new(th);
            let c = tree.children(pos.node)[0];
            match &tree.node(c).label {
                Label::Const(a) if a.ty.is_base() => {
                    let st = if r.alpha_eq(&Term::cnst(a)) { State::Exists } else { State::Forall };
                    Ok(next(c, st, th, pos.xi.clone(), Move::A1))
                }
                Label::Const(f) => {
                    let st = if same_head(r, f) { State::Empty(r.clone()) } else { State::Forall };
                    Ok(next(c, st, th, pos.xi.clone(), Move::A2))
                }
                Label::Var(y) => {
                    let e = th.get(&y.id()).cloned().ok_or_else(|| GameError::Unbound(y.name().to_string()))?;
                    Ok(next(c, State::Value(e.left.clone(), r.clone()), th, e.xi.clone(), Move::A3))
                }
                Label::Lambda(_) => unreachable!("lambda under lambda"),
            }
        }
        (Label::Const(_), State::Empty(r)) => {
            let s = &r.split_app().1[d - 1];
            let c = tree.children(pos.node)[d - 1];
            Ok(next(c, descend_state(it, s), pos.theta.clone(), pos.xi.clone(), Move::B1))
        }
        (Label::Var(_), State::Value(l, r)) => {
            let (zs, w) = l.strip_abs();
            let xi = if zs.is_empty() {
                pos.xi.clone()
            } else {
                let mut x = (*pos.xi).clone();
                for (z, &c) in zs.iter().zip(tree.children(pos.node)) {
                    x.insert(z.id(), Rc::new(XiEntry { node: c, theta: pos.theta.clone(), pos: m }));
                }
                Rc::new(x)
            };
            let (h, ws) = w.split_app();
            match h {
                Term::Var(x) => {
                    let e = xi.get(&x.id()).cloned().ok_or_else(|| GameError::Unbound(x.name().to_string()))?;
                    Ok(next(e.node, State::Args(ws.to_vec(), r.clone()), e.theta.clone(), xi, Move::C4))
                }
                Term::Const(c) if zs.is_empty() && !c.ty.is_base() && ws.is_empty() => {
                    if !same_head(r, c) {
                        return Ok(next(pos.node, State::Forall, pos.theta.clone(), xi, Move::C2));
                    }
                    let s = &r.split_app().1[d - 1];
                    let child = tree.children(pos.node)[d - 1];
                    Ok(next(child, descend_state(it, s), pos.theta.clone(), xi, Move::C2))
                }
                Term::Const(a) if ws.is_empty() => {
                    let st = if r.alpha_eq(&Term::cnst(a)) { State::Exists } else { State::Forall };
                    Ok(next(pos.node, st, pos.theta.clone(), xi, Move::C1))
                }
                Term::Const(f) => {
                    if !same_head(r, f) {
                        return Ok(next(pos.node, State::Forall, pos.theta.clone(), xi, Move::C3));
                    }
                    let s = &r.split_app().1[d - 1];
                    let wd = &ws[d - 1];
                    let (xs, sb) = s.strip_abs();
                    let st = if xs.is_empty() {
                        State::Value(wd.clone(), s.clone())
                    } else {
                        let map = it.forbid_map(xs);
                        let (ys, wb) = wd.strip_abs();
                        let lmap: Vec<(Var, Term)> = ys.iter().cloned().zip(map.iter().map(|(_, c)| c.clone())).collect();
                        State::Value(wb.instantiate(&lmap), sb.instantiate(&map))
                    };
                    Ok(next(pos.node, st, pos.theta.clone(), xi, Move::C3))
                }
                Term::Abs(..) | Term::App(..) => unreachable!("normal-form head"),
            }
        }
        (_, st) => panic!("state {} does not fit node {}", st, tree.label_string(pos.node)),
    }
}

/// Play one item following the given ∀ choices, in order, at positions that need one.
/// Missing choices default to direction 1.
pub fn play_with_choices(tree: &TermTree, problem: &Problem, item: usize, choices: &[usize], budget: usize) -> Result<Play, GameError> {
    let mut pos = initial_position(tree, problem, item)?;
    let mut out = Vec::new();
    let mut ci = 0;
    while !pos.state.is_final() {
        if out.len() >= budget {
            return Err(GameError::BudgetExceeded(out.len()));
        }
        let k = directions(tree, &pos);
        let c = if k > 1 {
            let c = choices.get(ci).copied().unwrap_or(1);
            ci += 1;
            Some(c)
        } else {
            None
        };
        let n = step(tree, problem, item, &pos, c)?;
        out.push(pos);
        pos = n;
    }
    out.push(pos);
    Ok(Play { item, positions: out })
}

/// All maximal plays of one item, by depth-first branching over ∀ choices.
pub fn enumerate_plays(tree: &TermTree, problem: &Problem, item: usize, budget: usize) -> Result<Vec<Play>, GameError> {
    let start = initial_position(tree, problem, item)?;
    let mut plays = Vec::new();
    let mut used = 0usize;
    let mut stack: Vec<Vec<Position>> = vec![vec![start]];
    while let Some(mut prefix) = stack.pop() {
        loop {
            let pos = prefix.last().unwrap();
            if pos.state.is_final() {
                plays.push(Play { item, positions: prefix });
                break;
            }
            used += 1;
            if used > budget {
                return Err(GameError::BudgetExceeded(used));
            }
            let k = directions(tree, pos);
            if k > 1 {
                for d in (2..=k).rev() {
                    let n = step(tree, problem, item, pos, Some(d))?;
                    let mut alt = prefix.clone();
                    alt.push(n);
                    stack.push(alt);
                }
                let n = step(tree, problem, item, pos, Some(1))?;
                prefix.push(n);
            } else {
                let n = step(tree, problem, item, pos, None)?;
                prefix.push(n);
            }
        }
    }
    Ok(plays)
}

/// Plays of every item, in item order.
pub fn all_plays(tree: &TermTree, problem: &Problem, budget: usize) -> Result<Vec<Play>, GameError> {
    let mut out = Vec::new();
    for i in 0..problem.items.len() {
        out.extend(enumerate_plays(tree, problem, i, budget)?);
    }
    Ok(out)
}

/// Per-item outcome of the game.
pub fn item_holds(tree: &TermTree, problem: &Problem, item: usize, budget: usize) -> Result<bool, GameError> {
    let plays = enumerate_plays(tree, problem, item, budget)?;
    let all_exists = plays.iter().all(|p| p.won_by_exists());
    Ok(match problem.items[item].rel {
        crate::problem::Rel::Eq => all_exists,
        crate::problem::Rel::Neq => !all_exists,
    })
}

/// True iff ∀ loses the game: every equation's plays end in ∃ and every
/// disequation has a play ending in ∀.
pub fn verdict(tree: &TermTree, problem: &Problem, budget: usize) -> Result<bool, GameError> {
    for i in 0..problem.items.len() {
        if !item_holds(tree, problem, i, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique parent of `π(j)` for `1 < j < |π|`.
pub fn child_of(tree: &TermTree, play: &Play, j: usize) -> Option<usize> {
    if j <= 1 || j > play.len() {
        return None;
    }
    let p = play.at(j);
    match p.mv {
        Move::A2 | Move::B1 | Move::C2 | Move::C3 => Some(j - 1),
        Move::A3 => {
            let y = tree.head_var(p.node)?;
            p.theta.get(&y.id()).map(|e| e.pos)
        }
        Move::C4 => {
            let prev = play.at(j - 1);
            let l = match &prev.state {
                State::Value(l, _) => l,
                _ => return None,
            };
            let x = match l.strip_abs().1.head() {
                Term::Var(x) => x,
                _ => return None,
            };
            p.xi.get(&x.id()).map(|e| e.pos)
        }
        Move::A1 | Move::C1 | Move::Init => None,
    }
}

/// `π(j)` is a descendant of `π(i)`: reflexive-transitive closure of the child relation.
pub fn is_descendant(tree: &TermTree, play: &Play, i: usize, j: usize) -> bool {
    let mut cur = j;
    loop {
        if cur == i {
            return true;
        }
        if cur < i {
            return false;
        }
        match child_of(tree, play, cur) {
            Some(p) => cur = p,
            None => return false,
        }
    }
}

pub fn is_ri(play: &Play, i: usize, j: usize) -> bool {
    if i == j {
        return true;
    }
    match (play.at(i).state.right(), play.at(j).state.right()) {
        (Some(a), Some(b)) => a.alpha_eq(b),
        _ => false,
    }
}

pub fn is_nri(play: &Play, i: usize, j: usize) -> bool {
    !is_ri(play, i, j) && !play.at(j).state.is_final()
}

/// The b-partition of `π(1, j)` for a position at a lambda node, as 1-based intervals
/// starting with `(1, 1)`.
pub fn b_partition(tree: &TermTree, play: &Play, j: usize) -> Option<Vec<(usize, usize)>> {
    if !tree.is_lambda(play.at(j).node) {
        return None;
    }
    let mut out = Vec::new();
    let mut jn = j;
    while jn > 1 {
        let i = child_of(tree, play, jn)?;
        out.push((i, jn));
        jn = i - 1;
    }
    out.push((1, 1));
    out.reverse();
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VaryError {
    #[error("the two positions are the same")]
    SamePosition,
    #[error("positions are not at the same lambda node")]
    NotSameLambda,
}

/// Where two positions at the same lambda node first differ in their b-partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variance {
    pub stage: usize,
    pub jk: usize,
    pub jk2: usize,
    /// Root node of the simple tile played in that stage.
    pub tile_root: NodeId,
}

pub fn vary_at(tree: &TermTree, play: &Play, j: usize, j2: usize) -> Result<Variance, VaryError> {
    if j == j2 {
        return Err(VaryError::SamePosition);
    }
    if play.at(j).node != play.at(j2).node {
        return Err(VaryError::NotSameLambda);
    }
    let a = b_partition(tree, play, j).ok_or(VaryError::NotSameLambda)?;
    let b = b_partition(tree, play, j2).ok_or(VaryError::NotSameLambda)?;
    for k in 1..a.len().min(b.len()) {
        if a[k].0 == b[k].0 && a[k].1 != b[k].1 {
            let root = play.at(a[k].0).node;
            return Ok(Variance { stage: k, jk: a[k].1, jk2: b[k].1, tile_root: root });
        }
    }
    unreachable!("b-partitions of distinct positions at one node must vary")
}

/// Intervals `π(i,j)` and `π(i2,j2)` visit the same nodes with the same state kinds
/// and the same left terms.
pub fn correspond(play: &Play, i: usize, j: usize, play2: &Play, i2: usize, j2: usize) -> bool {
    if j >= play.len() || j2 >= play2.len() || j < i || j - i != j2.wrapping_sub(i2) || j2 < i2 {
        return false;
    }
    (0..=j - i).all(|k| {
        let p = play.at(i + k);
        let q = play2.at(i2 + k);
        if p.node != q.node || p.state.kind() != q.state.kind() {
            return false;
        }
        match (&p.state, &q.state) {
            (State::Value(a, _), State::Value(b, _)) => a.alpha_eq(b),
            (State::Args(a, _), State::Args(b, _)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.alpha_eq(y)),
            _ => true,
        }
    })
}

/// Similarity of look-up tables except for entries of variables whose binding lambda
/// is in `excluded` (the leaves of a tile and of its dependents).
pub struct Similarity<'a> {
    tree: &'a TermTree,
    excluded: &'a HashSet<NodeId>,
    theta_memo: HashMap<(usize, usize), bool>,
    xi_memo: HashMap<(usize, usize), bool>,
}

impl<'a> Similarity<'a> {
    pub fn new(tree: &'a TermTree, excluded: &'a HashSet<NodeId>) -> Similarity<'a> {
        Similarity { tree, excluded, theta_memo: HashMap::new(), xi_memo: HashMap::new() }
    }

    pub fn theta(&mut self, a: &Theta, b: &Theta) -> bool {
        let key = (Rc::as_ptr(a) as usize, Rc::as_ptr(b) as usize);
        if let Some(&v) = self.theta_memo.get(&key) {
            return v;
        }
        let v = tables_equal(a, b) || {
            a.len() == b.len()
                && a.iter().all(|(k, e)| {
                    let Some(f) = b.get(k) else { return false };
                    if self.is_excluded(*k) {
                        return true;
                    }
                    e.left.alpha_eq(&f.left) && self.xi(&e.xi, &f.xi)
                })
        };
        self.theta_memo.insert(key, v);
        v
    }

    pub fn xi(&mut self, a: &Xi, b: &Xi) -> bool {
        let key = (Rc::as_ptr(a) as usize, Rc::as_ptr(b) as usize);
        if let Some(&v) = self.xi_memo.get(&key) {
            return v;
        }
        let v = tables_equal(a, b) || {
            a.len() == b.len()
                && a.iter().all(|(k, e)| {
                    let Some(f) = b.get(k) else { return false };
                    e.node == f.node && self.theta(&e.theta, &f.theta)
                })
        };
        self.xi_memo.insert(key, v);
        v
    }

    fn is_excluded(&self, var: u64) -> bool {
        self.tree.binding_site_id(var).map_or(false, |(n, _)| self.excluded.contains(&n))
    }
}

/// Variables free in the left term of the state must be defined in ξ, and variables of
/// the subtree at the node must be defined in θ exactly when bound above it.
pub fn binders_defined(tree: &TermTree, pos: &Position) -> bool {
    let range = tree.subtree(pos.node);
    for n in range.clone() {
        if let Some(v) = tree.head_var(n) {
            let bound_inside = tree.binding_site(v).map_or(false, |(b, _)| range.contains(&b));
            if !bound_inside && !pos.theta.contains_key(&v.id()) {
                return false;
            }
        }
        for v in tree.binders(n) {
            if pos.theta.contains_key(&v.id()) {
                return false;
            }
        }
    }
    let lefts: Vec<&Term> = match &pos.state {
        State::Args(ls, _) => ls.iter().collect(),
        State::Value(l, _) => vec![l],
        _ => Vec::new(),
    };
    for l in lefts {
        for v in l.free_vars() {
            if !pos.xi.contains_key(&v.id()) {
                return false;
            }
        }
        for v in l.bound_vars() {
            if pos.xi.contains_key(&v.id()) {
                return false;
            }
        }
    }
    true
}

/// One trace line per position: index, node, move, state, choice.
pub fn trace_lines(play: &Play, with_tables: bool) -> Vec<String> {
    let mut out = Vec::new();
    for p in &play.positions {
        let mut line = format!("{}\t{}\t{}\t{}\t{}", p.index, p.node + 1, p.mv, p.state, p.choice.map(|d| d.to_string()).unwrap_or_default());
        if with_tables {
            line.push_str(&format!("\t{}\t{}", render_theta(p), render_xi(p)));
        }
        out.push(line);
    }
    out
}

/// Entries added at this position.
fn render_theta(p: &Position) -> String {
    let fresh: Vec<String> = p.theta.values().filter(|e| e.pos + 1 == p.index).map(|e| format!("{}@{}", e.left, e.pos)).collect();
    format!("θ+{{{}}}", fresh.join(", "))
}

fn render_xi(p: &Position) -> String {
    let fresh: Vec<String> = p.xi.values().filter(|e| e.pos + 1 == p.index).map(|e| format!("({})@{}", e.node + 1, e.pos)).collect();
    format!("ξ+{{{}}}", fresh.join(", "))
}
