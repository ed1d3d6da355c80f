use std::collections::HashMap;
use std::fmt;

use crate::term::{Const, Term, Var};
use crate::types::Type;

/// Index into `TermTree::nodes`. Printed 1-based.
pub type NodeId = usize;

#[derive(Clone, Debug)]
pub enum Label {
    /// Possibly empty binder list; empty means a dummy lambda above a ground argument.
    Lambda(Vec<Var>),
    Var(Var),
    Const(Const),
}

#[derive(Clone, Debug)]
pub struct Node {
    pub label: Label,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub depth: usize,
    /// For a variable node bound inside the tree: the binding lambda node and the binder index.
    pub binder: Option<(NodeId, usize)>,
}

/// Tree of an η-long term with dummy lambdas. Nodes are numbered in depth-first preorder.
#[derive(Clone, Debug)]
pub struct TermTree {
    pub nodes: Vec<Node>,
    binder_of: HashMap<u64, (NodeId, usize)>,
}

impl TermTree {
    pub fn from_term(t: &Term) -> TermTree {
        let mut tree = TermTree { nodes: Vec::new(), binder_of: HashMap::new() };
        let (vs, body) = t.strip_abs();
        tree.build_lambda(vs.to_vec(), body, None, 0);
        tree
    }

    fn build_lambda(&mut self, vs: Vec<Var>, body: &Term, parent: Option<NodeId>, depth: usize) -> NodeId {
        let id = self.nodes.len();
        for (i, v) in vs.iter().enumerate() {
            self.binder_of.insert(v.id(), (id, i));
        }
        self.nodes.push(Node { label: Label::Lambda(vs), children: Vec::new(), parent, depth, binder: None });
        let child = self.build_head(body, id, depth + 1);
        self.nodes[id].children.push(child);
        id
    }

    fn build_head(&mut self, body: &Term, parent: NodeId, depth: usize) -> NodeId {
        let (h, args) = body.split_app();
        let id = self.nodes.len();
        let (label, binder) = match h {
            Term::Var(v) => (Label::Var(v.clone()), self.binder_of.get(&v.id()).copied()),
            Term::Const(c) => (Label::Const(c.clone()), None),
            _ => panic!("term tree needs a normal form, found head {}", h),
        };
        self.nodes.push(Node { label, children: Vec::new(), parent: Some(parent), depth, binder });
        for a in args {
            let (vs, b) = a.strip_abs();
            let c = self.build_lambda(vs.to_vec(), b, Some(id), depth + 1);
            self.nodes[id].children.push(c);
        }
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n]
    }

    pub fn is_lambda(&self, n: NodeId) -> bool {
        matches!(self.nodes[n].label, Label::Lambda(_))
    }

    pub fn binders(&self, n: NodeId) -> &[Var] {
        match &self.nodes[n].label {
            Label::Lambda(vs) => vs,
            _ => &[],
        }
    }

    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.nodes[n].children
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n].parent
    }

    /// Where a variable is bound in this tree, if at all.
    pub fn binding_site(&self, v: &Var) -> Option<(NodeId, usize)> {
        self.binder_of.get(&v.id()).copied()
    }

    pub fn binding_site_id(&self, id: u64) -> Option<(NodeId, usize)> {
        self.binder_of.get(&id).copied()
    }

    pub fn head_var(&self, n: NodeId) -> Option<&Var> {
        match &self.nodes[n].label {
            Label::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn label_type(&self, n: NodeId) -> Type {
        match &self.nodes[n].label {
            Label::Lambda(_) => Type::base(),
            Label::Var(v) => v.ty().clone(),
            Label::Const(c) => c.ty.clone(),
        }
    }

    /// True if `a` is an ancestor of `b` (or equal).
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Nodes of the subtree rooted at `n`, in preorder. Preorder numbering makes this a range.
    pub fn subtree(&self, n: NodeId) -> std::ops::Range<NodeId> {
        let mut end = n + 1;
        while end < self.nodes.len() && self.is_ancestor(n, end) {
            end += 1;
        }
        n..end
    }

    pub fn label_string(&self, n: NodeId) -> String {
        match &self.nodes[n].label {
            Label::Lambda(vs) => {
                let names: Vec<&str> = vs.iter().map(|v| v.name()).collect();
                format!("λ{}", names.join(" "))
            }
            Label::Var(v) => v.name().to_string(),
            Label::Const(c) => c.name.to_string(),
        }
    }

    /// Reconstruct the term.
    pub fn to_term(&self) -> Term {
        self.to_term_with(&HashMap::new())
    }

    /// Reconstruct the term, replacing the body rooted at each overridden head node.
    pub fn to_term_with(&self, overrides: &HashMap<NodeId, Term>) -> Term {
        self.lambda_term(self.root(), overrides)
    }

    pub fn lambda_term(&self, n: NodeId, overrides: &HashMap<NodeId, Term>) -> Term {
        let c = self.nodes[n].children[0];
        Term::abs(self.binders(n).to_vec(), self.head_term(c, overrides))
    }

    pub fn head_term(&self, n: NodeId, overrides: &HashMap<NodeId, Term>) -> Term {
        if let Some(t) = overrides.get(&n) {
            return t.clone();
        }
        let head = match &self.nodes[n].label {
            Label::Var(v) => Term::var(v),
            Label::Const(c) => Term::cnst(c),
            Label::Lambda(_) => panic!("head_term on a lambda node"),
        };
        let args = self.nodes[n].children.iter().map(|&c| self.lambda_term(c, overrides)).collect();
        Term::app(head, args)
    }
}

impl fmt::Display for TermTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            let kids: Vec<String> = n.children.iter().map(|c| (c + 1).to_string()).collect();
            writeln!(f, "({}) {}{}{}", i + 1, "  ".repeat(n.depth), self.label_string(i), if kids.is_empty() { String::new() } else { format!(" -> {}", kids.join(",")) })?;
        }
        Ok(())
    }
}
