//! Curated problems and terms used by tests and the CLI.

use crate::problem::Problem;
use crate::term::Term;

pub struct Instance {
    pub name: &'static str,
    pub problem: &'static str,
    pub term: &'static str,
    pub small: Option<&'static str>,
}

/// Second-order argument applied once and twice; a fourth-order solution.
pub const TWICE: Instance = Instance {
    name: "twice",
    problem: include_str!("../../../data/twice.hom"),
    term: include_str!("../../../data/twice.lam"),
    small: Some(include_str!("../../../data/twice_small.lam")),
};

/// Third-order problem whose right term binds variables.
pub const BINDER: Instance = Instance {
    name: "binder",
    problem: include_str!("../../../data/binder.hom"),
    term: include_str!("../../../data/binder.lam"),
    small: Some(include_str!("../../../data/binder_small.lam")),
};

/// Fifth-order problem with one equation.
pub const FIFTH: Instance = Instance {
    name: "fifth",
    problem: include_str!("../../../data/fifth.hom"),
    term: include_str!("../../../data/fifth.lam"),
    small: None,
};

pub const ALL: [Instance; 3] = [TWICE, BINDER, FIFTH];

impl Instance {
    pub fn load(&self) -> (Problem, Term) {
        let p = Problem::parse(self.problem).expect("curated problem parses");
        let t = p.parse_term(self.term).expect("curated term parses");
        (p, t)
    }

    pub fn load_small(&self) -> Option<Term> {
        let p = Problem::parse(self.problem).ok()?;
        self.small.map(|s| p.parse_term(s).expect("curated term parses"))
    }
}
