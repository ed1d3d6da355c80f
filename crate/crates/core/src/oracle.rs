//! Ground truth by β-normalization, independent of the game.

use thiserror::Error;

use crate::problem::{Problem, Rel, DUMMY};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("constant {0} may not occur in a solution")]
    ForbiddenConstant(String),
    #[error("term has type {found}, expected {expected}")]
    WrongType { found: String, expected: String },
    #[error("term is not closed")]
    NotClosed,
}

#[derive(Debug, Clone)]
pub struct ItemReport {
    pub normal_form: Term,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub items: Vec<ItemReport>,
    pub overall: bool,
}

pub fn check_candidate(t: &Term, p: &Problem) -> Result<(), OracleError> {
    let ty = t.type_of().map_err(|e| OracleError::WrongType { found: e.to_string(), expected: p.x.ty().to_string() })?;
    if &ty != p.x.ty() {
        return Err(OracleError::WrongType { found: ty.to_string(), expected: p.x.ty().to_string() });
    }
    if !t.free_vars().is_empty() {
        return Err(OracleError::NotClosed);
    }
    for c in t.constants() {
        if (c.is_reserved() && &*c.name != DUMMY) || p.excluded.contains(&*c.name) {
            return Err(OracleError::ForbiddenConstant(c.name.to_string()));
        }
    }
    Ok(())
}

/// Normalize `t v1 ... vn` for each item and compare with the right term.
pub fn solves(t: &Term, p: &Problem) -> Result<OracleReport, OracleError> {
    check_candidate(t, p)?;
    let mut items = Vec::new();
    let mut overall = true;
    for it in &p.items {
        let nf = Term::app(t.clone(), it.args.clone()).normalize().eta_long();
        let same = nf.alpha_eq(&it.rhs.eta_long());
        let holds = match it.rel {
            Rel::Eq => same,
            Rel::Neq => !same,
        };
        overall &= holds;
        items.push(ItemReport { normal_form: nf, holds: same });
    }
    Ok(OracleReport { items, overall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn curated_terms_solve() {
        for inst in catalog::ALL {
            let (p, t) = inst.load();
            let r = solves(&t, &p).unwrap();
            assert!(r.overall, "{}", inst.name);
        }
    }

    #[test]
    fn first_item_normal_form() {
        let (p, t) = catalog::TWICE.load();
        let r = solves(&t, &p).unwrap();
        assert_eq!(r.items[0].normal_form.to_string(), "f a");
        assert_eq!(r.items[1].normal_form.to_string(), "f (f a)");
    }

    #[test]
    fn rejects_forbidden() {
        let (p, _) = catalog::BINDER.load();
        let c = p.items[0].forbidden[0].1.clone();
        let bad = Term::abs(vec![crate::term::Var::new("y", p.x.ty().args[0].clone())], Term::cnst(&c));
        assert!(solves(&bad, &p).is_err());
    }
}
