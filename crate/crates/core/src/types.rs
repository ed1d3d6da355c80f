use std::fmt;

/// A simple type in flattened form `(A1,...,An,o)`. No arguments means the base type `o`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Type {
    pub args: Vec<Type>,
}

impl Type {
    pub fn base() -> Type {
        Type { args: Vec::new() }
    }

    pub fn arrow(args: Vec<Type>) -> Type {
        Type { args }
    }

    /// `a -> b`, absorbing the arguments of `b` so the result stays flattened.
    pub fn fun(a: Type, b: Type) -> Type {
        let mut args = vec![a];
        args.extend(b.args);
        Type { args }
    }

    pub fn is_base(&self) -> bool {
        self.args.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn order(&self) -> usize {
        1 + self.args.iter().map(|a| a.order()).max().unwrap_or(0)
    }

    /// The type left after applying `n` arguments.
    pub fn drop_args(&self, n: usize) -> Type {
        Type { args: self.args[n..].to_vec() }
    }

    /// All subtypes, including the type itself and every suffix type.
    pub fn subtypes(&self, out: &mut Vec<Type>) {
        for i in 0..=self.args.len() {
            let t = self.drop_args(i);
            if !out.contains(&t) {
                out.push(t);
            }
        }
        for a in &self.args {
            a.subtypes(out);
        }
    }

    fn fmt_arg(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_base() {
            write!(f, "o")
        } else {
            write!(f, "({})", self)
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.args {
            a.fmt_arg(f)?;
            write!(f, " -> ")?;
        }
        write!(f, "o")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> Type {
        Type::base()
    }

    #[test]
    fn orders() {
        assert_eq!(o().order(), 1);
        let oo = Type::arrow(vec![o()]);
        assert_eq!(Type::arrow(vec![oo.clone()]).order(), 3);
        // ((((o,o),o),(o,o),o),o)
        let a = Type::arrow(vec![Type::arrow(vec![oo.clone()]), oo.clone()]);
        assert_eq!(Type::arrow(vec![a]).order(), 5);
    }

    #[test]
    fn fun_flattens() {
        let t = Type::fun(o(), Type::fun(o(), o()));
        assert_eq!(t.args.len(), 2);
        assert_eq!(t.to_string(), "o -> o -> o");
        let h = Type::fun(Type::fun(o(), o()), o());
        assert_eq!(h.to_string(), "(o -> o) -> o");
    }
}
