use std::fmt;

use serde::{Deserialize, Serialize};

/// Ground argument value: an integer, a symbol, or a tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Int(i64),
    Sym(String),
    Tuple(Vec<Term>),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Term {
        Term::Sym(s.into())
    }

    pub fn unit() -> Term {
        Term::Tuple(Vec::new())
    }

    pub fn pair(a: i64, b: i64) -> Term {
        Term::Tuple(vec![Term::Int(a), Term::Int(b)])
    }

    pub fn ints<I: IntoIterator<Item = i64>>(items: I) -> Term {
        Term::Tuple(items.into_iter().map(Term::Int).collect())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Term]> {
        match self {
            Term::Tuple(t) => Some(t),
            _ => None,
        }
    }

    /// A tuple made only of integers.
    pub fn as_int_tuple(&self) -> Option<Vec<i64>> {
        self.as_tuple()?.iter().map(Term::as_int).collect()
    }

    /// Number of arguments the term contributes: tuple length, or 1 for atoms.
    pub fn arity(&self) -> usize {
        match self {
            Term::Tuple(t) => t.len(),
            _ => 1,
        }
    }
}

/// Symbols match `[a-z][A-Za-z0-9_]*`.
pub fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(i) => write!(f, "{i}"),
            Term::Sym(s) => f.write_str(s),
            Term::Tuple(items) => {
                f.write_str("(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
        }
    }
}
