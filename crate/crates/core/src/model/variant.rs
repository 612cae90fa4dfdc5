use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Base delivery domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    /// Deliveries account for exact product quantities.
    A,
    /// Quantities are ignored; one deliver closes one order line.
    B,
    /// One deliver closes every pending line at the station matching the shelf.
    C,
    /// Movement only: robots must end underneath the shelves holding ordered products.
    M,
}

impl Base {
    pub fn has_delivery(self) -> bool {
        !matches!(self, Base::M)
    }
}

impl FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Base::A),
            "B" | "b" => Ok(Base::B),
            "C" | "c" => Ok(Base::C),
            "M" | "m" => Ok(Base::M),
            other => Err(format!("unknown domain {other:?}, expected one of A, B, C, M")),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Base::A => "A",
            Base::B => "B",
            Base::C => "C",
            Base::M => "M",
        };
        f.write_str(s)
    }
}

/// A domain together with the M alignment (`^M`) and task-assignment (`_a`)
/// flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainVariant {
    pub base: Base,
    pub m_restricted: bool,
    pub assigned: bool,
}

impl DomainVariant {
    /// `M` is always aligned.
    pub fn new(base: Base, m_restricted: bool) -> Self {
        DomainVariant { base, m_restricted: m_restricted || base == Base::M, assigned: false }
    }

    pub fn m() -> Self {
        Self::new(Base::M, true)
    }

    pub fn aligned(base: Base) -> Self {
        Self::new(base, true)
    }

    pub fn with_assignment(mut self) -> Self {
        self.assigned = true;
        self
    }
}

impl fmt::Display for DomainVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if self.m_restricted && self.base != Base::M {
            f.write_str("^M")?;
        }
        if self.assigned {
            f.write_str("_a")?;
        }
        Ok(())
    }
}
