//! Admissible indices, tail specifications and the order on indices.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZstarError};

/// A finite admissible index `(k1, ..., kr)` with `k1 >= 2`, `ki >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        match parts.first() {
            None => Err(ZstarError::InvalidIndex("empty index".into())),
            Some(&k) if k < 2 => Err(ZstarError::InvalidIndex(format!("first entry {k} < 2"))),
            _ if parts.contains(&0) => Err(ZstarError::InvalidIndex("entries must be positive".into())),
            _ => Ok(Composition(parts)),
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().map(|&k| k as u64).sum()
    }

    /// `(self, k)`.
    pub fn extended(&self, k: u32) -> Result<Self> {
        let mut v = self.0.clone();
        v.push(k);
        Composition::new(v)
    }

    /// True for `(2, 1, ..., 1)`.
    pub fn is_two_then_ones(&self) -> bool {
        self.0[0] == 2 && self.0[1..].iter().all(|&k| k == 1)
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = ZstarError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Composition::new(v)
    }
}

impl From<Composition> for Vec<u32> {
    fn from(c: Composition) -> Vec<u32> {
        c.0
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.0))
    }
}

pub(crate) fn join(v: &[u32]) -> String {
    v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

pub fn make_composition(parts: &[u32]) -> Result<Composition> {
    Composition::new(parts.to_vec())
}

/// How an index continues after its prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tail {
    NoTail,
    ConstTail(u32),
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::NoTail => write!(f, "none"),
            Tail::ConstTail(q) => write!(f, "{{{q}}}^inf"),
        }
    }
}

/// A prefix followed by an optional constant tail `{q}^inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TailedIndex {
    pub prefix: Composition,
    pub tail: Tail,
}

impl TailedIndex {
    pub fn new(prefix: Composition, tail: Tail) -> Result<Self> {
        if tail == Tail::ConstTail(0) {
            return Err(ZstarError::InvalidIndex("tail entry must be positive".into()));
        }
        Ok(TailedIndex { prefix, tail })
    }

    pub fn finite(prefix: Composition) -> Self {
        TailedIndex {
            prefix,
            tail: Tail::NoTail,
        }
    }

    pub fn with_tail(prefix: Composition, q: u32) -> Result<Self> {
        Self::new(prefix, Tail::ConstTail(q))
    }

    /// True when the value is `+inf`: prefix `(2, 1, ..., 1)` with tail `{1}^inf`.
    pub fn is_divergent(&self) -> bool {
        self.tail == Tail::ConstTail(1) && self.prefix.is_two_then_ones()
    }
}

impl fmt::Display for TailedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tail {
            Tail::NoTail => write!(f, "{}", self.prefix),
            Tail::ConstTail(q) => write!(f, "({},{{{q}}}^inf)", join(self.prefix.parts())),
        }
    }
}

/// Order on indices; `Greater` means `a` is the larger index (and has the larger value).
///
/// A proper extension is larger. Otherwise, at the first differing
/// position the smaller entry gives the larger index.
pub fn index_compare(a: &Composition, b: &Composition) -> Ordering {
    compare_digits(a.parts(), b.parts())
}

pub(crate) fn compare_digits(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return y.cmp(x);
        }
    }
    a.len().cmp(&b.len())
}

/// Normal form of a tailed index.
///
/// Trailing entries equal to the tail are absorbed into it. For `{1}^inf`
/// tails this is the identity `(p, 1, {1}^inf) = (p, {1}^inf)`; the result
/// then ends in an entry `k >= 2`, so that its value is the finite
/// `zeta*(p, k - 1)`. The only sequence left over, `(2, {1}^inf)`, is not in
/// the domain.
pub fn canonical_form(t: &TailedIndex) -> Result<TailedIndex> {
    let q = match t.tail {
        Tail::NoTail => return Ok(t.clone()),
        Tail::ConstTail(q) => q,
    };
    let mut parts = t.prefix.parts().to_vec();
    while parts.len() > 1 && *parts.last().unwrap() == q {
        parts.pop();
    }
    if q == 1 && parts == [2] {
        return Err(ZstarError::NotInDomain(format!(
            "{t} has a (2, {{1}}^inf) form and diverges"
        )));
    }
    Ok(TailedIndex {
        prefix: Composition(parts),
        tail: t.tail,
    })
}

/// Finite composition with the same value as `(prefix, {1}^inf)`.
pub(crate) fn ones_tail_reduction(prefix: &[u32]) -> Option<Composition> {
    let mut parts = prefix.to_vec();
    while parts.len() > 1 && *parts.last().unwrap() == 1 {
        parts.pop();
    }
    let last = parts.last_mut().unwrap();
    *last -= 1;
    if parts[0] < 2 {
        return None;
    }
    Some(Composition(parts))
}
