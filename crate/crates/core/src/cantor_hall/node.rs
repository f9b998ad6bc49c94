//! Subdivision nodes `T_i` of the four Cantor constructions.
//!
//! A node `(P, i)` holds the sequences that start with `P` and continue with
//! a digit `a >= i` (within the family's digit range). Splitting it fixes
//! `a = i`, giving the upper child `(P i, first type)`, and leaves
//! `a >= i + 1`, the lower child `(P, i + 1)`. For `D_q` and `B_k` a node of
//! type `q` (resp. `k`) has a single choice of digit and is rewritten as
//! `(P q, 1)`.
//!
//! `D_q` nodes whose top is `zeta*(2, {1}^inf) = +inf` can carry a cap `R`:
//! the node is cut at `zeta*(2, {1}^R)`, which is the top of the finite node
//! `((2, {1}^(R-1)), 2)`. Capped trees cover `eta(D_q)` inside
//! `[zeta*({q}^inf), zeta*(2, {1}^R)]` with finitely long nodes.

use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::Serialize;

use crate::binary_tau::{tau_bk_endpoints, tau_lp_endpoints};
use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};
use crate::index::{join, Composition, Tail, TailedIndex};
use crate::values::{EvalConfig, Evaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// `eta(D_q)`: all digits at most `q`.
    EtaDq(u32),
    /// `tau(B_k)`: all digits at most `k`.
    TauBk(u32),
    /// Closure of `eta(T_p)`: all digits at least `p`.
    EtaTpClosure(u32),
    /// Closure of `tau(L_p)`: all digits at least `p`.
    TauLpClosure(u32),
}

impl Family {
    pub fn param(&self) -> u32 {
        match *self {
            Family::EtaDq(q) | Family::TauBk(q) | Family::EtaTpClosure(q) | Family::TauLpClosure(q) => q,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Family::TauBk(_) | Family::TauLpClosure(_))
    }

    /// False only for the half-line `eta(D_q)`.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Family::EtaDq(_))
    }

    fn is_closure(&self) -> bool {
        matches!(self, Family::EtaTpClosure(_) | Family::TauLpClosure(_))
    }

    fn first_type(&self) -> u32 {
        if self.is_closure() {
            self.param()
        } else {
            1
        }
    }

    fn validate(&self) -> Result<()> {
        if self.param() < 2 {
            return Err(ZstarError::InvalidNode(format!("{self} needs a parameter >= 2")));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::EtaDq(q) => write!(f, "eta-dq:{q}"),
            Family::TauBk(k) => write!(f, "tau-bk:{k}"),
            Family::EtaTpClosure(p) => write!(f, "eta-tp:{p}"),
            Family::TauLpClosure(p) => write!(f, "tau-lp:{p}"),
        }
    }
}

impl FromStr for Family {
    type Err = ZstarError;
    fn from_str(s: &str) -> Result<Self> {
        let (name, v) = s
            .split_once([':', '='])
            .ok_or_else(|| ZstarError::Parse(format!("family '{s}' should look like eta-dq:2")))?;
        let v: u32 = v
            .trim()
            .parse()
            .map_err(|_| ZstarError::Parse(format!("bad family parameter in '{s}'")))?;
        let fam = match name.trim().to_ascii_lowercase().as_str() {
            "eta-dq" | "dq" => Family::EtaDq(v),
            "tau-bk" | "bk" => Family::TauBk(v),
            "eta-tp" | "tp" => Family::EtaTpClosure(v),
            "tau-lp" | "lp" => Family::TauLpClosure(v),
            other => return Err(ZstarError::Parse(format!("unknown family '{other}'"))),
        };
        fam.validate().map_err(|e| ZstarError::Parse(e.to_string()))?;
        Ok(fam)
    }
}

/// One interval of a Cantor construction.
#[derive(Clone, Debug)]
pub struct SubdivisionNode {
    pub family: Family,
    pub prefix: Vec<u32>,
    pub type_i: u32,
    /// Window cap `R` of a capped `D_q` node.
    pub cap: Option<u32>,
    pub low: Enclosure,
    pub high: Enclosure,
    /// Exact endpoints for the `tau` families.
    pub exact: Option<(Rational, Rational)>,
}

impl SubdivisionNode {
    pub fn is_infinite(&self) -> bool {
        self.high.is_infinite()
    }

    /// Length as an enclosure (`+inf` for an unbounded node).
    pub fn length(&self) -> Enclosure {
        if self.is_infinite() {
            return Enclosure::infinite(self.low.prec());
        }
        self.high.sub(&self.low)
    }

    pub fn exact_length(&self) -> Option<Rational> {
        self.exact.as_ref().map(|(a, b)| Rational::from(b - a))
    }

    /// The sequence attaining the bottom, for `D_q`: `(P, {q}^inf)`.
    pub fn low_element(&self) -> Option<TailedIndex> {
        let Family::EtaDq(q) = self.family else { return None };
        let parts = if self.prefix.is_empty() {
            vec![q]
        } else {
            self.prefix.clone()
        };
        Some(TailedIndex {
            prefix: Composition::new(parts).ok()?,
            tail: Tail::ConstTail(q),
        })
    }

    /// The sequence attaining the top, for `D_q`: `(P, i, {1}^inf)`, or
    /// `(2, {1}^(R-1), 2, {1}^inf)` under a cap.
    pub fn high_element(&self) -> Option<TailedIndex> {
        let Family::EtaDq(_) = self.family else { return None };
        let parts = match self.cap {
            Some(r) => {
                let mut v = vec![2];
                v.extend(std::iter::repeat(1).take(r as usize - 1));
                v.push(2);
                v
            }
            None => {
                let mut v = self.prefix.clone();
                v.push(self.type_i);
                v
            }
        };
        let t = TailedIndex {
            prefix: Composition::new(parts).ok()?,
            tail: Tail::ConstTail(1),
        };
        if t.is_divergent() {
            None
        } else {
            Some(t)
        }
    }
}

impl fmt::Display for SubdivisionNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}) T_{}", self.family, join(&self.prefix), self.type_i)?;
        if let Some(r) = self.cap {
            write!(f, " cap {r}")?;
        }
        Ok(())
    }
}

/// The two children of a node and the open gap between them.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub lower: SubdivisionNode,
    pub gap: (Enclosure, Enclosure),
    pub upper: SubdivisionNode,
}

/// True for `(2, 1, ..., 1)`.
fn two_then_ones(p: &[u32]) -> bool {
    p.first() == Some(&2) && p[1..].iter().all(|&d| d == 1)
}

/// Node constructor and endpoint evaluator for one family.
pub struct Subdivider {
    family: Family,
    ev: Evaluator,
}

impl Subdivider {
    pub fn new(family: Family, precision: u32) -> Result<Self> {
        family.validate()?;
        Ok(Subdivider {
            family,
            ev: Evaluator::new(EvalConfig::engine(precision)),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn precision(&self) -> u32 {
        self.ev.precision()
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.ev
    }

    pub fn root(&self) -> Result<SubdivisionNode> {
        let t = match self.family {
            Family::EtaDq(_) => 2,
            f => f.first_type(),
        };
        self.node(&[], t, None)
    }

    /// Root of `D_q` cut at `zeta*(2, {1}^r)`.
    pub fn capped_root(&self, r: u32) -> Result<SubdivisionNode> {
        if !matches!(self.family, Family::EtaDq(_)) || r == 0 {
            return Err(ZstarError::InvalidNode("caps apply to eta-dq with R >= 1".into()));
        }
        self.node(&[], 2, Some(r))
    }

    fn is_unbounded_shape(&self, prefix: &[u32], i: u32) -> bool {
        matches!(self.family, Family::EtaDq(_)) && ((prefix.is_empty() && i == 2) || (i == 1 && two_then_ones(prefix)))
    }

    fn normalize(&self, prefix: &[u32], i: u32, cap: Option<u32>) -> (Vec<u32>, u32, Option<u32>) {
        let mut p = prefix.to_vec();
        let mut i = i;
        let mut cap = cap;
        loop {
            match self.family {
                Family::EtaDq(q) | Family::TauBk(q) if i == q => {
                    p.push(q);
                    i = 1;
                    continue;
                }
                _ => {}
            }
            if let Some(r) = cap {
                if !self.is_unbounded_shape(&p, i) {
                    cap = None;
                } else if i == 1 && p.len() == r as usize {
                    // ((2, {1}^(R-1)), 1) below the cap is ((2, {1}^(R-1)), 2)
                    i = 2;
                    cap = None;
                    continue;
                }
            }
            return (p, i, cap);
        }
    }

    fn check(&self, prefix: &[u32], i: u32, cap: Option<u32>) -> Result<()> {
        let bad = |m: String| Err(ZstarError::InvalidNode(m));
        let fam = self.family;
        let v = fam.param();
        if prefix.contains(&0) || i == 0 {
            return bad("digits and types are positive".into());
        }
        match fam {
            Family::EtaDq(q) | Family::TauBk(q) => {
                if prefix.iter().any(|&d| d > q) || i >= q {
                    return bad(format!("{fam} digits lie in [1, {q}] and types in [1, {}]", q - 1));
                }
                if matches!(fam, Family::EtaDq(_)) && ((prefix.is_empty() && i < 2) || prefix.first() == Some(&1)) {
                    return bad("the first digit of an eta-dq sequence is at least 2".into());
                }
            }
            Family::EtaTpClosure(_) | Family::TauLpClosure(_) => {
                if prefix.iter().any(|&d| d < v) || i < v {
                    return bad(format!("{fam} digits and types are at least {v}"));
                }
            }
        }
        if let Some(r) = cap {
            if prefix.len() > r as usize {
                return bad(format!("prefix lies beyond the cap {r}"));
            }
        }
        Ok(())
    }

    /// Node `(prefix, type_i)`, normalized, with certified endpoints.
    pub fn node(&self, prefix: &[u32], type_i: u32, cap: Option<u32>) -> Result<SubdivisionNode> {
        let (p, i, cap) = self.normalize(prefix, type_i, cap);
        self.check(&p, i, cap)?;
        let prec = self.precision();
        let mut pi = p.clone();
        pi.push(i);
        let (low, high, exact) = match self.family {
            Family::EtaDq(q) => {
                let low = self.ev.value(&p, Tail::ConstTail(q))?;
                let high = match cap {
                    Some(r) => {
                        let mut v = vec![2];
                        v.extend(std::iter::repeat(1).take(r as usize));
                        self.ev.value(&v, Tail::NoTail)?
                    }
                    None => self.ev.value(&pi, Tail::ConstTail(1))?,
                };
                (low, high, None)
            }
            Family::EtaTpClosure(pp) => (
                self.ev.value(&p, Tail::NoTail)?,
                self.ev.value(&pi, Tail::ConstTail(pp))?,
                None,
            ),
            Family::TauBk(k) => {
                let (a, b) = tau_bk_endpoints(&p, i, k);
                (
                    Enclosure::from_rational(prec, &a),
                    Enclosure::from_rational(prec, &b),
                    Some((a, b)),
                )
            }
            Family::TauLpClosure(pp) => {
                let (a, b) = tau_lp_endpoints(&p, i, pp);
                (
                    Enclosure::from_rational(prec, &a),
                    Enclosure::from_rational(prec, &b),
                    Some((a, b)),
                )
            }
        };
        Ok(SubdivisionNode {
            family: self.family,
            prefix: p,
            type_i: i,
            cap,
            low,
            high,
            exact,
        })
    }

    /// Children ordered by value, with the gap between them.
    pub fn subdivide(&self, n: &SubdivisionNode) -> Result<Subdivision> {
        let mut up = n.prefix.clone();
        up.push(n.type_i);
        let upper = self.node(&up, self.family.first_type(), n.cap)?;
        let lower = self.node(&n.prefix, n.type_i + 1, None)?;
        let gap = (lower.high.clone(), upper.low.clone());
        Ok(Subdivision { lower, gap, upper })
    }

    /// Endpoints of node `(prefix, type_i)`.
    pub fn node_endpoints(&self, prefix: &[u32], type_i: u32) -> Result<(Enclosure, Enclosure)> {
        let n = self.node(prefix, type_i, None)?;
        Ok((n.low, n.high))
    }

    /// All nodes after exactly `depth` rounds of subdivision, in value order.
    pub fn level(&self, root: &SubdivisionNode, depth: u32) -> Result<Vec<SubdivisionNode>> {
        let mut cur = vec![root.clone()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(2 * cur.len());
            for n in &cur {
                let s = self.subdivide(n)?;
                next.push(s.lower);
                next.push(s.upper);
            }
            cur = next;
        }
        Ok(cur)
    }
}

/// Endpoints `(low, high)` of node `(prefix, type_i)` of `family`.
pub fn node_endpoints(family: Family, prefix: &[u32], type_i: u32, precision: u32) -> Result<(Enclosure, Enclosure)> {
    Subdivider::new(family, precision)?.node_endpoints(prefix, type_i)
}

/// One subdivision step of node `(prefix, type_i)`.
pub fn subdivide(family: Family, prefix: &[u32], type_i: u32, precision: u32) -> Result<Subdivision> {
    let s = Subdivider::new(family, precision)?;
    let n = s.node(prefix, type_i, None)?;
    s.subdivide(&n)
}
