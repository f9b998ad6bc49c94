//! The binary map `tau(k1, k2, ...) = 2^-k1 + 2^-(k1+k2) + ...` in exact
//! rational arithmetic.
//!
//! `tau` orders digit sequences the same way `eta` does, and every value,
//! length and gap of its subdivisions is rational, so this module doubles
//! as an exact oracle for the Cantor machinery.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Result, ZstarError};
use crate::index::join;

/// What follows the prefix of a digit sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SeqTail {
    Periodic(Vec<u32>),
    OnesTail,
    /// Unknown continuation (a truncated expansion).
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DigitSeq {
    pub prefix: Vec<u32>,
    pub tail: SeqTail,
}

impl DigitSeq {
    pub fn new(prefix: Vec<u32>, tail: SeqTail) -> Result<Self> {
        let bad = prefix.contains(&0) || matches!(&tail, SeqTail::Periodic(p) if p.is_empty() || p.contains(&0));
        if bad {
            return Err(ZstarError::InvalidIndex(
                "digits must be positive and periods nonempty".into(),
            ));
        }
        Ok(DigitSeq { prefix, tail }.normalized())
    }

    pub fn periodic(prefix: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        Self::new(prefix, SeqTail::Periodic(period))
    }

    /// `{1}^inf` is written `OnesTail`, and prefix digits that merely repeat
    /// a constant tail are absorbed into it.
    fn normalized(mut self) -> Self {
        let c = match &self.tail {
            SeqTail::OnesTail => Some(1),
            SeqTail::Periodic(p) if p.iter().all(|&d| d == p[0]) => Some(p[0]),
            _ => None,
        };
        if let Some(c) = c {
            self.tail = if c == 1 {
                SeqTail::OnesTail
            } else {
                SeqTail::Periodic(vec![c])
            };
        }
        if let Some(c) = c {
            while self.prefix.last() == Some(&c) {
                self.prefix.pop();
            }
        }
        self
    }

    /// First `n` digits (fewer only for a truncated sequence).
    pub fn digits(&self, n: usize) -> Vec<u32> {
        let mut out: Vec<u32> = self.prefix.iter().copied().take(n).collect();
        let period: &[u32] = match &self.tail {
            SeqTail::Periodic(p) => p,
            SeqTail::OnesTail => &[1],
            SeqTail::None => &[],
        };
        if !period.is_empty() {
            let mut it = period.iter().cycle();
            while out.len() < n {
                out.push(*it.next().unwrap());
            }
        }
        out
    }
}

impl fmt::Display for DigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = join(&self.prefix);
        let sep = if self.prefix.is_empty() { "" } else { "," };
        match &self.tail {
            SeqTail::Periodic(q) => write!(f, "({p}{sep}{{{}}}^inf)", join(q)),
            SeqTail::OnesTail => write!(f, "({p}{sep}{{1}}^inf)"),
            SeqTail::None => write!(f, "({p}{sep}...)"),
        }
    }
}

fn pow2_inv(e: u64) -> Rational {
    Rational::from((Integer::from(1), Integer::from(1) << e as u32))
}

/// `tau` of a finite digit list, i.e. the limit of its extensions by huge digits.
pub fn tau_finite(prefix: &[u32]) -> Rational {
    let mut acc = Rational::new();
    let mut s = 0u64;
    for &k in prefix {
        s += k as u64;
        acc += pow2_inv(s);
    }
    acc
}

fn weight(prefix: &[u32]) -> u64 {
    prefix.iter().map(|&k| k as u64).sum()
}

/// Exact value of an eventually periodic sequence.
pub fn tau_value(s: &DigitSeq) -> Result<Rational> {
    let period = match &s.tail {
        SeqTail::Periodic(p) => p.clone(),
        SeqTail::OnesTail => vec![1],
        SeqTail::None => return Err(ZstarError::NonTerminating),
    };
    let k = pow2_inv(weight(&s.prefix));
    let w = weight(&period);
    // one period, then the geometric series over repeats
    let once = tau_finite(&period);
    let rep = once / (Rational::from(1) - pow2_inv(w));
    Ok(tau_finite(&s.prefix) + k * rep)
}

/// Digits of `x` in `(0, 1]`; dyadic rationals take the `{1}^inf` form.
///
/// Each step maps `x` to `2^k x - 1` with `2^-k < x <= 2^(1-k)`. The state
/// stays a rational with the same odd denominator part, so a repeat is
/// detected exactly; if none occurs within `depth` digits the result is
/// truncated.
pub fn tau_expand(x: &Rational, depth: usize) -> Result<DigitSeq> {
    if *x <= 0 || *x > 1 {
        return Err(ZstarError::OutOfDomain(format!("tau_expand needs 0 < x <= 1, got {x}")));
    }
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut y = x.clone();
    while digits.len() < depth {
        if let Some(&start) = seen.get(&y) {
            let period = digits[start..].to_vec();
            digits.truncate(start);
            return DigitSeq::periodic(digits, period);
        }
        seen.insert(y.clone(), digits.len());
        // k = ceil(log2(1/y)) for y <= 1, i.e. the smallest k with 2^-k < y
        let mut k = 1u32;
        let mut t = y.clone() << 1u32;
        while t <= 1 {
            t <<= 1u32;
            k += 1;
        }
        digits.push(k);
        y = t - 1u32;
    }
    DigitSeq::new(digits, SeqTail::None)
}

/// Order of two sequences by `tau` value, read off the digits.
pub fn tau_order(a: &DigitSeq, b: &DigitSeq, horizon: usize) -> Ordering {
    crate::index::compare_digits(&a.digits(horizon), &b.digits(horizon))
}

/// Endpoints of node `(prefix, i)` in the subdivision of `tau(B_k)`:
/// `[tau(prefix, {k}^inf), tau(prefix, i, {1}^inf)]`.
pub fn tau_bk_endpoints(prefix: &[u32], i: u32, k: u32) -> (Rational, Rational) {
    let base = tau_finite(prefix);
    let kk = pow2_inv(weight(prefix));
    let lo = base.clone() + kk.clone() / Rational::from((Integer::from(1) << k) - 1u32);
    let hi = base + kk * pow2_inv(i as u64 - 1);
    (lo, hi)
}

/// Endpoints of node `(prefix, i)` in the subdivision of the closure of
/// `tau(L_p)`: `[tau(prefix), tau(prefix, i, {p}^inf)]`.
pub fn tau_lp_endpoints(prefix: &[u32], i: u32, p: u32) -> (Rational, Rational) {
    let base = tau_finite(prefix);
    let kk = pow2_inv(weight(prefix) + i as u64);
    let two_p = Integer::from(1) << p;
    let hi = base.clone() + kk * Rational::from((two_p.clone(), two_p - 1u32));
    (base, hi)
}

/// Lengths of a `tau(B_k)` node of type `i` and of its two children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauLengths {
    pub parent: Rational,
    /// The `T_1` child, digit `i` fixed.
    pub left: Rational,
    /// The `T_(i+1)` child.
    pub right: Rational,
    pub gap: Rational,
}

pub fn tau_node_lengths(prefix: &[u32], i: u32, k: u32) -> Result<TauLengths> {
    if k < 2 || i == 0 || i >= k {
        return Err(ZstarError::InvalidNode(format!(
            "type {i} needs 1 <= i <= {}",
            k.saturating_sub(1)
        )));
    }
    let len = |(a, b): (Rational, Rational)| b - a;
    let parent = len(tau_bk_endpoints(prefix, i, k));
    let mut up = prefix.to_vec();
    up.push(i);
    let left = len(tau_bk_endpoints(&up, 1, k));
    let right = if i + 1 < k {
        len(tau_bk_endpoints(prefix, i + 1, k))
    } else {
        let mut p = prefix.to_vec();
        p.push(k);
        len(tau_bk_endpoints(&p, 1, k))
    };
    let gap = parent.clone() - &left - &right;
    Ok(TauLengths {
        parent,
        left,
        right,
        gap,
    })
}

/// Exact witness for `x = tau(left) + tau(right) + residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauCertificate {
    pub left: DigitSeq,
    pub right: DigitSeq,
    pub sum: Rational,
    pub target: Rational,
    /// `|x - sum|`, exact.
    pub residual: Rational,
}

#[derive(Clone, Debug)]
struct BNode {
    prefix: Vec<u32>,
    i: u32,
    lo: Rational,
    hi: Rational,
}

impl BNode {
    fn new(prefix: Vec<u32>, i: u32, k: u32) -> BNode {
        let (prefix, i) = if i == k {
            let mut p = prefix;
            p.push(k);
            (p, 1)
        } else {
            (prefix, i)
        };
        let (lo, hi) = tau_bk_endpoints(&prefix, i, k);
        BNode { prefix, i, lo, hi }
    }

    fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    /// (lower child, upper child).
    fn split(&self, k: u32) -> (BNode, BNode) {
        let mut up = self.prefix.clone();
        up.push(self.i);
        (BNode::new(self.prefix.clone(), self.i + 1, k), BNode::new(up, 1, k))
    }

    /// The two endpoint elements with their values.
    fn elements(&self, k: u32) -> [(DigitSeq, Rational); 2] {
        let mut up = self.prefix.clone();
        up.push(self.i);
        [
            (
                DigitSeq::periodic(self.prefix.clone(), vec![k]).unwrap(),
                self.lo.clone(),
            ),
            (DigitSeq::new(up, SeqTail::OnesTail).unwrap(), self.hi.clone()),
        ]
    }
}

fn margin(c: &BNode, d: &BNode, x: &Rational) -> Rational {
    let a = Rational::from(x - &c.lo) - &d.lo;
    let b = Rational::from(&c.hi + &d.hi) - x;
    if a < b {
        a
    } else {
        b
    }
}

fn best_pair(c: &BNode, d: &BNode, k: u32, x: &Rational) -> TauCertificate {
    let mut best: Option<TauCertificate> = None;
    for (ls, lv) in c.elements(k) {
        for (rs, rv) in d.elements(k) {
            let sum = Rational::from(&lv + &rv);
            let residual = Rational::from(x - &sum).abs();
            if best.as_ref().map_or(true, |b| residual < b.residual) {
                best = Some(TauCertificate {
                    left: ls.clone(),
                    right: rs,
                    sum,
                    target: x.clone(),
                    residual,
                });
            }
        }
    }
    best.unwrap()
}

/// Nested-interval decomposition of `x` as a sum of two points of `tau(B_k)`.
///
/// Both nodes start at `[1/(2^k-1), 1]`. Each step replaces the pair by a
/// child pair whose sum interval still contains `x`, preferring to split
/// the longer node and choosing the largest margin. The run stops once
/// both nodes are no longer than `2^-depth` or an endpoint sum hits `x`.
pub fn tau_decompose_sum(x: &Rational, k: u32, depth: u32) -> Result<TauCertificate> {
    if k < 2 {
        return Err(ZstarError::InvalidNode(format!("B_{k} needs k >= 2")));
    }
    let lo = Rational::from((2, (Integer::from(1) << k) - 1u32));
    if *x < lo || *x > 2 {
        return Err(ZstarError::OutOfRange(format!("{x} is outside [{lo}, 2]")));
    }
    let target_w = pow2_inv(depth as u64);
    let root = BNode::new(vec![], 1, k);
    let mut c = root.clone();
    let mut d = root;
    loop {
        let cert = best_pair(&c, &d, k, x);
        if cert.residual == 0 || (c.width() <= target_w && d.width() <= target_w) {
            return Ok(cert);
        }
        let (c_long, d_short, swapped) = if c.width() >= d.width() {
            (&c, &d, false)
        } else {
            (&d, &c, true)
        };
        let (l1, l2) = c_long.split(k);
        let (s1, s2) = d_short.split(k);
        let mut candidates: Vec<(BNode, BNode)> = vec![(l1.clone(), d_short.clone()), (l2.clone(), d_short.clone())];
        if !candidates.iter().any(|(a, b)| margin(a, b, x) >= 0) {
            for a in [&l1, &l2] {
                for b in [&s1, &s2] {
                    candidates.push((a.clone(), b.clone()));
                }
            }
        }
        let (a, b) = candidates
            .into_iter()
            .map(|(a, b)| (margin(&a, &b, x), a, b))
            .filter(|(m, _, _)| *m >= 0)
            .max_by(|p, q| p.0.cmp(&q.0))
            .map(|(_, a, b)| (a, b))
            .ok_or_else(|| ZstarError::PrecisionInsufficient(format!("no child pair contains {x}")))?;
        if swapped {
            c = b;
            d = a;
        } else {
            c = a;
            d = b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn values() {
        assert_eq!(
            tau_value(&DigitSeq::new(vec![], SeqTail::OnesTail).unwrap()).unwrap(),
            1
        );
        for k in 1..8u32 {
            let s = DigitSeq::periodic(vec![], vec![k]).unwrap();
            assert_eq!(tau_value(&s).unwrap(), r(1, (1 << k) - 1));
        }
        let s = DigitSeq::periodic(vec![], vec![1, 2]).unwrap();
        assert_eq!(tau_value(&s).unwrap(), r(5, 7));
        let partial: f64 = (0..40).map(|j| 0.5f64.powi(1 + 3 * j) + 0.5f64.powi(3 + 3 * j)).sum();
        assert!((partial - 5.0 / 7.0).abs() < 1e-12);
        assert!(matches!(
            tau_value(&DigitSeq::new(vec![2], SeqTail::None).unwrap()),
            Err(ZstarError::NonTerminating)
        ));
    }

    #[test]
    fn expansions() {
        let s = tau_expand(&r(1, 3), 20).unwrap();
        assert_eq!(s, DigitSeq::periodic(vec![], vec![2]).unwrap());
        let s = tau_expand(&r(1, 1), 20).unwrap();
        assert_eq!(s.tail, SeqTail::OnesTail);
        assert!(s.prefix.is_empty());
        let s = tau_expand(&r(5, 7), 20).unwrap();
        assert_eq!(s, DigitSeq::periodic(vec![], vec![1, 2]).unwrap());
        assert_eq!(
            DigitSeq::periodic(vec![3, 1], vec![1, 1]).unwrap(),
            DigitSeq::new(vec![3], SeqTail::OnesTail).unwrap()
        );
        let s = tau_expand(&r(1, 2), 20).unwrap();
        assert_eq!(s, DigitSeq::new(vec![2], SeqTail::OnesTail).unwrap());
        assert!(tau_expand(&r(0, 1), 5).is_err());
        assert!(tau_expand(&r(3, 2), 5).is_err());
    }

    #[test]
    fn node_lengths_match_closed_forms() {
        let l = tau_node_lengths(&[1, 2], 1, 2).unwrap();
        let kk = r(1, 8);
        assert_eq!(l.parent, r(2, 3) * kk.clone());
        assert_eq!(l.left, r(1, 3) * kk.clone());
        assert_eq!(l.right, r(1, 6) * kk.clone());
        assert_eq!(l.gap, r(1, 6) * kk);
        for k in 2..7u32 {
            for i in 1..k {
                let l = tau_node_lengths(&[], i, k).unwrap();
                let denom = (1i64 << k) - 1;
                assert_eq!(l.gap, r(1, (1i64 << i) * denom));
                assert_eq!(l.parent, r(1, 1i64 << (i - 1)) - r(1, denom));
                assert_eq!(l.left, r(1, 1i64 << (i - 1)) - r(1i64 << (k - i), denom));
                assert_eq!(l.right, r(1, 1i64 << i) - r(1, denom));
            }
        }
        assert!(matches!(tau_node_lengths(&[], 2, 2), Err(ZstarError::InvalidNode(_))));
    }

    #[test]
    fn decompositions() {
        let c = tau_decompose_sum(&r(2, 3), 2, 40).unwrap();
        assert_eq!(c.residual, 0);
        assert_eq!(c.left, DigitSeq::periodic(vec![], vec![2]).unwrap());
        let c = tau_decompose_sum(&r(2, 1), 2, 40).unwrap();
        assert_eq!(c.residual, 0);
        assert_eq!(c.right, DigitSeq::new(vec![], SeqTail::OnesTail).unwrap());
        let c = tau_decompose_sum(&r(1, 1), 2, 40).unwrap();
        assert!(c.residual <= pow2_inv(39));
        let x = r(123_456_789, 100_000_000);
        let c = tau_decompose_sum(&x, 3, 40).unwrap();
        assert!(c.residual <= pow2_inv(38));
        assert_eq!(Rational::from(&c.sum - &x).abs(), c.residual);
        assert_eq!(tau_value(&c.left).unwrap() + tau_value(&c.right).unwrap(), c.sum);
        assert!(matches!(
            tau_decompose_sum(&r(1, 2), 2, 10),
            Err(ZstarError::OutOfRange(_))
        ));
    }
}
