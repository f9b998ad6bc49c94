//! Greedy digit extraction: the inverse of `eta`.
//!
//! Sequences extending `(p, k)` fill the value interval
//! `(zeta*(p,k), zeta*(p,k,{1}^inf)]`, and `zeta*(p,k,{1}^inf) = zeta*(p,k-1)`,
//! so the subtrees of a prefix tile its interval with larger `k` lower down.
//! A real on a shared endpoint goes to the subtree whose top it is.

use rug::Float;
use serde::Serialize;

use crate::enclosure::{Enclosure, Real};
use crate::error::{Result, ZstarError};
use crate::index::Tail;
use crate::values::{EvalConfig, Evaluator};

/// How an expansion ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpansionStatus {
    /// The trailing digits form a constant run `{q}^inf` whose value matches `x`.
    Exact(u32),
    /// `depth` digits emitted with every boundary decision certified.
    Truncated,
    /// A boundary decision at this 0-based position stayed undecided after
    /// every precision escalation; the closed-top convention was applied.
    BoundaryAmbiguous(usize),
}

#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub digits: Vec<u32>,
    pub status: ExpansionStatus,
    /// `x - zeta*(digits)`.
    pub residual: Enclosure,
    /// Value interval of the subtree rooted at `digits`.
    pub low: Enclosure,
    pub high: Enclosure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpandOptions {
    pub precision: u32,
    /// Number of precision doublings tried at an undecided boundary.
    pub escalation_limit: u32,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions {
            precision: 128,
            escalation_limit: 3,
        }
    }
}

/// `(zeta*(p,k), zeta*(p,k,{1}^inf)]`; the top is `+inf` for `((), 2)`.
pub fn subtree_bounds(prefix: &[u32], k: u32, precision: u32) -> Result<(Enclosure, Enclosure)> {
    let ev = Evaluator::new(EvalConfig::engine(precision));
    subtree_bounds_with(&ev, prefix, k)
}

pub(crate) fn subtree_bounds_with(ev: &Evaluator, prefix: &[u32], k: u32) -> Result<(Enclosure, Enclosure)> {
    if k == 0 || (prefix.is_empty() && k < 2) {
        return Err(ZstarError::InvalidIndex(format!("digit {k} after {prefix:?}")));
    }
    let mut p = prefix.to_vec();
    p.push(k);
    Ok((ev.value(&p, Tail::NoTail)?, ev.value(&p, Tail::ConstTail(1))?))
}

/// Expansion engine holding one memoizing evaluator per escalation level.
pub struct Expander {
    levels: Vec<Evaluator>,
}

struct Choice {
    digit: u32,
    decided: bool,
}

impl Expander {
    pub fn new(opts: ExpandOptions) -> Self {
        let levels = (0..=opts.escalation_limit)
            .map(|e| Evaluator::new(EvalConfig::engine(opts.precision << e)))
            .collect();
        Expander { levels }
    }

    fn low(&self, level: usize, p: &[u32], k: u32) -> Result<Enclosure> {
        let mut v = p.to_vec();
        v.push(k);
        self.levels[level].value(&v, Tail::NoTail)
    }

    /// The digit after `p` at one precision level.
    fn choose(&self, level: usize, p: &[u32], x: &Enclosure) -> Result<Choice> {
        let ev = &self.levels[level];
        let prec = ev.precision();
        let kmin = if p.is_empty() { 2 } else { 1 };
        let mut decided = true;

        // zeta*(p,k) <= zeta*(p)(1 + 3 2^-k), so any k with that bound below x works
        let base = ev.value(p, Tail::NoTail)?;
        let gap = x.sub(&base).div(&base.mul(&Enclosure::from_u64(prec, 3)));
        let k_hi = if gap.lower() > 0 {
            let lg = gap.lower().log2().to_f64();
            (kmin as f64).max(2.0 - lg.floor()) as u32
        } else {
            decided = false;
            4 * prec
        };

        let mut lo = kmin;
        let mut hi = k_hi;
        if !self.low(level, p, hi)?.certainly_lt(x) {
            decided = false;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let f = self.low(level, p, mid)?;
            if f.certainly_lt(x) {
                hi = mid;
            } else {
                // x may sit on the shared endpoint zeta*(p, mid)
                if !f.certainly_gt(x) {
                    decided = false;
                }
                lo = mid + 1;
            }
        }
        Ok(Choice { digit: lo, decided })
    }

    /// Digits of `x` to `depth` positions.
    pub fn expand(&self, x: &Real, depth: usize) -> Result<ExpansionResult> {
        let top = self.levels.len() - 1;
        let x0 = x.enclosure(self.levels[0].precision());
        if !x0.certainly_gt(&Enclosure::from_u64(x0.prec(), 1)) {
            return Err(ZstarError::OutOfDomain(format!("x = {x} must exceed 1")));
        }
        let mut digits: Vec<u32> = Vec::with_capacity(depth);
        let mut ambiguous: Option<usize> = None;
        for pos in 0..depth {
            let mut pick = None;
            for level in 0..=top {
                let xe = x.enclosure(self.levels[level].precision());
                let c = self.choose(level, &digits, &xe)?;
                if c.decided || level == top {
                    if !c.decided && ambiguous.is_none() {
                        ambiguous = Some(pos);
                    }
                    pick = Some(c.digit);
                    break;
                }
            }
            digits.push(pick.unwrap());
        }

        let ev = &self.levels[0];
        let xe = x.enclosure(ev.precision());
        let (low, high) = if digits.is_empty() {
            (
                Enclosure::from_u64(ev.precision(), 1),
                Enclosure::infinite(ev.precision()),
            )
        } else {
            subtree_bounds_with(ev, &digits[..digits.len() - 1], *digits.last().unwrap())?
        };
        let residual = xe.sub(&low);
        let status = match ambiguous {
            Some(pos) => ExpansionStatus::BoundaryAmbiguous(pos),
            None => match self.constant_tail(&digits, &xe)? {
                Some(q) => ExpansionStatus::Exact(q),
                None => ExpansionStatus::Truncated,
            },
        };
        Ok(ExpansionResult {
            digits,
            status,
            residual,
            low,
            high,
        })
    }

    /// A trailing run of at least three equal digits `q` whose `{q}^inf`
    /// completion has a value overlapping `x`.
    fn constant_tail(&self, digits: &[u32], x: &Enclosure) -> Result<Option<u32>> {
        let Some(&q) = digits.last() else { return Ok(None) };
        let start = digits.iter().rposition(|&d| d != q).map_or(0, |i| i + 1);
        if digits.len() - start < 3 {
            return Ok(None);
        }
        let v = self.levels[0].value(&digits[..start], Tail::ConstTail(q))?;
        Ok(if !v.is_infinite() && v.overlaps(x) {
            Some(q)
        } else {
            None
        })
    }
}

/// Digits of `x` with a fresh engine.
pub fn expand(x: &Real, depth: usize, opts: ExpandOptions) -> Result<ExpansionResult> {
    Expander::new(opts).expand(x, depth)
}

/// `zeta(2) = pi^2/6` at `prec` bits, for examples and tests.
pub fn zeta2(prec: u32) -> Enclosure {
    let lo = Float::with_val_round(prec, Float::zeta_u(2), rug::float::Round::Down).0;
    let hi = Float::with_val_round(prec, Float::zeta_u(2), rug::float::Round::Up).0;
    Enclosure::from_interval_prec(&crate::enclosure::Interval::new(lo, hi), prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn q(n: i64, d: i64) -> Real {
        Real::Exact(Rational::from((n, d)))
    }

    #[test]
    fn two_expands_to_twos() {
        let r = expand(&q(2, 1), 5, ExpandOptions::default()).unwrap();
        assert_eq!(r.digits, vec![2, 2, 2, 2, 2]);
        assert_eq!(r.status, ExpansionStatus::Exact(2));
    }

    #[test]
    fn zeta_two_takes_the_three_branch() {
        let r = expand(&Real::Approx(zeta2(128)), 4, ExpandOptions::default()).unwrap();
        assert_eq!(r.digits, vec![3, 1, 1, 1]);
        assert_eq!(r.status, ExpansionStatus::BoundaryAmbiguous(0));
    }

    #[test]
    fn first_digit_of_three_halves() {
        let r = expand(&q(3, 2), 1, ExpandOptions::default()).unwrap();
        assert_eq!(r.digits, vec![3]);
        assert_eq!(r.status, ExpansionStatus::Truncated);
    }

    #[test]
    fn near_one_gives_large_first_digit() {
        // zeta(41) - 1 ~ 2^-41 < 2^-40 < zeta(40) - 1
        let x = Real::Exact(Rational::from(1) + Rational::from((1, 1u64 << 40)));
        let r = expand(&x, 2, ExpandOptions::default()).unwrap();
        assert_eq!(r.digits[0], 41);
    }

    #[test]
    fn rejects_one() {
        assert!(matches!(
            expand(&q(1, 1), 3, ExpandOptions::default()),
            Err(ZstarError::OutOfDomain(_))
        ));
    }

    #[test]
    fn subtree_examples() {
        let (lo, hi) = subtree_bounds(&[], 2, 128).unwrap();
        assert!(hi.is_infinite() && lo.overlaps(&zeta2(128)));
        let (lo, hi) = subtree_bounds(&[3], 1, 128).unwrap();
        // sum H_n / n^3 = pi^4 / 72
        let pi4 = Float::with_val(200, Float::zeta_u(4)) * 90u32 / 72u32;
        assert!(lo.contains(&pi4), "{lo}");
        assert!(hi.overlaps(&zeta2(128)));
        assert!(subtree_bounds(&[], 1, 128).is_err());
    }
}
