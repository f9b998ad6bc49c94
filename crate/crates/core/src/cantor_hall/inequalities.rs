//! The inequalities behind the gap condition for `eta(D_q)`.
//!
//! (A) `2 F_m(q) <= m + 1` in exact rationals, together with
//! `F_m(q) <= F_m(2) = 2m/(m+1)`.
//!
//! Per prefix `P` and type `1 <= i <= q-1`, with certified enclosures:
//! - linear/log forms of the condition for the node `(P, i)` of `D_q`:
//!   `zeta*(P,i,{q}^inf)^2 <= zeta*(P,i,{1}^inf) zeta*(P,i)` and
//!   `zeta*(P,i,{q}^inf) zeta*(P,{q}^inf) <= zeta*(P,i)^2`;
//! - (C) `zeta*(P,i,{2}^inf)^2 <= zeta*(P,i,{1}^inf) zeta*(P,i)`;
//! - (D) `zeta*(P,i,{2}^inf) zeta*(P,q,{2}^inf) <= zeta*(P,i)^2`.
//!
//! Summing `n^-s F_n(2)` over the innermost variable gives the `{2}^inf`
//! tail, which is how (C) and (D) turn into values.

use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;

use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};
use crate::index::Tail;
use crate::values::{EvalConfig, Evaluator};

/// Outcome of one certified comparison `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    /// `None` when the enclosures overlap.
    pub holds: Option<bool>,
    /// `rhs - lhs` at the midpoints.
    pub slack: f64,
}

impl Check {
    fn le(lhs: &Enclosure, rhs: &Enclosure) -> Check {
        let holds = if lhs.certainly_lt(rhs) {
            Some(true)
        } else if lhs.certainly_gt(rhs) {
            Some(false)
        } else {
            None
        };
        Check {
            holds,
            slack: rhs.sub(lhs).to_f64(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixCheck {
    pub prefix: Vec<u32>,
    pub i: u32,
    pub hall_lower: Check,
    pub hall_upper: Check,
    pub c: Check,
    pub d: Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub q: u32,
    pub m_max: u64,
    /// (A) holds for every `m <= m_max`.
    pub a_holds: bool,
    /// The `m` at which `2 F_m(q) = m + 1`.
    pub a_equalities: Vec<u64>,
    pub a_violations: Vec<u64>,
    /// `F_m(q) <= 2m/(m+1)` for every `m <= m_max`.
    pub f_bound_holds: bool,
    /// `(m, 2 F_m(q), m + 1)` at a few sample points.
    pub a_samples: Vec<(u64, f64, u64)>,
    pub prefix_checks: Vec<PrefixCheck>,
    /// No certified violation anywhere.
    pub all_hold: bool,
}

struct AResult {
    equalities: Vec<u64>,
    violations: Vec<u64>,
    f_bound: bool,
    samples: Vec<(u64, f64, u64)>,
}

fn check_a(q: u32, m_max: u64) -> AResult {
    // F_m = num/den kept unreduced: num = prod n^q, den = prod (n^q - 1)
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    let mut out = AResult {
        equalities: vec![],
        violations: vec![],
        f_bound: true,
        samples: vec![],
    };
    for m in 1..=m_max {
        if m >= 2 {
            let nq = Integer::from(m).pow(q);
            den *= Integer::from(&nq - 1u32);
            num *= nq;
        }
        let lhs = Integer::from(&num * 2u32);
        let rhs = Integer::from(&den * (m + 1));
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Equal => out.equalities.push(m),
            std::cmp::Ordering::Greater => out.violations.push(m),
            _ => {}
        }
        // F_m(q) (m+1) <= 2m
        if Integer::from(&num * (m + 1)) > Integer::from(&den * (2 * m)) {
            out.f_bound = false;
        }
        if m.is_power_of_two() || m == m_max {
            let f = rug::Rational::from((lhs, den.clone())).to_f64();
            out.samples.push((m, f, m + 1));
        }
    }
    out
}

fn check_prefix(ev: &Evaluator, q: u32, prefix: &[u32], i: u32) -> Result<PrefixCheck> {
    let mut pi = prefix.to_vec();
    pi.push(i);
    let mut pq = prefix.to_vec();
    pq.push(q);
    let v_iq = ev.value(&pi, Tail::ConstTail(q))?;
    let v_i1 = ev.value(&pi, Tail::ConstTail(1))?;
    let v_i = ev.value(&pi, Tail::NoTail)?;
    let v_pq = ev.value(prefix, Tail::ConstTail(q))?;
    let v_i2 = ev.value(&pi, Tail::ConstTail(2))?;
    let v_q2 = ev.value(&pq, Tail::ConstTail(2))?;
    let vi_sq = v_i.mul(&v_i);
    Ok(PrefixCheck {
        prefix: prefix.to_vec(),
        i,
        hall_lower: Check::le(&v_iq.mul(&v_iq), &v_i1.mul(&v_i)),
        hall_upper: Check::le(&v_iq.mul(&v_pq), &vi_sq),
        c: Check::le(&v_i2.mul(&v_i2), &v_i1.mul(&v_i)),
        d: Check::le(&v_i2.mul(&v_q2), &vi_sq),
    })
}

fn validate_prefix(q: u32, p: &[u32]) -> Result<()> {
    let two_ones = p.first() == Some(&2) && p[1..].iter().all(|&d| d == 1);
    if p.is_empty() || p[0] < 2 || p.iter().any(|&d| d == 0 || d > q) || two_ones {
        return Err(ZstarError::InvalidIndex(format!(
            "prefix {p:?} needs digits in [1, {q}], a first digit >= 2, and must not be (2, 1, ..., 1)"
        )));
    }
    Ok(())
}

/// Runs (A) for `m <= m_max` and the per-prefix checks for every `1 <= i <= q-1`.
pub fn verify_inequalities(q: u32, m_max: u64, prefixes: &[Vec<u32>], precision: u32) -> Result<InequalityReport> {
    if q < 2 {
        return Err(ZstarError::InvalidIndex("q must be at least 2".into()));
    }
    for p in prefixes {
        validate_prefix(q, p)?;
    }
    let a = check_a(q, m_max);
    let ev = Evaluator::new(EvalConfig::engine(precision));
    let mut sorted: Vec<&Vec<u32>> = prefixes.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut checks = vec![];
    for p in sorted {
        for i in 1..q {
            checks.push(check_prefix(&ev, q, p, i)?);
        }
    }
    let failed = |c: &Check| c.holds == Some(false);
    let all_hold = a.violations.is_empty()
        && a.f_bound
        && !checks
            .iter()
            .any(|c| failed(&c.hall_lower) || failed(&c.hall_upper) || failed(&c.c) || failed(&c.d));
    Ok(InequalityReport {
        q,
        m_max,
        a_holds: a.violations.is_empty(),
        a_equalities: a.equalities,
        a_violations: a.violations,
        f_bound_holds: a.f_bound,
        a_samples: a.samples,
        prefix_checks: checks,
        all_hold,
    })
}

/// Prefixes of length `1..=max_len` with digits in `[1, q]` and first digit
/// `>= 2`, excluding `(2, 1, ..., 1)`.
pub fn sample_prefixes(q: u32, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![];
    let mut layer: Vec<Vec<u32>> = (2..=q).map(|d| vec![d]).collect();
    for _ in 0..max_len {
        out.extend(layer.iter().filter(|p| validate_prefix(q, p).is_ok()).cloned());
        layer = layer
            .iter()
            .flat_map(|p| {
                (1..=q).map(move |d| {
                    let mut v = p.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}
