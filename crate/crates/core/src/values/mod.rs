//! Rigorous evaluation of finite and tail-periodic multiple zeta-star values.
//!
//! The sum over `n_1 >= ... >= n_r` is split by the number `j` of leading
//! variables above the truncation `N`:
//!
//!   zeta*(s) = sum_{j<r} V_j(N+1) P_j + P_r (V_r(N+1) + tail terms)
//!
//! where `P_j` is the truncated inner sum over `n_{j+1} <= N` (see `dp`) and
//! `V_j(m)` is the nested tail over `n_1 >= ... >= n_j >= m` (see `series`).
//! For a `{q}^inf` tail the factor `F_{n_r}(q) / F_N(q)` expands into the
//! extra tails `V_{(s, q^l)}`, summed to `l = L` and bounded beyond.

mod dp;
mod series;

use std::collections::HashMap;
use std::sync::Mutex;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::enclosure::{Enclosure, Interval};
use crate::error::{Result, ZstarError};
use crate::index::{canonical_form, ones_tail_reduction, Composition, Tail, TailedIndex};

use series::Series;

/// Precision and truncation for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EvalConfig {
    /// Bits of the returned midpoint and radius.
    pub precision: u32,
    /// Number `N` of outer terms summed directly.
    pub truncation: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            precision: 128,
            truncation: 1_000_000,
        }
    }
}

impl EvalConfig {
    pub fn new(precision: u32, truncation: u64) -> Self {
        EvalConfig { precision, truncation }
    }

    /// Configuration used by the expansion and decomposition engines. The
    /// asymptotic tails are accurate far below `N = 10^6`, and these callers
    /// evaluate thousands of values.
    pub fn engine(precision: u32) -> Self {
        EvalConfig {
            precision,
            truncation: 512,
        }
    }

    fn working_precision(&self) -> u32 {
        self.precision + 32
    }

    fn n(&self) -> u64 {
        self.truncation.max(32)
    }
}

fn kernel(parts: &[u32], tail_q: Option<u32>, cfg: &EvalConfig) -> Interval {
    let wp = cfg.working_precision();
    let n = cfg.n();
    let r = parts.len();
    let levels = dp::truncated_levels(parts, tail_q, n, wp);
    let m = n + 1;
    let lead1 = match parts.first() {
        Some(&s) => s - 1,
        None => tail_q.expect("empty index without a tail") - 1,
    };
    let cut = lead1 + ((wp + 16) as f64 / (m as f64).log2()).ceil() as u32 + 2;

    let mut v = Series::one(cut, m, wp);
    let mut total = Interval::zero(wp);
    for (j, &s) in parts.iter().enumerate() {
        total = total.add(&v.evaluate().mul(&levels[j]));
        v = v.step(s);
    }
    let vr = v.evaluate();
    let last = match tail_q {
        None => vr,
        Some(q) => vr.add(&tail_extra(&v, q, m, wp)),
    };
    total.add(&last.mul(&levels[r]))
}

/// `sum_{l >= 1} V_{(s, q^l)}(m)` given the series of `V_s`.
fn tail_extra(vr: &Series, q: u32, m: u64, wp: u32) -> Interval {
    assert!(q >= 2);
    // sigma_1 >= zeta(q, m), and V_{(s, q^l)} <= V_s sigma_1^l
    let mf = Float::with_val(wp, m);
    let a = Float::with_val_round(wp, Float::with_val(wp, 1) / (q - 1), Round::Up).0;
    let b = Float::with_val_round(wp, Float::with_val(wp, 1) / &mf, Round::Up).0;
    let ab = Float::with_val_round(wp, &a + &b, Round::Up).0;
    let mpow = Float::with_val_round(wp, (&mf).pow(q - 1), Round::Down).0;
    let sigma = Float::with_val_round(wp, &ab / &mpow, Round::Up).0;
    let per = -sigma.clone().log2().to_f64();
    let l_max = (((wp + 8) as f64 / per).ceil() as u32).max(1) - 1;

    let mut acc = Interval::zero(wp);
    let mut w = vr.clone();
    for _ in 0..l_max {
        w = w.step(q);
        acc = acc.add(&w.evaluate());
    }
    let s_pow = Float::with_val_round(wp, (&sigma).pow(l_max + 1), Round::Up).0;
    let one_minus = Float::with_val_round(wp, 1 - &sigma, Round::Down).0;
    let ratio = Float::with_val_round(wp, &s_pow / &one_minus, Round::Up).0;
    let rest = Float::with_val_round(wp, vr.evaluate().hi() * &ratio, Round::Up).0;
    acc.add(&Interval::new(Float::with_val(wp, 0), rest))
}

/// Enclosure of `zeta*(c)`.
pub fn eval_finite(c: &Composition, cfg: &EvalConfig) -> Enclosure {
    Enclosure::from_interval_prec(&kernel(c.parts(), None, cfg), cfg.precision)
}

/// Enclosure of `zeta*(prefix, {q}^inf)`.
///
/// For `q = 1` the value is the finite `zeta*(p, k-1)` when the prefix ends
/// in `k` after trailing ones are dropped; `(2, {1}^inf)` diverges.
pub fn eval_with_const_tail(t: &TailedIndex, cfg: &EvalConfig) -> Result<Enclosure> {
    match t.tail {
        Tail::NoTail => Ok(eval_finite(&t.prefix, cfg)),
        Tail::ConstTail(1) => match ones_tail_reduction(t.prefix.parts()) {
            Some(c) => Ok(eval_finite(&c, cfg)),
            None => Err(ZstarError::DivergentValue(t.to_string())),
        },
        Tail::ConstTail(q) => {
            let canon = canonical_form(t)?;
            let iv = kernel(canon.prefix.parts(), Some(q), cfg);
            Ok(Enclosure::from_interval_prec(&iv, cfg.precision))
        }
    }
}

/// Like `eval_with_const_tail`, but a divergent value is `+inf`.
pub fn eval_extended(t: &TailedIndex, cfg: &EvalConfig) -> Enclosure {
    match eval_with_const_tail(t, cfg) {
        Ok(e) => e,
        Err(_) => Enclosure::infinite(cfg.precision),
    }
}

/// Enclosure of `zeta*(prefix, tail)` where the prefix may be empty.
///
/// An empty prefix with tail `{q}^inf` is `zeta*({q}^inf)`; an empty finite
/// index is the empty product 1.
pub fn eval_parts(prefix: &[u32], tail: Tail, cfg: &EvalConfig) -> Result<Enclosure> {
    if prefix.is_empty() {
        return match tail {
            Tail::NoTail => Ok(Enclosure::from_u64(cfg.precision, 1)),
            Tail::ConstTail(q) => tail_factor_limit(q, cfg),
        };
    }
    let c = Composition::new(prefix.to_vec())?;
    eval_with_const_tail(&TailedIndex::new(c, tail)?, cfg)
}

/// `F_m(q) = prod_{n=2}^{m} (1 - n^-q)^-1` exactly.
pub fn tail_factor(m: u64, q: u32) -> Rational {
    assert!(m >= 1 && q >= 1);
    if q == 1 {
        return Rational::from(m);
    }
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    for n in 2..=m {
        let nq = Integer::from(n).pow(q);
        den *= &nq - Integer::from(1);
        num *= nq;
    }
    Rational::from((num, den))
}

/// Enclosure of `F_m(q)` for large `m`.
pub fn tail_factor_enclosure(m: u64, q: u32, precision: u32) -> Enclosure {
    let iv = dp::truncated_levels(&[], Some(q), m, precision + 32).remove(0);
    Enclosure::from_interval_prec(&iv, precision)
}

/// Enclosure of `F_inf(q) = zeta*({q}^inf)`.
pub fn tail_factor_limit(q: u32, cfg: &EvalConfig) -> Result<Enclosure> {
    if q < 2 {
        return Err(ZstarError::DivergentValue(format!("{{{q}}}^inf")));
    }
    Ok(Enclosure::from_interval_prec(&kernel(&[], Some(q), cfg), cfg.precision))
}

/// Memoizing evaluator shared by the engines.
pub struct Evaluator {
    cfg: EvalConfig,
    memo: Mutex<HashMap<(Vec<u32>, Tail), Enclosure>>,
}

impl Evaluator {
    pub fn new(cfg: EvalConfig) -> Self {
        Evaluator {
            cfg,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn precision(&self) -> u32 {
        self.cfg.precision
    }

    /// Value of `(prefix, tail)`; divergent values are `+inf`.
    pub fn value(&self, prefix: &[u32], tail: Tail) -> Result<Enclosure> {
        let key = (prefix.to_vec(), tail);
        if let Some(e) = self.memo.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let e = match eval_parts(prefix, tail, &self.cfg) {
            Err(ZstarError::DivergentValue(_)) => Enclosure::infinite(self.cfg.precision),
            other => other?,
        };
        self.memo.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    pub fn len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::make_composition;

    fn zeta(s: u32, prec: u32) -> Float {
        Float::with_val(prec, Float::zeta_u(s))
    }

    fn cfg() -> EvalConfig {
        EvalConfig::engine(128)
    }

    #[test]
    fn tail_factor_small_cases() {
        assert_eq!(tail_factor(1, 5), 1);
        assert_eq!(tail_factor(3, 2), Rational::from((3, 2)));
        assert_eq!(tail_factor(4, 3), Rational::from((768, 637)));
        assert_eq!(tail_factor(7, 1), 7);
        for m in 1..30u64 {
            assert_eq!(tail_factor(m, 2), Rational::from((2 * m, m + 1)));
        }
    }

    #[test]
    fn tail_factor_enclosure_contains_exact() {
        let e = tail_factor_enclosure(50, 3, 128);
        assert!(e.contains_rational(&tail_factor(50, 3)));
    }

    #[test]
    fn two_then_ones_closed_form() {
        for r in 0..5u32 {
            let mut parts = vec![2];
            parts.extend(std::iter::repeat(1).take(r as usize));
            let e = eval_finite(&make_composition(&parts).unwrap(), &cfg());
            let truth = Float::with_val(200, zeta(r + 2, 200) * (r + 1));
            assert!(e.contains(&truth), "r={r}: {e}");
            assert!(*e.rad() < 1e-30);
        }
    }

    #[test]
    fn tail_values() {
        let c = cfg();
        let t = TailedIndex::with_tail(make_composition(&[3]).unwrap(), 2).unwrap();
        let e = eval_with_const_tail(&t, &c).unwrap();
        let truth = Float::with_val(200, zeta(2, 200) * 2u32) - 2u32;
        assert!(e.contains(&truth), "{e}");

        let t = TailedIndex::with_tail(make_composition(&[2]).unwrap(), 2).unwrap();
        let e = eval_with_const_tail(&t, &c).unwrap();
        assert!(e.contains(&Float::with_val(128, 2)) && *e.rad() < 1e-30, "{e}");

        let e = tail_factor_limit(2, &c).unwrap();
        assert!(e.contains(&Float::with_val(128, 2)) && *e.rad() < 1e-30, "{e}");

        let t = TailedIndex::with_tail(make_composition(&[2]).unwrap(), 1).unwrap();
        assert!(matches!(
            eval_with_const_tail(&t, &c),
            Err(ZstarError::DivergentValue(_))
        ));
        assert!(eval_extended(&t, &c).is_infinite());
    }

    #[test]
    fn constant_tail_limits_against_products() {
        // prod_{n>=2} (1 - n^-q)^-1 truncated at 2e5, tail below 2 N^(1-q)/(q-1)
        for q in [3u32, 10] {
            let e = tail_factor_limit(q, &cfg()).unwrap();
            let mut p = 1.0f64;
            for n in 2..200_000u64 {
                p /= 1.0 - (n as f64).powi(-(q as i32));
            }
            let slack = 2.0 * (2e5f64).powi(1 - q as i32) / (q as f64 - 1.0) + 1e-12;
            assert!((e.to_f64() - p).abs() <= slack, "q={q} {e} vs {p}");
        }
    }

    #[test]
    fn truncation_choice_does_not_matter() {
        let t = TailedIndex::with_tail(make_composition(&[2, 1, 3]).unwrap(), 3).unwrap();
        let a = eval_with_const_tail(&t, &EvalConfig::new(128, 64)).unwrap();
        let b = eval_with_const_tail(&t, &EvalConfig::new(128, 5000)).unwrap();
        assert!(a.overlaps(&b));
        assert!(*a.rad() < 1e-30 && *b.rad() < 1e-30);
    }

    #[test]
    fn evaluator_memoizes() {
        let ev = Evaluator::new(cfg());
        let a = ev.value(&[3, 1], Tail::ConstTail(2)).unwrap();
        let b = ev.value(&[3, 1], Tail::ConstTail(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(ev.len(), 1);
        assert!(ev.value(&[2, 1], Tail::ConstTail(1)).unwrap().is_infinite());
        assert_eq!(ev.value(&[], Tail::NoTail).unwrap().to_f64(), 1.0);
    }
}
