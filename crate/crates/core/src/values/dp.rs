//! Truncated nested sums by one streaming pass over `n = 1..=N`.
//!
//! With `g_{r+1}(n) = F_n(q)` (or 1) and
//! `g_l(n) = g_l(n-1) + n^-s_l g_{l+1}(n)`, level `l` holds the sum over
//! `n >= n_l >= ... >= n_r >= 1` of the inner part of the index. Only the
//! current value of each level is kept.
//!
//! All quantities are positive, so round-to-nearest at `wp` bits gives each
//! summand a relative error of at most `(1 + 2^-wp)^M - 1`, where `M` counts
//! the roundings along that summand's path. A summand entering level `l` at
//! step `k` meets `N - k` additions there and at most `k` additions in the
//! levels below it, so `M <= 2N + 6(r + 2)` counting the tail factor chain.

use rug::float::Round;
use rug::ops::{PowAssign, SubFrom};
use rug::{Assign, Float};

use crate::enclosure::Interval;

/// Relative error bound for a pass of `n_max` steps with `r` levels.
fn relative_bound(n_max: u64, r: usize, wp: u32) -> Float {
    let k = 6 * (n_max + r as u64 + 2);
    // (1 + u)^K - 1 <= 1.01 K u when K u <= 0.01; 2.5x headroom on top
    let u = Float::with_val(64, Float::i_exp(1, 1 - wp as i32));
    let d = Float::with_val_round(64, &u * k, Round::Up).0;
    let d = Float::with_val_round(64, &d * 2.5f64, Round::Up).0;
    assert!(d < 0.001, "truncation too large for working precision");
    d
}

/// `1 / n^s`, rounded to nearest.
fn inv_pow(out: &mut Float, n: u64, s: u32) {
    match n.checked_pow(s) {
        Some(p) => {
            out.assign(p);
            out.recip_mut();
        }
        None => {
            out.assign(n);
            out.pow_assign(s);
            out.recip_mut();
        }
    }
}

/// Enclosures of `P_j = g_{j+1}(N)` for `j = 0..=r`.
///
/// `P_0` is the truncated value of the whole index and `P_r` is `F_N(q)`,
/// or 1 without a tail.
pub(crate) fn truncated_levels(parts: &[u32], tail_q: Option<u32>, n_max: u64, wp: u32) -> Vec<Interval> {
    let r = parts.len();
    let mut exps: Vec<u32> = parts.to_vec();
    if let Some(q) = tail_q {
        exps.push(q);
    }
    exps.sort_unstable();
    exps.dedup();
    let slot = |s: u32| exps.binary_search(&s).unwrap();
    let level_slot: Vec<usize> = parts.iter().map(|&s| slot(s)).collect();
    let tail_slot = tail_q.map(slot);

    let mut pows: Vec<Float> = vec![Float::new(wp); exps.len()];
    let mut g: Vec<Float> = vec![Float::with_val(wp, 0); r + 1];
    g[r].assign(1);
    let mut t = Float::new(wp);

    for n in 1..=n_max {
        for (p, &s) in pows.iter_mut().zip(&exps) {
            inv_pow(p, n, s);
        }
        if let (Some(ts), true) = (tail_slot, n >= 2) {
            // F_n = F_{n-1} / (1 - n^-q)
            t.assign(&pows[ts]);
            t.sub_from(1);
            g[r] /= &t;
        }
        for l in (0..r).rev() {
            let (lo, hi) = g.split_at_mut(l + 1);
            lo[l] += &pows[level_slot[l]] * &hi[0];
        }
    }

    let d = relative_bound(n_max, r, wp);
    g.into_iter()
        .map(|v| {
            let e = Float::with_val_round(wp, &v * &d, Round::Up).0;
            Interval::point(v).inflate(&e)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use rug::Rational;

    fn brute(parts: &[u32], tail_q: Option<u32>, n_max: u64) -> Rational {
        // exact nested sum, innermost level first
        let mut g: Vec<Rational> = (0..=n_max)
            .map(|n| match tail_q {
                None => Rational::from(1),
                Some(q) => (2..=n).fold(Rational::from(1), |acc, k| {
                    let kq = rug::Integer::from(k).pow(q);
                    acc * Rational::from((kq.clone(), kq - 1u32))
                }),
            })
            .collect();
        for &s in parts.iter().rev() {
            let mut acc = Rational::new();
            let mut next = vec![Rational::new(); g.len()];
            for n in 1..=n_max as usize {
                acc += Rational::from((1, rug::Integer::from(n).pow(s))) * &g[n];
                next[n] = acc.clone();
            }
            g = next;
        }
        g[n_max as usize].clone()
    }

    #[test]
    fn matches_exact_rational_sums() {
        for (parts, tail) in [
            (vec![2u32], None),
            (vec![2, 1, 1], None),
            (vec![3, 1, 2], Some(2u32)),
            (vec![], Some(3)),
            (vec![2, 2], Some(5)),
        ] {
            let lv = truncated_levels(&parts, tail, 40, 128);
            let exact = brute(&parts, tail, 40);
            assert!(lv[0].contains_rational(&exact), "{parts:?} {tail:?}");
            assert!(lv[0].width_up() < 1e-30);
        }
    }

    #[test]
    fn last_level_is_the_tail_factor() {
        let lv = truncated_levels(&[2], Some(2), 9, 128);
        // F_9(2) = 2*9/10
        assert!(lv[1].contains_rational(&Rational::from((9, 5))));
    }
}
