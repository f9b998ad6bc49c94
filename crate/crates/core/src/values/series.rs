//! Asymptotic expansions of nested tails in powers of `1/n`.
//!
//! A `Series` stands for a function `f(n)`, valid for `n >= m`, with
//! `f(n) = sum_t c_t n^-(lead+t) + R(n)` and `|R(n)| <= rho * n^-cut`.
//! `step(s)` produces the series of `sum_{n' >= n} n'^-s f(n')` using the
//! Euler-Maclaurin expansion of the Hurwitz zeta function
//!
//!   zeta(sigma, n) = n^(1-sigma)/(sigma-1) + n^-sigma/2
//!                  + sum_{k=1}^{K} B_2k/(2k)! (sigma)_(2k-1) n^(-sigma-2k+1) + R_2K,
//!   |R_2K| <= |B_2K|/(2K)! (sigma)_(2K-1) n^(-sigma-2K+1).
//!
//! The K-th term is not kept; it and the remainder together are bounded by
//! twice its magnitude.
//!
//! Terms at or beyond `cut` are folded into the remainder using
//! `n^-a <= m^-(a-cut) n^-cut` for `n >= m`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::enclosure::Interval;

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

/// `B_i` with the convention `B_1 = -1/2`.
pub(crate) fn bernoulli(i: usize) -> Rational {
    let mut table = bernoulli_table().lock().unwrap();
    while table.len() <= i {
        let m = table.len();
        // B_m = -1/(m+1) sum_{k<m} C(m+1, k) B_k
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, b) in table.iter().enumerate() {
            acc += Rational::from(&binom * b.numer()) / b.denom();
            binom *= (m + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        let b = -acc / Rational::from(m as u32 + 1);
        table.push(b);
    }
    table[i].clone()
}

/// `(sigma)_n = sigma (sigma+1) ... (sigma+n-1)`
fn rising(sigma: u32, n: u32) -> Integer {
    let mut acc = Integer::from(1);
    for i in 0..n {
        acc *= sigma + i;
    }
    acc
}

/// Coefficient of `n^-(sigma+2k-1)` in the expansion of `zeta(sigma, n)`.
fn hurwitz_coeff(sigma: u32, k: u32) -> Rational {
    let b = bernoulli(2 * k as usize);
    let mut fact = Integer::from(1);
    for i in 2..=(2 * k) {
        fact *= i;
    }
    b * Rational::from(rising(sigma, 2 * k - 1)) / fact
}

type CoeffKey = (u32, u32, u32);

thread_local! {
    static COEFF_CACHE: RefCell<HashMap<CoeffKey, Interval>> = RefCell::new(HashMap::new());
}

fn hurwitz_coeff_iv(sigma: u32, k: u32, prec: u32) -> Interval {
    COEFF_CACHE.with(|c| {
        c.borrow_mut()
            .entry((sigma, k, prec))
            .or_insert_with(|| Interval::from_rational(prec, &hurwitz_coeff(sigma, k)))
            .clone()
    })
}

fn up_pow(base_up: &Float, e: u32) -> Float {
    Float::with_val_round(base_up.prec(), base_up.pow(e), Round::Up).0
}

#[derive(Clone, Debug)]
pub(crate) struct Series {
    lead: u32,
    coeffs: Vec<Interval>,
    cut: u32,
    rho: Float,
    m: u64,
    prec: u32,
    inv_m_up: Float,
}

impl Series {
    /// The constant function 1.
    pub(crate) fn one(cut: u32, m: u64, prec: u32) -> Series {
        assert!(cut >= 1 && m >= 2);
        let inv_m_up = Float::with_val_round(prec, Float::with_val(prec, 1) / m, Round::Up).0;
        Series {
            lead: 0,
            coeffs: vec![Interval::one(prec)],
            cut,
            rho: Float::with_val(prec, 0),
            m,
            prec,
            inv_m_up,
        }
    }

    fn fold(&self, mag: &Float, exponent: u32) -> Float {
        debug_assert!(exponent >= self.cut);
        let f = up_pow(&self.inv_m_up, exponent - self.cut);
        Float::with_val_round(self.prec, mag * &f, Round::Up).0
    }

    /// Series of `sum_{n' >= n} n'^-s f(n')`.
    pub(crate) fn step(&self, s: u32) -> Series {
        let prec = self.prec;
        let cut = self.cut;
        let new_lead = (self.lead + s - 1).min(cut);
        let mut coeffs: Vec<Interval> = vec![Interval::zero(prec); (cut - new_lead) as usize];
        let mut rho = Float::with_val(prec, 0);
        let add_rho = |rho: &mut Float, v: Float| {
            *rho = Float::with_val_round(prec, &*rho + &v, Round::Up).0;
        };

        for (t, c) in self.coeffs.iter().enumerate() {
            if c.lo().is_zero() && c.hi().is_zero() {
                continue;
            }
            let sigma = s + self.lead + t as u32;
            assert!(sigma >= 2, "divergent tail sum");
            let cmag = c.mag_up();
            if sigma > cut {
                // zeta(sigma, n) <= n^(1-sigma) (1/(sigma-1) + 1/m)
                let b = Float::with_val_round(prec, Float::with_val(prec, 1) / (sigma - 1), Round::Up).0;
                let b = Float::with_val_round(prec, &b + &self.inv_m_up, Round::Up).0;
                let v = Float::with_val_round(prec, &cmag * &b, Round::Up).0;
                add_rho(&mut rho, self.fold(&v, sigma - 1));
                continue;
            }
            let mut terms: Vec<(u32, Interval)> = Vec::new();
            terms.push((sigma - 1, Interval::one(prec).div_u64((sigma - 1) as u64)));
            terms.push((sigma, Interval::one(prec).div_u64(2)));
            // smallest K >= 1 with sigma + 2K - 1 >= cut
            let kk = if sigma + 1 >= cut {
                1
            } else {
                (cut - sigma + 1).div_ceil(2)
            };
            for k in 1..kk {
                terms.push((sigma + 2 * k - 1, hurwitz_coeff_iv(sigma, k, prec)));
            }
            for (a, coef) in terms {
                if a < cut {
                    let idx = (a - new_lead) as usize;
                    coeffs[idx] = coeffs[idx].add(&c.mul(&coef));
                } else {
                    let v = Float::with_val_round(prec, &cmag * &coef.mag_up(), Round::Up).0;
                    add_rho(&mut rho, self.fold(&v, a));
                }
            }
            // the K-th term plus the order-2K remainder, each bounded by |K-th term|
            let rem = hurwitz_coeff_iv(sigma, kk, prec).mag_up() * 2u32;
            let v = Float::with_val_round(prec, &cmag * &rem, Round::Up).0;
            add_rho(&mut rho, self.fold(&v, sigma + 2 * kk - 1));
        }

        if !self.rho.is_zero() {
            // rho * zeta(s + cut, n) <= rho (1/(s+cut-1) + 1/m) n^-(s+cut-1)
            let b = Float::with_val_round(prec, Float::with_val(prec, 1) / (s + cut - 1), Round::Up).0;
            let b = Float::with_val_round(prec, &b + &self.inv_m_up, Round::Up).0;
            let v = Float::with_val_round(prec, &self.rho * &b, Round::Up).0;
            add_rho(&mut rho, self.fold(&v, s + cut - 1));
        }

        Series {
            lead: new_lead,
            coeffs,
            cut,
            rho,
            m: self.m,
            prec,
            inv_m_up: self.inv_m_up.clone(),
        }
    }

    /// Enclosure of `f(m)`.
    pub(crate) fn evaluate(&self) -> Interval {
        let prec = self.prec;
        let inv_m = Interval::one(prec).div_u64(self.m);
        let mut pw = inv_m.pow_u(self.lead);
        let mut acc = Interval::zero(prec);
        for c in &self.coeffs {
            acc = acc.add(&c.mul(&pw));
            pw = pw.mul(&inv_m);
        }
        let r = Float::with_val_round(prec, &self.rho * &up_pow(&self.inv_m_up, self.cut), Round::Up).0;
        acc.inflate(&r)
    }
}
