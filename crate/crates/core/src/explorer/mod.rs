//! Dimension formula, box counts, covering lengths and the algebraic search.
//! Reports only; nothing here decides membership or measure.

pub mod algebraic;

use rug::{Float, Integer};
use serde::Serialize;

use crate::cantor_hall::{Family, Subdivider};
use crate::enclosure::{Enclosure, Interval};
use crate::error::{Result, ZstarError};

pub use algebraic::{search_algebraic, Candidate, Classification, SearchOptions, SurvivorReport};

/// `x^(p-1) (x - 1) - 1` over an interval.
fn moran(x: &Interval, p: u32) -> Interval {
    let one = Interval::one(x.prec());
    x.pow_u(p - 1).mul(&x.sub(&one)).sub(&one)
}

/// The root of `x^(p-1)(x-1) = 1` in `(1, 2)`, by certified bisection.
pub fn alpha_root(p: u32, precision: u32) -> Result<Enclosure> {
    if p < 2 {
        return Err(ZstarError::InvalidIndex("p must be at least 2".into()));
    }
    let wp = precision + 16;
    let mut lo = Float::with_val(wp, 1);
    let mut hi = Float::with_val(wp, 2);
    for _ in 0..(wp + 8) {
        let mid = Float::with_val(wp + 1, &lo + &hi) / 2u32;
        let mid = Float::with_val(wp, mid);
        let f = moran(&Interval::point(mid.clone()), p);
        if f.hi() < &0 {
            lo = mid;
        } else if f.lo() > &0 {
            hi = mid;
        } else {
            break;
        }
    }
    Ok(Enclosure::from_interval_prec(&Interval::new(lo, hi), precision))
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionRecord {
    pub p: u32,
    pub alpha: Enclosure,
    /// `log alpha / log 2`.
    pub dim: Enclosure,
    /// Box-count growth `log2(a_n / a_(n-1))` at `depth`.
    pub empirical_dim: f64,
    pub depth: u32,
}

/// `log(alpha_p) / log 2` together with the box-count estimate at `depth`.
pub fn dimension_formula(p: u32, depth: u32, precision: u32) -> Result<DimensionRecord> {
    let alpha = alpha_root(p, precision)?;
    let two = Enclosure::from_u64(precision, 2);
    let dim = alpha.ln().div(&two.ln());
    let empirical_dim = box_count(p, depth.max(1))?.growth;
    Ok(DimensionRecord {
        p,
        alpha,
        dim,
        empirical_dim,
        depth,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCount {
    pub p: u32,
    pub n: u32,
    /// Number of admissible length-`n` bit strings.
    #[serde(serialize_with = "integer_string")]
    pub count: Integer,
    /// `log2(a_n / a_(n-1))`.
    pub growth: f64,
}

fn integer_string<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `a_0, ..., a_n` with `a_n = a_(n-1) + a_(n-p)` and `a_n = n + 1` for `n < p`.
///
/// `a_n` counts bit strings of length `n` whose 1-bits are at least `p`
/// positions apart, i.e. the level-`n` dyadic intervals met by `tau(L_p)`.
pub fn box_count_sequence(p: u32, n: u32) -> Result<Vec<Integer>> {
    if p < 2 {
        return Err(ZstarError::InvalidIndex("p must be at least 2".into()));
    }
    let mut a: Vec<Integer> = Vec::with_capacity(n as usize + 1);
    for k in 0..=n as usize {
        let v = if k < p as usize {
            Integer::from(k + 1)
        } else {
            Integer::from(&a[k - 1] + &a[k - p as usize])
        };
        a.push(v);
    }
    Ok(a)
}

pub fn box_count(p: u32, n: u32) -> Result<BoxCount> {
    if n == 0 {
        return Err(ZstarError::InvalidIndex("n must be at least 1".into()));
    }
    let a = box_count_sequence(p, n)?;
    let ratio = rug::Rational::from((a[n as usize].clone(), a[n as usize - 1].clone()));
    let growth = ratio.to_f64().log2();
    Ok(BoxCount {
        p,
        n,
        count: a[n as usize].clone(),
        growth,
    })
}

/// Exhaustive count of length-`n` bit strings with 1-bits at least `p` apart.
pub fn enumerate_box_count(p: u32, n: u32) -> u64 {
    assert!(n < 32, "enumeration is exponential");
    (0u64..1 << n)
        .filter(|&m| {
            let bits: Vec<u32> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
            bits.windows(2).all(|w| w[1] - w[0] >= p)
        })
        .count() as u64
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringRecord {
    pub q: u32,
    pub depth: u32,
    /// Cap `R` of the window `[zeta*({q}^inf), zeta*(2, {1}^R)]`.
    pub window: u32,
    pub nodes: usize,
    pub length: Enclosure,
}

/// Total length of the depth-`depth` nodes of `eta(D_q)` inside the window
/// capped at `zeta*(2, {1}^window)`.
pub fn covering_length(q: u32, depth: u32, window: u32, precision: u32) -> Result<CoveringRecord> {
    let s = Subdivider::new(Family::EtaDq(q), precision)?;
    let root = s.capped_root(window)?;
    let nodes = s.level(&root, depth)?;
    let mut total = Enclosure::from_u64(precision, 0);
    for n in &nodes {
        total = total.add(&n.length());
    }
    Ok(CoveringRecord {
        q,
        depth,
        window,
        nodes: nodes.len(),
        length: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio() {
        let a = alpha_root(2, 128).unwrap();
        let phi = (Float::with_val(200, 5).sqrt() + 1u32) / 2u32;
        assert!(a.contains(&phi));
        assert!(a.to_interval().width_up() < Float::with_val(53, Float::i_exp(1, -120)));
    }

    #[test]
    fn p3_root_and_dimension() {
        let a = alpha_root(3, 128).unwrap();
        assert!((a.to_f64() - 1.465_571_231_876_768).abs() < 1e-15);
        let d = dimension_formula(3, 60, 128).unwrap();
        assert!((d.dim.to_f64() - 0.5515).abs() < 1e-4);
        assert!((d.empirical_dim - d.dim.to_f64()).abs() < 5e-3);
    }

    #[test]
    fn recurrence_matches_enumeration() {
        let a = box_count_sequence(2, 6).unwrap();
        assert_eq!(a, [1, 2, 3, 5, 8, 13, 21].map(Integer::from));
        for p in 2..=4 {
            let a = box_count_sequence(p, 14).unwrap();
            for n in 0..=14 {
                assert_eq!(a[n as usize], enumerate_box_count(p, n), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn covering_shrinks() {
        let mut prev = f64::INFINITY;
        for d in 1..=4 {
            let c = covering_length(2, d, 3, 128).unwrap();
            assert!(c.length.to_f64() < prev && c.length.to_f64() > 0.0);
            prev = c.length.to_f64();
        }
    }
}
