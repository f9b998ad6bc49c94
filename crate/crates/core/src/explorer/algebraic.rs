//! Search net for algebraic numbers in `eta(D_2)`.
//!
//! Real roots of integer polynomials of bounded degree and height are
//! isolated with Sturm sequences in exact rationals, then expanded. A digit
//! above 2 eliminates a candidate; otherwise it survives to the depth tried.
//! There is no "member" outcome.

use std::cmp::Ordering;

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::enclosure::{Enclosure, Interval, Real};
use crate::error::{Result, ZstarError};
use crate::expansion::{ExpandOptions, Expander, ExpansionStatus};
use crate::index::Tail;
use crate::values::{EvalConfig, Evaluator};

/// Coefficients, constant term first.
type Poly = Vec<Rational>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| *c == 0) {
        p.pop();
    }
    p
}

fn eval(p: &Poly, x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
}

fn derivative(p: &Poly) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Rational::from(c * i as u32))
            .collect(),
    )
}

fn rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let lead = b.last().unwrap();
    while r.len() >= b.len() && !(r.len() == 1 && r[0] == 0) {
        let f = Rational::from(r.last().unwrap() / lead);
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= Rational::from(&f * c);
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            r.push(Rational::new());
        }
    }
    r
}

fn sturm(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), derivative(p)];
    loop {
        let n = seq.len();
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.len() == 1 && r[0] == 0 {
            return seq;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
}

fn variations(seq: &[Poly], x: &Rational) -> usize {
    let signs: Vec<Ordering> = seq
        .iter()
        .map(|p| eval(p, x).cmp0())
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Disjoint intervals `(a, b]`, each holding one distinct root.
fn isolate(seq: &[Poly], a: Rational, b: Rational, out: &mut Vec<(Rational, Rational)>) {
    let n = variations(seq, &a) - variations(seq, &b);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((a, b));
        return;
    }
    let m = Rational::from(&a + &b) / 2u32;
    isolate(seq, a, m.clone(), out);
    isolate(seq, m, b, out);
}

/// Shrinks `(a, b]` to width at most `2^-bits`.
fn refine(seq: &[Poly], mut a: Rational, mut b: Rational, bits: u32) -> (Rational, Rational) {
    let eps = Rational::from((1, Integer::from(1) << bits));
    while Rational::from(&b - &a) > eps {
        let m = Rational::from(&a + &b) / 2u32;
        if variations(seq, &a) - variations(seq, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
    (a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// A digit above 2 at this 0-based position.
    EliminatedAtDigit(usize),
    /// Every digit up to the search depth is 1 or 2.
    SurvivorToDepth(usize),
    BoundaryAmbiguous(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    /// Integer coefficients, constant term first.
    pub polynomial: Vec<i64>,
    pub value: Enclosure,
    pub exact: Option<String>,
    pub digits: Vec<u32>,
    pub classification: Classification,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivorReport {
    pub max_degree: u32,
    pub max_height: u32,
    pub expand_depth: usize,
    pub upper_bound: Enclosure,
    pub candidates: Vec<Candidate>,
    pub eliminated: usize,
    pub survivors: usize,
    pub ambiguous: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_degree: u32,
    pub max_height: u32,
    pub expand_depth: usize,
    pub precision: u32,
}

/// Integer polynomials of degree `1..=max_degree`, height `<= max_height`,
/// positive leading coefficient.
fn polynomials(max_degree: u32, h: i64) -> Vec<Vec<i64>> {
    let mut out = vec![];
    for d in 1..=max_degree as usize {
        let mut coeffs = vec![-h; d + 1];
        coeffs[d] = 1;
        loop {
            out.push(coeffs.clone());
            let mut i = 0;
            loop {
                if i > d {
                    break;
                }
                let top = h;
                if coeffs[i] < top {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = if i == d { 1 } else { -h };
                i += 1;
            }
            if i > d {
                break;
            }
        }
    }
    out
}

struct Root {
    poly: Vec<i64>,
    lo: Rational,
    hi: Rational,
    exact: Option<Rational>,
}

fn roots_in(poly: &[i64], lo: &Rational, hi: &Rational, bits: u32) -> Vec<Root> {
    let p: Poly = trim(poly.iter().map(|&c| Rational::from(c)).collect());
    if p.len() < 2 {
        return vec![];
    }
    if p.len() == 2 {
        let r = Rational::from(-&p[0]) / &p[1];
        return if r > *lo && r <= *hi {
            vec![Root {
                poly: poly.to_vec(),
                lo: r.clone(),
                hi: r.clone(),
                exact: Some(r),
            }]
        } else {
            vec![]
        };
    }
    let seq = sturm(&p);
    let mut found = vec![];
    isolate(&seq, lo.clone(), hi.clone(), &mut found);
    found
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = refine(&seq, a, b, bits);
            Root {
                poly: poly.to_vec(),
                lo: a,
                hi: b,
                exact: None,
            }
        })
        .collect()
}

fn classify(exp: &Expander, x: &Real, depth: usize) -> Result<(Vec<u32>, Classification)> {
    let r = exp.expand(x, depth)?;
    let elim = r.digits.iter().position(|&d| d > 2);
    let class = match (r.status, elim) {
        (ExpansionStatus::BoundaryAmbiguous(p), Some(e)) if p <= e => Classification::BoundaryAmbiguous(p),
        (ExpansionStatus::BoundaryAmbiguous(p), None) => Classification::BoundaryAmbiguous(p),
        (_, Some(e)) => Classification::EliminatedAtDigit(e),
        (_, None) => Classification::SurvivorToDepth(depth),
    };
    Ok((r.digits, class))
}

/// Expands every algebraic candidate in `(1, zeta*(2, {1}^expand_depth)]`.
pub fn search_algebraic(opts: SearchOptions) -> Result<SurvivorReport> {
    if opts.max_degree == 0 || opts.max_height == 0 || opts.expand_depth == 0 {
        return Err(ZstarError::InvalidIndex("search parameters must be positive".into()));
    }
    let prec = opts.precision;
    let xo = ExpandOptions {
        precision: prec,
        ..ExpandOptions::default()
    };
    let bits = (prec << xo.escalation_limit) + 16;

    let ev = Evaluator::new(EvalConfig::engine(prec));
    let mut chain = vec![2];
    chain.extend(std::iter::repeat(1).take(opts.expand_depth));
    let upper = ev.value(&chain, Tail::NoTail)?;
    // the bound is transcendental; its lower end keeps the range inside
    let top = Rational::from_f64(upper.lower().to_f64_round(rug::float::Round::Down)).unwrap();

    let mut roots: Vec<Root> = vec![];
    for poly in polynomials(opts.max_degree, opts.max_height as i64) {
        for r in roots_in(&poly, &Rational::from(1), &top, bits) {
            // keep the first polynomial producing each root
            let dup = roots.iter().any(|s| r.lo <= s.hi && s.lo <= r.hi);
            if !dup {
                roots.push(r);
            }
        }
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));

    let expander = Expander::new(xo);
    let mut candidates = Vec::with_capacity(roots.len());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let chunk = roots.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<Candidate>>> = std::thread::scope(|s| {
        let handles: Vec<_> = roots
            .chunks(chunk)
            .map(|part| {
                let expander = &expander;
                s.spawn(move || {
                    part.iter()
                        .map(|r| {
                            let x = match &r.exact {
                                Some(q) => Real::Exact(q.clone()),
                                None => {
                                    let lo = Float::with_val_round(bits, &r.lo, rug::float::Round::Down).0;
                                    let hi = Float::with_val_round(bits, &r.hi, rug::float::Round::Up).0;
                                    Real::Approx(Enclosure::from_interval(&Interval::new(lo, hi)))
                                }
                            };
                            let (digits, classification) = classify(expander, &x, opts.expand_depth)?;
                            Ok(Candidate {
                                polynomial: r.poly.clone(),
                                value: x.enclosure(prec),
                                exact: r.exact.as_ref().map(|q| q.to_string()),
                                digits,
                                classification,
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    for r in results {
        candidates.extend(r?);
    }

    let count = |f: fn(&Classification) -> bool| candidates.iter().filter(|c| f(&c.classification)).count();
    Ok(SurvivorReport {
        max_degree: opts.max_degree,
        max_height: opts.max_height,
        expand_depth: opts.expand_depth,
        upper_bound: upper,
        eliminated: count(|c| matches!(c, Classification::EliminatedAtDigit(_))),
        survivors: count(|c| matches!(c, Classification::SurvivorToDepth(_))),
        ambiguous: count(|c| matches!(c, Classification::BoundaryAmbiguous(_))),
        candidates,
    })
}
