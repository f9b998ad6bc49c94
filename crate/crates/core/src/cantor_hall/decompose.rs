//! Constructive `x = v1 op v2` with `v1, v2` in `eta(D_q)`.
//!
//! Both operands start at the capped root of `D_q`, cut at
//! `zeta*(2, {1}^R)` with `R` large enough that the capped range covers `x`
//! with room to spare. The engine keeps a node pair `(C, D)` whose image
//! `t(C) +/- t(D)` certainly contains `t(x)`, where `t` is the identity for
//! sums and differences and `log` for products and quotients. Each step
//! splits a node and keeps a child pair whose image still contains `t(x)`,
//! preferring the largest margin, with backtracking. Once the image in the
//! original coordinates is shorter than half the tolerance, the best pair of
//! node endpoints is emitted.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::float::Round;
use rug::Float;
use serde::Serialize;

use super::node::{Family, Subdivider, SubdivisionNode};
use crate::enclosure::{Enclosure, Interval, Real};
use crate::error::{Result, ZstarError};
use crate::index::{Composition, Tail, TailedIndex};
use crate::values::{eval_with_const_tail, EvalConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Operation {
    Sum,
    Product,
    Difference,
    Quotient,
}

impl Operation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Operation::Sum => "+",
            Operation::Product => "*",
            Operation::Difference => "-",
            Operation::Quotient => "/",
        }
    }

    fn logarithmic(&self) -> bool {
        matches!(self, Operation::Product | Operation::Quotient)
    }

    fn subtracts(&self) -> bool {
        matches!(self, Operation::Difference | Operation::Quotient)
    }

    pub fn apply(&self, a: &Enclosure, b: &Enclosure) -> Enclosure {
        match self {
            Operation::Sum => a.add(b),
            Operation::Product => a.mul(b),
            Operation::Difference => a.sub(b),
            Operation::Quotient => a.div(b),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Operation::Sum => "sum",
            Operation::Product => "product",
            Operation::Difference => "difference",
            Operation::Quotient => "quotient",
        };
        f.write_str(s)
    }
}

impl FromStr for Operation {
    type Err = ZstarError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sum" | "+" => Operation::Sum,
            "product" | "*" => Operation::Product,
            "difference" | "-" => Operation::Difference,
            "quotient" | "/" => Operation::Quotient,
            _ => return Err(ZstarError::Parse(format!("unknown operation '{s}'"))),
        })
    }
}

/// `v1 op v2` with both operands in `eta(D_q)`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCertificate {
    pub op: Operation,
    pub family: Family,
    pub left: TailedIndex,
    pub right: TailedIndex,
    pub left_value: Enclosure,
    pub right_value: Enclosure,
    pub combined: Enclosure,
    pub target: Enclosure,
    #[serde(skip)]
    pub target_real: Real,
    /// Upper bound on `|combined - target|`.
    pub residual_bound: f64,
    pub tolerance: f64,
    /// Window cap `R`, or 0 when no search was needed.
    pub cap: u32,
    pub steps: usize,
    pub precision: u32,
}

/// Upper bound of `|a - x|`, rounded up to `f64`.
fn distance_up(a: &Enclosure, x: &Real) -> f64 {
    let d = match x {
        Real::Exact(q) => a.distance_up(q),
        Real::Approx(e) => a.to_interval().sub(&e.to_interval()).mag_up(),
    };
    d.to_f64_round(Round::Up)
}

impl DecompositionCertificate {
    /// Re-evaluates both operands at twice the precision and checks that the
    /// target stays within `residual_bound`.
    pub fn validate(&self) -> Result<bool> {
        let cfg = EvalConfig::engine(2 * self.precision);
        let a = eval_with_const_tail(&self.left, &cfg)?;
        let b = eval_with_const_tail(&self.right, &cfg)?;
        let c = self.op.apply(&a, &b);
        let within = |t: &TailedIndex| {
            let q = self.family.param();
            t.prefix.parts().iter().all(|&d| d <= q) && matches!(t.tail, Tail::ConstTail(d) if d == 1 || d == q)
        };
        Ok(within(&self.left)
            && within(&self.right)
            && distance_up(&c, &self.target_real) <= self.residual_bound
            && self.residual_bound <= self.tolerance)
    }
}

struct Pair {
    c: Box<ENode>,
    d: Box<ENode>,
    margin: Float,
}

#[derive(Clone)]
struct ENode {
    node: SubdivisionNode,
    lo: Interval,
    hi: Interval,
}

impl ENode {
    fn width(&self) -> f64 {
        Float::with_val(53, self.hi.hi() - self.lo.lo()).to_f64()
    }

    fn key(&self) -> Vec<u32> {
        let mut k = self.node.prefix.clone();
        k.push(self.node.type_i);
        k
    }
}

struct Engine {
    op: Operation,
    q: u32,
    s: Subdivider,
    prec: u32,
}

impl Engine {
    fn wrap(&self, node: SubdivisionNode) -> ENode {
        let (lo, hi) = (node.low.to_interval(), node.high.to_interval());
        let (lo, hi) = if self.op.logarithmic() {
            (lo.ln(), hi.ln())
        } else {
            (lo, hi)
        };
        ENode { node, lo, hi }
    }

    /// Image of the pair in transformed coordinates.
    fn image(&self, c: &ENode, d: &ENode) -> (Interval, Interval) {
        if self.op.subtracts() {
            (c.lo.sub(&d.hi), c.hi.sub(&d.lo))
        } else {
            (c.lo.add(&d.lo), c.hi.add(&d.hi))
        }
    }

    /// Lower bound of the distance from `y` to the image boundary; positive
    /// means certain containment.
    fn margin(&self, c: &ENode, d: &ENode, y: &Interval) -> Float {
        let (lo, hi) = self.image(c, d);
        let below = Float::with_val_round(self.prec, y.lo() - lo.hi(), Round::Down).0;
        let above = Float::with_val_round(self.prec, hi.lo() - y.hi(), Round::Down).0;
        below.min(&above)
    }

    /// Width of the image in the original coordinates.
    fn original_width(&self, c: &ENode, d: &ENode) -> f64 {
        let (cn, dn) = (&c.node, &d.node);
        let (lo, hi) = if self.op.subtracts() {
            (self.op.apply(&cn.low, &dn.high), self.op.apply(&cn.high, &dn.low))
        } else {
            (self.op.apply(&cn.low, &dn.low), self.op.apply(&cn.high, &dn.high))
        };
        hi.sub(&lo).upper().to_f64_round(Round::Up)
    }

    fn children(&self, n: &ENode) -> Result<[ENode; 2]> {
        let sd = self.s.subdivide(&n.node)?;
        Ok([self.wrap(sd.lower), self.wrap(sd.upper)])
    }

    /// Certified child pairs, best last.
    fn candidates(&self, c: &ENode, d: &ENode, y: &Interval) -> Result<Vec<Pair>> {
        let split_c = c.width() >= d.width();
        let (cs, ds) = (self.children(c)?, self.children(d)?);
        let tiers: [Vec<(&ENode, &ENode)>; 3] = {
            let long: Vec<(&ENode, &ENode)> = if split_c {
                cs.iter().map(|x| (x, d)).collect()
            } else {
                ds.iter().map(|x| (c, x)).collect()
            };
            let both = cs.iter().flat_map(|x| ds.iter().map(move |z| (x, z))).collect();
            let short: Vec<(&ENode, &ENode)> = if split_c {
                ds.iter().map(|x| (c, x)).collect()
            } else {
                cs.iter().map(|x| (x, d)).collect()
            };
            [long, both, short]
        };
        let mut out: Vec<Pair> = vec![];
        // tiers are pushed in reverse so that the preferred ones pop first
        for tier in tiers.iter().rev() {
            let mut t: Vec<Pair> = tier
                .iter()
                .filter_map(|(a, b)| {
                    let m = self.margin(a, b, y);
                    (m > 0).then(|| Pair {
                        c: Box::new((*a).clone()),
                        d: Box::new((*b).clone()),
                        margin: m,
                    })
                })
                .collect();
            t.sort_by(
                |a, b| match a.margin.partial_cmp(&b.margin).unwrap_or(Ordering::Equal) {
                    Ordering::Equal => b.c.key().cmp(&a.c.key()),
                    o => o,
                },
            );
            out.extend(t);
        }
        Ok(out)
    }

    fn certificate(
        &self,
        c: &ENode,
        d: &ENode,
        x: &Real,
        tol: f64,
        cap: u32,
        steps: usize,
    ) -> Result<DecompositionCertificate> {
        let ends = |n: &SubdivisionNode| -> Result<[(TailedIndex, Enclosure); 2]> {
            let lo = n
                .low_element()
                .ok_or_else(|| ZstarError::InvalidNode(format!("{n} has no bottom element")))?;
            let hi = n
                .high_element()
                .ok_or_else(|| ZstarError::InvalidNode(format!("{n} is unbounded")))?;
            Ok([(lo, n.low.clone()), (hi, n.high.clone())])
        };
        let mut best: Option<(f64, DecompositionCertificate)> = None;
        for (l, lv) in ends(&c.node)? {
            for (r, rv) in ends(&d.node)? {
                let combined = self.op.apply(&lv, &rv);
                let dist = distance_up(&combined, x);
                if best.as_ref().map_or(true, |(b, _)| dist < *b) {
                    best = Some((dist, self.make(l.clone(), r, lv.clone(), rv, x, tol, cap, steps)));
                }
            }
        }
        Ok(best.unwrap().1)
    }

    #[allow(clippy::too_many_arguments)]
    fn make(
        &self,
        left: TailedIndex,
        right: TailedIndex,
        lv: Enclosure,
        rv: Enclosure,
        x: &Real,
        tol: f64,
        cap: u32,
        steps: usize,
    ) -> DecompositionCertificate {
        let combined = self.op.apply(&lv, &rv);
        let slack = Float::with_val(53, combined.rad() * 2u32).to_f64_round(Round::Up);
        let residual_bound = distance_up(&combined, x) + slack;
        DecompositionCertificate {
            op: self.op,
            family: Family::EtaDq(self.q),
            left,
            right,
            left_value: lv,
            right_value: rv,
            combined,
            target: x.enclosure(self.prec),
            target_real: x.clone(),
            residual_bound,
            tolerance: tol,
            cap,
            steps,
            precision: self.prec,
        }
    }

    /// `({q}^inf, {q}^inf)`.
    fn bottom_pair(&self, x: &Real, tol: f64) -> Result<DecompositionCertificate> {
        let t = TailedIndex {
            prefix: Composition::new(vec![self.q])?,
            tail: Tail::ConstTail(self.q),
        };
        let v = self.s.evaluator().value(&[], Tail::ConstTail(self.q))?;
        Ok(self.make(t.clone(), t, v.clone(), v, x, tol, 0, 0))
    }

    fn cap_value(&self, r: u32) -> Result<Enclosure> {
        let mut v = vec![2];
        v.extend(std::iter::repeat(1).take(r as usize));
        self.s.evaluator().value(&v, Tail::NoTail)
    }

    /// Smallest cap whose range covers `x` with room to spare.
    fn choose_cap(&self, x: &Enclosure, bottom: &Enclosure) -> Result<u32> {
        let prec = self.prec;
        let one = Enclosure::from_u64(prec, 1);
        let two = Enclosure::from_u64(prec, 2);
        let xa = if x.lower() < 0 { x.neg() } else { x.clone() };
        for r in 1..=4096 {
            let h = self.cap_value(r)?;
            let ok = match self.op {
                Operation::Sum => h.mul(&two).certainly_gt(&x.add(&one)),
                Operation::Product => h.mul(&h).certainly_gt(&x.mul(&two)),
                Operation::Difference => h.sub(bottom).certainly_gt(&xa.add(&one)),
                Operation::Quotient => {
                    let ratio = h.div(bottom);
                    ratio.certainly_gt(&x.mul(&two)) && ratio.certainly_gt(&two.div(x))
                }
            };
            if ok {
                return Ok(r);
            }
        }
        Err(ZstarError::OutOfRange("target too large for the window search".into()))
    }

    fn run(&self, x: &Real, tol: f64, max_steps: usize) -> Result<DecompositionCertificate> {
        let prec = self.prec;
        let xe = x.enclosure(prec);
        let bottom = self.s.evaluator().value(&[], Tail::ConstTail(self.q))?;
        let half = tol / 2.0;
        let near = |e: &Enclosure| distance_up(e, x) <= half;

        match self.op {
            Operation::Sum | Operation::Product => {
                let least = self.op.apply(&bottom, &bottom);
                if xe.certainly_lt(&least) && !near(&least) {
                    return Err(ZstarError::BelowRange(format!("{x} is below the least value {least}")));
                }
                if near(&least) {
                    return self.bottom_pair(x, tol);
                }
            }
            Operation::Difference => {
                if near(&Enclosure::from_u64(prec, 0)) {
                    return self.bottom_pair(x, tol);
                }
            }
            Operation::Quotient => {
                if !xe.certainly_gt(&Enclosure::from_u64(prec, 0)) {
                    return Err(ZstarError::OutOfDomain(format!("quotient target {x} must be positive")));
                }
                if near(&Enclosure::from_u64(prec, 1)) {
                    return self.bottom_pair(x, tol);
                }
            }
        }

        // rounding alone is of order |x| 2^-prec; leave some headroom
        let floor = xe.to_f64().abs().max(1.0) * 2f64.powi(12 - prec as i32);
        if tol <= floor {
            return Err(ZstarError::PrecisionInsufficient(format!(
                "tolerance {tol:e} is below the resolution {floor:.1e} of {prec}-bit arithmetic at {x}"
            )));
        }
        let cap = self.choose_cap(&xe, &bottom)?;
        let y = if self.op.logarithmic() {
            xe.to_interval().ln()
        } else {
            xe.to_interval()
        };
        let root = self.wrap(self.s.capped_root(cap)?);
        if self.margin(&root, &root, &y) <= 0 {
            return Err(ZstarError::PrecisionInsufficient(format!(
                "{x} is not inside the window image"
            )));
        }

        let mut stack: Vec<Vec<Pair>> = vec![vec![Pair {
            c: Box::new(root.clone()),
            d: Box::new(root),
            margin: Float::new(prec),
        }]];
        let mut steps = 0usize;
        while let Some(frame) = stack.last_mut() {
            let Some(p) = frame.pop() else {
                stack.pop();
                continue;
            };
            steps += 1;
            if steps > max_steps {
                break;
            }
            if self.original_width(&p.c, &p.d) <= half {
                let cert = self.certificate(&p.c, &p.d, x, tol, cap, steps)?;
                if cert.residual_bound <= tol {
                    return Ok(cert);
                }
                // radii that eat half the budget do not shrink by splitting
                if Float::with_val(53, cert.combined.rad() * 2u32).to_f64() >= half {
                    return Err(ZstarError::PrecisionInsufficient(format!(
                        "enclosure radii exceed the tolerance {tol:e} at {prec} bits"
                    )));
                }
            }
            let next = self.candidates(&p.c, &p.d, &y)?;
            stack.push(next);
        }
        Err(ZstarError::PrecisionInsufficient(format!(
            "no certified child pair for {x} at {prec} bits"
        )))
    }
}

/// Decomposes `x` as `v1 op v2` with `|v1 op v2 - x| <= tolerance`.
pub fn decompose(op: Operation, x: &Real, q: u32, tolerance: f64, precision: u32) -> Result<DecompositionCertificate> {
    if q < 2 {
        return Err(ZstarError::InvalidNode("q must be at least 2".into()));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(ZstarError::OutOfRange("tolerance must be positive".into()));
    }
    let engine = Engine {
        op,
        q,
        s: Subdivider::new(Family::EtaDq(q), precision)?,
        prec: precision,
    };
    engine.run(x, tolerance, 50_000)
}

pub fn decompose_sum(x: &Real, q: u32, tolerance: f64, precision: u32) -> Result<DecompositionCertificate> {
    decompose(Operation::Sum, x, q, tolerance, precision)
}

pub fn decompose_product(x: &Real, q: u32, tolerance: f64, precision: u32) -> Result<DecompositionCertificate> {
    decompose(Operation::Product, x, q, tolerance, precision)
}

pub fn decompose_difference(x: &Real, q: u32, tolerance: f64, precision: u32) -> Result<DecompositionCertificate> {
    decompose(Operation::Difference, x, q, tolerance, precision)
}

pub fn decompose_quotient(x: &Real, q: u32, tolerance: f64, precision: u32) -> Result<DecompositionCertificate> {
    decompose(Operation::Quotient, x, q, tolerance, precision)
}
