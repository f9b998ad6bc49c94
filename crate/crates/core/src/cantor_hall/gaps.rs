//! First-stage gaps of the closure of `eta(T_p)` under `+`, `*`, `-`, `/`.
//!
//! The first subdivision of `[1, zeta*({p}^inf)]` keeps
//! `U1 = [1, zeta*(p+1, {p}^inf)]` and `U2 = [zeta*(p), zeta*({p}^inf)]`
//! (using `zeta*(p+1, {1}^inf) = zeta*(p)`). Any point of `A op A` lies in
//! one of `Ua op Ub`, so an uncovered stretch between these pieces is a gap
//! of the full set.

use serde::Serialize;

use super::decompose::Operation;
use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};
use crate::index::Tail;
use crate::values::{EvalConfig, Evaluator};

#[derive(Clone, Debug, Serialize)]
pub struct StageInterval {
    pub label: String,
    pub low: Enclosure,
    pub high: Enclosure,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpGaps {
    pub op: Operation,
    pub pieces: Vec<StageInterval>,
    /// Certified open gaps `(low, high)` inside the hull of the pieces.
    pub gaps: Vec<(Enclosure, Enclosure)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub p: u32,
    pub u1: (Enclosure, Enclosure),
    pub u2: (Enclosure, Enclosure),
    pub ops: Vec<OpGaps>,
    pub containment_note: String,
}

impl GapReport {
    pub fn op(&self, op: Operation) -> &OpGaps {
        self.ops
            .iter()
            .find(|o| o.op == op)
            .expect("all four operations are reported")
    }
}

fn apply(op: Operation, a: (&Enclosure, &Enclosure), b: (&Enclosure, &Enclosure)) -> (Enclosure, Enclosure) {
    // all values are >= 1, so the extremes sit at the corners
    match op {
        Operation::Sum => (a.0.add(b.0), a.1.add(b.1)),
        Operation::Product => (a.0.mul(b.0), a.1.mul(b.1)),
        Operation::Difference => (a.0.sub(b.1), a.1.sub(b.0)),
        Operation::Quotient => (a.0.div(b.1), a.1.div(b.0)),
    }
}

/// Gaps between consecutive pieces, each certified by a separation of at
/// least twice the combined radii.
fn sweep(mut pieces: Vec<StageInterval>) -> (Vec<StageInterval>, Vec<(Enclosure, Enclosure)>) {
    pieces.sort_by(|a, b| a.low.mid().partial_cmp(b.low.mid()).unwrap());
    let mut gaps = vec![];
    let mut reach = pieces[0].high.clone();
    for s in &pieces[1..] {
        let sep = s.low.sub(&reach);
        let radii = rug::Float::with_val(64, s.low.rad() + reach.rad()) * 2u32;
        if *sep.mid() >= radii && sep.lower() > 0 {
            gaps.push((reach.clone(), s.low.clone()));
        }
        if s.high.mid() > reach.mid() {
            reach = s.high.clone();
        }
    }
    (pieces, gaps)
}

/// First-stage pieces and certified gaps for all four operations.
pub fn theorem12_gaps(p: u32, precision: u32) -> Result<GapReport> {
    if p < 2 {
        return Err(ZstarError::InvalidIndex("p must be at least 2".into()));
    }
    let ev = Evaluator::new(EvalConfig::engine(precision));
    let one = Enclosure::from_u64(precision, 1);
    let a = ev.value(&[p + 1], Tail::ConstTail(p))?;
    let b = ev.value(&[p], Tail::NoTail)?;
    let c = ev.value(&[], Tail::ConstTail(p))?;
    if !a.certainly_lt(&b) || !b.certainly_lt(&c) {
        return Err(ZstarError::PrecisionInsufficient(
            "first-stage endpoints are not separated".into(),
        ));
    }
    let u = [(one, a), (b, c)];
    let mut ops = vec![];
    for op in [
        Operation::Sum,
        Operation::Product,
        Operation::Difference,
        Operation::Quotient,
    ] {
        let mut pieces = vec![];
        for (i, x) in u.iter().enumerate() {
            for (j, y) in u.iter().enumerate() {
                let commutative = matches!(op, Operation::Sum | Operation::Product);
                if commutative && j < i {
                    continue;
                }
                let (lo, hi) = apply(op, (&x.0, &x.1), (&y.0, &y.1));
                pieces.push(StageInterval {
                    label: format!("U{} {} U{}", i + 1, op.symbol(), j + 1),
                    low: lo,
                    high: hi,
                });
            }
        }
        let (pieces, gaps) = sweep(pieces);
        ops.push(OpGaps { op, pieces, gaps });
    }
    let note = if p == 2 {
        "closure(eta(T_p)) lies in [1, 2] for every p >= 2".to_string()
    } else {
        format!(
            "closure(eta(T_{p})) is contained in closure(eta(T_2)) and in [1, {:.6}]",
            u[1].1.to_f64()
        )
    };
    Ok(GapReport {
        p,
        u1: u[0].clone(),
        u2: u[1].clone(),
        ops,
        containment_note: note,
    })
}
