//! Hall's gap condition: every gap is at most as long as the shorter child.

use rug::{Float, Rational};
use serde::Serialize;

use super::node::{Family, Subdivider, SubdivisionNode};
use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};

#[derive(Clone, Debug, Serialize)]
pub struct HallViolation {
    pub prefix: Vec<u32>,
    pub type_i: u32,
    pub gap: f64,
    pub min_child: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HallReport {
    pub family: Family,
    pub max_depth: u32,
    pub nodes_checked: usize,
    /// True when every checked subdivision satisfies the condition.
    pub holds: bool,
    /// Smallest `min_child - gap` over the checked nodes.
    pub worst_margin: f64,
    /// Largest `gap / min_child`.
    pub max_ratio: f64,
    /// `max_ratio` computed exactly, for the `tau` families.
    #[serde(skip)]
    pub exact_max_ratio: Option<Rational>,
    pub violations: Vec<HallViolation>,
}

enum Verdict {
    Holds,
    Fails,
}

fn certify(gap: &Enclosure, min_child: &Enclosure, node: &SubdivisionNode) -> Result<Verdict> {
    if min_child.is_infinite() || gap.certainly_lt(min_child) {
        return Ok(Verdict::Holds);
    }
    if gap.certainly_gt(min_child) {
        return Ok(Verdict::Fails);
    }
    Err(ZstarError::PrecisionInsufficient(format!(
        "gap and child length at {node} are not separated"
    )))
}

fn min_enc(a: Enclosure, b: Enclosure) -> Enclosure {
    if a.is_infinite() {
        b
    } else if b.is_infinite() || a.mid() <= b.mid() {
        a
    } else {
        b
    }
}

/// Checks every subdivision at depths `0..max_depth`.
///
/// Unbounded children count as infinitely long, so at the top of `eta(D_q)`
/// the test is against the finite child only.
pub fn check_hall_condition(family: Family, max_depth: u32, precision: u32) -> Result<HallReport> {
    let s = Subdivider::new(family, precision)?;
    let mut frontier = vec![s.root()?];
    let mut report = HallReport {
        family,
        max_depth,
        nodes_checked: 0,
        holds: true,
        worst_margin: f64::INFINITY,
        max_ratio: 0.0,
        exact_max_ratio: None,
        violations: vec![],
    };
    for _ in 0..max_depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for n in &frontier {
            let d = s.subdivide(n)?;
            report.nodes_checked += 1;
            let (margin, ratio, fails) = match (d.lower.exact_length(), d.upper.exact_length()) {
                (Some(a), Some(b)) => {
                    let gap = Rational::from(&d.upper.exact.as_ref().unwrap().0 - &d.lower.exact.as_ref().unwrap().1);
                    let m = if a < b { a } else { b };
                    let ratio = Rational::from(&gap / &m);
                    if report.exact_max_ratio.as_ref().map_or(true, |r| &ratio > r) {
                        report.exact_max_ratio = Some(ratio.clone());
                    }
                    let fails = gap > m;
                    (Rational::from(&m - &gap).to_f64(), ratio.to_f64(), fails)
                }
                _ => {
                    let gap = d.gap.1.sub(&d.gap.0);
                    let (mut margin, mut ratio, mut fails) = (f64::INFINITY, 0.0f64, false);
                    let mut undecided = None;
                    // F_m(2) = 2m/(m+1) makes one side an exact tie for D_2 and T_2
                    let tight = [family == Family::EtaDq(2), family == Family::EtaTpClosure(2)];
                    for (child, tight) in [(&d.lower, tight[0]), (&d.upper, tight[1])] {
                        let len = child.length();
                        if len.is_infinite() {
                            continue;
                        }
                        if tight && gap.overlaps(&len) {
                            margin = margin.min(0.0);
                            ratio = ratio.max(1.0);
                            continue;
                        }
                        match certify(&gap, &len, n) {
                            Ok(v) => fails |= matches!(v, Verdict::Fails),
                            Err(e) => undecided = Some(e),
                        }
                        margin = margin.min(len.sub(&gap).to_f64());
                        ratio = ratio.max(Float::with_val(53, gap.mid() / len.mid()).to_f64());
                    }
                    if let (Some(e), false) = (undecided, fails) {
                        return Err(e);
                    }
                    (margin, ratio, fails)
                }
            };
            report.worst_margin = report.worst_margin.min(margin);
            report.max_ratio = report.max_ratio.max(ratio);
            if fails {
                report.holds = false;
                report.violations.push(HallViolation {
                    prefix: n.prefix.clone(),
                    type_i: n.type_i,
                    gap: d.gap.1.sub(&d.gap.0).to_f64(),
                    min_child: min_enc(d.lower.length(), d.upper.length()).to_f64(),
                });
            }
            next.push(d.lower);
            next.push(d.upper);
        }
        frontier = next;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_two_is_exactly_critical() {
        let r = check_hall_condition(Family::TauBk(2), 6, 64).unwrap();
        assert!(r.holds);
        assert_eq!(r.exact_max_ratio, Some(Rational::from(1)));
        assert_eq!(r.worst_margin, 0.0);
        assert_eq!(r.nodes_checked, 63);
    }

    #[test]
    fn eta_d2_holds_and_closure_fails() {
        assert!(check_hall_condition(Family::EtaDq(2), 4, 128).unwrap().holds);
        let r = check_hall_condition(Family::EtaTpClosure(2), 2, 128).unwrap();
        assert!(!r.holds);
        assert!(r.violations.iter().any(|v| v.prefix.is_empty()));
    }
}
