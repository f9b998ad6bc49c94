//! Newhouse thickness of a depth-`d` truncation.
//!
//! Gaps are taken in order of decreasing length. The bridge on each side of
//! a gap `U` runs from `U` to the nearest gap at least as long as `U`, or to
//! the end of the hull. The thickness is the least `bridge / |U|`.

use rug::Rational;
use serde::Serialize;

use super::node::{Family, Subdivider};
use crate::enclosure::Enclosure;
use crate::error::{Result, ZstarError};

#[derive(Clone, Debug, Serialize)]
pub struct ThicknessReport {
    pub family: Family,
    pub depth: u32,
    pub gaps: usize,
    pub value: Enclosure,
    /// Exact value for the `tau` families.
    pub exact: Option<String>,
}

trait Length: Clone {
    fn minus(&self, o: &Self) -> Self;
    /// Ordering used to pick bridge ends; midpoints for enclosures.
    fn at_least(&self, o: &Self) -> bool;
    fn over(&self, o: &Self) -> Self;
    fn smaller(a: Self, b: Self) -> Self {
        if b.at_least(&a) {
            a
        } else {
            b
        }
    }
}

impl Length for Rational {
    fn minus(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn at_least(&self, o: &Self) -> bool {
        self >= o
    }
    fn over(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
}

impl Length for Enclosure {
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn at_least(&self, o: &Self) -> bool {
        self.mid() >= o.mid()
    }
    fn over(&self, o: &Self) -> Self {
        self.div(o)
    }
}

/// One side's bridge for each gap, using a stack of ever longer gaps.
fn bridges<T: Length>(gaps: &[(T, T)], lens: &[T], hull_end: &T, leftward: bool) -> Vec<T> {
    let n = gaps.len();
    let mut out: Vec<Option<T>> = vec![None; n];
    let mut stack: Vec<usize> = vec![];
    let order: Vec<usize> = if leftward {
        (0..n).collect()
    } else {
        (0..n).rev().collect()
    };
    for k in order {
        while let Some(&j) = stack.last() {
            if lens[j].at_least(&lens[k]) {
                break;
            }
            stack.pop();
        }
        let b = match (stack.last(), leftward) {
            (Some(&j), true) => gaps[k].0.minus(&gaps[j].1),
            (Some(&j), false) => gaps[j].0.minus(&gaps[k].1),
            (None, true) => gaps[k].0.minus(hull_end),
            (None, false) => hull_end.minus(&gaps[k].1),
        };
        out[k] = Some(b);
        stack.push(k);
    }
    out.into_iter().map(Option::unwrap).collect()
}

fn min_ratio<T: Length>(mut gaps: Vec<(T, T)>, hull: (T, T), sort_key: impl Fn(&T) -> f64) -> Option<T> {
    gaps.sort_by(|a, b| sort_key(&a.0).partial_cmp(&sort_key(&b.0)).unwrap());
    let lens: Vec<T> = gaps.iter().map(|(a, b)| b.minus(a)).collect();
    let left = bridges(&gaps, &lens, &hull.0, true);
    let right = bridges(&gaps, &lens, &hull.1, false);
    (0..gaps.len())
        .map(|k| T::smaller(left[k].over(&lens[k]), right[k].over(&lens[k])))
        .reduce(T::smaller)
}

/// Thickness of the nodes left after `depth` subdivision rounds.
pub fn thickness(family: Family, depth: u32, precision: u32) -> Result<ThicknessReport> {
    if !family.is_bounded() {
        return Err(ZstarError::UnboundedFamily(format!(
            "{family} is a half-line; thickness needs a bounded set"
        )));
    }
    let s = Subdivider::new(family, precision)?;
    let root = s.root()?;
    let mut frontier = vec![root.clone()];
    let mut exact_gaps: Vec<(Rational, Rational)> = vec![];
    let mut gaps: Vec<(Enclosure, Enclosure)> = vec![];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for n in &frontier {
            let d = s.subdivide(n)?;
            if let (Some(l), Some(u)) = (&d.lower.exact, &d.upper.exact) {
                exact_gaps.push((l.1.clone(), u.0.clone()));
            }
            gaps.push(d.gap.clone());
            next.push(d.lower);
            next.push(d.upper);
        }
        frontier = next;
    }
    let count = gaps.len();
    if count == 0 {
        return Err(ZstarError::InvalidNode("depth 0 has no gaps".into()));
    }
    let (value, exact) = match root.exact.clone() {
        Some(hull) => {
            let t = min_ratio(exact_gaps, hull, |r| r.to_f64()).unwrap();
            (Enclosure::from_rational(precision, &t), Some(t.to_string()))
        }
        None => {
            let t = min_ratio(gaps, (root.low.clone(), root.high.clone()), |e| e.to_f64()).unwrap();
            (t, None)
        }
    };
    Ok(ThicknessReport {
        family,
        depth,
        gaps: count,
        value,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_families_are_thick() {
        let r = thickness(Family::TauBk(2), 8, 64).unwrap();
        assert_eq!(r.gaps, 255);
        assert_eq!(r.exact.as_deref(), Some("1"));
        let r = thickness(Family::TauLpClosure(2), 10, 64).unwrap();
        assert!(r.value.lower() >= 1);
    }

    #[test]
    fn closure_of_t2_is_thin_and_dq_is_rejected() {
        let r = thickness(Family::EtaTpClosure(2), 4, 128).unwrap();
        assert!(r.value.upper() < 1);
        assert!(matches!(
            thickness(Family::EtaDq(2), 3, 64),
            Err(ZstarError::UnboundedFamily(_))
        ));
    }
}
