use rug::ops::Pow;
use rug::{Float, Integer};
use zstar_core::explorer::*;

#[test]
fn alpha_roots() {
    let phi = (Float::with_val(200, 5).sqrt() + 1u32) / 2u32;
    assert!(alpha_root(2, 128).unwrap().contains(&phi));
    assert!((alpha_root(3, 128).unwrap().to_f64() - 1.4655712319).abs() < 1e-10);
    let mut prev = 2.0;
    for p in 2..=10 {
        let a = alpha_root(p, 128).unwrap();
        // |a^(p-1)(a-1) - 1| is tiny at the midpoint
        let m = Float::with_val(256, a.mid());
        let f = Float::with_val(256, (&m).pow(p - 1)) * (m - 1u32) - 1u32;
        assert!(f.abs() < Float::with_val(64, Float::i_exp(1, -124)), "p={p}");
        assert!(a.to_f64() < prev && a.to_f64() > 1.0);
        prev = a.to_f64();
    }
    assert!(alpha_root(1, 128).is_err());
}

#[test]
fn dimensions() {
    let d2 = dimension_formula(2, 40, 128).unwrap();
    assert!((d2.dim.to_f64() - 0.6942419136).abs() < 1e-10);
    let d3 = dimension_formula(3, 60, 128).unwrap();
    assert!((d3.dim.to_f64() - 0.5515).abs() < 1e-4);
    assert!(d3.dim.to_f64() > 0.0 && d3.dim.to_f64() < 1.0);
}

#[test]
fn box_counts_match_enumeration() {
    for p in 2..=4 {
        let a = box_count_sequence(p, 20).unwrap();
        for n in 0..=20 {
            assert_eq!(a[n as usize], Integer::from(enumerate_box_count(p, n)), "p={p} n={n}");
        }
    }
    // Fibonacci for p = 2
    assert_eq!(box_count(2, 40).unwrap().count, Integer::from(267_914_296u64));
}

#[test]
fn covering_decreases() {
    for q in [2, 3] {
        let mut prev = f64::INFINITY;
        for d in 1..=5 {
            let c = covering_length(q, d, 3, 128).unwrap();
            let l = c.length.to_f64();
            assert!(l > 0.0 && l < prev, "q={q} d={d}");
            prev = l;
        }
    }
}

#[test]
fn algebraic_search_reports_without_membership() {
    let rep = search_algebraic(SearchOptions {
        max_degree: 2,
        max_height: 3,
        expand_depth: 8,
        precision: 128,
    })
    .unwrap();
    let three = rep.candidates.iter().find(|c| c.exact.as_deref() == Some("3")).unwrap();
    assert!(matches!(
        three.classification,
        Classification::SurvivorToDepth(_) | Classification::EliminatedAtDigit(_)
    ));
    let two = rep.candidates.iter().find(|c| c.exact.as_deref() == Some("2")).unwrap();
    assert_eq!(two.digits, [2; 8]);
    let root2 = rep.candidates.iter().find(|c| c.polynomial == [-2, 0, 1]).unwrap();
    assert_eq!(root2.digits[0], 3);
    assert_eq!(rep.eliminated + rep.survivors + rep.ambiguous, rep.candidates.len());
    // sorted by value
    assert!(rep
        .candidates
        .windows(2)
        .all(|w| w[0].value.to_f64() <= w[1].value.to_f64()));
    let json = serde_json::to_string(&rep).unwrap();
    assert!(!json.to_lowercase().contains("member"));
}
