use rug::{Float, Rational};
use zstar_core::{
    canonical_form, eval_finite, eval_parts, eval_with_const_tail, index_compare, make_composition, tail_factor,
    tail_factor_limit, Enclosure, EvalConfig, Tail, TailedIndex, ZstarError,
};

fn cfg() -> EvalConfig {
    EvalConfig::engine(128)
}

fn zeta(s: u32) -> Float {
    Float::with_val(256, Float::zeta_u(s))
}

fn close(e: &Enclosure, oracle: f64, tol: f64) -> bool {
    (e.to_f64() - oracle).abs() <= tol && e.rad().to_f64() <= tol
}

fn contains(e: &Enclosure, x: &Float) -> bool {
    e.contains(x)
}

#[test]
fn composition_validation() {
    assert_eq!(make_composition(&[2]).unwrap().parts(), &[2]);
    assert_eq!(make_composition(&[3, 1, 2]).unwrap().parts(), &[3, 1, 2]);
    assert!(matches!(make_composition(&[1, 2]), Err(ZstarError::InvalidIndex(_))));
    assert!(make_composition(&[]).is_err());
}

#[test]
fn index_order_rules() {
    let c = |v: &[u32]| make_composition(v).unwrap();
    use std::cmp::Ordering::Greater;
    assert_eq!(index_compare(&c(&[2, 1]), &c(&[2])), Greater);
    assert_eq!(index_compare(&c(&[2, 1]), &c(&[3])), Greater);
    assert_eq!(index_compare(&c(&[2, 1, 5]), &c(&[2, 2])), Greater);
}

#[test]
fn tail_factor_examples() {
    assert_eq!(tail_factor(1, 5), 1);
    assert_eq!(tail_factor(3, 2), Rational::from((3, 2)));
    // (8/7)(27/26)(64/63), multiplied out independently
    let direct = Rational::from((8, 7)) * Rational::from((27, 26)) * Rational::from((64, 63));
    assert_eq!(direct, Rational::from((768, 637)));
    assert_eq!(tail_factor(4, 3), direct);
    // closed form 2m/(m+1) at q = 2
    for m in 1..60u64 {
        assert_eq!(tail_factor(m, 2), Rational::from((2 * m, m + 1)));
    }
}

#[test]
fn tail_factor_limits() {
    let two = tail_factor_limit(2, &cfg()).unwrap();
    assert!(contains(&two, &Float::with_val(64, 2)));
    // brute-force product to 2e5; the neglected factor is below exp(1/(2 N^2))
    let mut p = 1f64;
    for n in 2..200_000u64 {
        p /= 1.0 - (n as f64).powi(-3);
    }
    let three = tail_factor_limit(3, &cfg()).unwrap();
    assert!(close(&three, p, 1e-9), "{three} vs {p}");
    // prod_{n>=2} (1 - n^-3) = cosh(sqrt(3) pi / 2) / (3 pi)
    let pi = Float::with_val(256, rug::float::Constant::Pi);
    let closed = Float::with_val(256, &pi * 3u32) / (Float::with_val(256, 3).sqrt() * &pi / 2u32).cosh();
    assert!(contains(&three, &closed));
    assert!((three.to_f64() - 1.2354883).abs() < 1e-7);
    let ten = tail_factor_limit(10, &cfg()).unwrap();
    assert!((ten.to_f64() - (1.0 + 2f64.powi(-10))).abs() < 1e-3);
    assert!(matches!(
        tail_factor_limit(1, &cfg()),
        Err(ZstarError::DivergentValue(_))
    ));
}

#[test]
fn finite_values() {
    let v = |d: &[u32]| eval_finite(&make_composition(d).unwrap(), &cfg());
    assert!(contains(&v(&[2]), &zeta(2)));
    assert!(contains(&v(&[2, 1]), &(zeta(3) * 2u32)));
    assert!(contains(&v(&[2, 1, 1]), &(zeta(4) * 3u32)));
    assert!((v(&[2, 1, 1]).to_f64() - 3.2469697010).abs() < 1e-9);
}

#[test]
fn zeta_star_three_one_is_euler_sum() {
    // sum_{n >= m} 1/(n^3 m) = sum_n H_n / n^3 = pi^4/72 (Euler)
    let pi = Float::with_val(256, rug::float::Constant::Pi);
    let euler = Float::with_val(256, pi.square_ref()).square() / 72u32;
    let v = eval_finite(&make_composition(&[3, 1]).unwrap(), &cfg());
    assert!(contains(&v, &euler));
    // brute-force partial sum; the tail beyond N is about ln N / (2 N^2)
    let n_max = 20_000u32;
    let (mut h, mut s) = (0f64, 0f64);
    for n in 1..=n_max {
        h += 1.0 / n as f64;
        s += h / (n as f64).powi(3);
    }
    assert!((v.to_f64() - s).abs() < 1e-7);
}

#[test]
fn const_tail_values() {
    let t = |p: &[u32], q| TailedIndex::with_tail(make_composition(p).unwrap(), q).unwrap();
    let two = eval_with_const_tail(&t(&[2], 2), &cfg()).unwrap();
    assert!(contains(&two, &Float::with_val(64, 2)));
    let v = eval_with_const_tail(&t(&[3], 2), &cfg()).unwrap();
    assert!(contains(&v, &(zeta(2) * 2u32 - 2u32)));
    let u = eval_with_const_tail(&t(&[3], 1), &cfg()).unwrap();
    assert!(contains(&u, &zeta(2)));
    assert!(matches!(
        eval_with_const_tail(&t(&[2], 1), &cfg()),
        Err(ZstarError::DivergentValue(_))
    ));
    for k in 3..=6 {
        let w = eval_with_const_tail(&t(&[k], 1), &cfg()).unwrap();
        assert!(contains(&w, &zeta(k - 1)), "k={k}");
    }
}

#[test]
fn const_tail_brute_force() {
    // zeta*(3, {2}^inf) = sum_n F_n(2) / n^3 = sum_n 2/(n^2 (n+1))
    let mut s = 0f64;
    for n in 1..200_000u64 {
        let n = n as f64;
        s += 2.0 / (n * n * (n + 1.0));
    }
    let v = eval_parts(&[3], Tail::ConstTail(2), &cfg()).unwrap();
    assert!((v.to_f64() - s).abs() < 1e-9);
}

#[test]
fn canonical_forms() {
    let t = |p: &[u32], q| TailedIndex::with_tail(make_composition(p).unwrap(), q).unwrap();
    let a = canonical_form(&t(&[3, 1], 1)).unwrap();
    assert_eq!(a, canonical_form(&t(&[3], 1)).unwrap());
    let va = eval_with_const_tail(&t(&[3, 1], 1), &cfg()).unwrap();
    let vb = eval_with_const_tail(&t(&[3], 1), &cfg()).unwrap();
    assert!(va.overlaps(&vb));
    assert!(canonical_form(&t(&[2], 1)).is_err());
}

#[test]
fn divergent_as_infinite_enclosure() {
    let v = zstar_core::eval_extended(
        &TailedIndex::with_tail(make_composition(&[2, 1]).unwrap(), 1).unwrap(),
        &cfg(),
    );
    assert!(v.is_infinite());
}

#[test]
fn truncation_levels_agree() {
    let a = eval_finite(&make_composition(&[2, 3, 1]).unwrap(), &EvalConfig::new(128, 64));
    let b = eval_finite(&make_composition(&[2, 3, 1]).unwrap(), &EvalConfig::new(128, 100_000));
    assert!(a.overlaps(&b));
}
