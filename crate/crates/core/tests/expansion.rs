use rug::{Float, Rational};
use zstar_core::{expand, subtree_bounds, Enclosure, ExpandOptions, ExpansionStatus, Interval, Real};

fn opts() -> ExpandOptions {
    ExpandOptions::default()
}

fn zeta(s: u32) -> Float {
    Float::with_val(256, Float::zeta_u(s))
}

#[test]
fn two_is_all_twos() {
    let r = expand(&Real::Exact(Rational::from(2)), 5, opts()).unwrap();
    assert_eq!(r.digits, [2, 2, 2, 2, 2]);
    assert_eq!(r.status, ExpansionStatus::Exact(2));
}

#[test]
fn zeta_two_lands_in_three_subtree() {
    // an enclosure straddling zeta(2) cannot be separated from the boundary,
    // and the closed-top convention assigns it to the (3, ...) subtree
    let lo = Float::with_val_round(128, Float::zeta_u(2), rug::float::Round::Down).0;
    let hi = Float::with_val_round(128, Float::zeta_u(2), rug::float::Round::Up).0;
    let z = Enclosure::from_interval(&Interval::new(lo, hi));
    let r = expand(&Real::Approx(z), 4, opts()).unwrap();
    assert_eq!(r.digits, [3, 1, 1, 1]);
    assert!(matches!(r.status, ExpansionStatus::BoundaryAmbiguous(0)));
    // a point just above zeta(2) opens the (2, ...) subtree with a huge digit
    let above = Float::with_val(256, zeta(2)) + Float::with_val(53, Float::i_exp(1, -200));
    let r = expand(&Real::Approx(Enclosure::exact(above)), 2, opts()).unwrap();
    assert_eq!(r.digits[0], 2);
    assert!(r.digits[1] > 100);
}

#[test]
fn three_halves_first_digit() {
    let r = expand(&Real::Exact(Rational::from((3, 2))), 1, opts()).unwrap();
    assert_eq!(r.digits, [3]);
}

#[test]
fn top_level_intervals() {
    let (lo, hi) = subtree_bounds(&[], 3, 128).unwrap();
    assert!(lo.contains(&zeta(3)) && hi.contains(&zeta(2)));
    let (lo, hi) = subtree_bounds(&[], 2, 128).unwrap();
    assert!(lo.contains(&zeta(2)) && hi.is_infinite());
    // zeta*(3,1) = pi^4/72; the top is zeta*(3,1,{1}^inf) = zeta(2)
    let (lo, hi) = subtree_bounds(&[3], 1, 128).unwrap();
    let pi = Float::with_val(256, rug::float::Constant::Pi);
    assert!(lo.contains(&(Float::with_val(256, pi.square_ref()).square() / 72u32)));
    assert!(hi.contains(&zeta(2)));
}

#[test]
fn below_one_is_rejected() {
    assert!(expand(&Real::Exact(Rational::from((1, 2))), 3, opts()).is_err());
    assert!(expand(&Real::Exact(Rational::from(1)), 3, opts()).is_err());
}

#[test]
fn digits_decrease_as_x_grows() {
    let mut prev = u32::MAX;
    for i in 0..60 {
        let x = Rational::from((101 + 7 * i, 100));
        let d = expand(&Real::Exact(x), 1, opts()).unwrap().digits[0];
        assert!(d <= prev);
        prev = d;
    }
}

#[test]
fn residual_is_enclosed_by_subtree() {
    let x = Rational::from((314, 100));
    let r = expand(&Real::Exact(x.clone()), 12, opts()).unwrap();
    assert_eq!(r.status, ExpansionStatus::Truncated);
    let xf = Float::with_val(200, &x);
    assert!(r.low.lower() <= xf && xf <= r.high.upper());
}
