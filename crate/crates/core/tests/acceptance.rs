//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line reaches the terminal.
//! Pass criterion numbers as arguments to run a subset:
//! `cargo test --test acceptance -- 5 6`.
//!
//! Criterion 10 cannot pass as stated and is listed in `UNATTAINABLE`; the
//! process fails only if any other criterion fails, or if 10 stops failing
//! for the documented reason.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::{Float, Integer, Rational};

use zstar_core::binary_tau::{tau_decompose_sum, tau_value, DigitSeq, SeqTail};
use zstar_core::cantor_hall::{
    check_hall_condition, decompose, decompose_difference, decompose_product, decompose_quotient, decompose_sum,
    theorem12_gaps, thickness, verify_inequalities, Family, Operation,
};
use zstar_core::explorer::{alpha_root, box_count, dimension_formula};
use zstar_core::{
    eval_finite, eval_parts, eval_with_const_tail, expand, index_compare, make_composition, tail_factor,
    tail_factor_limit, Enclosure, EvalConfig, ExpandOptions, ExpansionStatus, Real, Tail, TailedIndex, ZstarError,
};

const PREC: u32 = 128;
const SEED: u64 = 0x005a_57a4;

const TOL_CLOSED_FORM: f64 = 5e-10;
const TOL_TAIL_VALUE: f64 = 1e-10;
const TOL_TAIL_LIMIT: f64 = 1e-12;
const MAX_TILING_RADIUS: f64 = 1e-8;
const TOL_DECOMPOSE: f64 = 1e-8;
const TAU_RESIDUAL_LOG2: u32 = 38;
const TOL_GAP_ENDPOINT: f64 = 1e-10;
const TOL_ALPHA: f64 = 1e-12;
const TOL_GROWTH_P2: f64 = 1e-3;
const TOL_GROWTH_P3: f64 = 5e-3;

/// `(criterion, reason)` for criteria that fail by construction.
const UNATTAINABLE: &[(usize, &str)] = &[(
    10,
    "F_1(q) is the empty product 1, so 2*F_1(q) = 2 = m+1 for every q; equality holds at m = 1 for all q = 2..6, not only q = 2",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn zeta(s: u32) -> Float {
    Float::with_val(256, Float::zeta_u(s))
}

/// `|mid - oracle| + rad`, rounded up.
fn error_bound(e: &Enclosure, oracle: &Float) -> f64 {
    let d = Float::with_val(256, e.mid() - oracle).abs() + e.rad();
    d.to_f64_round(rug::float::Round::Up)
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}

fn c1() -> Outcome {
    let cfg = EvalConfig::new(PREC, 1_000_000);
    let mut worst = 0f64;
    for r in 0..=6u32 {
        let mut idx = vec![2];
        idx.extend(std::iter::repeat(1).take(r as usize));
        let v = eval_finite(&make_composition(&idx).unwrap(), &cfg);
        let oracle = zeta(r + 2) * (r + 1);
        worst = worst.max(error_bound(&v, &oracle));
    }
    ok(
        worst <= TOL_CLOSED_FORM,
        format!("max |zeta*(2,1^r) - (r+1)zeta(r+2)| + rad = {worst:.2e}"),
    )
}

fn c2() -> Outcome {
    let cfg = EvalConfig::new(PREC, 1_000_000);
    let t = TailedIndex::with_tail(make_composition(&[3]).unwrap(), 2).unwrap();
    let v = eval_with_const_tail(&t, &cfg).unwrap();
    let e1 = error_bound(&v, &(zeta(2) * 2u32 - 2u32));
    let lim = tail_factor_limit(2, &cfg).unwrap();
    let e2 = error_bound(&lim, &Float::with_val(256, 2));
    ok(
        e1 <= TOL_TAIL_VALUE && e2 <= TOL_TAIL_LIMIT,
        format!("zeta*(3,{{2}}^inf) error {e1:.2e}, zeta*({{2}}^inf) error {e2:.2e}"),
    )
}

fn random_prefix(rng: &mut StdRng, max_digit: u32, len: usize) -> Vec<u32> {
    let mut p = vec![rng.gen_range(2..=max_digit)];
    p.extend((1..len).map(|_| rng.gen_range(1..=max_digit)));
    p
}

fn c3() -> Outcome {
    let cfg = EvalConfig::engine(PREC);
    let mut rng = StdRng::seed_from_u64(SEED + 3);
    let (mut bad, mut max_rad) = (0, 0f64);
    for _ in 0..50 {
        let len = rng.gen_range(1..=6);
        let p = random_prefix(&mut rng, 3, len);
        for k in 1..=4u32 {
            let mut a = p.clone();
            a.push(k + 1);
            let mut b = p.clone();
            b.push(k);
            let hi = eval_parts(&a, Tail::ConstTail(1), &cfg).unwrap();
            let lo = eval_parts(&b, Tail::NoTail, &cfg).unwrap();
            let rad = hi.rad().to_f64() + lo.rad().to_f64();
            let diff = Float::with_val(PREC + 8, hi.mid() - lo.mid()).abs().to_f64();
            max_rad = max_rad.max(hi.rad().to_f64()).max(lo.rad().to_f64());
            if diff > rad {
                bad += 1;
            }
        }
    }
    ok(
        bad == 0 && max_rad <= MAX_TILING_RADIUS,
        format!("200 pairs, {bad} mismatches, max radius {max_rad:.2e}"),
    )
}

fn c4() -> Outcome {
    let cfg = EvalConfig::engine(PREC);
    let opts = ExpandOptions {
        precision: PREC,
        ..ExpandOptions::default()
    };
    let mut rng = StdRng::seed_from_u64(SEED + 4);
    let (mut wrong, mut ambiguous) = (0, 0);
    for _ in 0..100 {
        let p = random_prefix(&mut rng, 3, 10);
        let q = rng.gen_range(2..=3);
        let v = eval_parts(&p, Tail::ConstTail(q), &cfg).unwrap();
        let r = expand(&Real::Approx(v), 10, opts).unwrap();
        if matches!(r.status, ExpansionStatus::BoundaryAmbiguous(_)) {
            ambiguous += 1;
        }
        if r.digits[..] != p[..] {
            wrong += 1;
        }
    }
    ok(
        wrong == 0 && ambiguous == 0,
        format!("100 indices in D_3, {wrong} wrong prefixes, {ambiguous} ambiguous"),
    )
}

fn c5() -> Outcome {
    let mut lines = vec![];
    let mut pass = true;
    for q in 2..=5 {
        let r = check_hall_condition(Family::EtaDq(q), 5, PREC).unwrap();
        pass &= r.holds && r.violations.is_empty();
        lines.push(format!("D{q}:{}", r.violations.len()));
    }
    for k in 2..=6 {
        let r = check_hall_condition(Family::TauBk(k), 8, PREC).unwrap();
        let ratio = r.exact_max_ratio.clone().expect("exact ratio for tau families");
        pass &= r.holds && r.violations.is_empty() && ratio <= 1;
        if k == 2 {
            pass &= ratio == 1;
        }
        lines.push(format!("B{k}:{} (max ratio {ratio})", r.violations.len()));
    }
    ok(pass, format!("violations {}", lines.join(", ")))
}

fn x_in(rng: &mut StdRng, lo: i64, hi: i64) -> Rational {
    rat(rng.gen_range(lo * 1000..=hi * 1000), 1000)
}

fn c6() -> Outcome {
    let four = decompose_sum(&Real::Exact(rat(4, 1)), 2, TOL_DECOMPOSE, PREC).unwrap();
    let bottom = TailedIndex::with_tail(make_composition(&[2]).unwrap(), 2).unwrap();
    let endpoint = four.left == bottom && four.right == bottom && four.residual_bound <= TOL_DECOMPOSE;
    let below = matches!(
        decompose_sum(&Real::Exact(rat(399, 100)), 2, TOL_DECOMPOSE, PREC),
        Err(ZstarError::BelowRange(_))
    );
    let mut rng = StdRng::seed_from_u64(SEED + 6);
    let mut failures = 0;
    for _ in 0..50 {
        let x = x_in(&mut rng, 4, 100);
        match decompose_sum(&Real::Exact(x), 2, TOL_DECOMPOSE, PREC) {
            Ok(c) if c.residual_bound <= TOL_DECOMPOSE => {}
            _ => failures += 1,
        }
    }
    ok(
        endpoint && below && failures == 0,
        format!("x=4 double {{2}}^inf: {endpoint}; 3.99 BelowRange: {below}; {failures}/50 random sums failed"),
    )
}

fn c7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 7);
    let mut failures = vec![];
    let mut check = |op: Operation, x: Rational| {
        let label = format!("{op} {x}");
        let r = match op {
            Operation::Product => decompose_product(&Real::Exact(x), 2, TOL_DECOMPOSE, PREC),
            Operation::Difference => decompose_difference(&Real::Exact(x), 2, TOL_DECOMPOSE, PREC),
            Operation::Quotient => decompose_quotient(&Real::Exact(x), 2, TOL_DECOMPOSE, PREC),
            Operation::Sum => decompose(op, &Real::Exact(x), 2, TOL_DECOMPOSE, PREC),
        };
        if !matches!(r.and_then(|c| c.validate()), Ok(true)) {
            failures.push(label);
        }
    };
    for _ in 0..20 {
        check(Operation::Product, x_in(&mut rng, 4, 50));
    }
    for x in [rat(-5, 1), rat(0, 1), rat(21, 2)] {
        check(Operation::Difference, x);
    }
    for x in [rat(1, 25), rat(1, 1), rat(73, 10)] {
        check(Operation::Quotient, x);
    }
    ok(failures.is_empty(), format!("26 certificates, failed: {failures:?}"))
}

fn c8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 8);
    let bound = Rational::from((1, Integer::from(1) << TAU_RESIDUAL_LOG2));
    let mut worst = Rational::new();
    let mut failures = 0;
    for i in 0..100 {
        let k = [2u32, 3, 4][i % 3];
        let lo = rat(2, (1 << k) - 1);
        let den: i64 = rng.gen_range(1..=10_000);
        let t = rat(rng.gen_range(0..=den), den);
        let x = &lo + Rational::from(2 - &lo) * t;
        match tau_decompose_sum(&x, k, 40) {
            Ok(c) if c.residual <= bound => {
                if c.residual > worst {
                    worst = c.residual;
                }
            }
            _ => failures += 1,
        }
    }
    ok(
        failures == 0,
        format!(
            "100 rationals, {failures} failures, worst residual {:.2e}",
            worst.to_f64()
        ),
    )
}

fn c9() -> Outcome {
    let r = theorem12_gaps(2, PREC).unwrap();
    let z2 = zeta(2);
    let sum = &r.op(Operation::Sum).gaps;
    let prod = &r.op(Operation::Product).gaps;
    let s_lo = Float::with_val(256, &z2 * 4u32) - 4u32;
    let s_hi = Float::with_val(256, &z2 + 1u32);
    let p_lo = Float::with_val(256, &z2 - 1u32) * 4u32;
    let p_hi = Float::with_val(256, z2.square_ref());
    let near = |g: &(Enclosure, Enclosure), lo: &Float, hi: &Float| error_bound(&g.0, lo).max(error_bound(&g.1, hi));
    let es = sum.first().map_or(f64::INFINITY, |g| near(g, &s_lo, &s_hi));
    let ep = prod.first().map_or(f64::INFINITY, |g| near(g, &p_lo, &p_hi));
    let ordered = prod.first().is_some_and(|g| g.0.certainly_lt(&g.1));
    ok(
        sum.len() == 1 && es <= TOL_GAP_ENDPOINT && ordered && ep <= TOL_GAP_ENDPOINT,
        format!("sum gap error {es:.2e}, product gap error {ep:.2e}, 4(zeta(2)-1) < zeta(2)^2 certified: {ordered}"),
    )
}

fn c10() -> Outcome {
    let mut holds = true;
    let mut equalities = vec![];
    for q in 2..=6 {
        let r = verify_inequalities(q, 10_000, &[], PREC).unwrap();
        holds &= r.a_holds && r.a_violations.is_empty();
        // independent exact check at the ends of the range
        for m in [1u64, 2, 3, 10_000] {
            let lhs = tail_factor(m, q) * 2u32;
            holds &= lhs <= m + 1;
        }
        equalities.extend(r.a_equalities.iter().map(|&m| (q, m)));
    }
    let stated = equalities == [(2, 1)];
    ok(
        holds && stated,
        format!("(A) holds for q=2..6, m<=1e4: {holds}; equality set {equalities:?}, expected [(2, 1)]"),
    )
}

fn c11() -> Outcome {
    let phi = (Float::with_val(256, 5).sqrt() + 1u32) / 2u32;
    let ea = error_bound(&alpha_root(2, PREC).unwrap(), &phi);
    let log2phi = Float::with_val(256, phi.log2_ref()).to_f64();
    let g2 = box_count(2, 40).unwrap().growth;
    let g3 = box_count(3, 60).unwrap().growth;
    let d3 = dimension_formula(3, 60, PREC).unwrap().dim.to_f64();
    let pass = ea <= TOL_ALPHA && (g2 - log2phi).abs() <= TOL_GROWTH_P2 && (g3 - d3).abs() <= TOL_GROWTH_P3;
    ok(
        pass,
        format!("alpha_2 error {ea:.2e}; growth(2,40) {g2:.10} vs {log2phi:.10}; growth(3,60) {g3:.6} vs {d3:.6}"),
    )
}

fn random_seq(rng: &mut StdRng) -> DigitSeq {
    let n = rng.gen_range(1..=5);
    let mut prefix = vec![rng.gen_range(2..=4)];
    prefix.extend((1..n).map(|_| rng.gen_range(1..=4)));
    if rng.gen_bool(0.2) {
        return DigitSeq::new(prefix, SeqTail::OnesTail).unwrap();
    }
    let m = rng.gen_range(1..=3);
    DigitSeq::periodic(prefix, (0..m).map(|_| rng.gen_range(1..=4)).collect()).unwrap()
}

fn c12() -> Outcome {
    let cfg = EvalConfig::engine(PREC);
    let mut rng = StdRng::seed_from_u64(SEED + 12);
    let (mut eta_bad, mut identical, mut undecided) = (0, 0, 0);
    for _ in 0..200 {
        let la = rng.gen_range(1..=5);
        let lb = rng.gen_range(1..=5);
        let a = random_prefix(&mut rng, 4, la);
        let b = random_prefix(&mut rng, 4, lb);
        if a == b {
            identical += 1;
            continue;
        }
        let (ca, cb) = (make_composition(&a).unwrap(), make_composition(&b).unwrap());
        let (va, vb) = (eval_finite(&ca, &cfg), eval_finite(&cb, &cfg));
        let numeric = if va.certainly_gt(&vb) {
            Ordering::Greater
        } else if va.certainly_lt(&vb) {
            Ordering::Less
        } else {
            undecided += 1;
            continue;
        };
        if index_compare(&ca, &cb) != numeric {
            eta_bad += 1;
        }
    }
    // sequences here are eventually periodic with prefix <= 5 and period <= 3,
    // so two distinct ones differ within the first 5 + lcm(1,2,3) digits
    let mut tau_bad = 0;
    for _ in 0..500 {
        let (a, b) = (random_seq(&mut rng), random_seq(&mut rng));
        let ca = make_composition(&a.digits(64)).unwrap();
        let cb = make_composition(&b.digits(64)).unwrap();
        let exact = tau_value(&a).unwrap().cmp(&tau_value(&b).unwrap());
        if index_compare(&ca, &cb) != exact {
            tau_bad += 1;
        }
    }
    ok(
        eta_bad == 0 && undecided == 0 && tau_bad == 0,
        format!("eta: {eta_bad}/200 disagreements ({identical} identical pairs, {undecided} undecided); tau: {tau_bad}/500 disagreements"),
    )
}

fn c13() -> Outcome {
    let lp = thickness(Family::TauLpClosure(2), 10, PREC).unwrap();
    let lp_ok = match &lp.exact {
        Some(s) => s.parse::<Rational>().unwrap() >= 1,
        None => lp.value.lower() >= 1,
    };
    let tp = thickness(Family::EtaTpClosure(2), 4, PREC).unwrap();
    let one = Enclosure::from_u64(PREC, 1);
    let tp_ok = tp.value.certainly_lt(&one);
    let shown = lp.exact.clone().unwrap_or_else(|| format!("{:.6}", lp.value.to_f64()));
    ok(
        lp_ok && tp_ok,
        format!(
            "t(closure tau(L_2), 10) = {shown}; t(closure eta(T_2), 4) = {:.6}",
            tp.value.to_f64()
        ),
    )
}

/// Number, name, check and wall-clock budget in seconds.
type Criterion = (usize, &'static str, fn() -> Outcome, u64);

fn main() {
    let budgets: [Criterion; 13] = [
        (1, "closed-form evaluation", c1, 10),
        (2, "tail closed forms", c2, 5),
        (3, "tiling identity", c3, 60),
        (4, "expansion round trip", c4, 300),
        (5, "Hall sweep", c5, 600),
        (6, "sum theorem endpoint and interior", c6, 600),
        (7, "product, difference, quotient", c7, 900),
        (8, "exact tau sum theorem", c8, 120),
        (9, "first-stage gaps for p = 2", c9, 60),
        (10, "inequality (A)", c10, 60),
        (11, "dimension", c11, 60),
        (12, "order structure", c12, 300),
        (13, "thickness", c13, 120),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = vec![];
    for (n, name, f, secs) in budgets {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(secs);
        let pass = out.pass && in_time;
        let known = UNATTAINABLE.iter().find(|(c, _)| *c == n);
        println!(
            "{} {n:>2} {name}: {} [{:.1}s / {secs}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        match (pass, known) {
            (false, Some((_, why))) if in_time => println!("        unattainable as stated: {why}"),
            (true, Some(_)) => unexpected.push(format!("{n} passed but is listed as unattainable")),
            (false, _) => unexpected.push(format!("{n} failed")),
            _ => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
