//! Outward-rounded intervals and midpoint-radius enclosures over MPFR floats.
//!
//! `Interval` is the working type: every operation rounds its lower bound
//! toward -inf and its upper bound toward +inf, so the exact result of the
//! operation applied to any points of the inputs stays inside. `Enclosure`
//! is the public carrier (midpoint, radius, infinite flag) produced from an
//! interval at the end of a computation.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Round, Special};
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Closed interval `[lo, hi]`; `hi` may be `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn down<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn fmin(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Self {
        debug_assert!(
            lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Greater),
            "inverted interval {lo} > {hi}"
        );
        Interval { lo, hi }
    }

    pub fn point(x: Float) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Float::with_val(prec, 0))
    }

    pub fn one(prec: u32) -> Self {
        Self::point(Float::with_val(prec, 1))
    }

    pub fn from_u64(prec: u32, v: u64) -> Self {
        Interval {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_integer(prec: u32, v: &Integer) -> Self {
        Interval {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_rational(prec: u32, v: &Rational) -> Self {
        Interval {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        Interval {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    /// `[lo, +inf]`
    pub fn unbounded_above(lo: Float) -> Self {
        let prec = lo.prec();
        Interval {
            lo,
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn into_bounds(self) -> (Float, Float) {
        (self.lo, self.hi)
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: down(p, &self.lo + &o.lo),
            hi: up(p, &self.hi + &o.hi),
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        Interval {
            lo: down(p, &self.lo - &o.hi),
            hi: up(p, &self.hi - &o.lo),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: Float::with_val(self.prec(), -&self.hi),
            hi: Float::with_val(self.prec(), -&self.lo),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec().max(o.prec());
        if !self.lo.is_sign_negative() && !o.lo.is_sign_negative() {
            return Interval {
                lo: down(p, &self.lo * &o.lo),
                hi: up(p, &self.hi * &o.hi),
            };
        }
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let l = down(p, a * b);
            let h = up(p, a * b);
            lo = Some(match lo {
                Some(x) => fmin(x, l),
                None => l,
            });
            hi = Some(match hi {
                Some(x) => fmax(x, h),
                None => h,
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    /// Division; the divisor must not contain zero.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(
            o.lo.is_sign_positive() && !o.lo.is_zero() || o.hi.is_sign_negative() && !o.hi.is_zero(),
            "division by an interval containing zero"
        );
        let p = self.prec().max(o.prec());
        let quads = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in quads {
            let l = down(p, a / b);
            let h = up(p, a / b);
            lo = Some(match lo {
                Some(x) => fmin(x, l),
                None => l,
            });
            hi = Some(match hi {
                Some(x) => fmax(x, h),
                None => h,
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn mul_u64(&self, k: u64) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, &self.lo * k),
            hi: up(p, &self.hi * k),
        }
    }

    pub fn div_u64(&self, k: u64) -> Interval {
        assert!(k > 0);
        let p = self.prec();
        Interval {
            lo: down(p, &self.lo / k),
            hi: up(p, &self.hi / k),
        }
    }

    /// `self^e` for a nonnegative interval.
    pub fn pow_u(&self, e: u32) -> Interval {
        debug_assert!(!self.lo.is_sign_negative() || self.lo.is_zero());
        let p = self.prec();
        Interval {
            lo: down(p, (&self.lo).pow(e)),
            hi: up(p, (&self.hi).pow(e)),
        }
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0, "logarithm of a nonpositive interval");
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.ln_ref()),
            hi: up(p, self.hi.ln_ref()),
        }
    }

    pub fn exp(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.exp_ref()),
            hi: up(p, self.hi.exp_ref()),
        }
    }

    pub fn sqrt(&self) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, self.lo.sqrt_ref()),
            hi: up(p, self.hi.sqrt_ref()),
        }
    }

    /// `[hi - lo]` rounded up.
    pub fn width_up(&self) -> Float {
        up(self.prec(), &self.hi - &self.lo)
    }

    /// Upper bound of `max |x|` over the interval.
    pub fn mag_up(&self) -> Float {
        let a = Float::with_val(self.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.prec(), self.hi.abs_ref());
        fmax(a, b)
    }

    /// Lower bound of `min |x|` over the interval.
    pub fn mig_down(&self) -> Float {
        if self.lo.is_sign_negative() && self.hi.is_sign_positive() {
            return Float::with_val(self.prec(), 0);
        }
        let a = Float::with_val(self.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.prec(), self.hi.abs_ref());
        fmin(a, b)
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: fmin(self.lo.clone(), o.lo.clone()),
            hi: fmax(self.hi.clone(), o.hi.clone()),
        }
    }

    /// Widens the interval symmetrically by `r >= 0`.
    pub fn inflate(&self, r: &Float) -> Interval {
        let p = self.prec();
        Interval {
            lo: down(p, &self.lo - r),
            hi: up(p, &self.hi + r),
        }
    }

    pub fn with_prec(&self, prec: u32) -> Interval {
        Interval {
            lo: down(prec, &self.lo),
            hi: up(prec, &self.hi),
        }
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lo <= *x && self.hi >= *x
    }

    pub fn certainly_lt(&self, o: &Interval) -> bool {
        self.hi < o.lo
    }

    pub fn certainly_gt(&self, o: &Interval) -> bool {
        self.lo > o.hi
    }

    pub fn overlaps(&self, o: &Interval) -> bool {
        !(self.certainly_lt(o) || self.certainly_gt(o))
    }
}

/// A certified real: the true value `v` satisfies `mid - rad <= v <= mid + rad`,
/// or `v = +inf` exactly when `upper_infinite` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    mid: Float,
    rad: Float,
    upper_infinite: bool,
}

impl Enclosure {
    pub fn from_parts(mid: Float, rad: Float, upper_infinite: bool) -> Self {
        let prec = mid.prec();
        let rad = if rad.is_sign_negative() {
            Float::with_val(prec, 0)
        } else {
            rad
        };
        Enclosure {
            mid,
            rad,
            upper_infinite,
        }
    }

    pub fn infinite(prec: u32) -> Self {
        Enclosure {
            mid: Float::with_val(prec, Special::Infinity),
            rad: Float::with_val(prec, 0),
            upper_infinite: true,
        }
    }

    pub fn exact(x: Float) -> Self {
        let prec = x.prec();
        Enclosure {
            mid: x,
            rad: Float::with_val(prec, 0),
            upper_infinite: false,
        }
    }

    pub fn from_u64(prec: u32, v: u64) -> Self {
        Self::from_interval_prec(&Interval::from_u64(prec, v), prec)
    }

    pub fn from_rational(prec: u32, v: &Rational) -> Self {
        Self::from_interval_prec(&Interval::from_rational(prec + 2, v), prec)
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        Self::from_interval_prec(&Interval::from_f64(prec, v), prec)
    }

    /// Midpoint-radius form of an interval at the interval's own precision.
    pub fn from_interval(iv: &Interval) -> Self {
        Self::from_interval_prec(iv, iv.prec())
    }

    /// Midpoint-radius form with the midpoint rounded to `prec` bits; the
    /// radius absorbs the rounding.
    pub fn from_interval_prec(iv: &Interval, prec: u32) -> Self {
        if iv.hi.is_infinite() {
            return Self::infinite(prec);
        }
        let wp = iv.prec().max(prec) + 2;
        let sum = Float::with_val(wp, &iv.lo + &iv.hi);
        let mid = Float::with_val(prec, sum / 2u32);
        let r1 = up(prec, &iv.hi - &mid);
        let r2 = up(prec, &mid - &iv.lo);
        let rad = fmax(r1, r2);
        let rad = if rad.is_sign_negative() {
            Float::with_val(prec, 0)
        } else {
            rad
        };
        Enclosure {
            mid,
            rad,
            upper_infinite: false,
        }
    }

    pub fn to_interval(&self) -> Interval {
        let p = self.prec();
        if self.upper_infinite {
            return Interval {
                lo: Float::with_val(p, Special::Infinity),
                hi: Float::with_val(p, Special::Infinity),
            };
        }
        Interval {
            lo: down(p, &self.mid - &self.rad),
            hi: up(p, &self.mid + &self.rad),
        }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn is_infinite(&self) -> bool {
        self.upper_infinite
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn lower(&self) -> Float {
        self.to_interval().lo
    }

    pub fn upper(&self) -> Float {
        self.to_interval().hi
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    fn lift2(&self, o: &Enclosure, f: impl Fn(&Interval, &Interval) -> Interval) -> Enclosure {
        assert!(
            !self.upper_infinite && !o.upper_infinite,
            "arithmetic on an infinite enclosure"
        );
        let p = self.prec().max(o.prec());
        Enclosure::from_interval_prec(&f(&self.to_interval(), &o.to_interval()), p)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        if self.upper_infinite || o.upper_infinite {
            return Enclosure::infinite(self.prec().max(o.prec()));
        }
        self.lift2(o, Interval::add)
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        self.lift2(o, Interval::sub)
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        self.lift2(o, Interval::mul)
    }

    pub fn div(&self, o: &Enclosure) -> Enclosure {
        self.lift2(o, Interval::div)
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure::from_interval_prec(&self.to_interval().neg(), self.prec())
    }

    pub fn ln(&self) -> Enclosure {
        Enclosure::from_interval_prec(&self.to_interval().ln(), self.prec())
    }

    pub fn exp(&self) -> Enclosure {
        Enclosure::from_interval_prec(&self.to_interval().exp(), self.prec())
    }

    /// True when every point of `self` is strictly below every point of `o`.
    pub fn certainly_lt(&self, o: &Enclosure) -> bool {
        if self.upper_infinite {
            return false;
        }
        if o.upper_infinite {
            return true;
        }
        self.to_interval().certainly_lt(&o.to_interval())
    }

    pub fn certainly_gt(&self, o: &Enclosure) -> bool {
        o.certainly_lt(self)
    }

    pub fn overlaps(&self, o: &Enclosure) -> bool {
        !(self.certainly_lt(o) || o.certainly_lt(self))
    }

    pub fn contains(&self, x: &Float) -> bool {
        !self.upper_infinite && self.to_interval().contains(x)
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        !self.upper_infinite && self.to_interval().contains_rational(x)
    }

    /// Upper bound of `|self - x|` over the enclosure.
    pub fn distance_up(&self, x: &Rational) -> Float {
        let iv = self.to_interval().sub(&Interval::from_rational(self.prec(), x));
        iv.mag_up()
    }
}

/// `{"mid": "...", "rad": "..."}` as decimal strings, or `{"infinite": true}`.
impl serde::Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = ser.serialize_map(Some(2))?;
        if self.upper_infinite {
            m.serialize_entry("infinite", &true)?;
        } else {
            let digits = (self.mid.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
            m.serialize_entry("mid", &self.mid.to_string_radix(10, Some(digits)))?;
            m.serialize_entry("rad", &self.rad.to_string_radix_round(10, Some(3), Round::Up))?;
        }
        m.end()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.upper_infinite {
            return write!(f, "+inf");
        }
        let digits = f.precision().unwrap_or(20);
        write!(
            f,
            "{} +/- {}",
            self.mid.to_string_radix(10, Some(digits)),
            self.rad.to_string_radix_round(10, Some(3), Round::Up)
        )
    }
}

/// An input real: exact when it came from a decimal or fraction, otherwise
/// an enclosure that cannot be refined.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Approx(Enclosure),
}

impl Real {
    /// Enclosure at `prec` bits; an `Approx` keeps its own width.
    pub fn enclosure(&self, prec: u32) -> Enclosure {
        match self {
            Real::Exact(q) => Enclosure::from_rational(prec, q),
            Real::Approx(e) => e.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(e) => e.to_f64(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::Exact(q)
    }
}

impl From<Enclosure> for Real {
    fn from(e: Enclosure) -> Self {
        Real::Approx(e)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(e) => write!(f, "{e}"),
        }
    }
}
