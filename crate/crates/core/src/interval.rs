//! Closed intervals with dyadic endpoints.
//!
//! Every operation returns an enclosure of the exact image set. `+`, `-`, `*`
//! are exact on endpoints; division and [`Interval::round_out`] round outward.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo > hi {
            return Err(Error::param(format!("interval endpoints out of order: [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Endpoints must already be ordered; used where the order is structural.
    pub(crate) fn ordered(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "unordered interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(Dyadic::from_int(n))
    }

    /// `[center - radius, center + radius]`; `radius` must be nonnegative.
    pub fn ball(center: &Dyadic, radius: &Dyadic) -> Self {
        let r = radius.abs();
        Interval { lo: center - &r, hi: center + &r }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn into_bounds(self) -> (Dyadic, Dyadic) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).half()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Largest absolute value of a member.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// `[lo - r, hi + r]`.
    pub fn widen(&self, r: &Dyadic) -> Interval {
        let r = r.abs();
        Interval { lo: &self.lo - &r, hi: &self.hi + &r }
    }

    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k) }
    }

    pub fn scale(&self, c: &Dyadic) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn sqr(&self) -> Interval {
        let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
        if self.contains_zero() {
            Interval { lo: Dyadic::zero(), hi: a.max(b) }
        } else if self.lo.is_positive() {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Elementwise `max(x, c)`.
    pub fn max_with(&self, c: &Dyadic) -> Interval {
        Interval { lo: self.lo.clone().max(c.clone()), hi: self.hi.clone().max(c.clone()) }
    }

    /// Outward rounding to `prec` bits; shrinks the endpoint representations
    /// without losing containment.
    pub fn round_out(&self, prec: u32) -> Interval {
        Interval { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    /// Enclosure of `{x / y}`; fails when `0 ∈ y`.
    pub fn div(&self, y: &Interval, prec: u32) -> Result<Interval> {
        if y.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        if y.is_point() {
            let d = &y.lo;
            let (a, b) = if d.is_positive() { (&self.lo, &self.hi) } else { (&self.hi, &self.lo) };
            return Ok(Interval::ordered(a.div(d, prec, Round::Down)?, b.div(d, prec, Round::Up)?));
        }
        let cands = [(&self.lo, &y.lo), (&self.lo, &y.hi), (&self.hi, &y.lo), (&self.hi, &y.hi)];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in cands {
            let l = a.div(b, prec, Round::Down)?;
            let h = a.div(b, prec, Round::Up)?;
            lo = Some(match lo {
                Some(v) => v.min(l),
                None => l,
            });
            hi = Some(match hi {
                Some(v) => v.max(h),
                None => h,
            });
        }
        Ok(Interval::ordered(lo.unwrap(), hi.unwrap()))
    }

    pub fn div_dyadic(&self, d: &Dyadic, prec: u32) -> Result<Interval> {
        self.div(&Interval::point(d.clone()), prec)
    }

    pub fn div_int(&self, k: u64, prec: u32) -> Interval {
        self.div_dyadic(&Dyadic::from(k), prec).expect("nonzero divisor")
    }

    pub fn recip(&self, prec: u32) -> Result<Interval> {
        Interval::one().div(self, prec)
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64_down(), self.hi.to_f64_up())
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;

    fn add(self, rhs: &'a Interval) -> Interval {
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;

    fn sub(self, rhs: &'a Interval) -> Interval {
        Interval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;

    fn mul(self, rhs: &'a Interval) -> Interval {
        if self.is_point() && rhs.is_point() {
            return Interval::point(&self.lo * &rhs.lo);
        }
        let p = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let mut lo = p[0].clone();
        let mut hi = p[0].clone();
        for v in &p[1..] {
            if v < &lo {
                lo = v.clone();
            }
            if v > &hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &'a Interval) -> Interval {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Interval> for &'a Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_f64_bounds();
        write!(f, "[{lo:e}, {hi:e}]")
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Interval[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: &str, b: &str) -> Interval {
        Interval::new(a.parse().unwrap(), b.parse().unwrap()).unwrap()
    }

    #[test]
    fn add_endpoints() {
        assert_eq!(iv("1", "2") + iv("3", "4"), iv("4", "6"));
    }

    #[test]
    fn mul_sign_cases() {
        assert_eq!(iv("-1", "2") * iv("3", "4"), iv("-4", "8"));
        assert_eq!(iv("-2", "-1") * iv("-3", "4"), iv("-8", "6"));
        assert_eq!(iv("-2", "-1") * iv("-4", "-3"), iv("3", "8"));
    }

    #[test]
    fn sub_and_neg() {
        assert_eq!(iv("1", "2") - iv("3", "5"), iv("-4", "-1"));
        assert_eq!(-iv("1", "2"), iv("-2", "-1"));
    }

    #[test]
    fn div_one_third_at_eight_bits() {
        let q = iv("1", "1").div(&iv("3", "3"), 8).unwrap();
        assert!(q.width() <= Dyadic::pow2(-8));
        // 3·lo ≤ 1 ≤ 3·hi is the long-division check for containment of 1/3
        let three = Dyadic::from_int(3);
        assert!(q.lo() * &three <= Dyadic::one());
        assert!(q.hi() * &three >= Dyadic::one());
    }

    #[test]
    fn div_by_interval_containing_zero_is_an_error() {
        assert_eq!(iv("1", "1").div(&iv("-1", "1"), 16), Err(Error::DivisionByZero));
        assert_eq!(iv("1", "1").div(&iv("0", "1"), 16), Err(Error::DivisionByZero));
    }

    #[test]
    fn unordered_construction_fails() {
        assert!(Interval::new(Dyadic::one(), Dyadic::zero()).is_err());
    }

    #[test]
    fn sqr_is_tighter_than_self_mul_across_zero() {
        let x = iv("-1", "2");
        assert_eq!(x.sqr(), iv("0", "4"));
        assert_eq!(&x * &x, iv("-2", "4"));
    }

    #[test]
    fn intersect_and_hull() {
        let a = iv("0", "2");
        let b = iv("1", "3");
        assert_eq!(a.intersect(&b), Some(iv("1", "2")));
        assert_eq!(a.hull(&b), iv("0", "3"));
        assert_eq!(a.intersect(&iv("5", "6")), None);
    }
}
