//! Exact binary rationals `mantissa · 2^exponent`.
//!
//! Addition, subtraction and multiplication are exact. The only operations that
//! round are [`Dyadic::round`] and [`Dyadic::div`], and both take an explicit
//! direction so that callers can build outward-rounded enclosures.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rounding direction for the few operations that are not exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

impl Round {
    pub fn flip(self) -> Self {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// A dyadic rational in canonical form: the mantissa is odd, or zero with exponent 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn floor_shift(m: &BigInt, s: u64) -> BigInt {
    let d = BigInt::one() << s;
    m.div_floor(&d)
}

fn div_rounded(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        let mut exponent = exponent;
        if tz > 0 {
            mantissa >>= tz;
            exponent += tz as i64;
        }
        Dyadic { mantissa, exponent }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// `self · 2^k`, exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    /// Position of the most significant bit: `floor(log2 |self|)`. `None` for zero.
    pub fn msb(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mantissa.bits() as i64 - 1 + self.exponent)
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Grid exponent used when rounding to `prec` bits: at least `prec` fractional
    /// bits and at least `prec` significant bits.
    fn grid_exponent(msb: i64, prec: u32) -> i64 {
        (-(prec as i64)).min(msb - prec as i64)
    }

    /// Round to `prec` bits of working precision in direction `dir`.
    ///
    /// The result keeps at least `prec` fractional bits and at least `prec`
    /// significant bits, so the rounding error is below both `2^-prec` and
    /// `|self| · 2^-prec`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let Some(msb) = self.msb() else {
            return Self::zero();
        };
        let q = Self::grid_exponent(msb, prec);
        if self.exponent >= q {
            return self.clone();
        }
        let shift = (q - self.exponent) as u64;
        let m = match dir {
            Round::Down => floor_shift(&self.mantissa, shift),
            Round::Up => -floor_shift(&-&self.mantissa, shift),
        };
        Dyadic::new(m, q)
    }

    /// `self / rhs` rounded in direction `dir` to `prec` bits (see [`Dyadic::round`]).
    pub fn div(&self, rhs: &Dyadic, prec: u32, dir: Round) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let Some(msb_a) = self.msb() else {
            return Ok(Self::zero());
        };
        let msb_b = rhs.msb().unwrap_or(0);
        // The quotient lies in [2^(est-1), 2^(est+1)).
        let est = msb_a - msb_b;
        let q = Self::grid_exponent(est - 1, prec);
        let s = self.exponent - rhs.exponent - q;
        let (num, den) = if s >= 0 {
            (&self.mantissa << (s as u64), rhs.mantissa.clone())
        } else {
            (self.mantissa.clone(), &rhs.mantissa << ((-s) as u64))
        };
        Ok(Dyadic::new(div_rounded(&num, &den, dir), q))
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << (self.exponent as u64)
        } else {
            floor_shift(&self.mantissa, (-self.exponent) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Exact conversion from a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::param(format!("non-finite value {x}")));
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Ok(Dyadic::new(BigInt::from(m) * sign, e))
    }

    /// Nearest-ish `f64` (truncated to 64 mantissa bits, then rounded by the FPU).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 64 {
            let drop = (bits - 64) as u64;
            (floor_shift(&self.mantissa, drop), self.exponent + drop as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        scale_f64(mf, e)
    }

    /// Largest `f64` not above `self` (may be `-inf` on overflow).
    pub fn to_f64_down(&self) -> f64 {
        let mut x = self.to_f64();
        if x.is_nan() {
            return f64::NEG_INFINITY;
        }
        while x.is_finite() && Dyadic::from_f64(x).map(|d| &d > self).unwrap_or(false) {
            x = x.next_down();
        }
        if x == f64::INFINITY {
            x = f64::MAX;
        }
        while x.next_up().is_finite()
            && Dyadic::from_f64(x.next_up()).map(|d| &d <= self).unwrap_or(false)
        {
            x = x.next_up();
        }
        x
    }

    /// Smallest `f64` not below `self` (may be `+inf` on overflow).
    pub fn to_f64_up(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        -(-self).to_f64_down()
    }

    /// Parse a decimal literal (`-12.375`, `1e-3`, `0.5E2`) exactly.
    ///
    /// Literals that are not exactly representable as a dyadic rational are
    /// rejected; the error message suggests a nearby exact dyadic.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let (digits, scale) = parse_decimal(s)?;
        if scale >= 0 {
            let p = BigInt::from(10u32).pow(scale as u32);
            return Ok(Dyadic::from_int(digits * p));
        }
        let k = (-scale) as u32;
        let five = BigInt::from(5u32);
        let mut d = digits.clone();
        let mut remaining = k;
        while remaining > 0 {
            let (q, r) = d.div_rem(&five);
            if !r.is_zero() {
                break;
            }
            d = q;
            remaining -= 1;
        }
        if remaining == 0 {
            return Ok(Dyadic::new(d, -(k as i64)));
        }
        // nearest multiple of 2^-(4k+4), a few bits finer than the literal
        let bits = 4 * k as i64 + 4;
        let scaled = (digits << (bits as u64 + 1)) / BigInt::from(10u32).pow(k);
        let nearest = Dyadic::new((scaled + 1) >> 1u32, -bits);
        Err(Error::Parse(format!(
            "{s} is not exactly representable in binary; nearest dyadic with {bits} fractional bits is {nearest}"
        )))
    }
}

fn scale_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 0 {
        let step = e.min(1000);
        x *= 2f64.powi(step as i32);
        e -= step;
        if !x.is_finite() {
            return x;
        }
    }
    while e < 0 {
        let step = (-e).min(1000);
        x /= 2f64.powi(step as i32);
        e += step;
        if x == 0.0 {
            return x;
        }
    }
    x
}

/// Returns `(D, x)` with value `D · 10^x`.
fn parse_decimal(s: &str) -> Result<(BigInt, i64)> {
    let bad = || Error::Parse(format!("invalid decimal literal {s:?}"));
    let t = s.trim();
    let (mantissa_part, exp_part) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], Some(&t[i + 1..])),
        None => (t, None),
    };
    let (neg, body) = match mantissa_part.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa_part.strip_prefix('+').unwrap_or(mantissa_part)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut digits = BigInt::from_str(&all).map_err(|_| bad())?;
    if neg {
        digits = -digits;
    }
    let exp: i64 = match exp_part {
        Some(e) => e.parse().map_err(|_| bad())?,
        None => 0,
    };
    Ok((digits, exp - frac_part.len() as i64))
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dyadic::from_decimal_str(s)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<u64> for Dyadic {
    fn from(n: u64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<i32> for Dyadic {
    fn from(n: i32) -> Self {
        Dyadic::from_int(n)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << ((self.exponent - e) as u64);
        let b = &other.mantissa << ((other.exponent - e) as u64);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << ((self.exponent - e) as u64);
        let b = &rhs.mantissa << ((rhs.exponent - e) as u64);
        Dyadic::new(a + b, e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // Product of odd mantissas is odd: already canonical.
        Dyadic { mantissa: &self.mantissa * &rhs.mantissa, exponent: self.exponent + rhs.exponent }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Dyadic> for &'a Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Dyadic {
    /// Exact decimal expansion (every dyadic has a finite one).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            return write!(f, "{}", &self.mantissa << (self.exponent as u64));
        }
        let k = (-self.exponent) as usize;
        let n = self.mantissa.abs() * BigInt::from(5u32).pow(k as u32);
        let mut digits = n.to_string();
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        let (int_part, frac_part) = digits.split_at(digits.len() - k);
        let sign = if self.is_negative() { "-" } else { "" };
        write!(f, "{sign}{int_part}.{frac_part}")
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·2^{} (≈{:e})", self.mantissa, self.exponent, self.to_f64())
    }
}

impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Dyadic::from_decimal_str(&s).map_err(serde::de::Error::custom)
    }
}
