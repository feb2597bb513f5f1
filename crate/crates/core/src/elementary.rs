//! Rigorous `exp` and `ln` on dyadic intervals.
//!
//! Both use argument reduction followed by a Taylor (resp. atanh) series
//! evaluated in interval arithmetic, with the truncation error added as an
//! explicit Lagrange bound. Results are outward-rounded.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::interval::Interval;

const GUARD_BITS: u32 = 24;

/// Reduce `|x|` below `2^-8` by halving before the Taylor series.
const EXP_REDUCTION_BITS: i64 = 8;

/// Enclosure of `exp(x)` for a dyadic point.
pub fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    let Some(msb) = x.msb() else {
        return Interval::one();
    };
    let squarings = (msb + 1 + EXP_REDUCTION_BITS).max(0) as u32;
    let w = prec + squarings + GUARD_BITS;
    let r = x.mul_pow2(-(squarings as i64));
    let r_iv = Interval::point(r.clone());
    let r_abs = r.abs();
    let eps = Dyadic::pow2(-(w as i64));

    let mut sum = Interval::one();
    let mut term = Interval::one();
    let mut k = 1u64;
    loop {
        term = (&term * &r_iv).round_out(w).div_int(k, w);
        sum = (&sum + &term).round_out(w);
        // |R_k| <= |r|^(k+1)/(k+1)! · e^|r| <= 2 · mag(term_k) · |r| / (k+1)
        let rem = (&term.mag() * &r_abs).mul_pow2(1).div(&Dyadic::from(k + 1), w, Round::Up);
        let rem = rem.expect("nonzero divisor");
        if rem < eps {
            sum = sum.widen(&rem);
            break;
        }
        k += 1;
    }
    for _ in 0..squarings {
        sum = sum.sqr().round_out(w);
    }
    sum.round_out(prec + 2)
}

/// Enclosure of `{exp t : t ∈ x}`.
pub fn exp(x: &Interval, prec: u32) -> Interval {
    if x.is_point() {
        return exp_point(x.lo(), prec);
    }
    let lo = exp_point(x.lo(), prec);
    let hi = exp_point(x.hi(), prec);
    Interval::ordered(lo.lo().clone(), hi.hi().clone())
}

/// `2·atanh(t) = 2 Σ t^(2j+1)/(2j+1)` for `|t| <= 1/3`.
fn two_atanh(t: &Interval, w: u32) -> Interval {
    if t.is_point() && t.lo().is_zero() {
        return Interval::zero();
    }
    let eps = Dyadic::pow2(-(w as i64));
    let t2 = t.sqr().round_out(w);
    let mut power = t.clone();
    let mut sum = Interval::zero();
    let mut j = 0u64;
    loop {
        sum = (&sum + &power.div_int(2 * j + 1, w)).round_out(w);
        power = (&power * &t2).round_out(w);
        // Remaining terms sum to at most mag(power)/(2j+3) · 1/(1-t²), and 1/(1-t²) < 2.
        let rem = power.mag().mul_pow2(1).div(&Dyadic::from(2 * j + 3), w, Round::Up);
        let rem = rem.expect("nonzero divisor");
        if rem < eps {
            sum = sum.widen(&rem);
            break;
        }
        j += 1;
    }
    sum.mul_pow2(1)
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Interval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of `ln 2` with width about `2^-w`.
pub fn ln2(w: u32) -> Interval {
    if let Some(v) = ln2_cache().lock().expect("ln2 cache poisoned").get(&w) {
        return v.clone();
    }
    let third = Interval::one().div_int(3, w + GUARD_BITS);
    let v = two_atanh(&third, w + GUARD_BITS).round_out(w);
    ln2_cache().lock().expect("ln2 cache poisoned").insert(w, v.clone());
    v
}

/// Enclosure of `ln(x)` for a positive dyadic point.
pub fn ln_point(x: &Dyadic, prec: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::domain(format!("ln of nonpositive value {x}")));
    }
    if *x == Dyadic::one() {
        return Ok(Interval::zero());
    }
    // x = y · 2^k with y in [1/√2, √2)
    let m = x.mantissa();
    let b = m.bits() as i64;
    let below_sqrt_half = m * m < (num_bigint::BigInt::from(1) << ((2 * b - 1) as u64));
    let (y, k) = if below_sqrt_half {
        (Dyadic::new(m.clone(), -(b - 1)), b + x.exponent() - 1)
    } else {
        (Dyadic::new(m.clone(), -b), b + x.exponent())
    };
    let k_bits = 64 - k.unsigned_abs().leading_zeros();
    let w = prec + k_bits + GUARD_BITS;
    let one = Dyadic::one();
    let t = Interval::point(&y - &one).div_dyadic(&(&y + &one), w)?;
    let ln_y = two_atanh(&t, w);
    let scaled_ln2 = ln2(w).scale(&Dyadic::from(k));
    Ok((&scaled_ln2 + &ln_y).round_out(prec + 2))
}

/// Enclosure of `{ln t : t ∈ x}`; the lower endpoint must be positive.
pub fn ln(x: &Interval, prec: u32) -> Result<Interval> {
    if !x.lo().is_positive() {
        return Err(Error::domain(format!("ln of interval with nonpositive lower endpoint {}", x.lo())));
    }
    if x.is_point() {
        return ln_point(x.lo(), prec);
    }
    let lo = ln_point(x.lo(), prec)?;
    let hi = ln_point(x.hi(), prec)?;
    Ok(Interval::ordered(lo.lo().clone(), hi.hi().clone()))
}
