//! Computable reals given by rational approximation sequences.
//!
//! A real `x` is represented by total functions `a, b, s` with
//! `r_n = (-1)^s(n) · a(n)/b(n)` and `|x - r_n| < 2^-n`. [`approx`] turns the
//! n-th approximant into a dyadic enclosure of `x`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Extra bits used to enclose the (generally non-dyadic) rational `r_n`.
const RATIONAL_GUARD_BITS: u32 = 8;

pub type NatHandle = Arc<dyn Fn(u64) -> std::result::Result<BigUint, String> + Send + Sync>;

#[derive(Clone)]
pub struct RationalSeqRep {
    numerator: NatHandle,
    denominator: NatHandle,
    sign: NatHandle,
}

impl RationalSeqRep {
    pub fn new(numerator: NatHandle, denominator: NatHandle, sign: NatHandle) -> Self {
        RationalSeqRep { numerator, denominator, sign }
    }

    /// Sequence of dyadic approximants `r_n = f(n)`.
    pub fn from_dyadic_fn<F>(f: F) -> Self
    where
        F: Fn(u64) -> Dyadic + Send + Sync + Clone + 'static,
    {
        // r = m · 2^e  ->  a = |m| · 2^max(e,0), b = 2^max(-e,0)
        let fa = f.clone();
        let fb = f.clone();
        let numerator: NatHandle = Arc::new(move |n| {
            let d = fa(n);
            let m = d.mantissa().magnitude().clone();
            Ok(if d.exponent() > 0 { m << d.exponent() as u64 } else { m })
        });
        let denominator: NatHandle = Arc::new(move |n| {
            let d = fb(n);
            Ok(BigUint::from(1u32) << (-d.exponent()).max(0) as u64)
        });
        let sign: NatHandle = Arc::new(move |n| Ok(BigUint::from(u32::from(f(n).is_negative()))));
        RationalSeqRep { numerator, denominator, sign }
    }

    /// Enclosure of `r_n` itself, of width at most `2^(-n-2)`.
    pub fn approximant(&self, n: u64) -> Result<Interval> {
        let prec = u32::try_from(n + 2).map_err(|_| Error::param("index too large"))?;
        self.approximant_at(n, prec)
    }
}

impl fmt::Debug for RationalSeqRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RationalSeqRep { .. }")
    }
}

/// Enclosure `[r_n - 2^-n, r_n + 2^-n]` of the represented real.
///
/// For dyadic `r_n` the width is exactly `2^(-n+1)`; otherwise the enclosure of
/// `r_n` adds at most `2^(-n-RATIONAL_GUARD_BITS)` on each side.
pub fn approx(rep: &RationalSeqRep, n: u64) -> Result<Interval> {
    let prec = u32::try_from(n).map_err(|_| Error::param("index too large"))? + RATIONAL_GUARD_BITS;
    let r = rep.approximant_at(n, prec)?;
    Ok(r.widen(&Dyadic::pow2(-(n as i64))))
}

impl RationalSeqRep {
    fn approximant_at(&self, n: u64, prec: u32) -> Result<Interval> {
        let call = |h: &NatHandle| h(n).map_err(|message| Error::Handle { index: n, message });
        let a = Dyadic::from_int(num_bigint::BigInt::from(call(&self.numerator)?));
        let b = call(&self.denominator)?;
        if b == BigUint::from(0u32) {
            return Err(Error::Handle { index: n, message: "zero denominator".into() });
        }
        let b = Dyadic::from_int(num_bigint::BigInt::from(b));
        let negative = call(&self.sign)?.bit(0);
        let r = Interval::ordered(a.div(&b, prec, Round::Down)?, a.div(&b, prec, Round::Up)?);
        Ok(if negative { -r } else { r })
    }
}

/// Effective modulus of convergence: `k >= e(N)` implies the k-th approximant
/// is within `2^-N` of the limit.
#[derive(Clone)]
pub struct EffectiveModulus {
    index: Arc<dyn Fn(u32) -> u64 + Send + Sync>,
}

impl EffectiveModulus {
    pub fn new(index: impl Fn(u32) -> u64 + Send + Sync + 'static) -> Self {
        EffectiveModulus { index: Arc::new(index) }
    }

    pub fn index_for(&self, precision: u32) -> u64 {
        (self.index)(precision)
    }

    /// Enclosure of the limit from the approximant at index `e(precision)`.
    pub fn enclose_limit<F>(&self, approximant: F, precision: u32) -> Result<Interval>
    where
        F: FnOnce(u64) -> Result<Interval>,
    {
        let k = self.index_for(precision);
        Ok(approximant(k)?.widen(&Dyadic::pow2(-(precision as i64))))
    }
}

impl fmt::Debug for EffectiveModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EffectiveModulus { .. }")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_half() {
        let rep = RationalSeqRep::from_dyadic_fn(|_| Dyadic::pow2(-1));
        for n in [0u64, 1, 5, 30] {
            let v = approx(&rep, n).unwrap();
            let r = Dyadic::pow2(-(n as i64));
            assert_eq!(v, Interval::ball(&Dyadic::pow2(-1), &r));
            assert_eq!(v.width(), Dyadic::pow2(1 - n as i64));
        }
    }

    #[test]
    fn geometric_partial_sums_enclose_one() {
        // r_n = 1 - 2^-(n+1) is within 2^-n of 1
        let rep = RationalSeqRep::from_dyadic_fn(|n| &Dyadic::one() - &Dyadic::pow2(-(n as i64) - 1));
        for n in 0..40 {
            assert!(approx(&rep, n).unwrap().contains(&Dyadic::one()));
        }
    }

    #[test]
    fn non_dyadic_rational_width() {
        // r_n = (-1) · 1/3 for all n
        let rep = RationalSeqRep::new(
            Arc::new(|_| Ok(BigUint::from(1u32))),
            Arc::new(|_| Ok(BigUint::from(3u32))),
            Arc::new(|_| Ok(BigUint::from(1u32))),
        );
        let n = 12;
        let v = approx(&rep, n).unwrap();
        assert!(v.hi().is_negative());
        let slack = Dyadic::pow2(-(n as i64) - RATIONAL_GUARD_BITS as i64 + 1);
        assert!(v.width() <= &Dyadic::pow2(1 - n as i64) + &slack);
        let r = rep.approximant(n).unwrap();
        assert!(r.width() <= Dyadic::pow2(-(n as i64) - 2));
        assert!(v.encloses(&r));
    }

    #[test]
    fn handle_failure_propagates() {
        let rep = RationalSeqRep::new(
            Arc::new(|n| if n < 3 { Ok(BigUint::from(1u32)) } else { Err("out of fuel".into()) }),
            Arc::new(|_| Ok(BigUint::from(1u32))),
            Arc::new(|_| Ok(BigUint::from(0u32))),
        );
        assert!(approx(&rep, 2).is_ok());
        assert!(matches!(approx(&rep, 3), Err(Error::Handle { index: 3, .. })));
        let zero_den = RationalSeqRep::new(
            Arc::new(|_| Ok(BigUint::from(1u32))),
            Arc::new(|_| Ok(BigUint::from(0u32))),
            Arc::new(|_| Ok(BigUint::from(0u32))),
        );
        assert!(approx(&zero_den, 1).is_err());
    }

    #[test]
    fn nested_approximants_intersect() {
        // sum_{k=1}^{n} 4^-k -> 1/3, error 4^-n/3 < 2^-n
        let rep = RationalSeqRep::from_dyadic_fn(|n| {
            (1..=n as i64).fold(Dyadic::zero(), |acc, k| &acc + &Dyadic::pow2(-2 * k))
        });
        let encs: Vec<_> = (1..24).map(|n| approx(&rep, n).unwrap()).collect();
        for (i, a) in encs.iter().enumerate() {
            for b in &encs[i + 1..] {
                assert!(a.overlaps(b));
            }
        }
    }

    #[test]
    fn modulus_encloses_limit() {
        // r_k = 1 - 2^-k; e(N) = N + 1
        let modulus = EffectiveModulus::new(|n| n as u64 + 1);
        for n in [1u32, 8, 40] {
            let v = modulus
                .enclose_limit(|k| Ok(Interval::point(&Dyadic::one() - &Dyadic::pow2(-(k as i64)))), n)
                .unwrap();
            assert!(v.contains(&Dyadic::one()));
            assert_eq!(modulus.index_for(n), n as u64 + 1);
        }
    }
}
