//! Spectrum values on `B = 4`, `A = evens`, checked against an independent
//! evaluation (direct series summation and adaptive quadrature at 60 digits).

use std::sync::Arc;

use num_bigint::BigInt;
use rigcap::enumerator::{Enumerator, RecursiveSet};
use rigcap::spectrum::{eval_n, eval_nm, integral_ln_n, power_pf1, SpectrumModel, SpectrumParams};
use rigcap::waterpour::{capacity_constructed_f1, capacity_high_power, p_star};
use rigcap::{Dyadic, Error, Interval};

/// `[lo, hi] · 2^-bits`, widened by one unit for the oracle's own rounding.
fn oracle(lo: &str, hi: &str, bits: i64) -> Interval {
    let lo = Dyadic::new(lo.parse::<BigInt>().unwrap() - 1, -bits);
    let hi = Dyadic::new(hi.parse::<BigInt>().unwrap() + 1, -bits);
    Interval::new(lo, hi).unwrap()
}

fn evens(terms: usize) -> SpectrumParams {
    let st = Enumerator::recursive(RecursiveSet::Evens).start().advance(200);
    SpectrumParams::new(Dyadic::from(4), 1, Arc::new(st), terms).unwrap()
}

fn assert_encloses(enc: &Interval, truth: &Interval, max_width_log2: i64) {
    assert!(enc.overlaps(truth), "enclosure {enc:?} misses oracle {truth:?}");
    assert!(enc.width() <= Dyadic::pow2(max_width_log2), "enclosure {enc} wider than 2^{max_width_log2}");
}

fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

#[test]
fn truncated_value_at_one() {
    let v = eval_nm(&d("1"), &evens(3), 64).unwrap();
    let truth = oracle("1131707657368885234121427268", "1131707657368885234121427269", 90);
    assert_encloses(&v, &truth, -60);
}

#[test]
fn limit_value_at_one_and_at_the_edge() {
    let p = evens(20);
    let e = eval_n(&d("1"), &p, &Dyadic::pow2(-30)).unwrap();
    assert!(e.met_target);
    assert_eq!(e.truncation_order, 20);
    let truth = oracle("1130770788145960558567175457", "1130770788145960558567175458", 90);
    assert_encloses(&e.value, &truth, -30);
    let edge = eval_n(&d("0"), &p, &Dyadic::pow2(-30)).unwrap();
    let truth = oracle("4732570437130622705608619192", "4732570437130622705608619193", 90);
    assert_encloses(&edge.value, &truth, -30);
}

#[test]
fn limit_value_narrows_as_terms_grow() {
    let truth = oracle("1130770788145960558567175457", "1130770788145960558567175458", 90);
    let mut last: Option<Interval> = None;
    for m in [2usize, 4, 8, 16] {
        let e = eval_n(&d("1"), &evens(m), &Dyadic::pow2(-200)).unwrap();
        assert!(e.value.overlaps(&truth));
        if let Some(prev) = &last {
            assert!(e.value.width() < prev.width());
            assert!(e.value.overlaps(prev));
        }
        last = Some(e.value);
    }
}

#[test]
fn unreachable_target_is_flagged() {
    let e = eval_n(&d("1"), &evens(2), &Dyadic::pow2(-40)).unwrap();
    assert!(!e.met_target);
    assert!(e.tail_bound > Dyadic::pow2(-40));
}

#[test]
fn full_band_log_integral() {
    let v = integral_ln_n(&d("0"), &d("4"), &evens(20), 64).unwrap();
    // equals 2B(ln(B/2) - 1) - 1/3
    let truth = oracle("-3451569810581401455266684643", "-3451569810581401455266684642", 90);
    assert_encloses(&v, &truth, -38);
}

#[test]
fn window_powers() {
    let p = evens(12);
    let cases = [
        ("0.5", "185539655818046627613064231", "185539655818046627613064232"),
        ("1", "1512598553396841653356851430", "1512598553396841653356851431"),
        ("2", "12730627606456917024712557385", "12730627606456917024712557386"),
    ];
    for (f1, lo, hi) in cases {
        let v = power_pf1(&d(f1), &p, 64).unwrap();
        assert_encloses(&v, &oracle(lo, hi, 90), -20);
    }
}

#[test]
fn threshold_power_agrees_with_full_window() {
    let p = evens(12);
    let star = p_star(&p, 64).unwrap();
    let truth = oracle("12730627606456917024712557385", "12730627606456917024712557386", 90);
    assert_encloses(&star, &truth, -20);
    assert!(star.overlaps(&power_pf1(&d("2"), &p, 64).unwrap()));
    assert!(star.lo().is_positive());
}

#[test]
fn constructed_capacities() {
    let p = evens(12);
    let cases = [
        ("0.5", "2480243930373756351580286725", "2480243930373756351580286726"),
        ("1", "4984821821839364900731034820", "4984821821839364900731034821"),
        ("2", "10091977969356257735121604208", "10091977969356257735121604209"),
    ];
    for (f1, lo, hi) in cases {
        let c = capacity_constructed_f1(&d(f1), &p, 64).unwrap();
        assert_encloses(&c.value, &oracle(lo, hi, 90), -24);
        assert_eq!(c.meta.terms, Some(12));
    }
}

#[test]
fn constructed_capacity_vanishes_with_the_window() {
    let p = evens(40);
    let c = capacity_constructed_f1(&Dyadic::pow2(-20), &p, 64).unwrap();
    assert!(c.value.lo() >= &Dyadic::zero());
    assert!(c.value.hi() < &Dyadic::pow2(-16));
    assert!(capacity_constructed_f1(&Dyadic::zero(), &p, 64).is_err());
    assert!(capacity_constructed_f1(&d("2.5"), &p, 64).is_err());
}

#[test]
fn high_power_closed_form() {
    let p = evens(12);
    let cases = [
        ("20.5", "12329778032670329122011248", "12329778032670329122011249"),
        ("12", "10369831183631403440499190", "10369831183631403440499191"),
    ];
    for (pw, lo, hi) in cases {
        let c = capacity_high_power(&d(pw), &p, 64).unwrap();
        assert_encloses(&c.value, &oracle(lo, hi, 80), -20);
    }
}

#[test]
fn high_power_below_threshold_is_rejected() {
    let err = capacity_high_power(&d("10"), &evens(12), 64).unwrap_err();
    assert!(matches!(err, Error::Precondition(ref m) if m.contains("gap")), "{err}");
}

#[test]
fn high_power_meets_constructed_at_threshold() {
    // C(P) - C(P_*) lies in [0, (P - P_*) / N(0)] by concavity in P
    let p = evens(12);
    let model = SpectrumModel::new(&p, 64).unwrap();
    let star = model.power_pf1(&d("2")).unwrap();
    let n0 = model.eval_n(&d("0")).unwrap().value;
    let at_threshold = capacity_constructed_f1(&d("2"), &p, 64).unwrap().value;
    let mut prev_lo: Option<Dyadic> = None;
    for k in [8i64, 12, 16, 20] {
        let pw = star.hi() + &Dyadic::pow2(-k);
        let high = capacity_high_power(&pw, &p, 64).unwrap().value;
        let slope = Interval::point(&pw - star.lo()).div(&Interval::point(n0.lo().clone()), 64).unwrap();
        assert!(high.hi() >= at_threshold.lo());
        assert!(high.lo() <= &(at_threshold.hi() + slope.hi()));
        if let Some(prev) = prev_lo {
            assert!(high.lo() <= &prev);
        }
        prev_lo = Some(high.lo().clone());
    }
}
