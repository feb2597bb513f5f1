use proptest::prelude::*;
use rigcap::computable::{approx, RationalSeqRep};
use rigcap::enumerator::{EnumerationState, Enumerator, GoldenEnumeration, RecursiveSet};
use rigcap::machine::{MachineTable, BUNDLED_LOOPER_INDEX};
use rigcap::{Dyadic, Error, Interval};

fn golden() -> GoldenEnumeration {
    serde_json::from_str(include_str!("golden/halting_b50000.json")).unwrap()
}

fn bundled() -> EnumerationState {
    Enumerator::halting(MachineTable::bundled()).start()
}

fn frac(num: u64, den_log2: i64) -> Dyadic {
    Dyadic::new(num, -den_log2)
}

#[test]
fn bundled_prefix_matches_golden_file() {
    let g = golden();
    let s = bundled().advance(g.budget);
    assert_eq!(s.golden(), g);
    assert_eq!(s.steps_used(), g.budget);
}

#[test]
fn golden_partial_sum_and_majorant() {
    let s = bundled().advance(golden().budget);
    // values from an exact rational evaluation of the golden prefix
    assert_eq!(s.partial_sum(8).unwrap(), frac(27075, 15));
    assert_eq!(s.tail_majorant(), frac(34_361_843_777, 40));
    assert!(s.tail_majorant().is_positive());
}

#[test]
fn planted_looper_is_never_listed() {
    let mut s = bundled();
    s.advance_in_place(1_000_000);
    assert_eq!(s.count(), 39);
    assert!(!s.contains(BUNDLED_LOOPER_INDEX));
    assert!(s.tail_majorant() >= Dyadic::pow2(-(BUNDLED_LOOPER_INDEX as i64)));
    assert_eq!(s.elements().last(), Some(&34));
}

#[test]
fn exhausted_table_stops_spending_budget() {
    let json = r#"{"version":1,"programs":[[{"op":"halt","reg":0,"target":0}],
        [{"op":"inc","reg":0,"target":1},{"op":"halt","reg":0,"target":0}]]}"#;
    let e = Enumerator::halting(MachineTable::from_json(json).unwrap());
    let s = e.start().advance(100);
    assert_eq!(s.elements(), &[1, 2]);
    assert_eq!(s.steps_used(), 3);
    assert!(s.is_exhausted());
    assert_eq!(s.tail_majorant(), Dyadic::pow2(-2));
}

#[test]
fn falling_off_the_program_end_halts() {
    let json = r#"{"version":1,"programs":[[{"op":"decjz","reg":1,"target":0},{"op":"inc","reg":0,"target":1}],
        [{"op":"inc","reg":0,"target":1},{"op":"decjz","reg":0,"target":0}]]}"#;
    let s = Enumerator::halting(MachineTable::from_json(json).unwrap()).start().advance(50);
    // program 2 decrements r0 and steps to pc 2, past the end
    assert_eq!(s.elements(), &[2]);
}

#[test]
fn insufficient_enumeration_is_reported() {
    let s = bundled().advance(10);
    let n = s.count();
    assert_eq!(
        s.partial_sum(n + 1),
        Err(Error::InsufficientEnumeration { requested: n + 1, available: n })
    );
    assert!(s.remaining_mass(n + 1).is_err());
}

#[test]
fn approximants_from_partial_sums_are_nested() {
    // r_n = S_M with M the first index whose remaining mass is below 2^-n
    let mut s = bundled();
    s.advance_in_place(1_000_000);
    let cut = move |n: u64| {
        let bound = Dyadic::pow2(-(n as i64));
        (0..=s.count())
            .find(|&m| s.remaining_mass(m).unwrap() < bound)
            .map(|m| s.partial_sum(m).unwrap())
    };
    // the bundled listing certifies only about 5 bits, so use n <= 4
    let rep = RationalSeqRep::from_dyadic_fn(move |n| cut(n).expect("precision reachable"));
    let encs: Vec<Interval> = (0..5).map(|n| approx(&rep, n).unwrap()).collect();
    for (i, a) in encs.iter().enumerate() {
        for b in &encs[i + 1..] {
            assert!(a.overlaps(b), "{a} vs {b}");
        }
    }
}

fn backend() -> impl Strategy<Value = Enumerator> {
    prop_oneof![
        Just(Enumerator::halting(MachineTable::bundled())),
        Just(Enumerator::recursive(RecursiveSet::Evens)),
        Just(Enumerator::recursive(RecursiveSet::Odds)),
        Just(Enumerator::recursive(RecursiveSet::Squares)),
        Just(Enumerator::recursive(RecursiveSet::Primes)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chunked_advance_equals_single_advance(e in backend(), chunks in prop::collection::vec(0u64..900, 1..8)) {
        let total: u64 = chunks.iter().sum();
        let mut s = e.start();
        for c in &chunks {
            s = s.advance(*c);
        }
        let once = e.start().advance(total);
        prop_assert_eq!(s.elements(), once.elements());
        prop_assert_eq!(s.steps_used(), once.steps_used());
    }

    #[test]
    fn prefixes_extend_and_stay_injective(e in backend(), a in 0u64..3000, b in 0u64..3000) {
        let early = e.start().advance(a);
        let late = early.advance(b);
        prop_assert!(late.elements().starts_with(early.elements()));
        let mut seen = late.elements().to_vec();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), late.count());
        prop_assert!(late.elements().iter().all(|&k| k >= 1));
    }

    #[test]
    fn majorant_dominates_future_growth(e in backend(), a in 0u64..2000, b in 0u64..6000) {
        let early = e.start().advance(a);
        let late = early.advance(b);
        let m = early.count();
        let bound = &early.partial_sum(m).unwrap() + &early.tail_majorant();
        let sums = late.partial_sums();
        prop_assert_eq!(&sums[late.count()], &late.partial_sum(late.count()).unwrap());
        for s in &sums[m..] {
            prop_assert!(s <= &bound);
        }
        // partial sums strictly increase and stay below 1
        prop_assert!(sums.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(sums[late.count()] < Dyadic::one());
        if late.count() > m {
            prop_assert!(late.tail_majorant() < early.tail_majorant());
        }
    }

    #[test]
    fn evens_sums_approach_one_third(steps in 1u64..400) {
        let s = Enumerator::recursive(RecursiveSet::Evens).start().advance(steps);
        let three = Dyadic::from(3);
        let maj = s.tail_majorant();
        for (m, sum) in s.partial_sums().iter().enumerate() {
            // |S_M - 1/3| < majorant, scaled by 3 to stay in dyadics
            let gap = (&Dyadic::one() - &(sum * &three)).abs();
            if m == s.count() {
                prop_assert!(gap < &maj * &three);
            }
            let r = s.remaining_mass(m).unwrap();
            prop_assert!(gap <= &r * &three);
        }
    }
}
