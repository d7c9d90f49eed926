use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use storsion::density::{density_estimate, IndexSet};
use storsion::expansion::{expand_element, sigma, support, CircleElement, DigitRule, DigitValue};
use storsion::membership::{self, Analysis, Outcome, Params};
use storsion::sequences::{ArithmeticSequence, RatioRule};

fn seq(rule: RatioRule) -> Arc<ArithmeticSequence> {
    Arc::new(ArithmeticSequence::new(rule).unwrap())
}

fn indicator(support: IndexSet, value: DigitValue) -> CircleElement {
    CircleElement::digits(DigitRule::Indicator { support, value }).unwrap()
}

#[test]
fn sigma_is_one_minus_the_ratio_product_inside_maximal_blocks() {
    // blocks n ≡ 1..5 mod 8 carry the maximal digit 2 of q = 3
    let three = seq(RatioRule::Constant(3));
    let x = indicator(IndexSet::Residues { modulus: 8, residues: vec![1, 2, 3, 4, 5] }, DigitValue::QMinusOne);
    let p = expand_element(&x, &three, 400).unwrap();
    let mut checked = 0;
    for n in 1..=380u64 {
        for k in 0..=4u64 {
            let inside = (n..=n + k).all(|m| (1..=5).contains(&(m % 8)));
            if !inside {
                continue;
            }
            let want = BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(3).pow(k as u32 + 1));
            assert_eq!(sigma(&p, n, k).unwrap(), want, "n={n} k={k}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn statistical_torsion_is_weaker_than_torsion() {
    // infinite support, yet a member: only finite supports give torsion for constant ratios
    let two = seq(RatioRule::Constant(2));
    let x = indicator(IndexSet::Squares, DigitValue::One);
    let p = Params::with_prefix(20_000);
    let an = Analysis::new(&x, &two, &p).unwrap();
    assert_eq!(an.supp.known_finite(), Some(false));
    assert_eq!(membership::check_thm_main(&x, &two, &p).unwrap().outcome, Outcome::Member);

    let finite = indicator(IndexSet::finite([1, 4, 9]), DigitValue::One);
    let v = membership::check_thm_main(&finite, &two, &p).unwrap();
    assert_eq!((v.outcome, v.rule_fired.as_str()), (Outcome::Member, "zero-support"));
}

#[test]
fn non_members_carry_witnesses_and_undecided_carry_oracles() {
    let p = Params::with_prefix(5_000);
    let cases = [
        (seq(RatioRule::Constant(2)), CircleElement::rational(1, 3).unwrap()),
        (seq(RatioRule::Constant(5)), CircleElement::rational(2, 7).unwrap()),
        (Arc::new(ArithmeticSequence::dyadic_partition()), indicator(IndexSet::evens(), DigitValue::One)),
        (Arc::new(ArithmeticSequence::squares_partition()), indicator(IndexSet::odds(), DigitValue::QMinusOne)),
    ];
    for (s, x) in cases {
        let v = membership::check_thm_main(&x, &s, &p).unwrap();
        match v.outcome {
            Outcome::NonMember => assert!(v.witness.is_some(), "{}", v.rule_fired),
            Outcome::Undecided => assert!(v.oracle_summary.is_some()),
            Outcome::Member => {}
        }
    }
}

#[test]
fn applicable_reductions_agree() {
    let p = Params::with_prefix(10_000);
    let mixed = seq(RatioRule::LevelCells(vec![
        storsion::sequences::LevelCell::constant(IndexSet::odds(), 3),
        storsion::sequences::LevelCell { set: IndexSet::evens(), rule: RatioRule::Affine { offset: 1 } },
    ]));
    for x in [
        indicator(IndexSet::odds(), DigitValue::QMinusOne),
        indicator(IndexSet::evens(), DigitValue::One),
        indicator(IndexSet::naturals(), DigitValue::One),
    ] {
        let r = membership::compare(&x, &mixed, &p).unwrap();
        assert!(r.cases_agree, "{:?}", r.cases);
        assert!(!r.alarm, "{:?}", r.discrepancies);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn off_support_indices_do_not_change_the_divergent_clause(m in 2u64..7, r in 0u64..7, extra in 0u64..4) {
        let r = r % m;
        let aff = seq(RatioRule::Affine { offset: 1 });
        let x = indicator(IndexSet::Residues { modulus: 3, residues: vec![0, 1] }, DigitValue::Fraction { num: 1, den: 3 });
        let p = Params::with_prefix(3_000);
        let an = Analysis::new(&x, &aff, &p).unwrap();
        let a = IndexSet::Residues { modulus: m, residues: vec![r] };
        let off = IndexSet::Residues { modulus: 4, residues: vec![extra] }.minus(an.supp.clone());
        let wider = a.clone().union(off);
        let tag = |s: &IndexSet| an.probe("A", s).unwrap().map(|h| h.0);
        prop_assert_eq!(tag(&a), tag(&wider));
    }

    #[test]
    fn digit_elements_respect_digit_bounds(pattern in proptest::collection::vec(2u64..7, 1..4), m in 2u64..6, value in 0usize..3) {
        let s = seq(RatioRule::Periodic(pattern));
        let value = [DigitValue::One, DigitValue::QMinusOne, DigitValue::Fraction { num: 1, den: 2 }][value].clone();
        let x = indicator(IndexSet::Residues { modulus: m, residues: vec![0] }, value);
        let p = expand_element(&x, &s, 500).unwrap();
        prop_assert!((1..=500).all(|n| p.digit(n) < p.ratio(n)));
        let (supp, supp_q) = support(&p);
        prop_assert_eq!(density_estimate(&supp_q.minus(supp), 500).unwrap().count, 0);
    }
}
