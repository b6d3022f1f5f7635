mod common;

use common::*;
use disocc_core::rational::{ratio, Rational};
use disocc_core::space::{Factor, FactorIssue, Outcome, ProductSpace};
use disocc_core::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positive_association_matches_double_loop(f in arb_factor(5)) {
        prop_assert_eq!(f.is_positively_associated().unwrap(), oracle_pa(&f));
    }

    #[test]
    fn up_sets_match_brute_force(f in arb_factor(6)) {
        let mut got = f.up_sets().unwrap();
        got.sort_unstable();
        prop_assert_eq!(got, oracle_up_sets(&f));
    }

    #[test]
    fn linear_factors_are_positively_associated(f in arb_chain(8)) {
        prop_assert!(f.is_linear());
        prop_assert!(f.is_positively_associated().unwrap());
    }

    #[test]
    fn factor_measure_is_one(f in arb_factor(6)) {
        let total: Rational = f.weights().iter().cloned().sum();
        prop_assert_eq!(total, ratio(1, 1));
        prop_assert!(f.validate().is_valid());
    }

    #[test]
    fn product_order_is_a_partial_order(space in arb_space(3, 4, 64)) {
        let outcomes = all_outcomes(&space);
        for a in &outcomes {
            prop_assert!(space.leq(a, a).unwrap());
            for b in &outcomes {
                let ab = space.leq(a, b).unwrap();
                prop_assert_eq!(ab, product_leq(&space, a, b));
                if ab && space.leq(b, a).unwrap() {
                    prop_assert_eq!(a, b);
                }
                if ab {
                    for c in &outcomes {
                        if space.leq(b, c).unwrap() {
                            prop_assert!(space.leq(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn measure_is_additive_and_monotone(
        space in arb_space(3, 3, 27),
        labels in proptest::collection::vec(0u8..3, 27),
    ) {
        // Split the outcomes into three disjoint parts by label.
        let outcomes = all_outcomes(&space);
        let part = |l: u8| -> Vec<Outcome> {
            outcomes.iter().zip(&labels).filter(|(_, &x)| x == l).map(|(w, _)| w.clone()).collect()
        };
        let (a, b, c) = (part(0), part(1), part(2));
        let ma = space.measure(a.iter()).unwrap();
        let mb = space.measure(b.iter()).unwrap();
        let mc = space.measure(c.iter()).unwrap();
        let mab = space.measure(a.iter().chain(&b)).unwrap();
        prop_assert_eq!(&mab, &(ma.clone() + &mb));
        prop_assert!(ma <= mab);
        prop_assert_eq!(mab + mc, ratio(1, 1));
        prop_assert_eq!(space.measure(outcomes.iter()).unwrap(), ratio(1, 1));
        // Repeated outcomes are counted once.
        prop_assert_eq!(space.measure(a.iter().chain(&a)).unwrap(), ma);
    }

    #[test]
    fn enumeration_is_lexicographic_and_indexed(space in arb_space(3, 4, 64)) {
        let got: Vec<Outcome> = space.enumerate_outcomes().unwrap().collect();
        prop_assert_eq!(&got, &all_outcomes(&space));
        for (i, w) in got.iter().enumerate() {
            prop_assert_eq!(space.index_of(w).unwrap(), i);
            prop_assert_eq!(&space.outcome(i), w);
            prop_assert_eq!(space.weight_of_index(i), weight(&space, w));
        }
    }
}

#[test]
fn validation_reports_every_problem() {
    let chain = Factor::chain(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    assert!(chain.validate().is_valid());

    let short = Factor::chain(vec![ratio(1, 2), ratio(1, 3)]).unwrap();
    let report = short.validate();
    assert_eq!(report.issues, vec![FactorIssue::WeightSum(ratio(5, 6))]);
    assert_eq!(report.to_string(), "weights sum to 5/6 ≠ 1");

    let cyclic = Factor::with_labels(&["a", "b"], &[("a", "b"), ("b", "a")], vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    assert!(cyclic.validate().to_string().contains("antisymmetry violated"));

    let negative = Factor::chain(vec![ratio(-1, 2), ratio(3, 2)]).unwrap();
    let text = negative.validate().to_string();
    assert!(text.contains("negative"), "{text}");
    assert!(ProductSpace::new(vec![negative]).is_err());
}

#[test]
fn documented_examples() {
    let antichain = Factor::antichain(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
    assert!(!antichain.is_linear());
    assert!(!antichain.is_positively_associated().unwrap());
    let single = Factor::chain(vec![ratio(1, 1)]).unwrap();
    assert!(single.is_positively_associated().unwrap());
    assert!(Factor::chain(vec![ratio(1, 3); 3]).unwrap().is_linear());

    let big = Factor::antichain(vec![ratio(1, 13); 13]).unwrap();
    assert!(matches!(big.is_positively_associated(), Err(Error::FactorTooLarge { size: 13, cap: 12 })));

    let cube = ProductSpace::bernoulli(2, ratio(1, 2)).unwrap();
    let o = |v: &[usize]| Outcome::new(v.to_vec());
    assert!(cube.leq(&o(&[0, 0]), &o(&[1, 1])).unwrap());
    assert!(!cube.leq(&o(&[0, 1]), &o(&[1, 0])).unwrap());
    assert!(matches!(cube.leq(&o(&[0]), &o(&[1, 1])), Err(Error::DimensionMismatch { .. })));
    assert_eq!(cube.measure([o(&[1, 1])].iter()).unwrap(), ratio(1, 4));

    let skewed = ProductSpace::new(vec![
        Factor::chain(vec![ratio(1, 3), ratio(2, 3)]).unwrap(),
        Factor::chain(vec![ratio(1, 2), ratio(1, 2)]).unwrap(),
    ])
    .unwrap();
    assert_eq!(skewed.measure([o(&[0, 0]), o(&[0, 1])].iter()).unwrap(), ratio(1, 3));

    let listed: Vec<Outcome> = cube.enumerate_outcomes().unwrap().collect();
    assert_eq!(listed, vec![o(&[0, 0]), o(&[0, 1]), o(&[1, 0]), o(&[1, 1])]);
    let three = ProductSpace::new(vec![Factor::chain(vec![ratio(1, 3); 3]).unwrap()]).unwrap();
    assert_eq!(three.enumerate_outcomes().unwrap().count(), 3);
    assert_eq!(ProductSpace::bernoulli(3, ratio(1, 2)).unwrap().enumerate_outcomes().unwrap().count(), 8);
}

#[test]
fn enumeration_cap_is_a_hard_error() {
    let factors = vec![Factor::chain(vec![ratio(1, 4); 4]).unwrap(); 4];
    let space = ProductSpace::with_outcome_cap(factors, 100).unwrap();
    assert_eq!(space.outcome_count(), 256);
    assert!(matches!(space.enumerate_outcomes(), Err(Error::SpaceTooLarge { count: 256, cap: 100 })));
}
