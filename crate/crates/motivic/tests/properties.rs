//! Property tests: ring laws on randomized values, the geometric-series
//! identity, equality invariance under denominator padding, and the
//! compatibility between truncated expansion and specialization.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use proptest::prelude::*;

use motivic::lring::{geom_sum, MotivicValue};

fn arb_terms() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec(((-6i64..=6), (-9i64..=9)), 0..4)
}

fn arb_value() -> impl Strategy<Value = MotivicValue> {
    (arb_terms(), prop::collection::vec(1u32..=3, 0..3)).prop_map(|(terms, dens)| {
        MotivicValue::from_terms(&terms).with_denominator_factors(&dens)
    })
}

proptest! {
    #[test]
    fn addition_commutes_and_associates(a in arb_value(), b in arb_value(), c in arb_value()) {
        prop_assert!(a.add(&b).equals(&b.add(&a)));
        prop_assert!(a.add(&b).add(&c).equals(&a.add(&b.add(&c))));
    }

    #[test]
    fn multiplication_commutes_and_associates(a in arb_value(), b in arb_value(), c in arb_value()) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        prop_assert!(ab.equals(&ba));
        let abc1 = ab.mul(&c).unwrap();
        let abc2 = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(abc1.equals(&abc2));
    }

    #[test]
    fn multiplication_distributes(a in arb_value(), b in arb_value(), c in arb_value()) {
        let lhs = a.mul(&b.add(&c)).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap());
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn additive_inverses(a in arb_value()) {
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn equality_is_reflexive_symmetric(a in arb_value(), b in arb_value()) {
        prop_assert!(a.equals(&a));
        prop_assert_eq!(a.equals(&b), b.equals(&a));
    }

    #[test]
    fn equality_survives_denominator_padding(a in arb_value(), factor in 1u32..=4) {
        // multiply numerator and denominator by (1 - L^-factor)
        let padding = MotivicValue::from_terms(&[(0, 1), (-(factor as i64), -1)]);
        let padded = a.mul(&padding).unwrap().with_denominator_factors(&[factor]);
        prop_assert!(padded.equals(&a));
        prop_assert!(a.equals(&padded));
    }

    #[test]
    fn geom_sum_times_complement_is_identity(t in arb_value(), r in -5i64..=-1) {
        let series = geom_sum(t.clone(), r).unwrap();
        let complement = MotivicValue::from_terms(&[(0, 1), (r, -1)]);
        prop_assert!(series.mul(&complement).unwrap().equals(&t));
    }

    #[test]
    fn reduction_preserves_the_value(a in arb_value()) {
        prop_assert!(a.reduced().equals(&a));
    }

    #[test]
    fn expansion_windows_are_consistent(a in arb_value(), lo in -20i64..=-5) {
        // a deeper window must reproduce the shallower one exactly
        let shallow = a.expand(lo);
        let deep = a.expand(lo - 15);
        prop_assert!(shallow.agrees_with(&deep));
    }

    #[test]
    fn expansion_evaluates_near_specialization(a in arb_value(), q in 2u64..=5, lo in -26i64..=-12) {
        let rational_q = BigRational::from(BigInt::from(q));
        let exact = a.specialize(&rational_q).unwrap();
        let series = a.expand(lo);
        let approx = series.eval(&rational_q);
        let tail = (exact - approx).abs();
        // provable tail bound: the omitted coefficients c_e for e < lo obey
        // |c_e| <= S * (M - e + 1)^k with S the numerator coefficient mass,
        // M its top exponent, k the number of denominator factors; summing
        // the geometric-polynomial majorant gives
        //   S * (M - lo + 2)^k * k! * q^(lo-1) / (1 - 1/q)^(k+1).
        let coeff_mass: BigInt = a
            .numerator_terms()
            .map(|(_, c)| c.abs())
            .fold(BigInt::zero(), |acc, c| acc + c);
        let top = a.numerator_terms().map(|(e, _)| e).max().unwrap_or(0);
        let k = a.denominator_factors().len() as u32;
        let factorial: BigInt = (1..=k as i64).product::<i64>().max(1).into();
        let growth = BigInt::from(top - lo + 2).pow(k);
        let one_minus = BigRational::one()
            - BigRational::new(BigInt::one(), BigInt::from(q));
        let mut bound = BigRational::from(coeff_mass * growth * factorial);
        for _ in 0..=k {
            bound /= one_minus.clone();
        }
        for _ in 0..(1 - lo) {
            bound /= BigRational::from(BigInt::from(q));
        }
        prop_assert!(
            tail <= bound,
            "tail {} exceeds bound {} for {} at q={}, lo={}",
            tail,
            bound,
            a,
            q,
            lo
        );
    }
}

#[test]
fn infinity_is_absorbing_for_add() {
    let inf = MotivicValue::infinity();
    let v = MotivicValue::from_terms(&[(3, 2), (0, -1)]).with_denominator_factors(&[2]);
    assert!(inf.add(&v).is_infinite());
    assert!(v.add(&inf).is_infinite());
    assert!(inf.add(&inf).is_infinite());
}

#[test]
fn infinity_equality_is_strict() {
    let inf = MotivicValue::infinity();
    assert!(inf.equals(&MotivicValue::infinity()));
    assert!(!inf.equals(&MotivicValue::zero()));
    assert!(!MotivicValue::zero().equals(&inf));
}
