//! Algebraic invariants over randomly generated exact instances.

use gq_core::blocksets::BlockSet;
use gq_core::ghquat::{residual_order, scalar_residual_order, GenQuaternion};
use gq_core::gnum::{GenScalar, Valuation};
use gq_core::ideals::FgIdeal;
use gq_core::oracle::cross_validate_suite;
use gq_core::puiseux::{Coeff, Precision, PuiseuxGerm};
use gq_core::random;
use gq_core::rational::{q, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..max)
}

fn block_set() -> impl Strategy<Value = BlockSet> {
    (bits(5), prop::collection::vec(any::<bool>(), 1..7)).prop_map(|(p, c)| BlockSet::new(p, c).unwrap())
}

fn scalar() -> impl Strategy<Value = GenScalar> {
    any::<u64>().prop_map(|s| random::scalar(&mut rng(s)))
}

fn quaternion() -> impl Strategy<Value = GenQuaternion> {
    any::<u64>().prop_map(|s| random::quaternion(&mut rng(s)))
}

fn germ() -> impl Strategy<Value = PuiseuxGerm> {
    any::<u64>().prop_map(|s| random::germ(&mut rng(s), 0.0))
}

fn order() -> Q {
    q(8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boolean_algebra_laws(a in block_set(), b in block_set(), c in block_set()) {
        prop_assert_eq!(a.union(&b.union(&c)), a.union(&b).union(&c));
        prop_assert_eq!(a.intersection(&b.intersection(&c)), a.intersection(&b).intersection(&c));
        prop_assert_eq!(a.intersection(&b.union(&c)), a.intersection(&b).union(&a.intersection(&c)));
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.intersection(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
        prop_assert!(a.accumulates() || a.complement().accumulates());
    }

    #[test]
    fn canonical_form_is_stable(pre in bits(8), per in prop::collection::vec(any::<bool>(), 1..9)) {
        let s = BlockSet::new(pre.clone(), per.clone()).unwrap();
        let again = BlockSet::new(s.preperiod().to_vec(), s.period().to_vec()).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(s.to_string().parse::<BlockSet>().unwrap(), s.clone());
        for k in 0..40 {
            let raw = if k < pre.len() { pre[k] } else { per[(k - pre.len()) % per.len()] };
            prop_assert_eq!(s.contains(k), raw);
        }
    }

    #[test]
    fn germ_inverse_residual(f in germ()) {
        let g = f.invert(&order()).unwrap();
        let res = &(&f * &g) - &PuiseuxGerm::one();
        prop_assert!(res.residual_order().is_none_or(|m| m > order()), "{} * {} - 1 = {}", f, g, res);
    }

    #[test]
    fn germ_sqrt_residual(f in germ()) {
        let f = &f * &f;
        let r = f.sqrt(&order()).unwrap();
        let rel = &(&r * &r) - &f;
        let v = f.leading_exponent().unwrap().unwrap().clone();
        if r.has_exact_coeffs() {
            prop_assert!(rel.residual_order().is_none_or(|m| m > &v + order()), "sqrt({}) = {}", f, r);
        } else {
            let eps = 2f64.powi(-20);
            let want = f.eval(eps);
            prop_assert!(((r.eval(eps).powi(2) - want) / want).abs() < 1e-9);
        }
    }

    #[test]
    fn germ_leading_exponent_is_additive(f in germ(), g in germ()) {
        let p = &f * &g;
        let sum = f.leading_exponent().unwrap().unwrap() + g.leading_exponent().unwrap().unwrap();
        prop_assert_eq!(p.leading_exponent().unwrap().unwrap(), &sum);
    }

    #[test]
    fn germ_json_round_trip(f in germ()) {
        let js = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<PuiseuxGerm>(&js).unwrap(), f);
    }

    #[test]
    fn scalar_ring_laws(x in scalar(), y in scalar(), z in scalar()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x - &x), &GenScalar::zero());
        prop_assert_eq!(&x * &GenScalar::one(), x.clone());
    }

    #[test]
    fn scalar_dichotomy(x in scalar()) {
        prop_assume!(x != GenScalar::zero());
        match x.annihilator_idempotent() {
            Ok(e) => {
                prop_assert!(!x.is_unit().unwrap());
                prop_assert!(!e.is_zero());
                prop_assert_eq!(&x * &e.to_scalar(), GenScalar::zero());
            }
            Err(_) => prop_assert!(x.is_unit().unwrap()),
        }
    }

    #[test]
    fn valuation_laws(x in scalar(), y in scalar()) {
        let vs = (&x + &y).valuation().unwrap();
        prop_assert!(vs >= x.valuation().unwrap().min(y.valuation().unwrap()));
        if x.is_unit().unwrap() && y.is_unit().unwrap() {
            let (a, b) = (x.valuation().unwrap(), y.valuation().unwrap());
            let vxy = (&x * &y).valuation().unwrap();
            // additivity needs a branch where both attain their minimum; the
            // product never drops below the sum
            let (Valuation::Finite(a), Valuation::Finite(b)) = (a, b) else { unreachable!() };
            prop_assert!(vxy >= Valuation::Finite(&a + &b));
            let (xs, ys) = (x.branches(), y.branches());
            if xs.len() == 1 && ys.len() == 1 {
                prop_assert_eq!(vxy, Valuation::Finite(a + b));
            }
        }
        prop_assert!((&x + &y).sharp_norm().unwrap() <= x.sharp_norm().unwrap().max(y.sharp_norm().unwrap()));
    }

    #[test]
    fn order_laws(x in scalar(), y in scalar()) {
        let (a, b) = (x.abs().unwrap(), y.abs().unwrap());
        prop_assert!(a.is_qpositive().unwrap());
        prop_assert_eq!(&a * &a, &x * &x);
        prop_assert!((&a + &b).is_qpositive().unwrap());
        prop_assert!((&a * &b).is_qpositive().unwrap());
        if x.is_qpositive().unwrap() && (-&x).is_qpositive().unwrap() {
            prop_assert_eq!(x.clone(), GenScalar::zero());
        }
        let s = (&x * &x).sqrt(&order()).unwrap();
        prop_assert!(s.is_qpositive().unwrap_or(true));
    }

    #[test]
    fn exchange_and_density(x in scalar(), s in 0i64..6) {
        let e = x.exchange_idempotent().unwrap().to_scalar();
        prop_assert_eq!(&e * &e, e.clone());
        prop_assert!((&x + &e).is_unit().unwrap());
        let u = x.unit_within_radius(&q(s)).unwrap();
        prop_assert!(u.is_unit().unwrap());
        prop_assert!(u.distance(&x).unwrap() <= (-(s as f64)).exp());
    }

    #[test]
    fn idempotent_lattice(a in block_set(), b in block_set()) {
        let (ca, cb) = (GenScalar::chi(&a), GenScalar::chi(&b));
        prop_assert_eq!(&ca * &cb, GenScalar::chi(&a.intersection(&b)));
        prop_assert_eq!(&ca + &GenScalar::chi(&a.complement()), GenScalar::one());
        prop_assert_eq!(ca.is_idempotent().unwrap().set().clone(), a.tail());
    }

    #[test]
    fn scalar_json_round_trip(x in scalar()) {
        let js = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<GenScalar>(&js).unwrap(), x);
    }

    #[test]
    fn quaternion_norm_is_multiplicative(x in quaternion(), y in quaternion()) {
        prop_assert_eq!((&x * &y).normsq(), &x.normsq() * &y.normsq());
        prop_assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
        prop_assert!(x.normsq().is_qpositive().unwrap());
    }

    #[test]
    fn quaternion_dichotomy(x in quaternion()) {
        prop_assume!(x != GenQuaternion::zero());
        if x.is_unit().unwrap() {
            let inv = x.invert(&order()).unwrap();
            prop_assert!(residual_order(&(&(&x * &inv) - &GenQuaternion::one())).is_none_or(|m| m > order()));
        } else {
            let e = GenQuaternion::embed(x.zero_divisor_witness().unwrap().to_scalar());
            prop_assert_eq!(&x * &e, GenQuaternion::zero());
            prop_assert_eq!(&e * &x, GenQuaternion::zero());
        }
    }

    #[test]
    fn quaternion_metrics_agree(x in quaternion(), y in quaternion()) {
        prop_assert_eq!(x.metric_d(&y).unwrap(), x.metric_dpi(&y).unwrap());
    }

    #[test]
    fn polar_round_trip(seed in any::<u64>()) {
        let x = random::unit_quaternion(&mut rng(seed));
        let p = x.polar(&order()).unwrap();
        let rt = &p.theta.scale(&p.n) - &x;
        if p.n.has_exact_coeffs() {
            prop_assert!(rt.vanishes_beyond(&order()));
            let inv = p.theta.invert(&order()).unwrap();
            prop_assert!((&inv - &p.theta.conj()).vanishes_beyond(&order()));
        }
    }

    #[test]
    fn bezout_and_duo(a in quaternion(), b in quaternion(), x in quaternion()) {
        let i = FgIdeal::quaternion(vec![a.clone(), b.clone()]).unwrap();
        prop_assert!(i.bezout_certificate(&order()).unwrap().verifies());
        let pa = FgIdeal::quaternion(vec![a.clone()]).unwrap();
        prop_assert!(pa.contains_element(&(&x * &a)).unwrap());
        prop_assert!(pa.contains_element(&(&a * &x)).unwrap());
    }

    #[test]
    fn ideal_structure(a in quaternion(), b in quaternion(), x in quaternion(), n in 1u32..4) {
        let i = FgIdeal::quaternion(vec![a, b]).unwrap();
        prop_assert!(i.idempotency_check());
        prop_assert!(i.radical_check(&x, n).unwrap());
        prop_assert_eq!(i.is_essential(), i.norm_ideal().is_essential());
        prop_assert_eq!(i.contains_element(&x).unwrap(), i.norm_ideal().contains_scalar(&x.normsq()).unwrap());
        if let Some(e) = i.containing_idempotent() {
            let pe = FgIdeal::scalar(vec![e.to_scalar()]).unwrap();
            prop_assert!(pe.contains(&i));
        }
    }

    #[test]
    fn convexity(g in scalar(), x in scalar(), y in scalar()) {
        let i = FgIdeal::scalar(vec![g]).unwrap();
        prop_assert_eq!(i.contains_scalar(&x).unwrap(), i.contains_scalar(&x.abs().unwrap()).unwrap());
        let (ax, ay) = (x.abs().unwrap(), y.abs().unwrap());
        if ay.order_leq(&ax).unwrap() && i.contains_scalar(&x).unwrap() {
            prop_assert!(i.contains_scalar(&y).unwrap());
        }
    }
}

#[test]
fn oracle_is_deterministic() {
    let a = cross_validate_suite(7, 40).unwrap();
    let b = cross_validate_suite(7, 40).unwrap();
    assert_eq!(a, b);
    assert!(a.mismatches.is_empty());
    assert_eq!(cross_validate_suite(1, 100).unwrap().mismatches.len(), 0);
}

#[test]
fn inexact_germs_stay_labelled() {
    let g = PuiseuxGerm::new(vec![(q(0), Coeff::Approx(1.5))], Precision::Exact);
    let x = GenScalar::from_germ(g);
    assert!(x.is_unit().is_err());
    assert!(scalar_residual_order(&(&x - &x)).is_none());
}
