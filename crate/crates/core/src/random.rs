//! Random exact instances for property tests, the acceptance suite and the
//! sampling oracle.
//!
//! Exponents are `k/d` with `d ∈ {1, 2}` in `[-3, 3]`, coefficients are small
//! nonzero rationals, partitions have period at most 6 and at most three
//! branches. All germs are exact.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::blocksets::BlockSet;
use crate::ghquat::GenQuaternion;
use crate::gnum::GenScalar;
use crate::puiseux::{Coeff, Precision, PuiseuxGerm};
use crate::rational::{qf, Q};

pub fn exponent<R: Rng + ?Sized>(rng: &mut R) -> Q {
    let d = if rng.gen_bool(0.5) { 1 } else { 2 };
    qf(rng.gen_range(-3 * d..=3 * d), d)
}

pub fn coefficient<R: Rng + ?Sized>(rng: &mut R) -> Q {
    let n = *[-4, -3, -2, -1, 1, 2, 3, 4].choose(rng).unwrap();
    qf(n, if rng.gen_bool(0.5) { 1 } else { 2 })
}

/// Exact germ with 1 to 3 terms (or zero when `allow_zero` hits).
pub fn germ<R: Rng + ?Sized>(rng: &mut R, zero_weight: f64) -> PuiseuxGerm {
    if rng.gen_bool(zero_weight) {
        return PuiseuxGerm::zero();
    }
    loop {
        let len = rng.gen_range(1..=3);
        let terms = (0..len).map(|_| (exponent(rng), Coeff::Exact(coefficient(rng)))).collect();
        let g = PuiseuxGerm::new(terms, Precision::Exact);
        if !g.is_exact_zero() {
            return g;
        }
    }
}

/// Block set with preperiod below 3 and period at most 6.
pub fn block_set<R: Rng + ?Sized>(rng: &mut R) -> BlockSet {
    let pre = (0..rng.gen_range(0..3)).map(|_| rng.gen_bool(0.5)).collect();
    let per = (0..rng.gen_range(1..=6)).map(|_| rng.gen_bool(0.5)).collect();
    BlockSet::new(pre, per).expect("nonempty period")
}

/// Block set whose tail and complement tail are both nonempty.
pub fn splitting_set<R: Rng + ?Sized>(rng: &mut R) -> BlockSet {
    loop {
        let s = block_set(rng);
        if s.is_splitting() {
            return s;
        }
    }
}

/// Random partition of ℕ into `1..=3` labelled pieces, period at most 6.
pub fn partition<R: Rng + ?Sized>(rng: &mut R) -> Vec<BlockSet> {
    let parts = rng.gen_range(1..=3usize);
    let pre_len = rng.gen_range(0..3);
    let per_len = rng.gen_range(1..=6);
    let pre: Vec<usize> = (0..pre_len).map(|_| rng.gen_range(0..parts)).collect();
    let per: Vec<usize> = (0..per_len).map(|_| rng.gen_range(0..parts)).collect();
    (0..parts)
        .map(|p| {
            BlockSet::new(pre.iter().map(|&l| l == p).collect(), per.iter().map(|&l| l == p).collect())
                .expect("nonempty period")
        })
        .filter(|s| !s.is_empty())
        .collect()
}

/// Scalar whose branch germs are zero with probability `zero_weight`.
pub fn scalar_with<R: Rng + ?Sized>(rng: &mut R, zero_weight: f64) -> GenScalar {
    let branches = partition(rng).into_iter().map(|s| (s, germ(rng, zero_weight))).collect();
    GenScalar::from_branches(branches).expect("partition covers ℕ")
}

pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> GenScalar {
    scalar_with(rng, 0.25)
}

pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> GenScalar {
    loop {
        let x = scalar(rng);
        if x != GenScalar::zero() {
            return x;
        }
    }
}

pub fn unit_scalar<R: Rng + ?Sized>(rng: &mut R) -> GenScalar {
    scalar_with(rng, 0.0)
}

/// Quaternion whose components vanish independently with probability 1/4.
pub fn quaternion<R: Rng + ?Sized>(rng: &mut R) -> GenQuaternion {
    let mut c = || if rng.gen_bool(0.25) { GenScalar::zero() } else { scalar(rng) };
    GenQuaternion::new(c(), c(), c(), c())
}

pub fn nonzero_quaternion<R: Rng + ?Sized>(rng: &mut R) -> GenQuaternion {
    loop {
        let x = quaternion(rng);
        if x != GenQuaternion::zero() {
            return x;
        }
    }
}

pub fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> GenQuaternion {
    loop {
        let x = quaternion(rng);
        if x.is_unit().expect("exact") {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partitions_cover_naturals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = partition(&mut rng);
            let all = p.iter().fold(BlockSet::empty(), |acc, s| acc.union(s));
            assert!(all.is_all());
        }
    }

    #[test]
    fn generators_are_exact_and_reproducible() {
        let a: Vec<_> = (0..20).map({
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            move |_| quaternion(&mut rng)
        }).collect();
        let b: Vec<_> = (0..20).map({
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            move |_| quaternion(&mut rng)
        }).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.is_exact()));
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        assert!((0..50).all(|_| unit_scalar(&mut rng).is_unit().unwrap()));
    }
}
