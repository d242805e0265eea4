//! Eventually periodic subsets of ℕ naming unions of dyadic ε-intervals.
//!
//! Block `k` stands for the interval `(2^-(k+1), 2^-k]` of the regularization
//! parameter. A [`BlockSet`] is stored as a finite preperiod followed by a
//! period repeated forever, always in canonical form: minimal period length,
//! then minimal preperiod length. Two block sets denote the same subset of ℕ
//! iff they are equal as values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GqError, Result};
use crate::rational::lcm;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BlockSet {
    pre: Vec<bool>,
    per: Vec<bool>,
}

impl BlockSet {
    /// Builds and canonicalizes. Fails on an empty period.
    pub fn new(pre: Vec<bool>, per: Vec<bool>) -> Result<Self> {
        if per.is_empty() {
            return Err(GqError::Parse("block set period must be nonempty".into()));
        }
        let mut s = BlockSet { pre, per };
        s.canonicalize();
        Ok(s)
    }

    pub fn empty() -> Self {
        BlockSet { pre: vec![], per: vec![false] }
    }

    pub fn all() -> Self {
        BlockSet { pre: vec![], per: vec![true] }
    }

    /// Purely periodic set from a bit pattern (`"10"` is the even blocks).
    pub fn periodic(bits: &[bool]) -> Self {
        BlockSet::new(vec![], bits.to_vec()).expect("nonempty period")
    }

    /// The finite set `{k : k in ks}`.
    pub fn finite(ks: &[usize]) -> Self {
        let len = ks.iter().max().map_or(0, |m| m + 1);
        let mut pre = vec![false; len];
        for &k in ks {
            pre[k] = true;
        }
        BlockSet::new(pre, vec![false]).expect("nonempty period")
    }

    pub fn evens() -> Self {
        BlockSet::periodic(&[true, false])
    }

    pub fn odds() -> Self {
        BlockSet::periodic(&[false, true])
    }

    pub fn preperiod(&self) -> &[bool] {
        &self.pre
    }

    pub fn period(&self) -> &[bool] {
        &self.per
    }

    pub fn contains(&self, k: usize) -> bool {
        let m = self.pre.len();
        if k < m {
            self.pre[k]
        } else {
            self.per[(k - m) % self.per.len()]
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pre.iter().all(|b| !b) && self.per.iter().all(|b| !b)
    }

    pub fn is_all(&self) -> bool {
        self.pre.iter().all(|&b| b) && self.per.iter().all(|&b| b)
    }

    /// True iff the set is infinite, i.e. its dyadic intervals reach every
    /// neighbourhood of 0.
    pub fn accumulates(&self) -> bool {
        self.per.iter().any(|&b| b)
    }

    /// Both the set and its complement accumulate at 0.
    pub fn is_splitting(&self) -> bool {
        self.accumulates() && self.per.iter().any(|&b| !b)
    }

    pub fn complement(&self) -> Self {
        // flipping every bit keeps the encoding canonical
        BlockSet {
            pre: self.pre.iter().map(|b| !b).collect(),
            per: self.per.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    /// The purely periodic set that agrees with `self` on all large blocks.
    ///
    /// Sets with the same tail name the same germ-at-0 region, so the
    /// generalized-scalar layer stores only tails.
    pub fn tail(&self) -> Self {
        let m = self.pre.len();
        let p = self.per.len();
        let per = (0..p).map(|i| self.per[(i + p - m % p) % p]).collect();
        BlockSet::new(vec![], per).expect("nonempty period")
    }

    /// Members in increasing order, forever (finite sets end).
    pub fn blocks(&self) -> impl Iterator<Item = usize> + '_ {
        let accumulating = self.accumulates();
        let limit = if accumulating { usize::MAX } else { self.pre.len() };
        (0..limit).filter(move |&k| self.contains(k))
    }

    /// Members `k` with `lo <= k <= hi`.
    pub fn blocks_in(&self, lo: usize, hi: usize) -> Vec<usize> {
        (lo..=hi).filter(|&k| self.contains(k)).collect()
    }

    /// Midpoints `3·2^-(k+2)` of the first `count` blocks of the set,
    /// strictly decreasing.
    pub fn sample_epsilons(&self, count: usize) -> Result<Vec<f64>> {
        if !self.accumulates() {
            return Err(GqError::NotAccumulating(self.clone()));
        }
        Ok(self.blocks().take(count).map(block_midpoint).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        let m = self.pre.len().max(other.pre.len());
        let p = lcm(self.per.len(), other.per.len());
        let bit = |k: usize| f(self.contains(k), other.contains(k));
        let pre = (0..m).map(bit).collect();
        let per = (m..m + p).map(bit).collect();
        BlockSet::new(pre, per).expect("nonempty period")
    }

    fn canonicalize(&mut self) {
        let p = self.per.len();
        if let Some(d) = (1..p).find(|&d| p % d == 0 && (d..p).all(|i| self.per[i] == self.per[i - d])) {
            self.per.truncate(d);
        }
        // shift the period left while the last preperiod bit repeats it
        while let Some(&last) = self.pre.last() {
            if last != *self.per.last().unwrap() {
                break;
            }
            self.pre.pop();
            self.per.rotate_right(1);
        }
    }
}

/// Midpoint of block `k`.
pub fn block_midpoint(k: usize) -> f64 {
    3.0 * 2f64.powi(-(k as i32 + 2))
}

/// Block index containing `eps` in `(0, 1]`.
pub fn block_of(eps: f64) -> usize {
    debug_assert!(eps > 0.0 && eps <= 1.0);
    let mut k = (-eps.log2()).floor().max(0.0) as usize;
    // correct for rounding at the dyadic endpoints
    while 2f64.powi(-(k as i32)) < eps {
        k -= 1;
    }
    while 2f64.powi(-(k as i32 + 1)) >= eps {
        k += 1;
    }
    k
}

fn bits(s: &[bool]) -> String {
    s.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(GqError::Parse(format!("bad bit {c:?} in block set"))),
        })
        .collect()
}

impl fmt::Display for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pre={};per={}", bits(&self.pre), bits(&self.per))
    }
}

impl fmt::Debug for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockSet({self})")
    }
}

impl FromStr for BlockSet {
    type Err = GqError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GqError::Parse(format!("expected `pre=<bits>;per=<bits>`, got {s:?}"));
        let (a, b) = s.split_once(';').ok_or_else(bad)?;
        let pre = a.trim().strip_prefix("pre=").ok_or_else(bad)?;
        let per = b.trim().strip_prefix("per=").ok_or_else(bad)?;
        BlockSet::new(parse_bits(pre)?, parse_bits(per)?)
    }
}

impl TryFrom<String> for BlockSet {
    type Error = GqError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BlockSet> for String {
    fn from(b: BlockSet) -> String {
        b.to_string()
    }
}
