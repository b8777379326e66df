//! Finite sets of nonnegative integers on an explicit ground range, with
//! the sumset arithmetic the rest of the crate is built on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};

/// A set of nonnegative integers drawn from the ground range `[lo, hi]`.
///
/// The ground range is part of the value: `{4,5}` inside `[1,5]` and `{4,5}`
/// inside `[0,9]` are different `IntSet`s that hold the same members. An empty
/// ground range is written with `lo = hi + 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntSetRepr", into = "IntSetRepr")]
pub struct IntSet {
    lo: usize,
    hi: usize,
    bits: Bits,
}

#[derive(Serialize, Deserialize)]
struct IntSetRepr {
    lo: usize,
    hi: usize,
    members: Vec<usize>,
}

impl TryFrom<IntSetRepr> for IntSet {
    type Error = Error;

    fn try_from(r: IntSetRepr) -> Result<Self> {
        IntSet::from_members(r.lo, r.hi, r.members)
    }
}

impl From<IntSet> for IntSetRepr {
    fn from(s: IntSet) -> Self {
        IntSetRepr {
            lo: s.lo,
            hi: s.hi,
            members: s.to_vec(),
        }
    }
}

impl IntSet {
    /// The empty set on `[lo, hi]`. Panics unless `lo <= hi + 1`.
    pub fn empty(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi + 1, "ground range [{lo}, {hi}] is malformed");
        IntSet {
            lo,
            hi,
            bits: Bits::new(hi + 1),
        }
    }

    /// Empty subset of `[1, n]`.
    pub fn empty_in(n: usize) -> Self {
        IntSet::empty(1, n)
    }

    /// Every integer of `[lo, hi]`, on that same ground range.
    pub fn interval(lo: usize, hi: usize) -> Self {
        let mut s = IntSet::empty(lo, hi);
        for x in lo..=hi {
            s.bits.set(x);
        }
        s
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(lo: usize, hi: usize, members: I) -> Result<Self> {
        if lo > hi + 1 {
            return Err(Error::Precondition(format!("ground range [{lo}, {hi}] is malformed")));
        }
        let mut s = IntSet::empty(lo, hi);
        for m in members {
            s.insert(m)?;
        }
        Ok(s)
    }

    /// Subset of `[1, n]`.
    pub fn in_range<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        IntSet::from_members(1, n, members)
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn insert(&mut self, x: usize) -> Result<()> {
        if x < self.lo || x > self.hi {
            return Err(Error::OutOfRange {
                value: x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        self.bits.set(x);
        Ok(())
    }

    pub fn remove(&mut self, x: usize) {
        self.bits.clear(x);
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.get(x)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.bits.first_one()
    }

    pub fn max(&self) -> Option<usize> {
        self.bits.last_one()
    }

    /// Same members on a new ground range; fails if a member falls outside it.
    pub fn with_ground(&self, lo: usize, hi: usize) -> Result<IntSet> {
        IntSet::from_members(lo, hi, self.iter())
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// Members of `self` not in `other`, on `self`'s ground.
    pub fn difference(&self, other: &IntSet) -> IntSet {
        let mut out = self.clone();
        for x in other.iter() {
            out.remove(x);
        }
        out
    }

    pub fn intersects(&self, other: &IntSet) -> bool {
        self.iter().any(|x| other.contains(x))
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}⊆[{},{}]", self.lo, self.hi)
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Result of a capped sumset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sumset {
    pub set: IntSet,
    /// Set when at least one sum exceeded the cap and was dropped.
    pub overflow: bool,
}

/// `{x + y : x ∈ a, y ∈ b} ∩ [0, cap]`.
///
/// The result's ground is `[a.lo + b.lo, a.hi + b.hi]` clipped to `cap`.
pub fn sumset(a: &IntSet, b: &IntSet, cap: usize) -> Sumset {
    let hi = (a.hi + b.hi).min(cap);
    let lo = (a.lo + b.lo).min(hi + 1);
    let mut bits = Bits::new(hi + 1);
    for x in a.iter() {
        if x > cap {
            break;
        }
        bits.or_shl(&b.bits, x);
    }
    let overflow = match (a.max(), b.max()) {
        (Some(x), Some(y)) => x + y > cap,
        _ => false,
    };
    Sumset {
        set: IntSet { lo, hi, bits },
        overflow,
    }
}

/// `kA ∩ [0, cap]`, repetition allowed; `0A = {0}`.
pub fn k_fold_sumset(a: &IntSet, k: usize, cap: usize) -> IntSet {
    let mut acc = IntSet::from_members(0, 0, [0]).expect("0 lies in [0,0]");
    for _ in 0..k {
        acc = sumset(&acc, a, cap).set;
    }
    acc
}

/// Whether `target` is a sum of members of `a` with repetition (the empty sum
/// gives 0).
pub fn sigma_contains(a: &IntSet, target: usize) -> bool {
    let mut reach = Bits::new(target + 1);
    reach.set(0);
    for x in a.iter() {
        if x == 0 {
            continue;
        }
        if x > target {
            break;
        }
        close_under_step(&mut reach, x);
        if reach.get(target) {
            return true;
        }
    }
    reach.get(target)
}

/// `reach |= reach + {0, x, 2x, ...}` by doubling the step.
pub(crate) fn close_under_step(reach: &mut Bits, x: usize) {
    let mut step = x;
    while step < reach.len() {
        let snapshot = reach.clone();
        reach.or_shl(&snapshot, step);
        step *= 2;
    }
}

/// No `x, y ∈ a` (possibly equal) with `x + y ∈ a`.
pub fn is_sum_free(a: &IntSet) -> bool {
    let mut shifted = Bits::new(a.bits.len());
    for x in a.iter() {
        shifted.or_shl(&a.bits, x);
    }
    shifted.is_disjoint(&a.bits)
}

/// Number of `k`-subsets of `a` (distinct members) that violate
/// sum-freeness or the forbidden sum `2n+1`: for `k = 3`, Schur triples
/// `x + y = z` together with triples summing to `2n+1`, each counted once;
/// for `k ∈ {4, 5}`, subsets summing to `2n+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigCount {
    pub k: usize,
    pub count: u64,
}

pub fn count_forbidden_k_subsets(a: &IntSet, n: usize, k: usize) -> Result<ConfigCount> {
    if !(3..=5).contains(&k) {
        return Err(Error::UnsupportedConfig(k));
    }
    if let Some(x) = a.iter().find(|&x| x == 0 || x > n) {
        return Err(Error::OutOfRange { value: x, lo: 1, hi: n });
    }
    let target = 2 * n + 1;
    let members = a.to_vec();
    let mut count = distinct_subsets_with_sum(&members, k, target);
    if k == 3 {
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                let z = x + y;
                // z > y > x, so the three are distinct.
                if a.contains(z) && x + y + z != target {
                    count += 1;
                }
            }
        }
    }
    Ok(ConfigCount { k, count })
}

/// Number of `k`-element subsets of `members` whose sum is exactly `target`.
fn distinct_subsets_with_sum(members: &[usize], k: usize, target: usize) -> u64 {
    // ways[j][s]: j-subsets of the members seen so far with sum s
    let mut ways = vec![vec![0u64; target + 1]; k + 1];
    ways[0][0] = 1;
    for &x in members {
        for j in (1..=k).rev() {
            for s in (x..=target).rev() {
                ways[j][s] += ways[j - 1][s - x];
            }
        }
    }
    ways[k][target]
}

/// The interval `[⌈2(n+1)/3⌉, n]`, the largest family of sum-free sets
/// avoiding `2n+1` as a sum. Its ground range is `[1, n]`.
pub fn extremal_interval(n: usize) -> IntSet {
    let lo = (2 * (n + 1)).div_ceil(3);
    IntSet::from_members(1, n, lo..=n).expect("interval lies in [1, n]")
}

/// `|a \ [⌈2(n+1)/3⌉, n]|`.
pub fn distance_to_extremal(a: &IntSet, n: usize) -> usize {
    let lo = (2 * (n + 1)).div_ceil(3);
    a.iter().filter(|&x| x < lo || x > n).count()
}
