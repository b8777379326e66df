//! Brute-force baselines and small-scale checkers. Nothing here shares code
//! with the search engine beyond the plain set predicates in [`crate::sets`].

use std::collections::BTreeSet;

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::ConstraintProfile;
use crate::sets::{count_forbidden_k_subsets, distance_to_extremal, is_sum_free, sumset, ConfigCount, IntSet};

/// Largest `n` the `2^n` scans accept.
pub const NAIVE_LIMIT: usize = 22;

fn subset_of(n: usize, mask: u32) -> IntSet {
    IntSet::in_range(n, (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)).expect("members lie in [1, n]")
}

fn check_naive(n: usize) -> Result<()> {
    if n > NAIVE_LIMIT {
        return Err(Error::TooLarge { n, limit: NAIVE_LIMIT });
    }
    Ok(())
}

/// Admissible subsets of `[1, n]` counted by testing all `2^n` of them.
pub fn naive_count(n: usize, profile: &ConstraintProfile) -> Result<u64> {
    check_naive(n)?;
    Ok((0u32..1 << n)
        .into_par_iter()
        .filter(|&m| profile.admits(&subset_of(n, m), n))
        .count() as u64)
}

/// Largest admissible size and every admissible set of that size, in
/// increasing mask order.
pub fn naive_max(n: usize, profile: &ConstraintProfile) -> Result<(usize, Vec<IntSet>)> {
    check_naive(n)?;
    let admissible: Vec<IntSet> = (0u32..1 << n)
        .into_par_iter()
        .map(|m| subset_of(n, m))
        .filter(|a| profile.admits(a, n))
        .collect();
    let best = admissible.iter().map(IntSet::len).max().unwrap_or(0);
    Ok((best, admissible.into_iter().filter(|a| a.len() == best).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Freiman {
    /// `|A| < 2` or `|A+A| > 3|A| - 4`.
    NotApplicable { sumset_size: usize },
    Checked {
        holds: bool,
        ap_length: usize,
        bound: usize,
    },
}

impl Freiman {
    pub fn violated(&self) -> bool {
        matches!(self, Freiman::Checked { holds: false, .. })
    }
}

/// Length of the shortest arithmetic progression containing `a`; the common
/// difference is the gcd of the gaps. `None` when `|a| < 2`.
pub fn shortest_ap_length(a: &IntSet) -> Option<usize> {
    let v = a.to_vec();
    if v.len() < 2 {
        return None;
    }
    let d = v.windows(2).fold(0, |g, w| g.gcd(&(w[1] - w[0])));
    Some((v[v.len() - 1] - v[0]) / d + 1)
}

pub fn freiman_ap_check(a: &IntSet) -> Freiman {
    let k = a.len();
    let cap = a.hi().saturating_mul(2);
    let ss = sumset(a, a, cap).set.len();
    if k < 2 || ss + 4 > 3 * k {
        return Freiman::NotApplicable { sumset_size: ss };
    }
    let ap_length = shortest_ap_length(a).expect("at least two members");
    let bound = ss + 1 - k;
    Freiman::Checked {
        holds: ap_length <= bound,
        ap_length,
        bound,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreimanScan {
    pub examined: u64,
    pub applicable: u64,
    pub violations: Vec<Vec<usize>>,
}

/// Every `A ⊆ [1, hi]` with `min_size ≤ |A| ≤ max_size`, checked with
/// 64-bit masks (so `hi ≤ 31`). Work is split by size and least element.
pub fn freiman_scan(hi: usize, min_size: usize, max_size: usize) -> Result<FreimanScan> {
    if hi > 31 {
        return Err(Error::TooLarge { n: hi, limit: 31 });
    }
    let min_size = min_size.max(2);
    let jobs: Vec<(usize, usize)> = (min_size..=max_size.min(hi))
        .flat_map(|k| (1..=hi).map(move |m| (k, m)))
        .collect();
    let parts: Vec<FreimanScan> = jobs.into_par_iter().map(|(k, m)| scan_fixed_min(hi, k, m)).collect();
    let mut out = FreimanScan::default();
    for p in parts {
        out.examined += p.examined;
        out.applicable += p.applicable;
        out.violations.extend(p.violations);
    }
    Ok(out)
}

/// Sets of size `k` with least element `m`; bit `x` of a mask stands for `x`.
fn scan_fixed_min(hi: usize, k: usize, m: usize) -> FreimanScan {
    let mut out = FreimanScan::default();
    let free = hi - m;
    let rest = k - 1;
    if rest > free {
        return out;
    }
    // Gosper's hack over `rest`-subsets of the `free` slots above `m`.
    let mut c: u64 = (1u64 << rest) - 1;
    let limit = 1u64 << free;
    loop {
        let a = 1u64 << m | c << (m + 1);
        out.examined += 1;
        let mut doubled = 0u64;
        let mut r = a;
        while r != 0 {
            let x = r.trailing_zeros();
            r &= r - 1;
            doubled |= a << x;
        }
        let ss = doubled.count_ones() as usize;
        if ss + 4 <= 3 * k {
            out.applicable += 1;
            let mut d = 0u32;
            let mut r = a & (a - 1);
            while r != 0 {
                d = d.gcd(&(r.trailing_zeros() - m as u32));
                r &= r - 1;
            }
            let top = 63 - a.leading_zeros();
            let ap_length = ((top - m as u32) / d + 1) as usize;
            if ap_length > ss + 1 - k {
                out.violations.push((0..64).filter(|i| a >> i & 1 == 1).collect());
            }
        }
        if rest == 0 {
            break;
        }
        let low = c & c.wrapping_neg();
        let ripple = c + low;
        c = (((ripple ^ c) >> 2) / low) | ripple;
        if c >= limit {
            break;
        }
    }
    out
}

/// `|A + B| ≥ |A| + |B| - 1`.
pub fn sumset_bound_check(a: &IntSet, b: &IntSet) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = sumset(a, b, a.hi() + b.hi());
    Ok(s.set.len() + 1 >= a.len() + b.len())
}

/// Sets of `l` distinct positive integers summing to `k`.
pub fn count_partitions_distinct(k: usize, l: usize) -> u128 {
    // ways[j][s]: j distinct parts from those tried so far, summing to s
    let mut ways = vec![vec![0u128; k + 1]; l + 1];
    ways[0][0] = 1;
    for part in 1..=k {
        for j in (1..=l).rev() {
            for s in (part..=k).rev() {
                ways[j][s] += ways[j - 1][s - part];
            }
        }
    }
    ways[l][k]
}

/// `(e²k/l²)^l`.
pub fn partition_bound(k: usize, l: usize) -> f64 {
    let (k, l) = (k as f64, l as f64);
    (std::f64::consts::E.powi(2) * k / (l * l)).powf(l)
}

/// `(k, l, count)` for every pair with `1 ≤ k ≤ k_max`, `1 ≤ l ≤ l_max`
/// whose count exceeds the bound.
pub fn partition_bound_violations(k_max: usize, l_max: usize) -> Vec<(usize, usize, u128)> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        for l in 1..=l_max {
            let c = count_partitions_distinct(k, l);
            if c as f64 > partition_bound(k, l) {
                out.push((k, l, c));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternativeDetail {
    pub index: u8,
    pub satisfied: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranReport {
    /// Indices in `1..=5` of the alternatives `A` satisfies.
    pub alternatives_satisfied: BTreeSet<u8>,
    pub eta: Ratio<i64>,
    /// Rational upper bound on `√η` used for the margins of alternative 5.
    pub sqrt_eta_bound: Ratio<i128>,
    pub details: Vec<AlternativeDetail>,
}

const SQRT_SCALE: i128 = 1 << 20;

/// Least multiple of `1/(q·SQRT_SCALE)` that is `≥ √(p/q)`.
fn sqrt_upper(eta: Ratio<i64>) -> Ratio<i128> {
    let (p, q) = (*eta.numer() as i128, *eta.denom() as i128);
    // √(p/q) = √(p·q)/q
    let v = (p * q * SQRT_SCALE * SQRT_SCALE) as u128;
    let mut s = v.sqrt();
    if s * s < v {
        s += 1;
    }
    Ratio::new(s as i128, q * SQRT_SCALE)
}

/// Which of the five structural alternatives a large sum-free `A ⊆ [1, n]`
/// falls into:
///
/// 1. every member is `1` or `4 mod 5`;
/// 2. every member is `2` or `3 mod 5`;
/// 3. every member is odd;
/// 4. `min(A) ≥ |A|`;
/// 5. `A ⊆ [(1/5 - 200√η)n, (2/5 + 200√η)n] ∪ [(4/5 - 200√η)n, n]`.
pub fn tran_classify(a: &IntSet, n: usize, eta: Ratio<i64>) -> Result<TranReport> {
    if *eta.numer() < 0 {
        return Err(Error::Precondition(format!("eta must be nonnegative, got {eta}")));
    }
    if let Some(x) = a.iter().find(|&x| x == 0 || x > n) {
        return Err(Error::OutOfRange { value: x, lo: 1, hi: n });
    }
    if !is_sum_free(a) {
        return Err(Error::Precondition("set is not sum-free".into()));
    }
    let eta_wide = Ratio::new(*eta.numer() as i128, *eta.denom() as i128);
    let nr = Ratio::from_integer(n as i128);
    let need = (Ratio::new(2, 5) - eta_wide) * nr;
    if Ratio::from_integer(a.len() as i128) < need {
        return Err(Error::Precondition(format!(
            "|A| = {} is below (2/5 - {eta})·{n}",
            a.len()
        )));
    }

    let all = |f: &dyn Fn(usize) -> bool| a.iter().all(f);
    let mut details = vec![
        AlternativeDetail {
            index: 1,
            satisfied: all(&|x| matches!(x % 5, 1 | 4)),
            note: "all members ≡ 1, 4 mod 5".into(),
        },
        AlternativeDetail {
            index: 2,
            satisfied: all(&|x| matches!(x % 5, 2 | 3)),
            note: "all members ≡ 2, 3 mod 5".into(),
        },
        AlternativeDetail {
            index: 3,
            satisfied: all(&|x| x % 2 == 1),
            note: "all members odd".into(),
        },
        AlternativeDetail {
            index: 4,
            satisfied: a.min().is_none_or(|m| m >= a.len()),
            note: format!("min = {:?}, |A| = {}", a.min(), a.len()),
        },
    ];

    let root = sqrt_upper(eta);
    let margin = Ratio::from_integer(200) * root;
    let lo1 = (Ratio::new(1, 5) - margin) * nr;
    let hi1 = (Ratio::new(2, 5) + margin) * nr;
    let lo2 = (Ratio::new(4, 5) - margin) * nr;
    let inside = |x: usize| {
        let x = Ratio::from_integer(x as i128);
        (lo1 <= x && x <= hi1) || (lo2 <= x && x <= nr)
    };
    details.push(AlternativeDetail {
        index: 5,
        satisfied: a.iter().all(inside),
        note: format!("[{lo1}, {hi1}] ∪ [{lo2}, {n}]"),
    });

    Ok(TranReport {
        alternatives_satisfied: details.iter().filter(|d| d.satisfied).map(|d| d.index).collect(),
        eta,
        sqrt_eta_bound: root,
        details,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityProbe {
    pub c3: ConfigCount,
    pub c4: ConfigCount,
    pub c5: ConfigCount,
    /// `|A \ B_n|`.
    pub dist: usize,
}

impl StabilityProbe {
    pub fn counts(&self) -> (u64, u64, u64, usize) {
        (self.c3.count, self.c4.count, self.c5.count, self.dist)
    }
}

pub fn stability_probe(a: &IntSet, n: usize) -> Result<StabilityProbe> {
    Ok(StabilityProbe {
        c3: count_forbidden_k_subsets(a, n, 3)?,
        c4: count_forbidden_k_subsets(a, n, 4)?,
        c5: count_forbidden_k_subsets(a, n, 5)?,
        dist: distance_to_extremal(a, n),
    })
}

/// Odd integers in `[1, ⌊2n/3⌋]`.
pub fn odd_lower_two_thirds(n: usize) -> IntSet {
    IntSet::in_range(n, (1..=2 * n / 3).step_by(2)).expect("members lie in [1, n]")
}
