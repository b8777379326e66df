//! Subsets of `Z_p`: symmetric / complete / sum-free predicates, the `S_T`
//! construction, the dilation action, and an exhaustive census of symmetric
//! complete sum-free sets for small primes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::sets::IntSet;
use crate::store::ZpRow;
use crate::structures::enumerate_t_special;

/// Largest prime the census accepts unless the caller raises the limit.
pub const DEFAULT_CENSUS_LIMIT: usize = 43;
/// Hard ceiling for the census (its masks are 64 bits wide).
pub const MAX_CENSUS_P: usize = 63;

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZpSet {
    p: usize,
    bits: Bits,
}

impl ZpSet {
    pub fn new<I: IntoIterator<Item = usize>>(p: usize, members: I) -> Result<ZpSet> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut bits = Bits::new(p);
        for x in members {
            if x >= p {
                return Err(Error::OutOfRange {
                    value: x,
                    lo: 0,
                    hi: p - 1,
                });
            }
            bits.set(x);
        }
        Ok(ZpSet { p, bits })
    }

    fn from_mask(p: usize, mask: u64) -> ZpSet {
        let mut bits = Bits::new(p);
        for x in (0..p).filter(|x| mask >> x & 1 == 1) {
            bits.set(x);
        }
        ZpSet { p, bits }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.get(x % self.p)
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

    /// `2S = {x + y mod p}`, repetition allowed.
    pub fn doubled(&self) -> Bits {
        let mut out = Bits::new(self.p);
        for x in self.iter() {
            out.or_assign(&self.bits.rotate_left(x));
        }
        out
    }
}

impl fmt::Debug for ZpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} mod {}", self.p)
    }
}

impl fmt::Display for ZpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// `S = -S`.
pub fn is_symmetric(s: &ZpSet) -> bool {
    s.iter().all(|x| s.contains((s.p - x) % s.p))
}

/// Every element outside `S` is a sum of two (possibly equal) members.
pub fn is_complete(s: &ZpSet) -> bool {
    let doubled = s.doubled();
    (0..s.p).all(|x| s.contains(x) || doubled.get(x))
}

/// `S ∩ 2S = ∅`.
pub fn is_sum_free_zp(s: &ZpSet) -> bool {
    s.doubled().is_disjoint(&s.bits)
}

/// A prime with an even size `s` for which `S_T` is well formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeParams {
    pub p: usize,
    pub s: usize,
    pub t: usize,
}

impl PrimeParams {
    /// Requires `s` even, `4s ≥ p + 3`, `3s ≤ p - 1`; then `t = (p - 3s + 1)/2 ≥ 1`.
    pub fn new(p: usize, s: usize) -> Result<PrimeParams> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !s.is_multiple_of(2) || 4 * s < p + 3 || 3 * s > p - 1 {
            return Err(Error::Precondition(format!(
                "s={s} must be even and lie in [(p+3)/4, (p-1)/3] for p={p}"
            )));
        }
        Ok(PrimeParams {
            p,
            s,
            t: (p + 1 - 3 * s) / 2,
        })
    }

    /// All valid even `s` for `p`, ascending.
    pub fn sizes_for(p: usize) -> Vec<usize> {
        (1..p).filter(|&s| PrimeParams::new(p, s).is_ok()).collect()
    }

    /// Whether `s` lies in the range where every symmetric complete
    /// sum-free set of size `s` is known to be a dilation of some `S_T`
    /// (for large enough `p`): `0.318p ≤ s ≤ (p-1)/3`.
    pub fn in_theorem_range(p: usize, s: usize) -> bool {
        s.is_multiple_of(2) && 1000 * s >= 318 * p && 3 * s < p
    }
}

/// `S_T = [p-2s+1, 2s-1] ∪ ±(s + T)`.
pub fn build_s_t(params: PrimeParams, t_set: &IntSet) -> Result<ZpSet> {
    let PrimeParams { p, s, t } = params;
    let top = 2 * t - 1;
    if let Some(x) = t_set.iter().find(|&x| x > top) {
        return Err(Error::OutOfRange {
            value: x,
            lo: 0,
            hi: top,
        });
    }
    let mut members: Vec<usize> = (p + 1 - 2 * s..=2 * s - 1).collect();
    for tau in t_set.iter() {
        let x = (s + tau) % p;
        members.push(x);
        members.push((p - x) % p);
    }
    ZpSet::new(p, members)
}

/// `{λx mod p : x ∈ S}`.
pub fn dilate(s: &ZpSet, lambda: usize) -> Result<ZpSet> {
    let lambda = lambda % s.p;
    if lambda == 0 {
        return Err(Error::ZeroDilation(s.p));
    }
    ZpSet::new(s.p, s.iter().map(|x| x * lambda % s.p))
}

/// Lexicographically least sorted member list among all dilations.
pub fn canonical_form(s: &ZpSet) -> ZpSet {
    (1..s.p)
        .map(|l| dilate(s, l).expect("nonzero factor"))
        .min_by(|a, b| a.to_vec().cmp(&b.to_vec()))
        .unwrap_or_else(|| s.clone())
}

/// Distinct images of `s` under all dilations.
pub fn dilation_orbit(s: &ZpSet) -> BTreeSet<Vec<usize>> {
    (1..s.p)
        .map(|l| dilate(s, l).expect("nonzero factor").to_vec())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpCensusRow {
    pub p: usize,
    pub size: usize,
    pub count: u64,
    /// Canonical forms, one per dilation orbit, sorted.
    pub representatives: Vec<ZpSet>,
    pub in_theorem_range: bool,
}

impl ZpCensusRow {
    pub fn to_store_row(&self) -> ZpRow {
        ZpRow {
            p: self.p,
            s: self.size,
            count: self.count,
            in_theorem_range: self.in_theorem_range,
            representatives: self.representatives.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

/// Symmetric sets are encoded by their positive half `⊆ [1, (p-1)/2]`; `0`
/// never lies in a sum-free set.
fn expand_half(p: usize, half: u64) -> u64 {
    let mut mask = 0u64;
    let mut rest = half;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let x = i + 1;
        mask |= 1 << x | 1 << (p - x);
    }
    mask
}

#[inline]
fn rotate(mask: u64, x: usize, p: usize, full: u64) -> u64 {
    if x == 0 {
        mask
    } else {
        ((mask << x) | (mask >> (p - x))) & full
    }
}

#[inline]
fn is_scsf_mask(mask: u64, p: usize, full: u64) -> bool {
    let mut doubled = 0u64;
    let mut rest = mask;
    while rest != 0 {
        let x = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        doubled |= rotate(mask, x, p, full);
        if doubled & mask != 0 {
            return false;
        }
    }
    (full & !mask) & !doubled == 0
}

/// Every symmetric complete sum-free subset of `Z_p` of the given size (all
/// sizes when `None`), as masks in increasing half-mask order.
fn scsf_masks(p: usize, size: Option<usize>, workers: usize, limit: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let limit = limit.min(MAX_CENSUS_P);
    if p > limit {
        return Err(Error::TooLarge { n: p, limit });
    }
    if p == 2 {
        return Ok(Vec::new());
    }
    let h = (p - 1) / 2;
    let full = (1u64 << p) - 1;
    let total = 1u64 << h;
    let chunk_bits = h.min(8);
    let chunks = 1u64 << chunk_bits;
    let per = total / chunks;
    let want_half = size.map(|s| s / 2);
    if size.is_some_and(|s| s % 2 == 1) {
        return Ok(Vec::new());
    }
    let scan = |c: u64| -> Vec<u64> {
        (c * per..(c + 1) * per)
            .filter(|half| want_half.is_none_or(|w| half.count_ones() as usize == w))
            .map(|half| expand_half(p, half))
            .filter(|&mask| is_scsf_mask(mask, p, full))
            .collect()
    };
    let parts: Vec<Vec<u64>> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(scan).collect())
    } else {
        (0..chunks).map(scan).collect()
    };
    Ok(parts.into_iter().flatten().collect())
}

/// All symmetric complete sum-free sets of size `s` in `Z_p`.
pub fn scsf_sets(p: usize, s: usize, workers: usize, limit: usize) -> Result<Vec<ZpSet>> {
    Ok(scsf_masks(p, Some(s), workers, limit)?
        .into_iter()
        .map(|m| ZpSet::from_mask(p, m))
        .collect())
}

/// Exhaustive census of symmetric complete sum-free subsets of `Z_p`,
/// grouped by size.
pub fn census_scsf(p: usize, size: Option<usize>, workers: usize, limit: usize) -> Result<Vec<ZpCensusRow>> {
    let masks = scsf_masks(p, size, workers, limit)?;
    let mut by_size: BTreeMap<usize, (u64, BTreeSet<Vec<usize>>)> = BTreeMap::new();
    for m in masks {
        let set = ZpSet::from_mask(p, m);
        let entry = by_size.entry(set.len()).or_default();
        entry.0 += 1;
        entry.1.insert(canonical_form(&set).to_vec());
    }
    Ok(by_size
        .into_iter()
        .map(|(s, (count, reps))| ZpCensusRow {
            p,
            size: s,
            count,
            representatives: reps
                .into_iter()
                .map(|r| ZpSet::new(p, r).expect("residues of p"))
                .collect(),
            in_theorem_range: PrimeParams::in_theorem_range(p, s),
        })
        .collect())
}

/// Comparison of the census at `(p, s)` with the `S_T` family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StCrossCheck {
    pub params: PrimeParams,
    pub census_count: u64,
    /// Number of t-special `T`.
    pub special_count: u64,
    pub special_with_zero: u64,
    /// Distinct sets among the dilations of `S_T` over t-special `T`.
    pub dilation_union: u64,
    /// Every `S_T` with `T` t-special is symmetric, complete and sum-free.
    pub st_all_scsf: bool,
    /// The census equals the union of those dilations, as sets of sets.
    pub census_equals_dilations: bool,
    /// `0 ∈ T ⇔ s ∈ S_T` over every `T ⊆ [0, 2t-1]`.
    pub zero_iff_s: bool,
    /// Every census member containing `s` is a dilation of some `S_T` with `0 ∈ T`.
    pub s_members_from_zero_t: bool,
    pub in_theorem_range: bool,
}

impl StCrossCheck {
    /// `census = (p-1)/2 · |t-special|`.
    pub fn gap_holds(&self) -> bool {
        self.census_count == (self.params.p as u64 - 1) / 2 * self.special_count
    }

    pub fn passed(&self) -> bool {
        self.gap_holds()
            && self.st_all_scsf
            && self.census_equals_dilations
            && self.zero_iff_s
            && self.s_members_from_zero_t
    }
}

pub fn st_cross_check(p: usize, s: usize, workers: usize, limit: usize, node_budget: u64) -> Result<StCrossCheck> {
    let params = PrimeParams::new(p, s)?;
    let census: BTreeSet<Vec<usize>> = scsf_sets(p, s, workers, limit)?.iter().map(|z| z.to_vec()).collect();
    let specials = enumerate_t_special(params.t, false, node_budget)?;

    let mut union = BTreeSet::new();
    let mut zero_orbits = BTreeSet::new();
    let mut st_all_scsf = true;
    for sp in &specials {
        let st = build_s_t(params, &sp.members)?;
        st_all_scsf &= is_symmetric(&st) && is_complete(&st) && is_sum_free_zp(&st) && st.len() == s;
        let orbit = dilation_orbit(&st);
        if sp.members.contains(0) {
            zero_orbits.extend(orbit.iter().cloned());
        }
        union.extend(orbit);
    }

    let top = 2 * params.t - 1;
    let zero_iff_s = (0u64..1 << (top + 1)).all(|mask| {
        let t_set = IntSet::from_members(0, top, (0..=top).filter(|i| mask >> i & 1 == 1)).expect("in range");
        let st = build_s_t(params, &t_set).expect("in range");
        t_set.contains(0) == st.contains(s)
    });
    let s_members_from_zero_t = census
        .iter()
        .filter(|m| m.binary_search(&s).is_ok())
        .all(|m| zero_orbits.contains(m));

    Ok(StCrossCheck {
        params,
        census_count: census.len() as u64,
        special_count: specials.len() as u64,
        special_with_zero: specials.iter().filter(|sp| sp.members.contains(0)).count() as u64,
        dilation_union: union.len() as u64,
        st_all_scsf,
        census_equals_dilations: census == union,
        zero_iff_s,
        s_members_from_zero_t,
        in_theorem_range: PrimeParams::in_theorem_range(p, s),
    })
}

/// Some `B ⊆ A` with `1 ≤ |B| ≤ 3` (distinct residues) summing to `0 mod n`.
/// Members are read modulo `n`.
pub fn find_small_zero_sum(a: &IntSet, n: usize) -> Option<IntSet> {
    if n == 0 {
        return None;
    }
    let residues: BTreeSet<usize> = a.iter().map(|x| x % n).collect();
    let found = |xs: &[usize]| IntSet::from_members(0, n - 1, xs.iter().copied()).ok();
    if residues.contains(&0) {
        return found(&[0]);
    }
    let v: Vec<usize> = residues.iter().copied().collect();
    for (i, &x) in v.iter().enumerate() {
        let y = (n - x) % n;
        if y > x && residues.contains(&y) {
            return found(&[x, y]);
        }
        for &y in &v[i + 1..] {
            let z = (2 * n - x - y) % n;
            if z > y && residues.contains(&z) {
                return found(&[x, y, z]);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: usize, xs: &[usize]) -> ZpSet {
        ZpSet::new(p, xs.iter().copied()).unwrap()
    }

    #[test]
    fn predicate_examples() {
        for p in [5, 7, 11, 13] {
            let all = ZpSet::new(p, 1..p).unwrap();
            assert!(is_symmetric(&all) && is_complete(&all) && !is_sum_free_zp(&all));
            let empty = zp(p, &[]);
            assert!(is_symmetric(&empty) && is_sum_free_zp(&empty) && !is_complete(&empty));
        }
        let s: Vec<usize> = [10, 21].into_iter().chain(12..=19).collect();
        let s = zp(31, &s);
        assert!(is_symmetric(&s) && is_complete(&s) && is_sum_free_zp(&s));
        let s = zp(5, &[2, 3]);
        assert!(is_symmetric(&s) && is_complete(&s) && is_sum_free_zp(&s));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(ZpSet::new(9, [1]), Err(Error::NotPrime(9))));
        assert!(matches!(ZpSet::new(7, [7]), Err(Error::OutOfRange { .. })));
        assert!(matches!(dilate(&zp(7, &[1]), 14), Err(Error::ZeroDilation(7))));
        assert!(PrimeParams::new(31, 9).is_err());
        assert!(PrimeParams::new(31, 8).is_err());
        assert_eq!(PrimeParams::new(31, 10).unwrap().t, 1);
        assert!(matches!(
            census_scsf(47, None, 1, DEFAULT_CENSUS_LIMIT),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn st_examples() {
        let params = PrimeParams::new(31, 10).unwrap();
        let st = build_s_t(params, &IntSet::from_members(0, 1, [0]).unwrap()).unwrap();
        let want: Vec<usize> = [10].into_iter().chain(12..=19).chain([21]).collect();
        assert_eq!(st.to_vec(), want);
        assert_eq!(st.len(), 10);
        let st = build_s_t(params, &IntSet::empty(0, 1)).unwrap();
        assert_eq!(st.to_vec(), (12..=19).collect::<Vec<_>>());
        assert!(build_s_t(params, &IntSet::from_members(0, 5, [2]).unwrap()).is_err());
    }

    #[test]
    fn dilation_examples() {
        let s = zp(31, &[3, 5, 26, 28]);
        assert_eq!(dilate(&s, 1).unwrap(), s);
        for l in 1..31 {
            let inv = (1..31).find(|m| l * m % 31 == 1).unwrap();
            assert_eq!(dilate(&dilate(&s, l).unwrap(), inv).unwrap(), s);
        }
        let c = canonical_form(&s);
        assert!(dilation_orbit(&s).iter().all(|o| c.to_vec() <= *o));
    }

    #[test]
    fn symmetric_orbits_divide_half_group() {
        for p in [5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let h = (p - 1) / 2;
            for half in 0u64..(1 << h).min(1 << 10) {
                let s = ZpSet::from_mask(p, expand_half(p, half));
                assert_eq!(h % dilation_orbit(&s).len(), 0, "p={p} {s}");
            }
        }
    }

    #[test]
    fn census_p31() {
        let rows = census_scsf(31, None, 1, DEFAULT_CENSUS_LIMIT).unwrap();
        let ten = rows.iter().find(|r| r.size == 10).unwrap();
        assert_eq!(ten.count, 15);
        assert!(ten.in_theorem_range);
        assert_eq!(ten.representatives.len(), 1);
        let parallel = census_scsf(31, None, 4, DEFAULT_CENSUS_LIMIT).unwrap();
        assert_eq!(rows, parallel);
        assert_eq!(
            census_scsf(31, Some(10), 1, DEFAULT_CENSUS_LIMIT).unwrap(),
            vec![ten.clone()]
        );
    }

    #[test]
    fn census_p5_contains_two_three() {
        let rows = census_scsf(5, None, 1, DEFAULT_CENSUS_LIMIT).unwrap();
        assert!(rows.iter().any(|r| r.size == 2 && r.count >= 1));
        let sets = scsf_sets(5, 2, 1, DEFAULT_CENSUS_LIMIT).unwrap();
        assert!(sets.contains(&zp(5, &[2, 3])));
    }

    #[test]
    fn census_agrees_with_predicates() {
        for p in [3, 5, 7, 11, 13, 17] {
            let mut want = 0;
            for half in 0u64..1 << ((p - 1) / 2) {
                let s = ZpSet::from_mask(p, expand_half(p, half));
                if is_complete(&s) && is_sum_free_zp(&s) {
                    want += 1;
                }
            }
            let got: u64 = census_scsf(p, None, 1, DEFAULT_CENSUS_LIMIT)
                .unwrap()
                .iter()
                .map(|r| r.count)
                .sum();
            assert_eq!(got, want, "p={p}");
        }
    }

    #[test]
    fn completeness_matches_double_loop() {
        for p in [5, 7, 11, 13, 17, 19, 23] {
            for seed in 0u64..200 {
                let members: Vec<usize> = (0..p)
                    .filter(|x| (seed.wrapping_mul(2654435761) >> (x % 31)) & 1 == 1)
                    .collect();
                let s = ZpSet::new(p, members.iter().copied()).unwrap();
                let naive =
                    (0..p).all(|g| s.contains(g) || members.iter().any(|&x| members.iter().any(|&y| (x + y) % p == g)));
                assert_eq!(is_complete(&s), naive);
            }
        }
    }

    #[test]
    fn cross_check_p31() {
        let c = st_cross_check(31, 10, 1, DEFAULT_CENSUS_LIMIT, 1_000_000).unwrap();
        assert_eq!(c.census_count, 15);
        assert_eq!(c.special_count, 1);
        assert_eq!(c.special_with_zero, 1);
        assert!(c.passed(), "{c:?}");
    }

    #[test]
    fn zero_sum_examples() {
        let a = IntSet::from_members(0, 9, [0, 3]).unwrap();
        assert_eq!(find_small_zero_sum(&a, 10).unwrap().to_vec(), vec![0]);
        let a = IntSet::from_members(0, 9, [1, 9]).unwrap();
        assert_eq!(find_small_zero_sum(&a, 10).unwrap().to_vec(), vec![1, 9]);
        let a = IntSet::from_members(0, 6, [1, 2]).unwrap();
        assert_eq!(find_small_zero_sum(&a, 7), None);
        let a = IntSet::from_members(0, 6, [1, 2, 4]).unwrap();
        assert_eq!(find_small_zero_sum(&a, 7).unwrap().to_vec(), vec![1, 2, 4]);
    }

    #[test]
    fn zero_sum_matches_subset_scan() {
        for n in 2..14usize {
            for mask in 0u32..1 << n {
                let a = IntSet::from_members(0, n - 1, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap();
                let v = a.to_vec();
                let mut exists = false;
                for i in 0..v.len() {
                    exists |= v[i].is_multiple_of(n);
                    for j in i + 1..v.len() {
                        exists |= (v[i] + v[j]).is_multiple_of(n);
                        for k in j + 1..v.len() {
                            exists |= (v[i] + v[j] + v[k]).is_multiple_of(n);
                        }
                    }
                }
                let got = find_small_zero_sum(&a, n);
                assert_eq!(got.is_some(), exists, "n={n} {a}");
                if let Some(b) = got {
                    assert!(b.is_subset(&a) && (1..=3).contains(&b.len()));
                    assert_eq!(b.iter().sum::<usize>() % n, 0);
                }
            }
        }
    }
}
