//! t-special sets, sets closed under addition, and the maps between them.
//!
//! * `T_t`: t-special `T ⊆ [0, 2t-1]` with `0 ∈ T`.
//! * `A_n`: `A ⊆ [1, n]` closed under addition (within `[1, n]`) with `2n+1 ∉ 3A`.
//! * `D_n`: sum-free `D ⊆ [1, n]` with `2n+1 ∉ ΣD`.
//!
//! `g(T) = T ∩ [1, t-1]` is a bijection `T_t → A_{t-1}` and the greedy
//! projection `f` injects `A_n` into `D_n`.

use std::collections::HashSet;

use crate::enumerate::{count_admissible, EnumTask, Mode};
use crate::error::{Error, Result};
use crate::profile::ConstraintProfile;
use crate::sets::{k_fold_sumset, sumset, IntSet};
use crate::store::SpecialRow;

/// Sets above this `t` would overflow the 128-bit search masks (`T+T` reaches `4t-2`).
pub const MAX_SPECIAL_T: usize = 32;
/// `3A` for `A ⊆ [1, n]` must reach `2n+1` inside 128 bits.
pub const MAX_CLOSED_N: usize = 63;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpecialSet {
    pub t: usize,
    /// Ground range `[0, 2t-1]`.
    pub members: IntSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedSet {
    pub n: usize,
    /// Ground range `[1, n]`.
    pub members: IntSet,
}

impl ClosedSet {
    /// Validate membership in `A_n`.
    pub fn new(n: usize, members: IntSet) -> Result<ClosedSet> {
        let members = members.with_ground(1, n)?;
        if !in_closed_family(&members, n) {
            return Err(Error::Precondition(format!("{members} is not in A_{n}")));
        }
        Ok(ClosedSet { n, members })
    }
}

/// All three defining conditions: `|T| = t`, `2t-1 ∉ 3T`, and
/// `[0, 2t-1+min T] \ (2t-1-T) ⊆ T+T`, with integer addition.
pub fn is_t_special(set: &IntSet, t: usize) -> Result<bool> {
    if t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    let top = 2 * t - 1;
    let min = set.min().ok_or(Error::EmptySet)?;
    if let Some(x) = set.iter().find(|&x| x > top) {
        return Err(Error::OutOfRange {
            value: x,
            lo: 0,
            hi: top,
        });
    }
    if set.len() != t {
        return Ok(false);
    }
    if k_fold_sumset(set, 3, top).contains(top) {
        return Ok(false);
    }
    let doubled = sumset(set, set, 2 * top).set;
    let reflected: HashSet<usize> = set.iter().map(|x| top - x).collect();
    Ok((0..=top + min).all(|x| reflected.contains(&x) || doubled.contains(x)))
}

/// Every t-special set in lexicographic order of sorted members, optionally
/// restricted to those containing 0.
pub fn enumerate_t_special(t: usize, require_zero: bool, node_budget: u64) -> Result<Vec<SpecialSet>> {
    if t == 0 {
        return Err(Error::Precondition("t must be at least 1".into()));
    }
    if t > MAX_SPECIAL_T {
        return Err(Error::TooLarge {
            n: t,
            limit: MAX_SPECIAL_T,
        });
    }
    let mut search = SpecialSearch {
        t,
        top: 2 * t - 1,
        nodes: 0,
        budget: node_budget,
        out: Vec::new(),
    };
    // reversed layers: bit j of layers[k] means (2t-1) - j ∈ kT
    let layers = [1u128 << search.top, 0, 0, 0];
    if require_zero {
        let layers = SpecialSearch::add(layers, 0);
        search.walk(1, 1, 1, layers)?;
    } else {
        search.walk(0, 0, 0, layers)?;
    }
    Ok(search.out)
}

struct SpecialSearch {
    t: usize,
    top: usize,
    nodes: u64,
    budget: u64,
    out: Vec<SpecialSet>,
}

impl SpecialSearch {
    fn add(mut layers: [u128; 4], x: usize) -> [u128; 4] {
        for j in 1..4 {
            layers[j] |= layers[j - 1] >> x;
        }
        layers
    }

    fn walk(&mut self, x: usize, chosen: u128, size: usize, layers: [u128; 4]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if size == self.t {
            let members = IntSet::from_members(0, self.top, (0..=self.top).filter(|&i| chosen >> i & 1 == 1))?;
            if is_t_special(&members, self.t)? {
                self.out.push(SpecialSet { t: self.t, members });
            }
            return Ok(());
        }
        if x > self.top || size + (self.top + 1 - x) < self.t {
            return Ok(());
        }
        let next = Self::add(layers, x);
        if next[3] & 1 == 0 {
            self.walk(x + 1, chosen | 1 << x, size + 1, next)?;
        }
        self.walk(x + 1, chosen, size, layers)
    }
}

/// `x, y ∈ A` with `x + y ≤ n` implies `x + y ∈ A`. Members outside `[1, n]`
/// make the answer false.
pub fn is_closed_under_addition(set: &IntSet, n: usize) -> bool {
    if set.iter().any(|x| x == 0 || x > n) {
        return false;
    }
    let members = set.to_vec();
    members
        .iter()
        .all(|&x| members.iter().all(|&y| x + y > n || set.contains(x + y)))
}

/// Membership in `A_n`: closed under addition and `2n+1 ∉ 3A`.
pub fn in_closed_family(set: &IntSet, n: usize) -> bool {
    is_closed_under_addition(set, n) && !k_fold_sumset(set, 3, 2 * n + 1).contains(2 * n + 1)
}

/// All of `A_n`, ordered by the ascending include/exclude decisions.
pub fn enumerate_closed(n: usize) -> Result<Vec<ClosedSet>> {
    if n > MAX_CLOSED_N {
        return Err(Error::TooLarge { n, limit: MAX_CLOSED_N });
    }
    let target = 2 * n + 1;
    let mut out = Vec::new();
    closed_walk(n, 1, 0, 0, [1u128 << target, 0, 0, 0], &mut out);
    Ok(out)
}

/// Decide `x` given all smaller decisions. `pairs` holds `A + A` in forward
/// coordinates; an `x` already in it must be included.
fn closed_walk(n: usize, x: usize, chosen: u128, pairs: u128, layers: [u128; 4], out: &mut Vec<ClosedSet>) {
    if x > n {
        let members = IntSet::in_range(n, (1..=n).filter(|&i| chosen >> i & 1 == 1)).expect("within [1, n]");
        out.push(ClosedSet { n, members });
        return;
    }
    let forced = pairs >> x & 1 == 1;
    if !forced {
        closed_walk(n, x + 1, chosen, pairs, layers, out);
    }
    let next_layers = SpecialSearch::add(layers, x);
    if next_layers[3] & 1 == 0 {
        let next_chosen = chosen | 1 << x;
        let next_pairs = pairs | (next_chosen << x);
        closed_walk(n, x + 1, next_chosen, next_pairs, next_layers, out);
    }
}

/// `g(T) = T ∩ [1, t-1]`, landing in `A_{t-1}`.
pub fn bijection_g(special: &SpecialSet) -> Result<ClosedSet> {
    let t = special.t;
    if !special.members.contains(0) || !is_t_special(&special.members, t)? {
        return Err(Error::Precondition(format!(
            "{} is not a {t}-special set containing 0",
            special.members
        )));
    }
    let members = IntSet::in_range(t - 1, special.members.iter().filter(|&x| x >= 1 && x < t))?;
    Ok(ClosedSet { n: t - 1, members })
}

/// `T = {0} ∪ A ∪ {2t-1-ℓ : ℓ ∈ [1, t-1] \ A}`.
pub fn inverse_g(closed: &ClosedSet, t: usize) -> Result<SpecialSet> {
    if t == 0 || closed.n != t - 1 {
        return Err(Error::Precondition(format!("A_{} does not pair with t={t}", closed.n)));
    }
    if !in_closed_family(&closed.members, closed.n) {
        return Err(Error::Precondition(format!(
            "{} is not in A_{}",
            closed.members, closed.n
        )));
    }
    let top = 2 * t - 1;
    let mut members = IntSet::empty(0, top);
    members.insert(0)?;
    for l in 1..t {
        members.insert(if closed.members.contains(l) { l } else { top - l })?;
    }
    Ok(SpecialSet { t, members })
}

/// Greedy projection into `D_n`: scan from the largest member down and drop
/// each element that is `x + y` for strictly smaller `x, y` (possibly equal)
/// still in the working set.
pub fn projection_f(closed: &ClosedSet) -> Result<IntSet> {
    project(closed, true)
}

/// Same scan, but addends are looked up in the original set. Kept to compare
/// against [`projection_f`]; since the scan only removes elements above the
/// current one, the two agree.
pub fn projection_f_original(closed: &ClosedSet) -> Result<IntSet> {
    project(closed, false)
}

fn project(closed: &ClosedSet, working: bool) -> Result<IntSet> {
    if !in_closed_family(&closed.members, closed.n) {
        return Err(Error::Precondition(format!(
            "{} is not in A_{}",
            closed.members, closed.n
        )));
    }
    let original = &closed.members;
    let mut set = original.clone();
    let members = original.to_vec();
    for &z in members.iter().rev() {
        let lookup = if working { &set } else { original };
        let is_sum = members
            .iter()
            .take_while(|&&x| 2 * x <= z)
            .any(|&x| lookup.contains(x) && lookup.contains(z - x));
        if is_sum {
            set.remove(z);
        }
    }
    Ok(set)
}

/// Item 1: for `ℓ ∈ [0, t-1]` exactly one of `ℓ` and `2t-1-ℓ` lies in `T`.
pub fn claim_complementary(special: &SpecialSet) -> bool {
    let top = 2 * special.t - 1;
    (0..special.t).all(|l| special.members.contains(l) != special.members.contains(top - l))
}

/// Item 2: `T` is closed under addition inside `[0, 2t-1]`.
pub fn claim_closed(special: &SpecialSet) -> bool {
    let top = 2 * special.t - 1;
    let m = special.members.to_vec();
    m.iter()
        .all(|&a| m.iter().all(|&b| a + b > top || special.members.contains(a + b)))
}

#[derive(Clone, Debug, Default)]
pub struct CorrespondenceReport {
    /// `(t, |T_t|, |all t-special|, |A_{t-1}|)`.
    pub special_rows: Vec<(usize, u64, u64, u64)>,
    /// `(n, |A_n|, |D_n|, f injective, image ⊆ D_n)`.
    pub projection_rows: Vec<(usize, u64, u64, bool, bool)>,
    pub failures: Vec<String>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn store_rows(&self) -> Vec<SpecialRow> {
        self.special_rows
            .iter()
            .map(|&(t, with_zero, all, _)| SpecialRow {
                t,
                count_with_zero: with_zero,
                count_all: all,
            })
            .collect()
    }
}

/// Exhaustive check of the special/closed bijection for `t ≤ t_max` and of
/// the projection into `D_n` for `n ≤ n_max`. Failures are collected, not
/// returned as errors.
pub fn verify_correspondences(n_max: usize, t_max: usize, node_budget: u64) -> Result<CorrespondenceReport> {
    let mut report = CorrespondenceReport::default();
    let fail = |r: &mut CorrespondenceReport, msg: String| r.failures.push(msg);

    for t in 1..=t_max {
        let all = enumerate_t_special(t, false, node_budget)?;
        let with_zero: Vec<_> = all.iter().filter(|s| s.members.contains(0)).cloned().collect();
        let closed = enumerate_closed(t - 1)?;
        report
            .special_rows
            .push((t, with_zero.len() as u64, all.len() as u64, closed.len() as u64));
        if with_zero.len() != closed.len() {
            fail(
                &mut report,
                format!("t={t}: |T_t|={} but |A_(t-1)|={}", with_zero.len(), closed.len()),
            );
        }
        for s in &with_zero {
            if !claim_complementary(s) {
                fail(&mut report, format!("t={t}: {} violates complementarity", s.members));
            }
            if !claim_closed(s) {
                fail(&mut report, format!("t={t}: {} is not closed in [0,2t-1]", s.members));
            }
            let g = bijection_g(s)?;
            if !in_closed_family(&g.members, t - 1) {
                fail(
                    &mut report,
                    format!("t={t}: g({}) = {} not in A_(t-1)", s.members, g.members),
                );
            }
            if inverse_g(&g, t)? != *s {
                fail(&mut report, format!("t={t}: inverse_g(g({})) differs", s.members));
            }
        }
        for a in &closed {
            let s = inverse_g(a, t)?;
            if !is_t_special(&s.members, t)? {
                fail(
                    &mut report,
                    format!("t={t}: inverse_g({}) = {} not t-special", a.members, s.members),
                );
            } else if bijection_g(&s)? != *a {
                fail(&mut report, format!("t={t}: g(inverse_g({})) differs", a.members));
            }
        }
    }

    let d_profile = ConstraintProfile::named("sf-sigma-2n1")?;
    for n in 1..=n_max {
        let family = enumerate_closed(n)?;
        let d_count = count_admissible(&EnumTask::new(n, d_profile.clone(), Mode::Count).node_budget(node_budget))?;
        let mut images = HashSet::new();
        let mut inside = true;
        for a in &family {
            let image = projection_f(a)?;
            let alt = projection_f_original(a)?;
            if image != alt {
                fail(
                    &mut report,
                    format!("n={n}: projection readings differ on {}: {image} vs {alt}", a.members),
                );
            }
            if !d_profile.admits(&image, n) {
                inside = false;
                fail(&mut report, format!("n={n}: f({}) = {image} not in D_n", a.members));
            }
            images.insert(image);
        }
        let injective = images.len() == family.len();
        if !injective {
            fail(&mut report, format!("n={n}: f is not injective on A_n"));
        }
        if family.len() as u64 > d_count {
            fail(
                &mut report,
                format!("n={n}: |A_n|={} exceeds |D_n|={d_count}", family.len()),
            );
        }
        report
            .projection_rows
            .push((n, family.len() as u64, d_count, injective, inside));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(lo: usize, hi: usize, xs: &[usize]) -> IntSet {
        IntSet::from_members(lo, hi, xs.iter().copied()).unwrap()
    }

    fn special(t: usize, xs: &[usize]) -> SpecialSet {
        SpecialSet {
            t,
            members: set(0, 2 * t - 1, xs),
        }
    }

    fn closed(n: usize, xs: &[usize]) -> ClosedSet {
        ClosedSet::new(n, IntSet::in_range(n, xs.iter().copied()).unwrap()).unwrap()
    }

    const BUDGET: u64 = 100_000_000;

    #[test]
    fn special_predicate_examples() {
        assert!(is_t_special(&set(0, 1, &[0]), 1).unwrap());
        assert!(!is_t_special(&set(0, 1, &[1]), 1).unwrap());
        assert!(is_t_special(&set(0, 3, &[0, 2]), 2).unwrap());
        assert!(!is_t_special(&set(0, 3, &[0, 1]), 2).unwrap());
        assert!(matches!(is_t_special(&IntSet::empty(0, 3), 2), Err(Error::EmptySet)));
        assert!(matches!(
            is_t_special(&set(0, 9, &[0, 5]), 2),
            Err(Error::OutOfRange { value: 5, .. })
        ));
    }

    #[test]
    fn special_enumeration_examples() {
        let members = |v: Vec<SpecialSet>| v.into_iter().map(|s| s.members.to_vec()).collect::<Vec<_>>();
        assert_eq!(members(enumerate_t_special(1, true, BUDGET).unwrap()), vec![vec![0]]);
        assert_eq!(members(enumerate_t_special(2, true, BUDGET).unwrap()), vec![vec![0, 2]]);
        assert_eq!(members(enumerate_t_special(1, false, BUDGET).unwrap()), vec![vec![0]]);
        assert!(matches!(
            enumerate_t_special(9, false, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn special_enumeration_matches_subset_scan() {
        for t in 1..=7 {
            let top = 2 * t - 1;
            let mut want = Vec::new();
            for mask in 0u32..1 << (top + 1) {
                let s = IntSet::from_members(0, top, (0..=top).filter(|i| mask >> i & 1 == 1)).unwrap();
                if !s.is_empty() && is_t_special(&s, t).unwrap() {
                    want.push(s);
                }
            }
            want.sort_by_key(|s| s.to_vec());
            let got: Vec<_> = enumerate_t_special(t, false, BUDGET)
                .unwrap()
                .into_iter()
                .map(|s| s.members)
                .collect();
            assert_eq!(got, want, "t={t}");
        }
    }

    #[test]
    fn closed_examples() {
        assert!(is_closed_under_addition(&set(1, 6, &[3, 6]), 6));
        assert!(in_closed_family(&set(1, 6, &[3, 6]), 6));
        assert!(!is_closed_under_addition(&set(1, 6, &[2, 3]), 6));
        let a1: Vec<_> = enumerate_closed(1)
            .unwrap()
            .into_iter()
            .map(|c| c.members.to_vec())
            .collect();
        assert_eq!(a1, vec![Vec::<usize>::new()]);
        assert_eq!(enumerate_closed(0).unwrap().len(), 1);
    }

    #[test]
    fn closed_enumeration_matches_subset_scan() {
        for n in 0..=14 {
            let want = (0u32..1 << n)
                .filter(|mask| {
                    let s = IntSet::in_range(n, (1..=n).filter(|x| mask >> (x - 1) & 1 == 1)).unwrap();
                    in_closed_family(&s, n)
                })
                .count();
            assert_eq!(enumerate_closed(n).unwrap().len(), want, "n={n}");
        }
    }

    #[test]
    fn g_examples() {
        assert!(bijection_g(&special(2, &[0, 2])).unwrap().members.is_empty());
        assert_eq!(bijection_g(&special(2, &[0, 2])).unwrap().n, 1);
        assert!(bijection_g(&special(1, &[0])).unwrap().members.is_empty());
        assert!(bijection_g(&special(2, &[0, 1])).is_err());

        assert_eq!(inverse_g(&closed(1, &[]), 2).unwrap().members.to_vec(), vec![0, 2]);
        assert_eq!(inverse_g(&closed(0, &[]), 1).unwrap().members.to_vec(), vec![0]);
        assert!(inverse_g(&closed(1, &[]), 3).is_err());
    }

    #[test]
    fn f_examples() {
        assert_eq!(projection_f(&closed(6, &[3, 6])).unwrap().to_vec(), vec![3]);
        assert_eq!(projection_f(&closed(5, &[4, 5])).unwrap().to_vec(), vec![4, 5]);
        assert!(projection_f(&closed(4, &[])).unwrap().is_empty());
        let bad = ClosedSet {
            n: 6,
            members: set(1, 6, &[2, 3]),
        };
        assert!(projection_f(&bad).is_err());
        assert!(ClosedSet::new(6, set(1, 6, &[2, 3])).is_err());
    }

    #[test]
    fn small_correspondence_report() {
        let r = verify_correspondences(10, 8, BUDGET).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.special_rows[0], (1, 1, 1, 1));
        assert_eq!(r.special_rows[1], (2, 1, 1, 1));
        assert_eq!(r.store_rows().len(), 8);
    }
}
