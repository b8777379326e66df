//! The aggregate self-check behind `sumfree verify`: engine against the
//! brute-force oracles, extremal values, structure correspondences, the
//! `Z_p` cross-check, and the small property suites.

use std::fmt;

use crate::cyclic::{st_cross_check, DEFAULT_CENSUS_LIMIT};
use crate::enumerate::{count_admissible, max_admissible, EnumTask, Mode, DEFAULT_NODE_BUDGET};
use crate::error::Result;
use crate::oracles::{
    freiman_scan, naive_count, partition_bound_violations, stability_probe, sumset_bound_check, NAIVE_LIMIT,
};
use crate::profile::ConstraintProfile;
use crate::sets::{extremal_interval, IntSet};
use crate::structures::verify_correspondences;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub t_max: usize,
    pub workers: usize,
    pub node_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_max: 16,
            t_max: 10,
            workers: 1,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, failures: Vec<String>, ok_detail: String) {
        let passed = failures.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            let shown: Vec<_> = failures.iter().take(5).cloned().collect();
            format!("{} failure(s): {}", failures.len(), shown.join("; "))
        };
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<22} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// `[⌈(2n+1)/3⌉, n-1]` on ground `[1, n]`.
pub fn two_n_witness(n: usize) -> IntSet {
    IntSet::in_range(n, (2 * n + 1).div_ceil(3)..n).expect("members lie in [1, n]")
}

/// Runs every check. Only budget and I/O style errors are returned as `Err`;
/// mathematical failures land in the report.
pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let task = |n: usize, p: &ConstraintProfile, mode: Mode| {
        EnumTask::new(n, p.clone(), mode)
            .workers(opts.workers)
            .node_budget(opts.node_budget)
            .witness_cap(usize::MAX)
    };

    let builtins = ConstraintProfile::builtins();
    let mut fails = Vec::new();
    let n_naive = opts.n_max.min(NAIVE_LIMIT);
    for (id, p) in &builtins {
        for n in 0..=n_naive {
            let (engine, naive) = (count_admissible(&task(n, p, Mode::Count))?, naive_count(n, p)?);
            if engine != naive {
                fails.push(format!("{id} n={n}: engine {engine} vs naive {naive}"));
            }
        }
    }
    report.push(
        "oracle-equivalence",
        fails,
        format!("{} profiles, n ≤ {n_naive}", builtins.len()),
    );

    let mut fails = Vec::new();
    for id in ["sf-34a-2n1", "sf-sigma-2n1"] {
        let p = ConstraintProfile::named(id)?;
        for n in 1..=opts.n_max {
            let m = max_admissible(&task(n, &p, Mode::Max))?;
            let want = (n + 1) / 3;
            if m.size != want || !m.witnesses.contains(&extremal_interval(n)) {
                fails.push(format!("{id} n={n}: max {} (want {want})", m.size));
            }
        }
    }
    report.push("extremal-2n+1", fails, format!("n ≤ {}", opts.n_max));

    let mut fails = Vec::new();
    let p = ConstraintProfile::named("sf-sigma-2n")?;
    for n in 1..=opts.n_max {
        let m = max_admissible(&task(n, &p, Mode::Max))?;
        let want = n.saturating_sub(1) / 3;
        if m.size != want || !m.witnesses.contains(&two_n_witness(n)) {
            fails.push(format!("n={n}: max {} (want {want})", m.size));
        }
    }
    report.push("extremal-2n", fails, format!("n ≤ {}", opts.n_max));

    let mut fails = Vec::new();
    let chain: Vec<ConstraintProfile> = ["sf-sigma-2n1", "sf-345a-2n1", "sf-34a-2n1", "sf-3a-2n1"]
        .iter()
        .map(|id| ConstraintProfile::named(id))
        .collect::<Result<_>>()?;
    for n in 0..=opts.n_max {
        let counts: Vec<u64> = chain
            .iter()
            .map(|p| count_admissible(&task(n, p, Mode::Count)))
            .collect::<Result<_>>()?;
        if counts.windows(2).any(|w| w[0] > w[1]) {
            fails.push(format!("n={n}: {counts:?}"));
        }
        let floor = 1u64 << ((n + 1) / 3);
        if counts[0] < floor {
            fails.push(format!("n={n}: count {} below {floor}", counts[0]));
        }
    }
    report.push("layer-monotonicity", fails, format!("n ≤ {}", opts.n_max));

    let corr = verify_correspondences(opts.n_max, opts.t_max, opts.node_budget)?;
    report.push(
        "structures",
        corr.failures.clone(),
        format!("t ≤ {}, n ≤ {}", opts.t_max, opts.n_max),
    );

    let zp = st_cross_check(31, 10, opts.workers, DEFAULT_CENSUS_LIMIT, opts.node_budget)?;
    let fails = if zp.passed() {
        Vec::new()
    } else {
        vec![format!("{zp:?}")]
    };
    report.push("zp-p31-s10", fails, format!("census {}", zp.census_count));

    let scan = freiman_scan(20, 2, 6)?;
    report.push(
        "small-doubling",
        scan.violations.iter().map(|v| format!("{v:?}")).collect(),
        format!("{} applicable of {}", scan.applicable, scan.examined),
    );

    let mut fails = Vec::new();
    let subsets: Vec<IntSet> = (1u32..1 << 8)
        .map(|m| IntSet::in_range(8, (1..=8).filter(|x| m >> (x - 1) & 1 == 1)).expect("in range"))
        .collect();
    for a in &subsets {
        for b in &subsets {
            if !sumset_bound_check(a, b)? {
                fails.push(format!("{a} + {b}"));
            }
        }
    }
    report.push("sumset-lower-bound", fails, "all nonempty A, B ⊆ [1,8]".into());

    report.push(
        "partition-bound",
        partition_bound_violations(60, 10)
            .into_iter()
            .map(|(k, l, c)| format!("k={k} l={l} count={c}"))
            .collect(),
        "k ≤ 60, l ≤ 10".into(),
    );

    let mut fails = Vec::new();
    for n in 1..=200 {
        let probe = stability_probe(&extremal_interval(n), n)?;
        if probe.counts() != (0, 0, 0, 0) {
            fails.push(format!("n={n}: {:?}", probe.counts()));
        }
    }
    report.push("stability-extremal", fails, "n ≤ 200".into());

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let report = run(&VerifyOptions {
            n_max: 9,
            t_max: 6,
            ..VerifyOptions::default()
        })
        .unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), 10);
    }

    #[test]
    fn two_n_witness_examples() {
        assert_eq!(two_n_witness(7).to_vec(), vec![5, 6]);
        assert_eq!(two_n_witness(4).to_vec(), vec![3]);
        assert!(two_n_witness(1).is_empty());
    }
}
