//! Pruned backtracking over subsets of `[1, n]` under a [`ConstraintProfile`].
//!
//! Elements are decided from `n` down to `1`, excluding before including, so
//! admissible sets are produced in increasing order of `Σ_{x∈A} 2^x`: `∅`
//! first, then `{1}`, `{2}`, `{1,2}`, `{3}`, ...
//!
//! Each search node carries
//! * the chosen set,
//! * for sum-free profiles, the *blocked* candidates `{z - y : y < z chosen} ∪ {z/2}`,
//! * the iterated sumsets of the chosen set in reversed coordinates: bit `j` of
//!   layer `k` means `target - j ∈ kA` (or `∈ ΣA` for sigma profiles).
//!
//! With reversed layers the forbidden value is reached exactly when bit 0 is
//! set, and a candidate `w` that would complete it in one step is simply a set
//! bit of the layer below.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{Mask, W256};
use crate::profile::{ConstraintProfile, Layers};
use crate::sets::IntSet;
use crate::store::{Record, ResultsStore};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_WITNESS_CAP: usize = 1000;
/// Bounded layer lists longer than this are rejected; use a sigma profile.
pub const MAX_LAYER: usize = 16;
pub const ENGINE_VERSION: &str = concat!("sumfree-enum/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Count,
    Max,
    List,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Count => "count",
            Mode::Max => "max",
            Mode::List => "list",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumTask {
    pub n: usize,
    pub profile: ConstraintProfile,
    pub mode: Mode,
    /// Number of top elements decided before the search fans out into
    /// independent subtasks.
    pub parallel_split_depth: usize,
    pub workers: usize,
    pub node_budget: u64,
    pub witness_cap: usize,
}

impl EnumTask {
    pub fn new(n: usize, profile: ConstraintProfile, mode: Mode) -> Self {
        EnumTask {
            n,
            profile,
            mode,
            parallel_split_depth: 0,
            workers: 1,
            node_budget: DEFAULT_NODE_BUDGET,
            witness_cap: DEFAULT_WITNESS_CAP,
        }
    }

    pub fn split_depth(mut self, d: usize) -> Self {
        self.parallel_split_depth = d;
        self
    }

    pub fn workers(mut self, w: usize) -> Self {
        self.workers = w;
        self
    }

    pub fn node_budget(mut self, b: u64) -> Self {
        self.node_budget = b;
        self
    }

    pub fn witness_cap(mut self, c: usize) -> Self {
        self.witness_cap = c;
        self
    }

    fn validate(&self, expected: Mode) -> Result<()> {
        if self.mode != expected {
            return Err(Error::ModeMismatch {
                expected: expected.name(),
                got: self.mode.name(),
            });
        }
        self.validate_shape()
    }

    fn validate_shape(&self) -> Result<()> {
        if self.parallel_split_depth > self.n {
            return Err(Error::Precondition(format!(
                "split depth {} exceeds n={}",
                self.parallel_split_depth, self.n
            )));
        }
        if self.workers == 0 {
            return Err(Error::Precondition("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Split depth actually used: an explicit depth wins; with several
    /// workers and no explicit depth, fan out over the top few elements.
    fn effective_split(&self) -> usize {
        if self.parallel_split_depth == 0 && self.workers > 1 {
            self.n.min(10)
        } else {
            self.parallel_split_depth
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxResult {
    pub size: usize,
    /// Maximum witnesses in enumeration order, at most `witness_cap` of them.
    pub witnesses: Vec<IntSet>,
    pub num_witnesses: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VisitSummary {
    pub visited: u64,
    /// False when the sink stopped the enumeration early.
    pub completed: bool,
}

/// Number of admissible subsets of `[1, n]`, the empty set included.
pub fn count_admissible(task: &EnumTask) -> Result<u64> {
    task.validate(Mode::Count)?;
    with_mask!(task, |engine| {
        let parts = engine.run_split(task, || CountSink(0))?;
        Ok(parts.into_iter().map(|s| s.0).sum())
    })
}

/// Largest admissible cardinality with its witnesses.
pub fn max_admissible(task: &EnumTask) -> Result<MaxResult> {
    task.validate(Mode::Max)?;
    with_mask!(task, |engine| {
        let parts = engine.run_split(task, || MaxSink::new(task.witness_cap, true, task.n))?;
        Ok(MaxSink::merge(parts, task.witness_cap).into_result())
    })
}

/// Stream every admissible set to `sink` in enumeration order. The sink
/// returns `ControlFlow::Break` to stop early. Delivery is always from the
/// calling thread.
pub fn enumerate_admissible<F>(task: &EnumTask, mut sink: F) -> Result<VisitSummary>
where
    F: FnMut(&IntSet) -> ControlFlow<()>,
{
    task.validate(Mode::List)?;
    with_mask!(task, |engine| {
        let mut list = ListSink {
            n: task.n,
            visited: 0,
            f: &mut sink,
        };
        let shared = AtomicU64::new(0);
        let mut ctx = Ctx::new(&shared, task.node_budget);
        let root = engine.root();
        match root {
            None => Ok(VisitSummary {
                visited: 0,
                completed: true,
            }),
            Some(root) => match engine.dfs(task.n, &root, &mut list, &mut ctx) {
                Ok(()) => Ok(VisitSummary {
                    visited: list.visited,
                    completed: true,
                }),
                Err(Halt::Sink) => Ok(VisitSummary {
                    visited: list.visited,
                    completed: false,
                }),
                Err(Halt::Budget) => Err(Error::BudgetExceeded {
                    budget: task.node_budget,
                }),
            },
        }
    })
}

/// Count and maximum in one unpruned pass.
pub fn survey(task: &EnumTask) -> Result<(u64, MaxResult)> {
    task.validate_shape()?;
    with_mask!(task, |engine| {
        let parts = engine.run_split(task, || MaxSink::new(task.witness_cap, false, task.n))?;
        let count = parts.iter().map(|p| p.count).sum();
        Ok((count, MaxSink::merge(parts, task.witness_cap).into_result()))
    })
}

/// One row of an exhaustive census: the admissible subsets of `[1, n]` under
/// one profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: usize,
    pub profile_id: String,
    pub count: u64,
    pub max_size: usize,
    pub num_max_witnesses: u64,
    pub sample_witnesses: Vec<IntSet>,
    pub engine_version: String,
    pub wall_time_ms: u64,
}

impl CensusRecord {
    /// Everything but timing and engine metadata; what re-runs must reproduce.
    pub fn key_fields(&self) -> (usize, &str, u64, usize, u64) {
        (
            self.n,
            &self.profile_id,
            self.count,
            self.max_size,
            self.num_max_witnesses,
        )
    }
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub workers: usize,
    pub split_depth: usize,
    pub node_budget: u64,
    pub sample_cap: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: 1,
            split_depth: 0,
            node_budget: DEFAULT_NODE_BUDGET,
            sample_cap: 16,
        }
    }
}

/// Survey every `n` in `n_lo..=n_hi`. Records already present in the store
/// must match exactly; new ones are appended.
pub fn census(
    n_lo: usize,
    n_hi: usize,
    profile: &ConstraintProfile,
    store: &mut ResultsStore,
    opts: &CensusOptions,
) -> Result<Vec<CensusRecord>> {
    let mut out = Vec::new();
    if n_lo > n_hi {
        return Ok(out);
    }
    let existing = store.census_records()?;
    let id = profile.id();
    for n in n_lo..=n_hi {
        let start = Instant::now();
        let task = EnumTask::new(n, profile.clone(), Mode::Count)
            .workers(opts.workers)
            .split_depth(opts.split_depth.min(n))
            .node_budget(opts.node_budget)
            .witness_cap(opts.sample_cap);
        let (count, max) = survey(&task)?;
        let record = CensusRecord {
            n,
            profile_id: id.clone(),
            count,
            max_size: max.size,
            num_max_witnesses: max.num_witnesses,
            sample_witnesses: max.witnesses,
            engine_version: ENGINE_VERSION.to_string(),
            wall_time_ms: start.elapsed().as_millis() as u64,
        };
        match existing.iter().find(|r| r.n == n && r.profile_id == id) {
            Some(stored) if stored.key_fields() != record.key_fields() => {
                return Err(Error::CensusMismatch {
                    key: format!("n={n} profile={id}"),
                    stored: format!("{:?}", stored.key_fields()),
                    computed: format!("{:?}", record.key_fields()),
                });
            }
            Some(_) => {}
            None => store.append(&Record::Census(record.clone()))?,
        }
        out.push(record);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// engine

/// Pick the narrowest mask that holds both `[0, n]` and `[0, target]`.
macro_rules! with_mask {
    ($task:expr, |$engine:ident| $body:expr) => {{
        let width = $task.n.max($task.profile.forbidden.value($task.n)) + 1;
        if width <= 64 {
            let $engine = Engine::<u64>::new($task)?;
            $body
        } else if width <= 128 {
            let $engine = Engine::<u128>::new($task)?;
            $body
        } else if width <= 256 {
            let $engine = Engine::<W256>::new($task)?;
            $body
        } else {
            Err(Error::TooLarge {
                n: width - 1,
                limit: 255,
            })
        }
    }};
}
use with_mask;

#[derive(Clone, Copy, Debug)]
struct Node<M: Mask> {
    chosen: M,
    blocked: M,
    layers: [M; MAX_LAYER + 1],
    size: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Halt {
    Budget,
    Sink,
}

struct Ctx<'a> {
    local: u64,
    shared: &'a AtomicU64,
    budget: u64,
}

const FLUSH: u64 = 1 << 12;

impl<'a> Ctx<'a> {
    fn new(shared: &'a AtomicU64, budget: u64) -> Self {
        Ctx {
            local: 0,
            shared,
            budget,
        }
    }

    #[inline]
    fn tick(&mut self) -> std::result::Result<(), Halt> {
        self.local += 1;
        if self.local >= FLUSH {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> std::result::Result<(), Halt> {
        let total = self.shared.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.budget {
            Err(Halt::Budget)
        } else {
            Ok(())
        }
    }
}

trait Sink<M: Mask> {
    fn leaf(&mut self, node: &Node<M>) -> bool;

    /// Return true to cut the subtree given the current size and an upper
    /// bound on how many more elements could still join.
    fn prune(&self, _size: u32, _available: u32) -> bool {
        false
    }

    fn bounds(&self) -> bool {
        false
    }
}

struct CountSink(u64);

impl<M: Mask> Sink<M> for CountSink {
    fn leaf(&mut self, _: &Node<M>) -> bool {
        self.0 += 1;
        true
    }
}

struct MaxSink<M: Mask> {
    count: u64,
    best: u32,
    num_best: u64,
    witnesses: Vec<M>,
    cap: usize,
    prune: bool,
    n: usize,
}

impl<M: Mask> MaxSink<M> {
    fn new(cap: usize, prune: bool, n: usize) -> Self {
        MaxSink {
            count: 0,
            best: 0,
            num_best: 0,
            witnesses: Vec::new(),
            cap,
            prune,
            n,
        }
    }

    fn merge(parts: Vec<Self>, cap: usize) -> Self {
        let n = parts.first().map_or(0, |p| p.n);
        let best = parts
            .iter()
            .filter(|p| p.num_best > 0)
            .map(|p| p.best)
            .max()
            .unwrap_or(0);
        let mut out = MaxSink::new(cap, false, n);
        out.best = best;
        for p in parts {
            out.count += p.count;
            if p.num_best > 0 && p.best == best {
                out.num_best += p.num_best;
                let room = cap.saturating_sub(out.witnesses.len());
                out.witnesses.extend(p.witnesses.into_iter().take(room));
            }
        }
        out
    }

    fn into_result(self) -> MaxResult {
        let n = self.n;
        MaxResult {
            size: self.best as usize,
            witnesses: self.witnesses.into_iter().map(|m| mask_to_set(m, n)).collect(),
            num_witnesses: self.num_best,
        }
    }
}

impl<M: Mask> Sink<M> for MaxSink<M> {
    fn leaf(&mut self, node: &Node<M>) -> bool {
        self.count += 1;
        if node.size > self.best || self.num_best == 0 {
            self.best = node.size;
            self.num_best = 0;
            self.witnesses.clear();
        }
        if node.size == self.best {
            self.num_best += 1;
            if self.witnesses.len() < self.cap {
                self.witnesses.push(node.chosen);
            }
        }
        true
    }

    fn prune(&self, size: u32, available: u32) -> bool {
        // Strict so that every maximum witness is still reached.
        self.num_best > 0 && size + available < self.best
    }

    fn bounds(&self) -> bool {
        self.prune
    }
}

struct ListSink<'f, F> {
    n: usize,
    visited: u64,
    f: &'f mut F,
}

impl<M: Mask, F: FnMut(&IntSet) -> ControlFlow<()>> Sink<M> for ListSink<'_, F> {
    fn leaf(&mut self, node: &Node<M>) -> bool {
        self.visited += 1;
        (self.f)(&mask_to_set(node.chosen, self.n)).is_continue()
    }
}

fn mask_to_set<M: Mask>(m: M, n: usize) -> IntSet {
    IntSet::in_range(n, m.ones()).expect("engine only selects elements of [1, n]")
}

struct Engine<M: Mask> {
    n: usize,
    target: usize,
    sum_free: bool,
    sigma: bool,
    kmax: usize,
    /// Bit `k` set when `kA` must miss the target.
    active: u32,
    _mask: std::marker::PhantomData<M>,
}

impl<M: Mask> Engine<M> {
    fn new(task: &EnumTask) -> Result<Self> {
        let target = task.profile.forbidden.value(task.n);
        let (sigma, kmax, active) = match &task.profile.layers {
            Layers::Sigma => (true, 0, 0),
            Layers::KSet(ks) => {
                let kmax = *ks.last().expect("profiles hold at least one layer");
                if kmax > MAX_LAYER {
                    return Err(Error::TooLarge {
                        n: kmax,
                        limit: MAX_LAYER,
                    });
                }
                (false, kmax, ks.iter().fold(0u32, |acc, &k| acc | 1 << k))
            }
        };
        Ok(Engine {
            n: task.n,
            target,
            sum_free: task.profile.require_sum_free,
            sigma,
            kmax,
            active,
            _mask: std::marker::PhantomData,
        })
    }

    /// The empty-set node, or `None` when even `∅` is inadmissible (only
    /// possible for a sigma profile with target 0).
    fn root(&self) -> Option<Node<M>> {
        let mut layers = [M::zero(); MAX_LAYER + 1];
        layers[0] = M::bit(self.target);
        let node = Node {
            chosen: M::zero(),
            blocked: M::zero(),
            layers,
            size: 0,
        };
        (!self.violated(&node)).then_some(node)
    }

    #[inline]
    fn violated(&self, node: &Node<M>) -> bool {
        if self.sigma {
            node.layers[0].test(0)
        } else {
            (3..=self.kmax).any(|k| self.active >> k & 1 == 1 && node.layers[k].test(0))
        }
    }

    /// Candidates that would complete the target with a single extra summand.
    #[inline]
    fn dead(&self, node: &Node<M>) -> M {
        if self.sigma {
            node.layers[0]
        } else {
            let mut d = M::zero();
            for k in 3..=self.kmax {
                if self.active >> k & 1 == 1 {
                    d = d.or(node.layers[k - 1]);
                }
            }
            d
        }
    }

    #[inline]
    fn available(&self, node: &Node<M>, x: usize) -> u32 {
        let mut cand = M::below(x + 1).andnot(M::bit(0)).andnot(self.dead(node));
        if self.sum_free {
            cand = cand.andnot(node.blocked);
        }
        cand.count()
    }

    #[inline]
    fn include(&self, node: &Node<M>, x: usize) -> Option<Node<M>> {
        if self.sum_free && node.blocked.test(x) {
            return None;
        }
        if self.dead(node).test(x) {
            return None;
        }
        let mut next = *node;
        next.chosen = node.chosen.or(M::bit(x));
        next.size += 1;
        if self.sum_free {
            next.blocked = node.blocked.or(node.chosen.shr(x));
            if x.is_multiple_of(2) {
                next.blocked = next.blocked.or(M::bit(x / 2));
            }
        }
        if self.sigma {
            let mut r = next.layers[0];
            let mut step = x;
            while step <= self.target {
                r = r.or(r.shr(step));
                step *= 2;
            }
            next.layers[0] = r;
        } else {
            for j in 1..=self.kmax {
                next.layers[j] = next.layers[j].or(next.layers[j - 1].shr(x));
            }
        }
        (!self.violated(&next)).then_some(next)
    }

    fn dfs<S: Sink<M>>(&self, x: usize, node: &Node<M>, sink: &mut S, ctx: &mut Ctx) -> std::result::Result<(), Halt> {
        ctx.tick()?;
        if x == 0 {
            return if sink.leaf(node) { Ok(()) } else { Err(Halt::Sink) };
        }
        if sink.bounds() && sink.prune(node.size, self.available(node, x)) {
            return Ok(());
        }
        self.dfs(x - 1, node, sink, ctx)?;
        if let Some(next) = self.include(node, x) {
            self.dfs(x - 1, &next, sink, ctx)?;
        }
        Ok(())
    }

    /// All admissible decision prefixes for the top `depth` elements, in
    /// enumeration order.
    fn prefixes(&self, depth: usize, ctx: &mut Ctx) -> std::result::Result<Vec<Node<M>>, Halt> {
        let mut frontier: Vec<Node<M>> = self.root().into_iter().collect();
        for x in (self.n + 1 - depth..=self.n).rev() {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for node in &frontier {
                ctx.tick()?;
                next.push(*node);
                if let Some(inc) = self.include(node, x) {
                    next.push(inc);
                }
            }
            frontier = next;
        }
        Ok(frontier)
    }

    fn run_split<S, F>(&self, task: &EnumTask, make: F) -> Result<Vec<S>>
    where
        S: Sink<M> + Send,
        F: Fn() -> S + Sync,
    {
        let depth = task.effective_split().min(self.n);
        let shared = AtomicU64::new(0);
        let budget_err = || Error::BudgetExceeded {
            budget: task.node_budget,
        };
        let mut ctx = Ctx::new(&shared, task.node_budget);
        let prefixes = self.prefixes(depth, &mut ctx).map_err(|_| budget_err())?;
        ctx.flush().map_err(|_| budget_err())?;
        let x = self.n - depth;

        let run_one = |node: &Node<M>| -> std::result::Result<S, Halt> {
            let mut sink = make();
            let mut ctx = Ctx::new(&shared, task.node_budget);
            self.dfs(x, node, &mut sink, &mut ctx)?;
            ctx.flush()?;
            Ok(sink)
        };

        let results: Vec<std::result::Result<S, Halt>> = if task.workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(task.workers)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            pool.install(|| prefixes.par_iter().map(run_one).collect())
        } else {
            prefixes.iter().map(run_one).collect()
        };
        results
            .into_iter()
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| budget_err())
    }
}
