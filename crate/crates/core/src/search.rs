//! Exact maximum `[n, p, α]`-family search.
//!
//! Depth-first over candidate subsets in ascending lex order, adding
//! members in increasing lex position so each family is generated once.
//! Every node carries the list of later candidates still compatible with
//! the whole family, plus the bit-vectors of all intersections of up to
//! `k − 1` members (only the ones involving the newest member are needed
//! to filter the list). Branches are cut when even taking every remaining
//! candidate cannot beat the incumbent, and the whole search stops once the
//! incumbent meets the tightest applicable theorem bound.
//!
//! In parallel mode the first-member subtrees are distributed over rayon's
//! work-stealing pool; the only shared state is the incumbent, the node
//! counter and the stop flags.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::bounds::bound_report;
use crate::error::{Error, Result};
use crate::family::{full_mask, GroundSize, SetFamily, Subset};
use crate::profile::{verify_family, IntersectionProfile};

/// Largest ground size the search will enumerate candidates for.
pub const SEARCH_MAX_GROUND: usize = 24;

/// Node and time budgets are polled once per this many nodes per worker.
const POLL_INTERVAL: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    /// Worker threads; 1 runs the deterministic sequential search, 0 uses
    /// every available core.
    pub parallel_width: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: None,
            max_time: None,
            parallel_width: 1,
        }
    }
}

impl SearchBudget {
    pub fn unlimited(parallel_width: usize) -> Self {
        SearchBudget {
            parallel_width,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    /// Fix the first member to `{n−s+1, ..., n}` for each admissible size
    /// `s` (ground-set permutation symmetry). The witness is then no longer
    /// the lex-least maximum family.
    pub canonical: bool,
    /// A valid family used as the starting incumbent.
    pub seed: Option<SetFamily>,
    /// Skip the stop-at-bound shortcut.
    pub ignore_bounds: bool,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Size of the largest family found. When `infeasible`, the largest
    /// count below `k` that the search reached.
    pub max_size: usize,
    /// A certified family of size `max_size`; absent when infeasible.
    pub witness: Option<SetFamily>,
    /// True when `max_size` is proven maximal.
    pub exhausted: bool,
    pub nodes_visited: u64,
    pub elapsed: Duration,
    /// No family with at least `k` members was found.
    pub infeasible: bool,
    /// Tightest applicable theorem bound, if any.
    pub bound: Option<usize>,
}

/// Whether `candidate` can join `family` without breaking any constraint
/// that involves it. `family` is assumed valid among its own members.
pub fn extend_check(
    family: &SetFamily,
    candidate: &Subset,
    profile: &IntersectionProfile,
) -> Result<bool> {
    if candidate.ground() != family.ground() {
        return Err(Error::Context {
            left: family.ground().get(),
            right: candidate.ground().get(),
        });
    }
    if let Some(pos) = family.members().iter().position(|m| m == candidate) {
        return Err(Error::Duplicate {
            first: pos,
            second: family.len(),
            set: candidate.to_string(),
        });
    }
    if !profile.admits(1, candidate.len() as u64) {
        return Ok(false);
    }
    let bits = family.bits();
    // Walk subsets of the family of size ≤ k − 1 together with the candidate.
    fn rec(
        bits: &[u64],
        start: usize,
        meet: u64,
        depth: usize,
        k: usize,
        profile: &IntersectionProfile,
    ) -> bool {
        for i in start..bits.len() {
            let m = meet & bits[i];
            if !profile.admits(depth + 1, u64::from(m.count_ones())) {
                return false;
            }
            if depth + 1 < k && !rec(bits, i + 1, m, depth + 1, k, profile) {
                return false;
            }
        }
        true
    }
    Ok(profile.k() < 2 || rec(&bits, 0, candidate.bits(), 1, profile.k(), profile))
}

struct Shared {
    best: AtomicUsize,
    witness: Mutex<Vec<u64>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    budget_hit: AtomicBool,
}

struct Ctx<'a> {
    admit: &'a [Vec<bool>],
    k: usize,
    cands: &'a [u64],
    target: Option<usize>,
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
    shared: &'a Shared,
}

struct Worker {
    local: u64,
}

impl Ctx<'_> {
    #[inline]
    fn stopped(&self) -> bool {
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn tick(&self, w: &mut Worker) {
        w.local += 1;
        if w.local >= POLL_INTERVAL {
            self.flush(w);
        }
    }

    fn flush(&self, w: &mut Worker) {
        let total = self.shared.nodes.fetch_add(w.local, Ordering::Relaxed) + w.local;
        w.local = 0;
        let over_nodes = self.max_nodes.is_some_and(|m| total >= m);
        let over_time = self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.shared.budget_hit.store(true, Ordering::Relaxed);
            self.shared.stop.store(true, Ordering::Relaxed);
        }
    }

    fn offer(&self, family: &[u64]) {
        if family.len() <= self.shared.best.load(Ordering::Relaxed) {
            return;
        }
        let mut witness = self.shared.witness.lock().expect("witness lock");
        if family.len() > self.shared.best.load(Ordering::Relaxed) {
            witness.clear();
            witness.extend_from_slice(family);
            self.shared.best.store(family.len(), Ordering::Relaxed);
            if self.target.is_some_and(|t| family.len() >= t) {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    /// Pushes the intersections created by adding `c` onto `meets`.
    #[inline]
    fn extend_meets(&self, meets: &mut Vec<(u64, u8)>, c: u64) {
        if self.k < 2 {
            return;
        }
        let base = meets.len();
        for idx in 0..base {
            let (m, sz) = meets[idx];
            if (sz as usize) + 2 <= self.k {
                meets.push((m & c, sz + 1));
            }
        }
        meets.push((c, 1));
    }

    #[inline]
    fn compatible(&self, fresh: &[(u64, u8)], d: u64) -> bool {
        fresh
            .iter()
            .all(|&(m, sz)| self.admit[sz as usize][(m & d).count_ones() as usize])
    }

    fn child_list(&self, fresh: &[(u64, u8)], rest: &[u32]) -> Vec<u32> {
        rest.iter()
            .copied()
            .filter(|&d| self.compatible(fresh, self.cands[d as usize]))
            .collect()
    }

    fn dfs(&self, w: &mut Worker, family: &mut Vec<u64>, list: &[u32], meets: &mut Vec<(u64, u8)>) {
        self.tick(w);
        self.offer(family);
        let size = family.len();
        for pos in 0..list.len() {
            if self.stopped() {
                return;
            }
            if size + (list.len() - pos) <= self.shared.best.load(Ordering::Relaxed) {
                break;
            }
            let c = self.cands[list[pos] as usize];
            let base = meets.len();
            self.extend_meets(meets, c);
            let child = self.child_list(&meets[base..], &list[pos + 1..]);
            family.push(c);
            self.dfs(w, family, &child, meets);
            family.pop();
            meets.truncate(base);
        }
    }

    /// Explores the subtree whose first member is `cands[first]`, with the
    /// remaining members drawn from `rest`.
    fn subtree(&self, w: &mut Worker, first: u32, rest: &[u32]) {
        if self.stopped() || 1 + rest.len() <= self.shared.best.load(Ordering::Relaxed) {
            return;
        }
        let c = self.cands[first as usize];
        let mut meets = Vec::new();
        self.extend_meets(&mut meets, c);
        let child = self.child_list(&meets, rest);
        let mut family = vec![c];
        self.dfs(w, &mut family, &child, &mut meets);
    }
}

/// Lex-first maximal family: take every candidate that still fits.
fn greedy(admit: &[Vec<bool>], k: usize, cands: &[u64]) -> Vec<u64> {
    let mut family = Vec::new();
    let mut meets: Vec<(u64, u8)> = Vec::new();
    for &c in cands {
        let ok = meets
            .iter()
            .all(|&(m, sz)| admit[sz as usize][(m & c).count_ones() as usize]);
        if ok {
            if k >= 2 {
                let base = meets.len();
                for idx in 0..base {
                    let (m, sz) = meets[idx];
                    if (sz as usize) + 2 <= k {
                        meets.push((m & c, sz + 1));
                    }
                }
                meets.push((c, 1));
            }
            family.push(c);
        }
    }
    family
}

pub fn max_family(
    n: GroundSize,
    profile: &IntersectionProfile,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    max_family_with(
        n,
        profile,
        &SearchOptions {
            budget: budget.clone(),
            ..Default::default()
        },
    )
}

pub fn max_family_with(
    n: GroundSize,
    profile: &IntersectionProfile,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let start = Instant::now();
    let nn = n.get();
    if nn > SEARCH_MAX_GROUND {
        return Err(Error::Parameter(format!(
            "search enumerates all 2^n subsets; n = {nn} exceeds {SEARCH_MAX_GROUND}"
        )));
    }
    let k = profile.k();
    let admit = profile.admit_table(nn);
    let cands: Vec<u64> = (0..=full_mask(nn))
        .filter(|b| admit[0][b.count_ones() as usize])
        .collect();

    let bound = if opts.ignore_bounds {
        None
    } else {
        bound_report(nn as u64, None, profile)?.tightest_usize()
    };

    let mut incumbent = greedy(&admit, k, &cands);
    if let Some(seed) = &opts.seed {
        if seed.ground() != n {
            return Err(Error::Context {
                left: nn,
                right: seed.ground().get(),
            });
        }
        verify_family(seed, profile)
            .into_result()
            .map_err(|e| Error::Parameter(format!("seed family is invalid: {e}")))?;
        if seed.len() > incumbent.len() {
            let mut bits = seed.bits();
            bits.sort_unstable();
            incumbent = bits;
        }
    }

    let shared = Shared {
        best: AtomicUsize::new(incumbent.len()),
        witness: Mutex::new(incumbent),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        budget_hit: AtomicBool::new(false),
    };
    let ctx = Ctx {
        admit: &admit,
        k,
        cands: &cands,
        target: bound,
        deadline: opts.budget.max_time.map(|t| start + t),
        max_nodes: opts.budget.max_nodes,
        shared: &shared,
    };
    if bound.is_some_and(|b| shared.best.load(Ordering::Relaxed) >= b) {
        shared.stop.store(true, Ordering::Relaxed);
    }

    // Root: first-member choices and the candidates allowed after each.
    let roots: Vec<(u32, Vec<u32>)> = if opts.canonical {
        (0..=nn)
            .filter(|&s| admit[0][s])
            .filter_map(|s| {
                let rep = full_mask(s);
                let idx = cands.binary_search(&rep).ok()? as u32;
                let rest = (idx + 1..cands.len() as u32)
                    .filter(|&d| cands[d as usize].count_ones() as usize >= s)
                    .collect();
                Some((idx, rest))
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut root_worker = Worker { local: 0 };
    ctx.tick(&mut root_worker);
    ctx.flush(&mut root_worker);
    let width = opts.budget.parallel_width;
    let total = cands.len() as u32;
    let all: Vec<u32> = (0..total).collect();
    let run_first = |i: usize, w: &mut Worker| {
        if opts.canonical {
            let (first, rest) = &roots[i];
            ctx.subtree(w, *first, rest);
        } else {
            ctx.subtree(w, i as u32, &all[i + 1..]);
        }
    };
    let first_choices = if opts.canonical { roots.len() } else { cands.len() };

    if width == 1 || !crate::par::enabled() {
        let mut w = Worker { local: 0 };
        for i in 0..first_choices {
            if ctx.stopped() {
                break;
            }
            run_first(i, &mut w);
        }
        ctx.flush(&mut w);
    } else {
        crate::par::with_width(width, || {
            crate::par::for_each_range(first_choices, |i| {
                let mut w = Worker { local: 0 };
                run_first(i, &mut w);
                ctx.flush(&mut w);
            })
        });
    }

    let best_bits = shared.witness.into_inner().expect("witness lock");
    let max_size = best_bits.len();
    let infeasible = max_size < k;
    let witness = if infeasible {
        None
    } else {
        let family = SetFamily::from_bits_unchecked(n, &best_bits);
        let report = verify_family(&family, profile);
        if !report.valid {
            return Err(Error::Invariant(format!(
                "search witness {family} fails verification: {}",
                report.violations[0]
            )));
        }
        Some(family)
    };
    Ok(SearchOutcome {
        max_size,
        witness,
        exhausted: !shared.budget_hit.load(Ordering::Relaxed),
        nodes_visited: shared.nodes.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
        infeasible,
        bound,
    })
}

/// Re-checks an outcome's witness: valid under `profile` and of size
/// `max_size`. Infeasible outcomes carry no witness and pass vacuously.
pub fn certify(outcome: &SearchOutcome, profile: &IntersectionProfile) -> bool {
    match &outcome.witness {
        None => outcome.infeasible,
        Some(w) => w.len() == outcome.max_size && verify_family(w, profile).valid,
    }
}
