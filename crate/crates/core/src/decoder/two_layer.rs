//! Reduced-complexity two-layer decoder: per-subcarrier candidate gating
//! (inner layer) and a survivor-limited super-trellis search (outer layer).

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use super::{check_dims, unit_metrics, user_block};
use crate::channel::ChannelRealization;
use crate::encoder::{Frame, TcmScheme};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLayerParams {
    /// Maximum number of survivors kept per unit.
    pub lambda: usize,
    /// Radius parameter; candidates satisfy `|y - h z| <= a sigma^2`.
    /// `f64::INFINITY` disables gating.
    pub radius_a: f64,
    /// Keep at most one survivor per joint state.
    pub dedup: bool,
}

impl Default for TwoLayerParams {
    fn default() -> Self {
        Self {
            lambda: 25,
            radius_a: 5.0,
            dedup: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Assembled data sequence (all zero on flush units).
    pub b: usize,
    pub c: usize,
    pub next: usize,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerCandidates {
    pub entries: Vec<Candidate>,
    /// Feasibility checks performed.
    pub checks: usize,
    /// Whether the radius admitted nothing and the nearest point was used.
    pub fallback: bool,
}

/// Candidates leaving encoder state `state` on one subcarrier. `metrics[c]`
/// is the squared distance to the channel-scaled point of sequence `c`.
pub fn inner_candidates(scheme: &TcmScheme, metrics: &[f64], state: usize, radius: f64, flush: bool) -> InnerCandidates {
    let trellis = &scheme.trellis;
    let free = scheme.uncoded_bits();
    if flush {
        let u = trellis.flush_input[state];
        let (next, prefix) = trellis.encode_step(state, u);
        let c = prefix << free;
        return InnerCandidates {
            entries: vec![Candidate { b: 0, c, next, metric: metrics[c] }],
            checks: 1,
            fallback: false,
        };
    }
    let limit = radius * radius;
    let mut entries = Vec::new();
    let mut nearest: Option<Candidate> = None;
    let total = 1usize << scheme.data_bits();
    for b in 0..total {
        let (next, prefix) = trellis.encode_step(state, b >> free);
        let c = (prefix << free) | (b & ((1 << free) - 1));
        let cand = Candidate { b, c, next, metric: metrics[c] };
        if cand.metric <= limit {
            entries.push(cand);
        }
        if nearest.is_none_or(|n| cand.metric < n.metric) {
            nearest = Some(cand);
        }
    }
    let fallback = entries.is_empty();
    if fallback {
        entries.extend(nearest);
    }
    InnerCandidates {
        entries,
        checks: total,
        fallback,
    }
}

/// Per-unit complexity counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnitStats {
    /// Cartesian products formed from the inner candidate sets.
    pub candidate_branches: u64,
    /// Branches passing the cross check, counting repeats from survivors
    /// that share a joint state.
    pub qualified_raw: usize,
    /// Distinct (previous joint state, data kit) qualified branches.
    pub qualified: usize,
    pub survivors: usize,
    pub inner_checks: usize,
    pub fallbacks: usize,
    /// No kit passed the cross check inside the radius, so the unit was
    /// re-expanded without gating.
    pub widened: bool,
    pub widened_checks: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BranchStats {
    pub units: Vec<UnitStats>,
}

impl BranchStats {
    pub fn qualified_counts(&self) -> Vec<usize> {
        self.units.iter().map(|u| u.qualified).collect()
    }

    pub fn qualified_raw_counts(&self) -> Vec<usize> {
        self.units.iter().map(|u| u.qualified_raw).collect()
    }

    pub fn extend(&mut self, other: &BranchStats) {
        self.units.extend_from_slice(&other.units);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerResult {
    pub frame: Frame,
    pub metric: f64,
    pub stats: BranchStats,
    /// False when no survivor ended in the all-zero joint state.
    pub terminated: bool,
}

#[derive(Debug, Clone, Copy)]
struct Survivor {
    state: u64,
    metric: f64,
    node: u32,
}

#[derive(Debug, Clone, Copy)]
struct Extension {
    metric: f64,
    assignment: u64,
    parent: usize,
    state: u64,
}

const UNSET: usize = usize::MAX;

/// Static search order facts: for each subcarrier, which of its slots carry
/// users already fixed by earlier subcarriers.
struct Plan {
    // per subcarrier: (slot, user) pairs, fixed ones first
    fixed: Vec<Vec<(usize, usize)>>,
    free: Vec<Vec<(usize, usize)>>,
}

impl Plan {
    fn new(scheme: &TcmScheme) -> Self {
        let f = &scheme.mapping;
        let mut seen = vec![false; f.users()];
        let mut fixed = Vec::new();
        let mut free = Vec::new();
        for k in 0..f.subcarriers() {
            let (a, b): (Vec<_>, Vec<_>) = f.users_0(k).iter().copied().enumerate().partition(|&(_, j)| seen[j]);
            for &(_, j) in &b {
                seen[j] = true;
            }
            fixed.push(a);
            free.push(b);
        }
        Self { fixed, free }
    }
}

/// Candidates of one subcarrier grouped by the blocks of its fixed users.
struct Buckets {
    groups: Vec<Vec<u32>>,
}

fn fixed_key(b: usize, fixed: &[(usize, usize)], q: usize, d_f: usize) -> usize {
    fixed.iter().fold(0, |acc, &(slot, _)| (acc << q) | user_block(b, slot, q, d_f))
}

impl Buckets {
    fn new(cands: &InnerCandidates, fixed: &[(usize, usize)], q: usize, d_f: usize) -> Self {
        let mut groups = vec![Vec::new(); 1 << (q * fixed.len())];
        for (i, c) in cands.entries.iter().enumerate() {
            groups[fixed_key(c.b, fixed, q, d_f)].push(i as u32);
        }
        Self { groups }
    }
}

struct Search<'a> {
    scheme: &'a TcmScheme,
    plan: &'a Plan,
    cands: &'a [InnerCandidates],
    buckets: Vec<Buckets>,
    v: usize,
}

impl Search<'_> {
    /// Depth-first product over subcarriers restricted to kits whose user
    /// blocks agree. Calls `emit(assignment, metric, next_state)` per kit.
    fn run(&self, k: usize, assign: &mut [usize], acc: (f64, u64), flush: bool, emit: &mut dyn FnMut(u64, f64, u64)) {
        let s = self.scheme;
        if k == self.cands.len() {
            let a = assign
                .iter()
                .enumerate()
                .fold(0u64, |x, (j, &b)| if b == UNSET { x } else { x | (b as u64) << (s.q * j) });
            emit(a, acc.0, acc.1);
            return;
        }
        let entries = &self.cands[k].entries;
        let mut visit = |cand: &Candidate, assign: &mut [usize]| {
            let next = acc.1 | (cand.next as u64) << (self.v * k);
            self.run(k + 1, assign, (acc.0 + cand.metric, next), flush, emit);
        };
        if flush {
            for cand in entries {
                visit(cand, assign);
            }
            return;
        }
        let (q, d_f) = (s.q, s.mapping.d_f());
        let key = self.plan.fixed[k].iter().fold(0, |acc, &(_, j)| (acc << q) | assign[j]);
        for &i in &self.buckets[k].groups[key] {
            let cand = &entries[i as usize];
            for &(slot, j) in &self.plan.free[k] {
                assign[j] = user_block(cand.b, slot, q, d_f);
            }
            visit(cand, assign);
        }
        for &(_, j) in &self.plan.free[k] {
            assign[j] = UNSET;
        }
    }
}

fn ext_order(x: &Extension, y: &Extension) -> std::cmp::Ordering {
    x.metric
        .total_cmp(&y.metric)
        .then(x.assignment.cmp(&y.assignment))
        .then(x.parent.cmp(&y.parent))
}

/// The `lambda` best extensions in ascending order, at most one per joint
/// state when `dedup` is set.
fn select(mut exts: Vec<Extension>, lambda: usize, dedup: bool) -> Vec<Extension> {
    if !dedup {
        if exts.len() > lambda {
            exts.select_nth_unstable_by(lambda - 1, ext_order);
            exts.truncate(lambda);
        }
        exts.sort_unstable_by(ext_order);
        return exts;
    }
    // the first occurrence of each state in sorted order is its best
    // extension, so a sorted prefix that already holds `lambda` distinct
    // states decides the answer
    let mut pool = 4 * lambda;
    loop {
        let whole = pool >= exts.len();
        let mut head: Vec<Extension> = if whole {
            std::mem::take(&mut exts)
        } else {
            exts.select_nth_unstable_by(pool - 1, ext_order);
            exts[..pool].to_vec()
        };
        head.sort_unstable_by(ext_order);
        let mut taken: HashSet<u64> = HashSet::with_capacity(lambda);
        let picked: Vec<Extension> = head
            .into_iter()
            .filter(|e| taken.len() < lambda && taken.insert(e.state))
            .collect();
        if whole || picked.len() == lambda {
            return picked;
        }
        pool *= 4;
    }
}

pub fn decode_two_layer(
    scheme: &TcmScheme,
    y: &[Vec<Complex64>],
    real: &ChannelRealization,
    params: &TwoLayerParams,
) -> Result<TwoLayerResult> {
    let eta = check_dims(scheme, y, real)?;
    if params.lambda == 0 {
        return Err(Error::InvalidDimensions("lambda must be at least 1".into()));
    }
    let k_count = scheme.mapping.subcarriers();
    let v = scheme.trellis.code.v as usize;
    if k_count * v > 64 || scheme.q * scheme.mapping.users() > 64 {
        return Err(Error::StateSpaceTooLarge((k_count * v) as u32));
    }
    let smask = (1u64 << v) - 1;
    let radius = params.radius_a * real.sigma2;

    // arena of (parent, assignment); node 0 is the root
    let mut arena: Vec<(u32, u64)> = vec![(u32::MAX, 0)];
    let mut survivors = vec![Survivor { state: 0, metric: 0.0, node: 0 }];
    let mut stats = BranchStats::default();
    let plan = Plan::new(scheme);

    for t in 0..y.len() {
        let flush = t >= eta;
        let metrics = unit_metrics(scheme, &y[t], &real.gains[t]);
        let mut unit = UnitStats::default();
        let mut exts: Vec<Extension> = Vec::new();
        for (pass, r) in [radius, f64::INFINITY].into_iter().enumerate() {
            // survivors sharing a joint state offer identical branches
            let mut seen: HashMap<u64, usize> = HashMap::new();
            let mut assign = vec![UNSET; scheme.mapping.users()];
            for (rank, surv) in survivors.iter().enumerate() {
                if let Some(&dup) = seen.get(&surv.state) {
                    unit.qualified_raw += dup;
                    continue;
                }
                let cands: Vec<InnerCandidates> = (0..k_count)
                    .map(|k| {
                        let st = (surv.state >> (v * k) & smask) as usize;
                        inner_candidates(scheme, &metrics[k], st, r, flush)
                    })
                    .collect();
                let checks = cands.iter().map(|c| c.checks).sum::<usize>();
                if pass == 0 {
                    unit.inner_checks += checks;
                } else {
                    unit.widened_checks += checks;
                }
                unit.fallbacks += cands.iter().filter(|c| c.fallback).count();
                unit.candidate_branches += cands.iter().map(|c| c.entries.len() as u64).product::<u64>();
                let before = exts.len();
                let search = Search {
                    scheme,
                    plan: &plan,
                    buckets: cands
                        .iter()
                        .enumerate()
                        .map(|(k, c)| Buckets::new(c, &plan.fixed[k], scheme.q, scheme.mapping.d_f()))
                        .collect(),
                    cands: &cands,
                    v,
                };
                search.run(0, &mut assign, (0.0, 0), flush, &mut |a, m, next| {
                    exts.push(Extension {
                        metric: surv.metric + m,
                        assignment: a,
                        parent: rank,
                        state: next,
                    });
                });
                let added = exts.len() - before;
                unit.qualified_raw += added;
                seen.insert(surv.state, added);
            }
            if !exts.is_empty() {
                break;
            }
            unit.widened = true;
        }
        unit.qualified = exts.len();
        let mut next_survivors = Vec::with_capacity(params.lambda);
        for e in select(exts, params.lambda, params.dedup) {
            arena.push((survivors[e.parent].node, e.assignment));
            next_survivors.push(Survivor {
                state: e.state,
                metric: e.metric,
                node: (arena.len() - 1) as u32,
            });
        }
        unit.survivors = next_survivors.len();
        stats.units.push(unit);
        survivors = next_survivors;
    }

    let (best, terminated) = match survivors.iter().find(|s| s.state == 0) {
        Some(s) => (*s, true),
        None => (survivors[0], false),
    };
    let mut path = Vec::with_capacity(y.len());
    let mut node = best.node;
    while node != 0 {
        let (parent, a) = arena[node as usize];
        path.push(a);
        node = parent;
    }
    path.reverse();
    let q = scheme.q;
    let mask = (1u64 << q) - 1;
    let bits = (0..scheme.mapping.users())
        .map(|j| path[..eta].iter().map(|&a| (a >> (q * j) & mask) as usize).collect())
        .collect();
    Ok(TwoLayerResult {
        frame: Frame { q, bits },
        metric: best.metric,
        stats,
        terminated,
    })
}

/// Empirical CDF of per-unit branch counts: `(c, Pr(count <= c))` at every
/// distinct observed value.
pub fn branch_cdf(counts: &[usize]) -> Vec<(usize, f64)> {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &c) in sorted.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = (i + 1) as f64 / n,
            _ => out.push((c, (i + 1) as f64 / n)),
        }
    }
    out
}
