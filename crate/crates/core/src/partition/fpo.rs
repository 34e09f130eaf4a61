//! Bipartite set partitioning: greedy pair-list seeding followed by
//! farthest-point optimization sweeps.
//!
//! Points are addressed by their local index in the input slice. All distance
//! comparisons use exact squared integer distances.

use crate::constellation::{dist_sq, Gaussian, SignalSet};
use crate::error::{Error, Result};

use super::metrics::{avg_min, mssd, SqDistance};
use super::neighbor::{new_index, IndexKind, NeighborIndex};

pub const DEFAULT_MAX_SWEEPS: usize = 100;

// Relative margin for the average-minimum-distance guard.
const AVG_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpoOptions {
    pub index: IndexKind,
    pub max_sweeps: usize,
}

impl Default for FpoOptions {
    fn default() -> Self {
        Self {
            index: IndexKind::Exhaustive,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

/// Two equal halves of a signal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub first: SignalSet,
    pub second: SignalSet,
}

/// What happened inside one bipartition run. Subsets are local indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FpoReport {
    /// First subset after the greedy phase, already relabeled so that it has
    /// the smaller MSSD.
    pub phase1_first: Vec<usize>,
    pub phase1_second: Vec<usize>,
    pub phase1_objective: SqDistance,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub objective: SqDistance,
    /// Accepted swaps in order: (moved out of the first subset, moved in).
    pub swaps: Vec<(usize, usize)>,
    pub sweeps: usize,
    pub converged: bool,
}

fn sub_mssd(pos: &[Gaussian], ids: &[usize]) -> SqDistance {
    mssd(&ids.iter().map(|&i| pos[i]).collect::<Vec<_>>())
}

fn sub_avg_min(pos: &[Gaussian], ids: &[usize]) -> f64 {
    avg_min(&ids.iter().map(|&i| pos[i]).collect::<Vec<_>>())
}

fn nearest_in(pos: &[Gaussian], ids: &[usize], l: usize) -> i64 {
    ids.iter()
        .filter(|&&i| i != l)
        .map(|&i| dist_sq(pos[i], pos[l]))
        .min()
        .unwrap_or(i64::MAX)
}

/// Greedy seeding. Returns a side label (0 or 1) per point.
fn phase1(pos: &[Gaussian]) -> Vec<u8> {
    let n = pos.len();
    let half = n / 2;
    let mut pairs: Vec<(i64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((dist_sq(pos[i], pos[j]), i, j));
        }
    }
    pairs.sort_unstable();

    const FREE: u8 = u8::MAX;
    let mut side = vec![FREE; n];
    let mut subs: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut delta = [SqDistance::Unbounded; 2];

    let place = |p: usize, s: usize, side: &mut Vec<u8>, subs: &mut [Vec<usize>; 2], delta: &mut [SqDistance; 2]| {
        let d = nearest_in(pos, &subs[s], p);
        if !subs[s].is_empty() {
            delta[s] = delta[s].min(SqDistance::Finite(d));
        }
        subs[s].push(p);
        side[p] = s as u8;
    };

    let (_, a, b) = pairs[0];
    place(a, 0, &mut side, &mut subs, &mut delta);
    place(b, 1, &mut side, &mut subs, &mut delta);

    for &(d, a, b) in &pairs[1..] {
        if subs[0].len() == half || subs[1].len() == half {
            break;
        }
        let (fa, fb) = (side[a] == FREE, side[b] == FREE);
        if !fa && !fb {
            continue;
        }
        if SqDistance::Finite(d) > delta[0].max(delta[1]) {
            for p in [a, b] {
                if side[p] != FREE {
                    continue;
                }
                let d0 = nearest_in(pos, &subs[0], p);
                let d1 = nearest_in(pos, &subs[1], p);
                let mut s = if d1 > d0 { 1 } else { 0 };
                if subs[s].len() == half {
                    s = 1 - s;
                }
                place(p, s, &mut side, &mut subs, &mut delta);
            }
        } else if fa && fb {
            let keep = nearest_in(pos, &subs[0], a).min(nearest_in(pos, &subs[1], b));
            let flip = nearest_in(pos, &subs[1], a).min(nearest_in(pos, &subs[0], b));
            let (sa, sb) = if keep >= flip { (0, 1) } else { (1, 0) };
            place(a, sa, &mut side, &mut subs, &mut delta);
            place(b, sb, &mut side, &mut subs, &mut delta);
        } else {
            let (free, placed) = if fa { (a, b) } else { (b, a) };
            let s = 1 - side[placed] as usize;
            place(free, s, &mut side, &mut subs, &mut delta);
        }
    }
    let open = if subs[0].len() < half { 0 } else { 1 };
    for s in side.iter_mut() {
        if *s == FREE {
            *s = open as u8;
        }
    }
    side
}

/// Runs both phases on raw positions (pairwise distinct, even count >= 4).
pub fn fpo_positions(pos: &[Gaussian], opts: &FpoOptions) -> Result<FpoReport> {
    let n = pos.len();
    if n < 4 || n % 2 == 1 {
        return Err(Error::OddSize(n));
    }
    let side = phase1(pos);
    let mut first: Vec<usize> = (0..n).filter(|&i| side[i] == 0).collect();
    let mut second: Vec<usize> = (0..n).filter(|&i| side[i] == 1).collect();
    if sub_mssd(pos, &second) < sub_mssd(pos, &first) {
        std::mem::swap(&mut first, &mut second);
    }
    let phase1_first = first.clone();
    let phase1_second = second.clone();
    let phase1_objective = sub_mssd(pos, &first).min(sub_mssd(pos, &second));

    let mut idx1: Box<dyn NeighborIndex> = new_index(opts.index);
    for &i in &first {
        idx1.insert(i, pos[i])?;
    }
    let mut in_first = vec![false; n];
    for &i in &first {
        in_first[i] = true;
    }

    let mut swaps = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut changed = false;
        let snapshot: Vec<usize> = (0..n).filter(|&i| in_first[i]).collect();
        for l in snapshot {
            let d_max = idx1.member_search(l)?.expect("first subset has >= 2 members");
            let second_now: Vec<usize> = (0..n).filter(|&i| !in_first[i]).collect();
            let delta_min = sub_mssd(pos, &second_now);
            // two nearest members of the second subset to l
            let mut near = [(i64::MAX, usize::MAX); 2];
            for &i in &second_now {
                let d = dist_sq(pos[i], pos[l]);
                if d < near[0].0 {
                    near[1] = near[0];
                    near[0] = (d, i);
                } else if d < near[1].0 {
                    near[1] = (d, i);
                }
            }

            idx1.remove(l)?;
            let mut cands: Vec<(i64, usize)> = Vec::new();
            for &c in &second_now {
                let d_c = idx1.search(pos[c])?;
                let d_l = if near[0].1 == c { near[1].0 } else { near[0].0 };
                if d_c > d_max && SqDistance::Finite(d_l) >= delta_min {
                    cands.push((d_c, c));
                }
            }
            cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

            let mut accepted = None;
            if !cands.is_empty() {
                let before: Vec<usize> = (0..n).filter(|&i| in_first[i]).collect();
                let avg_before = sub_avg_min(pos, &before);
                for &(_, c) in &cands {
                    let after: Vec<usize> =
                        before.iter().map(|&i| if i == l { c } else { i }).collect();
                    if sub_avg_min(pos, &after) > avg_before * (1.0 + AVG_EPS) {
                        accepted = Some(c);
                        break;
                    }
                }
            }
            match accepted {
                Some(c) => {
                    idx1.insert(c, pos[c])?;
                    in_first[l] = false;
                    in_first[c] = true;
                    swaps.push((l, c));
                    changed = true;
                }
                None => idx1.insert(l, pos[l])?,
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }

    let first: Vec<usize> = (0..n).filter(|&i| in_first[i]).collect();
    let second: Vec<usize> = (0..n).filter(|&i| !in_first[i]).collect();
    let objective = sub_mssd(pos, &first).min(sub_mssd(pos, &second));
    Ok(FpoReport {
        phase1_first,
        phase1_second,
        phase1_objective,
        first,
        second,
        objective,
        swaps,
        sweeps,
        converged,
    })
}

/// Splits `set` into two equal halves with large within-subset distances.
pub fn fpo_bsp(set: &SignalSet) -> Result<Bipartition> {
    fpo_bsp_with(set, &FpoOptions::default()).map(|(b, _)| b)
}

pub fn fpo_bsp_with(set: &SignalSet, opts: &FpoOptions) -> Result<(Bipartition, FpoReport)> {
    let report = fpo_positions(&set.positions(), opts)?;
    let pick = |ids: &[usize]| SignalSet {
        d_f: set.d_f,
        points: ids.iter().map(|&i| set.points[i].clone()).collect(),
    };
    Ok((
        Bipartition {
            first: pick(&report.first),
            second: pick(&report.second),
        },
        report,
    ))
}
