//! Distance figures of merit for a code and labeling, and the code search
//! built on them.
//!
//! A branch labeled with coded prefix `c` may carry any point of the coset
//! `c` (the uncoded bits are free), so the branch distance between prefixes
//! `c` and `c'` is the smallest squared distance between their cosets, and
//! zero when `c == c'`.

use rayon::prelude::*;

use crate::constellation::dist_sq;
use crate::error::{Error, Result};
use crate::partition::{mssd, LabelingTable, SqDistance};
use crate::trellis::{ConvCode, TrellisDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceProfile {
    /// Smallest within-coset distance (parallel transitions).
    pub delta_min_sq: SqDistance,
    /// Smallest distance between diverging and remerging paths.
    pub delta_free_sq: SqDistance,
    pub d_free_sq: SqDistance,
    /// True when the bounded search could not rule out a shorter event
    /// beyond `depth`.
    pub depth_exceeded: bool,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductDistance {
    /// Fewest branches with nonzero distance over all error events.
    pub shortest_error_event_len: u32,
    /// Smallest product of nonzero branch distances among those events.
    pub min_product: f64,
    pub depth_exceeded: bool,
}

/// `table[c][c']` for subcarrier `k`, coded prefixes of `r + 1` bits.
pub fn branch_distances(labeling: &LabelingTable, k: usize, r: usize) -> Vec<Vec<i64>> {
    let n = 1usize << (r + 1);
    let mut table = vec![vec![0i64; n]; n];
    for c in 0..n {
        for c2 in c + 1..n {
            let a = labeling.coset(k, c, r + 1);
            let b = labeling.coset(k, c2, r + 1);
            let d = a
                .iter()
                .flat_map(|p| b.iter().map(move |q| dist_sq(p.position, q.position)))
                .min()
                .expect("nonempty cosets");
            table[c][c2] = d;
            table[c2][c] = d;
        }
    }
    table
}

/// Minimum within-coset MSSD at the level below the coded prefix.
pub fn delta_min(labeling: &LabelingTable, r: usize) -> SqDistance {
    let n = 1usize << (r + 1);
    (0..labeling.subcarriers())
        .flat_map(|k| (0..n).map(move |c| (k, c)))
        .map(|(k, c)| {
            let pos: Vec<_> = labeling.coset(k, c, r + 1).iter().map(|p| p.position).collect();
            mssd(&pos)
        })
        .min()
        .unwrap_or(SqDistance::Unbounded)
}

fn pair(a: usize, b: usize, states: usize) -> usize {
    a.min(b) * states + a.max(b)
}

/// Bounded pair-state search for one subcarrier. Stops early once an event
/// no longer than `cutoff` is found. Returns the best event cost and the
/// cheapest path still open at `depth`.
fn free_distance_one(t: &TrellisDiagram, dt: &[Vec<i64>], depth: usize, cutoff: i64) -> (i64, i64) {
    let states = t.states();
    let inputs = t.inputs();
    let mut best = i64::MAX;
    let mut cost = vec![i64::MAX; states * states];
    for s in 0..states {
        for u in 0..inputs {
            for u2 in u + 1..inputs {
                let d = dt[t.out[s][u]][t.out[s][u2]];
                let (n, n2) = (t.next[s][u], t.next[s][u2]);
                if n == n2 {
                    best = best.min(d);
                } else {
                    let i = pair(n, n2, states);
                    cost[i] = cost[i].min(d);
                }
            }
        }
    }
    for _ in 1..depth {
        if best <= cutoff {
            return (best, i64::MAX);
        }
        let mut next = vec![i64::MAX; states * states];
        let mut open = false;
        for a in 0..states {
            for b in a + 1..states {
                let base = cost[a * states + b];
                if base >= best {
                    continue;
                }
                for u in 0..inputs {
                    for u2 in 0..inputs {
                        let total = base + dt[t.out[a][u]][t.out[b][u2]];
                        if total >= best {
                            continue;
                        }
                        let (n, n2) = (t.next[a][u], t.next[b][u2]);
                        if n == n2 {
                            best = total;
                        } else {
                            let i = pair(n, n2, states);
                            if total < next[i] {
                                next[i] = total;
                                open = true;
                            }
                        }
                    }
                }
            }
        }
        cost = next;
        if !open {
            return (best, i64::MAX);
        }
    }
    (best, cost.into_iter().filter(|&c| c < best).min().unwrap_or(i64::MAX))
}

fn to_sq(v: i64) -> SqDistance {
    if v == i64::MAX {
        SqDistance::Unbounded
    } else {
        SqDistance::Finite(v)
    }
}

pub fn default_depth(t: &TrellisDiagram) -> usize {
    3 * t.code.v as usize
}

pub fn distance_profile(t: &TrellisDiagram, labeling: &LabelingTable, depth: usize) -> Result<DistanceProfile> {
    let r = t.r();
    if labeling.bits() < r + 1 {
        return Err(Error::InvalidDimensions(format!(
            "labeling has {} bits, code needs at least {}",
            labeling.bits(),
            r + 1
        )));
    }
    let delta_min_sq = delta_min(labeling, r);
    let mut free = i64::MAX;
    let mut open = i64::MAX;
    for k in 0..labeling.subcarriers() {
        let dt = branch_distances(labeling, k, r);
        let (d, o) = free_distance_one(t, &dt, depth, i64::MIN);
        free = free.min(d);
        open = open.min(o);
    }
    let delta_free_sq = to_sq(free);
    let d_free_sq = delta_min_sq.min(delta_free_sq);
    Ok(DistanceProfile {
        delta_min_sq,
        delta_free_sq,
        d_free_sq,
        // an unresolved path matters only when it could undercut d_free
        depth_exceeded: to_sq(open) < d_free_sq,
        depth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Lex {
    len: u32,
    prod: f64,
}

impl Lex {
    const INF: Lex = Lex { len: u32::MAX, prod: f64::INFINITY };

    fn less(&self, o: &Lex) -> bool {
        self.len < o.len || (self.len == o.len && self.prod < o.prod)
    }

    fn extend(&self, d: i64) -> Lex {
        if d == 0 {
            *self
        } else {
            Lex { len: self.len + 1, prod: self.prod * d as f64 }
        }
    }
}

/// Effective length and product distance over error events of at most
/// `path_len` branches; parallel transitions count as one-branch events.
pub fn product_distance(t: &TrellisDiagram, labeling: &LabelingTable, path_len: usize) -> ProductDistance {
    let r = t.r();
    let states = t.states();
    let inputs = t.inputs();
    let mut best = Lex::INF;
    if let SqDistance::Finite(d) = delta_min(labeling, r) {
        best = Lex { len: 1, prod: d as f64 };
    }
    let start = Lex { len: 0, prod: 1.0 };
    let mut exceeded = false;
    for k in 0..labeling.subcarriers() {
        let dt = branch_distances(labeling, k, r);
        let mut cost = vec![Lex::INF; states * states];
        for s in 0..states {
            for u in 0..inputs {
                for u2 in u + 1..inputs {
                    let c = start.extend(dt[t.out[s][u]][t.out[s][u2]]);
                    let (n, n2) = (t.next[s][u], t.next[s][u2]);
                    if n == n2 {
                        if c.less(&best) {
                            best = c;
                        }
                    } else if c.less(&cost[pair(n, n2, states)]) {
                        cost[pair(n, n2, states)] = c;
                    }
                }
            }
        }
        for _ in 1..path_len {
            let mut next = vec![Lex::INF; states * states];
            for a in 0..states {
                for b in a + 1..states {
                    let base = cost[a * states + b];
                    if !base.less(&best) {
                        continue;
                    }
                    for u in 0..inputs {
                        for u2 in 0..inputs {
                            let c = base.extend(dt[t.out[a][u]][t.out[b][u2]]);
                            let (n, n2) = (t.next[a][u], t.next[b][u2]);
                            if n == n2 {
                                if c.less(&best) {
                                    best = c;
                                }
                            } else if c.less(&next[pair(n, n2, states)]) {
                                next[pair(n, n2, states)] = c;
                            }
                        }
                    }
                }
            }
            cost = next;
        }
        exceeded |= cost.iter().any(|c| c.less(&best));
    }
    ProductDistance {
        shortest_error_event_len: best.len,
        min_product: best.prod,
        depth_exceeded: exceeded,
    }
}

/// Exhaustive search over the classical parity-check family, maximizing the
/// free distance (minimum over subcarriers). Ties keep the first candidate.
pub fn search_code(r: u32, v: u32, labeling: &LabelingTable, depth: usize) -> Result<(TrellisDiagram, DistanceProfile)> {
    let candidates: Vec<ConvCode> = ConvCode::ungerboeck_candidates(r, v).collect();
    let tables: Vec<Vec<Vec<i64>>> = (0..labeling.subcarriers())
        .map(|k| branch_distances(labeling, k, r as usize))
        .collect();
    let mut best: Option<(usize, i64)> = None;
    const CHUNK: usize = 256;
    for (ci, chunk) in candidates.chunks(CHUNK).enumerate() {
        let cutoff = best.map_or(i64::MIN, |b| b.1);
        let scores: Vec<Option<i64>> = chunk
            .par_iter()
            .map(|code| {
                let t = TrellisDiagram::new(code.clone()).ok()?;
                let mut free = i64::MAX;
                for dt in &tables {
                    let (d, _) = free_distance_one(&t, dt, depth, cutoff);
                    free = free.min(d);
                    if free <= cutoff {
                        break;
                    }
                }
                Some(free)
            })
            .collect();
        for (i, s) in scores.into_iter().enumerate() {
            if let Some(s) = s {
                if best.is_none_or(|b| s > b.1) {
                    best = Some((ci * CHUNK + i, s));
                }
            }
        }
    }
    let (idx, _) = best.ok_or_else(|| Error::NonRealizable("no realizable candidate".into()))?;
    let t = TrellisDiagram::new(candidates[idx].clone())?;
    let profile = distance_profile(&t, labeling, depth)?;
    Ok((t, profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::MdPoint;
    use crate::trellis::build_code;
    use num_complex::Complex;

    fn labeling_from(bits: usize, pos: &[(i64, i64)]) -> LabelingTable {
        let table = pos
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| MdPoint::new(i, vec![Complex::new(a, b)]))
            .collect();
        LabelingTable::from_tables(bits, vec![table])
    }

    // QPSK labeled so that the coded prefixes 00,01,10,11 sit at 1+i, -1-i, 1-i, -1+i
    fn toy_qpsk() -> LabelingTable {
        labeling_from(2, &[(1, 1), (-1, -1), (1, -1), (-1, 1)])
    }

    // 8 points, one uncoded bit: cosets {0,1},{2,3},... of the prefix
    fn toy_8() -> LabelingTable {
        labeling_from(3, &[(1, 1), (-3, -3), (-1, -1), (3, 3), (1, -1), (-3, 3), (-1, 1), (3, -3)])
    }

    /// Every pair of input sequences of length <= max_len from every start,
    /// diverging at the first step and merging for the first time at the end.
    fn brute_events(t: &TrellisDiagram, dt: &[Vec<i64>], max_len: usize) -> Vec<Vec<i64>> {
        let inputs = t.inputs();
        let mut events = Vec::new();
        for len in 1..=max_len {
            let total = inputs.pow(len as u32);
            for s in 0..t.states() {
                for x in 0..total {
                    for y in 0..total {
                        let digit = |v: usize, i: usize| v / inputs.pow((len - 1 - i) as u32) % inputs;
                        if digit(x, 0) >= digit(y, 0) {
                            continue;
                        }
                        let (mut a, mut b) = (s, s);
                        let mut ds = Vec::new();
                        let mut ok = true;
                        for i in 0..len {
                            let (ua, ub) = (digit(x, i), digit(y, i));
                            ds.push(dt[t.out[a][ua]][t.out[b][ub]]);
                            a = t.next[a][ua];
                            b = t.next[b][ub];
                            if (a == b) != (i == len - 1) {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            events.push(ds);
                        }
                    }
                }
            }
        }
        events
    }

    #[test]
    fn toy_free_distance_matches_brute_force() {
        let t = build_code(1, 1, &["1", "3"]).unwrap();
        for lab in [toy_qpsk(), toy_8()] {
            let p = distance_profile(&t, &lab, 6).unwrap();
            let dt = branch_distances(&lab, 0, 1);
            let brute = brute_events(&t, &dt, 6).iter().map(|e| e.iter().sum::<i64>()).min().unwrap();
            assert_eq!(p.delta_free_sq, SqDistance::Finite(brute));
            assert_eq!(p.d_free_sq, p.delta_min_sq.min(p.delta_free_sq));
            assert!(!p.depth_exceeded);
        }
    }

    #[test]
    fn toy_product_distance_matches_brute_force() {
        let t = build_code(1, 1, &["1", "3"]).unwrap();
        for lab in [toy_qpsk(), toy_8()] {
            let pd = product_distance(&t, &lab, 6);
            let dt = branch_distances(&lab, 0, 1);
            let mut best = (u32::MAX, f64::INFINITY);
            for e in brute_events(&t, &dt, 6) {
                let nz: Vec<i64> = e.into_iter().filter(|&d| d > 0).collect();
                let cand = (nz.len() as u32, nz.iter().map(|&d| d as f64).product::<f64>());
                if cand.0 < best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                    best = cand;
                }
            }
            if let SqDistance::Finite(d) = delta_min(&lab, 1) {
                if 1 < best.0 || (best.0 == 1 && (d as f64) < best.1) {
                    best = (1, d as f64);
                }
            }
            assert_eq!((pd.shortest_error_event_len, pd.min_product), best);
        }
    }

    #[test]
    fn no_uncoded_bits_means_unbounded_delta_min() {
        let t = build_code(1, 1, &["1", "3"]).unwrap();
        let p = distance_profile(&t, &toy_qpsk(), 6).unwrap();
        assert_eq!(p.delta_min_sq, SqDistance::Unbounded);
        assert_eq!(p.d_free_sq, p.delta_free_sq);
        assert!(product_distance(&t, &toy_qpsk(), 6).shortest_error_event_len >= 2);
    }

    #[test]
    fn parallel_branches_give_unit_length() {
        let t = build_code(1, 1, &["1", "3"]).unwrap();
        let lab = toy_8();
        let p = distance_profile(&t, &lab, 6).unwrap();
        // coset {1+i, -3-3i}: squared distance 32
        assert_eq!(p.delta_min_sq, SqDistance::Finite(32));
        assert_eq!(product_distance(&t, &lab, 6).shortest_error_event_len, 1);
    }

    #[test]
    fn toy_qpsk_values() {
        // diverge 00 vs 11 (distance 4), remerge 00 vs 01 (distance 8)
        let t = build_code(1, 1, &["1", "3"]).unwrap();
        let p = distance_profile(&t, &toy_qpsk(), 6).unwrap();
        assert_eq!(p.delta_free_sq, SqDistance::Finite(4 + 8));
    }

    #[test]
    fn search_returns_best_candidate() {
        let lab = toy_8();
        let (t, p) = search_code(1, 2, &lab, 6).unwrap();
        for code in ConvCode::ungerboeck_candidates(1, 2) {
            if let Ok(other) = TrellisDiagram::new(code) {
                let q = distance_profile(&other, &lab, 6).unwrap();
                assert!(q.delta_free_sq <= p.delta_free_sq);
            }
        }
        assert_eq!(t.code.v, 2);
    }
}
