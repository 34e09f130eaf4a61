//! Joint multi-user detection over the K parallel trellises.
//!
//! Received grids are indexed `[t][k]` and cover `eta` data units followed by
//! the flush units. Branch metrics are squared Euclidean distances against
//! the channel-scaled point, `|y - h z|^2`.

mod two_layer;

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::encoder::{Frame, TcmScheme};
use crate::error::{Error, Result};
use crate::mapping::MappingMatrix;

pub use two_layer::{
    branch_cdf, decode_two_layer, inner_candidates, BranchStats, Candidate, InnerCandidates, TwoLayerParams,
    TwoLayerResult,
};

/// Largest hypothesis count the exhaustive decoder accepts.
pub const MAX_HYPOTHESES: u128 = 1 << 24;
/// Largest `K V` the full super-trellis decoder accepts.
pub const MAX_SUPER_BITS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMode {
    #[default]
    TwoLayer,
    Optimal,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub frame: Frame,
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlsdResult {
    pub frame: Frame,
    pub metric: f64,
    /// Whether the runner-up metric is strictly worse (relative 1e-9).
    pub unique: bool,
}

/// User `slot`'s `q`-bit block inside an assembled sequence of `d_f` blocks.
pub fn user_block(b: usize, slot: usize, q: usize, d_f: usize) -> usize {
    (b >> (q * (d_f - 1 - slot))) & ((1 << q) - 1)
}

/// True when every user's block agrees on all subcarriers it occupies.
pub fn cross_check(kit: &[usize], mapping: &MappingMatrix, q: usize) -> bool {
    let d_f = mapping.d_f();
    (0..mapping.users()).all(|j| {
        let mut blocks = mapping
            .subcarriers_of_0(j)
            .iter()
            .map(|&k| user_block(kit[k], mapping.slot_of(k, j).expect("occupied"), q, d_f));
        let first = blocks.next();
        blocks.all(|b| Some(b) == first)
    })
}

/// `metrics[k][c] = |y[k] - h[k] z(k, c)|^2` for one unit.
pub(crate) fn unit_metrics(scheme: &TcmScheme, y: &[Complex64], h: &[Complex64]) -> Vec<Vec<f64>> {
    (0..scheme.mapping.subcarriers())
        .map(|k| {
            scheme
                .labeling
                .table(k)
                .iter()
                .map(|p| {
                    let z = Complex64::new(p.position.re as f64, p.position.im as f64);
                    (y[k] - h[k] * z).norm_sqr()
                })
                .collect()
        })
        .collect()
}

fn check_dims(scheme: &TcmScheme, y: &[Vec<Complex64>], real: &ChannelRealization) -> Result<usize> {
    let m = scheme.flush_len();
    if y.len() < m || y.len() != real.units() {
        return Err(Error::LengthMismatch {
            expected: real.units().max(m),
            got: y.len(),
        });
    }
    let k = scheme.mapping.subcarriers();
    if let Some(bad) = y.iter().chain(&real.gains).find(|row| row.len() != k) {
        return Err(Error::LengthMismatch {
            expected: k,
            got: bad.len(),
        });
    }
    Ok(y.len() - m)
}

/// `bk[k][a]`: the sequence on subcarrier `k` when the users' blocks are
/// packed into `a` (user `j` at bits `q j ..`).
fn assembly_table(scheme: &TcmScheme) -> Vec<Vec<usize>> {
    let q = scheme.q;
    let mask = (1usize << q) - 1;
    let joint = 1usize << (q * scheme.mapping.users());
    (0..scheme.mapping.subcarriers())
        .map(|k| {
            (0..joint)
                .map(|a| {
                    scheme
                        .mapping
                        .users_0(k)
                        .iter()
                        .fold(0, |acc, &j| (acc << q) | (a >> (q * j) & mask))
                })
                .collect()
        })
        .collect()
}

fn unpack_frame(scheme: &TcmScheme, assignments: &[usize]) -> Frame {
    let q = scheme.q;
    let mask = (1usize << q) - 1;
    let bits = (0..scheme.mapping.users())
        .map(|j| assignments.iter().map(|&a| a >> (q * j) & mask).collect())
        .collect();
    Frame { q, bits }
}

/// Exact maximum-likelihood detection by enumerating every user bit
/// assignment over the whole frame.
pub fn mlsd_exhaustive(scheme: &TcmScheme, y: &[Vec<Complex64>], real: &ChannelRealization) -> Result<MlsdResult> {
    let eta = check_dims(scheme, y, real)?;
    let joint_bits = scheme.q * scheme.mapping.users();
    let total_bits = joint_bits as u128 * eta as u128;
    if total_bits >= 128 || 1u128 << total_bits > MAX_HYPOTHESES {
        return Err(Error::TooLarge(if total_bits >= 128 { u128::MAX } else { 1u128 << total_bits }));
    }
    let k_count = scheme.mapping.subcarriers();
    let metrics: Vec<_> = (0..y.len()).map(|t| unit_metrics(scheme, &y[t], &real.gains[t])).collect();
    let bk = assembly_table(scheme);
    let free = scheme.uncoded_bits();
    let trellis = &scheme.trellis;
    let joint_mask = (1usize << joint_bits) - 1;

    let mut best = (f64::INFINITY, 0usize);
    let mut second = f64::INFINITY;
    let mut states = vec![0usize; k_count];
    for hyp in 0..1usize << (joint_bits * eta) {
        states.iter_mut().for_each(|s| *s = 0);
        let mut metric = 0.0;
        for t in 0..eta {
            let a = hyp >> (joint_bits * t) & joint_mask;
            for k in 0..k_count {
                let b = bk[k][a];
                let (next, prefix) = trellis.encode_step(states[k], b >> free);
                let c = (prefix << free) | (b & ((1 << free) - 1));
                metric += metrics[t][k][c];
                states[k] = next;
            }
        }
        for unit in &metrics[eta..] {
            for k in 0..k_count {
                let u = trellis.flush_input[states[k]];
                let (next, prefix) = trellis.encode_step(states[k], u);
                metric += unit[k][prefix << free];
                states[k] = next;
            }
        }
        if metric < best.0 {
            second = best.0;
            best = (metric, hyp);
        } else if metric < second {
            second = metric;
        }
    }
    let assignments: Vec<usize> = (0..eta).map(|t| best.1 >> (joint_bits * t) & joint_mask).collect();
    Ok(MlsdResult {
        frame: unpack_frame(scheme, &assignments),
        metric: best.0,
        unique: second > best.0 + 1e-9 * best.0.abs().max(1.0),
    })
}

fn pack(states: &[usize], v: u32) -> usize {
    states.iter().enumerate().fold(0, |acc, (k, &s)| acc | s << (v as usize * k))
}

/// Viterbi search over the full super-trellis of all `2^{K V}` joint states.
pub fn viterbi_optimal(scheme: &TcmScheme, y: &[Vec<Complex64>], real: &ChannelRealization) -> Result<Decoded> {
    let eta = check_dims(scheme, y, real)?;
    let v = scheme.trellis.code.v;
    let k_count = scheme.mapping.subcarriers();
    let super_bits = v * k_count as u32;
    if super_bits > MAX_SUPER_BITS {
        return Err(Error::StateSpaceTooLarge(super_bits));
    }
    let n_super = 1usize << super_bits;
    let smask = (1usize << v) - 1;
    let bk = assembly_table(scheme);
    let joint = bk[0].len();
    let free = scheme.uncoded_bits();
    let trellis = &scheme.trellis;

    let mut metric = vec![f64::INFINITY; n_super];
    metric[0] = 0.0;
    // per unit: (previous super state, assignment)
    let mut back: Vec<Vec<(u32, u32)>> = Vec::with_capacity(y.len());
    let mut comp = vec![0usize; k_count];
    for t in 0..y.len() {
        let m = unit_metrics(scheme, &y[t], &real.gains[t]);
        let mut next_metric = vec![f64::INFINITY; n_super];
        let mut bp = vec![(u32::MAX, 0u32); n_super];
        for (s, &base) in metric.iter().enumerate() {
            if base == f64::INFINITY {
                continue;
            }
            if t < eta {
                for a in 0..joint {
                    let mut total = base;
                    for (k, slot) in comp.iter_mut().enumerate() {
                        let st = s >> (v as usize * k) & smask;
                        let b = bk[k][a];
                        let (n, prefix) = trellis.encode_step(st, b >> free);
                        total += m[k][(prefix << free) | (b & ((1 << free) - 1))];
                        *slot = n;
                    }
                    let ns = pack(&comp, v);
                    if total < next_metric[ns] {
                        next_metric[ns] = total;
                        bp[ns] = (s as u32, a as u32);
                    }
                }
            } else {
                let mut total = base;
                for (k, slot) in comp.iter_mut().enumerate() {
                    let st = s >> (v as usize * k) & smask;
                    let (n, prefix) = trellis.encode_step(st, trellis.flush_input[st]);
                    total += m[k][prefix << free];
                    *slot = n;
                }
                let ns = pack(&comp, v);
                if total < next_metric[ns] {
                    next_metric[ns] = total;
                    bp[ns] = (s as u32, 0);
                }
            }
        }
        metric = next_metric;
        back.push(bp);
    }
    let mut s = 0usize;
    let mut assignments = vec![0usize; eta];
    for t in (0..y.len()).rev() {
        let (prev, a) = back[t][s];
        if t < eta {
            assignments[t] = a as usize;
        }
        s = prev as usize;
    }
    Ok(Decoded {
        frame: unpack_frame(scheme, &assignments),
        metric: metric[0],
    })
}
