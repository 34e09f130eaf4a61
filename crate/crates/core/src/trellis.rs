//! Systematic feedback convolutional codes of rate `r/(r+1)`.
//!
//! Parity-check polynomials are given as octal strings in the order
//! `h^r, ..., h^1, h^0`, where `h^0` is the feedback polynomial. Bit `i` of
//! an octal value is the coefficient of `D^i`.
//!
//! Input blocks and coded sequences are integers read most significant bit
//! first. The coded prefix is the parity bit followed by the `r` systematic
//! bits, i.e. `(parity << r) | input`.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    pub r: u32,
    pub v: u32,
    /// `h[i]` is `h^i`; `h[0]` is the feedback polynomial.
    pub h: Vec<u32>,
}

impl ConvCode {
    pub fn new(r: u32, v: u32, h: Vec<u32>) -> Result<Self> {
        if r == 0 || v == 0 || r > MAX_BITS || v > MAX_BITS {
            return Err(Error::InvalidDimensions(format!(
                "need 1 <= r, V <= {MAX_BITS} (r={r}, V={v})"
            )));
        }
        if h.len() != r as usize + 1 {
            return Err(Error::LengthMismatch {
                expected: r as usize + 1,
                got: h.len(),
            });
        }
        for &p in &h {
            let degree = u32::BITS - p.leading_zeros();
            if degree > v + 1 {
                return Err(Error::DegreeTooHigh {
                    degree: degree - 1,
                    registers: v,
                });
            }
        }
        if h[0] & 1 == 0 || h[0] >> v & 1 == 0 {
            return Err(Error::NonRealizable(format!(
                "feedback polynomial {:o} needs its D^0 and D^{v} terms",
                h[0]
            )));
        }
        Ok(Self { r, v, h })
    }

    /// Parses `[h^r, ..., h^1, h^0]` in octal.
    pub fn from_octal<S: AsRef<str>>(r: u32, v: u32, parity_octal: &[S]) -> Result<Self> {
        let mut h = parity_octal
            .iter()
            .map(|s| {
                u32::from_str_radix(s.as_ref().trim(), 8)
                    .map_err(|_| Error::Config(format!("bad octal polynomial {:?}", s.as_ref())))
            })
            .collect::<Result<Vec<u32>>>()?;
        h.reverse();
        Self::new(r, v, h)
    }

    /// Octal strings in table order `h^r, ..., h^0`.
    pub fn octal(&self) -> Vec<String> {
        self.h.iter().rev().map(|p| format!("{p:o}")).collect()
    }

    pub fn states(&self) -> usize {
        1 << self.v
    }

    /// One encoder step: returns `(next_state, coded_prefix)`.
    pub fn step(&self, state: usize, input: usize) -> (usize, usize) {
        let w = state as u32;
        let r = self.r;
        let bit = |i: u32| (input as u32 >> (r - i)) & 1;
        let mut parity = w & 1;
        for i in 1..=r {
            parity ^= bit(i) & self.h[i as usize] & 1;
        }
        let mut next = w >> 1;
        if parity == 1 {
            next ^= self.h[0] >> 1;
        }
        for i in 1..=r {
            if bit(i) == 1 {
                next ^= self.h[i as usize] >> 1;
            }
        }
        (next as usize, ((parity as usize) << r) | input)
    }

    /// The classical search space: `h^0` with both end terms, `h^i` (i >= 1)
    /// with neither. Ordered by increasing polynomial values, `h^0` slowest.
    pub fn ungerboeck_candidates(r: u32, v: u32) -> impl Iterator<Item = ConvCode> {
        let per = 1u64 << v.saturating_sub(1).min(MAX_BITS);
        (0..per.pow(r + 1)).filter_map(move |mut n| {
            let mut h = vec![0u32; r as usize + 1];
            for i in (0..=r as usize).rev() {
                let inner = (n % per) as u32;
                n /= per;
                h[i] = if i == 0 { 1 | (inner << 1) | (1 << v) } else { inner << 1 };
            }
            ConvCode::new(r, v, h).ok()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrellisDiagram {
    pub code: ConvCode,
    /// `next[s][u]`, `out[s][u]`.
    pub next: Vec<Vec<usize>>,
    pub out: Vec<Vec<usize>>,
    /// For each coded prefix, the `(state, input)` pairs producing it.
    pub inverse: Vec<Vec<(usize, usize)>>,
    /// Input that moves each state one step closer to state 0.
    pub flush_input: Vec<usize>,
    /// Steps needed to reach state 0 from the farthest state.
    pub flush_len: usize,
}

pub fn build_code<S: AsRef<str>>(r: u32, v: u32, parity_octal: &[S]) -> Result<TrellisDiagram> {
    TrellisDiagram::new(ConvCode::from_octal(r, v, parity_octal)?)
}

impl TrellisDiagram {
    pub fn new(code: ConvCode) -> Result<Self> {
        let states = code.states();
        let inputs = 1usize << code.r;
        let mut next = vec![vec![0; inputs]; states];
        let mut out = vec![vec![0; inputs]; states];
        let mut inverse = vec![Vec::new(); inputs * 2];
        for s in 0..states {
            for u in 0..inputs {
                let (n, c) = code.step(s, u);
                if c & (inputs - 1) != u {
                    return Err(Error::NonRealizable(format!("input {u:b} not systematic")));
                }
                next[s][u] = n;
                out[s][u] = c;
                inverse[c].push((s, u));
            }
        }

        // reverse BFS from state 0
        let mut dist = vec![usize::MAX; states];
        let mut preds = vec![Vec::new(); states];
        for s in 0..states {
            for u in 0..inputs {
                preds[next[s][u]].push(s);
            }
        }
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            for &s in &preds[t] {
                if dist[s] == usize::MAX {
                    dist[s] = dist[t] + 1;
                    queue.push_back(s);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return Err(Error::NonRealizable("some states cannot return to zero".into()));
        }
        let flush_input = (0..states)
            .map(|s| {
                if s == 0 {
                    return 0;
                }
                (0..inputs)
                    .find(|&u| dist[next[s][u]] + 1 == dist[s])
                    .expect("bfs predecessor")
            })
            .collect();
        let flush_len = dist.into_iter().max().unwrap_or(0);
        Ok(Self {
            code,
            next,
            out,
            inverse,
            flush_input,
            flush_len,
        })
    }

    pub fn states(&self) -> usize {
        self.next.len()
    }

    pub fn inputs(&self) -> usize {
        self.next[0].len()
    }

    pub fn r(&self) -> usize {
        self.code.r as usize
    }

    pub fn encode_step(&self, state: usize, input: usize) -> (usize, usize) {
        (self.next[state][input], self.out[state][input])
    }

    /// Flush inputs from `state`, ending in state 0 after `flush_len` steps.
    pub fn flush_sequence(&self, mut state: usize) -> Vec<usize> {
        (0..self.flush_len)
            .map(|_| {
                let u = self.flush_input[state];
                state = self.next[state][u];
                u
            })
            .collect()
    }

    /// Whether `ceil(V/r)` all-zero inputs clear every state.
    pub fn zero_input_flushes(&self) -> bool {
        let steps = self.code.v.div_ceil(self.code.r);
        (0..self.states()).all(|mut s| {
            for _ in 0..steps {
                s = self.next[s][0];
            }
            s == 0
        })
    }
}
