//! Rate-1/2 outer convolutional code (constraint length 7, generators 133
//! and 171 octal) with hard-decision Viterbi decoding.

const G0: u32 = 0o133;
const G1: u32 = 0o171;
const MEMORY: usize = 6;
const STATES: usize = 1 << MEMORY;

fn outputs(reg: u32) -> (u8, u8) {
    ((reg & G0).count_ones() as u8 & 1, (reg & G1).count_ones() as u8 & 1)
}

/// Encodes `bits` followed by six zero tail bits; output length is
/// `2 * (bits.len() + 6)`.
pub fn encode(bits: &[u8]) -> Vec<u8> {
    let mut state = 0u32;
    let mut out = Vec::with_capacity(2 * (bits.len() + MEMORY));
    for &b in bits.iter().chain(std::iter::repeat_n(&0, MEMORY)) {
        let reg = (u32::from(b & 1) << MEMORY) | state;
        let (a, c) = outputs(reg);
        out.push(a);
        out.push(c);
        state = reg >> 1;
    }
    out
}

pub fn coded_len(payload: usize) -> usize {
    2 * (payload + MEMORY)
}

/// Hard-decision Viterbi decoding of a terminated codeword of
/// `coded_len(payload)` bits.
pub fn decode(received: &[u8], payload: usize) -> Vec<u8> {
    let steps = payload + MEMORY;
    assert_eq!(received.len(), 2 * steps, "received length");
    let mut metric = vec![u32::MAX; STATES];
    metric[0] = 0;
    let mut decisions: Vec<[u8; STATES]> = Vec::with_capacity(steps);
    for t in 0..steps {
        let (r0, r1) = (received[2 * t] & 1, received[2 * t + 1] & 1);
        let mut next = vec![u32::MAX; STATES];
        let mut choice = [0u8; STATES];
        for (s, &m) in metric.iter().enumerate() {
            if m == u32::MAX {
                continue;
            }
            let inputs: &[u32] = if t < payload { &[0, 1] } else { &[0] };
            for &b in inputs {
                let reg = (b << MEMORY) | s as u32;
                let (a, c) = outputs(reg);
                let ns = (reg >> 1) as usize;
                let cand = m + u32::from(a != r0) + u32::from(c != r1);
                // the predecessor is determined by `ns` and the bit shifted out
                if cand < next[ns] {
                    next[ns] = cand;
                    choice[ns] = (s & 1) as u8;
                }
            }
        }
        metric = next;
        decisions.push(choice);
    }
    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = (state >> (MEMORY - 1)) as u8 & 1;
        let lost = decisions[t][state] as usize;
        state = ((state << 1) & (STATES - 1)) | lost;
    }
    bits.truncate(payload);
    bits
}
