//! Transmit side: per-subcarrier sequence assembly, trellis encoding, point
//! mapping and termination.

use rand::Rng;

use crate::constellation::{Gaussian, MdPoint};
use crate::error::{Error, Result};
use crate::mapping::MappingMatrix;
use crate::partition::LabelingTable;
use crate::trellis::TrellisDiagram;

/// Everything both ends of the link agree on.
#[derive(Debug, Clone)]
pub struct TcmScheme {
    pub mapping: MappingMatrix,
    pub trellis: TrellisDiagram,
    pub labeling: LabelingTable,
    /// Bits per user per time unit.
    pub q: usize,
}

impl TcmScheme {
    pub fn new(mapping: MappingMatrix, trellis: TrellisDiagram, labeling: LabelingTable, q: usize) -> Result<Self> {
        let n = q * mapping.d_f();
        if trellis.r() > n {
            return Err(Error::InvalidDimensions(format!(
                "code takes {} bits but a subcarrier carries {n}",
                trellis.r()
            )));
        }
        if labeling.bits() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                got: labeling.bits(),
            });
        }
        if labeling.subcarriers() != mapping.subcarriers() {
            return Err(Error::LengthMismatch {
                expected: mapping.subcarriers(),
                got: labeling.subcarriers(),
            });
        }
        Ok(Self {
            mapping,
            trellis,
            labeling,
            q,
        })
    }

    /// Data bits per subcarrier per unit, `q * d_f`.
    pub fn data_bits(&self) -> usize {
        self.q * self.mapping.d_f()
    }

    pub fn uncoded_bits(&self) -> usize {
        self.data_bits() - self.trellis.r()
    }

    /// Information bits per subcarrier per unit, `q J / K`.
    pub fn spectral_efficiency(&self) -> f64 {
        (self.q * self.mapping.users()) as f64 / self.mapping.subcarriers() as f64
    }

    pub fn flush_len(&self) -> usize {
        self.trellis.flush_len
    }
}

/// Per-user data: `bits[j][t]` is user `j`'s `q`-bit block at unit `t`, most
/// significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub q: usize,
    pub bits: Vec<Vec<usize>>,
}

impl Frame {
    pub fn new(q: usize, bits: Vec<Vec<usize>>) -> Result<Self> {
        let eta = bits.first().map_or(0, Vec::len);
        for row in &bits {
            if row.len() != eta {
                return Err(Error::LengthMismatch {
                    expected: eta,
                    got: row.len(),
                });
            }
            if row.iter().any(|&b| b >> q != 0) {
                return Err(Error::InvalidDimensions(format!("block wider than {q} bits")));
            }
        }
        Ok(Self { q, bits })
    }

    pub fn random<R: Rng + ?Sized>(users: usize, q: usize, eta: usize, rng: &mut R) -> Self {
        let bits = (0..users)
            .map(|_| (0..eta).map(|_| rng.random_range(0..1usize << q)).collect())
            .collect();
        Self { q, bits }
    }

    pub fn zeros(users: usize, q: usize, eta: usize) -> Self {
        Self {
            q,
            bits: vec![vec![0; eta]; users],
        }
    }

    /// Packs per-user bit streams into `q`-bit blocks, zero-padding the tail.
    pub fn from_bit_streams(q: usize, streams: &[Vec<u8>]) -> Result<Self> {
        let bits = streams
            .iter()
            .map(|s| {
                s.chunks(q)
                    .map(|c| c.iter().enumerate().fold(0usize, |a, (i, &b)| a | (usize::from(b & 1)) << (q - 1 - i)))
                    .collect()
            })
            .collect();
        Self::new(q, bits)
    }

    pub fn users(&self) -> usize {
        self.bits.len()
    }

    pub fn units(&self) -> usize {
        self.bits.first().map_or(0, Vec::len)
    }

    /// User `j`'s stream as individual bits.
    pub fn bit_stream(&self, j: usize) -> Vec<u8> {
        self.bits[j]
            .iter()
            .flat_map(|&b| (0..self.q).rev().map(move |i| (b >> i & 1) as u8))
            .collect()
    }
}

/// Concatenates the blocks of the users on subcarrier `k0` (ascending), so
/// the lowest-numbered user lands in the most significant bits.
pub fn assemble_sequence(mapping: &MappingMatrix, frame: &Frame, k0: usize, t: usize) -> Result<usize> {
    if k0 >= mapping.subcarriers() {
        return Err(Error::IndexOutOfRange {
            index: k0 + 1,
            max: mapping.subcarriers(),
        });
    }
    if t >= frame.units() {
        return Err(Error::IndexOutOfRange {
            index: t + 1,
            max: frame.units(),
        });
    }
    Ok(mapping
        .users_0(k0)
        .iter()
        .fold(0, |acc, &j| (acc << frame.q) | frame.bits[j][t]))
}

/// Splits `b` into coded and uncoded parts, advances the encoder and maps the
/// resulting sequence. Returns `(next_state, c, point)`.
pub fn tcm_encode_unit(scheme: &TcmScheme, b: usize, state: usize, k0: usize) -> (usize, usize, &MdPoint) {
    let free = scheme.uncoded_bits();
    let (next, prefix) = scheme.trellis.encode_step(state, b >> free);
    let c = (prefix << free) | (b & ((1 << free) - 1));
    (next, c, scheme.labeling.point(k0, c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxUnit {
    /// Coded sequence per subcarrier.
    pub codes: Vec<usize>,
    /// Superimposed element per subcarrier.
    pub elements: Vec<Gaussian>,
    pub flush: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxFrame {
    pub units: Vec<TxUnit>,
    pub final_states: Vec<usize>,
}

impl TxFrame {
    /// The nonzero element user `j0` places on subcarrier `k0` at unit `t`.
    pub fn user_element(&self, scheme: &TcmScheme, t: usize, k0: usize, j0: usize) -> Option<Gaussian> {
        let slot = scheme.mapping.slot_of(k0, j0)?;
        let c = self.units[t].codes[k0];
        Some(scheme.labeling.point(k0, c).components[slot])
    }

    /// Row-major `[t][k]` grid of elements.
    pub fn grid(&self) -> Vec<Vec<Gaussian>> {
        self.units.iter().map(|u| u.elements.clone()).collect()
    }
}

/// Encodes `frame` on all subcarriers, then appends flush units that drive
/// every encoder back to state 0. Flush units carry no user data.
pub fn transmit_frame(scheme: &TcmScheme, frame: &Frame) -> Result<TxFrame> {
    if frame.users() != scheme.mapping.users() || frame.q != scheme.q {
        return Err(Error::LengthMismatch {
            expected: scheme.mapping.users(),
            got: frame.users(),
        });
    }
    let k = scheme.mapping.subcarriers();
    let mut states = vec![0usize; k];
    let mut units = Vec::with_capacity(frame.units() + scheme.flush_len());
    for t in 0..frame.units() {
        let mut codes = Vec::with_capacity(k);
        let mut elements = Vec::with_capacity(k);
        for (k0, state) in states.iter_mut().enumerate() {
            let b = assemble_sequence(&scheme.mapping, frame, k0, t)?;
            let (next, c, p) = tcm_encode_unit(scheme, b, *state, k0);
            *state = next;
            codes.push(c);
            elements.push(p.position);
        }
        units.push(TxUnit {
            codes,
            elements,
            flush: false,
        });
    }
    let free = scheme.uncoded_bits();
    for _ in 0..scheme.flush_len() {
        let mut codes = Vec::with_capacity(k);
        let mut elements = Vec::with_capacity(k);
        for (k0, state) in states.iter_mut().enumerate() {
            let u = scheme.trellis.flush_input[*state];
            let (next, prefix) = scheme.trellis.encode_step(*state, u);
            *state = next;
            let c = prefix << free;
            codes.push(c);
            elements.push(scheme.labeling.point(k0, c).position);
        }
        units.push(TxUnit {
            codes,
            elements,
            flush: true,
        });
    }
    Ok(TxFrame {
        units,
        final_states: states,
    })
}
