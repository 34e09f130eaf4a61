//! Orthogonal baseline: one user's Gray-labeled symbol per tone,
//! minimum-distance detection.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::OfdmaModulation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GrayConstellation {
    pub bits: usize,
    /// `points[label]`.
    pub points: Vec<Complex64>,
}

fn gray(m: usize) -> usize {
    m ^ (m >> 1)
}

impl GrayConstellation {
    /// Unit-radius PSK with adjacent phases differing in one bit.
    pub fn psk(bits: usize) -> Result<Self> {
        if bits == 0 || bits > 16 {
            return Err(Error::InvalidDimensions(format!("{bits} bits per PSK symbol")));
        }
        let m = 1usize << bits;
        let mut points = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            points[gray(i)] = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / m as f64);
        }
        Ok(Self { bits, points })
    }

    /// Square QAM on odd coordinates, Gray-labeled per axis (high bits
    /// select the in-phase level).
    pub fn qam(bits: usize) -> Result<Self> {
        if bits == 0 || !bits.is_multiple_of(2) || bits > 16 {
            return Err(Error::InvalidDimensions(format!("{bits} bits per square QAM symbol")));
        }
        let half = bits / 2;
        let side = 1usize << half;
        let level = |i: usize| (2 * i) as f64 - (side - 1) as f64;
        let mut points = vec![Complex64::new(0.0, 0.0); side * side];
        for i in 0..side {
            for q in 0..side {
                points[(gray(i) << half) | gray(q)] = Complex64::new(level(i), level(q));
            }
        }
        Ok(Self { bits, points })
    }

    pub fn new(kind: OfdmaModulation, bits: usize) -> Result<Self> {
        match kind {
            OfdmaModulation::Psk => Self::psk(bits),
            OfdmaModulation::Qam => Self::qam(bits),
        }
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Label of the point nearest to `y / h`, measured as `|y - h z|`.
    pub fn detect(&self, y: Complex64, h: Complex64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (l, &z) in self.points.iter().enumerate() {
            let d = (y - h * z).norm_sqr();
            if d < best.0 {
                best = (d, l);
            }
        }
        best.1
    }
}
