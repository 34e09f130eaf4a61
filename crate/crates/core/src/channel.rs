//! Per-subcarrier flat channels, block interleaving and noise calibration.
//!
//! Noise variance `sigma2` is per real dimension: `n = sigma (N1 + j N2)`
//! with standard normal `N1`, `N2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::constellation::Gaussian;
use crate::error::{Error, Result};

pub const DEFAULT_DOPPLER_HZ: f64 = 50.0;
pub const DEFAULT_SAMPLE_PERIOD_S: f64 = 1.0 / 1800.0;
const SINUSOIDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    #[default]
    Awgn,
    Rayleigh,
}

/// Gains `h[t][k]` and the noise variance per real dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Vec<Complex64>>,
    pub sigma2: f64,
}

impl ChannelRealization {
    pub fn awgn(units: usize, subcarriers: usize, sigma2: f64) -> Self {
        Self {
            gains: vec![vec![Complex64::new(1.0, 0.0); subcarriers]; units],
            sigma2,
        }
    }

    /// Rayleigh fading on the physical time-frequency grid. When an
    /// interleaver is given, the returned gains are those seen by each
    /// logical `(t, k)` symbol after deinterleaving.
    pub fn rayleigh<R: Rng + ?Sized>(
        units: usize,
        subcarriers: usize,
        fading: &FadingParams,
        sigma2: f64,
        interleaver: Option<&Interleaver>,
        rng: &mut R,
    ) -> Self {
        let logical = units * subcarriers;
        let slots = interleaver.map_or(logical, |il| il.padded_len(logical));
        let phys_units = slots.div_ceil(subcarriers.max(1));
        let tracks: Vec<Vec<Complex64>> = (0..subcarriers)
            .map(|_| sum_of_sinusoids(phys_units, fading, rng))
            .collect();
        let phys: Vec<Complex64> = (0..slots).map(|i| tracks[i % subcarriers][i / subcarriers]).collect();
        let flat = match interleaver {
            Some(il) => il.deinterleave(&phys, logical),
            None => phys,
        };
        Self {
            gains: flat.chunks(subcarriers.max(1)).map(<[_]>::to_vec).collect(),
            sigma2,
        }
    }

    pub fn units(&self) -> usize {
        self.gains.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    pub doppler_hz: f64,
    pub sample_period_s: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self {
            doppler_hz: DEFAULT_DOPPLER_HZ,
            sample_period_s: DEFAULT_SAMPLE_PERIOD_S,
        }
    }
}

/// One unit-power complex Gaussian track from a randomized sum of sinusoids
/// with Clarke-type angle spreading.
pub fn sum_of_sinusoids<R: Rng + ?Sized>(len: usize, p: &FadingParams, rng: &mut R) -> Vec<Complex64> {
    let mut uni = || rng.random_range(-PI..PI);
    let theta = uni();
    let waves: Vec<(f64, f64, f64)> = (1..=SINUSOIDS)
        .map(|n| {
            let alpha = (2.0 * PI * n as f64 - PI + theta) / (4.0 * SINUSOIDS as f64);
            (alpha, uni(), uni())
        })
        .collect();
    let wd = 2.0 * PI * p.doppler_hz;
    let amp = (1.0 / SINUSOIDS as f64).sqrt();
    (0..len)
        .map(|i| {
            let t = i as f64 * p.sample_period_s;
            let (mut re, mut im) = (0.0, 0.0);
            for &(alpha, phi, psi) in &waves {
                re += (wd * t * alpha.cos() + phi).cos();
                im += (wd * t * alpha.sin() + psi).cos();
            }
            Complex64::new(amp * re, amp * im)
        })
        .collect()
}

/// `y[t][k] = h[t][k] x[t][k] + n[t][k]`.
pub fn apply_channel<R: Rng + ?Sized>(
    tx: &[Vec<Gaussian>],
    realization: &ChannelRealization,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    if tx.len() != realization.units() {
        return Err(Error::LengthMismatch {
            expected: realization.units(),
            got: tx.len(),
        });
    }
    let sigma = realization.sigma2.sqrt();
    tx.iter()
        .zip(&realization.gains)
        .map(|(row, gains)| {
            if row.len() != gains.len() {
                return Err(Error::LengthMismatch {
                    expected: gains.len(),
                    got: row.len(),
                });
            }
            Ok(row
                .iter()
                .zip(gains)
                .map(|(z, h)| {
                    let n = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
                    h * Complex64::new(z.re as f64, z.im as f64) + n * sigma
                })
                .collect())
        })
        .collect()
}

/// Noise variance per real dimension for a target `Eb/N0`.
pub fn calibrate_noise(ebn0_db: f64, spectral_eff: f64, avg_symbol_energy: f64) -> f64 {
    let eb = avg_symbol_energy / spectral_eff;
    let n0 = eb / 10f64.powf(ebn0_db / 10.0);
    n0 / 2.0
}

/// Block interleaver: each `rows x cols` block is written row by row and
/// read column by column. A partial last block is padded with defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interleaver {
    pub rows: usize,
    pub cols: usize,
}

impl Default for Interleaver {
    fn default() -> Self {
        Self { rows: 32, cols: 16 }
    }
}

impl Interleaver {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions("interleaver needs positive rows and cols".into()));
        }
        Ok(Self { rows, cols })
    }

    pub fn block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn padded_len(&self, len: usize) -> usize {
        len.div_ceil(self.block()) * self.block()
    }

    pub fn interleave<T: Clone + Default>(&self, data: &[T]) -> Vec<T> {
        let mut padded = data.to_vec();
        padded.resize(self.padded_len(data.len()), T::default());
        let mut out = Vec::with_capacity(padded.len());
        for block in padded.chunks(self.block()) {
            for c in 0..self.cols {
                for r in 0..self.rows {
                    out.push(block[r * self.cols + c].clone());
                }
            }
        }
        out
    }

    /// Inverse of [`Interleaver::interleave`], truncated to `len` items.
    pub fn deinterleave<T: Clone + Default>(&self, data: &[T], len: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(data.len());
        for block in data.chunks(self.block()) {
            let mut buf = vec![T::default(); self.block()];
            for c in 0..self.cols {
                for r in 0..self.rows {
                    if let Some(v) = block.get(c * self.rows + r) {
                        buf[r * self.cols + c] = v.clone();
                    }
                }
            }
            out.extend(buf);
        }
        out.truncate(len);
        out
    }
}
