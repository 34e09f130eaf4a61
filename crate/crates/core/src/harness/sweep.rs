//! Monte-Carlo BER sweeps with deterministic per-frame random streams.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::design::{design_lc_tcm, design_tcm, Design};
use super::ofdma::GrayConstellation;
use super::outer;
use crate::channel::{apply_channel, calibrate_noise, ChannelKind, ChannelRealization, Interleaver};
use crate::decoder::{decode_two_layer, mlsd_exhaustive, viterbi_optimal, BranchStats, DecodeMode};
use crate::encoder::{transmit_frame, Frame};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TcmNoma,
    Ofdma,
    LcTcm,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::TcmNoma, Scheme::Ofdma, Scheme::LcTcm];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::TcmNoma => "tcm-noma",
            Scheme::Ofdma => "ofdma",
            Scheme::LcTcm => "lc-tcm",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s}")))
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub scheme: String,
    pub ebn0_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub config_hash: String,
}

const Z95: f64 = 1.959964;

/// Wilson score interval at 95% confidence.
pub fn wilson(errors: u64, bits: u64) -> (f64, f64) {
    if bits == 0 {
        return (0.0, 1.0);
    }
    let n = bits as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == bits { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

impl BerRecord {
    pub fn new(scheme: Scheme, ebn0_db: f64, bits: u64, errors: u64, config_hash: &str) -> Self {
        let (ci_lo, ci_hi) = wilson(errors, bits);
        Self {
            scheme: scheme.tag().into(),
            ebn0_db,
            bits,
            errors,
            ber: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
            ci_lo,
            ci_hi,
            config_hash: config_hash.into(),
        }
    }

    /// Whether this interval lies strictly below `other`'s.
    pub fn clearly_below(&self, other: &BerRecord) -> bool {
        self.ci_hi < other.ci_lo
    }

    pub fn overlaps(&self, other: &BerRecord) -> bool {
        !(self.clearly_below(other) || other.clearly_below(self))
    }
}

/// Outcome of one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub record: BerRecord,
    pub frames: u64,
    pub sigma2: f64,
    /// Joint-decoder counters for every decoded unit (two-layer mode only).
    pub stats: BranchStats,
    /// Frames whose best path did not end in the all-zero state.
    pub unterminated: u64,
}

#[derive(Debug, Clone, Default)]
struct FrameOutcome {
    bits: u64,
    errors: u64,
    stats: BranchStats,
    unterminated: u64,
}

#[derive(Debug, Clone)]
enum Link {
    Tcm(Box<Design>),
    Ofdma(GrayConstellation),
}

/// A configured link ready to simulate frames.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub cfg: SimConfig,
    pub scheme: Scheme,
    link: Link,
    hash: String,
    interleaver: Option<Interleaver>,
}

/// Independent stream for frame `frame` of point `point`.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((point << 40) ^ frame);
    rng
}

impl Simulator {
    pub fn new(cfg: &SimConfig, scheme: Scheme) -> Result<Self> {
        cfg.validate()?;
        let link = match scheme {
            Scheme::TcmNoma => Link::Tcm(Box::new(design_tcm(cfg)?)),
            Scheme::LcTcm => Link::Tcm(Box::new(design_lc_tcm(cfg)?)),
            Scheme::Ofdma => {
                let f = cfg.mapping_matrix()?;
                let raw = cfg.mapping.q * f.users();
                if !raw.is_multiple_of(f.subcarriers()) {
                    return Err(Error::Config("OFDMA needs an integer number of bits per tone".into()));
                }
                Link::Ofdma(GrayConstellation::new(cfg.ofdma.modulation, raw / f.subcarriers())?)
            }
        };
        Ok(Self {
            cfg: cfg.clone(),
            scheme,
            link,
            hash: cfg.hash(),
            interleaver: cfg.interleaver.build()?,
        })
    }

    /// Reuses an existing design for a TCM scheme.
    pub fn with_design(cfg: &SimConfig, scheme: Scheme, design: Design) -> Result<Self> {
        cfg.validate()?;
        if scheme == Scheme::Ofdma {
            return Err(Error::Config("OFDMA has no trellis design".into()));
        }
        Ok(Self {
            cfg: cfg.clone(),
            scheme,
            link: Link::Tcm(Box::new(design)),
            hash: cfg.hash(),
            interleaver: cfg.interleaver.build()?,
        })
    }

    pub fn design(&self) -> Option<&Design> {
        match &self.link {
            Link::Tcm(d) => Some(d),
            Link::Ofdma(_) => None,
        }
    }

    pub fn avg_energy(&self) -> f64 {
        match &self.link {
            Link::Tcm(d) => d.avg_energy,
            Link::Ofdma(c) => c.mean_energy(),
        }
    }

    pub fn sigma2(&self, ebn0_db: f64) -> Result<f64> {
        Ok(calibrate_noise(ebn0_db, self.cfg.spectral_efficiency()?, self.avg_energy()))
    }

    /// Payload bits for each user, after the optional outer code and bit
    /// interleaving.
    fn channel_streams(&self, payload: &[Vec<u8>]) -> Vec<Vec<u8>> {
        payload
            .iter()
            .map(|p| {
                if self.cfg.sim.outer_code {
                    let coded = outer::encode(p);
                    match &self.interleaver {
                        Some(il) => il.interleave(&coded),
                        None => coded,
                    }
                } else {
                    p.clone()
                }
            })
            .collect()
    }

    fn recover(&self, stream: &[u8]) -> Vec<u8> {
        let payload = self.cfg.sim.frame_bits;
        if self.cfg.sim.outer_code {
            let len = outer::coded_len(payload);
            let coded = match &self.interleaver {
                Some(il) => il.deinterleave(&stream[..il.padded_len(len)], len),
                None => stream[..len].to_vec(),
            };
            outer::decode(&coded, payload)
        } else {
            stream[..payload].to_vec()
        }
    }

    fn realization<R: Rng + ?Sized>(&self, units: usize, k: usize, sigma2: f64, rng: &mut R) -> ChannelRealization {
        match self.cfg.channel.kind {
            ChannelKind::Awgn => ChannelRealization::awgn(units, k, sigma2),
            ChannelKind::Rayleigh => ChannelRealization::rayleigh(
                units,
                k,
                &self.cfg.channel.fading(),
                sigma2,
                self.interleaver.as_ref(),
                rng,
            ),
        }
    }

    fn run_frame(&self, sigma2: f64, rng: &mut ChaCha8Rng) -> Result<FrameOutcome> {
        let users = self.cfg.mapping_matrix()?.users();
        let payload: Vec<Vec<u8>> = (0..users)
            .map(|_| (0..self.cfg.sim.frame_bits).map(|_| rng.random_range(0..2u8)).collect())
            .collect();
        let streams = self.channel_streams(&payload);
        let (decoded, stats, terminated) = match &self.link {
            Link::Tcm(d) => self.tcm_frame(d, &streams, sigma2, rng)?,
            Link::Ofdma(c) => (self.ofdma_frame(c, &streams, sigma2, rng), BranchStats::default(), true),
        };
        let mut out = FrameOutcome {
            stats,
            unterminated: u64::from(!terminated),
            ..FrameOutcome::default()
        };
        for (p, s) in payload.iter().zip(&decoded) {
            let got = self.recover(s);
            out.bits += p.len() as u64;
            out.errors += p.iter().zip(&got).filter(|(a, b)| a != b).count() as u64;
        }
        Ok(out)
    }

    fn tcm_frame(
        &self,
        design: &Design,
        streams: &[Vec<u8>],
        sigma2: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<Vec<u8>>, BranchStats, bool)> {
        let scheme = &design.scheme;
        let frame = Frame::from_bit_streams(scheme.q, streams)?;
        let tx = transmit_frame(scheme, &frame)?;
        let real = self.realization(tx.units.len(), scheme.mapping.subcarriers(), sigma2, rng);
        let y = apply_channel(&tx.grid(), &real, rng)?;
        let (decoded, stats, terminated) = match self.cfg.decoder.mode {
            DecodeMode::TwoLayer => {
                let r = decode_two_layer(scheme, &y, &real, &self.cfg.decoder.params())?;
                (r.frame, r.stats, r.terminated)
            }
            DecodeMode::Optimal => (viterbi_optimal(scheme, &y, &real)?.frame, BranchStats::default(), true),
            DecodeMode::Exhaustive => (mlsd_exhaustive(scheme, &y, &real)?.frame, BranchStats::default(), true),
        };
        let bits = (0..decoded.users()).map(|j| decoded.bit_stream(j)).collect();
        Ok((bits, stats, terminated))
    }

    fn ofdma_frame(&self, c: &GrayConstellation, streams: &[Vec<u8>], sigma2: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
        let rho = c.bits;
        let k = self.cfg.mapping_matrix().map(|f| f.subcarriers()).unwrap_or(1);
        let per_user = streams.first().map_or(0, Vec::len);
        let mut flat: Vec<u8> = streams.concat();
        let symbols = flat.len().div_ceil(rho).div_ceil(k) * k;
        flat.resize(symbols * rho, 0);
        let labels: Vec<usize> = flat
            .chunks(rho)
            .map(|ch| ch.iter().fold(0usize, |a, &b| (a << 1) | usize::from(b)))
            .collect();
        let real = self.realization(symbols / k, k, sigma2, rng);
        let sigma = sigma2.sqrt();
        let mut bits = Vec::with_capacity(flat.len());
        for (i, &l) in labels.iter().enumerate() {
            let h = real.gains[i / k][i % k];
            let n = Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
            let y = h * c.points[l] + n * sigma;
            let d = c.detect(y, h);
            bits.extend((0..rho).rev().map(|b| (d >> b & 1) as u8));
        }
        bits.chunks(per_user.max(1)).take(streams.len()).map(<[u8]>::to_vec).collect()
    }

    /// Simulates one point at an explicit noise variance, labeling the record
    /// with `ebn0_db`.
    pub fn run_point_sigma2(&self, point: u64, ebn0_db: f64, sigma2: f64) -> Result<PointResult> {
        let sim = &self.cfg.sim;
        let mut total = FrameOutcome::default();
        let mut frames = 0u64;
        while frames < sim.max_frames {
            let end = (frames + sim.batch).min(sim.max_frames);
            let outcomes: Vec<FrameOutcome> = (frames..end)
                .into_par_iter()
                .map(|f| self.run_frame(sigma2, &mut frame_rng(self.cfg.seed, point, f)))
                .collect::<Result<_>>()?;
            for o in outcomes {
                total.bits += o.bits;
                total.errors += o.errors;
                total.unterminated += o.unterminated;
                total.stats.extend(&o.stats);
            }
            frames = end;
            if total.errors >= sim.min_errors && total.bits >= sim.min_bits {
                break;
            }
        }
        Ok(PointResult {
            record: BerRecord::new(self.scheme, ebn0_db, total.bits, total.errors, &self.hash),
            frames,
            sigma2,
            stats: total.stats,
            unterminated: total.unterminated,
        })
    }

    pub fn run_point(&self, point: u64, ebn0_db: f64) -> Result<PointResult> {
        self.run_point_sigma2(point, ebn0_db, self.sigma2(ebn0_db)?)
    }

    /// All configured Eb/N0 points, in order.
    pub fn run(&self) -> Result<Vec<PointResult>> {
        self.cfg
            .sim
            .ebn0_db
            .iter()
            .enumerate()
            .map(|(i, &e)| self.run_point(i as u64, e))
            .collect()
    }
}

/// Runs the configured sweep for one scheme.
pub fn run_sweep(cfg: &SimConfig, scheme: Scheme) -> Result<Vec<PointResult>> {
    Simulator::new(cfg, scheme)?.run()
}
