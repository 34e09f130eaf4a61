//! Simulation configuration, read from TOML.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelKind, FadingParams, Interleaver};
use crate::constellation::ShapingMode;
use crate::decoder::{DecodeMode, TwoLayerParams};
use crate::error::{Error, Result};
use crate::mapping::{MappingMatrix, PRESET_K4_J6_NAME};
use crate::partition::IndexKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub mapping: MappingConfig,
    pub constellation: ConstellationConfig,
    pub code: CodeConfig,
    pub channel: ChannelConfig,
    pub interleaver: InterleaverConfig,
    pub decoder: DecoderConfig,
    pub sim: RunConfig,
    pub ofdma: OfdmaConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            mapping: MappingConfig::default(),
            constellation: ConstellationConfig::default(),
            code: CodeConfig::default(),
            channel: ChannelConfig::default(),
            interleaver: InterleaverConfig::default(),
            decoder: DecoderConfig::default(),
            sim: RunConfig::default(),
            ofdma: OfdmaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    /// Named preset; ignored when `grid` is present.
    pub preset: Option<String>,
    pub grid: Option<Vec<Vec<u8>>>,
    /// Bits per user per time unit.
    pub q: usize,
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            preset: Some(PRESET_K4_J6_NAME.into()),
            grid: None,
            q: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationConfig {
    /// Starting base QAM order; raised automatically when too few positions.
    pub base_m: usize,
    pub shaping: ShapingMode,
    /// Use one partition of `2^(q d_f + 1)` points on every subcarrier.
    pub identical: bool,
    pub index: IndexKind,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            base_m: 16,
            shaping: ShapingMode::Dynamic,
            identical: false,
            index: IndexKind::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub r: u32,
    #[serde(rename = "V")]
    pub v: u32,
    /// Parity polynomials `[h^r .. h^0]`; searched when absent.
    pub parity_octal: Option<Vec<String>>,
    /// Search even when polynomials are given.
    pub search: bool,
    pub search_depth: Option<usize>,
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self {
            r: 3,
            v: 4,
            parity_octal: None,
            search: false,
            search_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub doppler_hz: f64,
    pub sample_period_s: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let f = FadingParams::default();
        Self {
            kind: ChannelKind::Awgn,
            doppler_hz: f.doppler_hz,
            sample_period_s: f.sample_period_s,
        }
    }
}

impl ChannelConfig {
    pub fn fading(&self) -> FadingParams {
        FadingParams {
            doppler_hz: self.doppler_hz,
            sample_period_s: self.sample_period_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterleaverConfig {
    pub rows: usize,
    pub cols: usize,
    pub enabled: bool,
}

impl Default for InterleaverConfig {
    fn default() -> Self {
        let il = Interleaver::default();
        Self {
            rows: il.rows,
            cols: il.cols,
            enabled: true,
        }
    }
}

impl InterleaverConfig {
    pub fn build(&self) -> Result<Option<Interleaver>> {
        if self.enabled {
            Interleaver::new(self.rows, self.cols).map(Some)
        } else {
            Ok(None)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub lambda: usize,
    /// Radius parameter `a`; `inf` disables gating.
    pub radius_a: f64,
    pub mode: DecodeMode,
    /// Disable per-state survivor deduplication.
    pub keep_duplicate_states: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        let p = TwoLayerParams::default();
        Self {
            lambda: p.lambda,
            radius_a: p.radius_a,
            mode: DecodeMode::TwoLayer,
            keep_duplicate_states: false,
        }
    }
}

impl DecoderConfig {
    pub fn params(&self) -> TwoLayerParams {
        TwoLayerParams {
            lambda: self.lambda,
            radius_a: self.radius_a,
            dedup: !self.keep_duplicate_states,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Payload bits per user per frame.
    pub frame_bits: usize,
    pub ebn0_db: Vec<f64>,
    pub min_errors: u64,
    pub min_bits: u64,
    pub max_frames: u64,
    /// Rate-1/2 outer convolutional code per user.
    pub outer_code: bool,
    /// Frames simulated between stopping-rule checks.
    pub batch: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frame_bits: 1000,
            ebn0_db: vec![8.0, 10.0, 12.0, 14.0],
            min_errors: 100,
            min_bits: 10_000,
            max_frames: 200,
            outer_code: false,
            batch: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OfdmaModulation {
    /// Gray-labeled PSK.
    #[default]
    Psk,
    /// Gray-labeled square QAM (even bits per tone only).
    Qam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmaConfig {
    pub modulation: OfdmaModulation,
}

impl Default for OfdmaConfig {
    fn default() -> Self {
        Self {
            modulation: OfdmaModulation::Psk,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn mapping_matrix(&self) -> Result<MappingMatrix> {
        match (&self.mapping.grid, &self.mapping.preset) {
            (Some(grid), _) => MappingMatrix::from_grid(grid.clone()),
            (None, Some(name)) => MappingMatrix::preset(name),
            (None, None) => Err(Error::Config("mapping needs a preset or a grid".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        let f = self.mapping_matrix().map_err(|e| Error::Config(e.to_string()))?;
        let n = self.mapping.q * f.d_f();
        if self.mapping.q == 0 {
            return bad("mapping.q must be positive");
        }
        if self.code.r == 0 || self.code.r as usize > n {
            return bad("code.r must lie in 1..=q*d_f");
        }
        if self.sim.frame_bits == 0 || !self.sim.frame_bits.is_multiple_of(self.mapping.q) {
            return bad("sim.frame_bits must be a positive multiple of q");
        }
        if self.decoder.lambda == 0 {
            return bad("decoder.lambda must be at least 1");
        }
        if self.decoder.radius_a.is_nan() || self.decoder.radius_a <= 0.0 {
            return bad("decoder.radius_a must be positive");
        }
        if self.channel.doppler_hz <= 0.0 || self.channel.sample_period_s <= 0.0 {
            return bad("channel parameters must be positive");
        }
        if self.sim.ebn0_db.iter().any(|x| !x.is_finite()) {
            return bad("sim.ebn0_db must be finite");
        }
        if self.sim.batch == 0 || self.sim.max_frames == 0 {
            return bad("sim.batch and sim.max_frames must be positive");
        }
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the serialized config.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    /// Uncoded information bits per tone, halved by the outer code.
    pub fn spectral_efficiency(&self) -> Result<f64> {
        let f = self.mapping_matrix()?;
        let raw = (self.mapping.q * f.users()) as f64 / f.subcarriers() as f64;
        Ok(if self.sim.outer_code { raw / 2.0 } else { raw })
    }
}
