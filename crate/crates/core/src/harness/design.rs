//! Scheme construction from a config: the designed TCM-NOMA scheme and the
//! lattice-constellation comparison scheme.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex;

use super::config::SimConfig;
use crate::constellation::{select_signal_set, Gaussian, MdPoint, SignalSet};
use crate::distance::{distance_profile, search_code, DistanceProfile};
use crate::encoder::TcmScheme;
use crate::error::{Error, Result};
use crate::partition::{build_partition_tree, FpoOptions, LabelingTable, PartitionTree};
use crate::trellis::{build_code, TrellisDiagram};

#[derive(Debug, Clone)]
pub struct Design {
    pub scheme: TcmScheme,
    /// Absent for the lattice scheme.
    pub tree: Option<PartitionTree>,
    pub signal_set: SignalSet,
    /// Base QAM order the signal set was drawn from (0 for the lattice scheme).
    pub base_m: usize,
    pub profile: DistanceProfile,
    /// Mean `|z|^2` over all labeled points.
    pub avg_energy: f64,
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

fn choose_code(cfg: &SimConfig, labeling: &LabelingTable) -> Result<(TrellisDiagram, DistanceProfile)> {
    let c = &cfg.code;
    let depth = c.search_depth.unwrap_or(3 * c.v as usize).max(1);
    match &c.parity_octal {
        Some(octal) if !c.search => {
            let t = build_code(c.r, c.v, octal)?;
            let profile = distance_profile(&t, labeling, depth)?;
            Ok((t, profile))
        }
        _ => search_code(c.r, c.v, labeling, depth),
    }
}

/// Builds the designed scheme: shaped signal set, partition tree, labeling,
/// and the configured or searched code.
pub fn design_tcm(cfg: &SimConfig) -> Result<Design> {
    let mapping = cfg.mapping_matrix()?;
    let n = cfg.mapping.q * mapping.d_f();
    let k = mapping.subcarriers();
    let p = if cfg.constellation.identical { 0 } else { ceil_log2(k) };
    let depth = p + n + 1;
    let (set, base_m) = select_signal_set(
        mapping.d_f(),
        1 << depth,
        cfg.constellation.base_m,
        cfg.constellation.shaping,
    )?;
    let opts = FpoOptions {
        index: cfg.constellation.index,
        ..FpoOptions::default()
    };
    let tree = build_partition_tree(&set, depth, &opts)?;
    let labeling = if cfg.constellation.identical {
        crate::partition::build_identical_labeling(&tree, k)?
    } else {
        crate::partition::build_labeling(&tree, p, k)?
    };
    let (trellis, profile) = choose_code(cfg, &labeling)?;
    let avg_energy = labeling.mean_energy();
    Ok(Design {
        scheme: TcmScheme::new(mapping, trellis, labeling, cfg.mapping.q)?,
        tree: Some(tree),
        signal_set: set,
        base_m,
        profile,
        avg_energy,
    })
}

/// Square (even `bits`) or cross (odd `bits`, at least 5) constellation of
/// `2^bits` points on the odd integer lattice.
pub fn lattice_constellation(bits: usize) -> Result<Vec<Gaussian>> {
    let (side, corner) = if bits.is_multiple_of(2) {
        (1i64 << (bits / 2), 0)
    } else if bits >= 5 {
        let m = (bits - 1) / 2;
        (3i64 << (m - 1), 1i64 << (m - 2))
    } else {
        return Err(Error::InvalidDimensions(format!("no cross constellation with 2^{bits} points")));
    };
    let mut pts = Vec::with_capacity(1 << bits);
    for w in 0..side {
        for u in 0..side {
            let cu = u < corner || u >= side - corner;
            let cw = w < corner || w >= side - corner;
            if !(cu && cw) {
                pts.push(Complex::new(2 * u - side + 1, 2 * w - side + 1));
            }
        }
    }
    debug_assert_eq!(pts.len(), 1 << bits);
    Ok(pts)
}

/// Coset label of an odd-lattice point at the first `levels` steps of the
/// chain `Z^2 / RZ^2 / 2Z^2 / 2RZ^2 / ...`, first split most significant.
fn lattice_prefix(z: Gaussian, levels: usize) -> usize {
    // shift to non-negative integer coordinates; cosets are translation invariant
    let u = (z.re + (1 << 20)) / 2;
    let w = (z.im + (1 << 20)) / 2;
    (0..levels).fold(0, |acc, l| {
        let s = l / 2;
        let bit = if l % 2 == 0 { ((u >> s) + (w >> s)) & 1 } else { (u >> s) & 1 };
        (acc << 1) | bit as usize
    })
}

/// Conventional lattice set partitioning: the first `coded` label bits
/// follow the lattice coset chain, the rest order points within a coset.
pub fn lattice_labeling(points: &[Gaussian], bits: usize, coded: usize, subcarriers: usize) -> Result<LabelingTable> {
    if points.len() != 1 << bits || coded > bits {
        return Err(Error::LengthMismatch {
            expected: 1 << bits,
            got: points.len(),
        });
    }
    let mut cosets: BTreeMap<usize, Vec<Gaussian>> = BTreeMap::new();
    for &z in points {
        cosets.entry(lattice_prefix(z, coded)).or_default().push(z);
    }
    let width = 1usize << (bits - coded);
    if cosets.len() != 1 << coded || cosets.values().any(|c| c.len() != width) {
        return Err(Error::InvalidDimensions("lattice cosets are unbalanced".into()));
    }
    let mut table = Vec::with_capacity(points.len());
    for (prefix, mut members) in cosets {
        members.sort_by_key(|z| (z.im, z.re));
        for (s, z) in members.into_iter().enumerate() {
            table.push(MdPoint::new(prefix * width + s, vec![z]));
        }
    }
    Ok(LabelingTable::from_tables(bits, vec![table; subcarriers]))
}

/// The comparison scheme: same mapping and code parameters, every subcarrier
/// labeled with a `2^(q d_f + 1)`-point lattice constellation.
pub fn design_lc_tcm(cfg: &SimConfig) -> Result<Design> {
    let mapping = cfg.mapping_matrix()?;
    let n = cfg.mapping.q * mapping.d_f();
    let points = lattice_constellation(n + 1)?;
    let coded = (cfg.code.r as usize + 1).min(n + 1);
    let labeling = lattice_labeling(&points, n + 1, coded, mapping.subcarriers())?;
    let (trellis, profile) = choose_code(cfg, &labeling)?;
    let avg_energy = labeling.mean_energy();
    let signal_set = SignalSet {
        d_f: 1,
        points: labeling.table(0).to_vec(),
    };
    Ok(Design {
        scheme: TcmScheme::new(mapping, trellis, labeling, cfg.mapping.q)?,
        tree: None,
        signal_set,
        base_m: 0,
        profile,
        avg_energy,
    })
}

impl Design {
    pub fn summary(&self) -> String {
        let s = &self.scheme;
        let mut out = String::new();
        let _ = writeln!(out, "subcarriers {} users {} d_f {}", s.mapping.subcarriers(), s.mapping.users(), s.mapping.d_f());
        let _ = writeln!(out, "q {} spectral_efficiency {}", s.q, s.spectral_efficiency());
        let _ = writeln!(out, "signal_set {} base_m {}", self.signal_set.len(), self.base_m);
        let _ = writeln!(out, "code r {} V {} parity_octal {}", s.trellis.code.r, s.trellis.code.v, s.trellis.code.octal().join(","));
        let _ = writeln!(out, "flush_len {}", s.flush_len());
        let _ = writeln!(out, "delta_min_sq {}", self.profile.delta_min_sq);
        let _ = writeln!(out, "delta_free_sq {}", self.profile.delta_free_sq);
        let _ = writeln!(out, "d_free_sq {}", self.profile.d_free_sq);
        let _ = writeln!(out, "depth {} depth_exceeded {}", self.profile.depth, self.profile.depth_exceeded);
        let _ = writeln!(out, "avg_energy {}", self.avg_energy);
        out
    }

    /// Writes the design artifacts into `dir` and returns the paths written.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut files = vec![
            ("summary.txt", self.summary()),
            ("mapping.txt", self.scheme.mapping.render()),
            ("signal_set.txt", self.signal_set.render_table()),
            ("labeling.txt", self.scheme.labeling.export()),
        ];
        if let Some(tree) = &self.tree {
            files.push(("partition_tree.txt", tree.export()));
        }
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                Ok(path)
            })
            .collect()
    }
}
