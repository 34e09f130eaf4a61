//! Distance metrics over planar point sets.

use std::fmt;

use crate::constellation::{dist_sq, Gaussian};
use crate::error::{Error, Result};

/// An exact squared distance, or the "unbounded" value used for sets with
/// fewer than two members (no pair to measure).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SqDistance {
    Finite(i64),
    Unbounded,
}

impl SqDistance {
    pub fn finite(self) -> Option<i64> {
        match self {
            SqDistance::Finite(v) => Some(v),
            SqDistance::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, SqDistance::Unbounded)
    }
}

impl fmt::Display for SqDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SqDistance::Finite(v) => write!(f, "{v}"),
            SqDistance::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetMetrics {
    /// Distance from the probe to its nearest other member (not squared).
    pub probe_distance: Option<f64>,
    /// Minimum squared distance between two members.
    pub mssd: i64,
    /// Mean over members of the distance to their nearest other member.
    pub avg_min: f64,
}

/// Squared distance from `probe` to the nearest member other than itself.
pub fn nearest_sq(set: &[Gaussian], probe: Gaussian) -> Option<i64> {
    set.iter()
        .filter(|&&z| z != probe)
        .map(|&z| dist_sq(z, probe))
        .min()
}

/// Minimum squared pairwise distance, `Unbounded` for fewer than two points.
pub fn mssd(set: &[Gaussian]) -> SqDistance {
    let mut best = SqDistance::Unbounded;
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            best = best.min(SqDistance::Finite(dist_sq(a, b)));
        }
    }
    best
}

pub fn avg_min(set: &[Gaussian]) -> f64 {
    set.iter()
        .map(|&z| nearest_sq(set, z).map_or(0.0, |d| (d as f64).sqrt()))
        .sum::<f64>()
        / set.len() as f64
}

pub fn set_metrics(set: &[Gaussian], probe: Option<Gaussian>) -> Result<SetMetrics> {
    if set.len() < 2 {
        return Err(Error::SetTooSmall {
            have: set.len(),
            need: 2,
        });
    }
    Ok(SetMetrics {
        probe_distance: probe.and_then(|p| nearest_sq(set, p)).map(|d| (d as f64).sqrt()),
        mssd: mssd(set).finite().expect("two or more points"),
        avg_min: avg_min(set),
    })
}
