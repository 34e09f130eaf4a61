//! Per-subcarrier labeling: coded bit sequences to signal points.
//!
//! A coded sequence `c` of `bits` bits is read as an integer, most significant
//! bit first. Bit 0 selects the left child; the leaf reached under subcarrier
//! node `(p, k)` is therefore `levels[p + bits][k * 2^bits + c]`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::constellation::{norm_sq, Gaussian, MdPoint};
use crate::error::{Error, Result};

use super::tree::PartitionTree;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelingTable {
    bits: usize,
    tables: Vec<Vec<MdPoint>>,
    inverse: Vec<HashMap<(i64, i64), usize>>,
}

/// Labels subcarrier `k` with the subtree rooted at node `(p, k)`.
pub fn build_labeling(tree: &PartitionTree, p: usize, subcarriers: usize) -> Result<LabelingTable> {
    if p > tree.depth() || subcarriers > 1 << p || subcarriers == 0 {
        return Err(Error::IncompleteTree(format!(
            "{subcarriers} subcarriers need a level {p} with that many nodes"
        )));
    }
    let bits = tree.depth() - p;
    let leaves = tree.levels.last().expect("root level");
    if leaves.iter().any(|n| n.len() != 1) {
        return Err(Error::IncompleteTree("leaves are not singletons".into()));
    }
    let width = 1usize << bits;
    let tables: Vec<Vec<MdPoint>> = (0..subcarriers)
        .map(|k| {
            leaves[k * width..(k + 1) * width]
                .iter()
                .map(|leaf| leaf.points[0].clone())
                .collect()
        })
        .collect();
    Ok(LabelingTable::from_tables(bits, tables))
}

/// Reuses the labeling of a single-set tree on every subcarrier.
pub fn build_identical_labeling(tree: &PartitionTree, subcarriers: usize) -> Result<LabelingTable> {
    let one = build_labeling(tree, 0, 1)?;
    let table = one.tables[0].clone();
    Ok(LabelingTable::from_tables(one.bits, vec![table; subcarriers]))
}

impl LabelingTable {
    /// Direct construction; `tables[k][c]` is the point for sequence `c`.
    pub fn from_tables(bits: usize, tables: Vec<Vec<MdPoint>>) -> Self {
        let inverse = tables
            .iter()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .map(|(c, p)| ((p.position.re, p.position.im), c))
                    .collect()
            })
            .collect();
        Self {
            bits,
            tables,
            inverse,
        }
    }

    /// Coded sequence length.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn subcarriers(&self) -> usize {
        self.tables.len()
    }

    pub fn point(&self, k: usize, c: usize) -> &MdPoint {
        &self.tables[k][c]
    }

    pub fn table(&self, k: usize) -> &[MdPoint] {
        &self.tables[k]
    }

    pub fn code_of(&self, k: usize, position: Gaussian) -> Option<usize> {
        self.inverse[k].get(&(position.re, position.im)).copied()
    }

    /// Points whose sequence starts with the `prefix_bits`-bit `prefix`.
    pub fn coset(&self, k: usize, prefix: usize, prefix_bits: usize) -> &[MdPoint] {
        let shift = self.bits - prefix_bits;
        &self.tables[k][prefix << shift..(prefix + 1) << shift]
    }

    /// Mean `|z|^2` over every labeled point (uniform coded bits).
    pub fn mean_energy(&self) -> f64 {
        let total: i64 = self
            .tables
            .iter()
            .flatten()
            .map(|p| norm_sq(p.position))
            .sum();
        total as f64 / (self.tables.len() * self.tables[0].len()) as f64
    }

    pub fn is_bijective(&self) -> bool {
        self.inverse
            .iter()
            .zip(&self.tables)
            .all(|(inv, t)| inv.len() == t.len() && t.len() == 1 << self.bits)
    }

    /// `k bits index` lines, 1-based subcarrier and point index.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (k, t) in self.tables.iter().enumerate() {
            for (c, p) in t.iter().enumerate() {
                let _ = writeln!(s, "{} {:0w$b} {}", k + 1, c, p.index + 1, w = self.bits);
            }
        }
        s
    }
}
