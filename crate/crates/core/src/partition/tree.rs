//! Complete binary partition tree over a signal set.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::constellation::SignalSet;
use crate::error::{Error, Result};

use super::fpo::{fpo_bsp_with, FpoOptions, FpoReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTree {
    /// `levels[0]` holds the root; level `l` has `2^l` nodes, and nodes
    /// `2i` and `2i + 1` of level `l + 1` are the children of node `i`.
    pub levels: Vec<Vec<SignalSet>>,
}

fn min_index(s: &SignalSet) -> usize {
    s.points.iter().map(|p| p.index).min().unwrap_or(usize::MAX)
}

fn split(node: &SignalSet, opts: &FpoOptions) -> Result<(SignalSet, SignalSet, Option<FpoReport>)> {
    let (mut a, mut b, report) = if node.len() == 2 {
        let one = |i: usize| SignalSet {
            d_f: node.d_f,
            points: vec![node.points[i].clone()],
        };
        (one(0), one(1), None)
    } else {
        let (bp, report) = fpo_bsp_with(node, opts)?;
        (bp.first, bp.second, Some(report))
    };
    a.points.sort_by_key(|p| p.index);
    b.points.sort_by_key(|p| p.index);
    if min_index(&b) < min_index(&a) {
        std::mem::swap(&mut a, &mut b);
    }
    Ok((a, b, report))
}

/// Splits `root` recursively down to singletons. `root` must hold exactly
/// `2^depth` points.
pub fn build_partition_tree(root: &SignalSet, depth: usize, opts: &FpoOptions) -> Result<PartitionTree> {
    build_partition_tree_reported(root, depth, opts).map(|(t, _)| t)
}

/// As [`build_partition_tree`], also returning the report of every
/// non-trivial split, level by level.
pub fn build_partition_tree_reported(
    root: &SignalSet,
    depth: usize,
    opts: &FpoOptions,
) -> Result<(PartitionTree, Vec<Vec<FpoReport>>)> {
    if depth >= usize::BITS as usize || root.len() != 1usize << depth {
        return Err(Error::SizeNotPowerOfTwo(root.len()));
    }
    let mut top = root.clone();
    top.points.sort_by_key(|p| p.index);
    let mut levels = vec![vec![top]];
    let mut reports = Vec::new();
    for _ in 0..depth {
        let parent = levels.last().expect("root level");
        let splits: Vec<_> = parent
            .par_iter()
            .map(|node| split(node, opts))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(parent.len() * 2);
        let mut level_reports = Vec::new();
        for (a, b, r) in splits {
            next.push(a);
            next.push(b);
            level_reports.extend(r);
        }
        levels.push(next);
        reports.push(level_reports);
    }
    Ok((PartitionTree { levels }, reports))
}

impl PartitionTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> &SignalSet {
        &self.levels[0][0]
    }

    pub fn node(&self, level: usize, i: usize) -> &SignalSet {
        &self.levels[level][i]
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Checks sizes and that every node is the disjoint union of its children.
    pub fn validate(&self) -> Result<()> {
        for (l, level) in self.levels.iter().enumerate() {
            if level.len() != 1 << l {
                return Err(Error::IncompleteTree(format!("level {l} has {} nodes", level.len())));
            }
            let size = self.root().len() >> l;
            if let Some(bad) = level.iter().position(|n| n.len() != size) {
                return Err(Error::IncompleteTree(format!("node ({l}, {bad}) has wrong size")));
            }
        }
        for l in 0..self.depth() {
            for (i, node) in self.levels[l].iter().enumerate() {
                let mut kids: Vec<usize> = self.levels[l + 1][2 * i]
                    .points
                    .iter()
                    .chain(&self.levels[l + 1][2 * i + 1].points)
                    .map(|p| p.index)
                    .collect();
                kids.sort_unstable();
                let mut own: Vec<usize> = node.points.iter().map(|p| p.index).collect();
                own.sort_unstable();
                if kids != own {
                    return Err(Error::IncompleteTree(format!(
                        "node ({l}, {i}) is not the union of its children"
                    )));
                }
            }
        }
        if self.levels.last().is_some_and(|leaves| leaves.iter().any(|n| n.len() != 1)) {
            return Err(Error::IncompleteTree("leaves are not singletons".into()));
        }
        Ok(())
    }

    /// One line per node: `level node: i1 i2 ...` with 1-based point indices.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (l, level) in self.levels.iter().enumerate() {
            for (i, node) in level.iter().enumerate() {
                let _ = write!(s, "{l} {}:", i + 1);
                for p in &node.points {
                    let _ = write!(s, " {}", p.index + 1);
                }
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{BaseConstellation, MdPoint};

    fn qam_set(m: usize) -> SignalSet {
        let base = BaseConstellation::square_qam(m).unwrap();
        SignalSet {
            d_f: 1,
            points: base.points().iter().enumerate().map(|(i, &z)| MdPoint::new(i, vec![z])).collect(),
        }
    }

    #[test]
    fn eight_points_fifteen_nodes() {
        let set = SignalSet { points: qam_set(16).points[..8].to_vec(), d_f: 1 };
        let t = build_partition_tree(&set, 3, &FpoOptions::default()).unwrap();
        assert_eq!(t.node_count(), 15);
        assert_eq!(t.levels[3].len(), 8);
        t.validate().unwrap();
    }

    #[test]
    fn left_child_holds_lowest_index() {
        let t = build_partition_tree(&qam_set(16), 4, &FpoOptions::default()).unwrap();
        for l in 1..=t.depth() {
            for pair in t.levels[l].chunks(2) {
                assert!(min_index(&pair[0]) < min_index(&pair[1]));
            }
        }
        assert_eq!(t.levels[4][0].points[0].index, 0);
    }

    #[test]
    fn wrong_size_rejected() {
        let mut set = qam_set(16);
        set.points.pop();
        assert_eq!(
            build_partition_tree(&set, 4, &FpoOptions::default()).unwrap_err(),
            Error::SizeNotPowerOfTwo(15)
        );
    }

    #[test]
    fn qam16_first_split_doubles_mssd() {
        let t = build_partition_tree(&qam_set(16), 4, &FpoOptions::default()).unwrap();
        for node in &t.levels[1] {
            assert_eq!(super::super::metrics::mssd(&node.positions()).finite(), Some(8));
        }
    }

    #[test]
    fn export_lists_every_node() {
        let t = build_partition_tree(&qam_set(4), 2, &FpoOptions::default()).unwrap();
        let text = t.export();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("0 1: 1 2 3 4\n"));
    }
}
