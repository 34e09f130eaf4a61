//! Bipartitioning for the largest minimum distance, and the partition tree
//! built from repeated splits.

use tcm_noma::constellation::{select_signal_set, ShapingMode};
use tcm_noma::partition::{build_partition_tree, fpo_positions, mssd, FpoOptions};

fn main() -> tcm_noma::Result<()> {
    let (set, _) = select_signal_set(2, 64, 16, ShapingMode::Dynamic)?;
    let pos = set.positions();
    let report = fpo_positions(&pos, &FpoOptions::default())?;
    println!(
        "64 points, MSSD {}: greedy split {} -> after {} swaps {} ({} sweeps)",
        mssd(&pos),
        report.phase1_objective,
        report.swaps.len(),
        report.objective,
        report.sweeps
    );

    let tree = build_partition_tree(&set, 6, &FpoOptions::default())?;
    tree.validate()?;
    for (l, level) in tree.levels.iter().enumerate() {
        let worst = level.iter().map(|n| mssd(&n.positions())).min().unwrap();
        println!("level {l}: {:>2} nodes of {:>2} points, smallest MSSD {worst}", level.len(), level[0].len());
    }
    Ok(())
}
