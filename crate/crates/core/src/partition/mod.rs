//! Binary set partitioning of a signal set and the resulting labeling.

pub mod fpo;
pub mod labeling;
pub mod metrics;
pub mod neighbor;
pub mod tree;

pub use fpo::{fpo_bsp, fpo_bsp_with, fpo_positions, Bipartition, FpoOptions, FpoReport};
pub use labeling::{build_identical_labeling, build_labeling, LabelingTable};
pub use metrics::{avg_min, mssd, nearest_sq, set_metrics, SetMetrics, SqDistance};
pub use neighbor::{new_index, DelaunayIndex, ExhaustiveIndex, IndexKind, NeighborIndex};
pub use tree::{build_partition_tree, build_partition_tree_reported, PartitionTree};
