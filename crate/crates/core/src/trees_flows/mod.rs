//! Collision trees, the Boltzmann and interacting backward flows built on
//! them, overlaps of virtual trajectories, cutoffs and the change to
//! incoming variables.

mod compare;
mod cutoffs;
mod flow;
mod ibf;
mod incoming;
mod overlap;
mod trees;

pub use compare::{compare_built, compare_flows, comparison_times, CompareOptions, FlowComparison};
pub use cutoffs::{cutoff_indicators, default_delta, energy_cutoff, omega_j_membership, CutoffIndicators, ImpactCutoff};
pub use flow::{
    build_bbf, build_bbf_with, node_on_path, path_particle, virtual_trajectory, BackwardTrajectory, CollisionParams, CreationRecord, FlowKind, Segment,
    Snapshot, VirtualPiece, VirtualTrajectory,
};
pub use ibf::{build_ibf, build_ibf_with, IbfOptions, ScatteringMode};
pub use incoming::{incoming_map, incoming_pair, outgoing_params, IncomingParams};
pub use overlap::{overlap_detect, overlap_scan, overlap_window, OverlapReport, OverlapWitness, PairOverlap};
pub use trees::{enumerate_trees, tree_count, Sign, SignSequence, TreeGraph, TreeIter};
