//! Side-by-side comparison of the Boltzmann and interacting flows.

use serde::{Deserialize, Serialize};

use super::flow::{build_bbf, BackwardTrajectory, CollisionParams};
use super::ibf::{build_ibf, IbfOptions};
use super::trees::{SignSequence, TreeGraph};
use crate::dynamics::PhasePoint;
use crate::error::Result;
use crate::two_body::TwoBody;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowComparison {
    pub max_position_gap: f64,
    pub velocity_gap_at_zero: f64,
    pub ibf_recollided: bool,
    pub numeric_scatterings: usize,
    pub ibf_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    /// Uniform time grid on `[0, t]`; creation times are always added.
    pub grid_points: usize,
    pub ibf: IbfOptions,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { grid_points: 200, ibf: IbfOptions::default() }
    }
}

/// Gaps between two built flows. `ibf` must carry snapshots.
pub fn compare_built(bbf: &BackwardTrajectory, ibf: &BackwardTrajectory) -> Result<FlowComparison> {
    let mut gap: f64 = 0.0;
    for snap in &ibf.samples {
        let b = bbf.state_at(snap.time)?;
        for (p, q) in b.iter().zip(&snap.particles) {
            gap = gap.max((p.x - q.x).norm());
        }
    }
    let vgap = bbf.final_state().iter().zip(ibf.final_state()).map(|(p, q)| (p.v - q.v).norm()).fold(0.0, f64::max);
    for (p, q) in bbf.final_state().iter().zip(ibf.final_state()) {
        gap = gap.max((p.x - q.x).norm());
    }
    Ok(FlowComparison {
        max_position_gap: gap,
        velocity_gap_at_zero: vgap,
        ibf_recollided: ibf.recollided,
        numeric_scatterings: ibf.numeric_scatterings,
        ibf_energy_drift: ibf.energy_drift,
    })
}

/// Sample times used by [`compare_flows`].
pub fn comparison_times(t: f64, params: &CollisionParams, grid_points: usize) -> Vec<f64> {
    let m = grid_points.max(1);
    let mut s: Vec<f64> = (0..=m).map(|i| t * i as f64 / m as f64).collect();
    s.extend(params.times.iter().copied());
    s
}

/// Builds both flows on the same parameters and reports the largest
/// position gap over a time grid, the velocity gap at time zero and
/// whether the interacting flow had any interaction besides creations.
#[allow(clippy::too_many_arguments)]
pub fn compare_flows(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    params: &CollisionParams,
    t: f64,
    epsilon: f64,
    tb: &TwoBody,
    opts: &CompareOptions,
) -> Result<FlowComparison> {
    let bbf = build_bbf(tree, signs, z_j, params, t, tb)?;
    let mut io = opts.ibf.clone();
    io.sample_times = comparison_times(t, params, opts.grid_points);
    let ibf = build_ibf(tree, signs, z_j, params, t, epsilon, tb, &io)?;
    compare_built(&bbf, &ibf)
}
