//! δ-overlaps of virtual trajectories.

use serde::{Deserialize, Serialize};

use super::flow::{node_on_path, path_particle, virtual_trajectory, BackwardTrajectory, FlowKind};
use crate::error::{Error, Result};

/// Window `[0, t¹]` checked for the pair `(i, h)` and the minimum found there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOverlap {
    pub i: usize,
    pub h: usize,
    /// Time of the node where the two tree paths merge, or `t`.
    pub t0: f64,
    /// Latest node time below `t0` on either path, or 0.
    pub t1: f64,
    pub min_distance: f64,
    pub argmin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapWitness {
    pub i: usize,
    pub h: usize,
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub delta: f64,
    pub in_n_delta: bool,
    pub witnesses: Vec<OverlapWitness>,
    pub pairs: Vec<PairOverlap>,
}

/// `(t⁰, t¹)` for the pair `(i, h)`.
pub fn overlap_window(traj: &BackwardTrajectory, i: usize, h: usize) -> (f64, f64) {
    let tree = &traj.tree;
    let first_split = (0..traj.segments.len()).find(|&r| path_particle(tree, i, r) != path_particle(tree, h, r)).unwrap_or(traj.segments.len() - 1);
    let t0 = traj.segments[first_split].t_hi;
    let t1 = (1..=tree.n())
        .filter(|&r| traj.segments[r].t_hi < t0 && (node_on_path(tree, i, r) || node_on_path(tree, h, r)))
        .map(|r| traj.segments[r].t_hi)
        .fold(0.0, f64::max);
    (t0, t1)
}

/// Exact minimum of `|ξⁱ(s) − ξʰ(s)|` over `[0, t¹]`, segment by segment.
fn pair_minimum(traj: &BackwardTrajectory, i: usize, h: usize) -> PairOverlap {
    let (t0, t1) = overlap_window(traj, i, h);
    let mut best = (f64::INFINITY, 0.0);
    for (r, g) in traj.segments.iter().enumerate() {
        if g.t_lo > t1 {
            continue;
        }
        let (a, b) = (path_particle(&traj.tree, i, r) - 1, path_particle(&traj.tree, h, r) - 1);
        let dx = g.start[a].x - g.start[b].x;
        let dv = g.start[a].v - g.start[b].v;
        // d(u) = dx − dv·u with u = t_hi − s.
        let (u_lo, u_hi) = (g.t_hi - t1.min(g.t_hi), g.t_hi - g.t_lo);
        let vv = dv.norm_squared();
        let u = if vv > 0.0 { (dx.dot(&dv) / vv).clamp(u_lo, u_hi) } else { u_lo };
        let d = (dx - dv * u).norm();
        if d < best.0 {
            best = (d, g.t_hi - u);
        }
    }
    PairOverlap { i, h, t0, t1, min_distance: best.0, argmin: best.1 }
}

/// Whether the parameters of a Boltzmann flow lie in the δ-overlap set:
/// some pair of virtual trajectories comes within `delta` on `[0, t¹]`.
pub fn overlap_detect(traj: &BackwardTrajectory, delta: f64) -> Result<OverlapReport> {
    if traj.kind != FlowKind::Bbf {
        return Err(Error::InvalidArgument("overlap detection runs on the Boltzmann flow".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let m = traj.tree.particles();
    let mut pairs = Vec::new();
    let mut witnesses = Vec::new();
    for i in 1..=m {
        for h in i + 1..=m {
            let p = pair_minimum(traj, i, h);
            if p.min_distance <= delta {
                witnesses.push(OverlapWitness { i, h, time: p.argmin, distance: p.min_distance });
            }
            pairs.push(p);
        }
    }
    Ok(OverlapReport { delta, in_n_delta: !witnesses.is_empty(), witnesses, pairs })
}

/// Reference minimum by a time scan of step `step·t` over `[0, t¹]`
/// (event times included), followed by golden-section refinement of every
/// cell that could hold a smaller value than the best sample.
pub fn overlap_scan(traj: &BackwardTrajectory, i: usize, h: usize, step: f64) -> Result<f64> {
    let (_, t1) = overlap_window(traj, i, h);
    let vi = virtual_trajectory(traj, i)?;
    let vh = virtual_trajectory(traj, h)?;
    let dist = |s: f64| (vi.position(s) - vh.position(s)).norm();
    let mut grid: Vec<f64> = Vec::new();
    let ds = step * traj.t;
    let cells = (t1 / ds).ceil() as usize;
    for c in 0..=cells {
        grid.push((c as f64 * ds).min(t1));
    }
    grid.extend(traj.segments.iter().map(|g| g.t_lo).filter(|&s| s <= t1));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let vals: Vec<f64> = grid.iter().map(|&s| dist(s)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = vi.pieces.iter().zip(&vh.pieces).map(|(a, b)| (a.v - b.v).norm()).fold(0.0, f64::max);
    for c in 0..grid.len().saturating_sub(1) {
        let (a, b) = (grid[c], grid[c + 1]);
        if vals[c].min(vals[c + 1]) - vmax * (b - a) > best {
            continue;
        }
        best = best.min(golden_min(&dist, a, b));
    }
    Ok(best)
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}
