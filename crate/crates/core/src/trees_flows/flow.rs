//! Parameters and the Boltzmann backward flow.

use serde::{Deserialize, Serialize};

use super::trees::{Sign, SignSequence, TreeGraph};
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::two_body::{apply_collision_rule, TwoBody};
use crate::Vec3;

/// Creation times `t > t₁ > … > t_n > 0`, impact directions `ν_i` and
/// velocities `v_{j+i}` of the created particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionParams {
    pub times: Vec<f64>,
    pub nus: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
}

impl CollisionParams {
    pub fn empty() -> Self {
        Self { times: Vec::new(), nus: Vec::new(), velocities: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Length agreement, strict ordering in `(0, t)` and unit `ν`.
    pub fn validate(&self, t: f64) -> Result<()> {
        let n = self.times.len();
        if self.nus.len() != n || self.velocities.len() != n {
            return Err(Error::InvalidArgument("times, nus and velocities must have equal length".into()));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("final time must be positive, got {t}")));
        }
        let mut prev = t;
        for &ti in &self.times {
            if !(ti < prev && ti > 0.0) {
                return Err(Error::InvalidArgument(format!("creation times must satisfy t > t1 > ... > tn > 0, got {:?}", self.times)));
            }
            prev = ti;
        }
        for nu in &self.nus {
            if (nu.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument("every nu must be a unit vector".into()));
            }
        }
        if self.velocities.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidArgument("velocities must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FlowKind {
    Bbf,
    Ibf { epsilon: f64 },
}

/// The flow on one interval `(t_lo, t_hi)` between creations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_hi: f64,
    pub t_lo: f64,
    /// State at `t_hi`, just after the creation (backward sense).
    pub start: Vec<PhasePoint>,
    /// State at `t_lo`, before the next creation.
    pub end: Vec<PhasePoint>,
}

/// Creation of particle `child` by `parent` at node `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CreationRecord {
    pub r: usize,
    pub time: f64,
    pub parent: usize,
    pub child: usize,
    pub nu: Vec3,
    pub sign: Sign,
    /// `η_{k_r}(t_r⁺)` and `v_{j+r}`.
    pub parent_before: Vec3,
    pub child_before: Vec3,
    /// Velocities once the creation (and any scattering it triggers) is over.
    pub parent_after: Vec3,
    pub child_after: Vec3,
    /// `|ν_r·(v_{j+r} − η_{k_r}(t_r⁺))|`.
    pub kernel: f64,
}

impl CreationRecord {
    /// `v_{j+r} − η_{k_r}(t_r⁺)`.
    pub fn relative_velocity(&self) -> Vec3 {
        self.child_before - self.parent_before
    }
}

/// State recorded at a requested time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub particles: Vec<PhasePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardTrajectory {
    pub kind: FlowKind,
    pub tree: TreeGraph,
    pub signs: SignSequence,
    pub t: f64,
    /// `segments[r]` covers `(t_{r+1}, t_r)` with `j + r` particles.
    pub segments: Vec<Segment>,
    pub creations: Vec<CreationRecord>,
    pub samples: Vec<Snapshot>,
    /// Any interaction other than a creation (interacting flow only).
    pub recollided: bool,
    pub energy_drift: f64,
    /// Scatterings resolved by direct integration instead of the two-body map.
    pub numeric_scatterings: usize,
}

impl BackwardTrajectory {
    pub fn j(&self) -> usize {
        self.tree.j
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// The state at time zero.
    pub fn final_state(&self) -> &[PhasePoint] {
        &self.segments.last().expect("at least one segment").end
    }

    /// Index of the segment containing `s`, with `s = t_r` assigned to the
    /// interval below the creation.
    pub fn segment_index(&self, s: f64) -> Option<usize> {
        if !(s >= 0.0 && s <= self.t) {
            return None;
        }
        self.segments.iter().position(|g| s >= g.t_lo && s <= g.t_hi).map(|i| {
            let mut i = i;
            while i + 1 < self.segments.len() && self.segments[i + 1].t_hi == s {
                i += 1;
            }
            i
        })
    }

    /// Positions and velocities at `s` by free streaming inside the
    /// segment. Exact for the Boltzmann flow only.
    pub fn state_at(&self, s: f64) -> Result<Vec<PhasePoint>> {
        if self.kind != FlowKind::Bbf {
            return Err(Error::InvalidArgument("state_at is affine only for the Boltzmann flow".into()));
        }
        let g = &self.segments[self.segment_index(s).ok_or_else(|| Error::InvalidArgument(format!("time {s} outside [0, {}]", self.t)))?];
        Ok(g.start.iter().map(|p| PhasePoint { x: p.x - p.v * (g.t_hi - s), v: p.v }).collect())
    }
}

pub(crate) fn check_inputs(tree: &TreeGraph, signs: &SignSequence, z_j: &[PhasePoint], params: &CollisionParams, t: f64) -> Result<()> {
    if z_j.len() != tree.j {
        return Err(Error::InvalidArgument(format!("expected {} initial states, got {}", tree.j, z_j.len())));
    }
    if signs.len() != tree.n() || params.len() != tree.n() {
        return Err(Error::InvalidArgument("tree, signs and params disagree on n".into()));
    }
    params.validate(t)
}

/// `σ ν·(v_{j+r} − η_{k_r}(t_r⁺)) ≥ 0`, or a rejection.
pub(crate) fn check_half_space(r: usize, sign: Sign, nu: &Vec3, rel: &Vec3) -> Result<f64> {
    let nv = nu.dot(rel);
    if sign.value() * nv < 0.0 {
        return Err(Error::Rejected(format!("node {r}: sigma * nu . V = {} < 0", sign.value() * nv)));
    }
    Ok(nv.abs())
}

/// Velocities after the creation at a `+` node: the outgoing pair
/// `(v_{j+r}, η_{k_r}(t_r⁺))` is mapped back through the collision rule.
/// Returns `(parent, child)`.
pub(crate) fn outgoing_to_incoming(tb: &TwoBody, nu: &Vec3, parent: &Vec3, child: &Vec3) -> Result<(Vec3, Vec3)> {
    // ω ⊥ V without forces; skip the rule so no rounding creeps in.
    if matches!(tb.potential().spec(), PotentialSpec::Zero) {
        return Ok((*parent, *child));
    }
    let omega = tb.scattering_vector(nu, &(child - parent))?;
    let (c, p) = apply_collision_rule(child, parent, &omega);
    Ok((p, c))
}

/// Builds the Boltzmann backward flow: particles stream freely backward
/// from `z_j` at time `t`, and at `t_r` particle `j+r` appears at the
/// position of `k_r` with velocity `v_{j+r}`. At `+` nodes both velocities
/// are replaced by the pre-collision pair before streaming on.
pub fn build_bbf(tree: &TreeGraph, signs: &SignSequence, z_j: &[PhasePoint], params: &CollisionParams, t: f64, tb: &TwoBody) -> Result<BackwardTrajectory> {
    check_inputs(tree, signs, z_j, params, t)?;
    build_bbf_with(tree, signs, z_j, &params.times, t, tb, |r, _| Ok((params.nus[r], params.velocities[r]))).map(|(b, _)| b)
}

/// As [`build_bbf`], with `(ν_r, v_{j+r})` supplied node by node by
/// `pick(r, η_{k_r}(t_r⁺))` (0-based `r`). Also returns the parameters used.
pub fn build_bbf_with<F>(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    times: &[f64],
    t: f64,
    tb: &TwoBody,
    mut pick: F,
) -> Result<(BackwardTrajectory, CollisionParams)>
where
    F: FnMut(usize, &Vec3) -> Result<(Vec3, Vec3)>,
{
    let n = tree.n();
    if times.len() != n || signs.len() != n || z_j.len() != tree.j {
        return Err(Error::InvalidArgument("tree, signs, times and initial states disagree".into()));
    }
    let mut params = CollisionParams { times: times.to_vec(), nus: Vec::with_capacity(n), velocities: Vec::with_capacity(n) };
    let mut cur: Vec<PhasePoint> = z_j.to_vec();
    let mut segments = Vec::with_capacity(n + 1);
    let mut creations = Vec::with_capacity(n);
    let mut t_hi = t;
    #[allow(clippy::needless_range_loop)]
    for r in 0..=n {
        let t_lo = if r < n { times[r] } else { 0.0 };
        let end: Vec<PhasePoint> = cur.iter().map(|p| PhasePoint { x: p.x - p.v * (t_hi - t_lo), v: p.v }).collect();
        segments.push(Segment { t_hi, t_lo, start: cur, end: end.clone() });
        cur = end;
        if r == n {
            break;
        }
        let k = tree.k[r];
        let child = tree.j + r + 1;
        let eta = cur[k - 1].v;
        let (nu, vnew) = pick(r, &eta)?;
        params.nus.push(nu);
        params.velocities.push(vnew);
        let kernel = check_half_space(r + 1, signs.sigma[r], &nu, &(vnew - eta))?;
        let (pa, ca) = match signs.sigma[r] {
            Sign::Plus => outgoing_to_incoming(tb, &nu, &eta, &vnew)?,
            Sign::Minus => (eta, vnew),
        };
        let x = cur[k - 1].x;
        cur[k - 1].v = pa;
        cur.push(PhasePoint { x, v: ca });
        creations.push(CreationRecord {
            r: r + 1,
            time: t_lo,
            parent: k,
            child,
            nu,
            sign: signs.sigma[r],
            parent_before: eta,
            child_before: vnew,
            parent_after: pa,
            child_after: ca,
            kernel,
        });
        t_hi = t_lo;
    }
    let traj = BackwardTrajectory {
        kind: FlowKind::Bbf,
        tree: tree.clone(),
        signs: signs.clone(),
        t,
        segments,
        creations,
        samples: Vec::new(),
        recollided: false,
        energy_drift: 0.0,
        numeric_scatterings: 0,
    };
    Ok((traj, params))
}

/// One free piece of a virtual trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualPiece {
    pub t_hi: f64,
    pub t_lo: f64,
    /// Particle of the flow followed on this piece.
    pub particle: usize,
    pub x_hi: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualTrajectory {
    pub label: usize,
    /// One piece per segment, from `t` down to 0.
    pub pieces: Vec<VirtualPiece>,
}

impl VirtualTrajectory {
    pub fn position(&self, s: f64) -> Vec3 {
        let p =
            self.pieces
                .iter()
                .rev()
                .find(|p| s >= p.t_lo && s < p.t_hi)
                .unwrap_or_else(|| if s <= 0.0 { self.pieces.last().unwrap() } else { &self.pieces[0] });
        p.x_hi - p.v * (p.t_hi - s)
    }
}

/// Particle followed by the tree path of `label` on segment `r`: the
/// nearest ancestor alive there.
pub fn path_particle(tree: &TreeGraph, label: usize, r: usize) -> usize {
    let mut p = label;
    while p > tree.j + r {
        p = tree.k[p - tree.j - 1];
    }
    p
}

/// Whether node `r` (1-based) lies on the tree path of `label`.
pub fn node_on_path(tree: &TreeGraph, label: usize, r: usize) -> bool {
    path_particle(tree, label, r - 1) == tree.k[r - 1]
}

/// The virtual trajectory `ζⁱ` of particle `label` in a Boltzmann flow.
pub fn virtual_trajectory(traj: &BackwardTrajectory, label: usize) -> Result<VirtualTrajectory> {
    if traj.kind != FlowKind::Bbf {
        return Err(Error::InvalidArgument("virtual trajectories are defined on the Boltzmann flow".into()));
    }
    if label == 0 || label > traj.tree.particles() {
        return Err(Error::InvalidArgument(format!("particle {label} outside 1..={}", traj.tree.particles())));
    }
    let pieces = traj
        .segments
        .iter()
        .enumerate()
        .map(|(r, g)| {
            let p = path_particle(&traj.tree, label, r);
            VirtualPiece { t_hi: g.t_hi, t_lo: g.t_lo, particle: p, x_hi: g.start[p - 1].x, v: g.start[p - 1].v }
        })
        .collect();
    Ok(VirtualTrajectory { label, pieces })
}
