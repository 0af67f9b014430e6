//! Change from outgoing to incoming variables at one node.

use serde::{Deserialize, Serialize};

use super::flow::{build_bbf, BackwardTrajectory, CollisionParams, FlowKind};
use super::trees::{Sign, SignSequence, TreeGraph};
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::two_body::{reflect_through, TwoBody};
use crate::Vec3;

/// `(ν′, V′)` from `(ν, v)` and the parent velocity `η = η_{k_r}(t_r⁺)`:
/// the inverse scattering operator applied to `(ν, v − η)` when that pair
/// is outgoing, the translation alone otherwise.
pub fn incoming_pair(tb: &TwoBody, nu: &Vec3, v: &Vec3, eta: &Vec3) -> Result<(Vec3, Vec3)> {
    let rel = v - eta;
    if nu.dot(&rel) > 0.0 {
        tb.inverse_scattering_operator(nu, &rel)
    } else {
        Ok((*nu, rel))
    }
}

/// Parameters with node `r` written in incoming variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncomingParams {
    pub r: usize,
    pub times: Vec<f64>,
    /// `nus[r−1]` holds `ν′_r`.
    pub nus: Vec<Vec3>,
    /// `velocities[r−1]` holds the relative velocity `V′_r`; the other
    /// entries are the created velocities as before.
    pub velocities: Vec<Vec3>,
}

/// Replaces `(ν_r, v_{j+r})` by `(ν′_r, V′_r)`: for an outgoing node
/// `ν′_r = −ν_r + 2ω_r(ω_r·ν_r)`, otherwise `ν′_r = ν_r`, and in both cases
/// `V′_r = η_{j+r}(t_r⁻) − η_{k_r}(t_r⁻)` read off the flow.
pub fn incoming_map(traj: &BackwardTrajectory, r: usize, params: &CollisionParams, tb: &TwoBody) -> Result<IncomingParams> {
    if traj.kind != FlowKind::Bbf {
        return Err(Error::InvalidArgument("incoming_map acts on the Boltzmann flow".into()));
    }
    if r == 0 || r > traj.n() || params.len() != traj.n() {
        return Err(Error::InvalidArgument(format!("node {r} outside 1..={}", traj.n())));
    }
    let c = &traj.creations[r - 1];
    let nu = params.nus[r - 1];
    let rel = params.velocities[r - 1] - c.parent_before;
    let nu_p = if nu.dot(&rel) > 0.0 {
        let omega = tb.scattering_vector(&nu, &rel)?;
        reflect_through(&omega, &nu)
    } else {
        nu
    };
    let mut nus = params.nus.clone();
    let mut velocities = params.velocities.clone();
    nus[r - 1] = nu_p;
    velocities[r - 1] = c.child_after - c.parent_after;
    Ok(IncomingParams { r, times: params.times.clone(), nus, velocities })
}

/// Inverse of [`incoming_map`] on the half-space selected by `σ_r`.
pub fn outgoing_params(tree: &TreeGraph, signs: &SignSequence, z_j: &[PhasePoint], t: f64, inc: &IncomingParams, tb: &TwoBody) -> Result<CollisionParams> {
    let r = inc.r;
    if r == 0 || r > tree.n() {
        return Err(Error::InvalidArgument(format!("node {r} outside 1..={}", tree.n())));
    }
    // η_{k_r}(t_r⁺) depends on the nodes before r only.
    let head = TreeGraph::new(tree.j, tree.k[..r - 1].to_vec())?;
    let head_signs = SignSequence::new(signs.sigma[..r - 1].to_vec());
    let head_params = CollisionParams { times: inc.times[..r - 1].to_vec(), nus: inc.nus[..r - 1].to_vec(), velocities: inc.velocities[..r - 1].to_vec() };
    let bbf = build_bbf(&head, &head_signs, z_j, &head_params, t, tb)?;
    let eta = bbf.state_at(inc.times[r - 1])?[tree.k[r - 1] - 1].v;
    let (nu_p, v_p) = (inc.nus[r - 1], inc.velocities[r - 1]);
    let (nu, rel) = match signs.sigma[r - 1] {
        Sign::Plus if v_p.norm() > 0.0 && nu_p.dot(&v_p) < 0.0 => tb.scattering_operator(&nu_p, &v_p)?,
        _ => (nu_p, v_p),
    };
    let mut out = CollisionParams { times: inc.times.clone(), nus: inc.nus.clone(), velocities: inc.velocities.clone() };
    out.nus[r - 1] = nu;
    out.velocities[r - 1] = eta + rel;
    Ok(out)
}
