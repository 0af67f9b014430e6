//! The interacting backward flow at scale ε.

use serde::{Deserialize, Serialize};

use super::flow::{check_half_space, check_inputs, outgoing_to_incoming, BackwardTrajectory, CollisionParams, CreationRecord, FlowKind, Segment, Snapshot};
use super::trees::{Sign, SignSequence, TreeGraph};
use crate::dynamics::{newton_flow_report, FlowOptions, PhasePoint, SystemState};
use crate::error::{Error, Result};
use crate::two_body::{reflect_through, TwoBody};
use crate::Vec3;

/// How the pair scattering triggered by a `+` creation is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScatteringMode {
    /// Replace the isolated pair scattering by the two-body map and the
    /// residence time τ*; fall back to direct integration when a third
    /// particle comes near the pair or the next creation falls inside the
    /// scattering.
    TwoBodyExact,
    /// Integrate every scattering with the N-particle flow.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IbfOptions {
    pub mode: ScatteringMode,
    pub flow: FlowOptions,
    /// Times at which to record [`Snapshot`]s, in addition to each creation.
    pub sample_times: Vec<f64>,
    /// A third particle must stay this many ε away from the centre of mass
    /// of a scattering pair for the two-body map to be used.
    pub isolation: f64,
}

impl Default for IbfOptions {
    fn default() -> Self {
        Self { mode: ScatteringMode::TwoBodyExact, flow: FlowOptions::default(), sample_times: Vec::new(), isolation: 1.5 }
    }
}

/// Places `b` on the ray from `a` along `dir` at distance `eps·(1 ± tiny)`
/// so that the separation lands on the requested side of ε.
fn place(a: &Vec3, dir: &Vec3, eps: f64, outside: bool) -> Vec3 {
    let mut scale = 1.0;
    loop {
        let b = a + dir * (eps * scale);
        let d = (b - a).norm();
        if (outside && d >= eps) || (!outside && d < eps) {
            return b;
        }
        scale *= if outside { 1.0 + 1e-15 } else { 1.0 - 1e-15 };
    }
}

struct Builder<'a> {
    tb: &'a TwoBody,
    opts: &'a IbfOptions,
    eps: f64,
    samples: Vec<f64>,
    next_sample: usize,
    out: Vec<Snapshot>,
    recollided: bool,
    drift: f64,
    numeric: usize,
}

impl Builder<'_> {
    /// Flows `state` (at time `state.time`) back to `t_lo`, recording the
    /// requested snapshots on the way.
    fn leg(&mut self, state: SystemState, t_lo: f64) -> Result<SystemState> {
        let mut st = state;
        while self.next_sample < self.samples.len() && self.samples[self.next_sample] > t_lo {
            let s = self.samples[self.next_sample];
            if s < st.time {
                st = self.flow(st, s)?;
            }
            self.out.push(Snapshot { time: s, particles: st.particles.clone() });
            self.next_sample += 1;
        }
        if t_lo < st.time {
            st = self.flow(st, t_lo)?;
        }
        Ok(st)
    }

    fn flow(&mut self, st: SystemState, to: f64) -> Result<SystemState> {
        let from = st.time;
        let rep = newton_flow_report(&st, self.tb.potential(), to - from, &self.opts.flow)?;
        self.drift = self.drift.max(rep.energy_drift);
        if !rep.contacts.is_empty() {
            self.recollided = true;
        }
        let mut s = rep.state;
        s.time = to;
        Ok(s)
    }

    /// Resolves the backward scattering of the pair `(p, c)` created at
    /// `st.time` with the two-body map. Returns `None` when the pair is not
    /// isolated long enough.
    fn analytic_window(&mut self, st: &SystemState, p: usize, c: usize, nu: &Vec3, t_next: f64) -> Result<Option<(SystemState, Vec3, Vec3)>> {
        let eps = self.eps;
        let (vp, vc) = (st.particles[p].v, st.particles[c].v);
        let rel = vc - vp;
        let speed = rel.norm();
        if !(speed > 0.0) {
            return Ok(None);
        }
        let rho = (nu.cross(&rel).norm() / speed).min(1.0);
        let tau = self.tb.scattering_time(rho, speed)?;
        let w = eps * tau;
        let t0 = st.time;
        if !(t0 - w > t_next) {
            return Ok(None);
        }
        let omega = self.tb.scattering_vector(nu, &rel)?;
        let (pa, ca) = outgoing_to_incoming(self.tb, nu, &vp, &vc)?;
        let nu_in = reflect_through(&omega, nu);
        let u = (vp + vc) * 0.5;
        let x_cm0 = (st.particles[p].x + st.particles[c].x) * 0.5;

        // The other particles over the same window.
        let others: Vec<usize> = (0..st.particles.len()).filter(|&i| i != p && i != c).collect();
        let mut moved: Vec<PhasePoint> = others.iter().map(|&i| st.particles[i]).collect();
        if !others.is_empty() && w > 0.0 {
            let sub = SystemState { particles: moved.clone(), epsilon: eps, time: t0 };
            let rep = newton_flow_report(&sub, self.tb.potential(), -w, &self.opts.flow)?;
            if !rep.contacts.is_empty() {
                return Ok(None);
            }
            self.drift = self.drift.max(rep.energy_drift);
            moved = rep.state.particles;
        }
        // Straight-line paths of the others against the centre of mass.
        for (a, &i) in others.iter().enumerate() {
            let d0 = st.particles[i].x - x_cm0;
            let d1 = moved[a].x - (x_cm0 - u * w);
            if segment_min_norm(&d0, &d1) < self.opts.isolation * eps {
                return Ok(None);
            }
        }

        // Snapshots inside the window: the relative position is interpolated
        // between its end values.
        while self.next_sample < self.samples.len() && self.samples[self.next_sample] > t0 - w {
            let s = self.samples[self.next_sample];
            if s <= t0 {
                let f = (t0 - s) / w;
                let mut ps = st.particles.clone();
                for (a, &i) in others.iter().enumerate() {
                    ps[i].x = st.particles[i].x + (moved[a].x - st.particles[i].x) * f;
                }
                let cm = x_cm0 - u * (t0 - s);
                let q = (nu * (1.0 - f) + nu_in * f) * (0.5 * eps);
                ps[p].x = cm - q;
                ps[c].x = cm + q;
                self.out.push(Snapshot { time: s, particles: ps });
            }
            self.next_sample += 1;
        }

        let mut ps = st.particles.clone();
        for (a, &i) in others.iter().enumerate() {
            ps[i] = moved[a];
        }
        let cm = x_cm0 - u * w;
        ps[p].x = cm - nu_in * (0.5 * eps);
        ps[c].x = place(&ps[p].x, &nu_in, eps, true);
        ps[p].v = pa;
        ps[c].v = ca;
        Ok(Some((SystemState { particles: ps, epsilon: eps, time: t0 - w }, pa, ca)))
    }
}

/// `min_{s∈[0,1]} |d0 + s(d1 − d0)|`.
fn segment_min_norm(d0: &Vec3, d1: &Vec3) -> f64 {
    let e = d1 - d0;
    let ee = e.norm_squared();
    let s = if ee > 0.0 { (-d0.dot(&e) / ee).clamp(0.0, 1.0) } else { 0.0 };
    (d0 + e * s).norm()
}

/// Builds the interacting backward flow: between creations all particles
/// follow the ε-scaled Newton flow backward in time, and at `t_r` particle
/// `j+r` is inserted at `ξ_{k_r}(t_r) + ν_r ε` with velocity `v_{j+r}`.
///
/// Rejects creations that violate the half-space condition or land within
/// ε of a third particle.
#[allow(clippy::too_many_arguments)]
pub fn build_ibf(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    params: &CollisionParams,
    t: f64,
    epsilon: f64,
    tb: &TwoBody,
    opts: &IbfOptions,
) -> Result<BackwardTrajectory> {
    check_inputs(tree, signs, z_j, params, t)?;
    build_ibf_with(tree, signs, z_j, &params.times, t, epsilon, tb, opts, |r, _| Ok((params.nus[r], params.velocities[r]))).map(|(b, _)| b)
}

/// As [`build_ibf`], with `(ν_r, v_{j+r})` supplied by `pick(r, ηᵉ_{k_r}(t_r))`.
#[allow(clippy::too_many_arguments)]
pub fn build_ibf_with<F>(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    times: &[f64],
    t: f64,
    epsilon: f64,
    tb: &TwoBody,
    opts: &IbfOptions,
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
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    for i in 0..z_j.len() {
        for k in i + 1..z_j.len() {
            if (z_j[i].x - z_j[k].x).norm() < epsilon {
                return Err(Error::Rejected(format!("initial particles {} and {} closer than epsilon", i + 1, k + 1)));
            }
        }
    }
    let mut samples: Vec<f64> = opts.sample_times.iter().copied().filter(|&s| s >= 0.0 && s <= t).collect();
    samples.sort_by(|a, b| b.total_cmp(a));
    samples.dedup();
    let mut b = Builder { tb, opts, eps: epsilon, samples, next_sample: 0, out: Vec::new(), recollided: false, drift: 0.0, numeric: 0 };

    let mut st = SystemState::new(z_j.to_vec(), epsilon)?;
    st.time = t;
    let mut segments = Vec::with_capacity(n + 1);
    let mut creations: Vec<CreationRecord> = Vec::with_capacity(n);
    // Pair created at the top of the current segment, if it scatters.
    let mut pending: Option<(usize, usize, Vec3)> = None;
    #[allow(clippy::needless_range_loop)]
    for r in 0..=n {
        let t_lo = if r < n { times[r] } else { 0.0 };
        let start = st.particles.clone();
        let t_hi = st.time;
        let mut integrated = None;
        if let Some((p, c, nu)) = pending.take() {
            let done = match opts.mode {
                ScatteringMode::TwoBodyExact => b.analytic_window(&st, p, c, &nu, t_lo)?,
                ScatteringMode::Numeric => None,
            };
            match done {
                Some((s, pa, ca)) => {
                    let rec = creations.last_mut().expect("pending creation");
                    rec.parent_after = pa;
                    rec.child_after = ca;
                    st = s;
                }
                None => {
                    b.numeric += 1;
                    // Move the child just inside the range so the flow sees
                    // an interacting pair rather than a new contact.
                    st.particles[c].x = place(&st.particles[p].x, &nu, epsilon, false);
                    integrated = Some((p, c));
                }
            }
        }
        st = b.leg(st, t_lo)?;
        if let Some((p, c)) = integrated {
            let rec = creations.last_mut().expect("pending creation");
            rec.parent_after = st.particles[p].v;
            rec.child_after = st.particles[c].v;
        }
        segments.push(Segment { t_hi, t_lo, start, end: st.particles.clone() });
        if r == n {
            break;
        }

        let k = tree.k[r];
        let parent = st.particles[k - 1];
        let (nu, vnew) = pick(r, &parent.v)?;
        params.nus.push(nu);
        params.velocities.push(vnew);
        let kernel = check_half_space(r + 1, signs.sigma[r], &nu, &(vnew - parent.v))?;
        let scatters = signs.sigma[r] == Sign::Plus;
        // Numeric scatterings start just inside the range so that the
        // creation itself is not reported as a contact.
        let outside = !scatters || opts.mode == ScatteringMode::TwoBodyExact;
        let x = place(&parent.x, &nu, epsilon, outside);
        for (i, q) in st.particles.iter().enumerate() {
            if i != k - 1 && (q.x - x).norm() <= epsilon {
                return Err(Error::Rejected(format!("node {}: particle {} within epsilon of the created particle", r + 1, i + 1)));
            }
        }
        st.particles.push(PhasePoint { x, v: vnew });
        let child = st.particles.len();
        creations.push(CreationRecord {
            r: r + 1,
            time: t_lo,
            parent: k,
            child,
            nu,
            sign: signs.sigma[r],
            parent_before: parent.v,
            child_before: vnew,
            parent_after: parent.v,
            child_after: vnew,
            kernel,
        });
        b.out.push(Snapshot { time: t_lo, particles: st.particles.clone() });
        if scatters {
            pending = Some((k - 1, child - 1, nu));
        }
    }
    while b.next_sample < b.samples.len() {
        b.out.push(Snapshot { time: b.samples[b.next_sample], particles: st.particles.clone() });
        b.next_sample += 1;
    }
    let mut out = b.out;
    out.sort_by(|a, b| b.time.total_cmp(&a.time));
    let traj = BackwardTrajectory {
        kind: FlowKind::Ibf { epsilon },
        tree: tree.clone(),
        signs: signs.clone(),
        t,
        segments,
        creations,
        samples: out,
        recollided: b.recollided,
        energy_drift: b.drift,
        numeric_scatterings: b.numeric,
    };
    Ok((traj, params))
}
