//! N-particle Newton dynamics in macroscopic variables at scale ε.
//!
//! Particles stream freely until some pair comes within ε; while any pair
//! interacts, the whole system is advanced with a fourth-order symplectic
//! composition of velocity Verlet.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::RadialPotential;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec3,
    pub v: Vec3,
}

impl PhasePoint {
    pub fn new(x: Vec3, v: Vec3) -> Self {
        Self { x, v }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub particles: Vec<PhasePoint>,
    pub epsilon: f64,
    pub time: f64,
}

impl SystemState {
    /// Validates finiteness, `ε > 0` and distinct positions.
    pub fn new(particles: Vec<PhasePoint>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        for (i, p) in particles.iter().enumerate() {
            if !p.x.iter().chain(p.v.iter()).all(|c| c.is_finite()) {
                return Err(Error::InvalidArgument(format!("particle {i} has non-finite components")));
            }
        }
        for i in 0..particles.len() {
            for k in i + 1..particles.len() {
                if particles[i].x == particles[k].x {
                    return Err(Error::Precondition(format!("particles {i} and {k} coincide")));
                }
            }
        }
        Ok(Self { particles, epsilon, time: 0.0 })
    }

    /// As [`SystemState::new`], additionally requiring `Nε² = 1`.
    pub fn with_bg_scaling(particles: Vec<PhasePoint>, epsilon: f64) -> Result<Self> {
        let n = particles.len() as f64;
        if (n * epsilon * epsilon - 1.0).abs() >= 1e-12 {
            return Err(Error::Precondition(format!("N ε² = {} is not 1", n * epsilon * epsilon)));
        }
        Self::new(particles, epsilon)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn momentum(&self) -> Vec3 {
        self.particles.iter().map(|p| p.v).sum()
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.particles.iter().map(|p| p.v.norm_squared()).sum::<f64>()
    }
}

/// `H = ½Σ|v_i|² + Σ_{i<k} Φ(|x_i − x_k|/ε)`.
pub fn hamiltonian(state: &SystemState, potential: &RadialPotential) -> f64 {
    let mut u = 0.0;
    for_each_close_pair(&state.particles, state.epsilon, |i, k| {
        let r = (state.particles[i].x - state.particles[k].x).norm() / state.epsilon;
        u += potential.phi(r);
    });
    state.kinetic_energy() + u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitDirection {
    MicroToMacro,
    MacroToMicro,
}

/// Rescales a position (and leaves the velocity) between `q` and `x = εq`.
pub fn convert_units(point: &PhasePoint, epsilon: f64, direction: UnitDirection) -> PhasePoint {
    let s = match direction {
        UnitDirection::MicroToMacro => epsilon,
        UnitDirection::MacroToMicro => 1.0 / epsilon,
    };
    PhasePoint { x: point.x * s, v: point.v }
}

/// Rescales a time between `τ` and `t = ετ`.
pub fn convert_time(t: f64, epsilon: f64, direction: UnitDirection) -> f64 {
    match direction {
        UnitDirection::MicroToMacro => t * epsilon,
        UnitDirection::MacroToMicro => t / epsilon,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Target relative energy drift over the whole call; exceeding it is an
    /// error.
    pub tol: f64,
    /// Step-size factor: a step covers at most this fraction of the time a
    /// close pair needs to change its separation appreciably.
    pub kappa: f64,
    /// Local error tolerance of one step, relative to ε for positions and to
    /// the largest speed for velocities.
    pub step_tol: f64,
    /// Stop with an error when a pair comes closer than `min_separation · ε`.
    pub min_separation: f64,
    /// Record every `stride`-th step in [`FlowReport::trace`]; `None` records nothing.
    pub trace_stride: Option<usize>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-8, kappa: 0.05, step_tol: 1e-11, min_separation: 1e-6, trace_stride: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time: f64,
    pub particle: usize,
    pub x: [f64; 3],
    pub v: [f64; 3],
}

/// A pair entering the interaction range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub time: f64,
    pub i: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub state: SystemState,
    pub energy_drift: f64,
    pub steps: usize,
    pub contacts: Vec<Contact>,
    pub trace: Vec<TraceRow>,
}

/// Advances `state` by the signed macroscopic time `duration`.
pub fn newton_flow(state: &SystemState, potential: &RadialPotential, duration: f64, opts: &FlowOptions) -> Result<SystemState> {
    newton_flow_report(state, potential, duration, opts).map(|r| r.state)
}

/// [`newton_flow`] with diagnostics. Backward flow reverses the velocities,
/// flows forward and reverses them again.
pub fn newton_flow_report(state: &SystemState, potential: &RadialPotential, duration: f64, opts: &FlowOptions) -> Result<FlowReport> {
    if !duration.is_finite() {
        return Err(Error::InvalidArgument("duration must be finite".into()));
    }
    let mut s = SystemState::new(state.particles.clone(), state.epsilon)?;
    s.time = state.time;
    let backward = duration < 0.0;
    if backward {
        for p in &mut s.particles {
            p.v = -p.v;
        }
    }
    let mut flow = Flow::new(s, potential, opts, if backward { -1.0 } else { 1.0 });
    flow.run(duration.abs())?;
    let mut report = flow.finish();
    if backward {
        for p in &mut report.state.particles {
            p.v = -p.v;
        }
        for row in &mut report.trace {
            row.v = [-row.v[0], -row.v[1], -row.v[2]];
        }
    }
    Ok(report)
}

fn for_each_close_pair<F: FnMut(usize, usize)>(ps: &[PhasePoint], eps: f64, mut f: F) {
    let n = ps.len();
    if n <= 32 {
        for i in 0..n {
            for k in i + 1..n {
                if (ps[i].x - ps[k].x).norm_squared() < eps * eps {
                    f(i, k);
                }
            }
        }
        return;
    }
    for_each_pair_within(ps, eps, |i, k| {
        if (ps[i].x - ps[k].x).norm_squared() < eps * eps {
            f(i, k)
        }
    });
}

/// Calls `f` for every pair at distance below `range` (and possibly some
/// further apart), using a uniform grid of cell size `range`.
fn for_each_pair_within<F: FnMut(usize, usize)>(ps: &[PhasePoint], range: f64, mut f: F) {
    let cell = |x: &Vec3| ((x.x / range).floor() as i64, (x.y / range).floor() as i64, (x.z / range).floor() as i64);
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in ps.iter().enumerate() {
        grid.entry(cell(&p.x)).or_default().push(i);
    }
    for (i, p) in ps.iter().enumerate() {
        let (cx, cy, cz) = cell(&p.x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &k in list {
                            if k > i {
                                f(i, k);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// First `s ≥ 0` with `|dx + s·dv| = r`, for a pair currently outside `r`.
fn contact_time(dx: &Vec3, dv: &Vec3, r: f64) -> Option<f64> {
    let b = dx.dot(dv);
    if b >= 0.0 {
        return None;
    }
    let a = dv.norm_squared();
    let c = dx.norm_squared() - r * r;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    // Stable root of a s² + 2b s + c = 0 with b < 0.
    let q = -b + disc.sqrt();
    Some((c / q).max(0.0))
}

const YOSHIDA: [f64; 3] = {
    // w1 = 1/(2 − 2^{1/3}), w0 = 1 − 2 w1.
    let w1 = 1.351_207_191_959_657_8;
    [w1, 1.0 - 2.0 * w1, w1]
};

struct Flow<'a> {
    s: SystemState,
    pot: &'a RadialPotential,
    opts: &'a FlowOptions,
    sign: f64,
    e0: f64,
    drift: f64,
    steps: usize,
    contacts: Vec<Contact>,
    trace: Vec<TraceRow>,
    /// Pairs within ε after the last step.
    inside: Vec<(usize, usize)>,
    /// Step size proposed by the error control.
    h: f64,
}

impl<'a> Flow<'a> {
    fn new(s: SystemState, pot: &'a RadialPotential, opts: &'a FlowOptions, sign: f64) -> Self {
        let e0 = hamiltonian(&s, pot);
        let mut f = Self { s, pot, opts, sign, e0, drift: 0.0, steps: 0, contacts: Vec::new(), trace: Vec::new(), inside: Vec::new(), h: f64::INFINITY };
        f.inside = f.close_pairs();
        f.record();
        f
    }

    fn record(&mut self) {
        if let Some(stride) = self.opts.trace_stride {
            if self.steps.is_multiple_of(stride.max(1)) {
                let t = self.s.time;
                for (i, p) in self.s.particles.iter().enumerate() {
                    self.trace.push(TraceRow { time: t, particle: i, x: [p.x.x, p.x.y, p.x.z], v: [p.v.x, p.v.y, p.v.z] });
                }
            }
        }
    }

    fn close_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for_each_close_pair(&self.s.particles, self.s.epsilon, |i, k| out.push((i, k)));
        out
    }

    fn max_speed(&self) -> f64 {
        self.s.particles.iter().map(|p| p.v.norm()).fold(0.0, f64::max)
    }

    fn accelerations(&self, xs: &[Vec3]) -> Result<Vec<Vec3>> {
        let eps = self.s.epsilon;
        let mut acc = vec![Vec3::zeros(); xs.len()];
        let mut err = None;
        let mut visit = |i: usize, k: usize| {
            let d = xs[i] - xs[k];
            let r = d.norm();
            if r >= eps {
                return;
            }
            if r < self.opts.min_separation * eps {
                err =
                    Some(Error::IntegrationStiff { time: self.s.time, message: format!("particles {i} and {k} closer than {} ε", self.opts.min_separation) });
                return;
            }
            let dphi = self.pot.interior(r / eps).1;
            // ẍ_i = −∇_x Φ(|x_i − x_k|/ε) = −Φ′ d / (ε r).
            let a = d * (-dphi / (eps * r));
            acc[i] += a;
            acc[k] -= a;
        };
        let n = xs.len();
        if n <= 32 {
            for i in 0..n {
                for k in i + 1..n {
                    visit(i, k);
                }
            }
        } else {
            let pts: Vec<PhasePoint> = xs.iter().map(|&x| PhasePoint { x, v: Vec3::zeros() }).collect();
            for_each_pair_within(&pts, eps, &mut visit);
        }
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }

    fn energy(&self, xs: &[Vec3], vs: &[Vec3]) -> f64 {
        let ps: Vec<PhasePoint> = xs.iter().zip(vs).map(|(&x, &v)| PhasePoint { x, v }).collect();
        let st = SystemState { particles: ps, epsilon: self.s.epsilon, time: 0.0 };
        hamiltonian(&st, self.pot)
    }

    /// One fourth-order step of length `h`.
    fn yoshida(&self, ps: &[PhasePoint], h: f64) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
        let mut xs: Vec<Vec3> = ps.iter().map(|p| p.x).collect();
        let mut vs: Vec<Vec3> = ps.iter().map(|p| p.v).collect();
        for w in YOSHIDA {
            let hw = h * w;
            let a = self.accelerations(&xs)?;
            for i in 0..xs.len() {
                vs[i] += a[i] * (0.5 * hw);
                xs[i] += vs[i] * hw;
            }
            let a = self.accelerations(&xs)?;
            for i in 0..xs.len() {
                vs[i] += a[i] * (0.5 * hw);
            }
        }
        Ok((xs, vs))
    }

    /// Step-size bound from the pairs near contact.
    fn step_bound(&self) -> Result<f64> {
        let eps = self.s.epsilon;
        let ps = &self.s.particles;
        let xs: Vec<Vec3> = ps.iter().map(|p| p.x).collect();
        let acc = self.accelerations(&xs)?;
        let vmax = self.max_speed();
        let mut h = if vmax > 0.0 { eps / (2.0 * vmax) } else { f64::INFINITY };
        let mut check = |i: usize, k: usize| {
            let d = (ps[i].x - ps[k].x).norm();
            if d >= 3.0 * eps {
                return;
            }
            let u = (ps[i].v - ps[k].v).norm();
            if u > 0.0 {
                h = h.min(d / u);
            }
            let a = (acc[i] - acc[k]).norm();
            if a > 0.0 {
                h = h.min((d / a).sqrt());
            }
        };
        let n = ps.len();
        if n <= 32 {
            for i in 0..n {
                for k in i + 1..n {
                    check(i, k);
                }
            }
        } else {
            for_each_pair_within(ps, 3.0 * eps, &mut check);
        }
        Ok(self.opts.kappa * h)
    }

    /// Time until the first pair enters the interaction range, and whether
    /// that time is a contact rather than a cap keeping pairs farther than
    /// `3ε` out of range.
    fn free_window(&self) -> (f64, bool) {
        let eps = self.s.epsilon;
        let ps = &self.s.particles;
        let n = ps.len();
        let mut best = f64::INFINITY;
        let mut check = |i: usize, k: usize| {
            if let Some(t) = contact_time(&(ps[i].x - ps[k].x), &(ps[i].v - ps[k].v), eps) {
                best = best.min(t);
            }
        };
        if n <= 32 {
            for i in 0..n {
                for k in i + 1..n {
                    check(i, k);
                }
            }
            return (best, best.is_finite());
        }
        for_each_pair_within(ps, 3.0 * eps, &mut check);
        let cap = eps / self.max_speed();
        if cap < best {
            (cap, false)
        } else {
            (best, true)
        }
    }

    fn note_contacts(&mut self) {
        let now = self.close_pairs();
        for &(i, k) in &now {
            if !self.inside.contains(&(i, k)) {
                let t = self.s.time;
                self.contacts.push(Contact { time: t, i, k });
            }
        }
        self.inside = now;
    }

    fn run(&mut self, duration: f64) -> Result<()> {
        let start = self.s.time;
        let mut elapsed = 0.0;
        let mut guard = 0usize;
        while elapsed < duration {
            guard += 1;
            if guard > 100_000_000 {
                return Err(Error::IntegrationStiff { time: self.s.time, message: "step limit reached".into() });
            }
            if self.inside.is_empty() {
                let (w, contact) = self.free_window();
                let rest = duration - elapsed;
                let dt = w.min(rest);
                for p in &mut self.s.particles {
                    p.x += p.v * dt;
                }
                elapsed = if w >= rest { duration } else { elapsed + dt };
                self.s.time = start + self.sign * elapsed;
                self.steps += 1;
                self.note_contacts();
                self.record();
                if !contact || elapsed >= duration {
                    continue;
                }
            }
            // The pair that just touched may still sit a rounding error
            // outside ε; the integrator carries it in either way.
            let h = self.step_bound()?.min(duration - elapsed);
            self.integrate_step(h, &mut elapsed, start)?;
        }
        if self.drift > self.opts.tol {
            return Err(Error::Numerical(format!("relative energy drift {:e} exceeds {:e}", self.drift, self.opts.tol)));
        }
        Ok(())
    }

    /// One accepted step, chosen by step doubling: a step of `h` is compared
    /// with two steps of `h/2` and the latter is kept when they agree to
    /// `step_tol` (positions relative to ε, velocities relative to the
    /// largest speed).
    fn integrate_step(&mut self, h_max: f64, elapsed: &mut f64, start: f64) -> Result<()> {
        let mut h = self.h.min(h_max);
        let eps = self.s.epsilon;
        let vscale = self.max_speed().max(1e-300);
        let scale = self.e0.abs().max(self.s.kinetic_energy()).max(1e-300);
        loop {
            let (x1, v1) = self.yoshida(&self.s.particles, h)?;
            let mid: Vec<PhasePoint> = {
                let (xm, vm) = self.yoshida(&self.s.particles, 0.5 * h)?;
                xm.into_iter().zip(vm).map(|(x, v)| PhasePoint { x, v }).collect()
            };
            let (x2, v2) = self.yoshida(&mid, 0.5 * h)?;
            let mut err: f64 = 0.0;
            for i in 0..x1.len() {
                err = err.max((x1[i] - x2[i]).norm() / (self.opts.step_tol * eps));
                err = err.max((v1[i] - v2[i]).norm() / (self.opts.step_tol * vscale));
            }
            let grow = if err > 0.0 { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) } else { 4.0 };
            if err <= 1.0 {
                let e_after = self.energy(&x2, &v2);
                for (p, (x, v)) in self.s.particles.iter_mut().zip(x2.into_iter().zip(v2)) {
                    p.x = x;
                    p.v = v;
                }
                *elapsed += h;
                self.s.time = start + self.sign * *elapsed;
                self.steps += 1;
                self.drift = self.drift.max((e_after - self.e0).abs() / scale);
                self.h = h * grow;
                self.note_contacts();
                self.record();
                return Ok(());
            }
            h *= grow;
            if h < 1e-14 * eps / vscale {
                return Err(Error::IntegrationStiff { time: self.s.time, message: "step size underflow".into() });
            }
        }
    }

    fn finish(self) -> FlowReport {
        let mut trace = self.trace;
        if self.opts.trace_stride.is_some() {
            let t = self.s.time;
            if trace.last().map(|r| r.time) != Some(t) {
                for (i, p) in self.s.particles.iter().enumerate() {
                    trace.push(TraceRow { time: t, particle: i, x: [p.x.x, p.x.y, p.x.z], v: [p.v.x, p.v.y, p.v.z] });
                }
            }
        }
        FlowReport { state: self.s, energy_drift: self.drift, steps: self.steps, contacts: self.contacts, trace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_body::{apply_collision_rule, TwoBody};

    fn pair(eps: f64, rho: f64, v: f64) -> SystemState {
        // Relative position starts at 2ε, offset ρε sideways, moving head-on.
        let x0 = Vec3::new(-eps, 0.5 * rho * eps, 0.0);
        let x1 = Vec3::new(eps, -0.5 * rho * eps, 0.0);
        SystemState::new(vec![PhasePoint::new(x0, Vec3::new(0.5 * v, 0.0, 0.0)), PhasePoint::new(x1, Vec3::new(-0.5 * v, 0.0, 0.0))], eps).unwrap()
    }

    #[test]
    fn zero_potential_streams_freely() {
        let s = pair(0.01, 0.3, 2.0);
        let out = newton_flow(&s, &RadialPotential::zero(), 0.5, &FlowOptions::default()).unwrap();
        for (a, b) in s.particles.iter().zip(&out.particles) {
            assert!((b.x - (a.x + a.v * 0.5)).norm() < 1e-15);
            assert_eq!(a.v, b.v);
        }
    }

    #[test]
    fn contact_time_solves_quadratic() {
        let t = contact_time(&Vec3::new(3.0, 0.0, 0.0), &Vec3::new(-1.0, 0.0, 0.0), 1.0).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
        assert!(contact_time(&Vec3::new(3.0, 0.0, 0.0), &Vec3::new(1.0, 0.0, 0.0), 1.0).is_none());
        assert!(contact_time(&Vec3::new(3.0, 0.0, 0.0), &Vec3::new(0.0, -1.0, 0.0), 1.0).is_none());
    }

    #[test]
    fn hamiltonian_cases() {
        let s = pair(0.01, 0.3, 2.0);
        let pot = RadialPotential::smooth_junction(0.1, 20.0).unwrap();
        assert_eq!(hamiltonian(&s, &pot), s.kinetic_energy());
        let close =
            SystemState::new(vec![PhasePoint::new(Vec3::zeros(), Vec3::zeros()), PhasePoint::new(Vec3::new(0.005, 0.0, 0.0), Vec3::zeros())], 0.01).unwrap();
        assert_eq!(hamiltonian(&close, &pot), pot.phi(0.5));
    }

    #[test]
    fn collision_matches_two_body_rule() {
        let eps = 1e-2;
        let pot = RadialPotential::smooth_junction(0.1, 20.0).unwrap();
        let tb = TwoBody::new(pot.clone());
        let s = pair(eps, 0.4, 3.0);
        let r = newton_flow_report(&s, &pot, 4.0 * eps / 3.0 * 2.0, &FlowOptions::default()).unwrap();
        assert!(r.energy_drift < 1e-8, "{}", r.energy_drift);
        assert_eq!(r.contacts.len(), 1);
        let (p, p1) = (&s.particles[0], &s.particles[1]);
        let vrel = p.v - p1.v;
        let nu = Vec3::new(-(1.0f64 - 0.16).sqrt(), 0.4, 0.0);
        let w = tb.scattering_vector(&nu, &vrel).unwrap();
        let (a, b) = apply_collision_rule(&p.v, &p1.v, &w);
        assert!((r.state.particles[0].v - a).norm() < 1e-6, "{:?} vs {a:?}", r.state.particles[0].v);
        assert!((r.state.particles[1].v - b).norm() < 1e-6);
        assert!((r.state.momentum() - s.momentum()).norm() < 1e-13);
    }

    #[test]
    fn backward_flow_reverses() {
        let eps = 1e-2;
        let pot = RadialPotential::inverse_power(2.0).unwrap();
        let s = pair(eps, 0.2, 1.0);
        let f = newton_flow(&s, &pot, 0.05, &FlowOptions::default()).unwrap();
        let b = newton_flow(&f, &pot, -0.05, &FlowOptions::default()).unwrap();
        for (x, y) in s.particles.iter().zip(&b.particles) {
            assert!((x.x - y.x).norm() < 1e-6 && (x.v - y.v).norm() < 1e-6);
        }
        assert!(b.time.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        let p = PhasePoint::new(Vec3::zeros(), Vec3::zeros());
        assert!(matches!(SystemState::new(vec![p, p], 0.1), Err(Error::Precondition(_))));
        assert!(SystemState::new(vec![p], 0.0).is_err());
        let ps: Vec<PhasePoint> = (0..4).map(|i| PhasePoint::new(Vec3::new(i as f64, 0.0, 0.0), Vec3::zeros())).collect();
        assert!(SystemState::with_bg_scaling(ps.clone(), 0.5).is_ok());
        assert!(SystemState::with_bg_scaling(ps, 0.4).is_err());
    }

    #[test]
    fn units_round_trip() {
        let p = PhasePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.3, 0.2, 0.1));
        let m = convert_units(&p, 0.01, UnitDirection::MicroToMacro);
        assert_eq!(m.x.x, 0.01);
        assert_eq!(m.v, p.v);
        let back = convert_units(&m, 0.01, UnitDirection::MacroToMicro);
        assert!((back.x - p.x).norm() < 1e-15);
        assert_eq!(convert_time(2.0, 0.01, UnitDirection::MicroToMacro), 0.02);
    }

    #[test]
    fn grid_pairs_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ps: Vec<PhasePoint> = (0..200).map(|_| PhasePoint::new(Vec3::new(rng.gen(), rng.gen(), rng.gen()), Vec3::zeros())).collect();
        let eps = 0.08;
        let mut a = Vec::new();
        for_each_close_pair(&ps, eps, |i, k| a.push((i, k)));
        let mut b = Vec::new();
        for i in 0..ps.len() {
            for k in i + 1..ps.len() {
                if (ps[i].x - ps[k].x).norm() < eps {
                    b.push((i, k));
                }
            }
        }
        a.sort();
        assert_eq!(a, b);
    }
}
