//! Direct integration of the reduced central motion, used as a reference
//! for the quadrature formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{dp45_step, error_norm};
use crate::numerics::roots::brent;
use crate::potentials::RadialPotential;
use crate::Vec3;

/// Tolerances for [`oracle_integrate_central`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub rtol: f64,
    pub atol: f64,
    /// The orbit is abandoned after `max_time_factor / |V|`.
    pub max_time_factor: f64,
    /// Keep every accepted step in [`OracleResult::samples`].
    pub record: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-13, max_time_factor: 1e3, record: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleStatus {
    Exited,
    PossiblyTrapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub tau: f64,
    pub q: [f64; 3],
    pub qdot: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub samples: Vec<OracleSample>,
    /// arcsin ρ plus half the polar angle swept between entry and exit.
    pub theta: f64,
    pub turns: u32,
    /// Residence time inside the unit sphere, a lower bound when trapped.
    pub tau_star: f64,
    /// Smallest |q| reached.
    pub r_star: f64,
    /// Unit vector towards the first point of closest approach.
    pub omega: Vec3,
    pub nu_out: Vec3,
    pub v_out: Vec3,
    /// Largest relative deviation of `|q̇|²/2 + 2Φ(|q|)` from its initial value.
    pub energy_drift: f64,
}

type State = [f64; 6];

fn pos(y: &State) -> Vec3 {
    Vec3::new(y[0], y[1], y[2])
}
fn vel(y: &State) -> Vec3 {
    Vec3::new(y[3], y[4], y[5])
}

/// Integrates `q̈ = −2Φ′(|q|) q/|q|` from `q = ν`, `q̇ = V` until `|q|`
/// returns to 1, with a Dormand–Prince 5(4) scheme and event location.
pub fn oracle_integrate_central(potential: &RadialPotential, nu: &Vec3, v: &Vec3, opts: &OracleOptions) -> Result<OracleResult> {
    let speed = v.norm();
    if !(speed > 0.0) {
        return Err(Error::InvalidArgument("relative velocity must be nonzero".into()));
    }
    if nu.dot(v) > 1e-14 * speed {
        return Err(Error::Precondition("oracle needs an incoming pair (V·ν ≤ 0)".into()));
    }
    let vhat = v / speed;
    let perp = nu - vhat * nu.dot(&vhat);
    let rho = perp.norm().min(1.0);
    let a_axis = -vhat;
    let b_axis = if rho > 0.0 {
        perp / perp.norm()
    } else {
        let t = if vhat.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        (t - vhat * vhat.dot(&t)).normalize()
    };

    let rhs = |_t: f64, y: &State| -> State {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        // The interior formula is continued past r = 1 so that Runge–Kutta
        // stages overshooting the sphere see the one-sided force.
        let f = if r > 0.0 { -2.0 * potential.interior(r).1 / r } else { 0.0 };
        [y[3], y[4], y[5], f * y[0], f * y[1], f * y[2]]
    };
    let energy = |y: &State| {
        let r = pos(y).norm();
        0.5 * vel(y).norm_squared() + 2.0 * potential.phi(r)
    };
    let radius2 = |y: &State| y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let radial = |y: &State| y[0] * y[3] + y[1] * y[4] + y[2] * y[5];
    let angle = |y: &State| {
        let q = pos(y);
        q.dot(&b_axis).atan2(q.dot(&a_axis))
    };

    let mut y: State = [nu.x, nu.y, nu.z, v.x, v.y, v.z];
    let e0 = energy(&y);
    let e_scale = e0.abs().max(0.5 * speed * speed);
    let mut t = 0.0;
    let t_max = opts.max_time_factor / speed;
    let mut h = 1e-3 / speed;
    let mut samples = Vec::new();
    if opts.record {
        samples.push(OracleSample { tau: 0.0, q: [y[0], y[1], y[2]], qdot: [y[3], y[4], y[5]] });
    }
    let mut phi_prev = angle(&y);
    let mut swept = 0.0;
    let mut r_min = 1.0f64;
    let mut omega: Option<Vec3> = None;
    let mut drift = 0.0f64;
    let mut status = OracleStatus::PossiblyTrapped;

    let wrap = |d: f64| {
        use std::f64::consts::PI;
        let mut x = d;
        while x > PI {
            x -= 2.0 * PI;
        }
        while x <= -PI {
            x += 2.0 * PI;
        }
        x
    };

    if rho >= 1.0 {
        return Ok(OracleResult {
            status: OracleStatus::Exited,
            samples,
            theta: std::f64::consts::FRAC_PI_2,
            turns: 0,
            tau_star: 0.0,
            r_star: 1.0,
            omega: *nu,
            nu_out: *nu,
            v_out: *v,
            energy_drift: 0.0,
        });
    }

    let mut steps = 0usize;
    while t < t_max {
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::Numerical("oracle exceeded the step limit".into()));
        }
        let h_try = h.min(t_max - t);
        let (y_new, err) = dp45_step(&rhs, t, &y, h_try);
        let en = error_norm(&err, &y, &y_new, opts.atol, opts.rtol);
        if !(en <= 1.0) {
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).max(0.1) } else { 0.1 };
            h = h_try * fac;
            if h < 1e-18 / speed {
                return Err(Error::Numerical("oracle step size underflow".into()));
            }
            continue;
        }

        // Closest approach: q·q̇ changes sign from negative to nonnegative.
        if omega.is_none() && radial(&y) < 0.0 && radial(&y_new) >= 0.0 {
            let g = |s: f64| radial(&dp45_step(&rhs, t, &y, s).0);
            let s = brent(g, 0.0, h_try, radial(&y), radial(&y_new), 1e-15 * h_try.max(1e-300));
            let ya = dp45_step(&rhs, t, &y, s).0;
            omega = Some(pos(&ya).normalize());
            r_min = r_min.min(pos(&ya).norm());
        }

        // Exit: |q|² − 1 changes sign from negative to nonnegative.
        let g0 = radius2(&y) - 1.0;
        let g1 = radius2(&y_new) - 1.0;
        if t > 0.0 && g0 < 0.0 && g1 >= 0.0 {
            let g = |s: f64| radius2(&dp45_step(&rhs, t, &y, s).0) - 1.0;
            let s = brent(g, 0.0, h_try, g0, g1, 1e-15 * h_try);
            let ye = dp45_step(&rhs, t, &y, s).0;
            swept += wrap(angle(&ye) - phi_prev);
            t += s;
            y = ye;
            if opts.record {
                samples.push(OracleSample { tau: t, q: [y[0], y[1], y[2]], qdot: [y[3], y[4], y[5]] });
            }
            status = OracleStatus::Exited;
            break;
        }

        t += h_try;
        y = y_new;
        let ph = angle(&y);
        swept += wrap(ph - phi_prev);
        phi_prev = ph;
        r_min = r_min.min(pos(&y).norm());
        if radius2(&y) < 1.0 {
            drift = drift.max((energy(&y) - e0).abs() / e_scale);
        }
        if opts.record {
            samples.push(OracleSample { tau: t, q: [y[0], y[1], y[2]], qdot: [y[3], y[4], y[5]] });
        }
        let fac = if en > 0.0 { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) } else { 5.0 };
        h = h_try * fac;
        // A step that starts at the sphere must first move inside.
        if t == h_try && g1 >= 0.0 {
            return Err(Error::Numerical("oracle failed to enter the unit sphere".into()));
        }
    }

    let theta = rho.asin() + 0.5 * swept;
    let omega = omega.unwrap_or_else(|| pos(&y).normalize());
    Ok(OracleResult {
        status,
        samples,
        theta,
        turns: (theta / std::f64::consts::PI).floor().max(0.0) as u32,
        tau_star: t,
        r_star: r_min,
        omega,
        nu_out: pos(&y),
        v_out: vel(&y),
        energy_drift: drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_body::TwoBody;

    fn incoming(rho: f64, speed: f64) -> (Vec3, Vec3) {
        let nu = Vec3::new(-(1.0 - rho * rho).sqrt(), rho, 0.0);
        (nu, Vec3::new(speed, 0.0, 0.0))
    }

    #[test]
    fn zero_potential_is_a_chord() {
        let (nu, v) = incoming(0.6, 2.0);
        let o = oracle_integrate_central(&RadialPotential::zero(), &nu, &v, &OracleOptions::default()).unwrap();
        assert_eq!(o.status, OracleStatus::Exited);
        assert!((o.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((o.tau_star - 0.8).abs() < 1e-10);
        assert!((o.r_star - 0.6).abs() < 1e-10);
        assert!((o.v_out - v).norm() < 1e-10);
    }

    #[test]
    fn energy_drift_is_small() {
        let (nu, v) = incoming(0.4, 3.0);
        let pot = RadialPotential::smooth_junction(0.1, 20.0).unwrap();
        let o = oracle_integrate_central(&pot, &nu, &v, &OracleOptions::default()).unwrap();
        assert!(o.energy_drift < 1e-10, "{}", o.energy_drift);
    }

    #[test]
    fn matches_quadrature_for_inverse_power() {
        let pot = RadialPotential::inverse_power(4.0).unwrap();
        let tb = TwoBody::new(pot.clone());
        let speed = 2f64.sqrt();
        let (nu, v) = incoming(0.5, speed);
        let o = oracle_integrate_central(&pot, &nu, &v, &OracleOptions::default()).unwrap();
        assert!((o.theta - tb.theta(0.5, speed).unwrap()).abs() < 1e-6);
        assert!((o.tau_star - tb.scattering_time(0.5, speed).unwrap()).abs() < 1e-6);
        let w = tb.scattering_vector(&nu, &v).unwrap();
        assert!((o.omega - w).norm() < 1e-6);
    }

    #[test]
    fn records_samples_on_request() {
        let (nu, v) = incoming(0.3, 1.0);
        let opts = OracleOptions { record: true, ..Default::default() };
        let o = oracle_integrate_central(&RadialPotential::inverse_power(1.0).unwrap(), &nu, &v, &opts).unwrap();
        assert!(o.samples.len() > 10);
        assert_eq!(o.samples.last().unwrap().tau, o.tau_star);
    }
}
