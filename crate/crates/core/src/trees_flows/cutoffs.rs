//! Configurations that avoid pointwise collisions, the overlap radius and
//! the energy and impact cutoffs.

use serde::{Deserialize, Serialize};

use super::flow::BackwardTrajectory;
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::two_body::TwoBody;

/// No pair collides pointwise under free streaming: every
/// `(x_i − x_k) ∧ (v_i − v_k)` is nonzero (normalized magnitude above 1e-12).
pub fn omega_j_membership(z: &[PhasePoint]) -> bool {
    for i in 0..z.len() {
        for k in i + 1..z.len() {
            let dx = z[i].x - z[k].x;
            let dv = z[i].v - z[k].v;
            let scale = dx.norm() * dv.norm();
            if !(scale > 0.0) || dx.cross(&dv).norm() / scale <= 1e-12 {
                return false;
            }
        }
    }
    true
}

/// `δ = ε^{1−μ} (log ε)²`.
pub fn default_delta(epsilon: f64, mu: f64) -> f64 {
    epsilon.powf(1.0 - mu) * epsilon.ln().powi(2)
}

/// Which test the impact cutoff applies at each creation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ImpactCutoff {
    /// `|(v_{j+r} − η_{k_r}(t_r)) ∧ ν_r| > ε^μ`.
    Wedge { mu: f64 },
    /// `(ν_r, v_{j+r} − η_{k_r}(t_r))` outside the bad set with parameters
    /// `η` and speed bound `K`, for potentials with trapped orbits.
    BadSet { eta: f64, k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffIndicators {
    pub energy_ok: bool,
    pub impact_ok: bool,
}

impl CutoffIndicators {
    pub fn both(&self) -> bool {
        self.energy_ok && self.impact_ok
    }
}

/// `β/2 Σ v_i² < |log ε|`.
pub fn energy_cutoff(velocities_sq: f64, epsilon: f64, beta: f64) -> bool {
    0.5 * beta * velocities_sq < epsilon.ln().abs()
}

/// Energy cutoff on the velocities `v_1 … v_{j+n}` (the data at time `t`
/// and the created velocities) and the impact cutoff at every creation of
/// `traj`, using the parent velocities that flow recorded.
pub fn cutoff_indicators(traj: &BackwardTrajectory, epsilon: f64, beta: f64, cutoff: &ImpactCutoff, tb: &TwoBody) -> Result<CutoffIndicators> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let first = &traj.segments[0].start;
    let vsq: f64 = first.iter().map(|p| p.v.norm_squared()).sum::<f64>() + traj.creations.iter().map(|c| c.child_before.norm_squared()).sum::<f64>();
    let energy_ok = energy_cutoff(vsq, epsilon, beta);
    let mut impact_ok = true;
    for c in &traj.creations {
        let v = c.relative_velocity();
        let ok = match *cutoff {
            ImpactCutoff::Wedge { mu } => v.cross(&c.nu).norm() > epsilon.powf(mu),
            ImpactCutoff::BadSet { eta, k } => !tb.bad_set_membership(&c.nu, &v, eta, k)?,
        };
        impact_ok &= ok;
    }
    Ok(CutoffIndicators { energy_ok, impact_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec3;

    #[test]
    fn membership_examples() {
        let a = PhasePoint::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        let b = PhasePoint::new(Vec3::zeros(), Vec3::zeros());
        assert!(omega_j_membership(&[a, b]));
        let c = PhasePoint::new(Vec3::new(2.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0));
        assert!(!omega_j_membership(&[c, b]));
        assert!(omega_j_membership(&[a]));
    }

    #[test]
    fn delta_formula() {
        let d = default_delta(1e-2, 0.1);
        assert!((d - 0.01f64.powf(0.9) * 0.01f64.ln().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn energy_cutoff_arithmetic() {
        assert!(energy_cutoff(0.01, 0.01, 1.0));
        assert!(!energy_cutoff(10.0, 0.01, 1.0));
        // |log ε| grows as ε shrinks.
        assert!(energy_cutoff(9.5, 0.005, 1.0) && !energy_cutoff(9.5, 0.01, 1.0));
    }
}
