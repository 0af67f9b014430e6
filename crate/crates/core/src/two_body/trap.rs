//! Circular-orbit curve in the `(L², V²)` plane and the set of pairs kept
//! away from it.

use serde::{Deserialize, Serialize};

use super::TwoBody;
use crate::error::{Error, Result};
use crate::potentials::RadialPotential;
use crate::Vec3;

/// One point of the curve: radius `y` of a circular orbit and the
/// `(X, Y) = (L², V²)` values that produce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapPoint {
    pub y: f64,
    pub x: f64,
    #[serde(rename = "Y")]
    pub yv: f64,
}

impl TrapPoint {
    pub fn is_physical(&self) -> bool {
        self.yv > 0.0 && self.x >= 0.0 && self.x <= self.yv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapCurve {
    pub points: Vec<TrapPoint>,
    /// Maximal index ranges `[a, b)` of consecutive physical points.
    pub physical_runs: Vec<(usize, usize)>,
}

impl TrapCurve {
    pub fn physical_is_empty(&self) -> bool {
        self.physical_runs.is_empty()
    }

    pub fn physical_points(&self) -> impl Iterator<Item = &TrapPoint> {
        self.physical_runs.iter().flat_map(move |&(a, b)| self.points[a..b].iter())
    }

    /// Length of the physical polylines.
    pub fn arc_length(&self) -> f64 {
        let mut s = 0.0;
        for &(a, b) in &self.physical_runs {
            for w in self.points[a..b].windows(2) {
                s += (w[1].x - w[0].x).hypot(w[1].yv - w[0].yv);
            }
        }
        s
    }

    /// Euclidean distance from `p = (X, Y)` to the physical polylines,
    /// `+∞` when there are none.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        let mut best = f64::INFINITY;
        for &(a, b) in &self.physical_runs {
            let run = &self.points[a..b];
            if run.len() == 1 {
                best = best.min((p.0 - run[0].x).hypot(p.1 - run[0].yv));
            }
            for w in run.windows(2) {
                best = best.min(segment_distance(p, (w[0].x, w[0].yv), (w[1].x, w[1].yv)));
            }
        }
        best
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}

/// Evaluates `X = 2Φ′(y)y³`, `Y = 4Φ(y) + 2Φ′(y)y` on `y_grid` and collects the
/// runs lying in `{Y > 0, 0 ≤ X ≤ Y}`.
pub fn trap_curve(potential: &RadialPotential, y_grid: &[f64]) -> TrapCurve {
    let points: Vec<TrapPoint> = y_grid
        .iter()
        .map(|&y| {
            let (phi, dphi) = if y > 0.0 && y < 1.0 {
                let (p, d, _) = potential.interior(y);
                (p, d)
            } else {
                (f64::NAN, f64::NAN)
            };
            TrapPoint { y, x: 2.0 * dphi * y * y * y, yv: 4.0 * phi + 2.0 * dphi * y }
        })
        .collect();
    let mut physical_runs = Vec::new();
    let mut start = None;
    for (i, p) in points.iter().enumerate() {
        match (p.is_physical(), start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                physical_runs.push((a, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        physical_runs.push((a, points.len()));
    }
    TrapCurve { points, physical_runs }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapDiagnostics {
    pub curve_points: Vec<(f64, f64)>,
    pub in_bad_set: bool,
    pub eta: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl TwoBody {
    /// Whether `(ν, V)` is excluded: `|V| ≥ K`, `(L², V²)` within `η` of the
    /// origin, or within `η` of the physical trap curve.
    pub fn bad_set_membership(&self, nu: &Vec3, v: &Vec3, eta: f64, k: f64) -> Result<bool> {
        if !(eta > 0.0) || !(k > 0.0) {
            return Err(Error::InvalidArgument(format!("eta and K must be positive, got {eta}, {k}")));
        }
        let v2 = v.norm_squared();
        if v2.sqrt() >= k {
            return Ok(true);
        }
        let l2 = nu.cross(v).norm_squared();
        if l2.hypot(v2) < eta {
            return Ok(true);
        }
        Ok(self.trap_curve_cached().distance((l2, v2)) < eta)
    }

    pub fn trap_diagnostics(&self, nu: &Vec3, v: &Vec3, eta: f64, k: f64) -> Result<TrapDiagnostics> {
        let in_bad_set = self.bad_set_membership(nu, v, eta, k)?;
        let curve_points = self.trap_curve_cached().physical_points().map(|p| (p.x, p.yv)).collect();
        Ok(TrapDiagnostics { curve_points, in_bad_set, eta, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
    }

    #[test]
    fn repulsive_curve_has_no_physical_part() {
        let c = trap_curve(&RadialPotential::inverse_power(1.0).unwrap(), &grid(50));
        assert!(c.physical_is_empty());
        for p in &c.points {
            assert!((p.x + 2.0 * p.y).abs() < 1e-12);
        }
        assert_eq!(c.distance((0.5, 1.0)), f64::INFINITY);
    }

    #[test]
    fn zero_curve_is_the_origin() {
        let c = trap_curve(&RadialPotential::zero(), &grid(20));
        assert!(c.points.iter().all(|p| p.x == 0.0 && p.yv == 0.0));
        assert!(c.physical_is_empty());
    }

    #[test]
    fn lennard_jones_has_finite_physical_curve() {
        let c = trap_curve(&RadialPotential::cutoff_lennard_jones(), &grid(200));
        assert!(!c.physical_is_empty());
        let len = c.arc_length();
        assert!(len.is_finite() && len > 0.0);
    }

    #[test]
    fn circular_orbit_is_stationary() {
        // On the curve the effective radial force L²/y³ − 2Φ′(y) vanishes and
        // the radial kinetic energy V²/2 − L²/2y² − 2Φ(y) is zero.
        let pot = RadialPotential::cutoff_lennard_jones();
        let c = trap_curve(&pot, &grid(200));
        for p in c.physical_points() {
            let (phi, dphi, _) = pot.interior(p.y);
            assert!((p.x / p.y.powi(3) - 2.0 * dphi).abs() < 1e-9 * dphi.abs().max(1.0));
            assert!((0.5 * p.yv - 0.5 * p.x / (p.y * p.y) - 2.0 * phi).abs() < 1e-9 * p.yv.max(1.0));
        }
    }

    #[test]
    fn segment_distance_cases() {
        assert_eq!(segment_distance((0.0, 1.0), (-1.0, 0.0), (1.0, 0.0)), 1.0);
        assert_eq!(segment_distance((3.0, 4.0), (0.0, 0.0), (0.0, 0.0)), 5.0);
        assert_eq!(segment_distance((2.0, 0.0), (-1.0, 0.0), (1.0, 0.0)), 1.0);
    }

    #[test]
    fn bad_set_basic_cases() {
        let tb = TwoBody::new(RadialPotential::inverse_power(1.0).unwrap());
        let nu = Vec3::new(-0.6, 0.8, 0.0);
        assert!(tb.bad_set_membership(&nu, &Vec3::new(20.0, 0.0, 0.0), 0.01, 10.0).unwrap());
        let eta: f64 = 1e-2;
        let small = Vec3::new((eta / 4.0).sqrt(), 0.0, 0.0);
        assert!(tb.bad_set_membership(&nu, &small, eta, 10.0).unwrap());
        let v = Vec3::new(1.5, 0.0, 0.0);
        assert!(!tb.bad_set_membership(&nu, &v, eta, 10.0).unwrap());
        let rho = nu.cross(&v).norm() / v.norm();
        assert!(tb.scattering_time(rho, v.norm()).unwrap().is_finite());
        assert!(tb.bad_set_membership(&nu, &v, 0.0, 10.0).is_err());
    }
}
