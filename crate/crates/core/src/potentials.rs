//! Radial pair potentials with compact support on `r < 1`.
//!
//! Distances are microscopic: the interaction range is exactly 1. Every
//! family returns exactly zero value and derivatives for `r >= 1`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::Vec3;

/// Parameters selecting a potential family.
///
/// Serializes with a `family` tag, so a flat configuration document such as
///
/// ```toml
/// family = "smooth-junction"
/// delta = 0.1
/// k = 20
/// ```
///
/// deserializes directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// Φ ≡ 0.
    Zero,
    /// Φ(r) = r^{-k} - 1.
    InversePowerTruncated { k: f64 },
    /// A power-law core glued at `1 - delta` to the flat tail `exp(-1/(1-r))`.
    SmoothJunction { delta: f64, k: f64 },
    /// Φ(r) = 1 - eps·tan((arctan(1/eps) + π/2) r - π/2), a steep wall close to a step.
    ArctanWall { eps: f64 },
    /// A power-law core inside `delta` and the linear ramp `delta (1 - r)` outside.
    PiecewiseWell { delta: f64, k: f64 },
    /// Shifted-force 12-6 Lennard-Jones, rescaled to well depth `depth`.
    CutoffLennardJones {
        #[serde(default = "default_lj_sigma")]
        sigma: f64,
        #[serde(default = "default_lj_depth")]
        depth: f64,
    },
    /// Monotone cubic interpolation of tabulated values; the last radius must be 1.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

fn default_lj_sigma() -> f64 {
    0.4
}
fn default_lj_depth() -> f64 {
    1.0
}

impl PotentialSpec {
    /// Short family name as used on the command line.
    pub fn family_name(&self) -> &'static str {
        match self {
            PotentialSpec::Zero => "zero",
            PotentialSpec::InversePowerTruncated { .. } => "inverse-power-truncated",
            PotentialSpec::SmoothJunction { .. } => "smooth-junction",
            PotentialSpec::ArctanWall { .. } => "arctan-wall",
            PotentialSpec::PiecewiseWell { .. } => "piecewise-well",
            PotentialSpec::CutoffLennardJones { .. } => "cutoff-lennard-jones",
            PotentialSpec::Tabulated { .. } => "tabulated",
        }
    }
}

/// Structural flags of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    /// Φ′ ≤ 0 on (0, 1).
    pub repulsive_monotone: bool,
    /// Φ → +∞ as r → 0⁺.
    pub diverges_at_origin: bool,
    /// Φ′(1⁻) = 0.
    pub smooth_at_boundary: bool,
}

/// Value and first two derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
    /// True when `r` is a radius where a derivative jumps; the values are
    /// then the one-sided limits from below.
    pub at_jump: bool,
}

#[derive(Debug, Clone)]
struct Table {
    r: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Shape {
    Zero,
    InversePower { k: f64 },
    SmoothJunction { delta: f64, k: f64, scale: f64, a: f64, b: f64 },
    ArctanWall { eps: f64, a: f64 },
    PiecewiseWell { delta: f64, k: f64, c: f64 },
    LennardJones { s6: f64, s12: f64, v1: f64, d1: f64, scale: f64 },
    Tabulated(Arc<Table>),
}

/// A radial, compactly supported pair potential.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    spec: PotentialSpec,
    shape: Shape,
    flags: ClassFlags,
    jumps: Vec<f64>,
}

fn lj(s6: f64, s12: f64, r: f64) -> (f64, f64, f64) {
    let r2 = r * r;
    let r6 = r2 * r2 * r2;
    let r12 = r6 * r6;
    let v = 4.0 * (s12 / r12 - s6 / r6);
    let d = 4.0 * (-12.0 * s12 / (r12 * r) + 6.0 * s6 / (r6 * r));
    let dd = 4.0 * (156.0 * s12 / (r12 * r2) - 42.0 * s6 / (r6 * r2));
    (v, d, dd)
}

fn pchip_slopes(r: &[f64], y: &[f64]) -> Vec<f64> {
    let n = r.len();
    let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    let mut m0 = ((2.0 * h[0] + h[1]) * d[0] - h[0] * d[1]) / (h[0] + h[1]);
    if m0.signum() != d[0].signum() || d[0] == 0.0 {
        m0 = 0.0;
    } else if d[0].signum() != d[1].signum() && m0.abs() > 3.0 * d[0].abs() {
        m0 = 3.0 * d[0];
    }
    m[0] = m0;
    m[n - 1] = 0.0;
    m
}

fn hermite(t: &Table, r: f64) -> (f64, f64, f64) {
    let n = t.r.len();
    if r <= t.r[0] {
        return (t.y[0] + t.m[0] * (r - t.r[0]), t.m[0], 0.0);
    }
    if r >= t.r[n - 1] {
        return (0.0, 0.0, 0.0);
    }
    // Segment i with r in (r_i, r_{i+1}]; knots belong to the segment below.
    let i = match t.r.binary_search_by(|x| x.total_cmp(&r)) {
        Ok(i) => i - 1,
        Err(i) => i - 1,
    };
    let h = t.r[i + 1] - t.r[i];
    let s = (r - t.r[i]) / h;
    let (y0, y1, m0, m1) = (t.y[i], t.y[i + 1], t.m[i] * h, t.m[i + 1] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1;
    let dv = (6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * m1;
    let ddv = (12.0 * s - 6.0) * y0 + (6.0 * s - 4.0) * m0 + (-12.0 * s + 6.0) * y1 + (6.0 * s - 2.0) * m1;
    (v, dv / h, ddv / (h * h))
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

fn unit_open(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in (0, 1), got {x}")))
    }
}

impl RadialPotential {
    /// Builds a potential from a [`PotentialSpec`], validating parameters.
    pub fn new(spec: PotentialSpec) -> Result<Self> {
        let (shape, flags, jumps) = match &spec {
            PotentialSpec::Zero => (Shape::Zero, ClassFlags { repulsive_monotone: true, diverges_at_origin: false, smooth_at_boundary: true }, vec![]),
            &PotentialSpec::InversePowerTruncated { k } => {
                positive("k", k)?;
                (Shape::InversePower { k }, ClassFlags { repulsive_monotone: true, diverges_at_origin: true, smooth_at_boundary: false }, vec![])
            }
            &PotentialSpec::SmoothJunction { delta, k } => {
                unit_open("delta", delta)?;
                positive("k", k)?;
                let scale = (-1.0 / delta).exp();
                let a = (1.0 - delta).powf(k + 1.0) / (delta * delta * k);
                let b = 1.0 - (1.0 - delta) / (delta * delta * k);
                (
                    Shape::SmoothJunction { delta, k, scale, a, b },
                    ClassFlags { repulsive_monotone: true, diverges_at_origin: true, smooth_at_boundary: true },
                    vec![1.0 - delta],
                )
            }
            &PotentialSpec::ArctanWall { eps } => {
                positive("eps", eps)?;
                let a = (1.0 / eps).atan() + std::f64::consts::FRAC_PI_2;
                (Shape::ArctanWall { eps, a }, ClassFlags { repulsive_monotone: true, diverges_at_origin: true, smooth_at_boundary: false }, vec![])
            }
            &PotentialSpec::PiecewiseWell { delta, k } => {
                unit_open("delta", delta)?;
                positive("k", k)?;
                let c = delta - delta * delta * (1.0 + 1.0 / k);
                (
                    Shape::PiecewiseWell { delta, k, c },
                    ClassFlags { repulsive_monotone: true, diverges_at_origin: true, smooth_at_boundary: false },
                    vec![delta],
                )
            }
            &PotentialSpec::CutoffLennardJones { sigma, depth } => {
                unit_open("sigma", sigma)?;
                positive("depth", depth)?;
                let s6 = sigma.powi(6);
                let s12 = s6 * s6;
                let (v1, d1, _) = lj(s6, s12, 1.0);
                // The shifted-force minimum sits between the LJ minimum and the
                // inflection point, where the LJ slope climbs back to d1.
                let r_infl = (156.0f64 / 42.0).powf(1.0 / 6.0) * sigma;
                let g = |r: f64| lj(s6, s12, r).1 - d1;
                let lo = 2f64.powf(1.0 / 6.0) * sigma;
                let r_min = brent(g, lo, r_infl, g(lo), g(r_infl), 1e-15);
                let well = lj(s6, s12, r_min).0 - v1 - (r_min - 1.0) * d1;
                if well >= 0.0 {
                    return Err(Error::Config(format!("sigma = {sigma} leaves no attractive well inside the range")));
                }
                (
                    Shape::LennardJones { s6, s12, v1, d1, scale: depth / -well },
                    ClassFlags { repulsive_monotone: false, diverges_at_origin: true, smooth_at_boundary: true },
                    vec![],
                )
            }
            PotentialSpec::Tabulated { radii, values } => {
                if radii.len() < 3 || radii.len() != values.len() {
                    return Err(Error::Config("tabulated potential needs at least 3 radii and matching values".into()));
                }
                if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("tabulated radii must be positive and strictly increasing".into()));
                }
                if *radii.last().unwrap() != 1.0 || *values.last().unwrap() != 0.0 {
                    return Err(Error::Config("tabulated potential must end at radius 1 with value 0".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("tabulated values must be finite".into()));
                }
                let m = pchip_slopes(radii, values);
                let monotone = values.windows(2).all(|w| w[1] <= w[0]);
                let jumps = radii[..radii.len() - 1].to_vec();
                (
                    Shape::Tabulated(Arc::new(Table { r: radii.clone(), y: values.clone(), m })),
                    ClassFlags { repulsive_monotone: monotone, diverges_at_origin: false, smooth_at_boundary: true },
                    jumps,
                )
            }
        };
        Ok(Self { spec, shape, flags, jumps })
    }

    pub fn zero() -> Self {
        Self::new(PotentialSpec::Zero).expect("valid")
    }

    pub fn inverse_power(k: f64) -> Result<Self> {
        Self::new(PotentialSpec::InversePowerTruncated { k })
    }

    pub fn smooth_junction(delta: f64, k: f64) -> Result<Self> {
        Self::new(PotentialSpec::SmoothJunction { delta, k })
    }

    pub fn arctan_wall(eps: f64) -> Result<Self> {
        Self::new(PotentialSpec::ArctanWall { eps })
    }

    pub fn piecewise_well(delta: f64, k: f64) -> Result<Self> {
        Self::new(PotentialSpec::PiecewiseWell { delta, k })
    }

    pub fn cutoff_lennard_jones() -> Self {
        Self::new(PotentialSpec::CutoffLennardJones { sigma: default_lj_sigma(), depth: default_lj_depth() }).expect("valid")
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(PotentialSpec::Tabulated { radii, values })
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn flags(&self) -> ClassFlags {
        self.flags
    }

    /// Radii in (0, 1) where some derivative is discontinuous.
    pub fn jump_radii(&self) -> &[f64] {
        &self.jumps
    }

    /// Φ, Φ′, Φ″ at `r`, zero outside the support.
    pub fn evaluate(&self, r: f64) -> Result<PotentialValue> {
        if !(r > 0.0) {
            return Err(Error::Domain(r));
        }
        if r >= 1.0 {
            return Ok(PotentialValue { phi: 0.0, dphi: 0.0, d2phi: 0.0, at_jump: false });
        }
        let (phi, dphi, d2phi) = self.interior(r);
        Ok(PotentialValue { phi, dphi, d2phi, at_jump: self.jumps.contains(&r) })
    }

    /// Φ(r) for any r, with +∞ at r ≤ 0 for diverging families.
    pub fn phi(&self, r: f64) -> f64 {
        if r >= 1.0 {
            0.0
        } else if r <= 0.0 {
            if self.flags.diverges_at_origin {
                f64::INFINITY
            } else {
                self.interior(0.0).0
            }
        } else {
            self.interior(r).0
        }
    }

    /// Φ′(1⁻), the one-sided slope at the edge of the support.
    pub fn boundary_slope(&self) -> f64 {
        self.interior(1.0).1
    }

    /// The innermost-to-outermost piecewise formula, continued analytically
    /// past r = 1. Inside the support this agrees with [`Self::evaluate`]; at a
    /// jump radius it gives the limit from below.
    pub fn interior(&self, r: f64) -> (f64, f64, f64) {
        match &self.shape {
            Shape::Zero => (0.0, 0.0, 0.0),
            &Shape::InversePower { k } => {
                let p = r.powf(-k);
                (p - 1.0, -k * p / r, k * (k + 1.0) * p / (r * r))
            }
            &Shape::SmoothJunction { delta, k, scale, a, b } => {
                if r <= 1.0 - delta {
                    let p = r.powf(-k);
                    (scale * (a * p + b), -scale * k * a * p / r, scale * k * (k + 1.0) * a * p / (r * r))
                } else if r < 1.0 {
                    let u = 1.0 - r;
                    let e = (-1.0 / u).exp();
                    let u2 = u * u;
                    (e, -e / u2, e * (1.0 - 2.0 * u) / (u2 * u2))
                } else {
                    (0.0, 0.0, 0.0)
                }
            }
            &Shape::ArctanWall { eps, a } => {
                let x = a * r;
                let (s, c) = x.sin_cos();
                let cot = c / s;
                let csc2 = 1.0 / (s * s);
                (eps * cot + 1.0, -eps * a * csc2, 2.0 * eps * a * a * csc2 * cot)
            }
            &Shape::PiecewiseWell { delta, k, c } => {
                if r <= delta {
                    let q = delta.powf(k + 2.0) * r.powf(-k);
                    (q / k + c, -q / r, (k + 1.0) * q / (r * r))
                } else {
                    (delta * (1.0 - r), -delta, 0.0)
                }
            }
            &Shape::LennardJones { s6, s12, v1, d1, scale } => {
                let (v, d, dd) = lj(s6, s12, r);
                (scale * (v - v1 - (r - 1.0) * d1), scale * (d - d1), scale * dd)
            }
            Shape::Tabulated(t) => hermite(t, r),
        }
    }
}

/// Outcome of [`check_monotonicity_condition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub holds: bool,
    pub violations: Vec<f64>,
}

/// Checks r Φ″(r) + 2 Φ′(r) ≥ 0 on every grid radius.
///
/// When the inequality holds everywhere the deflection angle increases
/// strictly with the impact parameter.
pub fn check_monotonicity_condition(potential: &RadialPotential, grid: &[f64]) -> Result<MonotonicityReport> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("grid must be nonempty".into()));
    }
    let mut violations = Vec::new();
    for &r in grid {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!("grid radius {r} outside (0, 1)")));
        }
        let p = potential.evaluate(r)?;
        if r * p.d2phi + 2.0 * p.dphi < 0.0 {
            violations.push(r);
        }
    }
    Ok(MonotonicityReport { holds: violations.is_empty(), violations })
}

/// Monte Carlo lower bound on the stability constant.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityEstimate {
    /// max(0, -min U/j) over the sampled configurations.
    pub constant: f64,
    /// Smallest sampled energy per particle.
    pub min_energy_per_particle: f64,
    /// Configuration attaining the minimum (empty when short-circuited).
    pub minimizer: Vec<Vec3>,
}

/// Samples `trials` configurations of `j` particles uniformly in a box of
/// side 3 and reports the deepest energy per particle.
pub fn estimate_stability_constant(potential: &RadialPotential, j: usize, trials: usize, seed: u64) -> Result<StabilityEstimate> {
    if j < 2 || trials == 0 {
        return Err(Error::InvalidArgument("need j >= 2 and trials >= 1".into()));
    }
    if potential.flags().repulsive_monotone {
        // Φ is nonincreasing and vanishes at 1, so it is nonnegative.
        return Ok(StabilityEstimate { constant: 0.0, min_energy_per_particle: 0.0, minimizer: vec![] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut best_cfg = Vec::new();
    let mut cfg = vec![Vec3::zeros(); j];
    for _ in 0..trials {
        for q in cfg.iter_mut() {
            *q = Vec3::new(rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0);
        }
        let mut u = 0.0;
        for a in 0..j {
            for b in a + 1..j {
                u += potential.phi((cfg[a] - cfg[b]).norm());
            }
        }
        let e = u / j as f64;
        if e < best {
            best = e;
            best_cfg.clone_from(&cfg);
        }
    }
    Ok(StabilityEstimate { constant: (-best).max(0.0), min_energy_per_particle: best, minimizer: best_cfg })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<RadialPotential> {
        vec![
            RadialPotential::zero(),
            RadialPotential::inverse_power(1.0).unwrap(),
            RadialPotential::inverse_power(4.0).unwrap(),
            RadialPotential::smooth_junction(0.1, 20.0).unwrap(),
            RadialPotential::arctan_wall(0.1).unwrap(),
            RadialPotential::piecewise_well(0.1, 4.0).unwrap(),
            RadialPotential::cutoff_lennard_jones(),
            RadialPotential::tabulated(vec![0.2, 0.5, 0.8, 1.0], vec![3.0, 1.0, 0.2, 0.0]).unwrap(),
        ]
    }

    #[test]
    fn zero_potential_is_zero() {
        let p = RadialPotential::zero().evaluate(0.5).unwrap();
        assert_eq!((p.phi, p.dphi, p.d2phi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn inverse_power_closed_form() {
        let p = RadialPotential::inverse_power(1.0).unwrap().evaluate(0.5).unwrap();
        assert!((p.phi - 1.0).abs() < 1e-15);
        assert!((p.dphi + 4.0).abs() < 1e-14);
        assert!((p.d2phi - 16.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_junction_tail_value() {
        let p = RadialPotential::smooth_junction(0.1, 20.0).unwrap().evaluate(0.95).unwrap();
        let e = (-20.0f64).exp();
        assert!((p.phi - e).abs() < 1e-12 * e);
        assert!((p.phi - 2.061_153_622_438_558e-9).abs() < 1e-20);
        assert!((p.dphi + e / 0.0025).abs() < 1e-18);
        assert!((p.d2phi - e * 0.9 / 0.05f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn smooth_junction_is_c1_at_the_glue_radius() {
        let pot = RadialPotential::smooth_junction(0.1, 20.0).unwrap();
        let below = pot.interior(0.9);
        let above = pot.interior(0.9 + 1e-12);
        assert!((below.0 - above.0).abs() < 1e-13);
        assert!((below.1 - above.1).abs() / below.1.abs() < 1e-9);
        assert!(pot.evaluate(0.9).unwrap().at_jump);
    }

    #[test]
    fn piecewise_well_is_c1_at_delta() {
        let pot = RadialPotential::piecewise_well(0.1, 4.0).unwrap();
        let below = pot.interior(0.1);
        let above = pot.interior(0.1 + 1e-13);
        assert!((below.0 - 0.09).abs() < 1e-15);
        assert!((below.1 + 0.1).abs() < 1e-12);
        assert!((above.1 + 0.1).abs() < 1e-15);
        assert!((below.2 - 5.0).abs() < 1e-9);
        assert_eq!(above.2, 0.0);
    }

    #[test]
    fn lennard_jones_has_unit_depth_and_vanishing_slope() {
        let pot = RadialPotential::cutoff_lennard_jones();
        let (v1, d1, _) = pot.interior(1.0);
        assert!(v1.abs() < 1e-15 && d1.abs() < 1e-15);
        let min = (1..10_000).map(|i| pot.phi(0.3 + 0.7 * i as f64 / 10_000.0)).fold(f64::INFINITY, f64::min);
        assert!((min + 1.0).abs() < 1e-6, "{min}");
    }

    #[test]
    fn compact_support_everywhere() {
        for pot in catalog() {
            for r in [1.0, 1.0 + 1e-15, 1.5, 10.0, 1e300] {
                let p = pot.evaluate(r).unwrap();
                assert_eq!((p.phi, p.dphi, p.d2phi), (0.0, 0.0, 0.0), "{:?}", pot.spec());
            }
        }
    }

    #[test]
    fn nonpositive_radius_is_a_domain_error() {
        for pot in catalog() {
            assert_eq!(pot.evaluate(0.0), Err(Error::Domain(0.0)));
            assert!(pot.evaluate(-1.0).is_err());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for pot in catalog() {
            for i in 1..200 {
                let r = 0.05 + 0.9 * i as f64 / 200.0;
                let near_jump = pot.jump_radii().iter().any(|&j| (r - j).abs() < 1e-4);
                if near_jump {
                    continue;
                }
                let h = 1e-6 * r;
                let p = pot.evaluate(r).unwrap();
                let fd1 = (pot.phi(r + h) - pot.phi(r - h)) / (2.0 * h);
                let fd2 = (pot.evaluate(r + h).unwrap().dphi - pot.evaluate(r - h).unwrap().dphi) / (2.0 * h);
                let s1 = p.dphi.abs().max(p.phi.abs()).max(1e-12);
                let s2 = p.d2phi.abs().max(p.dphi.abs()).max(1e-12);
                assert!((fd1 - p.dphi).abs() <= 1e-6 * s1, "{:?} r={r} {fd1} {}", pot.spec(), p.dphi);
                assert!((fd2 - p.d2phi).abs() <= 1e-6 * s2, "{:?} r={r} {fd2} {}", pot.spec(), p.d2phi);
            }
        }
    }

    #[test]
    fn repulsive_families_are_nonincreasing() {
        for pot in catalog().into_iter().filter(|p| p.flags().repulsive_monotone) {
            for i in 1..1000 {
                let r = i as f64 / 1000.0;
                assert!(pot.evaluate(r).unwrap().dphi <= 0.0, "{:?} r={r}", pot.spec());
            }
        }
    }

    #[test]
    fn diverging_families_blow_up() {
        for pot in catalog().into_iter().filter(|p| p.flags().diverges_at_origin) {
            assert!(pot.phi(1e-6) > 1e3, "{:?}", pot.spec());
        }
    }

    #[test]
    fn boundary_slopes() {
        assert_eq!(RadialPotential::inverse_power(2.0).unwrap().boundary_slope(), -2.0);
        assert_eq!(RadialPotential::smooth_junction(0.1, 20.0).unwrap().boundary_slope(), 0.0);
        assert!((RadialPotential::piecewise_well(0.1, 4.0).unwrap().boundary_slope() + 0.1).abs() < 1e-15);
        let aw = RadialPotential::arctan_wall(0.1).unwrap().boundary_slope();
        let a = 10f64.atan() + std::f64::consts::FRAC_PI_2;
        assert!((aw + 0.1 * a * (1.0 + 100.0)).abs() < 1e-10);
    }

    #[test]
    fn monotonicity_condition_examples() {
        let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 101.0).collect();
        let ipt = RadialPotential::inverse_power(2.0).unwrap();
        assert!(check_monotonicity_condition(&ipt, &grid).unwrap().holds);
        let aw = RadialPotential::arctan_wall(0.1).unwrap();
        let rep = check_monotonicity_condition(&aw, &grid).unwrap();
        assert!(!rep.holds && !rep.violations.is_empty());
        assert!(check_monotonicity_condition(&RadialPotential::zero(), &grid).unwrap().holds);
        let pw = RadialPotential::piecewise_well(0.1, 4.0).unwrap();
        assert!(!check_monotonicity_condition(&pw, &grid).unwrap().holds);
        let sj = RadialPotential::smooth_junction(0.1, 20.0).unwrap();
        assert!(check_monotonicity_condition(&sj, &grid).unwrap().holds);
    }

    #[test]
    fn monotonicity_condition_rejects_bad_grid() {
        let pot = RadialPotential::zero();
        assert!(check_monotonicity_condition(&pot, &[]).is_err());
        assert!(check_monotonicity_condition(&pot, &[1.2]).is_err());
    }

    #[test]
    fn stability_constant_examples() {
        let ipt = RadialPotential::inverse_power(1.0).unwrap();
        assert_eq!(estimate_stability_constant(&ipt, 5, 10, 1).unwrap().constant, 0.0);
        assert_eq!(estimate_stability_constant(&RadialPotential::zero(), 10, 10, 1).unwrap().constant, 0.0);
        let lj = RadialPotential::cutoff_lennard_jones();
        let est = estimate_stability_constant(&lj, 3, 100_000, 42).unwrap();
        assert!(est.constant > 0.0);
        // Three particles can at best sit pairwise at the well bottom.
        assert!(est.constant <= 1.0 + 1e-12);
        assert_eq!(est.minimizer.len(), 3);
    }

    #[test]
    fn tabulated_validation() {
        assert!(RadialPotential::tabulated(vec![0.5, 1.0], vec![1.0, 0.0]).is_err());
        assert!(RadialPotential::tabulated(vec![0.2, 0.5, 0.9], vec![1.0, 0.5, 0.0]).is_err());
        assert!(RadialPotential::tabulated(vec![0.2, 0.5, 1.0], vec![1.0, 0.5, 0.1]).is_err());
        let t = RadialPotential::tabulated(vec![0.2, 0.5, 1.0], vec![1.0, 0.5, 0.0]).unwrap();
        assert!((t.phi(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(t.boundary_slope(), 0.0);
    }

    #[test]
    fn spec_roundtrips_through_toml() {
        let doc = "family = \"smooth-junction\"\ndelta = 0.1\nk = 20.0\n";
        let spec: PotentialSpec = toml::from_str(doc).unwrap();
        assert_eq!(spec, PotentialSpec::SmoothJunction { delta: 0.1, k: 20.0 });
        let lj: PotentialSpec = toml::from_str("family = \"cutoff-lennard-jones\"").unwrap();
        assert_eq!(lj, PotentialSpec::CutoffLennardJones { sigma: 0.4, depth: 1.0 });
        assert!(toml::from_str::<PotentialSpec>("family = \"arctan-wall\"\neps = 0.1\nk = 1.0").is_err());
    }

    #[test]
    fn invalid_parameters_are_config_errors() {
        assert!(matches!(RadialPotential::smooth_junction(1.5, 20.0), Err(Error::Config(_))));
        assert!(matches!(RadialPotential::inverse_power(-1.0), Err(Error::Config(_))));
        assert!(matches!(RadialPotential::arctan_wall(0.0), Err(Error::Config(_))));
    }
}
