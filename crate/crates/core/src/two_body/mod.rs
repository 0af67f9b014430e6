//! Reduced two-body scattering.
//!
//! The relative coordinate `q = q₂ - q₁` of two unit-mass particles obeys
//! `q̈ = -2∇Φ(|q|)`, with conserved energy `|q̇|²/2 + 2Φ(|q|)`. A particle
//! enters the unit sphere at `ν` with velocity `V`; `ρ = |ν ∧ V|/|V|` is the
//! impact parameter and `L = ρ|V|` the angular momentum.
//!
//! Writing `w(r) = 4Φ(r)/|V|²`, the turning point `r*` is the largest root of
//! `1 - w(r) - ρ²/r² = 0`. The deflection angle Θ is computed from the
//! regular integral
//!
//! ```text
//! Θ = arcsin ρ + ∫_{arcsin ρ}^{π/2} sin φ / D(y(φ)) dφ,   D(y) = y - ρ w′(ρ/y) / (2y²),
//! ```
//!
//! where `y(φ)` solves `w(ρ/y) + y² = sin²φ`. The scattering vector
//! `ω = cos Θ (-V̂) + sin Θ ê` points from the centre to the turning point.

mod geometry;
mod oracle;
mod trap;

use std::sync::OnceLock;

pub use geometry::{apply_collision_rule, measure_jacobian, reflect_through};
pub use oracle::{oracle_integrate_central, OracleOptions, OracleResult, OracleSample, OracleStatus};
pub use trap::{trap_curve, TrapCurve, TrapDiagnostics, TrapPoint};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::roots::brent;
use crate::potentials::RadialPotential;

/// Tolerances of the two-body solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyOptions {
    pub quad: QuadOptions,
    /// Number of scan points used to bracket the outermost turning point of
    /// potentials that are not repulsive.
    pub scan_points: usize,
    /// Absolute tolerance on the turning point.
    pub r_tol: f64,
}

impl Default for TwoBodyOptions {
    fn default() -> Self {
        Self { quad: QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 2000 }, scan_points: 4096, r_tol: 1e-14 }
    }
}

impl TwoBodyOptions {
    /// Looser tolerances for Monte Carlo inner loops (absolute error ~1e-9).
    pub fn fast() -> Self {
        Self { quad: QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_panels: 500 }, scan_points: 1024, r_tol: 1e-13 }
    }
}

/// Outermost root of the radial energy equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub r_star: f64,
    /// The root is (numerically) a double root: the orbit is close to an
    /// unstable circular orbit.
    pub tangency: bool,
}

/// One complete scattering solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub rho: f64,
    pub speed: f64,
    pub r_star: f64,
    pub theta: f64,
    /// χ = π − 2Θ folded into (−π, π]; positive values deflect away from the centre.
    pub chi: f64,
    pub tau_star: f64,
    pub turns: u32,
}

/// Fold an angle into (−π, π].
pub(crate) fn fold_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Two-body solver bound to one potential.
#[derive(Debug, Clone)]
pub struct TwoBody {
    potential: RadialPotential,
    opts: TwoBodyOptions,
    trap: OnceLock<TrapCurve>,
}

impl TwoBody {
    pub fn new(potential: RadialPotential) -> Self {
        Self::with_options(potential, TwoBodyOptions::default())
    }

    pub fn with_options(potential: RadialPotential, opts: TwoBodyOptions) -> Self {
        Self { potential, opts, trap: OnceLock::new() }
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }

    pub fn options(&self) -> &TwoBodyOptions {
        &self.opts
    }

    fn radial(&self, l2: f64, v2: f64, x: f64) -> f64 {
        let centrifugal = if l2 > 0.0 { 0.5 * l2 / (x * x) } else { 0.0 };
        0.5 * v2 - centrifugal - 2.0 * self.potential.interior(x).0
    }

    /// Largest `x ∈ (0, 1]` with `V²/2 = L²/(2x²) + 2Φ(x)`.
    ///
    /// Returns `r_star = 0` for a head-on orbit (`L = 0`) that passes through
    /// the centre of a bounded potential.
    pub fn turning_point(&self, l: f64, speed: f64) -> Result<TurningPoint> {
        if !(speed > 0.0) || !speed.is_finite() || !(l >= 0.0) {
            return Err(Error::InvalidArgument(format!("need speed > 0 and L >= 0, got speed={speed}, L={l}")));
        }
        if l >= speed {
            return Err(Error::NoInteraction { rho: l / speed });
        }
        let (l2, v2) = (l * l, speed * speed);
        if matches!(self.potential.spec(), crate::potentials::PotentialSpec::Zero) {
            return Ok(TurningPoint { r_star: l / speed, tangency: false });
        }
        let f = |x: f64| self.radial(l2, v2, x);
        let root = if self.potential.flags().repulsive_monotone {
            // f is increasing in x: halve towards the centre until it turns negative.
            let mut lo = 0.5;
            let mut flo = f(lo);
            let mut hi = 1.0;
            let mut fhi = f(hi);
            while flo > 0.0 {
                if lo < 1e-300 {
                    return Ok(TurningPoint { r_star: 0.0, tangency: false });
                }
                hi = lo;
                fhi = flo;
                lo *= 0.5;
                flo = f(lo);
            }
            brent(f, lo, hi, flo, fhi, self.opts.r_tol)
        } else {
            let n = self.opts.scan_points.max(16);
            let mut prev_x = 1.0;
            let mut prev_f = f(1.0);
            let mut found = None;
            for i in 1..=n {
                let x = 1.0 - i as f64 / n as f64;
                let x = if i == n { 0.5 / n as f64 } else { x };
                let fx = f(x);
                if fx <= 0.0 {
                    found = Some((x, fx, prev_x, prev_f));
                    break;
                }
                prev_x = x;
                prev_f = fx;
            }
            if found.is_none() {
                let mut x = prev_x;
                while x > 1e-300 {
                    let nx = 0.5 * x;
                    let fx = f(nx);
                    if fx <= 0.0 {
                        found = Some((nx, fx, prev_x, prev_f));
                        break;
                    }
                    prev_x = nx;
                    prev_f = fx;
                    x = nx;
                }
            }
            match found {
                Some((lo, flo, hi, fhi)) => brent(f, lo, hi, flo, fhi, self.opts.r_tol),
                None => return Ok(TurningPoint { r_star: 0.0, tangency: false }),
            }
        };
        let p = self.potential.interior(root);
        let slope = l2 / (root * root * root) - 2.0 * p.1;
        let scale = 0.5 * v2 + 0.5 * l2 / (root * root) + 2.0 * p.0.abs();
        let tangency = slope.abs() * root < 1e-7 * scale;
        Ok(TurningPoint { r_star: root, tangency })
    }

    fn check_rho(rho: f64, speed: f64) -> Result<()> {
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::InvalidArgument(format!("speed must be positive, got {speed}")));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("rho must lie in [0, 1], got {rho}")));
        }
        Ok(())
    }

    fn theta_setup(&self, rho: f64, speed: f64) -> Result<ThetaKernel<'_>> {
        let tp = self.turning_point(rho * speed, speed)?;
        if tp.tangency {
            return Err(Error::TrappedOrSingular(format!("tangent turning point at r* = {}", tp.r_star)));
        }
        let kernel = ThetaKernel { pot: &self.potential, rho, c: 4.0 / (speed * speed), y_star: rho / tp.r_star, r_star: tp.r_star };
        if !self.potential.flags().repulsive_monotone {
            // Guard the change of variables: G(y) = w(ρ/y) + y² must increase.
            for i in 0..=256 {
                let y = rho + (kernel.y_star - rho) * i as f64 / 256.0;
                if kernel.d_of_y(y).0 <= 0.0 {
                    return Err(Error::TrappedOrSingular(format!("non-monotone phase map at rho = {rho}")));
                }
            }
        }
        Ok(kernel)
    }

    fn phi_breaks(&self, k: &ThetaKernel<'_>) -> Vec<f64> {
        self.potential
            .jump_radii()
            .iter()
            .filter(|&&r| r > k.r_star && r < 1.0)
            .map(|&r| {
                let s = k.c * self.potential.interior(r).0 + (k.rho / r).powi(2);
                s.clamp(0.0, 1.0).sqrt().asin()
            })
            .collect()
    }

    /// Deflection angle Θ(ρ, |V|) ∈ [0, π/2] for single-turn orbits.
    pub fn theta(&self, rho: f64, speed: f64) -> Result<f64> {
        Self::check_rho(rho, speed)?;
        if rho >= 1.0 {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        if rho == 0.0 {
            let tp = self.turning_point(0.0, speed)?;
            return Ok(if tp.r_star > 0.0 { 0.0 } else { std::f64::consts::FRAC_PI_2 });
        }
        let k = self.theta_setup(rho, speed)?;
        let a = rho.asin();
        let breaks = self.phi_breaks(&k);
        let mut fail = false;
        let r = integrate(
            |phi| match k.y_of_phi(phi) {
                Some(y) => {
                    let d = k.d_of_y(y).0;
                    if d <= 0.0 {
                        fail = true;
                        0.0
                    } else {
                        phi.sin() / d
                    }
                }
                None => {
                    fail = true;
                    0.0
                }
            },
            a,
            std::f64::consts::FRAC_PI_2,
            &breaks,
            self.opts.quad,
        );
        if fail {
            return Err(Error::TrappedOrSingular(format!("vanishing denominator at rho = {rho}")));
        }
        if !r.converged {
            return Err(Error::Numerical(format!("theta quadrature did not converge at rho = {rho} (err {:.3e})", r.error)));
        }
        Ok(a + r.value)
    }

    /// dΘ/dρ by differentiating the regular integral under the integral sign.
    pub fn dtheta_drho(&self, rho: f64, speed: f64) -> Result<f64> {
        Self::check_rho(rho, speed)?;
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidArgument(format!("dtheta_drho needs 0 < rho < 1, got {rho}")));
        }
        let k = self.theta_setup(rho, speed)?;
        let a = rho.asin();
        let wp1 = k.c * self.potential.boundary_slope();
        let boundary = (1.0 - 1.0 / (1.0 - wp1 / (2.0 * rho * rho))) / (1.0 - rho * rho).sqrt();
        let breaks = self.phi_breaks(&k);
        let mut fail = false;
        let r = integrate(
            |phi| match k.y_of_phi(phi) {
                Some(y) => {
                    let (d, wp, wpp) = k.d_of_y(y);
                    if d <= 0.0 {
                        fail = true;
                        return 0.0;
                    }
                    let y2 = y * y;
                    let num = rho * wpp / (2.0 * y2) + wp / y + rho * wp * wp / (4.0 * y2 * y2);
                    phi.sin() * num / (d * d * d)
                }
                None => {
                    fail = true;
                    0.0
                }
            },
            a,
            std::f64::consts::FRAC_PI_2,
            &breaks,
            self.opts.quad,
        );
        if fail {
            return Err(Error::TrappedOrSingular(format!("vanishing denominator at rho = {rho}")));
        }
        if !r.converged {
            return Err(Error::Numerical(format!("dtheta quadrature did not converge at rho = {rho}")));
        }
        Ok(boundary + r.value)
    }

    /// Residence time τ* inside the unit sphere (microscopic units).
    pub fn scattering_time(&self, rho: f64, speed: f64) -> Result<f64> {
        Self::check_rho(rho, speed)?;
        if rho >= 1.0 {
            return Ok(0.0);
        }
        let l = rho * speed;
        let tp = self.turning_point(l, speed)?;
        if tp.tangency {
            return Err(Error::TrappedOrSingular(format!("tangent turning point at r* = {}", tp.r_star)));
        }
        let (l2, v2) = (l * l, speed * speed);
        let rs = tp.r_star;
        let pot = &self.potential;
        // f(r* + u²) / u² with a Taylor expansion where cancellation bites.
        let (f1, f2) = if rs > 0.0 {
            let p = pot.interior(rs);
            (l2 / (rs * rs * rs) - 2.0 * p.1, -3.0 * l2 / (rs * rs * rs * rs) - 2.0 * p.2)
        } else {
            (0.0, 0.0)
        };
        let umax = (1.0 - rs).sqrt();
        let breaks: Vec<f64> = pot.jump_radii().iter().filter(|&&r| r > rs && r < 1.0).map(|&r| (r - rs).sqrt()).collect();
        let mut fail = false;
        let res = integrate(
            |u| {
                let u2 = u * u;
                let r = rs + u2;
                if rs > 0.0 {
                    let g = if u2 < 1e-8 {
                        f1 + 0.5 * f2 * u2
                    } else {
                        let fr = 0.5 * v2 - 0.5 * l2 / (r * r) - 2.0 * pot.interior(r).0;
                        fr / u2
                    };
                    if g <= 0.0 {
                        fail = true;
                        return 0.0;
                    }
                    2.0 / g.sqrt()
                } else {
                    let fr = 0.5 * v2 - 2.0 * pot.interior(r).0;
                    if fr <= 0.0 {
                        fail = true;
                        return 0.0;
                    }
                    2.0 * u / fr.sqrt()
                }
            },
            0.0,
            umax,
            &breaks,
            self.opts.quad,
        );
        if fail {
            return Err(Error::TrappedOrSingular(format!("radial velocity vanishes inside (r*, 1) at rho = {rho}")));
        }
        if !res.converged {
            return Err(Error::Numerical(format!("scattering-time quadrature did not converge at rho = {rho}")));
        }
        Ok(std::f64::consts::SQRT_2 * res.value)
    }

    /// Turning point, deflection and residence time in one call.
    pub fn scatter(&self, rho: f64, speed: f64) -> Result<ScatteringResult> {
        Self::check_rho(rho, speed)?;
        let r_star = if rho >= 1.0 { 1.0 } else { self.turning_point(rho * speed, speed)?.r_star };
        let theta = self.theta(rho, speed)?;
        let tau_star = self.scattering_time(rho, speed)?;
        Ok(ScatteringResult {
            rho,
            speed,
            r_star,
            theta,
            chi: fold_angle(std::f64::consts::PI - 2.0 * theta),
            tau_star,
            turns: (theta / std::f64::consts::PI).floor() as u32,
        })
    }

    /// The physical part of the trap curve on a fine default grid, computed once.
    pub fn trap_curve_cached(&self) -> &TrapCurve {
        self.trap.get_or_init(|| {
            let n = 4000;
            let grid: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
            trap_curve(&self.potential, &grid)
        })
    }
}

struct ThetaKernel<'a> {
    pot: &'a RadialPotential,
    rho: f64,
    c: f64,
    y_star: f64,
    r_star: f64,
}

impl ThetaKernel<'_> {
    /// D(y), w′(ρ/y), w″(ρ/y).
    fn d_of_y(&self, y: f64) -> (f64, f64, f64) {
        let s = (self.rho / y).min(1.0);
        let p = self.pot.interior(s);
        let wp = self.c * p.1;
        let wpp = self.c * p.2;
        (y - self.rho * wp / (2.0 * y * y), wp, wpp)
    }

    fn g(&self, y: f64) -> f64 {
        let s = (self.rho / y).min(1.0);
        self.c * self.pot.interior(s).0 + y * y
    }

    /// Solves w(ρ/y) + y² = sin²φ on [ρ, y*] by safeguarded Newton.
    fn y_of_phi(&self, phi: f64) -> Option<f64> {
        let target = phi.sin().powi(2);
        let (mut lo, mut hi) = (self.rho, self.y_star);
        if target <= self.rho * self.rho {
            return Some(lo);
        }
        if target >= 1.0 {
            return Some(hi);
        }
        let span = 1.0 - self.rho * self.rho;
        let mut y = lo + (hi - lo) * ((target - self.rho * self.rho) / span);
        for _ in 0..100 {
            let gy = self.g(y) - target;
            if gy > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let d = self.d_of_y(y).0;
            let mut next = if d > 0.0 { y - gy / (2.0 * d) } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 4.0 * f64::EPSILON * y || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Some(next);
            }
            y = next;
        }
        None
    }
}
