//! Differential cross-section, monotonicity branches of ρ ↦ Θ and the
//! ω-form collision kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::roots::bisect;
use crate::two_body::{apply_collision_rule, TwoBody};
use crate::Vec3;

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A maximal ρ-interval on which Θ is strictly monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityBranch {
    pub rho_interval: (f64, f64),
    /// Values of Θ at the two ends of `rho_interval`, in that order.
    pub theta_ends: (f64, f64),
    pub direction: Direction,
}

impl MonotonicityBranch {
    /// Image interval `(min, max)`.
    pub fn theta_interval(&self) -> (f64, f64) {
        let (a, b) = self.theta_ends;
        (a.min(b), a.max(b))
    }

    pub fn contains_theta(&self, theta: f64) -> bool {
        let (lo, hi) = self.theta_interval();
        theta >= lo && theta <= hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDecomposition {
    pub speed: f64,
    pub branches: Vec<MonotonicityBranch>,
    /// ρ-intervals where the deflection could not be computed.
    pub exclusions: Vec<(f64, f64)>,
}

/// Splits `(0, 1)` at sign changes of dΘ/dρ sampled on `grid_size` interior
/// points; each change is refined by bisection to `1e-10` in ρ.
pub fn branch_decompose(tb: &TwoBody, speed: f64, grid_size: usize) -> Result<BranchDecomposition> {
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!("grid_size must be at least 64, got {grid_size}")));
    }
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::InvalidArgument(format!("speed must be positive, got {speed}")));
    }
    let rhos: Vec<f64> = (1..grid_size).map(|i| i as f64 / grid_size as f64).collect();
    let d: Vec<Option<f64>> = rhos.iter().map(|&r| tb.dtheta_drho(r, speed).ok()).collect();

    // Runs of consecutive computable grid points; gaps become exclusions.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut exclusions = Vec::new();
    let mut i = 0;
    while i < rhos.len() {
        if d[i].is_none() {
            let a = i;
            while i < rhos.len() && d[i].is_none() {
                i += 1;
            }
            let lo = if a == 0 { 0.0 } else { rhos[a - 1] };
            let hi = if i == rhos.len() { 1.0 } else { rhos[i] };
            exclusions.push((lo, hi));
        } else {
            let a = i;
            while i < rhos.len() && d[i].is_some() {
                i += 1;
            }
            runs.push((a, i));
        }
    }

    let theta_at = |r: f64| -> Result<f64> {
        if r <= 0.0 {
            tb.theta(0.0, speed)
        } else if r >= 1.0 {
            Ok(HALF_PI)
        } else {
            tb.theta(r, speed)
        }
    };

    let mut branches = Vec::new();
    for &(a, b) in &runs {
        let run_lo = if a == 0 { 0.0 } else { rhos[a] };
        let run_hi = if b == rhos.len() { 1.0 } else { rhos[b - 1] };
        let mut cuts = vec![run_lo];
        for k in a..b - 1 {
            let (d0, d1) = (d[k].unwrap(), d[k + 1].unwrap());
            if d0 * d1 < 0.0 {
                let f = |r: f64| tb.dtheta_drho(r, speed).unwrap_or(f64::NAN);
                cuts.push(bisect(f, rhos[k], rhos[k + 1], 1e-10));
            }
        }
        cuts.push(run_hi);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (t0, t1) = (theta_at(lo)?, theta_at(hi)?);
            let mid = 0.5 * (lo + hi);
            let slope = tb.dtheta_drho(mid, speed).unwrap_or(t1 - t0);
            let direction = if slope >= 0.0 { Direction::Increasing } else { Direction::Decreasing };
            branches.push(MonotonicityBranch { rho_interval: (lo, hi), theta_ends: (t0, t1), direction });
        }
    }
    Ok(BranchDecomposition { speed, branches, exclusions })
}

/// Inverts Θ on one branch: Newton steps with dΘ/dρ, falling back to
/// bisection whenever a step leaves the current bracket.
pub fn invert_on_branch(tb: &TwoBody, branch: &MonotonicityBranch, speed: f64, theta: f64) -> Result<f64> {
    if !branch.contains_theta(theta) {
        return Err(Error::NoPreimage(theta));
    }
    let (mut lo, mut hi) = branch.rho_interval;
    let (t_lo, t_hi) = branch.theta_ends;
    if theta == t_lo {
        return Ok(lo);
    }
    if theta == t_hi {
        return Ok(hi);
    }
    let sign = if branch.direction == Direction::Increasing { 1.0 } else { -1.0 };
    // Bracket invariant: sign·(Θ − θ) < 0 at lo and > 0 at hi.
    let mut r = lo + (hi - lo) * (theta - t_lo) / (t_hi - t_lo);
    for _ in 0..200 {
        if !(r > lo && r < hi) {
            r = 0.5 * (lo + hi);
        }
        let f = sign * (tb.theta(r, speed)? - theta);
        if f == 0.0 {
            return Ok(r);
        }
        if f < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        if hi - lo <= 1e-15 * hi.max(1e-300) {
            return Ok(0.5 * (lo + hi));
        }
        let d = sign * tb.dtheta_drho(r, speed)?;
        let next = if d > 0.0 { r - f / d } else { f64::NAN };
        if (next - r).abs() <= 1e-15 {
            return Ok(next.clamp(lo, hi));
        }
        r = next;
    }
    Ok(0.5 * (lo + hi))
}

/// σ_Φ at one deflection angle, split by branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSample {
    pub theta: f64,
    pub sigma: f64,
    /// Per-branch contributions, `None` where the branch does not reach `theta`.
    pub per_branch: Vec<Option<f64>>,
    pub branch_count: usize,
    /// Some preimage is an interior branch endpoint or has `|dΘ/dρ| < 1e-12`; its contribution is left out of `sigma`.
    pub branch_edge_singular: bool,
}

/// `σ = Σ ρ/(2|sin 2Θ|) · |dρ/dΘ|` over the branches whose image contains `theta`.
pub fn sigma_at(tb: &TwoBody, dec: &BranchDecomposition, theta: f64) -> Result<CrossSectionSample> {
    if !(theta > 0.0 && theta < HALF_PI) {
        return Err(Error::Domain(theta));
    }
    let speed = dec.speed;
    let s2 = (2.0 * theta).sin().abs();
    let mut per_branch = Vec::with_capacity(dec.branches.len());
    let mut sigma = 0.0;
    let mut count = 0;
    let mut edge = false;
    for b in &dec.branches {
        if !b.contains_theta(theta) {
            per_branch.push(None);
            continue;
        }
        count += 1;
        let rho = invert_on_branch(tb, b, speed, theta)?;
        let dt = if rho > 0.0 && rho < 1.0 { tb.dtheta_drho(rho, speed)? } else { 0.0 };
        let at_fold = rho > 0.0 && rho < 1.0 && (rho == b.rho_interval.0 || rho == b.rho_interval.1);
        if dt.abs() < 1e-12 || at_fold {
            edge = true;
            per_branch.push(Some(f64::INFINITY));
            continue;
        }
        let s = rho / (2.0 * s2) / dt.abs();
        sigma += s;
        per_branch.push(Some(s));
    }
    if count == 0 {
        return Err(Error::NoPreimage(theta));
    }
    Ok(CrossSectionSample { theta, sigma, per_branch, branch_count: count, branch_edge_singular: edge })
}

/// Orthonormal pair spanning the plane perpendicular to `vhat`.
fn frame(vhat: &Vec3) -> (Vec3, Vec3) {
    let t = if vhat.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (t - vhat * vhat.dot(&t)).normalize();
    (e1, vhat.cross(&e1))
}

/// ω-form kernel `B(ω, V) = |V| Σ ρ|dρ/dΘ| / sin Θ`, summed over the branches
/// whose image contains the angle between `ω` and `−V`. Zero when `ω` lies on
/// the far hemisphere.
pub fn b_kernel(tb: &TwoBody, dec: &BranchDecomposition, omega: &Vec3, v: &Vec3) -> Result<f64> {
    let speed = v.norm();
    if (speed - dec.speed).abs() > 1e-12 * dec.speed {
        return Err(Error::InvalidArgument("branch decomposition was built for a different speed".into()));
    }
    let c = -omega.dot(v) / (speed * omega.norm());
    if c <= 0.0 {
        return Ok(0.0);
    }
    let theta = c.min(1.0).acos();
    let mut total = 0.0;
    for b in &dec.branches {
        if !b.contains_theta(theta) {
            continue;
        }
        let rho = invert_on_branch(tb, b, speed, theta)?;
        let dt = tb.dtheta_drho(rho.clamp(1e-15, 1.0 - 1e-15), speed)?;
        total += rho / dt.abs() / theta.sin();
    }
    Ok(speed * total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyOptions {
    /// Θ-neighbourhood removed around every branch endpoint (0, π/2 and folds).
    pub angular_cutoff: f64,
    /// Trapezoidal nodes in the azimuth.
    pub azimuth_points: usize,
    pub quad: QuadOptions,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        Self { angular_cutoff: 1e-4, azimuth_points: 64, quad: QuadOptions { abs_tol: 1e-10, rel_tol: 1e-9, max_panels: 400 } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// ν-form integral over the impact parameters that survive the cutoff.
    pub lhs: f64,
    /// ω-form integral over the same set.
    pub rhs: f64,
    pub abs_diff: f64,
    /// ν-form integral over the whole hemisphere.
    pub lhs_full: f64,
    /// `lhs_full − lhs`: the part of the ν-form integral removed by the cutoff.
    pub excluded_mass: f64,
}

/// Compares `∫ dν |V·ν| g(v′, v₁′)` computed over impact parameters with the
/// same integral computed over deflection angles with the kernel `B(ω, V)`.
pub fn nu_omega_consistency<G>(tb: &TwoBody, dec: &BranchDecomposition, v: &Vec3, v1: &Vec3, g: G, opts: &ConsistencyOptions) -> Result<ConsistencyReport>
where
    G: Fn(&Vec3, &Vec3) -> f64,
{
    let vrel = v - v1;
    let speed = vrel.norm();
    if (speed - dec.speed).abs() > 1e-12 * dec.speed {
        return Err(Error::InvalidArgument("branch decomposition was built for a different speed".into()));
    }
    if !dec.exclusions.is_empty() {
        return Err(Error::Precondition("consistency check needs a decomposition without exclusions".into()));
    }
    let vhat = vrel / speed;
    let (e1, e2) = frame(&vhat);
    let nb = opts.azimuth_points.max(4);
    // Azimuthal average of g at deflection Θ, times 2π.
    let h = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let mut acc = 0.0;
        for k in 0..nb {
            let beta = 2.0 * std::f64::consts::PI * k as f64 / nb as f64;
            let e = e1 * beta.cos() + e2 * beta.sin();
            let w = -vhat * c + e * s;
            let (a, b) = apply_collision_rule(v, v1, &w);
            acc += g(&a, &b);
        }
        acc * 2.0 * std::f64::consts::PI / nb as f64
    };
    let mut err: Option<Error> = None;
    let mut theta_of = |r: f64| -> f64 {
        if r >= 1.0 {
            return HALF_PI;
        }
        match tb.theta(r.max(0.0), speed) {
            Ok(t) => t,
            Err(e) => {
                err.get_or_insert(e);
                HALF_PI
            }
        }
    };

    let mut lhs_full = 0.0;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let cut = opts.angular_cutoff;
    let mut kept_rho: Vec<(f64, f64)> = Vec::new();
    for b in &dec.branches {
        let (r0, r1) = b.rho_interval;
        let full = integrate(|r| r * h(theta_of(r)), r0, r1, &[], opts.quad);
        lhs_full += full.value;

        let (tlo, thi) = b.theta_interval();
        if thi - tlo <= 1e-14 {
            // Constant deflection: the ω-form kernel is a point mass at Θ = tlo.
            lhs += full.value;
            rhs += 0.5 * (r1 * r1 - r0 * r0) * h(tlo);
            continue;
        }
        let (ta, tb_) = (tlo + cut, thi - cut);
        if ta >= tb_ {
            continue;
        }
        let ra = invert_on_branch(tb, b, speed, ta)?;
        let rb = invert_on_branch(tb, b, speed, tb_)?;
        let (ra, rb) = (ra.min(rb), ra.max(rb));
        kept_rho.push((ra, rb));
        lhs += integrate(|r| r * h(theta_of(r)), ra, rb, &[], opts.quad).value;

        let mut inner_err: Option<Error> = None;
        let part = integrate(
            |t| {
                let rho = match invert_on_branch(tb, b, speed, t) {
                    Ok(r) => r,
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        return 0.0;
                    }
                };
                match tb.dtheta_drho(rho, speed) {
                    Ok(dt) => rho / dt.abs() * h(t),
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        0.0
                    }
                }
            },
            ta,
            tb_,
            &[],
            opts.quad,
        );
        if let Some(e) = inner_err {
            return Err(e);
        }
        rhs += part.value;
    }
    if let Some(e) = err {
        return Err(e);
    }
    let (lhs, rhs, lhs_full) = (speed * lhs, speed * rhs, speed * lhs_full);
    Ok(ConsistencyReport { lhs, rhs, abs_diff: (lhs - rhs).abs(), lhs_full, excluded_mass: lhs_full - lhs })
}
