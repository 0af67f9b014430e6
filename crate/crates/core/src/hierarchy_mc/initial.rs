//! One-particle densities, the product and excluded-volume initial data and
//! the nested estimator of `F^N(z_j)/𝒵_N`.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use super::rng::mix;
use super::MarginalEstimate;
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::numerics::{mean_and_stderr, pairwise_sum};
use crate::Vec3;

/// `f₀(x, v) = ρ₀(x) M_β(v)` with `M_β(v) = (β/2π)^{3/2} e^{−β|v|²/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OneParticleDensity {
    /// Centred isotropic Gaussian of width `x_sigma`.
    Gaussian { x_sigma: f64, beta: f64 },
    /// Uniform on `[−L, L]³`.
    BoxMaxwellian { half_width: f64, beta: f64 },
    /// Gaussian restricted to `[−L, L]³` and renormalized.
    GaussianBox { x_sigma: f64, half_width: f64, beta: f64 },
    /// Equal mixture of Gaussians centred at `±offset` on the first axis.
    Bimodal { x_sigma: f64, offset: f64, beta: f64 },
}

impl OneParticleDensity {
    pub fn gaussian(x_sigma: f64, beta: f64) -> Result<Self> {
        let d = Self::Gaussian { x_sigma, beta };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Gaussian { x_sigma, beta } => x_sigma > 0.0 && beta > 0.0,
            Self::BoxMaxwellian { half_width, beta } => half_width > 0.0 && beta > 0.0,
            Self::GaussianBox { x_sigma, half_width, beta } => x_sigma > 0.0 && half_width > 0.0 && beta > 0.0,
            Self::Bimodal { x_sigma, offset, beta } => x_sigma > 0.0 && offset >= 0.0 && beta > 0.0,
        };
        let finite = match *self {
            Self::Gaussian { x_sigma, beta } => x_sigma.is_finite() && beta.is_finite(),
            Self::BoxMaxwellian { half_width, beta } => half_width.is_finite() && beta.is_finite(),
            Self::GaussianBox { x_sigma, half_width, beta } => x_sigma.is_finite() && half_width.is_finite() && beta.is_finite(),
            Self::Bimodal { x_sigma, offset, beta } => x_sigma.is_finite() && offset.is_finite() && beta.is_finite(),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid one-particle density {self:?}")))
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Self::Gaussian { beta, .. } | Self::BoxMaxwellian { beta, .. } | Self::GaussianBox { beta, .. } | Self::Bimodal { beta, .. } => beta,
        }
    }

    pub fn maxwellian(&self, v: &Vec3) -> f64 {
        let b = self.beta();
        (b / (2.0 * PI)).powf(1.5) * (-0.5 * b * v.norm_squared()).exp()
    }

    pub fn position_density(&self, x: &Vec3) -> f64 {
        match *self {
            Self::Gaussian { x_sigma, .. } => gauss3(x, x_sigma),
            Self::BoxMaxwellian { half_width: l, .. } => {
                if in_box(x, l) {
                    (2.0 * l).powi(-3)
                } else {
                    0.0
                }
            }
            Self::GaussianBox { x_sigma, half_width: l, .. } => {
                if in_box(x, l) {
                    gauss3(x, x_sigma) / erf(l / (x_sigma * 2f64.sqrt())).powi(3)
                } else {
                    0.0
                }
            }
            Self::Bimodal { x_sigma, offset, .. } => {
                let d = Vec3::new(offset, 0.0, 0.0);
                0.5 * (gauss3(&(x - d), x_sigma) + gauss3(&(x + d), x_sigma))
            }
        }
    }

    pub fn eval(&self, z: &PhasePoint) -> f64 {
        self.position_density(&z.x) * self.maxwellian(&z.v)
    }

    /// `sup_x ∫ f₀(x, v) dv`.
    pub fn spatial_sup(&self) -> f64 {
        match *self {
            // The maximum lies on the segment between the centres.
            Self::Bimodal { offset, .. } => (0..=4000).map(|i| self.position_density(&Vec3::new(offset * i as f64 / 4000.0, 0.0, 0.0))).fold(0.0, f64::max),
            _ => self.position_density(&Vec3::zeros()),
        }
    }

    /// `sup_{x,v} e^{β|v|²/2} f₀(x, v)`.
    pub fn weighted_sup(&self) -> f64 {
        self.spatial_sup() * (self.beta() / (2.0 * PI)).powf(1.5)
    }

    /// `C₀ = (4π/3) sup_x ∫ f₀ dv`, the constant in the bounds on
    /// `F^N/𝒵_N`; the sup is taken over the position density.
    pub fn c0(&self) -> f64 {
        4.0 * PI / 3.0 * self.spatial_sup()
    }

    pub fn sample_position<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        match *self {
            Self::Gaussian { x_sigma, .. } => normal3(rng) * x_sigma,
            Self::BoxMaxwellian { half_width: l, .. } => Vec3::new(rng.gen_range(-l..l), rng.gen_range(-l..l), rng.gen_range(-l..l)),
            Self::GaussianBox { x_sigma, half_width: l, .. } => loop {
                let x = normal3(rng) * x_sigma;
                if in_box(&x, l) {
                    break x;
                }
            },
            Self::Bimodal { x_sigma, offset, .. } => {
                let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                normal3(rng) * x_sigma + Vec3::new(side * offset, 0.0, 0.0)
            }
        }
    }

    pub fn sample_velocity<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        normal3(rng) / self.beta().sqrt()
    }

    /// Monte Carlo estimate of `∫ f₀` with a proposal twice as wide as `f₀`
    /// in both variables; returns `(mean, std_error)`.
    pub fn check_normalization(&self, n_samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(mix([seed, 0x6e6f_726d]));
        let sx = match *self {
            Self::Gaussian { x_sigma, .. } => 2.0 * x_sigma,
            Self::BoxMaxwellian { half_width, .. } => 2.0 * half_width,
            Self::GaussianBox { x_sigma, half_width, .. } => 2.0 * x_sigma.min(half_width),
            Self::Bimodal { x_sigma, offset, .. } => 2.0 * x_sigma + offset,
        };
        let sv = 2.0 / self.beta().sqrt();
        let vals: Vec<f64> = (0..n_samples)
            .map(|_| {
                let x = normal3(&mut rng) * sx;
                let v = normal3(&mut rng) * sv;
                self.eval(&PhasePoint::new(x, v)) / (gauss3(&x, sx) * gauss3(&v, sv))
            })
            .collect();
        mean_and_stderr(&vals)
    }
}

fn in_box(x: &Vec3, l: f64) -> bool {
    x.iter().all(|c| c.abs() <= l)
}

fn gauss3(x: &Vec3, s: f64) -> f64 {
    (2.0 * PI * s * s).powf(-1.5) * (-0.5 * x.norm_squared() / (s * s)).exp()
}

pub(crate) fn normal3<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitialMode {
    /// `f_{0,s} = f₀^{⊗s}`.
    Product,
    /// `f^N_{0,s} = ratio · f₀^{⊗s} Π 𝟙{|x_i − x_k| > ε}`, with `ratio`
    /// standing in for `F^N/𝒵_N`.
    ExcludedVolume { n_particles: usize, epsilon: f64, ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub f0: OneParticleDensity,
    pub mode: InitialMode,
}

impl InitialData {
    pub fn product(f0: OneParticleDensity) -> Self {
        Self { f0, mode: InitialMode::Product }
    }

    /// Excluded-volume data with `F^N/𝒵_N` replaced by 1.
    pub fn excluded_volume(f0: OneParticleDensity, n_particles: usize, epsilon: f64) -> Self {
        Self { f0, mode: InitialMode::ExcludedVolume { n_particles, epsilon, ratio: 1.0 } }
    }

    /// The `s`-particle marginal at `z`.
    pub fn marginal(&self, z: &[PhasePoint]) -> f64 {
        let prod: f64 = z.iter().map(|p| self.f0.eval(p)).product();
        match self.mode {
            InitialMode::Product => prod,
            InitialMode::ExcludedVolume { epsilon, ratio, .. } => {
                if separated(z.iter().map(|p| &p.x), epsilon) {
                    ratio * prod
                } else {
                    0.0
                }
            }
        }
    }
}

fn separated<'a>(xs: impl Iterator<Item = &'a Vec3> + Clone, epsilon: f64) -> bool {
    let xs: Vec<&Vec3> = xs.collect();
    let e2 = epsilon * epsilon;
    (0..xs.len()).all(|i| (i + 1..xs.len()).all(|k| (xs[i] - xs[k]).norm_squared() > e2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedVolumeOptions {
    /// Largest complement simulated explicitly.
    pub n_max: usize,
    pub burn_in_sweeps: usize,
    /// Widom insertions of `j` fresh particles per sweep.
    pub insertions: usize,
    /// Batches for the error estimate.
    pub batches: usize,
}

impl Default for ExcludedVolumeOptions {
    fn default() -> Self {
        Self { n_max: 512, burn_in_sweeps: 20, insertions: 8, batches: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedVolumeEstimate {
    /// Estimate of `f^N_{0,j}(z_j)`.
    pub marginal: MarginalEstimate,
    /// Estimate of `F^N(z_j)/𝒵_N` and its standard error.
    pub ratio: f64,
    pub ratio_std_error: f64,
    /// `[1 − 2C₀jε, (1 − C₀ε)^{−j}]`.
    pub ratio_bounds: (f64, f64),
    pub n_simulated: usize,
    /// The complement exceeded `n_max` and the log-ratio was scaled up.
    pub extrapolated: bool,
    pub acceptance: f64,
}

/// Estimates `f^N_{0,j}(z_j) = F^N(z_j)/𝒵_N · f₀^{⊗j}(z_j) Π 𝟙`.
///
/// The `N − j` remaining particles are sampled from the excluded-volume
/// measure by an independence Metropolis chain with proposals from the
/// position density (a move is accepted iff it overlaps nobody). Along the
/// chain, `F^N/𝒵_N` is the ratio of `E[𝟙{z_j free}]` to the Widom insertion
/// probability of `j` fresh particles, both read off the same
/// configurations. When `N − j > n_max` only `n_max` particles are simulated
/// and the log-ratio is multiplied by `(N − j)/n_max`.
pub fn initial_marginal_excluded_volume(
    f0: &OneParticleDensity,
    n: usize,
    epsilon: f64,
    z_j: &[PhasePoint],
    n_samples: usize,
    seed: u64,
    opts: &ExcludedVolumeOptions,
) -> Result<ExcludedVolumeEstimate> {
    f0.validate()?;
    let j = z_j.len();
    if j == 0 || n < j {
        return Err(Error::InvalidArgument(format!("need 1 ≤ j ≤ N, got j = {j}, N = {n}")));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if opts.batches < 2 || n_samples < opts.batches || opts.insertions == 0 {
        return Err(Error::InvalidArgument(format!("need at least {} samples and one insertion", opts.batches.max(2))));
    }
    let rest = n - j;
    let m = rest.min(opts.n_max);
    let e2 = epsilon * epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(mix([seed, 0x0065_7876_6f6c]));

    let free = |xs: &[Vec3], y: &Vec3, skip: Option<usize>| xs.iter().enumerate().all(|(i, x)| Some(i) == skip || (x - y).norm_squared() > e2);

    let mut xs: Vec<Vec3> = Vec::with_capacity(m);
    let mut tries = 0usize;
    while xs.len() < m {
        tries += 1;
        if tries > 1000 * (m + 1) {
            return Err(Error::Numerical("could not place the complement without overlaps".into()));
        }
        let y = f0.sample_position(&mut rng);
        if free(&xs, &y, None) {
            xs.push(y);
        }
    }

    let (mut accepted, mut proposed) = (0usize, 0usize);
    let mut sweep = |xs: &mut Vec<Vec3>, rng: &mut ChaCha8Rng| {
        for i in 0..xs.len() {
            let y = f0.sample_position(rng);
            proposed += 1;
            if free(xs, &y, Some(i)) {
                xs[i] = y;
                accepted += 1;
            }
        }
    };
    for _ in 0..opts.burn_in_sweeps {
        sweep(&mut xs, &mut rng);
    }
    let zx: Vec<Vec3> = z_j.iter().map(|p| p.x).collect();
    let mut a = Vec::with_capacity(n_samples);
    let mut b = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        sweep(&mut xs, &mut rng);
        a.push(if zx.iter().all(|z| free(&xs, z, None)) { 1.0 } else { 0.0 });
        let mut hits = 0usize;
        for _ in 0..opts.insertions {
            let ys: Vec<Vec3> = (0..j).map(|_| f0.sample_position(&mut rng)).collect();
            if separated(ys.iter(), epsilon) && ys.iter().all(|y| free(&xs, y, None)) {
                hits += 1;
            }
        }
        b.push(hits as f64 / opts.insertions as f64);
    }

    let (sa, sb) = (pairwise_sum(&a), pairwise_sum(&b));
    if !(sb > 0.0) {
        return Err(Error::Numerical("no successful insertion; the packing is too dense".into()));
    }
    let r_m = sa / sb;
    let nb = opts.batches;
    let size = n_samples / nb;
    let resid: Vec<f64> = (0..nb)
        .map(|k| {
            let (lo, hi) = (k * size, (k + 1) * size);
            (pairwise_sum(&a[lo..hi]) - r_m * pairwise_sum(&b[lo..hi])) / size as f64
        })
        .collect();
    let (_, se_resid) = mean_and_stderr(&resid);
    let se_m = se_resid / (sb / n_samples as f64);

    let extrapolated = rest > m;
    let (ratio, ratio_se) = if extrapolated {
        let s = rest as f64 / m as f64;
        (r_m.powf(s), se_m * s * r_m.powf(s - 1.0))
    } else {
        (r_m, se_m)
    };

    let f = if separated(zx.iter(), epsilon) { z_j.iter().map(|p| f0.eval(p)).product() } else { 0.0 };
    let c0 = f0.c0();
    let jf = j as f64;
    Ok(ExcludedVolumeEstimate {
        marginal: MarginalEstimate { value: ratio * f, std_error: ratio_se * f, n_samples, seed, rejected_fraction: 0.0, ..Default::default() },
        ratio,
        ratio_std_error: ratio_se,
        ratio_bounds: (1.0 - 2.0 * c0 * jf * epsilon, (1.0 - c0 * epsilon).powf(-jf)),
        n_simulated: m,
        extrapolated,
        acceptance: if proposed > 0 { accepted as f64 / proposed as f64 } else { 1.0 },
    })
}
