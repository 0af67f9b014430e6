//! Importance sampler for single terms.
//!
//! Times are uniform on the ordered simplex, each created velocity is drawn
//! from the Maxwellian at the proposal temperature, and `ν` from the cosine
//! law on the admissible hemisphere, so that a node contributes the weight
//! `π|V| / g(v)`. With the incoming parametrization a `+` node draws
//! `(ν′, V′)` on the incoming hemisphere instead and maps it through the
//! scattering operator, which preserves both the measure and `|ν·V|`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::initial::{normal3, InitialData};
use super::rng::{mix, sample_rng, term_id};
use super::{MarginalEstimate, RejectionBreakdown};
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::numerics::{mean_and_stderr, pairwise_sum};
use crate::trees_flows::{
    build_bbf_with, build_ibf_with, energy_cutoff, omega_j_membership, overlap_detect, tree_count, IbfOptions, Sign, SignSequence, TreeGraph,
};
use crate::two_body::TwoBody;
use crate::Vec3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    #[default]
    Outgoing,
    Incoming,
}

/// Cutoff bookkeeping at scale `ε`: the fraction of `|weight|` outside
/// `β/2 Σv² < |log ε|` is reported, and with `lambda` set, samples whose
/// kernel product exceeds `ε^{−λ}` are dropped and their mass reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffDiagnostics {
    pub epsilon: f64,
    pub beta: f64,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerOptions {
    /// Inverse temperature of the velocity proposal; defaults to that of `f₀`.
    pub beta: Option<f64>,
    pub parametrization: Parametrization,
    /// Radii `δ` at which to report the fraction of Boltzmann samples in `𝒩(δ)`.
    pub overlap_deltas: Vec<f64>,
    pub cutoff: Option<CutoffDiagnostics>,
    pub ibf: IbfOptions,
    /// Keep the per-sample values in [`TermEstimate::values`].
    pub keep_values: bool,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            beta: None,
            parametrization: Parametrization::Outgoing,
            overlap_deltas: Vec::new(),
            cutoff: None,
            ibf: IbfOptions::default(),
            keep_values: false,
        }
    }
}

/// A fixed tree, or a tree drawn uniformly per sample (weighted by the count).
#[derive(Debug, Clone, Copy)]
pub enum TreeChoice<'a> {
    Fixed(&'a TreeGraph),
    Uniform { j: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermId {
    pub j: usize,
    pub n: usize,
    /// `None` when the tree is summed over by sampling.
    pub k: Option<Vec<usize>>,
    pub sigma: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub term: TermId,
    pub estimate: MarginalEstimate,
    /// Mean of `|value|` over the samples.
    pub abs_mean: f64,
    /// `(δ, fraction of samples in 𝒩(δ))`.
    pub overlap_fractions: Vec<(f64, f64)>,
    pub energy_cut_fraction: Option<f64>,
    pub clipped_fraction: Option<f64>,
    pub recollided_fraction: f64,
    pub numeric_scatterings: usize,
    #[serde(skip)]
    pub values: Vec<f64>,
}

#[derive(Clone, Copy)]
enum Flow<'a> {
    Bbf,
    Ibf { epsilon: f64, opts: &'a IbfOptions },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Reject {
    Constraint,
    Trapped,
    Stiff,
}

struct Outcome {
    value: f64,
    reject: Option<Reject>,
    overlaps: Vec<bool>,
    energy_cut: bool,
    clipped: bool,
    recollided: bool,
    numeric: usize,
}

fn classify(e: Error) -> Result<Reject> {
    match e {
        Error::Rejected(_) => Ok(Reject::Constraint),
        Error::TrappedOrSingular(_) | Error::NoInteraction { .. } | Error::NoPreimage(_) => Ok(Reject::Trapped),
        Error::IntegrationStiff { .. } | Error::Numerical(_) => Ok(Reject::Stiff),
        other => Err(other),
    }
}

/// Unit vector with density `(axis·ν)/π` on the hemisphere around `axis`.
fn cosine_hemisphere(axis: &Vec3, a: f64, b: f64) -> Vec3 {
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    let r = a.sqrt();
    let phi = 2.0 * PI * b;
    (axis * (1.0 - a).sqrt() + e1 * (r * phi.cos()) + e2 * (r * phi.sin())).normalize()
}

#[allow(clippy::too_many_arguments)]
fn draw_node<R: Rng>(rng: &mut R, sigma: Sign, eta: &Vec3, beta: f64, param: Parametrization, tb: &TwoBody, w: &mut f64) -> Result<(Vec3, Vec3)> {
    let v = normal3(rng) / beta.sqrt();
    let (a, b): (f64, f64) = (rng.gen(), rng.gen());
    let rel = v - eta;
    let speed = rel.norm();
    if !(speed > 0.0) {
        *w = 0.0;
        return Ok((Vec3::z(), v));
    }
    let g = (beta / (2.0 * PI)).powf(1.5) * (-0.5 * beta * v.norm_squared()).exp();
    *w *= PI * speed / g;
    let incoming = param == Parametrization::Incoming && sigma == Sign::Plus;
    let axis = if incoming { -rel / speed } else { rel / speed * sigma.value() };
    let nu = cosine_hemisphere(&axis, a, b);
    if incoming {
        let (nu_out, rel_out) = tb.scattering_operator(&nu, &rel)?;
        return Ok((nu_out, eta + rel_out));
    }
    Ok((nu, v))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[allow(clippy::too_many_arguments)]
fn one_sample(
    choice: TreeChoice,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    t: f64,
    init: &InitialData,
    tb: &TwoBody,
    flow: Flow,
    seed: u64,
    tid: u64,
    index: u64,
    beta: f64,
    opts: &SamplerOptions,
) -> Result<Outcome> {
    let n = signs.len();
    let mut rng = sample_rng(seed, tid, index);
    let (tree, mut w) = match choice {
        TreeChoice::Fixed(tree) => (tree.clone(), 1.0),
        TreeChoice::Uniform { j, n } => {
            let k = (0..n).map(|i| rng.gen_range(1..=j + i)).collect();
            (TreeGraph::new(j, k)?, tree_count(j, n)? as f64)
        }
    };
    let mut times: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * t).collect();
    times.sort_by(|a, b| b.total_cmp(a));
    w *= t.powi(n as i32) / factorial(n);

    let mut out = Outcome {
        value: 0.0,
        reject: None,
        overlaps: vec![false; opts.overlap_deltas.len()],
        energy_cut: false,
        clipped: false,
        recollided: false,
        numeric: 0,
    };
    let param = opts.parametrization;
    let pick = |r: usize, eta: &Vec3| draw_node(&mut rng, signs.sigma[r], eta, beta, param, tb, &mut w);
    let built = match flow {
        Flow::Bbf => build_bbf_with(&tree, signs, z_j, &times, t, tb, pick),
        Flow::Ibf { epsilon, opts } => build_ibf_with(&tree, signs, z_j, &times, t, epsilon, tb, opts, pick),
    };
    let (traj, params) = match built {
        Ok(x) => x,
        Err(e) => {
            out.reject = Some(classify(e)?);
            return Ok(out);
        }
    };
    out.value = w * init.marginal(traj.final_state());
    out.recollided = traj.recollided;
    out.numeric = traj.numeric_scatterings;
    if matches!(flow, Flow::Bbf) {
        for (flag, &delta) in out.overlaps.iter_mut().zip(&opts.overlap_deltas) {
            *flag = overlap_detect(&traj, delta)?.in_n_delta;
        }
    }
    if let Some(c) = opts.cutoff {
        let vsq: f64 = z_j.iter().map(|p| p.v.norm_squared()).sum::<f64>() + params.velocities.iter().map(|v| v.norm_squared()).sum::<f64>();
        out.energy_cut = !energy_cutoff(vsq, c.epsilon, c.beta);
        if let Some(lambda) = c.lambda {
            let kernel: f64 = traj.creations.iter().map(|cr| cr.kernel).product();
            out.clipped = kernel > c.epsilon.powf(-lambda);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn run_term(
    choice: TreeChoice,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    t: f64,
    init: &InitialData,
    tb: &TwoBody,
    epsilon: Option<f64>,
    n_samples: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TermEstimate> {
    let (j, n) = match choice {
        TreeChoice::Fixed(tree) => (tree.j, tree.n()),
        TreeChoice::Uniform { j, n } => (j, n),
    };
    if signs.len() != n || z_j.len() != j {
        return Err(Error::InvalidArgument(format!("term (j = {j}, n = {n}) does not match {} signs and {} particles", signs.len(), z_j.len())));
    }
    if !omega_j_membership(z_j) {
        return Err(Error::Precondition("z_j has a pair on a collision course".into()));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    init.f0.validate()?;
    let beta = opts.beta.unwrap_or_else(|| init.f0.beta());
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("proposal beta must be positive, got {beta}")));
    }
    let flow = match epsilon {
        None => Flow::Bbf,
        Some(epsilon) => Flow::Ibf { epsilon, opts: &opts.ibf },
    };
    let tid = match choice {
        TreeChoice::Fixed(tree) => term_id(tree, signs),
        TreeChoice::Uniform { .. } => mix([term_id(&TreeGraph::new(j, vec![])?, signs), n as u64, 0x756e_6966]),
    };
    let term = TermId { j, n, k: if let TreeChoice::Fixed(tree) = choice { Some(tree.k.clone()) } else { None }, sigma: signs.to_string() };

    // Without creations the integrand is a point evaluation.
    let draws = if n == 0 { 1 } else { n_samples };
    let outcomes: Vec<Outcome> =
        (0..draws as u64).into_par_iter().map(|i| one_sample(choice, signs, z_j, t, init, tb, flow, seed, tid, i, beta, opts)).collect::<Result<_>>()?;

    let mut rejections = RejectionBreakdown::default();
    for o in &outcomes {
        match o.reject {
            Some(Reject::Constraint) => rejections.constraint += 1,
            Some(Reject::Trapped) => rejections.trapped += 1,
            Some(Reject::Stiff) => rejections.stiff += 1,
            None => {}
        }
    }
    let abs: Vec<f64> = outcomes.iter().map(|o| o.value.abs()).collect();
    let total_abs = pairwise_sum(&abs);
    let frac_of = |pred: &dyn Fn(&Outcome) -> bool| {
        let part: Vec<f64> = outcomes.iter().map(|o| if pred(o) { o.value.abs() } else { 0.0 }).collect();
        if total_abs > 0.0 {
            pairwise_sum(&part) / total_abs
        } else {
            0.0
        }
    };
    let energy_cut_fraction = opts.cutoff.map(|_| frac_of(&|o: &Outcome| o.energy_cut));
    let clipped_fraction = opts.cutoff.and_then(|c| c.lambda).map(|_| frac_of(&|o: &Outcome| o.clipped));
    let values: Vec<f64> = outcomes.iter().map(|o| if o.clipped { 0.0 } else { o.value }).collect();
    let (value, std_error) = if n == 0 { (values[0], 0.0) } else { mean_and_stderr(&values) };
    let count = outcomes.len() as f64;
    let overlap_fractions =
        opts.overlap_deltas.iter().enumerate().map(|(d, &delta)| (delta, outcomes.iter().filter(|o| o.overlaps[d]).count() as f64 / count)).collect();
    Ok(TermEstimate {
        term,
        estimate: MarginalEstimate { value, std_error, n_samples, seed, rejected_fraction: rejections.total() as f64 / count, rejections },
        abs_mean: total_abs / count,
        overlap_fractions,
        energy_cut_fraction,
        clipped_fraction,
        recollided_fraction: outcomes.iter().filter(|o| o.recollided).count() as f64 / count,
        numeric_scatterings: outcomes.iter().map(|o| o.numeric).sum(),
        values: if opts.keep_values { values } else { Vec::new() },
    })
}

/// Estimates `𝒯_σ(z_j, t)` for one tree along the Boltzmann backward flow.
#[allow(clippy::too_many_arguments)]
pub fn sample_term_bbf(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    t: f64,
    init: &InitialData,
    tb: &TwoBody,
    n_samples: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TermEstimate> {
    run_term(TreeChoice::Fixed(tree), signs, z_j, t, init, tb, None, n_samples, seed, opts)
}

/// Estimates `𝒯ᵉ_σ(z_j, t)` along the interacting backward flow. The
/// ε-separation of a created particle from third particles enters through
/// the flow, which rejects such points; `Nε² = 1` is required.
#[allow(clippy::too_many_arguments)]
pub fn sample_term_ibf(
    tree: &TreeGraph,
    signs: &SignSequence,
    z_j: &[PhasePoint],
    t: f64,
    init: &InitialData,
    epsilon: f64,
    n_particles: usize,
    tb: &TwoBody,
    n_samples: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TermEstimate> {
    check_scaling(epsilon, n_particles)?;
    check_separated(z_j, epsilon)?;
    run_term(TreeChoice::Fixed(tree), signs, z_j, t, init, tb, Some(epsilon), n_samples, seed, opts)
}

pub(crate) fn check_scaling(epsilon: f64, n_particles: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let s = n_particles as f64 * epsilon * epsilon;
    if (s - 1.0).abs() > 1e-2 {
        return Err(Error::Precondition(format!("N ε² = {s}, expected 1")));
    }
    Ok(())
}

pub(crate) fn check_separated(z_j: &[PhasePoint], epsilon: f64) -> Result<()> {
    for i in 0..z_j.len() {
        for k in i + 1..z_j.len() {
            if (z_j[i].x - z_j[k].x).norm() <= epsilon {
                return Err(Error::Precondition(format!("particles {} and {} are within ε", i + 1, k + 1)));
            }
        }
    }
    Ok(())
}
