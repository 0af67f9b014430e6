//! Series assembly and the ε sweep.

use serde::{Deserialize, Serialize};

use super::initial::InitialData;
use super::sampler::{check_scaling, check_separated, run_term, CutoffDiagnostics, SamplerOptions, TermEstimate, TreeChoice};
use super::{MarginalEstimate, RejectionBreakdown};
use crate::dynamics::PhasePoint;
use crate::error::{Error, Result};
use crate::numerics::mean_and_stderr;
use crate::trees_flows::{default_delta, omega_j_membership, tree_count, SignSequence, TreeGraph};
use crate::two_body::TwoBody;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaFactor {
    pub value: f64,
    /// `n > N − j`: there are not enough particles and the factor is 0.
    pub exceeds: bool,
}

/// `α_n^ε(j) = ε^{2n} (N−j)(N−j−1)⋯(N−j−n+1)`.
pub fn alpha_factor(epsilon: f64, n_particles: usize, n: usize, j: usize) -> AlphaFactor {
    if n + j > n_particles {
        return AlphaFactor { value: 0.0, exceeds: true };
    }
    let e2 = epsilon * epsilon;
    let value = (0..n).map(|i| e2 * (n_particles - j - i) as f64).product();
    AlphaFactor { value, exceeds: false }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub n_bar: usize,
    pub mu: f64,
    /// Kernel-product clip exponent; `None` keeps every sample.
    pub lambda: Option<f64>,
    /// Overlap radius; `None` uses `ε^{1−μ}(log ε)²`.
    pub delta: Option<f64>,
    /// `β` in the energy cutoff `β/2 Σv² < |log ε|`.
    pub beta_cutoff: f64,
    /// Smallest sample count per `(n, σ)` stratum.
    pub min_samples: usize,
    /// A warning is issued when `t` reaches this value.
    pub short_time_radius: Option<f64>,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { n_bar: 3, mu: 0.1, lambda: None, delta: None, beta_cutoff: 1.0, min_samples: 64, short_time_radius: None }
    }
}

impl SeriesConfig {
    pub fn delta_at(&self, epsilon: f64) -> f64 {
        self.delta.unwrap_or_else(|| default_delta(epsilon, self.mu))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SeriesMode {
    Boltzmann,
    Interacting { epsilon: f64, n_particles: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderContribution {
    pub n: usize,
    pub alpha: f64,
    /// `α Σ_σ (−1)^{|σ|} Σ_Γ 𝒯`.
    pub value: f64,
    pub std_error: f64,
    /// `α Σ_σ |Σ_Γ 𝒯|`, the scale used by the tail estimate.
    pub abs_mass: f64,
    pub terms: Vec<TermEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEstimate {
    pub estimate: MarginalEstimate,
    pub orders: Vec<OrderContribution>,
    /// `a_n̄ q/(1 − q)` with `q` the largest ratio of successive `abs_mass`,
    /// infinite when `q ≥ 1` or fewer than two orders are available.
    pub tail_bound: f64,
    pub geometric_ratio: Option<f64>,
    /// The budget ran out before `n̄`.
    pub partial: bool,
    pub warnings: Vec<String>,
    pub overlap_fractions: Vec<(f64, f64)>,
    pub energy_cut_fraction: Option<f64>,
    pub clipped_fraction: Option<f64>,
    pub recollided_fraction: f64,
}

/// Samples per `σ` pattern at each order `1..=n̄`, proportional to
/// `tⁿ·|Γ(j, n)|/n!` and at least `min_samples`. Stops early when the budget
/// cannot cover an order; the flag reports that.
fn allocate(j: usize, t: f64, n_bar: usize, budget: usize, min_samples: usize) -> Result<(Vec<usize>, bool)> {
    let mut w = Vec::with_capacity(n_bar);
    let mut fact = 1.0;
    for n in 1..=n_bar {
        fact *= n as f64;
        w.push(t.powi(n as i32) * tree_count(j, n)? as f64 / fact);
    }
    let total: f64 = w.iter().sum();
    let mut out = Vec::new();
    let mut used = 0usize;
    for (i, wn) in w.iter().enumerate() {
        let patterns = 1usize << (i + 1);
        let share = if total > 0.0 { (budget as f64 * wn / total / patterns as f64).floor() as usize } else { 0 };
        let s = share.max(min_samples.max(2));
        if used + s * patterns > budget {
            return Ok((out, true));
        }
        used += s * patterns;
        out.push(s);
    }
    Ok((out, false))
}

/// `Σ_{n ≤ n̄} Σ_σ (−1)^{|σ|} [α_n] Σ_Γ 𝒯` with trees summed by uniform
/// sampling inside each `(n, σ)` stratum.
#[allow(clippy::too_many_arguments)]
pub fn assemble_series(
    j: usize,
    z_j: &[PhasePoint],
    t: f64,
    config: &SeriesConfig,
    mode: SeriesMode,
    tb: &TwoBody,
    init: &InitialData,
    budget: usize,
    seed: u64,
) -> Result<SeriesEstimate> {
    assemble_with(j, z_j, t, config, mode, tb, init, budget, seed, Vec::new(), false)
}

#[allow(clippy::too_many_arguments)]
fn assemble_with(
    j: usize,
    z_j: &[PhasePoint],
    t: f64,
    config: &SeriesConfig,
    mode: SeriesMode,
    tb: &TwoBody,
    init: &InitialData,
    budget: usize,
    seed: u64,
    overlap_deltas: Vec<f64>,
    keep_values: bool,
) -> Result<SeriesEstimate> {
    if z_j.len() != j || j == 0 {
        return Err(Error::InvalidArgument(format!("expected {j} ≥ 1 particles, got {}", z_j.len())));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    if !omega_j_membership(z_j) {
        return Err(Error::Precondition("z_j has a pair on a collision course".into()));
    }
    let epsilon = match mode {
        SeriesMode::Boltzmann => None,
        SeriesMode::Interacting { epsilon, n_particles } => {
            check_scaling(epsilon, n_particles)?;
            check_separated(z_j, epsilon)?;
            Some(epsilon)
        }
    };
    let mut warnings = Vec::new();
    if let Some(r) = config.short_time_radius {
        if t >= r {
            warnings.push(format!("t = {t} is not below the configured short-time radius {r}"));
        }
    }

    if t == 0.0 {
        let value = init.marginal(z_j);
        let estimate = MarginalEstimate { value, std_error: 0.0, n_samples: 0, seed, rejected_fraction: 0.0, rejections: RejectionBreakdown::default() };
        let order = OrderContribution { n: 0, alpha: 1.0, value, std_error: 0.0, abs_mass: value.abs(), terms: Vec::new() };
        return Ok(SeriesEstimate {
            estimate,
            orders: vec![order],
            tail_bound: 0.0,
            geometric_ratio: None,
            partial: false,
            warnings,
            overlap_fractions: overlap_deltas.iter().map(|&d| (d, 0.0)).collect(),
            energy_cut_fraction: None,
            clipped_fraction: None,
            recollided_fraction: 0.0,
        });
    }

    let (alloc, partial) = allocate(j, t, config.n_bar, budget, config.min_samples)?;
    let opts = SamplerOptions {
        overlap_deltas: overlap_deltas.clone(),
        cutoff: epsilon.map(|e| CutoffDiagnostics { epsilon: e, beta: config.beta_cutoff, lambda: config.lambda }),
        keep_values,
        ..Default::default()
    };

    let mut orders = Vec::new();
    let empty = TreeGraph::new(j, vec![])?;
    let free = run_term(TreeChoice::Fixed(&empty), &SignSequence::new(vec![]), z_j, t, init, tb, epsilon, 1, seed, &opts)?;
    orders.push(OrderContribution { n: 0, alpha: 1.0, value: free.estimate.value, std_error: 0.0, abs_mass: free.estimate.value.abs(), terms: vec![free] });
    for (i, &samples) in alloc.iter().enumerate() {
        let n = i + 1;
        let alpha = match mode {
            SeriesMode::Boltzmann => 1.0,
            SeriesMode::Interacting { epsilon, n_particles } => alpha_factor(epsilon, n_particles, n, j).value,
        };
        let mut terms = Vec::new();
        let (mut value, mut var, mut abs_mass) = (0.0, 0.0, 0.0);
        for signs in SignSequence::all(n) {
            let est = run_term(TreeChoice::Uniform { j, n }, &signs, z_j, t, init, tb, epsilon, samples, seed, &opts)?;
            value += alpha * signs.term_sign() * est.estimate.value;
            var += (alpha * est.estimate.std_error).powi(2);
            abs_mass += alpha * est.estimate.value.abs();
            terms.push(est);
        }
        orders.push(OrderContribution { n, alpha, value, std_error: var.sqrt(), abs_mass, terms });
    }

    let mut ratio: Option<f64> = None;
    for w in orders.windows(2).skip(1) {
        let q = if w[0].abs_mass > 0.0 { w[1].abs_mass / w[0].abs_mass } else { f64::INFINITY };
        ratio = Some(ratio.map_or(q, |r| r.max(q)));
    }
    if ratio.is_none() && orders.len() == 2 && orders[0].abs_mass > 0.0 {
        ratio = Some(orders[1].abs_mass / orders[0].abs_mass);
    }
    let last = orders.last().map(|o| o.abs_mass).unwrap_or(0.0);
    let tail_bound = match ratio {
        Some(q) if q < 1.0 => last * q / (1.0 - q),
        _ => f64::INFINITY,
    };
    if matches!(ratio, Some(q) if q >= 1.0) {
        warnings.push("successive orders do not decrease; the truncation is not controlled".into());
    }

    let sampled: Vec<&TermEstimate> = orders.iter().skip(1).flat_map(|o| o.terms.iter()).collect();
    let n_total: usize = sampled.iter().map(|e| e.estimate.n_samples).sum();
    let mut rejections = RejectionBreakdown::default();
    for e in &sampled {
        rejections.add(&e.estimate.rejections);
    }
    let per_sample = |f: &dyn Fn(&TermEstimate) -> f64| {
        if n_total == 0 {
            0.0
        } else {
            sampled.iter().map(|e| f(e) * e.estimate.n_samples as f64).sum::<f64>() / n_total as f64
        }
    };
    let mass: f64 = sampled.iter().map(|e| e.abs_mean).sum();
    let per_mass = |f: &dyn Fn(&TermEstimate) -> Option<f64>| -> Option<f64> {
        let parts: Option<Vec<f64>> = sampled.iter().map(|e| f(e).map(|x| x * e.abs_mean)).collect();
        parts.map(|p| if mass > 0.0 { p.iter().sum::<f64>() / mass } else { 0.0 })
    };
    let overlap_fractions = overlap_deltas.iter().enumerate().map(|(d, &delta)| (delta, per_sample(&|e: &TermEstimate| e.overlap_fractions[d].1))).collect();
    let energy_cut_fraction = if sampled.is_empty() { None } else { per_mass(&|e: &TermEstimate| e.energy_cut_fraction) };
    let clipped_fraction = if sampled.is_empty() { None } else { per_mass(&|e: &TermEstimate| e.clipped_fraction) };
    let recollided_fraction = per_sample(&|e: &TermEstimate| e.recollided_fraction);

    let value: f64 = orders.iter().map(|o| o.value).sum();
    let std_error = orders.iter().map(|o| o.std_error * o.std_error).sum::<f64>().sqrt();
    Ok(SeriesEstimate {
        estimate: MarginalEstimate {
            value,
            std_error,
            n_samples: n_total,
            seed,
            rejected_fraction: if n_total > 0 { rejections.total() as f64 / n_total as f64 } else { 0.0 },
            rejections,
        },
        orders,
        tail_bound,
        geometric_ratio: ratio,
        partial,
        warnings,
        overlap_fractions,
        energy_cut_fraction,
        clipped_fraction,
        recollided_fraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub n_particles: usize,
    pub boltzmann: f64,
    pub interacting: f64,
    /// `f̃^N_j − f_j`.
    pub gap: f64,
    /// `sqrt(se_B² + se_I²)`.
    pub err: f64,
    /// Standard error of the gap from the matched per-sample differences.
    pub paired_err: f64,
    pub delta: f64,
    /// Fraction of Boltzmann samples in `𝒩(δ)`.
    pub overlap_fraction: f64,
    /// Fraction of `|weight|` outside the energy cutoff.
    pub cutoff_fraction: f64,
    pub clipped_fraction: Option<f64>,
    pub rejected_fraction: f64,
    pub recollided_fraction: f64,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub boltzmann: MarginalEstimate,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log|gap|` against `log ε`.
    pub slope: Option<f64>,
    /// Reference rate `1/6` for comparison only.
    pub gamma_reference: f64,
}

/// Least-squares slope of `log y` against `log x` over positive pairs;
/// `None` with fewer than two.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        Some(sxy / sxx)
    } else {
        None
    }
}

/// Runs the Boltzmann assembly once and the interacting assembly at each
/// `ε` with `N = round(ε⁻²)` and excluded-volume data, all on the same
/// seed, and tabulates the gaps.
#[allow(clippy::too_many_arguments)]
pub fn convergence_experiment(
    j: usize,
    z_j: &[PhasePoint],
    t: f64,
    epsilon_list: &[f64],
    config: &SeriesConfig,
    tb: &TwoBody,
    init: &InitialData,
    budget: usize,
    seed: u64,
) -> Result<ConvergenceTable> {
    if epsilon_list.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon list".into()));
    }
    let deltas: Vec<f64> = epsilon_list.iter().map(|&e| config.delta_at(e)).collect();
    let boltz = assemble_with(j, z_j, t, config, SeriesMode::Boltzmann, tb, init, budget, seed, deltas.clone(), true)?;
    let mut rows = Vec::new();
    for (idx, &epsilon) in epsilon_list.iter().enumerate() {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        let n_particles = (epsilon * epsilon).recip().round() as usize;
        let data = InitialData::excluded_volume(init.f0, n_particles, epsilon);
        let inter = assemble_with(j, z_j, t, config, SeriesMode::Interacting { epsilon, n_particles }, tb, &data, budget, seed, Vec::new(), true)?;
        let paired_err = paired_error(&boltz, &inter);
        rows.push(ConvergenceRow {
            epsilon,
            n_particles,
            boltzmann: boltz.estimate.value,
            interacting: inter.estimate.value,
            gap: inter.estimate.value - boltz.estimate.value,
            err: boltz.estimate.std_error.hypot(inter.estimate.std_error),
            paired_err,
            delta: deltas[idx],
            overlap_fraction: boltz.overlap_fractions.get(idx).map_or(0.0, |p| p.1),
            cutoff_fraction: inter.energy_cut_fraction.unwrap_or(0.0),
            clipped_fraction: inter.clipped_fraction,
            rejected_fraction: inter.estimate.rejected_fraction,
            recollided_fraction: inter.recollided_fraction,
            partial: boltz.partial || inter.partial,
        });
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap.abs()).collect();
    Ok(ConvergenceTable { boltzmann: boltz.estimate.clone(), rows, slope: log_log_slope(&eps, &gaps), gamma_reference: 1.0 / 6.0 })
}

/// Standard error of `f̃ − f` from per-sample differences on matched streams.
fn paired_error(b: &SeriesEstimate, i: &SeriesEstimate) -> f64 {
    let mut var = 0.0;
    for (ob, oi) in b.orders.iter().zip(&i.orders).skip(1) {
        for (tb, ti) in ob.terms.iter().zip(&oi.terms) {
            if tb.values.len() != ti.values.len() || tb.values.is_empty() {
                var += (oi.alpha * ti.estimate.std_error).powi(2) + tb.estimate.std_error.powi(2);
                continue;
            }
            let d: Vec<f64> = tb.values.iter().zip(&ti.values).map(|(vb, vi)| oi.alpha * vi - vb).collect();
            var += mean_and_stderr(&d).1.powi(2);
        }
    }
    var.sqrt()
}
