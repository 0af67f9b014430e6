//! Monte Carlo evaluation of the tree expansion: single terms for the
//! Boltzmann and interacting backward flows, the initial data, series
//! assembly and the ε sweep.
//!
//! A term is
//!
//! ```text
//! 𝒯_σ(z_j, t) = ∫ dΛ  Π_r B(ν_r; v_{j+r} − η_{k_r}(t_r))  f_{0,j+n}(ζ(0))
//! ```
//!
//! over ordered times, impact vectors and created velocities, with
//! `B = |ν·V|` restricted to `σ_r ν·V ≥ 0`.

mod initial;
pub mod rng;
mod sampler;
mod series;

use serde::{Deserialize, Serialize};

pub use initial::{initial_marginal_excluded_volume, ExcludedVolumeEstimate, ExcludedVolumeOptions, InitialData, InitialMode, OneParticleDensity};
pub use sampler::{sample_term_bbf, sample_term_ibf, CutoffDiagnostics, Parametrization, SamplerOptions, TermEstimate, TermId, TreeChoice};
pub use series::{
    alpha_factor, assemble_series, convergence_experiment, log_log_slope, AlphaFactor, ConvergenceRow, ConvergenceTable, OrderContribution, SeriesConfig,
    SeriesEstimate, SeriesMode,
};

/// Why samples contributed zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionBreakdown {
    /// Half-space or ε-separation constraint violated.
    pub constraint: usize,
    /// Trapped or singular two-body orbit.
    pub trapped: usize,
    /// Step-size or other integration failure.
    pub stiff: usize,
}

impl RejectionBreakdown {
    pub fn total(&self) -> usize {
        self.constraint + self.trapped + self.stiff
    }

    pub fn add(&mut self, other: &Self) {
        self.constraint += other.constraint;
        self.trapped += other.trapped;
        self.stiff += other.stiff;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarginalEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub rejected_fraction: f64,
    #[serde(default)]
    pub rejections: RejectionBreakdown,
}
