//! Parameter sets of the subcommands. Each struct is both a clap argument
//! group and a serde record, so the same names work as flags, as keys of
//! the config document and in the header echoed into every output.

use clap::Args;
use serde::{Deserialize, Serialize};

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::OneParticleDensity;
use kinetic_limit::potentials::{PotentialSpec, RadialPotential};
use kinetic_limit::trees_flows::{CollisionParams, SignSequence, TreeGraph};
use kinetic_limit::{Error, Result, Vec3};

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// Potential family given positionally; overrides `--potential`.
    #[arg(value_name = "FAMILY")]
    #[serde(skip)]
    pub family_arg: Option<String>,
    /// zero, inverse-power-truncated, smooth-junction, arctan-wall,
    /// piecewise-well, cutoff-lennard-jones or tabulated.
    #[arg(long = "potential", default_value = "smooth-junction")]
    pub family: String,
    /// Junction or core radius (smooth-junction, piecewise-well).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Power-law exponent (inverse-power-truncated, smooth-junction, piecewise-well).
    #[arg(long)]
    pub k: Option<f64>,
    /// Wall parameter of arctan-wall.
    #[arg(long = "eps")]
    pub wall_eps: Option<f64>,
    #[arg(long)]
    pub lj_sigma: Option<f64>,
    #[arg(long)]
    pub lj_depth: Option<f64>,
    /// Tabulated radii, comma separated, ending at 1.
    #[arg(long, allow_hyphen_values = true)]
    pub radii: Option<String>,
    /// Tabulated values, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
}

impl PotentialParams {
    pub fn spec(&self) -> Result<PotentialSpec> {
        let or = |x: Option<f64>, d: f64| x.unwrap_or(d);
        Ok(match self.family.as_str() {
            "zero" => PotentialSpec::Zero,
            "inverse-power-truncated" => PotentialSpec::InversePowerTruncated { k: or(self.k, 4.0) },
            "smooth-junction" => PotentialSpec::SmoothJunction { delta: or(self.delta, 0.1), k: or(self.k, 20.0) },
            "arctan-wall" => PotentialSpec::ArctanWall { eps: or(self.wall_eps, 0.1) },
            "piecewise-well" => PotentialSpec::PiecewiseWell { delta: or(self.delta, 0.1), k: or(self.k, 4.0) },
            "cutoff-lennard-jones" => PotentialSpec::CutoffLennardJones { sigma: or(self.lj_sigma, 0.4), depth: or(self.lj_depth, 1.0) },
            "tabulated" => {
                let r = self.radii.as_deref().ok_or_else(|| Error::Config("tabulated needs --radii".into()))?;
                let v = self.values.as_deref().ok_or_else(|| Error::Config("tabulated needs --values".into()))?;
                PotentialSpec::Tabulated { radii: parse_list(r)?, values: parse_list(v)? }
            }
            other => return Err(Error::Config(format!("unknown potential family {other:?}"))),
        })
    }

    pub fn build(&self) -> Result<RadialPotential> {
        RadialPotential::new(self.spec()?)
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    /// gaussian, bimodal, box-maxwellian or gaussian-box.
    #[arg(long, default_value = "gaussian")]
    pub density: String,
    #[arg(long, default_value_t = 1.0)]
    pub x_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Centre offset of the bimodal density.
    #[arg(long, default_value_t = 0.8)]
    pub offset: f64,
    /// Box half width of box-maxwellian and gaussian-box.
    #[arg(long, default_value_t = 4.0)]
    pub half_width: f64,
}

impl DensityParams {
    pub fn build(&self) -> Result<OneParticleDensity> {
        let d = match self.density.as_str() {
            "gaussian" => OneParticleDensity::Gaussian { x_sigma: self.x_sigma, beta: self.beta },
            "bimodal" => OneParticleDensity::Bimodal { x_sigma: self.x_sigma, offset: self.offset, beta: self.beta },
            "box-maxwellian" => OneParticleDensity::BoxMaxwellian { half_width: self.half_width, beta: self.beta },
            "gaussian-box" => OneParticleDensity::GaussianBox { x_sigma: self.x_sigma, half_width: self.half_width, beta: self.beta },
            other => return Err(Error::Config(format!("unknown density {other:?}"))),
        };
        d.validate()?;
        Ok(d)
    }
}

/// A tree, its signs, the particles at time `t` and the collision parameters.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowInput {
    /// Progenitor labels k₁ … k_n, comma separated.
    #[arg(long = "tree", allow_hyphen_values = true, default_value = "")]
    pub tree: String,
    /// Sign string such as "+-".
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub signs: String,
    /// Particles as "x,y,z,vx,vy,vz" separated by ';'.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0.5,0,0")]
    pub z: String,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Creation times, comma separated and decreasing.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub times: String,
    /// Impact vectors "x,y,z" separated by ';'.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub nus: String,
    /// Created velocities "x,y,z" separated by ';'.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub velocities: String,
}

impl FlowInput {
    pub fn particles(&self) -> Result<Vec<PhasePoint>> {
        parse_particles(&self.z)
    }

    pub fn tree(&self) -> Result<TreeGraph> {
        TreeGraph::new(self.particles()?.len(), parse_labels(&self.tree)?)
    }

    pub fn signs(&self) -> Result<SignSequence> {
        self.signs.parse()
    }

    pub fn params(&self) -> Result<CollisionParams> {
        Ok(CollisionParams { times: parse_list(&self.times)?, nus: parse_vectors(&self.nus)?, velocities: parse_vectors(&self.velocities)? })
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse::<f64>().map_err(|e| Error::Config(format!("bad number {x:?}: {e}")))).collect()
}

pub fn parse_labels(s: &str) -> Result<Vec<usize>> {
    s.split([',', ' '])
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|e| Error::Config(format!("bad label {x:?}: {e}"))))
        .collect()
}

pub fn parse_vectors(s: &str) -> Result<Vec<Vec3>> {
    s.split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            let v = parse_list(x)?;
            if v.len() != 3 {
                return Err(Error::Config(format!("expected 3 components in {x:?}")));
            }
            Ok(Vec3::new(v[0], v[1], v[2]))
        })
        .collect()
}

pub fn parse_particles(s: &str) -> Result<Vec<PhasePoint>> {
    s.split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            let v = parse_list(x)?;
            if v.len() != 6 {
                return Err(Error::Config(format!("expected x,y,z,vx,vy,vz in {x:?}")));
            }
            Ok(PhasePoint::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5])))
        })
        .collect()
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMapParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    /// Energy V²/2 of the relative motion.
    #[arg(long, default_value_t = 9.0)]
    pub e0: f64,
    #[arg(long, default_value_t = 200)]
    pub rho_points: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[arg(long, default_value_t = 9.0)]
    pub e0: f64,
    /// Number of Θ values in (0, π/2).
    #[arg(long, default_value_t = 90)]
    pub theta_points: usize,
    /// ρ grid of the branch decomposition.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapCurveParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[arg(long, default_value_t = 400)]
    pub y_points: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeCountParams {
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Also list every tree.
    #[arg(long, default_value_t = false)]
    pub list: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub flow: FlowInput,
    /// Number of equally spaced output times in [0, t].
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// Interaction range ε (interacting flow only).
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// exact or numeric scattering in the interacting flow.
    #[arg(long, default_value = "exact")]
    pub mode: String,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub flow: FlowInput,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub grid_points: usize,
    #[arg(long, default_value = "exact")]
    pub mode: String,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTermParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub density: DensityParams,
    /// Must equal the number of particles in `z`.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Progenitor labels, comma separated; must have n entries.
    #[arg(long = "tree", allow_hyphen_values = true, default_value = "1")]
    pub tree: String,
    #[arg(long, allow_hyphen_values = true, default_value = "+")]
    pub signs: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0.5,0,0")]
    pub z: String,
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// bbf or ibf.
    #[arg(long, default_value = "bbf")]
    pub flow: String,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Defaults to round(ε⁻²).
    #[arg(long)]
    pub n_particles: Option<usize>,
    /// product or excluded-volume initial data.
    #[arg(long, default_value = "product")]
    pub init: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// outgoing or incoming.
    #[arg(long, default_value = "outgoing")]
    pub parametrization: String,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceParams {
    #[command(flatten)]
    #[serde(flatten)]
    pub potential: PotentialParams,
    #[command(flatten)]
    #[serde(flatten)]
    pub density: DensityParams,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0.5,0,0")]
    pub z: String,
    #[arg(long, default_value_t = 0.3)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "1e-2,3e-3,1e-3")]
    pub epsilons: String,
    #[arg(long, default_value_t = 3)]
    pub n_bar: usize,
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta_cutoff: f64,
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 64)]
    pub min_samples: usize,
}
