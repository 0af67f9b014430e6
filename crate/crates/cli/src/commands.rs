//! One function per subcommand. Each returns the columns or JSON result and
//! a summary; the caller wraps them into a [`Document`](crate::Document).

use std::f64::consts::FRAC_PI_2;

use serde_json::{json, Value};

use kinetic_limit::cross_section::{branch_decompose, sigma_at};
use kinetic_limit::hierarchy_mc::{convergence_experiment, sample_term_bbf, sample_term_ibf, InitialData, Parametrization, SamplerOptions, SeriesConfig};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::trees_flows::{build_bbf, build_ibf, compare_flows, enumerate_trees, tree_count, CompareOptions, IbfOptions, ScatteringMode, TreeGraph};
use kinetic_limit::two_body::{trap_curve, TwoBody, TwoBodyOptions};
use kinetic_limit::{Error, Result};

use crate::output::{num, Body};
use crate::params::*;

pub struct Outcome {
    pub summary: Value,
    pub body: Body,
    pub partial: bool,
}

fn csv(columns: &[&str], rows: Vec<Vec<String>>, summary: Value) -> Outcome {
    Outcome { summary, body: Body::Csv { columns: columns.iter().map(|c| c.to_string()).collect(), rows }, partial: false }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result types serialize")
}

/// Two-body solver with the given quadrature tolerance, or the defaults
/// (`fast` selects the looser Monte Carlo tolerances).
pub fn two_body(pot: RadialPotential, tol: Option<f64>, fast: bool) -> TwoBody {
    let mut o = if fast { TwoBodyOptions::fast() } else { TwoBodyOptions::default() };
    if let Some(t) = tol {
        o.quad.abs_tol = t;
        o.quad.rel_tol = t;
    }
    TwoBody::with_options(pot, o)
}

fn speed(e0: f64) -> Result<f64> {
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::Config(format!("e0 must be positive, got {e0}")));
    }
    Ok((2.0 * e0).sqrt())
}

fn excluded(e: &Error) -> bool {
    matches!(e, Error::TrappedOrSingular(_) | Error::NoInteraction { .. } | Error::IntegrationStiff { .. })
}

pub fn scattering_map(p: &ScatteringMapParams, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, false);
    let sp = speed(p.e0)?;
    if p.rho_points == 0 {
        return Err(Error::Config("rho_points must be positive".into()));
    }
    let mut rows = Vec::with_capacity(p.rho_points);
    for i in 0..p.rho_points {
        let rho = (i as f64 + 0.5) / p.rho_points as f64;
        let row = tb.scatter(rho, sp).and_then(|s| Ok((s, tb.dtheta_drho(rho, sp)?)));
        rows.push(match row {
            Ok((s, d)) => vec![num(rho), num(s.theta), num(d), num(s.tau_star), num(s.r_star), "false".into()],
            Err(e) if excluded(&e) => vec![num(rho), num(f64::NAN), num(f64::NAN), num(f64::NAN), num(f64::NAN), "true".into()],
            Err(e) => return Err(e),
        });
    }
    let dec = branch_decompose(&tb, sp, p.rho_points.max(64))?;
    let summary = json!({
        "speed": sp,
        "quadrature": { "abs_tol": tb.options().quad.abs_tol, "rel_tol": tb.options().quad.rel_tol },
        "branches": dec.branches,
        "exclusions": dec.exclusions,
    });
    Ok(csv(&["rho", "theta", "dtheta", "tau_star", "r_star", "excluded"], rows, summary))
}

pub fn cross_section(p: &CrossSectionParams, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, false);
    let dec = branch_decompose(&tb, speed(p.e0)?, p.grid)?;
    let nb = dec.branches.len();
    let mut columns = vec!["theta".to_string(), "sigma_total".to_string()];
    columns.extend((1..=nb).map(|b| format!("sigma_branch_{b}")));
    columns.push("excluded".into());
    let mut rows = Vec::with_capacity(p.theta_points);
    for i in 0..p.theta_points {
        let theta = FRAC_PI_2 * (i as f64 + 0.5) / p.theta_points as f64;
        let mut row = vec![num(theta)];
        match sigma_at(&tb, &dec, theta) {
            Ok(s) => {
                row.push(num(s.sigma));
                row.extend(s.per_branch.iter().map(|b| num(b.unwrap_or(0.0))));
                row.push(s.branch_edge_singular.to_string());
            }
            Err(Error::NoPreimage(_)) => {
                row.push(num(0.0));
                row.extend((0..nb).map(|_| num(0.0)));
                row.push("false".into());
            }
            Err(e) if excluded(&e) => {
                row.extend((0..=nb).map(|_| num(f64::NAN)));
                row.push("true".into());
            }
            Err(e) => return Err(e),
        }
        rows.push(row);
    }
    let summary = json!({ "speed": dec.speed, "branches": dec.branches, "exclusions": dec.exclusions });
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    Ok(csv(&cols, rows, summary))
}

pub fn trap_curve_cmd(p: &TrapCurveParams) -> Result<Outcome> {
    let pot = p.potential.build()?;
    let grid: Vec<f64> = (1..=p.y_points).map(|i| i as f64 / (p.y_points + 1) as f64).collect();
    let c = trap_curve(&pot, &grid);
    let rows = c.points.iter().map(|q| vec![num(q.y), num(q.x), num(q.yv), q.is_physical().to_string()]).collect();
    let summary = json!({ "physical_runs": c.physical_runs, "arc_length": c.arc_length(), "physical_is_empty": c.physical_is_empty() });
    Ok(csv(&["y", "X", "Y", "physical"], rows, summary))
}

pub fn tree_count_cmd(p: &TreeCountParams) -> Result<Outcome> {
    let count = tree_count(p.j, p.n)?;
    let summary = json!({ "count": count });
    if p.list {
        let rows = enumerate_trees(p.j, p.n)?.enumerate().map(|(i, t)| vec![i.to_string(), t.to_string()]).collect();
        Ok(csv(&["index", "k"], rows, summary))
    } else {
        Ok(csv(&["j", "n", "count"], vec![vec![p.j.to_string(), p.n.to_string(), count.to_string()]], summary))
    }
}

fn scattering_mode(mode: &str) -> Result<ScatteringMode> {
    match mode {
        "exact" => Ok(ScatteringMode::TwoBodyExact),
        "numeric" => Ok(ScatteringMode::Numeric),
        other => Err(Error::Config(format!("mode must be exact or numeric, got {other:?}"))),
    }
}

fn trace_times(t: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![t],
        m => (0..m).map(|i| t * (m - 1 - i) as f64 / (m - 1) as f64).collect(),
    }
}

fn trace_rows(snaps: impl Iterator<Item = (f64, Vec<kinetic_limit::dynamics::PhasePoint>)>) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (s, ps) in snaps {
        for (i, q) in ps.iter().enumerate() {
            rows.push(vec![num(s), (i + 1).to_string(), num(q.x.x), num(q.x.y), num(q.x.z), num(q.v.x), num(q.v.y), num(q.v.z)]);
        }
    }
    rows
}

const TRACE_COLUMNS: [&str; 8] = ["time", "particle", "x", "y", "z", "vx", "vy", "vz"];

pub fn bbf_trace(p: &TraceParams, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, false);
    let f = &p.flow;
    let traj = build_bbf(&f.tree()?, &f.signs()?, &f.particles()?, &f.params()?, f.t, &tb)?;
    let snaps = trace_times(f.t, p.points).into_iter().map(|s| Ok((s, traj.state_at(s)?))).collect::<Result<Vec<_>>>()?;
    let summary = json!({ "tree": traj.tree.to_string(), "signs": traj.signs.to_string(), "creations": traj.creations });
    Ok(csv(&TRACE_COLUMNS, trace_rows(snaps.into_iter()), summary))
}

pub fn ibf_trace(p: &TraceParams, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, false);
    let f = &p.flow;
    let opts = IbfOptions { mode: scattering_mode(&p.mode)?, sample_times: trace_times(f.t, p.points), ..Default::default() };
    let traj = build_ibf(&f.tree()?, &f.signs()?, &f.particles()?, &f.params()?, f.t, p.epsilon, &tb, &opts)?;
    let summary = json!({
        "tree": traj.tree.to_string(),
        "signs": traj.signs.to_string(),
        "creations": traj.creations,
        "recollided": traj.recollided,
        "energy_drift": traj.energy_drift,
        "numeric_scatterings": traj.numeric_scatterings,
    });
    Ok(csv(&TRACE_COLUMNS, trace_rows(traj.samples.into_iter().map(|s| (s.time, s.particles))), summary))
}

pub fn compare(p: &CompareParams, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, false);
    let f = &p.flow;
    let opts = CompareOptions { grid_points: p.grid_points, ibf: IbfOptions { mode: scattering_mode(&p.mode)?, ..Default::default() } };
    let c = compare_flows(&f.tree()?, &f.signs()?, &f.particles()?, &f.params()?, f.t, p.epsilon, &tb, &opts)?;
    Ok(Outcome { summary: json!({}), body: Body::Json(to_json(&c)), partial: false })
}

pub fn mc_term(p: &McTermParams, seed: u64, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, true);
    let f0 = p.density.build()?;
    let z = parse_particles(&p.z)?;
    if z.len() != p.j {
        return Err(Error::Config(format!("j = {} but z holds {} particles", p.j, z.len())));
    }
    let labels = parse_labels(&p.tree)?;
    if labels.len() != p.n {
        return Err(Error::Config(format!("n = {} but the tree has {} labels", p.n, labels.len())));
    }
    let tree = TreeGraph::new(p.j, labels)?;
    let signs = p.signs.parse()?;
    let n_particles = match p.n_particles {
        Some(n) => n,
        None => (p.epsilon * p.epsilon).recip().round() as usize,
    };
    let init = match p.init.as_str() {
        "product" => InitialData::product(f0),
        "excluded-volume" => InitialData::excluded_volume(f0, n_particles, p.epsilon),
        other => return Err(Error::Config(format!("init must be product or excluded-volume, got {other:?}"))),
    };
    let parametrization = match p.parametrization.as_str() {
        "outgoing" => Parametrization::Outgoing,
        "incoming" => Parametrization::Incoming,
        other => return Err(Error::Config(format!("parametrization must be outgoing or incoming, got {other:?}"))),
    };
    let opts = SamplerOptions { parametrization, ..Default::default() };
    let est = match p.flow.as_str() {
        "bbf" => sample_term_bbf(&tree, &signs, &z, p.t, &init, &tb, p.samples, seed, &opts)?,
        "ibf" => sample_term_ibf(&tree, &signs, &z, p.t, &init, p.epsilon, n_particles, &tb, p.samples, seed, &opts)?,
        other => return Err(Error::Config(format!("flow must be bbf or ibf, got {other:?}"))),
    };
    Ok(Outcome { summary: json!({ "n_particles": n_particles }), body: Body::Json(to_json(&est)), partial: false })
}

pub fn convergence(p: &ConvergenceParams, seed: u64, tol: Option<f64>) -> Result<Outcome> {
    let tb = two_body(p.potential.build()?, tol, true);
    let init = InitialData::product(p.density.build()?);
    let z = parse_particles(&p.z)?;
    let eps = parse_list(&p.epsilons)?;
    let config = SeriesConfig { n_bar: p.n_bar, mu: p.mu, lambda: p.lambda, beta_cutoff: p.beta_cutoff, min_samples: p.min_samples, ..Default::default() };
    let table = convergence_experiment(z.len(), &z, p.t, &eps, &config, &tb, &init, p.budget, seed)?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.epsilon),
                r.n_particles.to_string(),
                num(r.boltzmann),
                num(r.interacting),
                num(r.gap),
                num(r.err),
                num(r.paired_err),
                num(r.delta),
                num(r.overlap_fraction),
                num(r.cutoff_fraction),
                opt(r.clipped_fraction),
                num(r.rejected_fraction),
                num(r.recollided_fraction),
                r.partial.to_string(),
            ]
        })
        .collect();
    let partial = table.rows.iter().any(|r| r.partial);
    let summary = json!({ "boltzmann": table.boltzmann, "slope": table.slope, "gamma_reference": table.gamma_reference });
    let mut out = csv(
        &[
            "epsilon",
            "n_particles",
            "boltzmann",
            "interacting",
            "gap",
            "err",
            "paired_err",
            "delta",
            "overlap_fraction",
            "cutoff_fraction",
            "clipped_fraction",
            "rejected_fraction",
            "recollided_fraction",
            "partial",
        ],
        rows,
        summary,
    );
    out.partial = partial;
    Ok(out)
}
