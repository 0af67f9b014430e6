//! Command-line front end of `kinetic-limit`.
//!
//! Parameters are resolved in three layers: clap defaults, then the config
//! file (top-level keys, then a table named after the command), then flags
//! given on the command line. The resolved set is echoed into the output
//! header so that `klim replay <file>` reruns it.

pub mod commands;
pub mod output;
pub mod params;

use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use kinetic_limit::{Error, Result};

pub use output::{read_config, Body, Document, RunConfig};
use params::*;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "KLIM_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "klim", version, about = "Scattering maps, backward flows and Monte Carlo hierarchy terms")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the hardware parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; `-` for stdout. Defaults to a file in $KLIM_OUTPUT_DIR, else stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML config document.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Quadrature tolerance of the two-body solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Θ(ρ), dΘ/dρ and τ* at fixed energy.
    ScatteringMap(ScatteringMapParams),
    /// Differential cross-section split by monotonicity branch.
    CrossSection(CrossSectionParams),
    /// Circular-orbit curve in the (L², V²) plane.
    TrapCurve(TrapCurveParams),
    /// Number of collision trees j(j+1)⋯(j+n−1).
    TreeCount(TreeCountParams),
    /// Sampled Boltzmann backward flow.
    BbfTrace(TraceParams),
    /// Sampled interacting backward flow.
    IbfTrace(TraceParams),
    /// Position and velocity gaps between the two backward flows.
    CompareFlows(CompareParams),
    /// Monte Carlo estimate of one hierarchy term.
    McTerm(McTermParams),
    /// Boltzmann against interacting series over a list of ε.
    Convergence(ConvergenceParams),
    /// Rerun the config embedded in an output file.
    Replay { file: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ScatteringMap(_) => "scattering-map",
            Command::CrossSection(_) => "cross-section",
            Command::TrapCurve(_) => "trap-curve",
            Command::TreeCount(_) => "tree-count",
            Command::BbfTrace(_) => "bbf-trace",
            Command::IbfTrace(_) => "ibf-trace",
            Command::CompareFlows(_) => "compare-flows",
            Command::McTerm(_) => "mc-term",
            Command::Convergence(_) => "convergence",
            Command::Replay { .. } => "replay",
        }
    }
}

fn to_map<T: Serialize>(x: &T) -> Map<String, Value> {
    match serde_json::to_value(x).expect("params serialize") {
        Value::Object(m) => m,
        _ => unreachable!("params are records"),
    }
}

fn defaults<P: Args + FromArgMatches + Serialize>() -> Result<Map<String, Value>> {
    let cmd = P::augment_args(clap::Command::new("defaults"));
    let m = cmd.try_get_matches_from(["defaults"]).map_err(|e| Error::Config(e.to_string()))?;
    Ok(to_map(&P::from_arg_matches(&m).map_err(|e| Error::Config(e.to_string()))?))
}

fn overlay(base: &mut Map<String, Value>, extra: &Map<String, Value>, strict: bool) -> Result<()> {
    for (k, v) in extra {
        if base.contains_key(k) {
            base.insert(k.clone(), v.clone());
        } else if strict {
            return Err(Error::Config(format!("unknown key {k:?}")));
        }
    }
    Ok(())
}

/// Top-level keys and the table named after the command.
type FileLayers = (Map<String, Value>, Map<String, Value>);

/// Config document as JSON: top-level keys and the table named `command`.
fn file_layers(path: &Path, command: &str) -> Result<FileLayers> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let json = serde_json::to_value(doc).map_err(|e| Error::Config(e.to_string()))?;
    let Value::Object(mut top) = json else { unreachable!("a TOML document is a table") };
    let table = match top.remove(command) {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(Error::Config(format!("{command} must be a table"))),
        None => Map::new(),
    };
    top.retain(|_, v| !v.is_object());
    Ok((top, table))
}

/// Merges defaults, config file and explicit flags into `P`.
fn resolve<P>(parsed: &P, matches: &ArgMatches, file: Option<&FileLayers>) -> Result<P>
where
    P: Args + FromArgMatches + Serialize + DeserializeOwned,
{
    let mut base = defaults::<P>()?;
    if let Some((top, table)) = file {
        overlay(&mut base, top, false)?;
        overlay(&mut base, table, true)?;
    }
    let given = to_map(parsed);
    for (k, v) in given {
        if matches.value_source(&k) == Some(ValueSource::CommandLine) {
            base.insert(k, v);
        }
    }
    if let Ok(Some(fam)) = matches.try_get_one::<String>("family_arg") {
        base.insert("family".into(), Value::String(fam.clone()));
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(e.to_string()))
}

fn params_value<P: Serialize>(p: &P) -> Value {
    serde_json::to_value(p).expect("params serialize")
}

/// Runs the command described by `config`.
pub fn run_config(config: &RunConfig) -> Result<Document> {
    fn de<P: DeserializeOwned>(v: &Value) -> Result<P> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Config(e.to_string()))
    }
    let (seed, tol, v) = (config.seed, config.tol, &config.params);
    let out = match config.command.as_str() {
        "scattering-map" => commands::scattering_map(&de(v)?, tol)?,
        "cross-section" => commands::cross_section(&de(v)?, tol)?,
        "trap-curve" => commands::trap_curve_cmd(&de(v)?)?,
        "tree-count" => commands::tree_count_cmd(&de(v)?)?,
        "bbf-trace" => commands::bbf_trace(&de(v)?, tol)?,
        "ibf-trace" => commands::ibf_trace(&de(v)?, tol)?,
        "compare-flows" => commands::compare(&de(v)?, tol)?,
        "mc-term" => commands::mc_term(&de(v)?, seed, tol)?,
        "convergence" => commands::convergence(&de(v)?, seed, tol)?,
        other => return Err(Error::Config(format!("unknown command {other:?}"))),
    };
    Ok(Document { config: config.clone(), summary: out.summary, body: out.body, partial: out.partial })
}

/// Resolves the parsed command line into a [`RunConfig`].
pub fn resolve_config(cli: &Cli, matches: &ArgMatches) -> Result<RunConfig> {
    if let Command::Replay { file } = &cli.command {
        let text = std::fs::read_to_string(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
        return read_config(&text);
    }
    let name = cli.command.name();
    let sub = matches.subcommand_matches(name).expect("subcommand matches");
    let file = cli.config.as_deref().map(|p| file_layers(p, name)).transpose()?;
    let mut seed = cli.seed;
    let mut tol = cli.tol;
    if let Some((top, _)) = &file {
        if sub.value_source("seed") != Some(ValueSource::CommandLine) {
            if let Some(s) = top.get("seed") {
                seed = s.as_u64().ok_or_else(|| Error::Config("seed must be a nonnegative integer".into()))?;
            }
        }
        if sub.value_source("tol") != Some(ValueSource::CommandLine) {
            if let Some(t) = top.get("tol") {
                tol = Some(t.as_f64().ok_or_else(|| Error::Config("tol must be a number".into()))?);
            }
        }
    }
    let f = file.as_ref();
    let params = match &cli.command {
        Command::ScatteringMap(p) => params_value(&resolve(p, sub, f)?),
        Command::CrossSection(p) => params_value(&resolve(p, sub, f)?),
        Command::TrapCurve(p) => params_value(&resolve(p, sub, f)?),
        Command::TreeCount(p) => params_value(&resolve(p, sub, f)?),
        Command::BbfTrace(p) | Command::IbfTrace(p) => params_value(&resolve(p, sub, f)?),
        Command::CompareFlows(p) => params_value(&resolve(p, sub, f)?),
        Command::McTerm(p) => params_value(&resolve(p, sub, f)?),
        Command::Convergence(p) => params_value(&resolve(p, sub, f)?),
        Command::Replay { .. } => unreachable!(),
    };
    Ok(RunConfig { command: name.to_string(), seed, tol, params })
}

/// Where the document goes: `--output`, else `$KLIM_OUTPUT_DIR/<command>-<seed>.<ext>`,
/// else stdout (`None`).
pub fn output_path(cli: &Cli, doc: &Document) -> Option<PathBuf> {
    match &cli.output {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{}-{}.{}", doc.config.command, doc.config.seed, doc.extension()))),
    }
}

/// Parses `args`, runs the command and writes the document. Returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from Cli");
    match run(&cli, &matches) {
        Ok(partial) => {
            if partial {
                eprintln!("warning: sample budget exhausted; result is partial");
                4
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &Cli, matches: &ArgMatches) -> Result<bool> {
    let config = resolve_config(cli, matches)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    let doc = pool.install(|| run_config(&config))?;
    let text = doc.render()?;
    match output_path(cli, &doc) {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    if doc.config.command == "scattering-map" {
        eprintln!("branches: {}", doc.summary["branches"]);
    }
    Ok(doc.partial)
}
