//! The `ddpf` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ddpf_core::correlation::{local_correlation, LatticeSample};
use ddpf_core::scenario::build_two_corridor;
use ddpf_core::{
    CellKind, CostModel, CouplingParams, Geometry, Grid, Neighborhood, RunConfig, Simulation,
    SpeedDistribution,
};

use crate::harness::{run_sweep, SweepSpec};
use crate::records::{
    read_csv, write_csv, AgentRow, CorrelationRow, RunSummaryRow, SweepRow,
};
use crate::{mapfile, pgm};

/// Steps between dynamic field dumps.
pub const DUMP_EVERY: u32 = 10;

#[derive(Debug, Parser)]
#[command(name = "ddpf", version, about = "Dynamic distance potential field route choice simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and print its summary.
    Run(RunArgs),
    /// Run a parameter sweep and write aggregated results as CSV.
    Sweep(SweepArgs),
    /// Local correlation of egress time and load over a sweep CSV.
    Correlate(CorrelateArgs),
    /// Validate and describe a scenario, optionally writing it out.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Scenario file.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Use the built-in two-corridor layout at this scale instead of a file.
    #[arg(long, value_name = "S", conflicts_with = "scenario", allow_negative_numbers = true)]
    pub scale: Option<f64>,
    /// Override the scenario's cell size, in meters.
    #[arg(long = "cell-size", value_name = "M", allow_negative_numbers = true)]
    pub cell_size: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Static field coupling.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub ks: f64,
    /// Step budget per run.
    #[arg(long, default_value_t = 5000)]
    pub tmax: u32,
    /// Number of agents.
    #[arg(long, default_value_t = 4000)]
    pub agents: u32,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "1", allow_negative_numbers = true)]
    pub sadd: String,
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub ksdyn: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-agent CSV output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write PGM images of the static field and, every few steps, the
    /// dynamic field, next to `--out` (or into the current directory).
    #[arg(long = "dump-fields")]
    pub dump_fields: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated, strictly increasing.
    #[arg(long, allow_negative_numbers = true)]
    pub sadd: String,
    /// Comma-separated, strictly increasing.
    #[arg(long, allow_negative_numbers = true)]
    pub ksdyn: String,
    #[arg(long, default_value_t = 10)]
    pub runs: u32,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NeighborhoodArg {
    Vn,
    Moore,
}

impl From<NeighborhoodArg> for Neighborhood {
    fn from(n: NeighborhoodArg) -> Self {
        match n {
            NeighborhoodArg::Vn => Neighborhood::VonNeumann,
            NeighborhoodArg::Moore => Neighborhood::Moore,
        }
    }
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Sweep CSV as written by `sweep`.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "vn")]
    pub neighborhood: NeighborhoodArg,
    /// Output CSV (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub source: Source,
    /// Write the scenario in map format.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command and reports errors on standard error.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Correlate(a) => correlate(a),
        Command::Scenario(a) => scenario(a),
    }
}

pub fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| anyhow!("--{flag}: {s:?} is not a number"))
        })
        .collect::<Result<_>>()?;
    Ok(values)
}

fn check_sadd(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|&&v| v < 1.0) {
        bail!("--sadd values must be at least 1, got {v}");
    }
    Ok(())
}

fn check_ksdyn(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|&&v| v < 0.0) {
        bail!("--ksdyn values must be nonnegative, got {v}");
    }
    Ok(())
}

fn single(flag: &str, values: Vec<f64>) -> Result<f64> {
    match values[..] {
        [v] => Ok(v),
        _ => bail!("--{flag} takes a single value for `run`"),
    }
}

fn load_grid(source: &Source) -> Result<Grid> {
    let grid = match (&source.scenario, source.scale) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read scenario file {}", path.display()))?;
            mapfile::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))?
        }
        (None, Some(scale)) => {
            if !(scale > 0.0 && scale <= 1.0) {
                bail!("--scale must be in (0, 1], got {scale}");
            }
            build_two_corridor(scale)?.grid
        }
        (None, None) => bail!("one of --scenario or --scale is required"),
    };
    match source.cell_size {
        Some(m) if !(m.is_finite() && m > 0.0) => bail!("--cell-size must be positive, got {m}"),
        Some(m) => Ok(grid.with_cell_size(m)?),
        None => Ok(grid),
    }
}

fn base_config(grid: &Grid, model: &ModelArgs) -> Result<RunConfig> {
    if !(model.ks.is_finite() && model.ks >= 0.0) {
        bail!("--ks must be nonnegative, got {}", model.ks);
    }
    if model.agents == 0 {
        bail!("--agents must be at least 1");
    }
    if model.tmax == 0 {
        bail!("--tmax must be at least 1");
    }
    Ok(RunConfig {
        agent_count: model.agents,
        coupling: CouplingParams::new(model.ks, 0.0)?,
        speeds: SpeedDistribution::around_median(1.6, grid.cell_size(), 1.0)?,
        t_max: model.tmax,
        ..RunConfig::new(grid.cell_size())?
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(a: RunArgs) -> Result<()> {
    let s_add = single("sadd", parse_list("sadd", &a.sadd)?)?;
    let k_sdyn = single("ksdyn", parse_list("ksdyn", &a.ksdyn)?)?;
    check_sadd(&[s_add])?;
    check_ksdyn(&[k_sdyn])?;
    let grid = load_grid(&a.source)?;
    let mut config = base_config(&grid, &a.model)?;
    config.cost = CostModel::new(s_add)?;
    config.coupling = CouplingParams::new(a.model.ks, k_sdyn)?;
    config.seed = a.seed;
    let geometry = Geometry::new(grid)?;

    let dump_dir = a
        .out
        .as_deref()
        .and_then(Path::parent)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    if a.dump_fields {
        pgm::dump(&dump_dir, "static", 0, geometry.static_field())
            .with_context(|| format!("cannot write field dump into {}", dump_dir.display()))?;
    }
    let mut sim = Simulation::new(&geometry, config)?;
    while sim.step()? {
        let step = sim.clock() - 1;
        if a.dump_fields && step % DUMP_EVERY == 0 {
            if let Some(field) = sim.dynamic_field() {
                pgm::dump(&dump_dir, "dynamic", step, field).with_context(|| {
                    format!("cannot write field dump into {}", dump_dir.display())
                })?;
            }
        }
    }
    let m = sim.into_metrics();

    if let Some(path) = &a.out {
        let rows: Vec<AgentRow> = m.records.iter().map(AgentRow::from).collect();
        write_csv(create(path)?, &rows).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let summary = RunSummaryRow {
        seed: a.seed,
        s_add,
        k_sdyn,
        total_time: m.total_time,
        mean_egress: m.mean_egress,
        load: m.longer_corridor_load,
        completed: m.completed,
    };
    write_csv(io::stdout().lock(), &[summary])?;
    if !m.completed {
        eprintln!("warning: step budget of {} reached before every agent arrived", a.model.tmax);
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let s_add = parse_list("sadd", &a.sadd)?;
    let k_sdyn = parse_list("ksdyn", &a.ksdyn)?;
    check_sadd(&s_add)?;
    check_ksdyn(&k_sdyn)?;
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let grid = load_grid(&a.source)?;
    let base = base_config(&grid, &a.model)?;
    let geometry = Geometry::new(grid)?;
    let spec = SweepSpec {
        s_add,
        k_sdyn,
        runs: a.runs,
        base_seed: a.seed,
        base,
    };
    let points = run_sweep(&geometry, &spec)?;
    let rows: Vec<SweepRow> = points.iter().map(SweepRow::from).collect();
    write_csv(output(a.out.as_deref())?, &rows)?;

    let mut failed = 0;
    for p in &points {
        if let Some(e) = &p.error {
            eprintln!("error: point s_add={} k_sdyn={} failed: {e}", p.s_add, p.k_sdyn);
            failed += 1;
        } else if p.incomplete_runs() > 0 {
            eprintln!(
                "warning: point s_add={} k_sdyn={}: {} run(s) hit the step budget",
                p.s_add,
                p.k_sdyn,
                p.incomplete_runs()
            );
        }
    }
    if failed > 0 {
        bail!("{failed} sweep point(s) failed");
    }
    Ok(())
}

fn correlate(a: CorrelateArgs) -> Result<()> {
    let file = File::open(&a.input)
        .with_context(|| format!("cannot read sweep file {}", a.input.display()))?;
    let rows: Vec<SweepRow> =
        read_csv(file).with_context(|| format!("malformed sweep file {}", a.input.display()))?;
    let samples: Vec<LatticeSample> = rows
        .iter()
        .map(|r| match (r.mean_egress_mean, r.load_mean) {
            (Some(e), Some(l)) => Ok(LatticeSample {
                s_add: r.s_add,
                k_sdyn: r.k_sdyn,
                mean_egress: e,
                load: l,
            }),
            _ => Err(anyhow!("sweep point s_add={} k_sdyn={} has no data", r.s_add, r.k_sdyn)),
        })
        .collect::<Result<_>>()?;
    let neighborhood = a.neighborhood.into();
    let corr = local_correlation(&samples, neighborhood)
        .map_err(|_| anyhow!("sweep points do not form a full rectangular (s_add, k_sdyn) lattice"))?;
    let out: Vec<CorrelationRow> = corr.iter().map(|c| CorrelationRow::new(c, neighborhood)).collect();
    write_csv(output(a.out.as_deref())?, &out)?;
    Ok(())
}

fn scenario(a: ScenarioArgs) -> Result<()> {
    let grid = load_grid(&a.source)?;
    let geometry = Geometry::new(grid.clone())?;
    let field = geometry.static_field();
    let origin = grid.indices_of(CellKind::Origin);
    let (near, far) = origin.iter().map(|&i| field.value(i)).fold(
        (f64::INFINITY, 0.0f64),
        |(lo, hi), v| (lo.min(v), hi.max(v)),
    );
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "name: {}", grid.name().unwrap_or("-"))?;
    writeln!(stdout, "size: {} x {} cells, {} m per cell", grid.width(), grid.height(), grid.cell_size())?;
    for kind in [CellKind::Free, CellKind::Origin, CellKind::Destination, CellKind::Measurement, CellKind::Wall] {
        writeln!(stdout, "{:?}: {}", kind, grid.count(kind))?;
    }
    writeln!(
        stdout,
        "origin to destination: {:.1} m to {:.1} m",
        near * grid.cell_size(),
        far * grid.cell_size()
    )?;
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        w.write_all(mapfile::serialize(&grid).as_bytes())
            .and_then(|_| w.flush())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}
