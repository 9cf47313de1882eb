//! Command-line front end.

use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::assembly::{assemble, energy_functional, SchemeKind, SchemeSpec, DEFAULT_QUADRATURE};
use crate::error::{Error, Result};
use crate::grid::{cluster_regularity, ClusterPartition, Grid, GridSpec};
use crate::io::{export_system, write_scalar_field, write_vector_field};
use crate::solver::{solve_with, Backend, PressureSpace, SolverOptions};
use crate::verify::{
    checkerboard_exponent, checkerboard_sweep, consistency_check, fmt_f64, infsup_sweep,
    run_convergence, solution_errors, ConvergenceOptions, ManufacturedCase,
};

pub const OUT_ENV: &str = "STOKES_FV_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "stokes-fv", version, about = "Collocated finite volume Stokes solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one manufactured problem and write the fields.
    Solve(Flags),
    /// Convergence study over a list of uniform grids.
    Convergence(Flags),
    /// Stability and consistency diagnostics.
    Probe(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    Checkerboard,
    Infsup,
    Consistency,
    Regularity,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON configuration file; flags given here override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// natural | bp | cluster | cluster-constant
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cells per direction; a comma separated list for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Manufactured case: ms0 | ms1
    #[arg(long = "case")]
    pub case: Option<String>,
    /// Grid description, e.g. `uniform:8` or `tensor:0,0.25,1;0,0.5,1`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output directory (default: $STOKES_FV_OUT, then the working directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Gauss points per direction for the forcing (1, 2 or 3).
    #[arg(long)]
    pub quad: Option<usize>,
    /// Also write the assembled matrix (MatrixMarket) and right-hand side.
    #[arg(long)]
    pub dump_system: bool,
    #[arg(long, value_enum)]
    pub what: Option<Probe>,
    /// full | cluster
    #[arg(long)]
    pub space: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(untagged)]
enum NList {
    #[default]
    Empty,
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SolverKeys {
    tol: Option<f64>,
    backend: Option<Backend>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    scheme: Option<String>,
    lambda: Option<f64>,
    n: NList,
    case: Option<String>,
    grid: Option<GridSpec>,
    out: Option<PathBuf>,
    quad: Option<usize>,
    dump_system: Option<bool>,
    what: Option<Probe>,
    space: Option<String>,
    solver: SolverKeys,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Convergence,
    Probe,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scheme: SchemeKind,
    pub lambda: f64,
    pub n_list: Vec<usize>,
    pub grid: Option<GridSpec>,
    pub case: ManufacturedCase,
    pub out: PathBuf,
    pub solver: SolverOptions,
    pub quad: usize,
    pub dump_system: bool,
    pub what: Probe,
    pub space: PressureSpace,
}

impl RunConfig {
    pub fn resolve(command: CommandKind, flags: &Flags) -> Result<Self> {
        let file: FileConfig = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let scheme = flags
            .scheme
            .clone()
            .or(file.scheme)
            .unwrap_or_else(|| "bp".into())
            .parse()?;
        let lambda = flags.lambda.or(file.lambda).unwrap_or(1.0);
        let n_list = match (&flags.n, file.n) {
            (Some(v), _) => v.clone(),
            (None, NList::One(n)) => vec![n],
            (None, NList::Many(v)) => v,
            (None, NList::Empty) => match command {
                CommandKind::Solve => vec![16],
                CommandKind::Convergence => vec![8, 16, 32],
                CommandKind::Probe => vec![4, 8, 16, 32],
            },
        };
        if n_list.is_empty() {
            return Err(Error::Config("empty list of grid sizes".into()));
        }
        let grid = match &flags.grid {
            Some(s) => Some(s.parse::<GridSpec>().map_err(|e| Error::Config(e.to_string()))?),
            None => file.grid,
        };
        let case = flags
            .case
            .clone()
            .or(file.case)
            .unwrap_or_else(|| "ms1".into())
            .parse()?;
        let out = flags
            .out
            .clone()
            .or(file.out)
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            tol: flags.tol.or(file.solver.tol).unwrap_or(defaults.tol),
            backend: file.solver.backend.unwrap_or(defaults.backend),
            ..defaults
        };
        if !(solver.tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", solver.tol)));
        }
        let quad = flags.quad.or(file.quad).unwrap_or(DEFAULT_QUADRATURE);
        if !(1..=3).contains(&quad) {
            return Err(Error::Config(format!("quadrature order must be 1, 2 or 3, got {quad}")));
        }
        let space = flags
            .space
            .clone()
            .or(file.space)
            .unwrap_or_else(|| "cluster".into())
            .parse()?;
        let cfg = Self {
            command,
            scheme,
            lambda,
            n_list,
            grid,
            case,
            out,
            solver,
            quad,
            dump_system: flags.dump_system || file.dump_system.unwrap_or(false),
            what: flags.what.or(file.what).unwrap_or(Probe::Checkerboard),
            space,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.scheme.uses_lambda() && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidLambda(self.lambda));
        }
        if self.command == CommandKind::Solve && self.grid.is_none() && self.n_list.len() != 1 {
            return Err(Error::Config("solve takes a single grid size".into()));
        }
        if self.scheme.needs_partition() || (self.command == CommandKind::Probe && self.what == Probe::Regularity) {
            for g in self.grids()? {
                ClusterPartition::new(&g).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// The explicit grid when given, otherwise one uniform grid per `n`.
    pub fn grids(&self) -> Result<Vec<Grid>> {
        let grids = match &self.grid {
            Some(g) => vec![g.build()],
            None => self.n_list.iter().map(|&n| Grid::uniform(n)).collect(),
        };
        grids
            .into_iter()
            .map(|g| g.map_err(|e| Error::Config(e.to_string())))
            .collect()
    }

    fn convergence_options(&self) -> ConvergenceOptions {
        ConvergenceOptions {
            quad_order: self.quad,
            solver: self.solver,
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<File> {
    std::fs::create_dir_all(dir)?;
    Ok(File::create(dir.join(name))?)
}

fn write_summary(dir: &Path, rows: &[(&str, String)]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(create(dir, "summary.csv")?);
    wr.write_record(["key", "value"])?;
    for (k, v) in rows {
        wr.write_record([*k, v.as_str()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let grid = cfg.grids()?.remove(0);
    let spec = SchemeSpec::for_grid(cfg.scheme, cfg.lambda, &grid)?;
    let case = cfg.case;
    let sys = assemble(&spec, &grid, |x, y| case.forcing(x, y), cfg.quad)?;
    if cfg.dump_system {
        export_system(&cfg.out, &sys)?;
    }
    let mut summary = vec![
        ("scheme", cfg.scheme.name().to_string()),
        ("lambda", fmt_f64(spec.effective_lambda())),
        ("nx", grid.nx().to_string()),
        ("ny", grid.ny().to_string()),
        ("case", case.id().to_string()),
        ("unknowns", sys.size().to_string()),
    ];
    let rep = match solve_with(&sys, &cfg.solver) {
        Ok(r) => r,
        Err(e) => {
            summary.push(("status", "failed".into()));
            if let Error::Singular { kind, rcond } = &e {
                summary.push(("singularity", kind.to_string()));
                summary.push(("rcond", fmt_f64(*rcond)));
            }
            summary.push(("message", e.to_string()));
            write_summary(&cfg.out, &summary)?;
            return Err(e);
        }
    };
    write_vector_field(create(&cfg.out, "u.csv")?, &grid, &rep.u)?;
    write_scalar_field(create(&cfg.out, "p.csv")?, &grid, &rep.p)?;
    let (ku, stab) = energy_functional(&sys, &rep.u, &rep.p)?;
    let (eu, ep) = solution_errors(&grid, case, &rep.u, &rep.p)?;
    summary.extend([
        ("status", "ok".to_string()),
        ("residual", fmt_f64(rep.residual_norm)),
        ("rcond", fmt_f64(rep.stats.rcond)),
        (
            "interior_rcond",
            rep.stats.interior_rcond.map(fmt_f64).unwrap_or_default(),
        ),
        ("multiplier", fmt_f64(rep.multiplier)),
        ("energy_velocity", fmt_f64(ku)),
        ("energy_stabilization", fmt_f64(stab)),
        ("load", fmt_f64(sys.load(&rep.u))),
        ("err_u_h1", fmt_f64(eu)),
        ("err_p_l2", fmt_f64(ep)),
    ]);
    write_summary(&cfg.out, &summary)
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<()> {
    let spec = SchemeSpec {
        kind: cfg.scheme,
        lambda: cfg.lambda,
        partition: None,
    };
    let table = run_convergence(&spec, cfg.case, &cfg.n_list, &cfg.convergence_options())?;
    table.write_csv(create(&cfg.out, "convergence.csv")?)
}

pub fn cmd_probe(cfg: &RunConfig) -> Result<()> {
    match cfg.what {
        Probe::Checkerboard => {
            let rows = checkerboard_sweep(&cfg.n_list)?;
            let alpha = if rows.len() >= 2 {
                fmt_f64(checkerboard_exponent(&rows))
            } else {
                String::new()
            };
            let mut wr = csv::Writer::from_writer(create(&cfg.out, "checkerboard.csv")?);
            wr.write_record(["n", "h", "dual_cb", "ratio_cb", "ratio_smooth", "decay_exponent"])?;
            for r in rows {
                wr.write_record([
                    r.n.to_string(),
                    fmt_f64(r.h),
                    fmt_f64(r.dual_cb),
                    fmt_f64(r.ratio_cb),
                    fmt_f64(r.ratio_smooth),
                    alpha.clone(),
                ])?;
            }
            wr.flush()?;
        }
        Probe::Infsup => {
            let rows = infsup_sweep(cfg.space, &cfg.n_list)?;
            let space = match cfg.space {
                PressureSpace::Full => "full",
                PressureSpace::ClusterConstant => "cluster",
            };
            let mut wr = csv::Writer::from_writer(create(&cfg.out, "infsup.csv")?);
            wr.write_record(["space", "n", "beta"])?;
            for r in rows {
                wr.write_record([
                    space.to_string(),
                    r.n.to_string(),
                    r.beta.map(fmt_f64).unwrap_or_default(),
                ])?;
            }
            wr.flush()?;
        }
        Probe::Consistency => {
            let mut wr = csv::Writer::from_writer(create(&cfg.out, "consistency.csv")?);
            wr.write_record(["nx", "ny", "interior_defect", "boundary_defect", "max_defect"])?;
            for g in cfg.grids()? {
                let r = consistency_check(&g)?;
                wr.write_record([
                    g.nx().to_string(),
                    g.ny().to_string(),
                    fmt_f64(r.interior),
                    fmt_f64(r.boundary),
                    fmt_f64(r.max()),
                ])?;
            }
            wr.flush()?;
        }
        Probe::Regularity => {
            let mut wr = csv::Writer::from_writer(create(&cfg.out, "regularity.csv")?);
            wr.write_record(["nx", "ny", "regularity"])?;
            for g in cfg.grids()? {
                let p = ClusterPartition::new(&g)?;
                wr.write_record([
                    g.nx().to_string(),
                    g.ny().to_string(),
                    fmt_f64(cluster_regularity(&g, &p)?),
                ])?;
            }
            wr.flush()?;
        }
    }
    Ok(())
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let (kind, flags) = match &cli.command {
        Command::Solve(f) => (CommandKind::Solve, f),
        Command::Convergence(f) => (CommandKind::Convergence, f),
        Command::Probe(f) => (CommandKind::Probe, f),
    };
    let cfg = RunConfig::resolve(kind, flags)?;
    match kind {
        CommandKind::Solve => cmd_solve(&cfg),
        CommandKind::Convergence => cmd_convergence(&cfg),
        CommandKind::Probe => cmd_probe(&cfg),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
