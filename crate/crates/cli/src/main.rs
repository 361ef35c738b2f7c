use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lieminimal::analysis::{build_patch, curvature_samples};
use lieminimal::config::{Analyses, AnalysisConfig, GridSpec, VariationSpec};
use lieminimal::output::{curvature_csv, variation_csv, write_mesh};
use lieminimal::{analyze_patch, CliError};
use lieminimal_core::rotational::{builtin_fixture, fixture_defaults, Params, FIXTURES};
use lieminimal_core::Grid;

#[derive(Parser)]
#[command(name = "lieminimal", version, about = "Lie energy, Euler-Lagrange residuals and Weingarten diagnostics of surface patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every analysis requested by the config; all of them if none is.
    Analyze(RunArgs),
    /// List the built-in fixtures with their parameters.
    List,
    /// Write an OBJ mesh of the configured surface.
    Mesh(RunArgs),
    /// Linear and affine Weingarten fits.
    Fit(RunArgs),
    /// Bonnet check of parallel surfaces at the given offsets.
    Parallel {
        #[command(flatten)]
        run: RunArgs,
        /// Offset distance; repeatable.
        #[arg(long = "t", allow_negative_numbers = true, num_args = 1..)]
        t: Vec<f64>,
    },
    /// First variation of the energy under seeded bump perturbations.
    Variation(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Sample grid, e.g. 64x64.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
    /// Tolerance for the normalized Euler-Lagrange residual.
    #[arg(long = "tol-el")]
    tol_el: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; the report goes to stdout when neither this nor the config names one.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok(GridSpec { nx: parse(a)?, ny: parse(b)? })
}

impl RunArgs {
    fn load(&self) -> Result<AnalysisConfig, CliError> {
        let mut c = AnalysisConfig::load(&self.config)?;
        if let Some(g) = self.grid {
            c.grid = g;
        }
        if let Some(t) = self.tol_el {
            c.tolerances.residual = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        c.validate()?;
        Ok(c)
    }

    fn base(&self) -> &Path {
        self.config.parent().unwrap_or(Path::new("."))
    }
}

fn emit(report: &lieminimal::SurfaceReport, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => report.write(p),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.to_json().as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|e| CliError::io(path, e))
}

/// Runs `config` restricted to `analyses` (or as given when `None`) and writes
/// the report plus any configured tables.
fn run_with(args: &RunArgs, analyses: Option<Analyses>) -> Result<(), CliError> {
    let mut config = args.load()?;
    if let Some(a) = analyses {
        config.analyses = a;
    } else if config.analyses.is_empty() {
        config.analyses = Analyses::everything();
    }
    let p = build_patch(&config, args.base())?;
    let report = analyze_patch(&p, &config)?;
    if let Some(path) = &config.output.curvature_csv {
        let grid = Grid::new(config.grid.nx, config.grid.ny, p.domain);
        let samples = curvature_samples(&p, &grid, config.tolerances.umbilic)?;
        curvature_csv(create(path)?, &samples).map_err(|e| csv_io(path, e))?;
    }
    if let (Some(path), Some(v)) = (&config.output.variation_csv, &report.variation) {
        variation_csv(create(path)?, &v.rows).map_err(|e| csv_io(path, e))?;
    }
    let out = args.out.as_deref().or(config.output.report.as_deref());
    emit(&report, out)
}

fn list() {
    for name in FIXTURES {
        let defaults = fixture_defaults(name).expect("catalogue names are known");
        let params: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let p = builtin_fixture(name, &Params::new()).expect("fixtures build with defaults");
        let d = p.domain;
        println!("{name:<16} kappa={:<2} u=[{}, {}] v=[{}, {}] {}", p.sf.kappa_int(), d.u0, d.u1, d.v0, d.v1, params.join(" "));
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => run_with(&args, None),
        Command::List => {
            list();
            Ok(())
        }
        Command::Mesh(args) => {
            let config = args.load()?;
            let p = build_patch(&config, args.base())?;
            let path = args.out.or(config.output.mesh.clone()).ok_or_else(|| CliError::Config("mesh needs --out or output.mesh".into()))?;
            write_mesh(&p, &Grid::new(config.grid.nx, config.grid.ny, p.domain), &path)
        }
        Command::Fit(args) => run_with(&args, Some(Analyses { curvature: true, weingarten: true, ..Analyses::default() })),
        Command::Parallel { run, t } => {
            let config = run.load()?;
            let offsets = if t.is_empty() { config.analyses.parallel.clone() } else { t };
            if offsets.is_empty() {
                return Err(CliError::Config("parallel needs --t or analyses.parallel".into()));
            }
            run_with(&run, Some(Analyses { weingarten: true, parallel: offsets, ..Analyses::default() }))
        }
        Command::Variation(args) => {
            let config = args.load()?;
            let spec = config.analyses.variation.clone().unwrap_or_else(VariationSpec::default);
            run_with(&args, Some(Analyses { variation: Some(spec), ..Analyses::default() }))
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Geometry(g) = &e {
                eprintln!("diagnostic: {g:?}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
