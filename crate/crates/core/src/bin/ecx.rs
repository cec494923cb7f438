use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ecx::equilibrium::{run_scenario, Scenario};
use ecx::experiments::{self, linspace, NetworkPreset, SweepConfig};
use ecx::io::{self, OutDir, Sig17};
use ecx::model::{Dims, GeneratorKind, GeneratorSpec};
use ecx::network::ProximityKind;
use ecx::oracle;
use ecx::{Error, Result};

#[derive(Parser)]
#[command(name = "ecx", version, about = "Economic complexity simulations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `ecx-out/<command>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the full-size sweep instead of the desk-size one.
    #[arg(long, global = true)]
    full_scale: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Single-capability model (default linspace 10x20).
    Single,
    /// Multi-capability model (default linspace 100x1000x10).
    Multi,
    /// Alpha sweep of the mixed model.
    Sweep,
    /// Wages, prices and consumption for a scenario.
    Equilibrium,
    /// Relatedness network from a specialisation CSV or a generated model.
    Network(NetworkArgs),
    /// Pipeline against the closed forms and random production functions.
    OracleCheck,
}

#[derive(Args)]
struct NetworkArgs {
    /// Specialisation matrix CSV (`id,<activity ids>` header, 0/1 cells).
    #[arg(long, conflicts_with = "preset")]
    input: Option<PathBuf>,
    /// Generated model used when neither --input nor --config is given.
    #[arg(long, value_enum, default_value_t = Preset::CorePeriphery)]
    preset: Preset,
    #[arg(long, value_enum, default_value_t = Proximity::MinConditional)]
    proximity: Proximity,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Ring,
    CorePeriphery,
    Dumbbell,
}

#[derive(Clone, Copy, ValueEnum)]
enum Proximity {
    MinConditional,
    Cooccurrence,
}

/// Sweep configuration file; missing fields take the desk (or full-scale) values.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    alpha_min: Option<f64>,
    alpha_max: Option<f64>,
    alpha_points: Option<usize>,
    replicates: Option<usize>,
    economies: Option<usize>,
    activities: Option<usize>,
    capabilities: Option<usize>,
    seed: Option<u64>,
}

fn read_config(path: &Option<PathBuf>) -> Result<Option<String>> {
    path.as_deref().map(io::read_text).transpose()
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

fn model_spec(common: &Common, default: GeneratorSpec) -> Result<GeneratorSpec> {
    let mut spec = match read_config(&common.config)? {
        Some(text) => {
            GeneratorSpec::from_toml(&text).map_err(|e| with_path(e, common.config.as_deref().unwrap()))?
        }
        None => default,
    };
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn linspace_spec(economies: usize, activities: usize, capabilities: usize) -> GeneratorSpec {
    GeneratorSpec::new(
        GeneratorKind::Linspace,
        Dims {
            economies,
            activities,
            capabilities,
        },
        0,
        1.0,
    )
    .expect("built-in spec is valid")
}

fn run_model_cmd(common: &Common, out: &mut OutDir, default: GeneratorSpec) -> Result<()> {
    let spec = model_spec(common, default)?;
    out.text("spec.toml", &spec.to_toml())?;
    let run = experiments::run_model(&spec)?;
    run.write(out)?;
    let (nc, np) = run.output.shape();
    println!(
        "{nc}x{np} model, lambda2 = {:.6}, Spearman(ECI, <r>) = {}",
        run.complexity.eigenvalue,
        run.spearman_endowment.map_or("undefined".into(), |s| format!("{s:.6}"))
    );
    Ok(())
}

fn sweep_cmd(common: &Common, out: &mut OutDir) -> Result<()> {
    let file: SweepFile = match read_config(&common.config)? {
        Some(text) => toml::from_str(&text).map_err(|e| Error::Parse {
            path: common.config.clone().unwrap(),
            message: e.to_string(),
        })?,
        None => SweepFile::default(),
    };
    let base = if common.full_scale {
        SweepConfig::full(0)
    } else {
        SweepConfig::desk(0)
    };
    let grid = &base.alpha_grid;
    let cfg = SweepConfig {
        alpha_grid: linspace(
            file.alpha_min.unwrap_or(grid[0]),
            file.alpha_max.unwrap_or(grid[grid.len() - 1]),
            file.alpha_points.unwrap_or(grid.len()),
        ),
        replicates: file.replicates.unwrap_or(base.replicates),
        dims: Dims {
            economies: file.economies.unwrap_or(base.dims.economies),
            activities: file.activities.unwrap_or(base.dims.activities),
            capabilities: file.capabilities.unwrap_or(base.dims.capabilities),
        },
        seed: common.seed.or(file.seed).unwrap_or(0),
    };
    let result = experiments::run_phase_sweep(&cfg)?;
    result.write(out)?;
    for (a, (m, s)) in result.alpha_grid.iter().zip(result.corr_mean.iter().zip(&result.corr_std)) {
        println!("alpha {a:.4}  |rho| {m:.4} +- {s:.4}");
    }
    if let Some((_, mid)) = result.steepest_drop() {
        println!("steepest drop at alpha {mid:.4}");
    }
    Ok(())
}

fn equilibrium_cmd(common: &Common, out: &mut OutDir) -> Result<()> {
    let mut scenario = match read_config(&common.config)? {
        Some(text) => Scenario::from_toml(&text).map_err(|e| with_path(e, common.config.as_deref().unwrap()))?,
        None => Scenario::default(),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    let run = run_scenario(&scenario)?;
    experiments::write_equilibrium(&run, out)?;
    println!(
        "prices by {:?} in {} iterations, market clearing residual {:.3e}, budget residual {:.3e}",
        run.solution.method, run.solution.iterations, run.solution.market_clearing_residual, run.budget_residual
    );
    Ok(())
}

fn network_cmd(common: &Common, args: &NetworkArgs, out: &mut OutDir) -> Result<()> {
    let m = match (&args.input, &common.config) {
        (Some(_), Some(_)) => return Err(Error::Usage("give either --input or --config, not both".into())),
        (Some(path), None) => io::read_specialization_csv(path)?,
        (None, _) => {
            let preset = match args.preset {
                Preset::Ring => NetworkPreset::Ring,
                Preset::CorePeriphery => NetworkPreset::CorePeriphery,
                Preset::Dumbbell => NetworkPreset::Dumbbell,
            };
            let spec = model_spec(common, preset.spec(0)?)?;
            out.text("spec.toml", &spec.to_toml())?;
            experiments::specialization_of(&spec)?
        }
    };
    let kind = match args.proximity {
        Proximity::MinConditional => ProximityKind::MinConditional,
        Proximity::Cooccurrence => ProximityKind::Cooccurrence,
    };
    let run = experiments::run_network(&m, kind)?;
    run.write(out)?;
    let s = run.graph.summary();
    println!(
        "{} nodes, {} edges, {} in backbone, {} components",
        s.n_nodes, s.n_edges, s.backbone_edges, s.components
    );
    Ok(())
}

fn oracle_cmd(common: &Common, out: &mut OutDir) -> Result<()> {
    #[derive(Serialize)]
    struct Report {
        closed_forms: oracle::OracleReport,
        separable: experiments::TrialSummary,
        shifted: experiments::TrialSummary,
        separable_max_deviation: Sig17,
    }
    let seed = common.seed.unwrap_or(0);
    let closed_forms = oracle::oracle_report(&oracle::DEFAULT_SIZES, 1e-12)?;
    let separable = experiments::separable_trials(100, seed)?;
    let shifted = experiments::shifted_trials(100, seed)?;
    for c in &closed_forms.cases {
        println!(
            "{:>3}x{:<3} {:?}: M {} | Mcc dev {:.1e} | ECI signs {}",
            c.economies,
            c.activities,
            c.kind,
            if c.mcp_equal { "equal" } else { "DIFFERENT" },
            c.mcc_max_deviation,
            if c.eci_pattern_matches { "match" } else { "MISMATCH" }
        );
    }
    println!("separable: {}/{} with |R-1| < 1e-10 (max {:.1e})", separable.passed, separable.instances, separable.worst);
    println!("shifted: {}/{} match the sign condition", shifted.passed, shifted.instances);
    let pass = closed_forms.pass && separable.passed == separable.instances && shifted.passed == shifted.instances;
    out.json(
        "oracle.json",
        &Report {
            separable_max_deviation: Sig17(separable.worst),
            closed_forms,
            separable,
            shifted,
        },
    )?;
    if pass {
        Ok(())
    } else {
        Err(Error::Numerical("pipeline disagrees with a closed-form result; see oracle.json".into()))
    }
}

fn run(cli: &Cli) -> Result<()> {
    let name = match &cli.command {
        Command::Single => "single",
        Command::Multi => "multi",
        Command::Sweep => "sweep",
        Command::Equilibrium => "equilibrium",
        Command::Network(_) => "network",
        Command::OracleCheck => "oracle-check",
    };
    let root = cli.common.out.clone().unwrap_or_else(|| Path::new("ecx-out").join(name));
    let mut out = OutDir::create(root)?;
    let c = &cli.common;
    match &cli.command {
        Command::Single => run_model_cmd(c, &mut out, linspace_spec(10, 20, 1))?,
        Command::Multi => run_model_cmd(c, &mut out, linspace_spec(100, 1000, 10))?,
        Command::Sweep => sweep_cmd(c, &mut out)?,
        Command::Equilibrium => equilibrium_cmd(c, &mut out)?,
        Command::Network(args) => network_cmd(c, args, &mut out)?,
        Command::OracleCheck => oracle_cmd(c, &mut out)?,
    }
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Argument errors are validation errors (1), not clap's default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
