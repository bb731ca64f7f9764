use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use colombeau_cli::config::{ConfigError, Expressions, ScenarioConfig, Suite};
use colombeau_cli::sweep::{parse_seminorm, sweep_table};
use colombeau_cli::{demo, parse_expression, run};

#[derive(Parser)]
#[command(name = "colombeau", version, about = "Colombeau generalized-function scenarios")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, env = "COLOMBEAU_CONFIG")]
    config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true, env = "COLOMBEAU_OUT")]
    out: Option<PathBuf>,
    /// Dyadic exponents `first:last[:kernel_valid]`, e.g. `2:9:4`.
    #[arg(long, global = true, env = "COLOMBEAU_EPS_GRID")]
    eps_grid: Option<String>,
    /// Base grid `half_width:points`, e.g. `32:4096`.
    #[arg(long, global = true, env = "COLOMBEAU_GRID")]
    grid: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suites of the scenario file (the full default scenario without one).
    Run,
    /// Verify the default test objects and 0-test objects.
    VerifyTestobject,
    /// Classify one expression.
    #[command(group(ArgGroup::new("kind").required(true)))]
    Check {
        expr: String,
        #[arg(long, group = "kind")]
        moderate: bool,
        #[arg(long, group = "kind")]
        negligible: bool,
    },
    /// Test whether two expressions are associated.
    Associate { expr1: String, expr2: String },
    /// Check the Fourier identities on the smoke set.
    FtCheck,
    /// Seminorm values per net and eps.
    Sweep {
        expr: String,
        /// Seminorm labels such as `S(a=0,b=0)` or `K(r=2,b=1)`.
        #[arg(long, num_args = 1..)]
        seminorm: Vec<String>,
    },
    /// Run a named scenario.
    Demo { name: DemoName },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    DeltaSquared,
    StrictInversion,
    FTimesDelta,
    HeavisidePower,
}

impl DemoName {
    fn id(self) -> &'static str {
        match self {
            DemoName::DeltaSquared => "delta-squared",
            DemoName::StrictInversion => "strict-inversion",
            DemoName::FTimesDelta => "f-times-delta",
            DemoName::HeavisidePower => "heaviside-power",
        }
    }
}

fn base_config(cli: &Cli, default: ScenarioConfig) -> Result<ScenarioConfig, ConfigError> {
    let mut c = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => default,
    };
    if let Some(g) = &cli.grid {
        c.apply_grid_flag(g)?;
    }
    if let Some(e) = &cli.eps_grid {
        c.apply_eps_flag(e)?;
    }
    Ok(c)
}

/// Scenario file settings with the suites and expressions replaced.
fn only(
    cli: &Cli,
    suites: Vec<Suite>,
    expressions: Expressions,
) -> Result<ScenarioConfig, ConfigError> {
    let mut c = base_config(cli, ScenarioConfig::default())?;
    c.suites = suites;
    c.expressions = Expressions {
        smoke: c.expressions.smoke.clone(),
        ..expressions
    };
    c.validate()?;
    Ok(c)
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig, ConfigError> {
    let pair = |a: &str, b: &str| [a.to_string(), b.to_string()];
    match &cli.command {
        Command::Run => base_config(cli, ScenarioConfig::default_scenario()),
        Command::VerifyTestobject => only(cli, vec![Suite::VerifyTestobject], Expressions::default()),
        Command::Check {
            expr, moderate, ..
        } => {
            let mut e = Expressions::default();
            if *moderate {
                e.moderate.push(expr.clone());
                only(cli, vec![Suite::Moderate], e)
            } else {
                e.negligible.push(expr.clone());
                only(cli, vec![Suite::Negligible], e)
            }
        }
        Command::Associate { expr1, expr2 } => only(
            cli,
            vec![Suite::Associated],
            Expressions {
                associated: vec![pair(expr1, expr2)],
                ..Expressions::default()
            },
        ),
        Command::FtCheck => only(cli, vec![Suite::FtProperties], Expressions::default()),
        Command::Demo { name } => {
            let d = demo::demo(name.id()).expect("every demo name is defined");
            let mut c = base_config(cli, ScenarioConfig::default())?;
            c.suites = d.suites;
            c.expressions = d.expressions;
            c.fourier = d.fourier;
            c.validate()?;
            Ok(c)
        }
        Command::Sweep { .. } => base_config(cli, ScenarioConfig::default()),
    }
}

fn run_sweep(cli: &Cli, config: &ScenarioConfig, expr: &str, labels: &[String]) -> Result<(), String> {
    let r = parse_expression(expr).map_err(|e| e.to_string())?;
    let queries = if labels.is_empty() {
        vec![parse_seminorm("S(a=0,b=0)").expect("static label")]
    } else {
        labels
            .iter()
            .map(|l| parse_seminorm(l).ok_or_else(|| format!("bad seminorm `{l}`")))
            .collect::<Result<_, _>>()?
    };
    let wb = config.workbench().map_err(|e| e.to_string())?;
    for q in &queries {
        q.validate(&wb.base).map_err(|e| e.to_string())?;
    }
    let (table, notes) = sweep_table(&wb, &r, &queries).map_err(|e| e.to_string())?;
    for n in notes {
        eprintln!("note: {n}");
    }
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join(&table.name), table.contents()).map_err(|e| e.to_string())?;
        }
        None => print!("{}", table.contents()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match scenario(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Command::Sweep { expr, seminorm } = &cli.command {
        return match run_sweep(&cli, &config, expr, seminorm) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.summary_text());
    if let Some(dir) = &cli.out {
        if let Err(e) = report.write_csv(dir) {
            eprintln!("error writing {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
