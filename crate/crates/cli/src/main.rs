use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lojex::algebra::{default_variable_names, parse_poly, Poly, DEFAULT_JET_ORDER};
use lojex::harness::{
    self, CheckSpec, ComparabilityParams, EstimateParams, Report, Scenario, SectionParams,
};
use lojex::lojasiewicz::Mode;
use lojex::tangency::{exponent_lower_bound, order_of_tangency, JET_ZERO_TOLERANCE};

/// Estimate regular-separation exponents and run verification scenarios.
#[derive(Parser)]
#[command(name = "lojex", version)]
struct Cli {
    /// Print per-shell envelope tables to stderr.
    #[arg(long, short, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the exponent of the scenario's pair of sets.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModeArg::OneSided)]
        mode: ModeArg,
    },
    /// Hyperplane-section checks: exponent monotonicity (needs `y`) and
    /// distance comparability on the section of `x`.
    SectionCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Order of tangency of two graphs `y = f(u)` and `y = g(u)` at `u = 0`.
    Tangency {
        /// Number of graph parameters; variables are x1..xp.
        #[arg(long, default_value_t = 1)]
        param_dim: usize,
        /// Component of f (repeat for several components).
        #[arg(long = "f", required = true)]
        f: Vec<String>,
        /// Component of g (repeat for several components).
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        /// Jet truncation degree.
        #[arg(long = "K", default_value_t = DEFAULT_JET_ORDER)]
        truncation: u32,
        #[arg(long, default_value_t = JET_ZERO_TOLERANCE)]
        tol: f64,
    },
    /// Run every check listed in a scenario file.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Overrides the scenario seed; defaults to $LOJEX_SEED when set.
    #[arg(long, env = "LOJEX_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    OneSided,
    TwoSided,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::OneSided => Mode::OneSided,
            ModeArg::TwoSided => Mode::TwoSided,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Scenario> {
    Scenario::load(path).with_context(|| format!("loading scenario {}", path.display()))
}

/// Runs the command; `Ok(false)` means some check failed or errored.
fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Estimate { common, mode } => {
            let mut scenario = load(&common.scenario)?;
            if scenario.y.is_none() {
                bail!("the scenario has no set `y` to separate from `x`");
            }
            scenario.checks = vec![CheckSpec::Estimate(EstimateParams {
                mode: (*mode).into(),
                ..Default::default()
            })];
            emit(cli, &harness::run(&scenario, common.output.seed), &common.output)
        }
        Command::SectionCheck { common, trials } => {
            let mut scenario = load(&common.scenario)?;
            let mut checks = Vec::new();
            if scenario.y.is_some() {
                checks.push(CheckSpec::SectionMonotonicity(SectionParams {
                    trials: *trials,
                    ..Default::default()
                }));
            }
            checks.push(CheckSpec::DistanceComparability(ComparabilityParams {
                trials: *trials,
                ..Default::default()
            }));
            scenario.checks = checks;
            scenario.validate()?;
            emit(cli, &harness::run(&scenario, common.output.seed), &common.output)
        }
        Command::Tangency {
            param_dim,
            f,
            g,
            truncation,
            tol,
        } => {
            let names = default_variable_names(*param_dim);
            let parse = |list: &[String]| -> Result<Vec<Poly>> {
                list.iter()
                    .map(|e| parse_poly(e, &names).with_context(|| format!("parsing `{e}`")))
                    .collect()
            };
            let center = vec![Default::default(); *param_dim];
            let report = order_of_tangency(&parse(f)?, &parse(g)?, &center, *truncation, *tol)?;
            let out = serde_json::json!({
                "report": report,
                "lower_bound": exponent_lower_bound(&report),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Run { scenario, output } => {
            let scenario = load(scenario)?;
            emit(cli, &harness::run(&scenario, output.seed), output)
        }
    }
}

fn emit(cli: &Cli, report: &Report, output: &Output) -> Result<bool> {
    let text = match output.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    };
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if cli.verbose {
        eprint!("{}", report.shell_tables());
    }
    for c in &report.checks {
        if let Some(msg) = &c.message {
            eprintln!("check {} ({}): {}: {msg}", c.index, c.kind, c.status.as_str());
        }
    }
    Ok(report.success())
}
