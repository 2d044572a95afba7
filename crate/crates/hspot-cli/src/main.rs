use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hspot_cli::format::sig15;
use hspot_cli::kernel::{self, GegenbauerQuery, KernelArgs, KernelFamily};
use hspot_cli::output::{checks_csv, persist, resolve_out_dir, RunReport};
use hspot_cli::probe::run_probe;
use hspot_cli::scenario::Scenario;
use hspot_cli::suites::{run_suite, Suite, SuiteOptions};
use hspot_cli::{CliError, CliResult, EXIT_FAIL, EXIT_USAGE, VERSION};

#[derive(Parser)]
#[command(name = "hspot", version, about = "Half-space potential theory kernels, identities and growth probes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output directory (default: $HSPOT_OUT, then ./hspot-out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance replacing the default of every equality and inequality check
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled checks
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the JSON report instead of the text summary
    #[arg(long, global = true)]
    json: bool,
    /// Run probes even when the data fail their class membership test
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a kernel at one point
    Kernel {
        /// plane | plane-mod | space | space-mod | green-plane | green-space
        family: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Point of the half-plane as `x,y`
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Boundary point of the real line
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Pole of the Green function as `x,y`
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        /// Point of the half-space
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Boundary point of the half-space
        #[arg(long, allow_hyphen_values = true)]
        yp: Option<String>,
        /// Pole of the Green function in the half-space
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Run a verification suite and write its report
    Verify {
        /// kernels | gegenbauer | carleman | nevanlinna | limits | majorant | mobius | all
        suite: String,
        /// Samples per kernel inequality family
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Run a growth or lower-bound probe from a scenario file
    Probe {
        /// growth | growth-p | lower-bound
        kind: String,
        scenario: PathBuf,
    },
    /// Evaluate a Gegenbauer polynomial, its derivative or its maximum
    Gegenbauer {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, conflicts_with = "max")]
        derivative: bool,
        #[arg(long)]
        max: bool,
    },
}

fn print_value(json_out: bool, label: &str, value: f64) -> CliResult<()> {
    if json_out {
        println!("{}", serde_json::to_string(&json!({ "quantity": label, "value": value, "version": VERSION }))?);
    } else {
        println!("{}", sig15(value));
    }
    Ok(())
}

fn finish(g: &Global, mut report: RunReport, csv: &str, started: Instant) -> CliResult<i32> {
    report.wall_time_s = started.elapsed().as_secs_f64();
    report.config.insert("out".into(), json!(resolve_out_dir(g.out.as_deref())));
    report.config.insert("tol".into(), json!(g.tol));
    let (json_path, csv_path) = persist(&resolve_out_dir(g.out.as_deref()), &report, csv)?;
    if g.json {
        print!("{}", report.json()?);
    } else {
        print!("{}", report.text_summary());
        println!("wrote {} and {}", json_path.display(), csv_path.display());
    }
    Ok(report.exit_code())
}

fn run(cli: Cli) -> CliResult<i32> {
    let g = &cli.global;
    if let Some(tol) = g.tol {
        if tol <= 0.0 || !tol.is_finite() {
            return Err(CliError::usage("--tol must be positive"));
        }
    }
    let started = Instant::now();
    match cli.command {
        Command::Kernel { family, m, n, z, t, zeta, x, yp, y } => {
            let fam = KernelFamily::from_name(&family)?;
            let v = kernel::evaluate(fam, &KernelArgs { m, n, z, t, zeta, x, yp, y })?;
            print_value(g.json, &family, v)?;
            Ok(0)
        }
        Command::Gegenbauer { lambda, k, t, derivative, max } => {
            let q = match (derivative, max) {
                (true, _) => GegenbauerQuery::Derivative,
                (_, true) => GegenbauerQuery::Max,
                _ => GegenbauerQuery::Value,
            };
            print_value(g.json, "gegenbauer", kernel::gegenbauer(lambda, k, t, q)?)?;
            Ok(0)
        }
        Command::Verify { suite, samples } => {
            let suite = Suite::from_name(&suite)?;
            if samples < 10 {
                return Err(CliError::usage("--samples must be at least 10"));
            }
            let opts = SuiteOptions { seed: g.seed.unwrap_or(0), samples, tol: g.tol };
            let checks = run_suite(suite, &opts);
            let mut config = std::collections::BTreeMap::new();
            config.insert("suite".into(), json!(suite.name()));
            config.insert("seed".into(), json!(opts.seed));
            config.insert("samples".into(), json!(samples));
            let csv = checks_csv(&checks);
            let report = RunReport::new(format!("verify-{}", suite.name()), checks, config);
            finish(g, report, &csv, started)
        }
        Command::Probe { kind, scenario } => {
            let mut s = Scenario::load(&scenario)?;
            if s.operation != kind {
                return Err(CliError::usage(format!("scenario operation is '{}', not '{kind}'", s.operation)));
            }
            if let Some(seed) = g.seed {
                s.seed = seed;
            }
            let run = run_probe(&s, g.force)?;
            if let Some(why) = &run.refused {
                eprintln!("membership check failed: {why}; rerun with --force to probe anyway");
            }
            let code = finish(g, run.report, &run.csv, started)?;
            Ok(if run.refused.is_some() { EXIT_FAIL } else { code })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
