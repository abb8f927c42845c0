use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use kolmo_core::experiments::{self, parse_config, Scenario, ScenarioConfig, SweepSummary};

#[derive(Parser)]
#[command(
    name = "kolmo",
    about = "One-dimensional Kolmogorov turbulence model experiments"
)]
struct Cli {
    /// Directory for CSV and JSON output; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Concurrent sweep members (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Reserved; the solver is deterministic and the value is only echoed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run a multi-member scenario (parameter sweep or refinement ladder).
    Sweep { config: PathBuf },
    /// Evaluate the closed-form oracles against their reference values.
    CheckOracles,
    /// Print the output schemas and the config grammar.
    Schema,
    /// Print the version.
    Version,
}

fn load(path: &Path, cli: &Cli) -> anyhow::Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.to_string_lossy().into_owned();
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn is_sweep(cfg: &ScenarioConfig) -> bool {
    match cfg.scenario {
        Scenario::EpsilonSweep | Scenario::Stability | Scenario::Convergence => true,
        Scenario::OracleCheck => false,
        _ => cfg.n_list.len() > 1,
    }
}

fn report(summary: &SweepSummary, dir: &Path) {
    println!(
        "{}: {} at t = {} after {} steps",
        summary.scenario, summary.status, summary.t_end, summary.steps
    );
    if !summary.reason.is_empty() {
        println!("  {}", summary.reason);
    }
    for m in &summary.members {
        println!(
            "  {:<16} n={:<5} {:<16} t_end={:.6} max|u_x|={:.4e} at x={:.4} xi={:.4e}",
            m.label, m.n_points, m.status, m.t_end, m.max_gradient, m.max_gradient_x, m.xi
        );
    }
    if let Some(r) = &summary.cross.blowup_time {
        println!(
            "  stop time extrapolated {:.6} (difference ratio {:.3})",
            r.extrapolated, r.ratio
        );
    }
    if let Some(f) = &summary.cross.epsilon_rate {
        println!("  epsilon rate {:.3} (residual {:.2e})", f.rate, f.residual);
    }
    println!("  output in {}", dir.display());
}

fn run(cfg: &ScenarioConfig, quiet: bool) -> anyhow::Result<ExitCode> {
    let dir = PathBuf::from(&cfg.output_dir);
    let summary = experiments::run_scenario(cfg, &dir, cfg.workers)?;
    if !quiet {
        report(&summary, &dir);
    }
    Ok(if summary.status == "failed" {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn main_inner(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config, &cli)?;
            run(&cfg, cli.quiet)
        }
        Command::Sweep { config } => {
            let cfg = load(config, &cli)?;
            if !is_sweep(&cfg) {
                bail!(
                    "scenario {} with a single grid is not a sweep; use `run`",
                    cfg.scenario
                );
            }
            run(&cfg, cli.quiet)
        }
        Command::CheckOracles => {
            let mut cfg = ScenarioConfig::for_scenario(Scenario::OracleCheck);
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let out = cli.output_dir.as_deref();
            let outcome = experiments::execute(&cfg, out, cli.workers.unwrap_or(0))?;
            let checks = &outcome.summary.cross.oracle_checks;
            if !cli.quiet {
                for c in checks {
                    println!(
                        "{} {:<45} expected {:.17e} got {:.17e} tol {:.1e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.expected,
                        c.got,
                        c.tolerance
                    );
                }
            }
            Ok(if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Schema => {
            print!("{}", experiments::schema());
            Ok(ExitCode::SUCCESS)
        }
        Command::Version => {
            println!("kolmo {}", experiments::ARTIFACT_VERSION);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
