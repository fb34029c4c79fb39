use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use spdc_core::config::{load_config, RunConfig};
use spdc_core::correlation::{find_sign_transition, run_scan, summarize, waist_sweep};

mod check;
mod output;

#[derive(Parser)]
#[command(name = "spdc", version, about = "Fourier-plane coincidence scans of type-II SPDC photon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan both detectors along one axis and write the coincidence grid.
    Scan {
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        assignment: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Points per axis; overrides `scan.points`.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Pearson coefficient against isotropic pump waist (um).
    Sweep {
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        wmin: f64,
        #[arg(long)]
        wmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output table; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Waist (um) at which the Pearson coefficient changes sign.
    Transition {
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        wlo: f64,
        #[arg(long)]
        whi: f64,
        #[arg(long, default_value_t = 1.0)]
        tol: f64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the built-in cross-checks and report pass/fail for each.
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn config_from(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn apply_overrides(cfg: &mut RunConfig, axis: Option<String>, assignment: Option<String>) -> Result<()> {
    if let Some(a) = axis {
        cfg.scan.axis = a;
    }
    if let Some(a) = assignment {
        cfg.scan.assignment = a;
    }
    cfg.validate()?;
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.toml");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scan {
            axis,
            assignment,
            config,
            out,
            points,
        } => {
            let mut cfg = config_from(config.as_deref())?;
            if let Some(p) = points {
                cfg.scan.points = p;
            }
            apply_overrides(&mut cfg, axis, assignment)?;
            let r = cfg.resolve()?;
            let dist = run_scan(&r.plan, &r.setup)?;
            let sum = summarize(&dist)?;
            write(&out, &output::grid(&dist, &r.digest, &cfg.model.mode))?;
            let sp = summary_path(&out);
            write(&sp, &output::summary(&dist, &sum, &r.digest))?;
            println!(
                "{} scan ({}): pearson {:.4}, angle {:.2} deg -> {}",
                dist.axis.as_str(),
                dist.assignment.as_str(),
                sum.pearson,
                sum.angle.to_degrees(),
                out.display()
            );
        }
        Command::Sweep {
            axis,
            wmin,
            wmax,
            steps,
            config,
            out,
        } => {
            if !(wmin > 0.0 && wmin < wmax) {
                bail!("sweep needs 0 < wmin < wmax, got {wmin} and {wmax}");
            }
            if steps < 2 {
                bail!("sweep needs steps >= 2, got {steps}");
            }
            let mut cfg = config_from(config.as_deref())?;
            apply_overrides(&mut cfg, axis, None)?;
            let r = cfg.resolve()?;
            let waists: Vec<f64> = (0..steps)
                .map(|i| (wmin + (wmax - wmin) * i as f64 / (steps - 1) as f64) * 1e-6)
                .collect();
            let rows = waist_sweep(r.plan.axis, &waists, &r.plan, &r.setup)?;
            let text = output::sweep(&rows, r.plan.axis.as_str(), &r.digest);
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Transition {
            axis,
            wlo,
            whi,
            tol,
            config,
        } => {
            if !(tol > 0.0) {
                bail!("transition needs tol > 0, got {tol}");
            }
            let mut cfg = config_from(config.as_deref())?;
            apply_overrides(&mut cfg, axis, None)?;
            let r = cfg.resolve()?;
            let w = find_sign_transition(r.plan.axis, wlo * 1e-6, whi * 1e-6, tol * 1e-6, &r.plan, &r.setup)?;
            print!("{}", output::digest_line(&r.digest));
            println!("axis = \"{}\"", r.plan.axis.as_str());
            println!("transition_waist_um = {:?}", w * 1e6);
        }
        Command::Check { config } => {
            let cfg = config_from(config.as_deref())?;
            let results = check::run_checks(&cfg);
            let mut failed = 0;
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            println!("{} checks, {} failed", results.len(), failed);
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("spdc: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
