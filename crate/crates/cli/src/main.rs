mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::output::OutputSet;

#[derive(Parser)]
#[command(name = "weakstrat", version, about = "Monte Carlo and exact checks for fBm with Hurst index 1/6")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the constant kappa with its truncation tail bound
    Kappa(Opts),
    /// Compare (B, V_n, I_n) against samples of the limit law
    Converge(Opts),
    /// Power variations against their exact expectations
    Variations(Opts),
    /// Sextic variation and its uniform convergence to 15t
    Sextic(Opts),
    /// Weighted Hermite variation means and variances against quadrature limits
    Hermite(Opts),
    /// Scaling exponents of windowed moment bounds
    Scaling(Opts),
    /// Symmetric Taylor identity residuals
    Taylor(Opts),
    /// Exact covariance, defect and orthogonality audits
    Audit(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key = value file with [command] sections
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid sizes, comma separated
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, short = 'm')]
    replications: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// poly(c0,c1,..), trig(a,b,c), exp(a,b), or x, x^k, sin, cos, exp, a constant
    #[arg(long)]
    integrand: Option<String>,
    /// cholesky or circulant
    #[arg(long)]
    method: Option<String>,
    /// Oracle grid is this multiple of n (2, 4 or 8)
    #[arg(long)]
    refinement_factor: Option<u64>,
    /// Lag truncation for kappa
    #[arg(long)]
    truncation: Option<u64>,
    #[arg(long, short = 'o')]
    output_dir: Option<PathBuf>,
    /// Exit with status 4 if any check fails
    #[arg(long)]
    check: bool,
    /// Worker threads (defaults to the number of cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Cmd {
    fn split(self) -> (Command, Opts) {
        match self {
            Cmd::Kappa(o) => (Command::Kappa, o),
            Cmd::Converge(o) => (Command::Converge, o),
            Cmd::Variations(o) => (Command::Variations, o),
            Cmd::Sextic(o) => (Command::Sextic, o),
            Cmd::Hermite(o) => (Command::Hermite, o),
            Cmd::Scaling(o) => (Command::Scaling, o),
            Cmd::Taylor(o) => (Command::Taylor, o),
            Cmd::Audit(o) => (Command::Audit, o),
        }
    }
}

fn build_config(command: Command, opts: &Opts) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::defaults(command);
    if let Some(path) = &opts.config {
        cfg.apply_file(path)?;
    }
    if let Some(ns) = &opts.n_list {
        let s: Vec<String> = ns.iter().map(u64::to_string).collect();
        cfg.set("n_list", &s.join(","))?;
    }
    let overrides = [
        ("horizon", opts.horizon.map(|v| v.to_string())),
        ("replications", opts.replications.map(|v| v.to_string())),
        ("master_seed", opts.master_seed.map(|v| v.to_string())),
        ("integrand", opts.integrand.clone()),
        ("method", opts.method.clone()),
        ("refinement_factor", opts.refinement_factor.map(|v| v.to_string())),
        ("truncation", opts.truncation.map(|v| v.to_string())),
        ("output_dir", opts.output_dir.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: Command, opts: Opts) -> Result<(), CliError> {
    let cfg = build_config(command, &opts)?;
    if let Some(t) = opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if command == Command::Kappa {
        let k = commands::kappa(&cfg);
        println!("{}", serde_json::to_string_pretty(&k).expect("constants serialize"));
        if opts.check && cfg.truncation >= weakstrat::kernel::DEFAULT_TRUNCATION && (k.kappa_sq - 5.391).abs() > 1e-3 {
            return Err(CliError::CheckFailed(format!("kappa^2 = {} not within 1e-3 of 5.391", k.kappa_sq)));
        }
        return Ok(());
    }
    let out = commands::run(&cfg)?;
    let mut files = OutputSet::new(&cfg.output_dir);
    for (name, body) in &out.files {
        files.write(name, body.as_bytes())?;
    }
    let text = out.report.to_text();
    files.write("report.json", out.report.to_json().as_bytes())?;
    files.write("report.txt", text.as_bytes())?;
    let manifest = files.finish(&cfg)?;
    print!("{text}");
    println!("manifest_hash {}", manifest.manifest_hash);
    if opts.check && !out.report.all_pass() {
        let failed: Vec<&str> = out.report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        return Err(CliError::CheckFailed(failed.join("; ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let (command, opts) = Cli::parse().command.split();
    match execute(command, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
