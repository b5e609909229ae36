mod commands;
mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use flightsym::specfun::{erfc_complex, faddeeva_w};
use flightsym::Complex64;

use config::ScenarioConfig;
use output::{num, Provenance, RunOutput};

/// Flight-time distributions and mean arrival times for pairs of identical particles.
#[derive(Parser)]
#[command(name = "flightsym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one config key; may be repeated. Applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Shorthand for --set case=...
    #[arg(long, global = true)]
    case: Option<String>,

    /// Shorthand for --set epsilon_convention=...
    #[arg(long, global = true)]
    convention: Option<String>,

    /// Shorthand for --set output_dir=...
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Initial densities and free screen densities.
    FreeDist,
    /// Exchange overlap factor and survival probability.
    Survival,
    /// Photon and electron pair densities at a screen.
    RelDist,
    /// Transmitted and reflected arrival-time distributions.
    BarrierDist,
    /// Mean transmitted and reflected flight times.
    MeanTimes,
    /// Mean flight times over packet widths, with linear fits.
    GammaScan,
    /// Invariant checks; exits nonzero on any failure.
    Selftest,
    #[command(hide = true)]
    Specfun {
        #[command(subcommand)]
        op: SpecfunOp,
    },
}

#[derive(Subcommand)]
enum SpecfunOp {
    /// Print w(z) and erfc(z).
    Eval {
        #[arg(allow_negative_numbers = true)]
        re: f64,
        #[arg(allow_negative_numbers = true, default_value_t = 0.0)]
        im: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::FreeDist => "free-dist",
            Self::Survival => "survival",
            Self::RelDist => "rel-dist",
            Self::BarrierDist => "barrier-dist",
            Self::MeanTimes => "mean-times",
            Self::GammaScan => "gamma-scan",
            Self::Selftest => "selftest",
            Self::Specfun { .. } => "specfun",
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    if let Some(p) = &cli.config {
        cfg.apply_file(p)?;
    }
    for s in &cli.set {
        cfg.apply_assignment(s).context("--set")?;
    }
    if let Some(c) = &cli.case {
        cfg.set("case", c).context("--case")?;
    }
    if let Some(c) = &cli.convention {
        cfg.set("epsilon_convention", c).context("--convention")?;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn specfun_eval(re: f64, im: f64) -> Result<()> {
    let z = Complex64::new(re, im);
    let w = faddeeva_w(z)?;
    let e = erfc_complex(z)?;
    println!("z = {} {}", num(z.re), num(z.im));
    println!("w(z) = {} {}", num(w.re), num(w.im));
    println!("erfc(z) = {} {}", num(e.re), num(e.im));
    Ok(())
}

fn selftest(cfg: &ScenarioConfig, out: &mut RunOutput) -> Result<bool> {
    let checks = selftest::run()?;
    let mut rows = Vec::new();
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {}: {:e} (tolerance {:e})",
            c.name, c.value, c.tolerance
        );
        rows.push(vec![
            c.name.to_string(),
            num(c.value),
            num(c.tolerance),
            status.to_string(),
        ]);
    }
    let header: Vec<String> = ["check", "value", "tolerance", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let prov = Provenance {
        command: "selftest",
        case: "fixed",
        convention: cfg.convention.tag(),
        fingerprint: flightsym::flighttime::QuadratureSpec::default().fingerprint(),
    };
    out.write_csv("selftest.csv", &prov, &header, &rows)?;
    Ok(checks.iter().all(|c| c.pass))
}

fn run(cli: Cli) -> Result<bool> {
    if let Command::Specfun {
        op: SpecfunOp::Eval { re, im },
    } = cli.command
    {
        specfun_eval(re, im)?;
        return Ok(true);
    }
    let cfg = load_config(&cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("starting worker pool")?;
    let name = cli.command.name();
    let mut out = RunOutput::new(&cfg.output_dir, name, rayon::current_num_threads())?;
    let ok = match cli.command {
        Command::FreeDist => commands::free_dist(&cfg, &mut out).map(|_| true),
        Command::Survival => commands::survival(&cfg, &mut out).map(|_| true),
        Command::RelDist => commands::rel_dist(&cfg, &mut out).map(|_| true),
        Command::BarrierDist => commands::barrier_dist(&cfg, &mut out).map(|_| true),
        Command::MeanTimes => commands::mean_times(&cfg, &mut out).map(|_| true),
        Command::GammaScan => commands::gamma_scan_cmd(&cfg, &mut out).map(|_| true),
        Command::Selftest => selftest(&cfg, &mut out),
        Command::Specfun { .. } => unreachable!("handled above"),
    }
    .with_context(|| format!("{name} failed"))?;
    let manifest = out.finish(&cfg.to_config_text())?;
    eprintln!("wrote {}", manifest.display());
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
