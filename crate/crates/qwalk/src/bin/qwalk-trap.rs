use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qwalk::config::ExperimentConfig;
use qwalk::runner;
use qwalk::QwalkError;

/// Batch front-end for trapped continuous-time walk experiments on
/// Erdős–Rényi graphs. Emits CSV survival curves, ensemble means, ratio
/// curves and decay-fit reports; plotting is left to external tools.
#[derive(Parser)]
#[command(name = "qwalk-trap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-realization survival curves per dilution plus the classical
    /// reference line and fit reports.
    Fig1(CommonArgs),
    /// Ensemble-mean survival curves over an (M, p) sweep
    /// (default M = 4,16).
    Fig2(CommonArgs),
    /// Ratio curves against the z̄ = N/2 reference dilution
    /// (default N = 100, p' = 0.05,0.95, R = 200).
    Fig3(CommonArgs),
    /// Generic ensemble sweep over every (p, m, kind) combination.
    Run(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Node count N.
    #[arg(long)]
    n: Option<usize>,
    /// Link probability p, or a comma-separated sweep (e.g. 0.11,0.5,0.95).
    #[arg(long)]
    p: Option<String>,
    /// Trap count M, or a comma-separated sweep.
    #[arg(long)]
    m: Option<String>,
    /// Capture strength Γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Smallest time on the grid.
    #[arg(long)]
    t_min: Option<f64>,
    /// Largest time on the grid.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// Grid spacing: log or linear.
    #[arg(long)]
    grid: Option<String>,
    /// Ensemble size R.
    #[arg(long, short = 'r')]
    realizations: Option<usize>,
    /// Base seed; falls back to QWALK_SEED, then 12345.
    #[arg(long)]
    seed: Option<u64>,
    /// Walk kinds: classical, quantum or both.
    #[arg(long)]
    kinds: Option<String>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
}

impl CommonArgs {
    fn build_config(&self, defaults: fn(&mut ExperimentConfig)) -> qwalk::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        defaults(&mut cfg);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(n) = self.n {
            cfg.set("n", &n.to_string())?;
        }
        if let Some(p) = &self.p {
            cfg.set("p", p)?;
        }
        if let Some(m) = &self.m {
            cfg.set("m", m)?;
        }
        if let Some(g) = self.gamma {
            cfg.set("gamma", &g.to_string())?;
        }
        if let Some(t) = self.t_min {
            cfg.set("t_min", &t.to_string())?;
        }
        if let Some(t) = self.t_max {
            cfg.set("t_max", &t.to_string())?;
        }
        if let Some(p) = self.points {
            cfg.set("points", &p.to_string())?;
        }
        if let Some(g) = &self.grid {
            cfg.set("grid", g)?;
        }
        if let Some(r) = self.realizations {
            cfg.set("realizations", &r.to_string())?;
        }
        if let Some(s) = self.seed {
            cfg.set("seed", &s.to_string())?;
        }
        if let Some(k) = &self.kinds {
            cfg.set("kinds", k)?;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(w) = self.workers {
            cfg.set("workers", &w.to_string())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn no_defaults(_: &mut ExperimentConfig) {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fig1(args) => args.build_config(no_defaults).and_then(|c| runner::run_fig1(&c)),
        Command::Fig2(args) => args
            .build_config(runner::fig2_defaults)
            .and_then(|c| runner::run_fig2(&c)),
        Command::Fig3(args) => args
            .build_config(runner::fig3_defaults)
            .and_then(|c| runner::run_fig3(&c)),
        Command::Run(args) => args.build_config(no_defaults).and_then(|c| runner::run_generic(&c)),
    };
    match result {
        Ok(outputs) => {
            for path in outputs {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ (QwalkError::Config(_) | QwalkError::TooManyTraps { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
