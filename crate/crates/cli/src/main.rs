mod commands;
mod config;
mod plot;
mod records;

use clap::{Parser, Subcommand};
use config::{MethodChoice, RunConfig, UsageError, WeightChoice};
use std::path::PathBuf;

/// Effective Willis-type kernels of heat-conducting laminates.
#[derive(Parser)]
#[command(name = "willis", version)]
struct Cli {
    /// TOML run configuration; defaults describe the reference cell.
    #[arg(long, global = true, env = "WILLIS_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, env = "WILLIS_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "WILLIS_METHOD", value_enum)]
    method: Option<MethodChoice>,
    #[arg(long, global = true, env = "WILLIS_WEIGHT", value_enum)]
    weight: Option<WeightChoice>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "WILLIS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Floquet number, normalization D and ensemble Green's function traces.
    Floquet,
    /// Effective kernels over the omega_bar x zeta grid.
    Effective,
    /// Direction-dependent impedances and their phase difference.
    Impedance,
    /// Effective kernels for each capacity offset alpha.
    SweepAlpha,
    /// Acceptance checks; exit 1 if any criterion fails.
    Validate,
    /// SVG panels from a result CSV.
    Plot {
        input: PathBuf,
        /// Column on the horizontal axis.
        #[arg(long)]
        x: Option<String>,
        /// Comma-separated columns of one panel; repeat for more panels.
        #[arg(long = "panel")]
        panels: Vec<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = cli.method {
        cfg.method = m;
    }
    if let Some(w) = cli.weight {
        cfg.weight = w;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    cfg.check()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return config::usage("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    if !matches!(cli.command, Command::Plot { .. }) {
        // Resolved configuration with every default spelled out.
        std::fs::write(dir.join("config.toml"), cfg.to_toml())?;
    }
    match cli.command {
        Command::Floquet => commands::floquet(&cfg, &dir),
        Command::Effective => commands::effective(&cfg, &dir),
        Command::Impedance => commands::impedance_cmd(&cfg, &dir),
        Command::SweepAlpha => commands::sweep_alpha(&cfg, &dir),
        Command::Validate => commands::validate(&cfg, &dir),
        Command::Plot { input, x, panels } => {
            for p in plot::plot(&input, x.as_deref(), &panels, &dir)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}
