use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use neurogrid::harness::sweep::{run_named_sweep, SweepKind, SweepSettings};
use neurogrid::harness::{
    guidance_params, run_scenario, OutputFormat, ScenarioConfig, VariantSelection,
};
use neurogrid::{plan_cbnnp, shortest_path, Cell};

/// Neural-field path planning with ocean-current compensation.
#[derive(Debug, Parser)]
#[command(name = "neurogrid", version)]
struct Cli {
    /// Scenario config (JSON). Built-in defaults are used without it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random-map seed; base seed of seeded sweep families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config's out_dir, else ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: OutputFormat,
    /// Integration step, s.
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// bnnp | cbnnp | both
    #[arg(long, global = true)]
    variant: Option<VariantSelection>,
    /// Include wall-clock timings in record files.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan once and print the waypoints and path length.
    Plan,
    /// Run one scenario and write trajectories and records.
    Simulate,
    /// Run a named sweep: directions2d | speeds2d | speeds3d | directions3d | ratio | dynamic.
    Sweep {
        name: SweepKind,
        /// Maps per obstacle ratio (ratio sweep only).
        #[arg(long, default_value_t = 50)]
        seeds: usize,
    },
    /// Print the exact shortest grid path.
    Oracle,
    /// Check a config file without running it.
    ValidateConfig,
}

impl Cli {
    fn scenario(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.set_seed(seed);
        }
        if let Some(dt) = self.dt {
            cfg.sim.dt = dt;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = Some(dir.clone());
        }
        Ok(cfg)
    }

    fn out_dir(cfg: &ScenarioConfig) -> PathBuf {
        cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn print_path(label: &str, path: &[Cell], length: f64, status: &str) {
    println!(
        "{label}: {} waypoints, length {length:.4} m, {status}",
        path.len()
    );
    for (i, c) in path.iter().enumerate() {
        println!("  {i:>3} {c}");
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = cli.scenario()?;
    match &cli.command {
        Command::ValidateConfig => {
            let map = cfg.validate()?;
            println!(
                "config ok: {}D map {:?}, {} obstacles, origin {}, destination {}",
                map.dims(),
                &map.extent()[..map.dims()],
                map.obstacle_count(),
                cfg.origin(),
                cfg.destination()
            );
        }
        Command::Plan => {
            let map = cfg.validate()?;
            let guidance = guidance_params(&cfg.sim_params());
            let plan = plan_cbnnp(
                &map,
                cfg.origin(),
                cfg.destination(),
                &cfg.current(),
                &guidance,
            )?;
            match cli.format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&plan)?),
                OutputFormat::Csv => {
                    let status = format!("{:?}", plan.path.status).to_lowercase();
                    print_path("plan", &plan.path.waypoints, plan.path.length(), &status);
                }
            }
        }
        Command::Oracle => {
            let map = cfg.validate()?;
            let r = shortest_path(&map, cfg.origin(), cfg.destination());
            match cli.format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&r)?),
                OutputFormat::Csv if r.is_reachable() => {
                    print_path("oracle", &r.path, r.length, "reachable")
                }
                OutputFormat::Csv => println!("oracle: destination unreachable"),
            }
        }
        Command::Simulate => {
            let out = run_scenario(&cfg)?;
            let dir = Cli::out_dir(&cfg);
            let files = out.write(&dir, cli.format, cli.timing)?;
            for r in out.records() {
                let outcome = if r.reached {
                    "reached".to_string()
                } else {
                    r.flags()
                };
                println!(
                    "{:<6} planned {:.4} m, traveled {:.4} m, max deviation {:.4} m, {outcome}",
                    r.variant.label(),
                    r.planned_length,
                    r.traveled_length,
                    r.deviation_max
                );
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Sweep { name, seeds } => {
            // only numeric settings are taken from the config; sweeps fix
            // their own maps, endpoints and currents
            cfg.validate()?;
            let settings = SweepSettings {
                sim: cfg.sim_params(),
                base_seed: cli.seed.unwrap_or(0),
                seeds: *seeds,
                ..SweepSettings::default()
            };
            let dir = Cli::out_dir(&cfg);
            let report = run_named_sweep(*name, &settings, &dir, cli.format, cli.timing)?;
            print!("{}", report.summary);
            for f in report.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
