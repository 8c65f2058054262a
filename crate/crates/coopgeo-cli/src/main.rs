//! Experiment harness for the beaconless cooperative forwarding simulator.
//!
//! Three subcommands: `run` executes one experiment cell and writes a
//! single record, `sweep` walks an axis (optionally under both cooperative
//! flags) and writes one row per cell, `trace` runs a single seeded route
//! and writes its frame chronology. Identical inputs produce byte-identical
//! outputs.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use coopgeo::channel::Modulation;
use coopgeo::protocol::{frame_log, run_route};
use coopgeo::rng::SimRng;
use coopgeo::simcore::topology::{
    gen_area_topology, gen_per_hop_topology_with_dst, PER_HOP_DST, PER_HOP_SRC,
};
use coopgeo::simcore::{run_replications, SimConfig, TopologyMode};

use config::{load_config, ExperimentSpec, SweepAxis};
use output::{run_record, sweep_record, write_frames, write_records, OutputFormat, Record};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Sim(#[from] coopgeo::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Flat key=value config file; every key optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; `-` or absent writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    format: OutputFormat,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(format!("unknown format `{s}`, expected csv|json")),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "coopgeo",
    about = "Monte-Carlo harness for contention-based geographic forwarding with cooperative relaying",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment cell and write a single metrics record.
    Run(CommonArgs),
    /// Sweep an axis and write one row per (value, cooperative flag).
    Sweep(CommonArgs),
    /// Run one seeded route and write its frame chronology.
    Trace(CommonArgs),
}

fn load_spec(args: &CommonArgs) -> Result<ExperimentSpec, CliError> {
    let mut spec = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentSpec {
            base: SimConfig::default(),
            sweep: None,
        },
    };
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    spec.base
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

fn open_sink(args: &CommonArgs) -> Result<Box<dyn Write>, CliError> {
    match &args.out {
        Some(p) if p.as_os_str() != "-" => {
            let f = std::fs::File::create(p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        _ => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn cmd_run(args: &CommonArgs) -> Result<(), CliError> {
    let spec = load_spec(args)?;
    if spec.sweep.is_some() {
        return Err(CliError::Config(
            "`run` expects a config without a sweep axis; use `sweep`".into(),
        ));
    }
    let report = run_replications(&spec.base)?;
    let records = vec![run_record(&spec.base, &report)];
    write_records(open_sink(args)?, &records, args.format)
}

fn cmd_sweep(args: &CommonArgs) -> Result<(), CliError> {
    let spec = load_spec(args)?;
    let Some(sweep) = spec.sweep else {
        return Err(CliError::Config(
            "`sweep` needs sweep_axis (and optionally sweep_values) in the config".into(),
        ));
    };
    let mut values = sweep.values.clone();
    values.sort_unstable();
    values.dedup();
    let flags: &[bool] = if sweep.both_cooperative {
        &[false, true]
    } else if spec.base.cooperative {
        &[true]
    } else {
        &[false]
    };

    let mut records: Vec<Record> = Vec::new();
    for &value in &values {
        for &coop in flags {
            let mut cfg = spec.base.clone();
            cfg.cooperative = coop;
            match sweep.axis {
                SweepAxis::NeighborCount => cfg.neighbor_count = value,
                SweepAxis::Constellation => {
                    cfg.modulation =
                        Modulation::new(value).map_err(|e| CliError::Config(e.to_string()))?;
                }
            }
            cfg.validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
            let report = run_replications(&cfg)?;
            records.push(sweep_record(sweep.axis.name(), value, &cfg, &report));
        }
    }
    write_records(open_sink(args)?, &records, args.format)
}

fn cmd_trace(args: &CommonArgs) -> Result<(), CliError> {
    let spec = load_spec(args)?;
    let cfg = &spec.base;
    let ctx = cfg.hop_context()?;
    let mut rng = SimRng::substream(cfg.seed, 0);
    let report = match cfg.topology_mode {
        TopologyMode::PerHopDisk => {
            let topo = gen_per_hop_topology_with_dst(
                cfg.neighbor_count,
                cfg.range_m,
                cfg.effective_dst_distance_m(),
                &mut rng,
            );
            let limit = cfg.effective_hop_limit(topo.len());
            run_route(&topo, PER_HOP_SRC, PER_HOP_DST, &ctx, &mut rng, limit)
        }
        TopologyMode::MultiHopArea => {
            let (topo, src, dst) = gen_area_topology(
                cfg.node_count,
                cfg.effective_area_side_m(),
                cfg.range_m,
                cfg.require_connected,
                &mut rng,
            );
            let limit = cfg.effective_hop_limit(topo.len());
            run_route(&topo, src, dst, &ctx, &mut rng, limit)
        }
    };
    write_frames(open_sink(args)?, &frame_log(&report), args.format)
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Trace(args) => cmd_trace(args),
    };
    if let Err(e) = result {
        eprintln!("coopgeo: {e}");
        std::process::exit(1);
    }
}
