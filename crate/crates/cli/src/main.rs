use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use sagsin::experiment::{self, ExperimentKind, ExperimentSpec};
use sagsin::sim::output;
use sagsin::{run_scenario, Error, ScenarioConfig, SchedulerVariant, SimOptions};

#[derive(Parser)]
#[command(
    name = "sagsin",
    version,
    about = "Vessel / UAV / HAP / satellite edge-computing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write per-run CSVs.
    Run(RunArgs),
    /// Run a canned or custom parameter sweep and write CSV and SVG outputs.
    Experiment(ExperimentArgs),
    /// Check a configuration file and report problems by key.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario TOML; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Scheduler variant; repeat to compare several on the same seed.
    #[arg(long = "variant", default_value = "DASH")]
    variants: Vec<SchedulerVariant>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write per-slot queue contents.
    #[arg(long)]
    trace_queues: bool,
    /// Write per-slot pressure indices and differentials.
    #[arg(long)]
    dump_pressure: bool,
    /// Write per-slot optimization iterates.
    #[arg(long)]
    opt_trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    ComputeFluctuation,
    BandwidthFluctuation,
    HandoverDeficit,
    Custom,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    kind: KindArg,
    /// Base scenario TOML; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep values (percent for the canned sweeps), comma separated.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Dotted config key swept by the custom experiment, e.g. `vessels.count`.
    #[arg(long)]
    key: Option<String>,
    /// Variants to compare; all by default.
    #[arg(long = "variant")]
    variants: Vec<SchedulerVariant>,
    /// Seeds per point, starting at `--seed`.
    #[arg(long, default_value_t = experiment::DEFAULT_SEEDS_PER_POINT)]
    seeds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Invariant { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load(path: Option<&Path>) -> anyhow::Result<ScenarioConfig> {
    let config = match path {
        Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => ScenarioConfig::default(),
    };
    for w in config.validate()? {
        eprintln!("warning: {}: {}", w.key, w.message);
    }
    Ok(config)
}

fn jobs(j: Option<usize>) -> usize {
    j.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn run(a: RunArgs) -> anyhow::Result<ExitCode> {
    let mut config = load(a.config.as_deref())?;
    if let Some(s) = a.seed {
        config.simulation.seed = s;
    }
    let options = SimOptions {
        trace_queues: a.trace_queues,
        dump_pressure: a.dump_pressure,
        opt_trace: a.opt_trace,
        check_constraints: true,
    };
    let mut variants = a.variants.clone();
    variants.dedup();
    fs::create_dir_all(&a.out_dir)?;
    let mut rows = Vec::new();
    let mut violated = false;
    let config = &config;
    let mut metrics = Vec::with_capacity(variants.len());
    for chunk in variants.chunks(jobs(a.jobs)) {
        let done: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&v| s.spawn(move || run_scenario(config, v, options)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for m in done {
            metrics.push(m?);
        }
    }
    for (&v, m) in variants.iter().zip(metrics) {
        let dir = a.out_dir.join(v.label());
        fs::create_dir_all(&dir)?;
        output::write_delays(create(&dir, "delays.csv")?, &m)?;
        output::write_backlog(create(&dir, "backlog.csv")?, &m)?;
        if a.trace_queues {
            output::write_queue_trace(create(&dir, "queues.csv")?, &m)?;
        }
        if a.dump_pressure {
            output::write_pressure_trace(create(&dir, "pressure.csv")?, &m)?;
        }
        if a.opt_trace {
            output::write_opt_trace(create(&dir, "opt_trace.csv")?, &m)?;
        }
        println!(
            "{:<15} mean delay {:.3} s, unfinished {}, handover backlog {:.0} bits, slots {}",
            v.label(),
            m.mean_delay_s(),
            m.unfinished(),
            m.handover_backlog_bits(),
            m.slots_run()
        );
        for x in &m.violations {
            eprintln!(
                "violation: slot {} ({}): {}",
                x.slot, x.constraint, x.detail
            );
            violated = true;
        }
        rows.push(experiment::RunRecord {
            x: 0.0,
            variant: v,
            seed: config.simulation.seed,
            mean_delay_s: m.mean_delay_s(),
            handover_backlog_bits: m.handover_backlog_bits(),
            unfinished: m.unfinished(),
        });
    }
    experiment::write_runs_csv(create(&a.out_dir, "comparison.csv")?, &rows, false)?;
    Ok(if violated {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_experiment(a: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let base = load(a.config.as_deref())?;
    let kind = match a.kind {
        KindArg::ComputeFluctuation => ExperimentKind::ComputeFluctuation,
        KindArg::BandwidthFluctuation => ExperimentKind::BandwidthFluctuation,
        KindArg::HandoverDeficit => ExperimentKind::HandoverDeficit,
        KindArg::Custom => ExperimentKind::Custom {
            key: a
                .key
                .clone()
                .ok_or_else(|| Error::Config(vec!["key: custom experiments need --key".into()]))?,
        },
    };
    let mut spec = ExperimentSpec::canned(kind, base);
    if let Some(v) = a.values {
        spec.values = v;
    }
    if !a.variants.is_empty() {
        spec.variants = a.variants;
        spec.variants.dedup();
    }
    spec.seeds = (a.seed..a.seed + a.seeds as u64).collect();
    let result = experiment::run_experiment(&spec, jobs(a.jobs))?;
    for f in &result.failures {
        eprintln!(
            "failed: x={} {} seed {}: {}",
            f.x, f.variant, f.seed, f.error
        );
    }
    fs::create_dir_all(&a.out_dir)?;
    let name = spec.kind.name();
    experiment::write_sweep_csv(create(&a.out_dir, &format!("{name}.csv"))?, &result)?;
    experiment::write_runs_csv(
        create(&a.out_dir, &format!("{name}_runs.csv"))?,
        &result.runs,
        true,
    )?;
    fs::write(
        a.out_dir.join(format!("{name}.svg")),
        experiment::render_svg(&result),
    )?;
    for p in &result.points {
        println!(
            "{:>8} {:<15} {:.6e} ± {:.3e}",
            p.x,
            p.variant.label(),
            p.mean,
            p.stderr
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(path: &Path) -> anyhow::Result<ExitCode> {
    let config =
        ScenarioConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    for w in config.validate()? {
        println!("warning: {}: {}", w.key, w.message);
    }
    println!("ok");
    Ok(ExitCode::SUCCESS)
}
