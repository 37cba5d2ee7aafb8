use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relsmart_core::construct::{sample_labelings, sample_set_system, SetSystemThresholds, DEFAULT_RETRY_CAP};
use relsmart_core::harness::{self, emit_results, render, report_to_csv, AuditConfig, Format, TesterSpec};
use relsmart_core::hypothesis::bits_to_string;
use relsmart_core::oig::{build_one_inclusion_graph, densest_subgraph_density, min_max_fractional_orientation, BehaviorSet};
use relsmart_core::oracle::{optimal_fixed_error, GameInstance};
use relsmart_core::{hypothesis::parse_bits, Error, ExperimentConfig, RandomSource};

/// Env var holding the default worker count.
const WORKERS_ENV: &str = "RELSMART_WORKERS";

#[derive(Parser)]
#[command(name = "relsmart", version, about = "Simulation lab for relatively smart PAC learners")]
struct Cli {
    /// Worker threads (default: $RELSMART_WORKERS, else all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config, or a named preset.
    Simulate {
        /// Config file; `-` reads stdin.
        config: Option<PathBuf>,
        /// Use the built-in defaults of this experiment instead of a file.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        /// Write results here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Print the resolved config and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Acceptance rate of the modified uniformity tester on a row.
    TestUniformity {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// uniform | subset-uniform:k | pointmass | off-support:p | perturbed:e | JSON distribution.
        #[arg(long, default_value = "uniform")]
        distribution: Vec<String>,
        /// Defaults to the tester's sample bound at xi/2.
        #[arg(long)]
        sample_size: Option<u64>,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_SEED)]
        seed: u64,
    },
    /// Min-max fractional orientation of a behavior set (JSON list of bit strings).
    OigOrient {
        /// Input file; stdin when omitted.
        input: Option<PathBuf>,
    },
    /// Sample a verified set system and its random labelings as JSON.
    Construct {
        #[arg(long)]
        universe: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        intersection: usize,
        /// Probe containers of size up to this (0 disables).
        #[arg(long, default_value_t = 0)]
        container_size: usize,
        #[arg(long, default_value_t = 0)]
        container_count: usize,
        #[arg(long, default_value_t = DEFAULT_RETRY_CAP)]
        retries: usize,
        #[arg(long, default_value_t = ExperimentConfig::DEFAULT_SEED)]
        seed: u64,
    },
    /// Solve the fixed-distribution learning game for a JSON instance.
    Oracle {
        /// Input file; stdin when omitted.
        input: Option<PathBuf>,
    },
    /// Audit a certifier against a learner from a TOML config.
    AuditCertifier {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Checks(String),
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownExperiment(_) | Error::UnknownComponent(_) | Error::Json(_) => {
                Failure::Config(e.to_string())
            }
            Error::InvalidParameter(_) | Error::InvalidDistribution(_) | Error::InvalidPoint(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(io::stdout(), "{text}")?;
    Ok(())
}

fn init_workers(flag: Option<usize>) -> Result<(), Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(v.parse().map_err(|_| Failure::Config(format!("{WORKERS_ENV}={v:?} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

/// Prints failed checks to stderr and turns them into a failure.
fn report_checks(table: &harness::ResultTable) -> Result<(), Failure> {
    let failed: Vec<_> = table.checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!("FAIL {}: {}", c.name, c.detail);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(format!("{} of {} checks failed", failed.len(), table.checks.len())))
    }
}

#[derive(Serialize)]
struct OrientationReport {
    vertices: usize,
    edges: usize,
    value: f64,
    out_degrees: Vec<f64>,
    densest_subgraph_density: f64,
    duality_gap: f64,
    duality_ok: bool,
}

#[derive(Serialize)]
struct ConstructOutput {
    seed: u64,
    universe: u64,
    n: usize,
    sets: Vec<Vec<u64>>,
    labelings: Vec<String>,
    report: relsmart_core::construct::SetSystemReport,
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_workers(cli.workers)?;
    match cli.command {
        Command::Simulate { config, preset, seed, format, output, print_config } => {
            let mut cfg = match (config, preset) {
                (_, Some(name)) => ExperimentConfig::preset(&name)?,
                (path, None) => ExperimentConfig::from_toml(&read_input(path.as_deref())?)?,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if print_config {
                write!(io::stdout(), "{}", cfg.to_toml()?)?;
                return Ok(());
            }
            for row in check_regime_rows(&cfg) {
                eprintln!("regime {row}");
            }
            let table = harness::run_experiment(&cfg)?;
            match output {
                Some(path) => emit_results(&table, format.into(), &path)?,
                None => write!(io::stdout(), "{}", render(&table, format.into())?)?,
            }
            report_checks(&table)
        }
        Command::TestUniformity { n, xi, delta, trials, distribution, sample_size, seed } => {
            let mut cfg = ExperimentConfig::preset("tester-calibration")?;
            cfg.seed = seed;
            cfg.trials = trials;
            cfg.tester = Some(TesterSpec { n, xi, delta, sample_size, distributions: distribution });
            let table = harness::run_experiment(&cfg)?;
            write!(io::stdout(), "{}", render(&table, Format::Csv)?)?;
            report_checks(&table)
        }
        Command::OigOrient { input } => {
            let bits: Vec<String> = serde_json::from_str(&read_input(input.as_deref())?).map_err(Error::from)?;
            let rows = bits.iter().map(|b| parse_bits(b)).collect::<Result<Vec<_>, _>>()?;
            let g = build_one_inclusion_graph(&BehaviorSet::from_bits(rows)?);
            let o = min_max_fractional_orientation(&g)?;
            let density = densest_subgraph_density(&g)?;
            let gap = (o.value - density).abs();
            let valid = o.is_valid(&g);
            print_json(&OrientationReport {
                vertices: g.vertex_count(),
                edges: g.edges.len(),
                value: o.value,
                out_degrees: o.out_degree,
                densest_subgraph_density: density,
                duality_gap: gap,
                duality_ok: gap <= 1e-6 && valid,
            })
        }
        Command::Construct { universe, n, k, intersection, container_size, container_count, retries, seed } => {
            let thresholds = SetSystemThresholds {
                container_size,
                container_count,
                ..SetSystemThresholds::intersection_only(intersection)
            };
            let rng = RandomSource::new(seed, 0);
            let (system, report) = sample_set_system(universe, n, k, &thresholds, retries, &rng.fork(0))?;
            let class = sample_labelings(&system, &mut rng.fork(1));
            let labelings = class.labels().iter().map(|l| bits_to_string(l)).collect();
            print_json(&ConstructOutput {
                seed,
                universe,
                n,
                sets: system.sets.clone(),
                labelings,
                report,
            })
        }
        Command::Oracle { input } => {
            let g: GameInstance = serde_json::from_str(&read_input(input.as_deref())?).map_err(Error::from)?;
            print_json(&optimal_fixed_error(&g)?)
        }
        Command::AuditCertifier { config, format } => {
            let cfg = AuditConfig::from_toml(&read_input(Some(&config))?)?;
            let report = harness::run_audit(&cfg)?;
            match format {
                OutFormat::Csv => write!(io::stdout(), "{}", report_to_csv(&report)?)?,
                OutFormat::Json => print_json(&report)?,
            }
            if report.all_sound() {
                Ok(())
            } else {
                Err(Failure::Checks("certificate below measured error".into()))
            }
        }
    }
}

fn check_regime_rows(cfg: &ExperimentConfig) -> Vec<String> {
    harness::check_regime(cfg)
        .rows
        .iter()
        .map(|r| format!("{} {}: {} vs {} -> {}", r.name, r.inequality, r.left, r.right, if r.holds { "holds" } else { "fails" }))
        .collect()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("relsmart: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("relsmart: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("relsmart: {msg}");
            ExitCode::from(2)
        }
    }
}
