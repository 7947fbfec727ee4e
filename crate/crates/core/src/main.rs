use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use framesense::bounds::{mp_scenario, BoundsReport, MpScenario};
use framesense::csvio::{fmt_f64, read_matrix, write_matrix};
use framesense::harness::{oracle_audit, sweep_mse_vs_l, sweep_timing, ExperimentConfig};
use framesense::linalg::{frame_potential, mse};
use framesense::matgen::{generate, Family, GeneratorSpec};
use framesense::{Algorithm, Error, NoiseModel, PlacementOptions, Result, SensingMatrix};

#[derive(Parser)]
#[command(
    name = "framesense",
    version,
    about = "Sensor placement by greedy frame-potential minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose L sensor locations and print them with FP and MSE.
    Place(PlaceArgs),
    /// Print every bound for a placement as key=value lines.
    Bounds(PlaceArgs),
    /// MSE against the number of sensors.
    SweepMse(RunArgs),
    /// Placement wall time against the problem size.
    SweepTime(RunArgs),
    /// Greedy against exhaustive optimum, with all bounds.
    Audit(RunArgs),
    /// Write a generated matrix as CSV.
    Matgen(MatgenArgs),
    /// Closed-form factors for a large random matrix scenario.
    Mp {
        #[arg(long, default_value_t = 0.25)]
        c1: f64,
        #[arg(long, default_value_t = 6.0)]
        c2: f64,
        #[arg(long, default_value_t = 100)]
        k: usize,
    },
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// CSV matrix, one row per line.
    #[arg(long, group = "source")]
    matrix: Option<PathBuf>,
    /// Generate the matrix from this family instead.
    #[arg(long = "gen", group = "source")]
    family: Option<Family>,
}

#[derive(Args)]
struct PlaceArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, requires = "family")]
    n: Option<usize>,
    #[arg(long, requires = "family")]
    k: Option<usize>,
    #[arg(long, requires = "family")]
    scale: Option<f64>,
    #[arg(long, short = 'L')]
    sensors: usize,
    #[arg(long, default_value = "framesense")]
    algo: Algorithm,
    /// Seed for generation and random placement.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run FrameSense on the matrix as given.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output prefix; overrides `output` in the config.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct MatgenArgs {
    /// JSON generator spec: {"family", "n", "k", "seed", "scale", "entry_std"}.
    #[arg(long, conflicts_with_all = ["family", "n", "k"])]
    config: Option<PathBuf>,
    #[arg(long = "gen", required_unless_present = "config")]
    family: Option<Family>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    scale: Option<f64>,
    /// Writes `<out>.csv`.
    #[arg(long)]
    out: String,
    /// Accepted for symmetry with the sweep commands; generation is serial.
    #[arg(long)]
    threads: Option<usize>,
}

impl PlaceArgs {
    fn matrix(&self) -> Result<SensingMatrix> {
        match (&self.source.matrix, self.source.family) {
            (Some(path), _) => read_matrix(path),
            (None, Some(family)) => {
                let (Some(n), Some(k)) = (self.n, self.k) else {
                    return Err(Error::InvalidParameter("--gen needs --n and --k".into()));
                };
                generate(&GeneratorSpec {
                    scale: self.scale,
                    ..GeneratorSpec::new(family, n, k, self.seed)
                })
            }
            (None, None) => unreachable!("clap requires a source"),
        }
    }

    fn options(&self) -> PlacementOptions {
        PlacementOptions {
            normalize_rows: !self.no_normalize,
            algorithm: self.algo,
            seed: self.seed,
            sigma2: self.sigma2,
            ..PlacementOptions::default()
        }
    }
}

fn place_cmd(args: &PlaceArgs, with_bounds: bool) -> Result<()> {
    let psi = args.matrix()?;
    let noise = NoiseModel::new(args.sigma2)?;
    let sel = framesense::placement::place(&psi, args.sensors, &args.options())?;
    let chosen = sel.chosen_sorted();
    let shown: Vec<String> = chosen.iter().map(|i| (i + 1).to_string()).collect();
    println!("algorithm={}", args.algo);
    println!("chosen={}", shown.join(" "));
    println!("fp={}", fmt_f64(frame_potential(&psi, &chosen)?));
    println!("mse={}", fmt_f64(mse(&psi, &chosen, noise)?.value()));
    if with_bounds {
        print!("{}", BoundsReport::compute(&psi, &chosen)?.key_values());
    }
    Ok(())
}

fn load_config(
    args: &RunArgs,
    default: fn() -> ExperimentConfig,
) -> Result<(ExperimentConfig, String)> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default(),
    };
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| {
            Error::InvalidParameter("no output prefix: pass --out or set \"output\"".into())
        })?;
    Ok((cfg, out))
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn matgen_cmd(args: &MatgenArgs) -> Result<()> {
    let spec = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => GeneratorSpec {
            scale: args.scale,
            ..GeneratorSpec::new(
                args.family.expect("clap enforces --gen"),
                args.n.expect("clap enforces --n"),
                args.k.expect("clap enforces --k"),
                args.seed,
            )
        },
    };
    let psi = generate(&spec)?;
    let path = PathBuf::from(format!("{}.csv", args.out));
    write_matrix(&path, &psi)?;
    report_written(&[path]);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Place(a) => place_cmd(&a, false),
        Command::Bounds(a) => place_cmd(&a, true),
        Command::SweepMse(a) => {
            let (cfg, out) = load_config(&a, ExperimentConfig::mse_sweep_default)?;
            report_written(&sweep_mse_vs_l(&cfg)?.write(&out)?);
            Ok(())
        }
        Command::SweepTime(a) => {
            let (cfg, out) = load_config(&a, ExperimentConfig::timing_sweep_default)?;
            report_written(&sweep_timing(&cfg)?.write(&out)?);
            Ok(())
        }
        Command::Audit(a) => {
            let (cfg, out) = load_config(&a, ExperimentConfig::audit_default)?;
            report_written(&oracle_audit(&cfg)?.write(&out)?);
            Ok(())
        }
        Command::Matgen(a) => matgen_cmd(&a),
        Command::Mp { c1, c2, k } => {
            let sc = MpScenario::new(c1, c2, k)?;
            print!("{}", mp_scenario(&sc).report(&sc));
            Ok(())
        }
    }
}

/// Exit status 2 for inputs that violate a documented constraint, 1 for
/// everything else.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SensorCount { .. }
        | Error::InvalidParameter(_)
        | Error::ZeroRow { .. }
        | Error::Dimension(_)
        | Error::EnumerationGuard { .. }
        | Error::Parse { .. }
        | Error::NonFinite { .. }
        | Error::EmptyMatrix
        | Error::ShapeMismatch { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
