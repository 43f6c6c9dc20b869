//! Command-line front end: assembly, classification, stability indices,
//! simulation, reference-run reproduction and parameter sweeps.

use std::f64::consts::LN_10;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pluricycle::analysis::{self, RunSettings};
use pluricycle::error::Error;
use pluricycle::model::{Case, ParameterSet};
use pluricycle::presets::{self, Preset, Variant};
use pluricycle::spectrum;
use pluricycle::stability;

#[derive(Parser)]
#[command(
    name = "pluricycle",
    about = "Heteroclinic cycles between axis and plane equilibria in R^4: \
             stability indices, spectra, log-space simulation and sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the stability index delta and the radial verdicts.
    Delta(DeltaArgs),
    /// Classify every eigenvalue at every equilibrium.
    Classify(ClassifyArgs),
    /// Integrate a trajectory and compare minima scaling against delta.
    Simulate(SimulateArgs),
    /// Re-run one of the eight built-in reference runs.
    Reproduce(ReproduceArgs),
    /// Sweep delta over a parameter range and locate delta = 1 roots.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Case id (1..4); optional when implied by --preset or the params file.
    #[arg(long)]
    case: Option<u8>,
    /// Built-in parameter set: fig9a, fig9b, ... fig12b.
    #[arg(long, conflicts_with = "params")]
    preset: Option<String>,
    /// Flat JSON parameter file {"case": n, "d1": ..., ...}.
    #[arg(long)]
    params: Option<PathBuf>,
}

impl SourceArgs {
    fn resolve(&self) -> Result<(ParameterSet, Option<Preset>), Error> {
        match (&self.preset, &self.params) {
            (Some(name), None) => {
                let preset = presets::by_name(name).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "unknown preset \"{name}\"; available: {}",
                        presets::names().join(", ")
                    ))
                })?;
                if let Some(id) = self.case {
                    let case = Case::from_id(id)?;
                    if case != preset.case {
                        return Err(Error::InvalidInput(format!(
                            "preset {name} belongs to {}, not case {id}",
                            preset.case
                        )));
                    }
                }
                Ok((preset.params.clone(), Some(preset)))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                let mut doc: serde_json::Value = serde_json::from_str(&text)?;
                if let Some(obj) = doc.as_object_mut() {
                    if !obj.contains_key("case") {
                        if let Some(id) = self.case {
                            obj.insert("case".into(), serde_json::json!(id));
                        }
                    }
                }
                let params = ParameterSet::from_json_value(&doc)?;
                if let Some(id) = self.case {
                    if params.case() != Case::from_id(id)? {
                        return Err(Error::InvalidInput(format!(
                            "parameter file is for {}, not case {id}",
                            params.case()
                        )));
                    }
                }
                Ok((params, None))
            }
            (None, None) => Err(Error::InvalidInput(
                "exactly one parameter source is required: --preset or --params".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        }
    }
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Also write report.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Also write classify.json into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunTuning {
    /// Integrator tolerance (absolute and relative).
    #[arg(long)]
    tol: Option<f64>,
    /// Minima ceiling as a raw coordinate value (default 1e-3).
    #[arg(long)]
    ceiling: Option<f64>,
    /// Departure threshold as a raw coordinate value (default 1e-1).
    #[arg(long)]
    departure: Option<f64>,
    /// Stop after this many minima (default 12).
    #[arg(long)]
    max_minima: Option<usize>,
    /// Time horizon (default 5e6).
    #[arg(long)]
    t_max: Option<f64>,
    /// Output directory for the artifact files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Keep every n-th trajectory sample in trajectory.csv.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Export log columns in base 10 instead of natural logs.
    #[arg(long)]
    log10: bool,
}

impl RunTuning {
    fn settings(&self) -> Result<RunSettings, Error> {
        let mut s = RunSettings::default();
        if let Some(tol) = self.tol {
            if tol <= 0.0 || !tol.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
            s.rel_tol = tol;
            s.abs_tol = tol;
        }
        if let Some(c) = self.ceiling {
            s.ceiling = positive_to_log(c, "ceiling")?;
        }
        if let Some(d) = self.departure {
            s.departure = positive_to_log(d, "departure")?;
        }
        if let Some(m) = self.max_minima {
            s.max_minima = m;
        }
        if let Some(t) = self.t_max {
            s.t_max = t;
        }
        Ok(s)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Initial x4, e.g. 1e-600; exponents beyond f64 range are fine.
    #[arg(long)]
    x4: Option<String>,
    #[command(flatten)]
    tuning: RunTuning,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Case id (1..4).
    #[arg(long)]
    case: u8,
    /// Variant: a (stable side) or b (unstable side).
    #[arg(long)]
    variant: String,
    #[command(flatten)]
    tuning: RunTuning,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated parameter keys moved together, e.g. e23,e41.
    #[arg(long)]
    keys: String,
    #[arg(long)]
    lo: f64,
    #[arg(long)]
    hi: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Write sweep.csv into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive_to_log(value: f64, what: &str) -> Result<f64, Error> {
    if value <= 0.0 || !value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{what} must be a positive number, got {value}"
        )));
    }
    Ok(value.ln())
}

/// Parse a positive decimal like "1e-600" into its natural log, supporting
/// exponents far outside the f64 range.
fn parse_log_of_positive(s: &str) -> Result<f64, Error> {
    let bad = || Error::InvalidInput(format!("\"{s}\" is not a positive number"));
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e),
        None => (s, "0"),
    };
    let m: f64 = mantissa.trim().parse().map_err(|_| bad())?;
    let k: f64 = exponent.trim().parse().map_err(|_| bad())?;
    if m <= 0.0 || !m.is_finite() {
        return Err(bad());
    }
    Ok(m.ln() + k * LN_10)
}

fn print_json(value: &serde_json::Value) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_json(dir: &PathBuf, name: &str, value: &serde_json::Value) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn cmd_delta(args: &DeltaArgs) -> Result<(), Error> {
    let (params, _) = args.source.resolve()?;
    let report = stability::delta(&params)?;
    let json = report.to_json_value();
    print_json(&json)?;
    if let Some(dir) = &args.out {
        write_json(dir, "report.json", &json)?;
    }
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Error> {
    let (params, _) = args.source.resolve()?;
    let report = spectrum::classify(&params)?;
    let blocks = spectrum::radial_stability(&params);
    let mut json = report.to_json_value();
    if let Some(obj) = json.as_object_mut() {
        obj.insert(
            "theorem1".into(),
            serde_json::json!(spectrum::check_theorem1(&report)),
        );
        obj.insert(
            "radial".into(),
            serde_json::json!(blocks.iter().map(|b| b.to_json_value()).collect::<Vec<_>>()),
        );
    }
    print_json(&json)?;
    if let Some(dir) = &args.out {
        write_json(dir, "classify.json", &json)?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let (params, preset) = args.source.resolve()?;
    let settings = args.tuning.settings()?;
    let u4 = args.x4.as_deref().map(parse_log_of_positive).transpose()?;
    // The standard start is x = (1, d1, 1e-10, depth); the preset's variant
    // labels the verdict only when its standard depth is used unchanged.
    let u0 = [
        0.0,
        params.get("d1").ln(),
        -10.0 * LN_10,
        u4.unwrap_or_else(|| {
            preset
                .as_ref()
                .map(|p| p.x4_exp10 as f64 * LN_10)
                .unwrap_or(-600.0 * LN_10)
        }),
    ];
    let variant = match (&preset, u4) {
        (Some(p), None) => Some(p.variant),
        _ => None,
    };
    let run = analysis::run_simulation(&params, u0, variant, &settings)?;
    analysis::write_artifacts(
        &run,
        &args.tuning.out,
        args.tuning.stride,
        args.tuning.log10,
    )?;
    print_json(&run.verdict.to_json_value())
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<(), Error> {
    let case = Case::from_id(args.case)?;
    let variant = Variant::parse(&args.variant)?;
    let settings = args.tuning.settings()?;
    let (run, _files) = analysis::reproduce_figure(
        case,
        variant,
        &settings,
        &args.tuning.out,
        args.tuning.stride,
        args.tuning.log10,
    )?;
    print_json(&run.verdict.to_json_value())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let (params, _) = args.source.resolve()?;
    let keys: Vec<&str> = args
        .keys
        .split(',')
        .map(str::trim)
        .filter(|k| !k.is_empty())
        .collect();
    let sweep = stability::boundary_sweep(&params, &keys, args.lo, args.hi, args.grid)?;

    let mut csv = String::from("param,delta\n");
    for (v, d) in &sweep.points {
        csv.push_str(&analysis::format_seventeen(*v));
        csv.push(',');
        csv.push_str(&analysis::format_seventeen(*d));
        csv.push('\n');
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), &csv)?;
        for root in &sweep.roots {
            println!("root: {root:.10}");
        }
    } else {
        print!("{csv}");
        for root in &sweep.roots {
            eprintln!("root: {root:.10}");
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Delta(args) => cmd_delta(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reproduce(args) => cmd_reproduce(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::IntegrationFailure { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
