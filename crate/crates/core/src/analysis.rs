//! Post-processing of event streams into empirical stability measurements.
//!
//! Near the cycle, successive minima of `log x4` and the time intervals
//! between them both scale by `delta` per loop. The measurements here turn a
//! trajectory's minima into ratio estimates, classify the run empirically,
//! and compare against the analytic index.

use std::f64::consts::LN_10;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::integrate::{integrate, EventOptions, IntegrateOptions, LogState, Outcome, Trajectory};
use crate::model::{assemble_system, Case, ParameterSet, Vec4};
use crate::presets::{self, Preset, Variant};
use crate::stability::{delta, Prediction, StabilityReport};

/// Ordered minima `(t_n, m_n)` of a monitored log-coordinate.
#[derive(Clone, Debug, Default)]
pub struct MinimaSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl MinimaSeries {
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> MinimaSeries {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (t, m) in pairs {
            times.push(t);
            values.push(m);
        }
        MinimaSeries { times, values }
    }

    pub fn from_trajectory(trajectory: &Trajectory, coordinate: usize) -> MinimaSeries {
        MinimaSeries::new(trajectory.minima().map(|e| (e.t, e.u[coordinate - 1])))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Successive value ratios `rho_n = m_{n+1} / m_n`, skipping zero
    /// denominators.
    pub fn value_ratios(&self) -> Vec<f64> {
        self.values
            .windows(2)
            .filter(|w| w[0] != 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// Successive interval ratios
    /// `tau_n = (t_{n+2} - t_{n+1}) / (t_{n+1} - t_n)`.
    pub fn interval_ratios(&self) -> Vec<f64> {
        let intervals: Vec<f64> = self.times.windows(2).map(|w| w[1] - w[0]).collect();
        intervals
            .windows(2)
            .filter(|w| w[0] != 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median of the last `tail` value ratios and interval ratios.
pub fn minima_ratios(series: &MinimaSeries, tail: usize) -> Result<(f64, f64)> {
    if tail == 0 {
        return Err(Error::Analysis("tail window must be at least 1".into()));
    }
    if series.len() < tail + 1 {
        return Err(Error::Analysis(format!(
            "need at least {} minima for a tail of {tail}, have {}",
            tail + 1,
            series.len()
        )));
    }
    let rhos = series.value_ratios();
    let taus = series.interval_ratios();
    let rho_med = median(&rhos[rhos.len() - tail.min(rhos.len())..]);
    let tau_med = if taus.is_empty() {
        f64::NAN
    } else {
        median(&taus[taus.len() - tail.min(taus.len())..])
    };
    Ok((rho_med, tau_med))
}

/// Empirical stability read off a minima series.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    Stable,
    Unstable,
    Undecided,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Unstable => "unstable",
            Classification::Undecided => "undecided",
        }
    }
}

/// Stable when `|m_n|` strictly increases across the trailing window,
/// unstable when it strictly decreases, undecided otherwise.
pub fn empirical_classification(series: &MinimaSeries, window: usize) -> Result<Classification> {
    if series.len() < 3 {
        return Err(Error::Analysis(format!(
            "classification needs at least 3 minima, have {}",
            series.len()
        )));
    }
    let n = series.len();
    let w = window.max(3).min(n);
    let tail = &series.values()[n - w..];
    let increasing = tail.windows(2).all(|p| p[1].abs() > p[0].abs());
    let decreasing = tail.windows(2).all(|p| p[1].abs() < p[0].abs());
    Ok(match (increasing, decreasing) {
        (true, false) => Classification::Stable,
        (false, true) => Classification::Unstable,
        _ => Classification::Undecided,
    })
}

/// Settings of one verification run.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Minima ceiling, natural log.
    pub ceiling: f64,
    /// Departure threshold, natural log.
    pub departure: f64,
    pub max_minima: usize,
    pub t_max: f64,
    /// Relative tolerance for the estimate-vs-delta agreement flags.
    pub agreement_tolerance: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            ceiling: 1e-3f64.ln(),
            departure: 1e-1f64.ln(),
            max_minima: 12,
            t_max: 5e6,
            agreement_tolerance: 0.05,
        }
    }
}

impl RunSettings {
    pub fn integrate_options(&self) -> IntegrateOptions {
        IntegrateOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            events: EventOptions {
                coordinate: 4,
                ceiling: self.ceiling,
                departure: self.departure,
                max_minima: Some(self.max_minima),
                section: None,
            },
            ..IntegrateOptions::default()
        }
    }
}

/// Comparison of one simulated run against the analytic index.
#[derive(Clone, Debug)]
pub struct VerificationVerdict {
    pub case: Case,
    pub variant: Option<Variant>,
    pub delta: f64,
    pub ratio_estimate: f64,
    pub interval_ratio_estimate: f64,
    pub predicted: Prediction,
    pub empirical: Classification,
    pub tolerance: f64,
    pub agree: bool,
}

impl VerificationVerdict {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "case": self.case.id(),
            "variant": self.variant.map(|v| v.letter().to_string()),
            "delta": self.delta,
            "ratio_estimate": self.ratio_estimate,
            "interval_ratio_estimate": self.interval_ratio_estimate,
            "predicted": self.predicted.label(),
            "empirical": self.empirical.label(),
            "tolerance": self.tolerance,
            "agree": self.agree,
        })
    }
}

/// One completed verification run: analytic report, trajectory, minima and
/// verdict together.
#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub report: StabilityReport,
    pub trajectory: Trajectory,
    pub series: MinimaSeries,
    pub verdict: VerificationVerdict,
}

/// Median ratio over ratio indices 3..=8 (1-based), the window where the
/// early transient has faded but the late minima are still deep; falls back
/// to whatever is available on short runs.
fn window_median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let lo = 2.min(xs.len() - 1);
    let hi = 8.min(xs.len());
    median(&xs[lo..hi])
}

/// Integrate from `u0` and compare the measured minima scaling against the
/// analytic index.
pub fn run_simulation(
    params: &ParameterSet,
    u0: Vec4,
    variant: Option<Variant>,
    settings: &RunSettings,
) -> Result<SimulationRun> {
    let report = delta(params)?;
    let system = assemble_system(params);
    let trajectory = integrate(
        &system,
        LogState { t: 0.0, u: u0 },
        settings.t_max,
        &settings.integrate_options(),
    );
    if let Outcome::Failed(reason) = &trajectory.outcome {
        return Err(Error::IntegrationFailure {
            t: trajectory.samples.last().map(|s| s.t).unwrap_or(0.0),
            reason: reason.clone(),
        });
    }
    let series = MinimaSeries::from_trajectory(&trajectory, 4);
    if series.len() < 3 {
        return Err(Error::Analysis(format!(
            "run produced {} minima; at least 3 are needed for a verdict",
            series.len()
        )));
    }

    let ratio_estimate = window_median(&series.value_ratios());
    let interval_ratio_estimate = window_median(&series.interval_ratios());
    let empirical = empirical_classification(&series, 6)?;

    let tol = settings.agreement_tolerance;
    let classification_matches = match report.predicted {
        Prediction::Stable => empirical == Classification::Stable,
        Prediction::Unstable => empirical == Classification::Unstable,
        Prediction::Marginal => empirical == Classification::Undecided,
    };
    let ratio_ok = (ratio_estimate - report.delta).abs() <= tol * report.delta;
    let interval_ok = (interval_ratio_estimate - report.delta).abs() <= tol * report.delta;
    let verdict = VerificationVerdict {
        case: params.case(),
        variant,
        delta: report.delta,
        ratio_estimate,
        interval_ratio_estimate,
        predicted: report.predicted,
        empirical,
        tolerance: tol,
        agree: classification_matches && ratio_ok && interval_ok,
    };

    Ok(SimulationRun {
        report,
        trajectory,
        series,
        verdict,
    })
}

/// Run a preset from its standard initial state
/// `x = (1, d1, 1e-10, 10^(-600 or -900))`.
pub fn run_preset(
    preset: &Preset,
    u4_override: Option<f64>,
    settings: &RunSettings,
) -> Result<SimulationRun> {
    run_simulation(
        &preset.params,
        preset.initial_log_state(u4_override),
        Some(preset.variant),
        settings,
    )
}

/// Reproduce one built-in reference run and write its artifact files into `dir`:
/// `trajectory.csv`, `minima.csv`, `greyline.csv` and `verdict.json`.
pub fn reproduce_figure(
    case: Case,
    variant: Variant,
    settings: &RunSettings,
    dir: &Path,
    stride: usize,
    log_base10: bool,
) -> Result<(SimulationRun, Vec<PathBuf>)> {
    let preset = presets::for_figure(case, variant);
    let run = run_preset(&preset, None, settings)?;
    let files = write_artifacts(&run, dir, stride, log_base10)?;
    Ok((run, files))
}

/// 17 significant digits, deterministic across platforms.
pub fn format_seventeen(x: f64) -> String {
    format!("{x:.16e}")
}

fn export_scale(log_base10: bool) -> f64 {
    if log_base10 {
        LN_10
    } else {
        1.0
    }
}

/// Write the run's artifact files. `stride` decimates the trajectory samples;
/// `log_base10` converts exported log-values from natural to base-10 logs.
pub fn write_artifacts(
    run: &SimulationRun,
    dir: &Path,
    stride: usize,
    log_base10: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let stride = stride.max(1);
    let scale = export_scale(log_base10);
    let mut files = Vec::new();

    let path = dir.join("trajectory.csv");
    {
        let mut out = String::from("t,u1,u2,u3,u4\n");
        for (idx, s) in run.trajectory.samples.iter().enumerate() {
            if idx % stride != 0 && idx != run.trajectory.samples.len() - 1 {
                continue;
            }
            out.push_str(&format_seventeen(s.t));
            for k in 0..4 {
                out.push(',');
                out.push_str(&format_seventeen(s.u[k] / scale));
            }
            out.push('\n');
        }
        fs::write(&path, out)?;
    }
    files.push(path);

    let path = dir.join("events.csv");
    {
        let mut out = String::from("kind,t,u4\n");
        for e in &run.trajectory.events {
            out.push_str(&format!(
                "{},{},{}\n",
                e.kind.label(),
                format_seventeen(e.t),
                format_seventeen(e.u[3] / scale)
            ));
        }
        fs::write(&path, out)?;
    }
    files.push(path);

    let path = dir.join("minima.csv");
    {
        let mut out = String::from("n,t,m\n");
        for (n, (t, m)) in run
            .series
            .times()
            .iter()
            .zip(run.series.values())
            .enumerate()
        {
            out.push_str(&format!(
                "{},{},{}\n",
                n + 1,
                format_seventeen(*t),
                format_seventeen(m / scale)
            ));
        }
        fs::write(&path, out)?;
    }
    files.push(path);

    let path = dir.join("greyline.csv");
    {
        // Model prediction seeded at the first detected minimum: values scale
        // by delta each loop, and so do the intervals between them.
        let mut out = String::from("n,t,m\n");
        let d = run.report.delta;
        let times = run.series.times();
        let values = run.series.values();
        if !values.is_empty() {
            let mut m = values[0];
            let mut t = times[0];
            let mut interval = if times.len() >= 2 {
                times[1] - times[0]
            } else {
                0.0
            };
            for n in 0..values.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    n + 1,
                    format_seventeen(t),
                    format_seventeen(m / scale)
                ));
                m *= d;
                if n > 0 {
                    interval *= d;
                }
                t += interval;
            }
        }
        fs::write(&path, out)?;
    }
    files.push(path);

    let path = dir.join("verdict.json");
    {
        let mut f = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, &run.verdict.to_json_value())?;
        writeln!(f)?;
    }
    files.push(path);

    Ok(files)
}
