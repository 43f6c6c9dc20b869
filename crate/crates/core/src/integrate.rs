//! Trajectory integration in logarithmic coordinates.
//!
//! All four coordinates are integrated as `u_k = ln x_k`, so states with
//! coordinates as small as 1e-900 stay representable; every coordinate
//! becomes tiny during some phase of the cycle, and a single chart avoids
//! switching logic. Underflow of `exp(u_k)` for dormant coordinates is
//! harmless because the coupling enters only through `exp(u)`.
//!
//! The stepper is an embedded Dormand-Prince 5(4) pair with cubic Hermite
//! dense output. Events (minima of a log-coordinate, rising section
//! crossings, departure from the cycle neighbourhood) are localised by
//! bisection on the interpolant.

use crate::error::{Error, Result};
use crate::model::{LVSystem, Vec4};

/// A trajectory point: time and the natural logs of the coordinates.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct LogState {
    pub t: f64,
    pub u: Vec4,
}

/// Exact vector field in log coordinates: `u_k' = r_k + (M exp(u))_k`.
pub fn log_rhs(system: &LVSystem, u: &Vec4) -> Vec4 {
    let x = [u[0].exp(), u[1].exp(), u[2].exp(), u[3].exp()];
    system.per_capita(&x)
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum EventKind {
    /// Local minimum of the monitored log-coordinate (derivative sign
    /// change - to +), below the event ceiling.
    Minimum,
    /// Rising crossing of the configured section level.
    SectionCrossing,
    /// The monitored coordinate rose through the departure threshold
    /// without having dipped below the ceiling since its last rise.
    Departure,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::Minimum => "minimum",
            EventKind::SectionCrossing => "crossing",
            EventKind::Departure => "departure",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub u: Vec4,
}

/// Why the integration stopped.
#[derive(Clone, PartialEq, Debug)]
pub enum Outcome {
    ReachedTMax,
    MaxMinimaReached,
    Departed,
    SectionReached,
    /// Step-size underflow or step-budget exhaustion; the trajectory up to
    /// the failure point is retained.
    Failed(String),
}

/// Stop when the monitored coordinate crosses `level` from below.
#[derive(Clone, Copy, Debug)]
pub struct SectionStop {
    /// Coordinate index, 1-based.
    pub coordinate: usize,
    /// Level in natural-log units.
    pub level: f64,
}

/// Event configuration. The monitored coordinate, the minima ceiling and the
/// departure threshold are all in natural-log units.
#[derive(Clone, Debug)]
pub struct EventOptions {
    /// Coordinate whose minima are tracked, 1-based. The cycle's deep dips
    /// happen in x4 for all four cases.
    pub coordinate: usize,
    /// Keep only minima below this value; excursion wiggles near the
    /// equilibria sit above it.
    pub ceiling: f64,
    /// A rise through this level without an intervening dip below the
    /// ceiling stops the run as departed.
    pub departure: f64,
    /// Stop after this many recorded minima.
    pub max_minima: Option<usize>,
    pub section: Option<SectionStop>,
}

impl Default for EventOptions {
    fn default() -> Self {
        EventOptions {
            coordinate: 4,
            ceiling: 1e-3f64.ln(),
            departure: 1e-1f64.ln(),
            max_minima: None,
            section: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    /// Cap on the step size. Growth rates are order one, so this bounds how
    /// far a reviving exponential term can swing within one step.
    pub max_step: f64,
    pub max_steps: usize,
    pub events: EventOptions,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            initial_step: 1e-4,
            max_step: 5.0,
            max_steps: 20_000_000,
            events: EventOptions::default(),
        }
    }
}

/// Integration output: samples at every accepted step, localised events, and
/// the stop reason.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<LogState>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub steps: usize,
    pub rhs_evals: usize,
}

impl Trajectory {
    pub fn minima(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.kind == EventKind::Minimum)
    }

    pub fn failed(&self) -> bool {
        matches!(self.outcome, Outcome::Failed(_))
    }
}

// Dormand-Prince 5(4) tableau. The field is autonomous, so the stage times
// are not needed.
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights, for the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &Vec4, h: f64, stages: &[Vec4], weights: &[f64]) -> Vec4 {
    let mut out = *y;
    for (k, w) in stages.iter().zip(weights) {
        if *w == 0.0 {
            continue;
        }
        for i in 0..4 {
            out[i] += h * w * k[i];
        }
    }
    out
}

/// Cubic Hermite interpolant over one accepted step.
struct StepInterp<'a> {
    t0: f64,
    h: f64,
    u0: &'a Vec4,
    f0: &'a Vec4,
    u1: &'a Vec4,
    f1: &'a Vec4,
}

impl StepInterp<'_> {
    fn at(&self, t: f64) -> Vec4 {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = h00 * self.u0[i]
                + h10 * self.h * self.f0[i]
                + h01 * self.u1[i]
                + h11 * self.h * self.f1[i];
        }
        out
    }
}

/// Bisect `g` for a sign change from `negative` at `a` to positive at `b`,
/// to a relative time tolerance of 1e-9.
fn bisect_time<G: Fn(f64) -> f64>(mut a: f64, mut b: f64, g: G) -> f64 {
    let tol = |x: f64| 1e-9 * x.abs().max(1.0);
    if g(a) >= 0.0 {
        return a;
    }
    while b - a > tol(b) {
        let mid = 0.5 * (a + b);
        if g(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Integrate from `u0` until `t_max` or an event-driven stop. The initial
/// state must be finite: trajectories live in the interior of the positive
/// orthant, with small coordinates represented by large negative logs.
pub fn integrate(
    system: &LVSystem,
    u0: LogState,
    t_max: f64,
    opts: &IntegrateOptions,
) -> Trajectory {
    if !u0.t.is_finite() || u0.u.iter().any(|v| !v.is_finite()) {
        return Trajectory {
            samples: vec![u0],
            events: Vec::new(),
            outcome: Outcome::Failed("non-finite initial state".into()),
            steps: 0,
            rhs_evals: 0,
        };
    }
    let coord = opts.events.coordinate - 1;
    let span = (t_max - u0.t).max(f64::MIN_POSITIVE);
    let mut t = u0.t;
    let mut u = u0.u;
    let mut f = log_rhs(system, &u);
    let mut rhs_evals = 1usize;
    let mut steps = 0usize;
    let mut h = opts.initial_step.min(opts.max_step).min(span);

    let mut samples = vec![u0];
    let mut events: Vec<Event> = Vec::new();
    let mut minima_count = 0usize;
    // Armed once the monitored coordinate has dipped below the ceiling; a
    // rise through the departure level while unarmed means the trajectory
    // no longer approaches the cycle.
    let mut dip_armed = u[coord] < opts.events.ceiling;

    let outcome = 'run: loop {
        if t >= t_max - 1e-14 * span {
            break Outcome::ReachedTMax;
        }
        if steps >= opts.max_steps {
            break Outcome::Failed(format!(
                "step budget of {} exhausted at t = {t}",
                opts.max_steps
            ));
        }
        if t + h > t_max {
            h = t_max - t;
        }
        if h < 1e-14 * span {
            break Outcome::Failed(format!("step size underflow ({h:.3e}) at t = {t}"));
        }

        // Stage evaluations; k[0] is the FSAL derivative from the last step.
        let mut k = [[0.0; 4]; 7];
        k[0] = f;
        for stage in 1..7 {
            let arg = axpy(&u, h, &k[..stage], &A[stage][..stage]);
            k[stage] = log_rhs(system, &arg);
            rhs_evals += 1;
        }
        let u_new = axpy(&u, h, &k, &A[6]); // A[6] holds the 5th-order weights
        let f_new = k[6]; // FSAL: k7 = f(t + h, u_new)

        let mut err_norm: f64 = 0.0;
        for i in 0..4 {
            let mut e = 0.0;
            for (stage, w) in E.iter().enumerate() {
                e += w * k[stage][i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * u[i].abs().max(u_new[i].abs());
            err_norm = err_norm.max((e / scale).abs());
        }
        // A non-finite estimate (overflowing exp near a finite-time blow-up)
        // rejects the step and shrinks until underflow reports the failure.
        if !err_norm.is_finite() {
            err_norm = f64::INFINITY;
        }

        if err_norm <= 1.0 {
            let t_new = t + h;
            steps += 1;
            let interp = StepInterp {
                t0: t,
                h,
                u0: &u,
                f0: &f,
                u1: &u_new,
                f1: &f_new,
            };

            if let Some(section) = opts.events.section {
                let c = section.coordinate - 1;
                if u[c] < section.level && u_new[c] >= section.level {
                    let t_cross = bisect_time(t, t_new, |tau| interp.at(tau)[c] - section.level);
                    let u_cross = interp.at(t_cross);
                    events.push(Event {
                        kind: EventKind::SectionCrossing,
                        t: t_cross,
                        u: u_cross,
                    });
                    samples.push(LogState {
                        t: t_cross,
                        u: u_cross,
                    });
                    break 'run Outcome::SectionReached;
                }
            }

            let mut hit_minima_cap = false;
            if f[coord] < 0.0 && f_new[coord] > 0.0 {
                let t_min = bisect_time(t, t_new, |tau| log_rhs(system, &interp.at(tau))[coord]);
                let u_min = interp.at(t_min);
                if u_min[coord] < opts.events.ceiling {
                    dip_armed = true;
                    events.push(Event {
                        kind: EventKind::Minimum,
                        t: t_min,
                        u: u_min,
                    });
                    minima_count += 1;
                    if let Some(cap) = opts.events.max_minima {
                        if minima_count >= cap {
                            hit_minima_cap = true;
                        }
                    }
                }
            }

            if u[coord] < opts.events.ceiling {
                dip_armed = true;
            }
            if u[coord] < opts.events.departure && u_new[coord] >= opts.events.departure {
                if dip_armed {
                    dip_armed = false;
                } else {
                    let t_dep = bisect_time(t, t_new, |tau| {
                        interp.at(tau)[coord] - opts.events.departure
                    });
                    let u_dep = interp.at(t_dep);
                    events.push(Event {
                        kind: EventKind::Departure,
                        t: t_dep,
                        u: u_dep,
                    });
                    samples.push(LogState { t: t_dep, u: u_dep });
                    break 'run Outcome::Departed;
                }
            }

            t = t_new;
            u = u_new;
            f = f_new;
            samples.push(LogState { t, u });
            if hit_minima_cap {
                break Outcome::MaxMinimaReached;
            }
        }

        let scale = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0);
        h = (h * scale).min(opts.max_step);
    };

    Trajectory {
        samples,
        events,
        outcome,
        steps,
        rhs_evals,
    }
}

/// Passage of the linearised local flow from the incoming section, where the
/// expanding coordinate has value `z_exp_in < h`, to the outgoing section
/// where it reaches `h`. Returns the passage time
/// `T = -(1/e_out) ln(z_exp_in / h)` and the decayed coordinates
/// `z_j (z_exp_in / h)^(k_j / e_out)`, computed in log space.
pub fn linear_local_map(
    e_out: f64,
    decay_rates: &[f64],
    z_values: &[f64],
    z_exp_in: f64,
    h: f64,
) -> Result<(f64, Vec<f64>)> {
    if e_out <= 0.0 || !e_out.is_finite() {
        return Err(Error::InvalidInput(format!(
            "expanding rate must be positive, got {e_out}"
        )));
    }
    if decay_rates.len() != z_values.len() {
        return Err(Error::InvalidInput(format!(
            "{} decay rates for {} coordinates",
            decay_rates.len(),
            z_values.len()
        )));
    }
    if decay_rates.iter().any(|k| *k <= 0.0 || !k.is_finite()) {
        return Err(Error::InvalidInput("decay rates must be positive".into()));
    }
    if h <= 0.0 || !h.is_finite() || z_exp_in <= 0.0 || !z_exp_in.is_finite() {
        return Err(Error::InvalidInput(
            "section offset and expanding coordinate must be positive".into(),
        ));
    }
    if z_exp_in > h {
        return Err(Error::InvalidInput(format!(
            "expanding coordinate {z_exp_in} already past the section at {h}"
        )));
    }
    if z_values.iter().any(|z| *z <= 0.0 || !z.is_finite()) {
        return Err(Error::InvalidInput(
            "decaying coordinates must be positive".into(),
        ));
    }

    let log_ratio = (z_exp_in / h).ln(); // <= 0
    let time = -log_ratio / e_out;
    let z_out = decay_rates
        .iter()
        .zip(z_values)
        .map(|(k, z)| (z.ln() + (k / e_out) * log_ratio).exp())
        .collect();
    Ok((time, z_out))
}

/// Locate minima of one log-coordinate from trajectory samples: sign changes
/// of the derivative from - to +, refined by bisection on the cubic Hermite
/// interpolant, keeping only minima below `ceiling`. The `derivative` gives
/// `du_coordinate/dt` at a sample.
pub fn detect_minima<F>(
    trajectory: &Trajectory,
    coordinate: usize,
    ceiling: f64,
    derivative: F,
) -> Vec<(f64, f64)>
where
    F: Fn(f64, &Vec4) -> f64,
{
    let c = coordinate - 1;
    let mut out = Vec::new();
    for pair in trajectory.samples.windows(2) {
        let (s0, s1) = (&pair[0], &pair[1]);
        let g0 = derivative(s0.t, &s0.u);
        let g1 = derivative(s1.t, &s1.u);
        if !(g0 < 0.0 && g1 > 0.0) {
            continue;
        }
        let h = s1.t - s0.t;
        if h <= 0.0 {
            continue;
        }
        let (v0, v1) = (s0.u[c], s1.u[c]);
        // Hermite cubic of the monitored coordinate alone; its time
        // derivative interpolates g0 -> g1 and brackets the minimum.
        let dv_dt = |t: f64| -> f64 {
            let s = ((t - s0.t) / h).clamp(0.0, 1.0);
            let d00 = 6.0 * s * s - 6.0 * s;
            let d10 = 3.0 * s * s - 4.0 * s + 1.0;
            let d01 = -6.0 * s * s + 6.0 * s;
            let d11 = 3.0 * s * s - 2.0 * s;
            (d00 * v0 + d01 * v1) / h + d10 * g0 + d11 * g1
        };
        let value_at = |t: f64| -> f64 {
            let s = ((t - s0.t) / h).clamp(0.0, 1.0);
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * v0
                + (s3 - 2.0 * s2 + s) * h * g0
                + (-2.0 * s3 + 3.0 * s2) * v1
                + (s3 - s2) * h * g1
        };
        let t_min = bisect_time(s0.t, s1.t, dv_dt);
        let value = value_at(t_min);
        if value < ceiling {
            out.push((t_min, value));
        }
    }
    out
}
