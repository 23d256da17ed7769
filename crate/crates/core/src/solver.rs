//! Fixed-step numerical integration of a semantics model.
//!
//! The solver starts from `s(0) = w`, advances with explicit Euler or
//! classical RK4, and stops when the max-norm of the derivative drops to the
//! convergence threshold, when simulated time reaches the cap, or when the
//! wall clock cap fires. Along the way it tracks per-argument strength
//! bounds and derivative sign changes (the oscillation monitor) and can
//! record trajectory samples.
//!
//! States are validated, never clamped: a component leaving `[0,1]` by more
//! than [`STATE_RANGE_TOLERANCE`] aborts the run with an error, since the
//! vector field of every built-in model points inward at the boundary.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bag::Bag;
use crate::format::format_significant;
use crate::semantics::{Model, StateVector};

/// How far a state component may leave `[0,1]` before the run is aborted.
pub const STATE_RANGE_TOLERANCE: f64 = 1e-9;

/// Step method for the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Explicit Euler, first order.
    Euler,
    /// Classical fourth-order Runge-Kutta.
    Rk4,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failed lookup of a method name.
#[derive(Debug, Error)]
#[error("unknown method `{0}` (expected euler or rk4)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            other => Err(UnknownMethod(other.to_owned())),
        }
    }
}

/// Integration parameters.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Step size delta.
    pub step: f64,
    /// Convergence threshold on the max-norm of the derivative.
    pub epsilon: f64,
    /// Cap on simulated time.
    pub max_time: f64,
    /// Cap on wall-clock time; `None` disables the cap.
    pub wall_clock_limit: Option<Duration>,
    pub method: Method,
    /// Trajectory sampling stride, in steps.
    pub record_every: usize,
    /// Whether to keep trajectory samples in the result.
    pub record_trajectory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step: 0.01,
            epsilon: 1e-4,
            max_time: 1000.0,
            wall_clock_limit: Some(Duration::from_secs(30)),
            method: Method::Rk4,
            record_every: 10,
            record_trajectory: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.step <= 0.0 || !self.step.is_finite() {
            return Err(SolverError::InvalidConfig(format!(
                "step must be positive and finite, got {}",
                self.step
            )));
        }
        if self.epsilon <= 0.0 || self.epsilon.is_nan() {
            return Err(SolverError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_time < self.step {
            return Err(SolverError::InvalidConfig(format!(
                "max_time {} must be at least one step {}",
                self.max_time, self.step
            )));
        }
        if self.record_every == 0 {
            return Err(SolverError::InvalidConfig(
                "record_every must be positive".to_owned(),
            ));
        }
        Ok(())
    }
}

/// Why the integration loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The derivative max-norm dropped to epsilon.
    Converged,
    /// Simulated time reached the cap first.
    TimeCapReached,
    /// The wall clock cap fired first.
    WallClockCapReached,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::TimeCapReached => "time_cap",
            Status::WallClockCapReached => "wall_clock_cap",
        })
    }
}

/// Per-argument convergence diagnostics.
#[derive(Debug, Clone)]
pub struct ArgumentReport {
    /// Whether `|ds_j|` was within epsilon at exit.
    pub converged: bool,
    /// Smallest strength observed over the run.
    pub lower_bound: f64,
    /// Largest strength observed over the run.
    pub upper_bound: f64,
    /// Derivative sign flips observed, counted outside an epsilon dead-band
    /// so numerical noise near an equilibrium does not register.
    pub sign_changes: u32,
}

/// Diagnostics for all arguments; oscillating arguments show repeated
/// derivative sign changes and meaningful lower/upper bounds even when the
/// run hits a cap.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub per_argument: Vec<ArgumentReport>,
}

/// Outcome of an integration run.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub status: Status,
    pub final_state: StateVector,
    pub steps_taken: u64,
    /// Simulated time at exit; the convergence point when status is
    /// `Converged`.
    pub final_time: f64,
    /// Samples taken every `record_every` steps plus the final state, when
    /// recording was requested.
    pub trajectory: Option<Vec<StateVector>>,
    pub report: ConvergenceReport,
}

impl SolverResult {
    /// Writes the convergence report as CSV:
    /// `name,converged,final,lower,upper,sign_changes`.
    pub fn write_report_csv<W: Write>(&self, bag: &Bag, mut out: W) -> io::Result<()> {
        writeln!(out, "name,converged,final,lower,upper,sign_changes")?;
        for (j, rep) in self.report.per_argument.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                bag.name(j),
                rep.converged,
                format_significant(self.final_state.values[j], 9),
                format_significant(rep.lower_bound, 9),
                format_significant(rep.upper_bound, 9),
                rep.sign_changes
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("state has {found} components but the graph has {expected} arguments")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "strength of `{name}` left [0,1] (value {value} at t={time}); the step size is too large"
    )]
    StateOutOfRange { name: String, value: f64, time: f64 },
    #[error("non-finite strength at `{name}` (t={time})")]
    NonFiniteState { name: String, time: f64 },
}

/// Writes trajectory samples as CSV with header `t,<name1>,<name2>,...` and
/// nine significant digits per value.
pub fn write_trajectory_csv<W: Write>(
    bag: &Bag,
    samples: &[StateVector],
    mut out: W,
) -> io::Result<()> {
    write!(out, "t")?;
    for arg in bag.arguments() {
        write!(out, ",{}", arg.name)?;
    }
    writeln!(out)?;
    for sample in samples {
        write!(out, "{}", format_significant(sample.time, 9))?;
        for v in &sample.values {
            write!(out, ",{}", format_significant(*v, 9))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn check_dims(bag: &Bag, state: &StateVector) -> Result<(), SolverError> {
    if state.values.len() != bag.len() {
        Err(SolverError::DimensionMismatch {
            expected: bag.len(),
            found: state.values.len(),
        })
    } else {
        Ok(())
    }
}

fn check_state(bag: &Bag, values: &[f64], time: f64) -> Result<(), SolverError> {
    for (j, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(SolverError::NonFiniteState {
                name: bag.name(j).to_owned(),
                time,
            });
        }
        if !(-STATE_RANGE_TOLERANCE..=1.0 + STATE_RANGE_TOLERANCE).contains(&v) {
            return Err(SolverError::StateOutOfRange {
                name: bag.name(j).to_owned(),
                value: v,
                time,
            });
        }
    }
    Ok(())
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Scratch buffers for the RK4 stages, reused across steps.
struct Rk4Scratch {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    probe: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        Rk4Scratch {
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            probe: vec![0.0; n],
        }
    }
}

/// Advances `values` by one step of `method`, reusing the already computed
/// derivative `k1` at the current state.
fn advance(
    method: Method,
    model: Model,
    bag: &Bag,
    values: &mut [f64],
    k1: &[f64],
    step: f64,
    scratch: &mut Rk4Scratch,
) {
    match method {
        Method::Euler => {
            for (v, d) in values.iter_mut().zip(k1) {
                *v += step * d;
            }
        }
        Method::Rk4 => {
            let n = values.len();
            let half = step / 2.0;
            let fill_probe = |probe: &mut [f64], values: &[f64], k: &[f64], scale: f64| {
                for ((p, v), d) in probe.iter_mut().zip(values).zip(k) {
                    *p = v + scale * d;
                }
            };
            fill_probe(&mut scratch.probe, values, k1, half);
            model.derivative_into(bag, &scratch.probe, &mut scratch.k2);
            fill_probe(&mut scratch.probe, values, &scratch.k2, half);
            model.derivative_into(bag, &scratch.probe, &mut scratch.k3);
            fill_probe(&mut scratch.probe, values, &scratch.k3, step);
            model.derivative_into(bag, &scratch.probe, &mut scratch.k4);
            for j in 0..n {
                values[j] += step / 6.0
                    * (k1[j] + 2.0 * scratch.k2[j] + 2.0 * scratch.k3[j] + scratch.k4[j]);
            }
        }
    }
}

fn single_step(
    method: Method,
    model: Model,
    bag: &Bag,
    state: &StateVector,
    step: f64,
) -> Result<StateVector, SolverError> {
    check_dims(bag, state)?;
    check_step_size(step)?;
    let mut values = state.values.clone();
    let mut k1 = vec![0.0; bag.len()];
    model.derivative_into(bag, &values, &mut k1);
    let mut scratch = Rk4Scratch::new(bag.len());
    advance(method, model, bag, &mut values, &k1, step, &mut scratch);
    let time = state.time + step;
    check_state(bag, &values, time)?;
    Ok(StateVector::new(values, time))
}

fn check_step_size(step: f64) -> Result<(), SolverError> {
    if step <= 0.0 || !step.is_finite() {
        Err(SolverError::InvalidConfig(format!(
            "step must be positive and finite, got {step}"
        )))
    } else {
        Ok(())
    }
}

/// One explicit Euler step: `s' = s + step * F(s)`.
///
/// With step 1 on a continuized model this reproduces one round of the
/// discrete update applied to all arguments simultaneously.
pub fn euler_step(
    model: Model,
    bag: &Bag,
    state: &StateVector,
    step: f64,
) -> Result<StateVector, SolverError> {
    single_step(Method::Euler, model, bag, state, step)
}

/// One classical RK4 step over the autonomous field `F`:
/// `k1 = F(s)`, `k2 = F(s + step/2 k1)`, `k3 = F(s + step/2 k2)`,
/// `k4 = F(s + step k3)`, `s' = s + step/6 (k1 + 2 k2 + 2 k3 + k4)`.
pub fn rk4_step(
    model: Model,
    bag: &Bag,
    state: &StateVector,
    step: f64,
) -> Result<StateVector, SolverError> {
    single_step(Method::Rk4, model, bag, state, step)
}

/// Max-norm residual of the discrete fixed-point condition,
/// `max_j |update_j(s) - s_j|`. A converged run's final state has residual
/// at most epsilon, since the derivative equals update minus state.
pub fn fixed_point_residual(model: Model, bag: &Bag, state: &StateVector) -> f64 {
    let mut out = vec![0.0; bag.len()];
    model.derivative_into(bag, &state.values, &mut out);
    max_abs(&out)
}

/// Tracks derivative sign flips per argument outside a dead-band: a flip is
/// counted only when |ds| exceeds epsilon on both sides of the change.
struct SignTracker {
    epsilon: f64,
    last_sign: Vec<i8>,
    changes: Vec<u32>,
}

impl SignTracker {
    fn new(n: usize, epsilon: f64) -> Self {
        SignTracker {
            epsilon,
            last_sign: vec![0; n],
            changes: vec![0; n],
        }
    }

    fn observe(&mut self, derivative: &[f64]) {
        for (j, &d) in derivative.iter().enumerate() {
            let sign = if d > self.epsilon {
                1
            } else if d < -self.epsilon {
                -1
            } else {
                0
            };
            if sign != 0 {
                if self.last_sign[j] != 0 && sign != self.last_sign[j] {
                    self.changes[j] += 1;
                }
                self.last_sign[j] = sign;
            }
        }
    }
}

/// Integrates the model from `s(0) = w` until convergence or a cap.
pub fn integrate(
    model: Model,
    bag: &Bag,
    config: &SolverConfig,
) -> Result<SolverResult, SolverError> {
    config.validate()?;
    let n = bag.len();
    let start = Instant::now();

    let mut values = bag.weights();
    let mut derivative = vec![0.0; n];
    model.derivative_into(bag, &values, &mut derivative);

    let mut lower = values.clone();
    let mut upper = values.clone();
    let mut signs = SignTracker::new(n, config.epsilon);
    signs.observe(&derivative);

    let mut trajectory = if config.record_trajectory {
        Some(vec![StateVector::new(values.clone(), 0.0)])
    } else {
        None
    };

    let mut steps: u64 = 0;
    let mut time = 0.0;
    let mut scratch = Rk4Scratch::new(n);
    // accept a final step landing within rounding noise of the time cap
    let time_slack = config.step * 1e-9;

    let status = loop {
        if max_abs(&derivative) <= config.epsilon {
            break Status::Converged;
        }
        if time + config.step > config.max_time + time_slack {
            break Status::TimeCapReached;
        }
        if let Some(limit) = config.wall_clock_limit {
            if start.elapsed() >= limit {
                break Status::WallClockCapReached;
            }
        }

        advance(
            config.method,
            model,
            bag,
            &mut values,
            &derivative,
            config.step,
            &mut scratch,
        );
        steps += 1;
        time = steps as f64 * config.step;
        check_state(bag, &values, time)?;

        for j in 0..n {
            lower[j] = lower[j].min(values[j]);
            upper[j] = upper[j].max(values[j]);
        }

        model.derivative_into(bag, &values, &mut derivative);
        signs.observe(&derivative);

        if let Some(samples) = trajectory.as_mut() {
            if steps.is_multiple_of(config.record_every as u64) {
                samples.push(StateVector::new(values.clone(), time));
            }
        }
    };

    if let Some(samples) = trajectory.as_mut() {
        // steps divisible by the stride (including 0) were pushed already
        if !steps.is_multiple_of(config.record_every as u64) {
            samples.push(StateVector::new(values.clone(), time));
        }
    }

    let per_argument = (0..n)
        .map(|j| ArgumentReport {
            converged: derivative[j].abs() <= config.epsilon,
            lower_bound: lower[j],
            upper_bound: upper[j],
            sign_changes: signs.changes[j],
        })
        .collect();

    Ok(SolverResult {
        status,
        final_state: StateVector::new(values, time),
        steps_taken: steps,
        final_time: time,
        trajectory,
        report: ConvergenceReport { per_argument },
    })
}

/// Outcome of the step-size refinement check.
#[derive(Debug, Clone, Copy)]
pub struct RefinementVerdict {
    /// Max-norm difference between the final states at step and step/2.
    pub difference: f64,
    /// Whether the difference is within 10 epsilon, i.e. the requested step
    /// size was already fine.
    pub stable: bool,
}

/// Runs the integration at the configured step size and again at half of
/// it, comparing the final states; a small difference confirms the step size
/// was sufficient for the requested accuracy.
pub fn integrate_with_refinement(
    model: Model,
    bag: &Bag,
    config: &SolverConfig,
) -> Result<(SolverResult, RefinementVerdict), SolverError> {
    let result = integrate(model, bag, config)?;
    let mut halved = config.clone();
    halved.step = config.step / 2.0;
    halved.record_trajectory = false;
    let fine = integrate(model, bag, &halved)?;
    let difference = result.final_state.max_norm_diff(&fine.final_state);
    let verdict = RefinementVerdict {
        difference,
        stable: difference <= 10.0 * config.epsilon,
    };
    Ok((result, verdict))
}
