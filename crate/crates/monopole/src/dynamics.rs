//! Time integration of the coupled system
//!
//!   dr/dt = v,    dv/dt = force(ξ, r, v),    dξ/dt = [ξ, 𝔞(v)],
//!
//! on the flattened state vector (r, v, packed upper triangle of ξ) of
//! dimension 2n + k(2k−1). Two steppers are provided: classical fixed-step
//! RK4 and an embedded Dormand-Prince 5(4) pair with proportional step
//! control (safety 0.9, growth clamped to [0.2, 5.0]).
//!
//! No structure-preserving tricks are used: conservation of energy, L, V
//! and the orbit invariants is the quantity under test, so the integrator
//! must not enforce it. The one structural exactness is free: ξ is stored
//! by its strictly upper triangle, so antisymmetry cannot drift. An
//! optional post-step orbit re-projection exists behind a flag, default
//! off, for experiments with long horizons.
//!
//! Guards: every derivative evaluation and accepted state must keep the
//! string clearance (r + xₙ)/r above `Guards::string_clearance_min` and the
//! radius above `Guards::r_min` relative to the initial radius. A trip
//! aborts with a typed error carrying the last accepted state.

use crate::gauge::{force, string_clearance, transport_rate, GaugeError, EPS_STRING};
use crate::liealg::{lie_inner, project_to_orbit, SkewMatrix, MAX_K};
use crate::polyvec::Vector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Step sizes below this abort the adaptive integrator.
pub const DT_UNDERFLOW: f64 = 1e-14;
/// Proportional controller constants.
const SAFETY: f64 = 0.9;
const FACTOR_MIN: f64 = 0.2;
const FACTOR_MAX: f64 = 5.0;

/// Full particle state: position, velocity, and internal charge.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub r: Vector,
    pub v: Vector,
    pub xi: SkewMatrix,
}

impl State {
    pub fn new(t: f64, r: Vector, v: Vector, xi: SkewMatrix) -> Self {
        State { t, r, v, xi }
    }

    /// Kinetic energy of a unit-mass particle, |v|².
    pub fn energy(&self) -> f64 {
        self.v.norm_sq()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedRk4,
    AdaptiveEmbedded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step size for `fixed_rk4`; initial trial step for the adaptive pair.
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub max_steps: usize,
    /// One state (with monitors) is retained every this many accepted steps.
    pub sample_every: usize,
    /// Re-project ξ onto its orbit after every accepted step.
    pub reproject_orbit: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveEmbedded,
            dt: 1e-3,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_end: 20.0,
            max_steps: 5_000_000,
            sample_every: 10,
            reproject_orbit: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Guards {
    /// Minimum admissible string clearance (r + xₙ)/r; at least the chart
    /// floor the gauge module enforces on its own.
    pub string_clearance_min: f64,
    /// Minimum admissible radius, relative to |r(0)|.
    pub r_min: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards { string_clearance_min: EPS_STRING, r_min: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached t_end.
    Completed,
    /// Stopped early at the step budget; the trajectory is truncated, not wrong.
    MaxSteps,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub min_dt: f64,
}

/// Per-sample monitor values; filled by the geometry layer once the
/// conserved references (L₀, the cone) are known.
#[derive(Debug, Clone, Serialize)]
pub struct MonitorRow {
    pub energy: f64,
    pub drift_l: f64,
    pub cone_residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub monitors: Vec<MonitorRow>,
    pub stats: IntegratorStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        &self.samples[0]
    }

    pub fn last(&self) -> &State {
        self.samples.last().expect("trajectory has at least the initial state")
    }
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("guard tripped at t = {t:.9}: {source}")]
    Guard {
        t: f64,
        #[source]
        source: GaugeError,
        last_good: Box<State>,
    },
    #[error("radius floor tripped at t = {t:.9}: |r| = {r:.3e} < {floor:.3e}")]
    RadiusFloor { t: f64, r: f64, floor: f64, last_good: Box<State> },
    #[error("step size underflow at t = {t:.9} (dt = {dt:.3e})")]
    StepUnderflow { t: f64, dt: f64, last_good: Box<State> },
    #[error("invalid integrator setup: {0}")]
    BadConfig(String),
}

impl IntegrateError {
    /// The last accepted state before the abort, when one exists.
    pub fn last_good(&self) -> Option<&State> {
        match self {
            IntegrateError::Guard { last_good, .. }
            | IntegrateError::RadiusFloor { last_good, .. }
            | IntegrateError::StepUnderflow { last_good, .. } => Some(last_good),
            IntegrateError::BadConfig(_) => None,
        }
    }
}

/// The tangent of the flow at a state, in state shape (t is carried over).
pub fn derivative(s: &State) -> Result<State, GaugeError> {
    let a = force(&s.xi, &s.r, &s.v)?;
    let rate = transport_rate(&s.xi, &s.r, &s.v)?;
    Ok(State { t: s.t, r: s.v.clone(), v: a, xi: rate })
}

struct System {
    n: usize,
    guards: Guards,
    r_floor: f64,
}

enum Trip {
    Gauge(GaugeError),
    Radius { r: f64, floor: f64 },
}

impl System {
    fn split<'y>(&self, y: &'y [f64]) -> (&'y [f64], &'y [f64], &'y [f64]) {
        let n = self.n;
        (&y[..n], &y[n..2 * n], &y[2 * n..])
    }

    fn state(&self, t: f64, y: &[f64]) -> State {
        let (r, v, xi) = self.split(y);
        State {
            t,
            r: Vector::new(r.to_vec()),
            v: Vector::new(v.to_vec()),
            xi: SkewMatrix::from_packed(self.n - 1, xi.to_vec()),
        }
    }

    fn check_guards(&self, r: &Vector) -> Result<(), Trip> {
        let radius = r.norm();
        if radius < self.r_floor {
            return Err(Trip::Radius { r: radius, floor: self.r_floor });
        }
        let clearance = string_clearance(r).map_err(Trip::Gauge)?;
        if clearance <= self.guards.string_clearance_min {
            return Err(Trip::Gauge(GaugeError::StringProximity { clearance }));
        }
        Ok(())
    }

    fn deriv(&self, y: &[f64], out: &mut [f64]) -> Result<(), Trip> {
        let n = self.n;
        let (r, v, xi) = self.split(y);
        let r = Vector::new(r.to_vec());
        let v = Vector::new(v.to_vec());
        let xi = SkewMatrix::from_packed(n - 1, xi.to_vec());
        self.check_guards(&r)?;
        let a = force(&xi, &r, &v).map_err(Trip::Gauge)?;
        let rate = transport_rate(&xi, &r, &v).map_err(Trip::Gauge)?;
        out[..n].copy_from_slice(v.as_slice());
        out[n..2 * n].copy_from_slice(a.as_slice());
        out[2 * n..].copy_from_slice(rate.packed());
        Ok(())
    }
}

fn validate(init: &State, cfg: &IntegratorConfig, guards: &Guards) -> Result<usize, IntegrateError> {
    let n = init.r.dim();
    if n < 3 || n % 2 == 0 {
        return Err(IntegrateError::BadConfig(format!(
            "position dimension must be odd and at least 3, got {n}"
        )));
    }
    let k = (n - 1) / 2;
    if k > MAX_K {
        return Err(IntegrateError::BadConfig(format!("k = {k} exceeds the supported maximum {MAX_K}")));
    }
    if init.v.dim() != n {
        return Err(IntegrateError::BadConfig(format!(
            "velocity dimension {} does not match position dimension {n}",
            init.v.dim()
        )));
    }
    if init.xi.size() != n - 1 {
        return Err(IntegrateError::BadConfig(format!(
            "charge size {} does not match 2k = {}",
            init.xi.size(),
            n - 1
        )));
    }
    if !(cfg.dt > 0.0) || !(cfg.t_end > init.t) {
        return Err(IntegrateError::BadConfig(format!(
            "need dt > 0 and t_end > t0, got dt = {}, t_end = {}, t0 = {}",
            cfg.dt, cfg.t_end, init.t
        )));
    }
    if !(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) {
        return Err(IntegrateError::BadConfig("tolerances must be positive".into()));
    }
    if cfg.sample_every == 0 || cfg.max_steps == 0 {
        return Err(IntegrateError::BadConfig(
            "sample_every and max_steps must be at least 1".into(),
        ));
    }
    if guards.string_clearance_min < EPS_STRING {
        return Err(IntegrateError::BadConfig(format!(
            "string_clearance_min must not undercut the chart floor {EPS_STRING:.0e}"
        )));
    }
    Ok(n)
}

/// Integrates from `init` to `cfg.t_end`, retaining every
/// `cfg.sample_every`-th accepted state plus the initial and final ones.
/// Monitor rows are left empty; the geometry layer attaches them.
pub fn integrate(
    init: &State,
    cfg: &IntegratorConfig,
    guards: &Guards,
) -> Result<Trajectory, IntegrateError> {
    let n = validate(init, cfg, guards)?;
    let sys = System { n, guards: guards.clone(), r_floor: guards.r_min * init.r.norm() };
    sys.check_guards(&init.r).map_err(|trip| trip_error(trip, init.t, init.clone()))?;

    // λ enters re-projection only through |λ| = |ξ(0)|.
    let lambda_abs = lie_inner(&init.xi, &init.xi)
        .expect("sizes agree")
        .max(0.0)
        .sqrt();

    let dim = 2 * n + (n - 1) * (n - 2) / 2;
    let mut y = vec![0.0; dim];
    y[..n].copy_from_slice(init.r.as_slice());
    y[n..2 * n].copy_from_slice(init.v.as_slice());
    y[2 * n..].copy_from_slice(init.xi.packed());

    match cfg.method {
        Method::FixedRk4 => fixed_rk4(&sys, init.t, y, cfg, lambda_abs),
        Method::AdaptiveEmbedded => adaptive_embedded(&sys, init.t, y, cfg, lambda_abs),
    }
}

fn trip_error(trip: Trip, t: f64, last_good: State) -> IntegrateError {
    match trip {
        Trip::Gauge(source) => IntegrateError::Guard { t, source, last_good: Box::new(last_good) },
        Trip::Radius { r, floor } => {
            IntegrateError::RadiusFloor { t, r, floor, last_good: Box::new(last_good) }
        }
    }
}

fn reproject(sys: &System, y: &mut [f64], lambda_abs: f64) {
    let n = sys.n;
    let xi = SkewMatrix::from_packed(n - 1, y[2 * n..].to_vec());
    let fixed = project_to_orbit(&xi, lambda_abs);
    y[2 * n..].copy_from_slice(fixed.packed());
}

struct Recorder {
    samples: Vec<State>,
    sample_every: usize,
    accepted: usize,
}

impl Recorder {
    fn new(sys: &System, t0: f64, y0: &[f64], sample_every: usize) -> Self {
        Recorder { samples: vec![sys.state(t0, y0)], sample_every, accepted: 0 }
    }

    fn record(&mut self, sys: &System, t: f64, y: &[f64], finished: bool) {
        self.accepted += 1;
        if self.accepted % self.sample_every == 0 || finished {
            let s = sys.state(t, y);
            // A final step can land on an already-sampled time; keep one copy.
            if finished && self.samples.last().map(|p| p.t) == Some(s.t) {
                return;
            }
            self.samples.push(s);
        }
    }
}

fn fixed_rk4(
    sys: &System,
    t0: f64,
    mut y: Vec<f64>,
    cfg: &IntegratorConfig,
    lambda_abs: f64,
) -> Result<Trajectory, IntegrateError> {
    let dim = y.len();
    let mut rec = Recorder::new(sys, t0, &y, cfg.sample_every);
    let mut stats = IntegratorStats { steps: 0, rejected: 0, min_dt: f64::INFINITY };
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    let mut step = 0usize;
    loop {
        // t tracked by index to avoid accumulation drift across resolutions.
        let t = t0 + step as f64 * cfg.dt;
        if t >= cfg.t_end - 1e-14 * cfg.t_end.abs().max(1.0) {
            return Ok(Trajectory {
                samples: rec.samples,
                monitors: Vec::new(),
                stats,
                termination: Termination::Completed,
            });
        }
        if stats.steps >= cfg.max_steps {
            return Ok(Trajectory {
                samples: rec.samples,
                monitors: Vec::new(),
                stats,
                termination: Termination::MaxSteps,
            });
        }
        let dt = cfg.dt.min(cfg.t_end - t);
        let last_good = || sys.state(t, &y);

        sys.deriv(&y, &mut k1).map_err(|e| trip_error(e, t, last_good()))?;
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        sys.deriv(&tmp, &mut k2).map_err(|e| trip_error(e, t, last_good()))?;
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        sys.deriv(&tmp, &mut k3).map_err(|e| trip_error(e, t, last_good()))?;
        for i in 0..dim {
            tmp[i] = y[i] + dt * k3[i];
        }
        sys.deriv(&tmp, &mut k4).map_err(|e| trip_error(e, t, last_good()))?;
        // The stage buffer is free now; reuse it for the candidate state.
        for i in 0..dim {
            tmp[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if cfg.reproject_orbit {
            reproject(sys, &mut tmp, lambda_abs);
        }

        let t_next = if dt < cfg.dt { cfg.t_end } else { t0 + (step + 1) as f64 * cfg.dt };
        let (r_next, ..) = sys.split(&tmp);
        sys.check_guards(&Vector::new(r_next.to_vec()))
            .map_err(|e| trip_error(e, t_next, sys.state(t, &y)))?;
        y.copy_from_slice(&tmp);

        stats.steps += 1;
        stats.min_dt = stats.min_dt.min(dt);
        step += 1;
        let finished = t_next >= cfg.t_end - 1e-14 * cfg.t_end.abs().max(1.0);
        rec.record(sys, t_next, &y, finished);
    }
}

// Dormand-Prince 5(4) coefficients. The vector field is autonomous, so the
// stage times (0, 1/5, 3/10, 4/5, 8/9, 1, 1) never enter explicitly.
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// B5 minus the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn adaptive_embedded(
    sys: &System,
    t0: f64,
    mut y: Vec<f64>,
    cfg: &IntegratorConfig,
    lambda_abs: f64,
) -> Result<Trajectory, IntegrateError> {
    let dim = y.len();
    let mut rec = Recorder::new(sys, t0, &y, cfg.sample_every);
    let mut stats = IntegratorStats { steps: 0, rejected: 0, min_dt: f64::INFINITY };
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    let mut t = t0;
    let mut dt = cfg.dt.min(cfg.t_end - t0);
    loop {
        if t >= cfg.t_end - 1e-14 * cfg.t_end.abs().max(1.0) {
            return Ok(Trajectory {
                samples: rec.samples,
                monitors: Vec::new(),
                stats,
                termination: Termination::Completed,
            });
        }
        if stats.steps >= cfg.max_steps {
            return Ok(Trajectory {
                samples: rec.samples,
                monitors: Vec::new(),
                stats,
                termination: Termination::MaxSteps,
            });
        }
        if dt < DT_UNDERFLOW {
            return Err(IntegrateError::StepUnderflow {
                t,
                dt,
                last_good: Box::new(sys.state(t, &y)),
            });
        }
        dt = dt.min(cfg.t_end - t);
        let last_good = || sys.state(t, &y);

        for s in 0..7 {
            if s == 0 {
                stage.copy_from_slice(&y);
            } else {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            acc += a * kj[i];
                        }
                    }
                    stage[i] = y[i] + dt * acc;
                }
            }
            sys.deriv(&stage, &mut k[s]).map_err(|e| trip_error(e, t, last_good()))?;
        }

        for i in 0..dim {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    acc += B5[j] * kj[i];
                }
            }
            y_new[i] = y[i] + dt * acc;
        }

        // Weighted RMS of the embedded error estimate.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            let w = dt * e / scale;
            err_sq += w * w;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            let t_next = if cfg.t_end - t <= dt * (1.0 + 1e-12) { cfg.t_end } else { t + dt };
            if cfg.reproject_orbit {
                reproject(sys, &mut y_new, lambda_abs);
            }
            let (r_next, ..) = sys.split(&y_new);
            sys.check_guards(&Vector::new(r_next.to_vec()))
                .map_err(|e| trip_error(e, t_next, sys.state(t, &y)))?;
            y.copy_from_slice(&y_new);
            stats.steps += 1;
            stats.min_dt = stats.min_dt.min(dt);
            let finished = t_next >= cfg.t_end;
            rec.record(sys, t_next, &y, finished);
            t = t_next;
            let factor = if err == 0.0 {
                FACTOR_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FACTOR_MIN, FACTOR_MAX)
            };
            dt *= factor;
        } else {
            stats.rejected += 1;
            let factor = (SAFETY * err.powf(-0.2)).clamp(FACTOR_MIN, 1.0);
            dt *= factor;
        }
    }
}
