//! Command pipelines and the multi-config sweep driver.
//!
//! Exit codes: 0 all checks pass, 1 config or I/O failure, 2 integration
//! guard trip, 3 threshold failure. A sweep returns the worst code of its
//! runs. The report file is written in every case that gets past config
//! parsing, including guard trips and threshold failures.

use std::fs;
use std::path::{Path, PathBuf};

use crate::cli::config::{load_config, LoadedConfig, Thresholds};
use crate::cli::report::{Check, ConeReport, ErrorReport, OracleReport, RunReport};
use crate::dynamics::{integrate, IntegrateError, Trajectory};
use crate::gauge::identity_suite;
use crate::geometry::{
    analytic_geodesic, attach_monitors, cone_of, conservation_report, ConservationReport,
    GeometryError,
};
#[cfg(feature = "parallel")]
use crate::par;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_THRESHOLD: i32 = 3;

/// Most sample times `compare` checks against the oracle.
pub const COMPARE_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    Cone,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Cone => "cone",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub configs: Vec<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub dump_xi: bool,
    /// Worker threads for sweeps; None or 1 means sequential.
    pub jobs: Option<usize>,
}

struct Outcome {
    line: String,
    code: i32,
}

/// Runs every config, writes reports, prints one summary line per run,
/// and returns the worst exit code.
pub fn run(inv: &Invocation) -> i32 {
    if let Some(dir) = &inv.out_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!("cannot create output directory {}: {e}", dir.display());
            return EXIT_CONFIG;
        }
    }
    let outcomes = run_all(inv);
    let mut worst = EXIT_OK;
    for o in &outcomes {
        println!("{}", o.line);
        worst = worst.max(o.code);
    }
    worst
}

fn run_all(inv: &Invocation) -> Vec<Outcome> {
    match inv.jobs {
        Some(jobs) if jobs > 1 && inv.configs.len() > 1 => run_parallel(inv, jobs),
        _ => inv.configs.iter().map(|p| run_one(inv, p)).collect(),
    }
}

#[cfg(feature = "parallel")]
fn run_parallel(inv: &Invocation, jobs: usize) -> Vec<Outcome> {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| par::map_collect(&inv.configs, |p| run_one(inv, p))),
        Err(e) => {
            eprintln!("cannot build a {jobs}-thread pool ({e}); running sequentially");
            inv.configs.iter().map(|p| run_one(inv, p)).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(inv: &Invocation, _jobs: usize) -> Vec<Outcome> {
    eprintln!("built without the `parallel` feature; --jobs has no effect");
    inv.configs.iter().map(|p| run_one(inv, p)).collect()
}

fn run_one(inv: &Invocation, path: &Path) -> Outcome {
    let loaded = match load_config(path) {
        Ok(l) => l,
        Err(e) => {
            return Outcome {
                line: format!("{}: {} failed: {e}", path.display(), inv.command.name()),
                code: EXIT_CONFIG,
            }
        }
    };
    let mut report = RunReport::new(inv.command.name(), &loaded.name, loaded.config.clone());
    let mut code = match inv.command {
        Command::Simulate => simulate(inv, &loaded, &mut report),
        Command::Verify => verify(&loaded, &mut report),
        Command::Cone => cone_cmd(&loaded, &mut report),
        Command::Compare => compare(&loaded, &mut report),
    };
    let report_path = resolve_path(
        inv,
        &loaded.config.output.report_path,
        format!("{}.report.json", loaded.name),
    );
    if let Err(e) = fs::write(&report_path, report.to_json()) {
        eprintln!("cannot write {}: {e}", report_path.display());
        code = code.max(EXIT_CONFIG);
    }
    let status = match code {
        EXIT_OK => "ok".to_string(),
        EXIT_GUARD => format!(
            "stopped by guard ({})",
            report.error.as_ref().map(|e| e.kind.as_str()).unwrap_or("?")
        ),
        EXIT_THRESHOLD => {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            format!("thresholds failed: {}", failed.join(", "))
        }
        _ => "failed".to_string(),
    };
    Outcome {
        line: format!("{}: {} {}", loaded.name, inv.command.name(), status),
        code,
    }
}

fn simulate(inv: &Invocation, loaded: &LoadedConfig, report: &mut RunReport) -> i32 {
    let cfg = &loaded.config;
    let init = loaded.initial_state();
    report.cone = Some(match cone_of(&init, cfg.k, cfg.lambda) {
        Ok(c) => ConeReport::defined(&c),
        Err(GeometryError::Undefined(u)) => ConeReport::Undefined { undefined: u.to_string() },
        Err(e) => return internal_error(report, e),
    });
    let mut traj = match integrate(&init, &loaded.integrator(), &cfg.guards) {
        Ok(t) => t,
        Err(e) => return integration_error(report, e),
    };
    report.integrator = Some(traj.stats);
    if let Err(e) = attach_monitors(&mut traj, cfg.k, cfg.lambda) {
        return internal_error(report, e);
    }
    let csv_path = resolve_path(inv, &cfg.output.csv_path, format!("{}.csv", loaded.name));
    if let Err(e) = write_trajectory_csv(&csv_path, &traj) {
        return io_error(report, &csv_path, e);
    }
    if inv.dump_xi {
        let xi_path = companion_xi_path(&csv_path);
        if let Err(e) = write_xi_csv(&xi_path, &traj) {
            return io_error(report, &xi_path, e);
        }
    }
    let drifts = match conservation_report(&traj, cfg.k, cfg.lambda) {
        Ok(d) => d,
        Err(e) => return internal_error(report, e),
    };
    push_conservation_checks(&mut report.checks, &drifts, &cfg.thresholds);
    report.drifts = Some(drifts);
    threshold_code(report)
}

fn verify(loaded: &LoadedConfig, report: &mut RunReport) -> i32 {
    let cfg = &loaded.config;
    let vc = &cfg.verify;
    let suite = match identity_suite(
        cfg.k,
        cfg.lambda,
        vc.points,
        vc.seed,
        vc.clearance_min,
        vc.fd_step,
    ) {
        Ok(s) => s,
        Err(e) => return internal_error(report, e),
    };
    let th = &cfg.thresholds;
    let checks = &mut report.checks;
    checks.push(Check::new("potential_radial", suite.potential_radial, th.identity));
    checks.push(Check::new("field_radial", suite.field_radial, th.identity));
    checks.push(Check::new(
        "covariant_derivative",
        suite.covariant_derivative,
        th.identity_fd,
    ));
    checks.push(Check::new("pairing_projector", suite.pairing_projector, th.identity));
    checks.push(Check::new("pairing_norm", suite.pairing_norm, th.identity));
    checks.push(Check::new("force_norm", suite.force_norm, th.identity));
    report.identities = Some(suite);
    threshold_code(report)
}

fn cone_cmd(loaded: &LoadedConfig, report: &mut RunReport) -> i32 {
    let cfg = &loaded.config;
    let init = loaded.initial_state();
    match cone_of(&init, cfg.k, cfg.lambda) {
        Ok(c) => {
            report.cone = Some(ConeReport::defined(&c));
            EXIT_OK
        }
        Err(GeometryError::Undefined(u)) => {
            report.cone = Some(ConeReport::Undefined { undefined: u.to_string() });
            EXIT_OK
        }
        Err(e) => internal_error(report, e),
    }
}

fn compare(loaded: &LoadedConfig, report: &mut RunReport) -> i32 {
    let cfg = &loaded.config;
    let init = loaded.initial_state();
    let cone = match cone_of(&init, cfg.k, cfg.lambda) {
        Ok(c) => c,
        Err(GeometryError::Undefined(u)) => {
            report.cone = Some(ConeReport::Undefined { undefined: u.to_string() });
            report.error = Some(ErrorReport {
                kind: "undefined_cone".to_string(),
                message: format!("nothing to compare against: {u}"),
                t: None,
            });
            return EXIT_CONFIG;
        }
        Err(e) => return internal_error(report, e),
    };
    report.cone = Some(ConeReport::defined(&cone));
    let traj = match integrate(&init, &loaded.integrator(), &cfg.guards) {
        Ok(t) => t,
        Err(e) => return integration_error(report, e),
    };
    report.integrator = Some(traj.stats);

    let picks = sample_indices(traj.samples.len(), COMPARE_POINTS);
    let times: Vec<f64> = picks.iter().map(|&i| traj.samples[i].t).collect();
    let oracle = match analytic_geodesic(traj.initial(), &cone, &times) {
        Ok(o) => o,
        Err(e) => return internal_error(report, e),
    };
    let max_radius =
        picks.iter().map(|&i| traj.samples[i].r.norm()).fold(0.0_f64, f64::max);
    let worst = picks
        .iter()
        .zip(&oracle)
        .map(|(&i, p)| (&traj.samples[i].r - p).norm())
        .fold(0.0_f64, f64::max);
    let rel = worst / max_radius;
    report.oracle = Some(OracleReport { max_position_error: rel, points: times.len() });
    report
        .checks
        .push(Check::new("oracle_agreement", rel, cfg.thresholds.oracle_agreement));
    threshold_code(report)
}

fn push_conservation_checks(
    checks: &mut Vec<Check>,
    d: &ConservationReport,
    th: &Thresholds,
) {
    checks.push(Check::new("L_drift", d.l_drift, th.drift));
    if let Some(v) = d.l_eff_drift {
        checks.push(Check::new("Lbar_drift", v, th.drift));
    }
    checks.push(Check::new("V_norm_drift", d.v_norm_drift, th.drift));
    checks.push(Check::new("energy_drift", d.energy_drift, th.drift));
    checks.push(Check::new("orbit_drift", d.orbit_drift, th.orbit_membership));
    checks.push(Check::new("L_norm_identity", d.l_norm_identity, th.norm_identity));
    checks.push(Check::new("V_norm_identity", d.v_norm_identity, th.norm_identity));
    if let Some(v) = d.l_eff_norm_identity {
        checks.push(Check::new("Lbar_norm_identity", v, th.norm_identity));
    }
    if let Some(v) = d.cone_angle {
        checks.push(Check::new("cone_angle", v, th.cone_angle));
    }
    if let Some(v) = d.out_of_subspace {
        checks.push(Check::new("out_of_subspace", v, th.out_of_subspace));
    }
    if let Some(v) = d.collinearity {
        checks.push(Check::new("collinearity", v, th.collinearity));
    }
}

fn threshold_code(report: &RunReport) -> i32 {
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_THRESHOLD
    }
}

fn integration_error(report: &mut RunReport, e: IntegrateError) -> i32 {
    let (kind, code, t) = match &e {
        IntegrateError::BadConfig(_) => ("config", EXIT_CONFIG, None),
        IntegrateError::Guard { t, .. } => ("guard_trip", EXIT_GUARD, Some(*t)),
        IntegrateError::RadiusFloor { t, .. } => ("radius_floor", EXIT_GUARD, Some(*t)),
        IntegrateError::StepUnderflow { t, .. } => ("step_underflow", EXIT_GUARD, Some(*t)),
    };
    report.error = Some(ErrorReport { kind: kind.to_string(), message: e.to_string(), t });
    code
}

fn internal_error(report: &mut RunReport, e: impl std::fmt::Display) -> i32 {
    report.error =
        Some(ErrorReport { kind: "internal".to_string(), message: e.to_string(), t: None });
    EXIT_CONFIG
}

fn io_error(report: &mut RunReport, path: &Path, e: std::io::Error) -> i32 {
    report.error = Some(ErrorReport {
        kind: "io".to_string(),
        message: format!("{}: {e}", path.display()),
        t: None,
    });
    EXIT_CONFIG
}

fn resolve_path(inv: &Invocation, explicit: &Option<PathBuf>, default_name: String) -> PathBuf {
    match explicit {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => match &inv.out_dir {
            Some(dir) => dir.join(p),
            None => p.clone(),
        },
        None => match &inv.out_dir {
            Some(dir) => dir.join(default_name),
            None => PathBuf::from(default_name),
        },
    }
}

fn companion_xi_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".to_string());
    let ext = csv
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    csv.with_file_name(format!("{stem}_xi.{ext}"))
}

fn sample_indices(len: usize, want: usize) -> Vec<usize> {
    if len <= want {
        (0..len).collect()
    } else {
        (0..want).map(|i| i * (len - 1) / (want - 1)).collect()
    }
}

/// 17 significant digits: enough for exact f64 round-trips, so reruns of a
/// seeded scenario produce byte-identical files.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let n = traj.samples[0].r.dim();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",v{i}"));
    }
    out.push_str(",energy,drift_L,cone_residual\n");
    for (s, row) in traj.samples.iter().zip(&traj.monitors) {
        out.push_str(&fmt_float(s.t));
        for x in s.r.as_slice() {
            out.push(',');
            out.push_str(&fmt_float(*x));
        }
        for v in s.v.as_slice() {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push(',');
        out.push_str(&fmt_float(row.energy));
        out.push(',');
        out.push_str(&fmt_float(row.drift_l));
        out.push(',');
        if let Some(c) = row.cone_residual {
            out.push_str(&fmt_float(c));
        }
        out.push('\n');
    }
    fs::write(path, out)
}

fn write_xi_csv(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let m = traj.samples[0].xi.size();
    let mut out = String::from("t");
    for i in 1..=m {
        for j in i + 1..=m {
            out.push_str(&format!(",xi_{i}_{j}"));
        }
    }
    out.push('\n');
    for s in &traj.samples {
        out.push_str(&fmt_float(s.t));
        for v in s.xi.packed() {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    fs::write(path, out)
}
