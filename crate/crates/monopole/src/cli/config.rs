//! Scenario configuration documents.
//!
//! One JSON document drives every command; commands differ only in which
//! pipeline stages they run. Defaults are chosen so that a minimal
//! document like `{"k":1,"lambda":1,"r0":[0,0,1],"v0":[1,0,0]}` runs the
//! standard adaptive integration with the documented thresholds.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Guards, IntegratorConfig, State};
use crate::gauge::{string_clearance, EPS_STRING};
use crate::liealg::{LieAlgError, OrbitElement, SkewMatrix, MAX_K, ORBIT_MEMBERSHIP_TOL};
use crate::polyvec::Vector;

/// Largest admissible asymmetry in an explicit charge matrix.
pub const XI_SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

/// How the internal charge is seeded.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum XiInit {
    /// The block-diagonal orbit base point.
    Base,
    /// A seeded random rotation of the base point.
    Random { seed: u64 },
    /// A full 2k×2k matrix, validated for antisymmetry and membership.
    Explicit { matrix: Vec<Vec<f64>> },
}

impl Default for XiInit {
    fn default() -> Self {
        XiInit::Base
    }
}

/// Output file routing. Relative paths are joined to `--out` when given.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    /// Overrides the integrator's sampling cadence for file output.
    pub sample_every: Option<usize>,
}

/// Pass/fail thresholds. The defaults mirror the acceptance test suite so
/// the CLI and the tests judge runs by one standard.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Conserved-quantity drift (components of L, L̄; |V|; energy).
    pub drift: f64,
    /// Norm identities tying |L|, |V|, |L̄| together.
    pub norm_identity: f64,
    /// |r̂·axis − cos ψ| along the run.
    pub cone_angle: f64,
    /// |r − P_[V] r|/|r| along the run.
    pub out_of_subspace: f64,
    /// Straightness of the developed path.
    pub collinearity: f64,
    /// Exact structural identities in the `verify` command.
    pub identity: f64,
    /// The finite-difference identity in the `verify` command.
    pub identity_fd: f64,
    /// Integrated trajectory vs the closed-form geodesic.
    pub oracle_agreement: f64,
    /// Orbit-membership residual of ξ along the run.
    pub orbit_membership: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            drift: 1e-7,
            norm_identity: 1e-9,
            cone_angle: 1e-7,
            out_of_subspace: 1e-7,
            collinearity: 1e-6,
            identity: 1e-10,
            identity_fd: 1e-6,
            oracle_agreement: 1e-5,
            orbit_membership: 1e-7,
        }
    }
}

/// Settings for the `verify` command's random-point identity sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub points: usize,
    pub seed: u64,
    pub clearance_min: f64,
    pub fd_step: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { points: 100, seed: 7, clearance_min: 0.1, fd_step: 1e-5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label for output files and sweep summaries; file stem when absent.
    #[serde(default)]
    pub name: Option<String>,
    pub k: usize,
    pub lambda: f64,
    pub r0: Vec<f64>,
    pub v0: Vec<f64>,
    #[serde(default)]
    pub xi_init: XiInit,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub guards: Guards,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub verify: VerifyConfig,
}

/// A parsed and validated scenario, charge already constructed.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub path: PathBuf,
    pub name: String,
    pub charge: OrbitElement,
}

impl LoadedConfig {
    pub fn initial_state(&self) -> State {
        State::new(
            0.0,
            Vector::new(self.config.r0.clone()),
            Vector::new(self.config.v0.clone()),
            self.charge.xi().clone(),
        )
    }

    /// Integrator settings with the output sampling override applied.
    pub fn integrator(&self) -> IntegratorConfig {
        let mut cfg = self.config.integrator.clone();
        if let Some(every) = self.config.output.sample_every {
            cfg.sample_every = every;
        }
        cfg
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Syntax {
        path: path.to_path_buf(),
        source,
    })?;
    let invalid = |reason: String| ConfigError::Invalid { path: path.to_path_buf(), reason };

    let k = config.k;
    if k < 1 || k > MAX_K {
        return Err(invalid(format!("k must lie in 1..={MAX_K}, got {k}")));
    }
    let n = 2 * k + 1;
    if config.r0.len() != n {
        return Err(invalid(format!("r0 must have length {n}, got {}", config.r0.len())));
    }
    if config.v0.len() != n {
        return Err(invalid(format!("v0 must have length {n}, got {}", config.v0.len())));
    }
    if !config.r0.iter().chain(&config.v0).all(|x| x.is_finite()) || !config.lambda.is_finite()
    {
        return Err(invalid("r0, v0 and lambda must be finite".into()));
    }
    let r0 = Vector::new(config.r0.clone());
    if r0.norm() == 0.0 {
        return Err(invalid("r0 must be nonzero".into()));
    }
    let floor = config.guards.string_clearance_min.max(EPS_STRING);
    match string_clearance(&r0) {
        Ok(c) if c > floor => {}
        Ok(c) => {
            return Err(invalid(format!(
                "r0 sits too close to the excluded axis: clearance {c:.3e} ≤ {floor:.3e}"
            )))
        }
        Err(e) => return Err(invalid(e.to_string())),
    }
    if config.output.sample_every == Some(0) {
        return Err(invalid("output.sample_every must be at least 1".into()));
    }
    let vc = &config.verify;
    if vc.points == 0 || !(vc.clearance_min > 0.0) || !(vc.fd_step > 0.0) {
        return Err(invalid(
            "verify.points must be ≥ 1 and clearance_min, fd_step positive".into(),
        ));
    }

    let charge = build_charge(&config).map_err(|reason| invalid(reason))?;
    let name = config.name.clone().unwrap_or_else(|| {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
    });
    Ok(LoadedConfig { config, path: path.to_path_buf(), name, charge })
}

fn build_charge(config: &RunConfig) -> Result<OrbitElement, String> {
    let k = config.k;
    let lambda = config.lambda;
    let lift = |e: LieAlgError| e.to_string();
    match &config.xi_init {
        XiInit::Base => OrbitElement::base(lambda, k).map_err(lift),
        XiInit::Random { seed } => OrbitElement::random(lambda, k, *seed).map_err(lift),
        XiInit::Explicit { matrix } => {
            let m = 2 * k;
            if matrix.len() != m || matrix.iter().any(|row| row.len() != m) {
                return Err(format!("xi_init.matrix must be {m}×{m}"));
            }
            let mut deviation = 0.0_f64;
            let mut xi = SkewMatrix::zeros(m);
            for i in 0..m {
                deviation = deviation.max(matrix[i][i].abs());
                for j in i + 1..m {
                    deviation = deviation.max((matrix[i][j] + matrix[j][i]).abs());
                    xi.set(i, j, matrix[i][j]);
                }
            }
            if deviation > XI_SKEW_TOL {
                return Err(format!(
                    "xi_init.matrix is not antisymmetric (deviation {deviation:.3e})"
                ));
            }
            OrbitElement::from_matrix(xi, lambda, k, ORBIT_MEMBERSHIP_TOL).map_err(lift)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::orbit_base;
    use std::io::Write;

    fn write_config(body: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let (_dir, path) =
            write_config(r#"{"k":1,"lambda":1.0,"r0":[0,0,1],"v0":[1,0,0]}"#);
        let loaded = load_config(&path).unwrap();
        assert_eq!(loaded.name, "scenario");
        assert_eq!(loaded.config.integrator.rel_tol, 1e-10);
        assert_eq!(loaded.config.integrator.t_end, 20.0);
        assert_eq!(loaded.config.thresholds.drift, 1e-7);
        assert_eq!(loaded.charge.xi().packed(), orbit_base(1.0, 1).unwrap().packed());
    }

    #[test]
    fn dimension_mismatch_is_named() {
        let (_dir, path) =
            write_config(r#"{"k":2,"lambda":1.0,"r0":[0,0,1,0],"v0":[1,0,0,0,0]}"#);
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("r0 must have length 5"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let (_dir, path) =
            write_config(r#"{"k":1,"lambda":1.0,"r0":[0,0,1],"v0":[1,0,0],"speling":3}"#);
        assert!(matches!(load_config(&path), Err(ConfigError::Syntax { .. })));
    }

    #[test]
    fn explicit_charge_must_sit_on_the_orbit() {
        let (_dir, path) = write_config(
            r#"{"k":1,"lambda":1.0,"r0":[0,0,1],"v0":[1,0,0],
                "xi_init":{"mode":"explicit","matrix":[[0.0,0.5],[-0.5,0.0]]}}"#,
        );
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("orbit"), "{err}");

        let (_dir2, good) = write_config(
            r#"{"k":1,"lambda":-0.5,"r0":[0,0,1],"v0":[1,0,0],
                "xi_init":{"mode":"explicit","matrix":[[0.0,0.5],[-0.5,0.0]]}}"#,
        );
        let loaded = load_config(&good).unwrap();
        assert_eq!(loaded.charge.lambda(), -0.5);
    }

    #[test]
    fn asymmetric_explicit_charge_is_rejected() {
        let (_dir, path) = write_config(
            r#"{"k":1,"lambda":1.0,"r0":[0,0,1],"v0":[1,0,0],
                "xi_init":{"mode":"explicit","matrix":[[0.0,1.0],[-0.9,0.0]]}}"#,
        );
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("antisymmetric"), "{err}");
    }

    #[test]
    fn initial_point_on_the_string_is_rejected() {
        let (_dir, path) =
            write_config(r#"{"k":1,"lambda":1.0,"r0":[0,0,-1],"v0":[1,0,0]}"#);
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("clearance"), "{err}");
    }
}
