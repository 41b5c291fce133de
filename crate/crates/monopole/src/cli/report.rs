//! The structured report every command writes.

use serde::Serialize;

use crate::cli::config::RunConfig;
use crate::dynamics::IntegratorStats;
use crate::gauge::IdentityReport;
use crate::geometry::{ConeSpec, ConservationReport};

/// One thresholded figure of merit. NaN never passes.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, threshold: f64) -> Check {
        Check { name: name.to_string(), value, threshold, pass: value <= threshold }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ConeReport {
    Defined {
        axis: Vec<f64>,
        aperture_rad: f64,
        #[serde(rename = "norm_L")]
        norm_l: f64,
        #[serde(rename = "norm_Lbar")]
        norm_lbar: f64,
        #[serde(rename = "norm_V")]
        norm_v: f64,
    },
    Undefined { undefined: String },
}

impl ConeReport {
    pub fn defined(cone: &ConeSpec) -> ConeReport {
        ConeReport::Defined {
            axis: cone.axis.as_slice().to_vec(),
            aperture_rad: cone.aperture,
            norm_l: cone.l_norm,
            norm_lbar: cone.l_eff_norm,
            norm_v: cone.v_norm,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    /// Max pointwise distance to the closed-form geodesic over max radius.
    pub max_position_error: f64,
    /// Number of compared sample times.
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub name: String,
    pub config: RunConfig,
    pub cone: Option<ConeReport>,
    pub drifts: Option<ConservationReport>,
    pub identities: Option<IdentityReport>,
    pub oracle: Option<OracleReport>,
    pub checks: Vec<Check>,
    pub integrator: Option<IntegratorStats>,
    pub error: Option<ErrorReport>,
}

impl RunReport {
    pub fn new(command: &str, name: &str, config: RunConfig) -> RunReport {
        RunReport {
            command: command.to_string(),
            name: name.to_string(),
            config,
            cone: None,
            drifts: None,
            identities: None,
            oracle: None,
            checks: Vec::new(),
            integrator: None,
            error: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
