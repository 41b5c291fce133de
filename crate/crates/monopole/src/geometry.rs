//! Conserved quantities and the cone picture.
//!
//! Three invariants organize the motion: the angular momentum 2-vector
//! L = r∧v + G with G_jk = −r²f_jk, the 3-vector V = r³ (r∧v∧a), and the
//! effective angular momentum L̄, the orthogonal projection of L onto
//! ∧²[V]. Away from the degenerate cases (λ = 0 or radial launch) the
//! particle stays on the cone inside [V] with axis ⋆(L̄/|L̄|) and aperture
//! ψ = arccos(|λ|/(√k·|L̄|)), and traverses it along a geodesic.
//!
//! The geodesic claim is checked two independent ways: by developing the
//! sampled trajectory into the plane (an isometry sending cone geodesics
//! to straight lines, whose straightness we measure) and by an explicit
//! closed-form oracle that never touches the integrator.
//!
//! L̄ is defined here by the projection. The closed-form product
//! (r − r⁴/(|L|²−λ²)·a) ∧ (v − (ṙ/r)r) is kept as a cross-check in the
//! tests, not as the definition, since the projection carries no sign or
//! ordering conventions of its own.

use crate::dynamics::{MonitorRow, State, Trajectory};
use crate::gauge::{force, paired_field, GaugeError};
use crate::liealg::{lie_inner, orbit_residual, LieAlgError};
use crate::par;
use crate::polyvec::{
    hodge_star, project_bivector, subspace_frame, BiVector, Frame3, PolyVecError, TriVector,
    Vector, Wedge,
};
use serde::Serialize;
use thiserror::Error;

/// Motion counts as radial when |r∧v| ≤ RADIAL_TOL · |r||v|.
pub const RADIAL_TOL: f64 = 1e-12;
/// A charge counts as absent when |ξ| is below this.
pub const ZERO_CHARGE_TOL: f64 = 1e-14;
/// How far off the cone the oracle tolerates its initial state.
pub const ORACLE_ON_CONE_TOL: f64 = 1e-6;

/// Why no cone is attached to a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConeUndefined {
    #[error("zero pole strength, the motion is a straight line")]
    ZeroCharge,
    #[error("radial motion, the cone degenerates to a ray")]
    RadialMotion,
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Algebra(#[from] PolyVecError),
    #[error(transparent)]
    Orbit(#[from] LieAlgError),
    #[error("cone undefined: {0}")]
    Undefined(#[from] ConeUndefined),
    #[error("sample at t = {t:.6} lies {residual:.3e} off the cone (allowed {allowed:.3e})")]
    OffCone { t: f64, residual: f64, allowed: f64 },
    #[error("need at least {need} trajectory samples, got {got}")]
    TooShort { need: usize, got: usize },
}

/// L = r∧v + G. The correction G has |G| = |λ| and is orthogonal to r∧v,
/// so |L|² = |r∧v|² + λ² identically.
pub fn angular_momentum(s: &State) -> Result<BiVector, GeometryError> {
    let rv = s.r.wedge(&s.v)?;
    let f = paired_field(&s.xi, &s.r)?;
    Ok(&rv - &f.as_bivector().scaled(s.r.norm_sq()))
}

fn trivector_raw(s: &State) -> Result<TriVector, GeometryError> {
    let a = force(&s.xi, &s.r, &s.v)?;
    let va = s.v.wedge(&a)?;
    Ok(s.r.wedge(&va)?.scaled(s.r.norm().powi(3)))
}

/// V = r∧v∧(r³a). Zero exactly when λ = 0; errors on radial motion with a
/// live charge, where V collapses and the subspace [V] stops existing.
pub fn orbit_trivector(s: &State) -> Result<TriVector, GeometryError> {
    let lambda_sq = lie_inner(&s.xi, &s.xi)?;
    if lambda_sq <= ZERO_CHARGE_TOL * ZERO_CHARGE_TOL {
        return Ok(TriVector::zeros(s.r.dim()));
    }
    let rv = s.r.wedge(&s.v)?;
    if rv.norm() <= RADIAL_TOL * s.r.norm() * s.v.norm() {
        return Err(ConeUndefined::RadialMotion.into());
    }
    trivector_raw(s)
}

/// The projection of L onto ∧²[V].
pub fn effective_angular_momentum(s: &State) -> Result<BiVector, GeometryError> {
    let l = angular_momentum(s)?;
    let frame = subspace_frame(&orbit_trivector(s)?)?;
    Ok(project_bivector(&l, &frame)?)
}

/// The cone a state determines: apex at the origin, axis ⋆(L̄/|L̄|) inside
/// [V], aperture arccos(|λ|/(√k·|L̄|)). All fields are plain data so tests
/// can assemble degenerate cones (e.g. a plane, ψ = π/2) directly.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    pub axis: Vector,
    pub aperture: f64,
    pub frame: Frame3,
    pub l_norm: f64,
    pub l_eff_norm: f64,
    pub v_norm: f64,
    pub lambda: f64,
    pub k: usize,
}

pub fn cone_of(s: &State, k: usize, lambda: f64) -> Result<ConeSpec, GeometryError> {
    if lambda.abs() <= ZERO_CHARGE_TOL {
        return Err(ConeUndefined::ZeroCharge.into());
    }
    let rv = s.r.wedge(&s.v)?;
    if rv.norm() <= RADIAL_TOL * s.r.norm() * s.v.norm() {
        return Err(ConeUndefined::RadialMotion.into());
    }
    let l = angular_momentum(s)?;
    let v3 = trivector_raw(s)?;
    let frame = subspace_frame(&v3)?;
    let l_eff = project_bivector(&l, &frame)?;
    let l_eff_norm = l_eff.norm();
    let axis = hodge_star(&l_eff.scaled(1.0 / l_eff_norm), &frame)?;
    let cos_psi = (lambda.abs() / ((k as f64).sqrt() * l_eff_norm)).min(1.0);
    Ok(ConeSpec {
        axis,
        aperture: cos_psi.acos(),
        frame,
        l_norm: l.norm(),
        l_eff_norm,
        v_norm: v3.norm(),
        lambda,
        k,
    })
}

/// Worst-case deviations of a trajectory from its cone.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConeResidual {
    /// max over samples of |r̂·axis − cos ψ|.
    pub angle: f64,
    /// max over samples of |r − P_[V] r| / |r|.
    pub out_of_subspace: f64,
}

pub fn cone_residual(traj: &Trajectory, cone: &ConeSpec) -> Result<ConeResidual, GeometryError> {
    if traj.samples.is_empty() {
        return Err(GeometryError::TooShort { need: 1, got: 0 });
    }
    let dim = traj.samples[0].r.dim();
    if cone.frame.dim() != dim || cone.axis.dim() != dim {
        return Err(PolyVecError::DimensionMismatch { expected: dim, found: cone.frame.dim() }
            .into());
    }
    let cos_psi = cone.aperture.cos();
    let per: Vec<(f64, f64)> = par::map_collect(&traj.samples, |s| {
        let radius = s.r.norm();
        let angle = (s.r.dot(&cone.axis) / radius - cos_psi).abs();
        let inside = cone.frame.project_vector(&s.r).expect("dimension checked above");
        let out = (&s.r - &inside).norm() / radius;
        (angle, out)
    });
    let mut worst = ConeResidual { angle: 0.0, out_of_subspace: 0.0 };
    for (angle, out) in per {
        worst.angle = worst.angle.max(angle);
        worst.out_of_subspace = worst.out_of_subspace.max(out);
    }
    Ok(worst)
}

/// Orthonormal pair spanning the plane orthogonal to the axis inside [V].
/// ê₁ is seeded from the frame vector least aligned with the axis when no
/// preferred direction is supplied.
fn equator_pair(cone: &ConeSpec, seed: Option<&Vector>) -> Result<(Vector, Vector), GeometryError> {
    let e1 = match seed {
        Some(u) => {
            let perp = u - &cone.axis.scaled(u.dot(&cone.axis));
            let norm = perp.norm();
            if norm <= 1e-12 * u.norm() {
                return Err(ConeUndefined::RadialMotion.into());
            }
            perp.scaled(1.0 / norm)
        }
        None => {
            let mut best: Option<Vector> = None;
            let mut best_norm = -1.0;
            for b in cone.frame.basis() {
                let perp = b - &cone.axis.scaled(b.dot(&cone.axis));
                let norm = perp.norm();
                if norm > best_norm {
                    best_norm = norm;
                    best = Some(perp.scaled(1.0 / norm));
                }
            }
            best.expect("frame has three vectors")
        }
    };
    let e2 = hodge_star(&cone.axis.wedge(&e1)?, &cone.frame)?;
    Ok((e1, e2))
}

/// A trajectory developed isometrically into the plane.
#[derive(Debug, Clone)]
pub struct UnrolledPath {
    /// Cartesian points (ρ cos θ, ρ sin θ), θ = (φ − φ₀)·sin ψ.
    pub points: Vec<[f64; 2]>,
    /// Max distance from the line through the first two points, over the
    /// radial spread. Near zero exactly when the path is a geodesic.
    pub collinearity: f64,
}

/// Develops the sampled path onto the plane. Refuses samples further than
/// 10·`tol` off the cone; sampling must be dense enough that the azimuth
/// advances by less than π between neighbours (the unwrapping assumption).
pub fn unroll(traj: &Trajectory, cone: &ConeSpec, tol: f64) -> Result<UnrolledPath, GeometryError> {
    if traj.samples.len() < 2 {
        return Err(GeometryError::TooShort { need: 2, got: traj.samples.len() });
    }
    let cos_psi = cone.aperture.cos();
    let sin_psi = cone.aperture.sin();
    let (e1, e2) = equator_pair(cone, None)?;

    let mut phi_prev = 0.0;
    let mut phi0 = 0.0;
    let mut points = Vec::with_capacity(traj.samples.len());
    for (i, s) in traj.samples.iter().enumerate() {
        let rho = s.r.norm();
        let residual = (s.r.dot(&cone.axis) / rho - cos_psi).abs();
        if residual > 10.0 * tol {
            return Err(GeometryError::OffCone { t: s.t, residual, allowed: 10.0 * tol });
        }
        let raw = f64::atan2(s.r.dot(&e2), s.r.dot(&e1));
        let phi = if i == 0 {
            phi0 = raw;
            raw
        } else {
            raw + std::f64::consts::TAU * ((phi_prev - raw) / std::f64::consts::TAU).round()
        };
        phi_prev = phi;
        let theta = (phi - phi0) * sin_psi;
        points.push([rho * theta.cos(), rho * theta.sin()]);
    }

    Ok(UnrolledPath { collinearity: collinearity(&points), points })
}

fn collinearity(points: &[[f64; 2]]) -> f64 {
    let p0 = points[0];
    // The reference chord: first pair of distinct points.
    let dir = points
        .iter()
        .map(|p| [p[0] - p0[0], p[1] - p0[1]])
        .find(|d| d[0].hypot(d[1]) > 0.0);
    let Some(d) = dir else { return 0.0 };
    let d_norm = d[0].hypot(d[1]);
    let mut max_dist = 0.0_f64;
    let mut rho_min = f64::INFINITY;
    let mut rho_max = f64::NEG_INFINITY;
    for p in points {
        let rel = [p[0] - p0[0], p[1] - p0[1]];
        let cross = (d[0] * rel[1] - d[1] * rel[0]).abs() / d_norm;
        max_dist = max_dist.max(cross);
        let rho = p[0].hypot(p[1]);
        rho_min = rho_min.min(rho);
        rho_max = rho_max.max(rho);
    }
    let spread = if rho_max - rho_min > 1e-12 * rho_max { rho_max - rho_min } else { rho_max };
    max_dist / spread
}

/// Closed-form geodesic through `init` on `cone`, evaluated at `times`.
/// Never consults the integrator: the development of the motion is the
/// straight line p(t) = (ρ₀ + ρ̇₀t, wt) with w² = |v₀|² − ρ̇₀², traversed at
/// constant speed, and the cone point is rebuilt from its polar form.
pub fn analytic_geodesic(
    init: &State,
    cone: &ConeSpec,
    times: &[f64],
) -> Result<Vec<Vector>, GeometryError> {
    let rho0 = init.r.norm();
    let cos_psi = cone.aperture.cos();
    let sin_psi = cone.aperture.sin();
    let residual = (init.r.dot(&cone.axis) / rho0 - cos_psi).abs();
    if residual > ORACLE_ON_CONE_TOL {
        return Err(GeometryError::OffCone {
            t: init.t,
            residual,
            allowed: ORACLE_ON_CONE_TOL,
        });
    }
    let (e1, e2) = equator_pair(cone, Some(&init.r))?;

    let rho_dot0 = init.r.dot(&init.v) / rho0;
    let w = (init.v.norm_sq() - rho_dot0 * rho_dot0).max(0.0).sqrt();
    let sense = if init.v.dot(&e2) < 0.0 { -1.0 } else { 1.0 };

    Ok(times
        .iter()
        .map(|&t| {
            let dt = t - init.t;
            let x = rho0 + rho_dot0 * dt;
            let y = w * dt;
            let rho = x.hypot(y);
            let phi = sense * f64::atan2(y, x) / sin_psi;
            let mut p = cone.axis.scaled(rho * cos_psi);
            p = &p + &e1.scaled(rho * sin_psi * phi.cos());
            p = &p + &e2.scaled(rho * sin_psi * phi.sin());
            p
        })
        .collect())
}

/// Worst-case drifts of every conserved quantity over a trajectory, all
/// relative to max(1, initial scale). Fields tied to the cone are None
/// when the run is degenerate (λ = 0 or radial).
#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    /// Componentwise drift of L against its initial value.
    pub l_drift: f64,
    /// Componentwise drift of L̄ in the fixed initial frame.
    pub l_eff_drift: Option<f64>,
    /// Drift of |V| against the (λ²/k)(|L₀|²−λ²)² prediction.
    pub v_norm_drift: f64,
    /// Drift of |v|².
    pub energy_drift: f64,
    /// Largest orbit-membership residual of ξ.
    pub orbit_drift: f64,
    /// Residual of |L|² = |r∧v|² + λ².
    pub l_norm_identity: f64,
    /// Residual of |V|² = (λ²/k)(|L|²−λ²)².
    pub v_norm_identity: f64,
    /// Residual of |L̄|² = |L|² − λ² + λ²/k.
    pub l_eff_norm_identity: Option<f64>,
    /// max |r̂·axis − cos ψ|.
    pub cone_angle: Option<f64>,
    /// max |r − P_[V] r| / |r|.
    pub out_of_subspace: Option<f64>,
    /// Straightness of the developed path.
    pub collinearity: Option<f64>,
}

impl ConservationReport {
    /// The largest of the always-defined drift figures.
    pub fn max_drift(&self) -> f64 {
        self.l_drift
            .max(self.l_eff_drift.unwrap_or(0.0))
            .max(self.v_norm_drift)
            .max(self.energy_drift)
            .max(self.orbit_drift)
    }
}

/// How far off the cone a sample may sit before `unroll` inside the report
/// gives up and reports no collinearity figure.
const REPORT_UNROLL_TOL: f64 = 1e-4;

struct SampleFigures {
    l: BiVector,
    rv_norm_sq: f64,
    v3_norm: f64,
    energy: f64,
    orbit: f64,
}

pub fn conservation_report(
    traj: &Trajectory,
    k: usize,
    lambda: f64,
) -> Result<ConservationReport, GeometryError> {
    if traj.samples.is_empty() {
        return Err(GeometryError::TooShort { need: 1, got: 0 });
    }
    let per: Vec<Result<SampleFigures, GeometryError>> = par::map_collect(&traj.samples, |s| {
        Ok(SampleFigures {
            l: angular_momentum(s)?,
            rv_norm_sq: s.r.wedge(&s.v)?.norm_sq(),
            v3_norm: trivector_raw(s)?.norm(),
            energy: s.energy(),
            orbit: orbit_residual(&s.xi, lambda, k)?,
        })
    });
    let per: Vec<SampleFigures> = per.into_iter().collect::<Result<_, _>>()?;

    let l0 = &per[0].l;
    let l0_scale = l0.norm().max(1.0);
    let e0 = per[0].energy;
    let e_scale = e0.max(1.0);
    let lambda_sq = lambda * lambda;
    // |V| predicted from the initial angular momentum.
    let v_pred = lambda.abs() / (k as f64).sqrt() * (l0.norm_sq() - lambda_sq).max(0.0);
    let v_scale = v_pred.max(1.0);

    let mut report = ConservationReport {
        l_drift: 0.0,
        l_eff_drift: None,
        v_norm_drift: 0.0,
        energy_drift: 0.0,
        orbit_drift: 0.0,
        l_norm_identity: 0.0,
        v_norm_identity: 0.0,
        l_eff_norm_identity: None,
        cone_angle: None,
        out_of_subspace: None,
        collinearity: None,
    };
    for fig in &per {
        let dl = fig
            .l
            .packed()
            .iter()
            .zip(l0.packed())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        report.l_drift = report.l_drift.max(dl / l0_scale);
        report.v_norm_drift = report.v_norm_drift.max((fig.v3_norm - v_pred).abs() / v_scale);
        report.energy_drift = report.energy_drift.max((fig.energy - e0).abs() / e_scale);
        report.orbit_drift = report.orbit_drift.max(fig.orbit);

        let l_sq = fig.l.norm_sq();
        report.l_norm_identity = report
            .l_norm_identity
            .max((l_sq - fig.rv_norm_sq - lambda_sq).abs() / l_sq.max(1.0));
        let v_sq = fig.v3_norm * fig.v3_norm;
        let v_rhs = lambda_sq / k as f64 * (l_sq - lambda_sq) * (l_sq - lambda_sq);
        report.v_norm_identity =
            report.v_norm_identity.max((v_sq - v_rhs).abs() / v_sq.max(1.0));
    }

    match cone_of(traj.initial(), k, lambda) {
        Ok(cone) => {
            let l_eff0 = project_bivector(l0, &cone.frame)?;
            let scale = l_eff0.norm().max(1.0);
            let mut drift = 0.0_f64;
            let mut identity = 0.0_f64;
            for fig in &per {
                let l_eff = project_bivector(&fig.l, &cone.frame)?;
                let d = l_eff
                    .packed()
                    .iter()
                    .zip(l_eff0.packed())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                drift = drift.max(d / scale);
                let rhs = fig.l.norm_sq() - lambda_sq + lambda_sq / k as f64;
                identity =
                    identity.max((l_eff.norm_sq() - rhs).abs() / l_eff.norm_sq().max(1.0));
            }
            report.l_eff_drift = Some(drift);
            report.l_eff_norm_identity = Some(identity);
            let res = cone_residual(traj, &cone)?;
            report.cone_angle = Some(res.angle);
            report.out_of_subspace = Some(res.out_of_subspace);
            report.collinearity = match unroll(traj, &cone, REPORT_UNROLL_TOL) {
                Ok(path) => Some(path.collinearity),
                // Past the gate the cone_angle field already tells the story.
                Err(GeometryError::OffCone { .. }) => None,
                Err(e) => return Err(e),
            };
        }
        Err(GeometryError::Undefined(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Fills the per-sample monitor rows of a trajectory: energy, relative
/// componentwise L drift, and the cone angle residual when a cone exists.
pub fn attach_monitors(
    traj: &mut Trajectory,
    k: usize,
    lambda: f64,
) -> Result<(), GeometryError> {
    if traj.samples.is_empty() {
        return Err(GeometryError::TooShort { need: 1, got: 0 });
    }
    let cone = match cone_of(traj.initial(), k, lambda) {
        Ok(c) => Some(c),
        Err(GeometryError::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    let l0 = angular_momentum(traj.initial())?;
    let l0_scale = l0.norm().max(1.0);
    let cos_psi = cone.as_ref().map(|c| c.aperture.cos());
    let rows: Vec<Result<MonitorRow, GeometryError>> = par::map_collect(&traj.samples, |s| {
        let l = angular_momentum(s)?;
        let drift_l = l
            .packed()
            .iter()
            .zip(l0.packed())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max)
            / l0_scale;
        let cone_residual = cone.as_ref().map(|c| {
            (s.r.dot(&c.axis) / s.r.norm() - cos_psi.unwrap()).abs()
        });
        Ok(MonitorRow { energy: s.energy(), drift_l, cone_residual })
    });
    traj.monitors = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(())
}
