//! The so(2k)-valued gauge field of a pole of strength λ at the origin of
//! ℝⁿ, n = 2k + 1, in the chart that excludes the negative n-axis.
//!
//! With r = |x|, s = 1/(r(r + xₙ)), generator indices a, b < 2k and
//! M_{ab} the so(2k) generators, the potential and field strength are
//!
//!   𝔞_b  = −s Σ_a x_a M_{ab},          𝔞_n = 0,
//!   𝔉_{nb} = (1/r³) Σ_a x_a M_{ab},
//!   𝔉_{ab} = −(1/r²) (M_{ab} + x_a 𝔞_b − x_b 𝔞_a),
//!
//! antisymmetric in the point indices. Pairing the field with a charge
//! ξ ∈ O_λ gives the real antisymmetric table f_{jk} = (ξ, 𝔉_{jk}); the
//! force on a unit-mass particle is force_j = Σ_l f_{jl} v_l and the charge
//! itself is transported by dξ/dt = [ξ, 𝔞(v)].
//!
//! `check_identities` evaluates the residuals of the structural identities
//! these fields satisfy (radial transversality, the covariant derivative of
//! 𝔉, and the pairing normalizations that pin |r²f|² = λ²); the identities
//! hold pointwise, so the residuals measure implementation and
//! floating-point error only.

use crate::liealg::{bracket, lie_inner, LieAlgError, OrbitElement, SkewMatrix, MAX_K};
use crate::par;
use crate::polyvec::{pair_index, BiVector, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

/// Minimum admissible relative clearance (r + xₙ)/r from the string.
pub const EPS_STRING: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum GaugeError {
    #[error("point dimension {found} does not match n = 2k+1 = {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("field is singular at the origin (r = {r:.3e})")]
    ZeroRadius { r: f64 },
    #[error("point too close to the string singularity (clearance {clearance:.3e})")]
    StringProximity { clearance: f64 },
    #[error("charge error: {0}")]
    Charge(#[from] LieAlgError),
}

/// Relative distance from the string singularity: (r + xₙ)/r ∈ [0, 2].
pub fn string_clearance(x: &Vector) -> Result<f64, GaugeError> {
    let r = x.norm();
    if r == 0.0 {
        return Err(GaugeError::ZeroRadius { r });
    }
    Ok((r + x[x.dim() - 1]) / r)
}

fn check_chart(x: &Vector, k: usize) -> Result<(), GaugeError> {
    let n = 2 * k + 1;
    if x.dim() != n {
        return Err(GaugeError::DimensionMismatch { expected: n, found: x.dim() });
    }
    let clearance = string_clearance(x)?;
    if clearance <= EPS_STRING {
        return Err(GaugeError::StringProximity { clearance });
    }
    Ok(())
}

/// The potential components 𝔞_j at a point; 𝔞_n is identically zero.
#[derive(Debug, Clone)]
pub struct PotentialSample {
    point: Vector,
    a: Vec<SkewMatrix>,
}

impl PotentialSample {
    pub fn point(&self) -> &Vector {
        &self.point
    }

    /// 𝔞_j for j < n; the last component is the zero matrix.
    pub fn comp(&self, j: usize) -> &SkewMatrix {
        &self.a[j]
    }

    /// 𝔞(v) = Σ_j v_j 𝔞_j.
    pub fn along(&self, v: &Vector) -> SkewMatrix {
        let m = self.a[0].size();
        let mut out = SkewMatrix::zeros(m);
        for (j, aj) in self.a.iter().enumerate() {
            out.add_scaled(aj, v[j]);
        }
        out
    }
}

/// The field strength components 𝔉_{jk} at a point, stored for j < k.
#[derive(Debug, Clone)]
pub struct FieldSample {
    point: Vector,
    f: Vec<SkewMatrix>,
}

impl FieldSample {
    pub fn point(&self) -> &Vector {
        &self.point
    }

    /// Signed component 𝔉_{jk}; the zero matrix when j = k.
    pub fn comp(&self, j: usize, k: usize) -> SkewMatrix {
        let n = self.point.dim();
        match j.cmp(&k) {
            std::cmp::Ordering::Less => self.f[pair_index(n, j, k)].clone(),
            std::cmp::Ordering::Greater => self.f[pair_index(n, k, j)].scaled(-1.0),
            std::cmp::Ordering::Equal => SkewMatrix::zeros(self.f[0].size()),
        }
    }

    fn upper(&self, j: usize, k: usize) -> &SkewMatrix {
        &self.f[pair_index(self.point.dim(), j, k)]
    }
}

/// Evaluates the potential, guarding the origin and the string.
pub fn potential(x: &Vector, k: usize) -> Result<PotentialSample, GaugeError> {
    check_chart(x, k)?;
    let n = 2 * k + 1;
    let m = 2 * k;
    let r = x.norm();
    let s = 1.0 / (r * (r + x[n - 1]));
    let mut a = Vec::with_capacity(n);
    for b in 0..m {
        let mut ab = SkewMatrix::zeros(m);
        for c in 0..m {
            if c != b {
                // −s x_c M_{cb} contributes +s x_c at entry (c, b).
                ab.set(c, b, s * x[c]);
            }
        }
        a.push(ab);
    }
    a.push(SkewMatrix::zeros(m));
    Ok(PotentialSample { point: x.clone(), a })
}

/// Evaluates the field strength, guarding the origin and the string.
pub fn field_strength(x: &Vector, k: usize) -> Result<FieldSample, GaugeError> {
    let pot = potential(x, k)?;
    let n = 2 * k + 1;
    let m = 2 * k;
    let r_sq = x.norm_sq();
    let r3 = r_sq * r_sq.sqrt();
    let mut f = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for l in j + 1..n {
            let mut fjl = SkewMatrix::zeros(m);
            if l == n - 1 {
                // 𝔉_{jn} = −𝔉_{nj} = −(1/r³) Σ_a x_a M_{aj}: entry (c, j) = +x_c/r³.
                for c in 0..m {
                    if c != j {
                        fjl.set(c, j, x[c] / r3);
                    }
                }
            } else {
                // −(1/r²) M_{jl} contributes +1/r² at entry (j, l).
                fjl.set(j, l, 1.0 / r_sq);
                fjl.add_scaled(pot.comp(l), -x[j] / r_sq);
                fjl.add_scaled(pot.comp(j), x[l] / r_sq);
            }
            f.push(fjl);
        }
    }
    Ok(FieldSample { point: x.clone(), f })
}

/// The real antisymmetric table f_{jk} = (ξ, 𝔉_{jk}) of a charge paired
/// with the field at a point.
#[derive(Debug, Clone)]
pub struct PairedField {
    point: Vector,
    f: BiVector,
}

impl PairedField {
    pub fn point(&self) -> &Vector {
        &self.point
    }

    pub fn comp(&self, j: usize, k: usize) -> f64 {
        self.f.comp(j, k)
    }

    /// The table viewed as a 2-vector on ℝⁿ.
    pub fn as_bivector(&self) -> &BiVector {
        &self.f
    }
}

fn check_charge_dims(xi: &SkewMatrix, x: &Vector) -> Result<usize, GaugeError> {
    let k = xi.size() / 2;
    if xi.size() % 2 != 0 || k == 0 || k > MAX_K || x.dim() != 2 * k + 1 {
        return Err(GaugeError::DimensionMismatch {
            expected: xi.size() + 1,
            found: x.dim(),
        });
    }
    Ok(k)
}

/// Pairs a charge with the field strength at a point.
pub fn paired_field(xi: &SkewMatrix, x: &Vector) -> Result<PairedField, GaugeError> {
    let k = check_charge_dims(xi, x)?;
    let fs = field_strength(x, k)?;
    let n = x.dim();
    let mut f = BiVector::zeros(n);
    for j in 0..n {
        for l in j + 1..n {
            f.set(j, l, lie_inner(xi, fs.upper(j, l)).expect("sizes agree"));
        }
    }
    Ok(PairedField { point: x.clone(), f })
}

/// Lorentz-type force: force_j = Σ_l f_{jl} v_l. Orthogonal to both v
/// (f is antisymmetric) and x (radial transversality of 𝔉).
pub fn force(xi: &SkewMatrix, x: &Vector, v: &Vector) -> Result<Vector, GaugeError> {
    if v.dim() != x.dim() {
        return Err(GaugeError::DimensionMismatch { expected: x.dim(), found: v.dim() });
    }
    let pf = paired_field(xi, x)?;
    let n = x.dim();
    let mut out = Vector::zeros(n);
    for j in 0..n {
        let mut s = 0.0;
        for l in 0..n {
            if l != j {
                s += pf.comp(j, l) * v[l];
            }
        }
        out[j] = s;
    }
    Ok(out)
}

/// Parallel-transport rate of the charge along velocity v:
/// dξ/dt = [ξ, 𝔞(v)]. Preserves (ξ, ξ) and the orbit invariants exactly
/// at the level of the flow.
pub fn transport_rate(
    xi: &SkewMatrix,
    x: &Vector,
    v: &Vector,
) -> Result<SkewMatrix, GaugeError> {
    let k = check_charge_dims(xi, x)?;
    if v.dim() != x.dim() {
        return Err(GaugeError::DimensionMismatch { expected: x.dim(), found: v.dim() });
    }
    let pot = potential(x, k)?;
    Ok(bracket(xi, &pot.along(v)).expect("sizes agree"))
}

/// Relative residuals of the structural field identities at one state.
/// Each residual is scaled so that order-one means "identity violated" and
/// anything near machine epsilon means "holds".
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityReport {
    /// ‖Σ_j x_j 𝔞_j‖ against the size of its cancelling terms.
    pub potential_radial: f64,
    /// max_b ‖Σ_j x_j 𝔉_{jb}‖ against the size of its cancelling terms.
    pub field_radial: f64,
    /// Central-difference check of ∇_l 𝔉_{jk} =
    /// (1/r²)(−x_j 𝔉_{lk} − x_k 𝔉_{jl} − 2 x_l 𝔉_{jk}).
    pub covariant_derivative: f64,
    /// r⁴ Σ_m f_{mj} f_{mj'} = (λ²/k)(δ_{jj'} − x_j x_j'/r²), componentwise.
    pub pairing_projector: f64,
    /// |r² f|² = λ² for the paired table as a 2-vector.
    pub pairing_norm: f64,
    /// |r² force|² = (λ²/k) |x ∧ v|²/r².
    pub force_norm: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.potential_radial
            .max(self.field_radial)
            .max(self.covariant_derivative)
            .max(self.pairing_projector)
            .max(self.pairing_norm)
            .max(self.force_norm)
    }

    fn max(self, other: IdentityReport) -> IdentityReport {
        IdentityReport {
            potential_radial: self.potential_radial.max(other.potential_radial),
            field_radial: self.field_radial.max(other.field_radial),
            covariant_derivative: self.covariant_derivative.max(other.covariant_derivative),
            pairing_projector: self.pairing_projector.max(other.pairing_projector),
            pairing_norm: self.pairing_norm.max(other.pairing_norm),
            force_norm: self.force_norm.max(other.force_norm),
        }
    }
}

/// Evaluates all identity residuals at one state. The covariant-derivative
/// check uses central differences with step `fd_step`; all other residuals
/// are exact evaluations.
pub fn check_identities(
    x: &Vector,
    v: &Vector,
    charge: &OrbitElement,
    fd_step: f64,
) -> Result<IdentityReport, GaugeError> {
    let xi = charge.xi();
    let lambda = charge.lambda();
    let k = check_charge_dims(xi, x)?;
    let n = x.dim();
    let r_sq = x.norm_sq();

    let pot = potential(x, k)?;
    let fs = field_strength(x, k)?;
    let pf = paired_field(xi, x)?;

    // (a) Σ_j x_j 𝔞_j = 0.
    let mut acc = SkewMatrix::zeros(2 * k);
    let mut scale = 0.0;
    for j in 0..n {
        acc.add_scaled(pot.comp(j), x[j]);
        scale += x[j].abs() * pot.comp(j).max_abs();
    }
    let potential_radial = acc.max_abs() / scale.max(f64::MIN_POSITIVE);

    // (b) Σ_j x_j 𝔉_{jb} = 0 for every b.
    let mut field_radial: f64 = 0.0;
    for b in 0..n {
        let mut acc = SkewMatrix::zeros(2 * k);
        let mut scale = 0.0;
        for j in 0..n {
            if j != b {
                acc.add_scaled(&fs.comp(j, b), x[j]);
                scale += x[j].abs() * fs.comp(j, b).max_abs();
            }
        }
        field_radial = field_radial.max(acc.max_abs() / scale.max(f64::MIN_POSITIVE));
    }

    // (c) ∂_l 𝔉_{jk} + [𝔞_l, 𝔉_{jk}] = (1/r²)(−x_j 𝔉_{lk} − x_k 𝔉_{jl} − 2 x_l 𝔉_{jk}).
    let mut covariant_derivative: f64 = 0.0;
    let mut rhs_scale: f64 = 0.0;
    for l in 0..n {
        let mut xp = x.clone();
        xp[l] += fd_step;
        let mut xm = x.clone();
        xm[l] -= fd_step;
        let fp = field_strength(&xp, k)?;
        let fm = field_strength(&xm, k)?;
        for j in 0..n {
            for kk in j + 1..n {
                let mut lhs = &fp.comp(j, kk) - &fm.comp(j, kk);
                lhs = lhs.scaled(1.0 / (2.0 * fd_step));
                let comm = bracket(pot.comp(l), fs.upper(j, kk)).expect("sizes agree");
                let lhs = &lhs + &comm;
                let mut rhs = SkewMatrix::zeros(2 * k);
                rhs.add_scaled(&fs.comp(l, kk), -x[j] / r_sq);
                rhs.add_scaled(&fs.comp(j, l), -x[kk] / r_sq);
                rhs.add_scaled(fs.upper(j, kk), -2.0 * x[l] / r_sq);
                covariant_derivative = covariant_derivative.max((&lhs - &rhs).max_abs());
                rhs_scale = rhs_scale.max(rhs.max_abs());
            }
        }
    }
    let covariant_derivative = covariant_derivative / rhs_scale.max(1.0);

    // (d) r⁴ Σ_m f_{mj} f_{mj'} = (λ²/k)(δ_{jj'} − x_j x_j'/r²).
    let coupling = lambda * lambda / k as f64;
    let d_scale = if lambda != 0.0 { coupling } else { 1.0 };
    let mut pairing_projector: f64 = 0.0;
    for j in 0..n {
        for jp in j..n {
            let mut s = 0.0;
            for m in 0..n {
                s += pf.comp(m, j) * pf.comp(m, jp);
            }
            let lhs = r_sq * r_sq * s;
            let delta = if j == jp { 1.0 } else { 0.0 };
            let rhs = coupling * (delta - x[j] * x[jp] / r_sq);
            pairing_projector = pairing_projector.max((lhs - rhs).abs() / d_scale);
        }
    }

    // (e) |r² f|² = λ².
    let f_norm_sq: f64 = pf.as_bivector().norm_sq() * r_sq.powi(2);
    let pairing_norm = (f_norm_sq - lambda * lambda).abs() / (lambda * lambda).max(1.0);

    // (f) |r² force|² = (λ²/k) |x ∧ v|²/r².
    let a = force(xi, x, v)?;
    let wedge_sq = x.norm_sq() * v.norm_sq() - x.dot(v).powi(2);
    let rhs = coupling * wedge_sq / r_sq;
    let lhs = a.norm_sq() * r_sq.powi(2);
    let force_norm = (lhs - rhs).abs() / rhs.abs().max(1.0);

    Ok(IdentityReport {
        potential_radial,
        field_radial,
        covariant_derivative,
        pairing_projector,
        pairing_norm,
        force_norm,
    })
}

/// Draws a random state well inside the chart: radius in [1/2, 2], string
/// clearance at least `clearance_min`, Gaussian velocity, and a seeded
/// random charge on O_λ.
pub fn random_state(
    k: usize,
    lambda: f64,
    clearance_min: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vector, Vector, OrbitElement), GaugeError> {
    let n = 2 * k + 1;
    let x = loop {
        let raw =
            Vector::new((0..n).map(|_| StandardNormal.sample(rng)).collect::<Vec<f64>>());
        let norm = raw.norm();
        if norm < 1e-6 {
            continue;
        }
        let x = raw.scaled(rng.gen_range(0.5..2.0) / norm);
        if string_clearance(&x)? >= clearance_min {
            break x;
        }
    };
    let v = Vector::new((0..n).map(|_| StandardNormal.sample(rng)).collect::<Vec<f64>>());
    let charge = OrbitElement::random(lambda, k, rng.gen())?;
    Ok((x, v, charge))
}

/// Runs `check_identities` at `points` random states and keeps the largest
/// residual of each kind. Point generation is sequential and seeded; the
/// evaluations run in parallel under the `parallel` feature.
pub fn identity_suite(
    k: usize,
    lambda: f64,
    points: usize,
    seed: u64,
    clearance_min: f64,
    fd_step: f64,
) -> Result<IdentityReport, GaugeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<(Vector, Vector, OrbitElement)> = (0..points)
        .map(|_| random_state(k, lambda, clearance_min, &mut rng))
        .collect::<Result<_, _>>()?;
    let reports: Vec<Result<IdentityReport, GaugeError>> = par::map_collect(
        &states,
        |(x, v, charge)| check_identities(x, v, charge, fd_step),
    );
    let mut worst: Option<IdentityReport> = None;
    for r in reports {
        let r = r?;
        worst = Some(match worst {
            None => r,
            Some(w) => w.max(r),
        });
    }
    worst.ok_or(GaugeError::DimensionMismatch { expected: 1, found: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::orbit_base;

    fn vec3(a: f64, b: f64, c: f64) -> Vector {
        Vector::new(vec![a, b, c])
    }

    fn cross(a: &Vector, b: &Vector) -> Vector {
        vec3(
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        )
    }

    #[test]
    fn potential_at_the_reference_point() {
        // At x = (1, 0, 0), k = 1: 𝔞_0 = 0 and 𝔞_1 = [[0, 1], [−1, 0]].
        let pot = potential(&vec3(1.0, 0.0, 0.0), 1).unwrap();
        assert_eq!(pot.comp(0).max_abs(), 0.0);
        assert_eq!(pot.comp(1).to_rows(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert_eq!(pot.comp(2).max_abs(), 0.0);
    }

    #[test]
    fn paired_field_matches_the_classical_k1_table() {
        // f_{01} = −λ x_2/r³, f_{20} = −λ x_1/r³, f_{21} = λ x_0/r³.
        let lambda = 1.25;
        let xi = orbit_base(lambda, 1).unwrap();
        let x = vec3(0.3, -0.7, 0.9);
        let r3 = x.norm().powi(3);
        let pf = paired_field(&xi, &x).unwrap();
        assert!((pf.comp(0, 1) - (-lambda * x[2] / r3)).abs() < 1e-15);
        assert!((pf.comp(2, 0) - (-lambda * x[1] / r3)).abs() < 1e-15);
        assert!((pf.comp(2, 1) - (lambda * x[0] / r3)).abs() < 1e-15);
    }

    #[test]
    fn force_reduces_to_the_poincare_form_for_k1() {
        let lambda = 1.0;
        let xi = orbit_base(lambda, 1).unwrap();
        let x = vec3(0.0, 0.0, 1.0);
        let v = vec3(1.0, 0.0, 0.0);
        let f = force(&xi, &x, &v).unwrap();
        assert!((f[0] - 0.0).abs() < 1e-15);
        assert!((f[1] - 1.0).abs() < 1e-15);
        assert!((f[2] - 0.0).abs() < 1e-15);

        // General points: force = λ (x × v)/r³.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let (x, v, charge) = random_state(1, -0.8, 0.05, &mut rng).unwrap();
            let f = force(charge.xi(), &x, &v).unwrap();
            let expect = cross(&x, &v).scaled(charge.lambda() / x.norm().powi(3));
            assert!((&f - &expect).norm() < 1e-13 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn force_is_orthogonal_to_position_and_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &k in &[1usize, 2, 3] {
            let (x, v, charge) = random_state(k, 1.5, 0.1, &mut rng).unwrap();
            let f = force(charge.xi(), &x, &v).unwrap();
            let scale = f.norm().max(1.0);
            assert!(f.dot(&x).abs() < 1e-13 * scale * x.norm());
            assert!(f.dot(&v).abs() < 1e-13 * scale * v.norm());
        }
    }

    #[test]
    fn transport_vanishes_for_k1_and_preserves_the_norm() {
        let xi = orbit_base(2.0, 1).unwrap();
        let rate = transport_rate(&xi, &vec3(0.3, 0.2, 0.9), &vec3(1.0, -2.0, 0.5)).unwrap();
        assert_eq!(rate.max_abs(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &k in &[2usize, 3] {
            let (x, v, charge) = random_state(k, 1.5, 0.1, &mut rng).unwrap();
            let rate = transport_rate(charge.xi(), &x, &v).unwrap();
            // d/dt (ξ, ξ) = 2 (ξ, [ξ, 𝔞(v)]) = 0.
            let d_norm = lie_inner(charge.xi(), &rate).unwrap();
            assert!(d_norm.abs() < 1e-13 * (1.0 + rate.max_abs()));
            assert!(rate.max_abs() > 1e-6, "transport should be nontrivial for k >= 2");
        }
    }

    #[test]
    fn chart_guards_trip() {
        assert!(matches!(
            potential(&vec3(0.0, 0.0, 0.0), 1).unwrap_err(),
            GaugeError::ZeroRadius { .. }
        ));
        assert!(matches!(
            potential(&vec3(1e-4, 0.0, -1.0), 1).unwrap_err(),
            GaugeError::StringProximity { .. }
        ));
        assert!(matches!(
            potential(&vec3(1.0, 0.0, 0.0), 2).unwrap_err(),
            GaugeError::DimensionMismatch { .. }
        ));
        let c = string_clearance(&vec3(0.0, 0.0, 1.0)).unwrap();
        assert!((c - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identities_hold_at_seeded_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for &(k, lambda) in &[(1usize, 0.5), (2, 1.5), (3, -0.7)] {
            for _ in 0..5 {
                let (x, v, charge) = random_state(k, lambda, 0.1, &mut rng).unwrap();
                let rep = check_identities(&x, &v, &charge, 1e-5).unwrap();
                assert!(rep.potential_radial < 1e-12, "{rep:?}");
                assert!(rep.field_radial < 1e-12, "{rep:?}");
                assert!(rep.pairing_projector < 1e-12, "{rep:?}");
                assert!(rep.pairing_norm < 1e-12, "{rep:?}");
                assert!(rep.force_norm < 1e-12, "{rep:?}");
                assert!(rep.covariant_derivative < 1e-7, "{rep:?}");
            }
        }
    }

    #[test]
    fn identity_suite_aggregates_and_is_deterministic() {
        let a = identity_suite(2, 1.5, 20, 7, 0.1, 1e-5).unwrap();
        let b = identity_suite(2, 1.5, 20, 7, 0.1, 1e-5).unwrap();
        assert_eq!(a.max_residual(), b.max_residual());
        assert!(a.max_residual() < 1e-6);
    }

    #[test]
    fn zero_charge_pairs_to_zero() {
        let xi = SkewMatrix::zeros(4);
        let x = Vector::new(vec![0.4, -0.2, 0.1, 0.3, 0.8]);
        let v = Vector::new(vec![1.0, 0.0, -1.0, 0.2, 0.0]);
        assert_eq!(paired_field(&xi, &x).unwrap().as_bivector().norm(), 0.0);
        assert_eq!(force(&xi, &x, &v).unwrap().norm(), 0.0);
        assert_eq!(transport_rate(&xi, &x, &v).unwrap().max_abs(), 0.0);
    }
}
