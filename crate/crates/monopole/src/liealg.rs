//! The Lie algebra so(2k) and the adjoint orbit of admissible charges.
//!
//! Generators M_{ab}, a ≠ b, have (a,b)-entry −1 and (b,a)-entry +1; they
//! are orthonormal under the invariant inner product
//! (X, Y) = ½ tr(XᵀY), which on the packed strictly-upper storage is a
//! plain dot product. The charge carried by a particle with pole strength
//! λ lives on the orbit O_λ of
//!
//!   ξ₀ = (1/√k) (|λ| M_{0,1} + … + |λ| M_{2k−4,2k−3} + λ M_{2k−2,2k−1})
//!
//! under conjugation by SO(2k). Membership is characterized by the two
//! invariants ξᵀξ = (λ²/k)·I and Pf(ξ) = Pf(ξ₀); the Pfaffian separates the
//! two components of scaled complex structures that the Gram condition
//! alone cannot tell apart.

use crate::mat::Mat;
use crate::polyvec::pair_index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Largest supported half-dimension; the recursive Pfaffian expansion is
/// (2k−1)!! in cost and stays trivial through 12 × 12.
pub const MAX_K: usize = 6;

/// Default tolerance for validating an explicitly supplied charge matrix.
pub const ORBIT_MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum LieAlgError {
    #[error("matrix size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("skew matrices here are even-sized, got {size}")]
    OddSize { size: usize },
    #[error("generator indices must be distinct and below {size}, got ({a}, {b})")]
    BadGeneratorIndex { a: usize, b: usize, size: usize },
    #[error("k must lie in 1..={MAX_K}, got {k}")]
    KOutOfRange { k: usize },
    #[error("matrix is not on the charge orbit (relative residual {residual:.3e})")]
    OffOrbit { residual: f64 },
    #[error("matrix is not antisymmetric (max deviation {deviation:.3e})")]
    NotSkew { deviation: f64 },
}

/// An element of so(2k); only the strictly upper triangle is stored, so
/// Xᵀ = −X holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        SkewMatrix { n, upper: vec![0.0; n * (n - 1) / 2] }
    }

    /// Rebuilds from packed strictly-upper components in lexicographic
    /// pair order (the layout `packed` returns).
    pub fn from_packed(n: usize, upper: Vec<f64>) -> Self {
        assert_eq!(upper.len(), n * (n - 1) / 2, "packed length mismatch");
        SkewMatrix { n, upper }
    }

    /// Number of rows (equals the number of columns).
    pub fn size(&self) -> usize {
        self.n
    }

    /// Signed entry X_{ij}; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper[pair_index(self.n, i, j)],
            std::cmp::Ordering::Greater => -self.upper[pair_index(self.n, j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal entries of a skew matrix are zero");
        if i < j {
            self.upper[pair_index(self.n, i, j)] = v;
        } else {
            self.upper[pair_index(self.n, j, i)] = -v;
        }
    }

    pub fn packed(&self) -> &[f64] {
        &self.upper
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> SkewMatrix {
        SkewMatrix { n: self.n, upper: self.upper.iter().map(|x| x * s).collect() }
    }

    pub fn add_scaled(&mut self, rhs: &SkewMatrix, s: f64) {
        assert_eq!(self.n, rhs.n, "skew matrix size mismatch");
        for (a, b) in self.upper.iter_mut().zip(&rhs.upper) {
            *a += s * b;
        }
    }

    pub(crate) fn to_dense(&self) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.upper[pair_index(n, i, j)];
                m.set(i, j, v);
                m.set(j, i, -v);
            }
        }
        m
    }

    /// Antisymmetric part (X − Xᵀ)/2 of a dense matrix, repacked.
    pub(crate) fn from_dense(m: &Mat) -> SkewMatrix {
        let n = m.n;
        let mut out = SkewMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                out.upper[pair_index(n, i, j)] = 0.5 * (m.get(i, j) - m.get(j, i));
            }
        }
        out
    }

    /// Dense row-major copy, for callers outside the crate.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

impl std::ops::Add for &SkewMatrix {
    type Output = SkewMatrix;
    fn add(self, rhs: &SkewMatrix) -> SkewMatrix {
        assert_eq!(self.n, rhs.n, "skew matrix size mismatch");
        SkewMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&rhs.upper).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &SkewMatrix {
    type Output = SkewMatrix;
    fn sub(self, rhs: &SkewMatrix) -> SkewMatrix {
        assert_eq!(self.n, rhs.n, "skew matrix size mismatch");
        SkewMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&rhs.upper).map(|(a, b)| a - b).collect(),
        }
    }
}

/// The generator M_{ab} of so(2k): (a,b)-entry −1, (b,a)-entry +1.
pub fn generator(a: usize, b: usize, k: usize) -> Result<SkewMatrix, LieAlgError> {
    check_k(k)?;
    let size = 2 * k;
    if a == b || a >= size || b >= size {
        return Err(LieAlgError::BadGeneratorIndex { a, b, size });
    }
    let mut m = SkewMatrix::zeros(size);
    m.set(a, b, -1.0);
    Ok(m)
}

/// Invariant inner product (X, Y) = ½ tr(XᵀY); generators are orthonormal.
pub fn lie_inner(x: &SkewMatrix, y: &SkewMatrix) -> Result<f64, LieAlgError> {
    if x.n != y.n {
        return Err(LieAlgError::SizeMismatch { expected: x.n, found: y.n });
    }
    Ok(x.upper.iter().zip(&y.upper).map(|(a, b)| a * b).sum())
}

/// Commutator [X, Y] = XY − YX; exactly skew by construction.
pub fn bracket(x: &SkewMatrix, y: &SkewMatrix) -> Result<SkewMatrix, LieAlgError> {
    if x.n != y.n {
        return Err(LieAlgError::SizeMismatch { expected: x.n, found: y.n });
    }
    let c = x.to_dense().matmul(&y.to_dense());
    // (XY)ᵀ = YX for skew X, Y, so XY − YX is the antisymmetric part of XY, doubled.
    let n = x.n;
    let mut out = SkewMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            out.upper[pair_index(n, i, j)] = c.get(i, j) - c.get(j, i);
        }
    }
    Ok(out)
}

fn check_k(k: usize) -> Result<(), LieAlgError> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(LieAlgError::KOutOfRange { k })
    }
}

/// Base point of the charge orbit O_λ: k diagonal 2 × 2 blocks, the first
/// k−1 weighted |λ|/√k and the last weighted λ/√k, so that (ξ₀, ξ₀) = λ².
pub fn orbit_base(lambda: f64, k: usize) -> Result<SkewMatrix, LieAlgError> {
    check_k(k)?;
    let mut m = SkewMatrix::zeros(2 * k);
    let w = lambda.abs() / (k as f64).sqrt();
    for block in 0..k {
        let coef = if block == k - 1 { lambda / (k as f64).sqrt() } else { w };
        m.set(2 * block, 2 * block + 1, -coef);
    }
    Ok(m)
}

/// Pfaffian by recursive expansion along the first remaining row.
/// Pf of the empty matrix is 1; Pf([[0, a], [−a, 0]]) = a.
pub fn pfaffian(x: &SkewMatrix) -> Result<f64, LieAlgError> {
    if x.n % 2 != 0 {
        return Err(LieAlgError::OddSize { size: x.n });
    }
    if x.n > 2 * MAX_K {
        return Err(LieAlgError::KOutOfRange { k: x.n / 2 });
    }
    let d = x.to_dense();
    let idx: Vec<usize> = (0..x.n).collect();
    Ok(pf_rec(&d, &idx))
}

fn pf_rec(d: &Mat, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        2 => d.get(idx[0], idx[1]),
        m => {
            let i0 = idx[0];
            let mut acc = 0.0;
            let mut sign = 1.0;
            for p in 1..m {
                let a = d.get(i0, idx[p]);
                if a != 0.0 {
                    let rest: Vec<usize> = (1..m)
                        .filter(|&q| q != p)
                        .map(|q| idx[q])
                        .collect();
                    acc += sign * a * pf_rec(d, &rest);
                }
                sign = -sign;
            }
            acc
        }
    }
}

/// Checks the two orbit invariants at tolerance `tol` (scaled by
/// max(1, λ²) for the Gram part and max(1, |λ|^k) for the Pfaffian).
/// For λ = 0 the orbit degenerates to the zero matrix.
pub fn orbit_membership(
    xi: &SkewMatrix,
    lambda: f64,
    k: usize,
    tol: f64,
) -> Result<bool, LieAlgError> {
    check_k(k)?;
    if xi.n != 2 * k {
        return Err(LieAlgError::SizeMismatch { expected: 2 * k, found: xi.n });
    }
    Ok(orbit_residual(xi, lambda, k)? <= tol)
}

/// Scaled residual of the orbit invariants; zero exactly on O_λ.
pub fn orbit_residual(xi: &SkewMatrix, lambda: f64, k: usize) -> Result<f64, LieAlgError> {
    check_k(k)?;
    if xi.n != 2 * k {
        return Err(LieAlgError::SizeMismatch { expected: 2 * k, found: xi.n });
    }
    if lambda == 0.0 {
        return Ok(xi.max_abs());
    }
    let d = xi.to_dense();
    let gram = d.transpose().matmul(&d);
    let target = lambda * lambda / k as f64;
    let mut dev: f64 = 0.0;
    for i in 0..xi.n {
        for j in 0..xi.n {
            let want = if i == j { target } else { 0.0 };
            dev = dev.max((gram.get(i, j) - want).abs());
        }
    }
    let gram_residual = dev / 1.0_f64.max(lambda * lambda);
    let pf = pfaffian(xi)?;
    let pf0 = pfaffian(&orbit_base(lambda, k)?)?;
    let pf_residual = (pf - pf0).abs() / 1.0_f64.max(lambda.abs().powi(k as i32));
    Ok(gram_residual.max(pf_residual))
}

/// A validated charge: a point of O_λ ⊂ so(2k).
#[derive(Debug, Clone)]
pub struct OrbitElement {
    xi: SkewMatrix,
    lambda: f64,
    k: usize,
}

impl OrbitElement {
    /// The orbit base point ξ₀.
    pub fn base(lambda: f64, k: usize) -> Result<Self, LieAlgError> {
        Ok(OrbitElement { xi: orbit_base(lambda, k)?, lambda, k })
    }

    /// R ξ₀ Rᵀ for a seeded random rotation R ∈ SO(2k): a Gaussian matrix
    /// is orthonormalized column by column and one column is flipped if the
    /// determinant lands at −1. The draw is reproducible across platforms.
    pub fn random(lambda: f64, k: usize, seed: u64) -> Result<Self, LieAlgError> {
        check_k(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_rotation(2 * k, &mut rng);
        let xi0 = orbit_base(lambda, k)?.to_dense();
        let conj = r.matmul(&xi0).matmul(&r.transpose());
        Ok(OrbitElement { xi: SkewMatrix::from_dense(&conj), lambda, k })
    }

    /// Validates an explicit matrix against the orbit invariants.
    pub fn from_matrix(
        xi: SkewMatrix,
        lambda: f64,
        k: usize,
        tol: f64,
    ) -> Result<Self, LieAlgError> {
        let residual = orbit_residual(&xi, lambda, k)?;
        if residual > tol {
            return Err(LieAlgError::OffOrbit { residual });
        }
        Ok(OrbitElement { xi, lambda, k })
    }

    pub fn xi(&self) -> &SkewMatrix {
        &self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Nearest orbit point for a slightly drifted charge: ξ · (ξᵀξ · k/λ²)^(−1/2),
/// the inverse square root taken by Newton iteration (the argument is near
/// the identity whenever the drift is small). λ = 0 projects to zero.
pub fn project_to_orbit(xi: &SkewMatrix, lambda: f64) -> SkewMatrix {
    let n = xi.n;
    if lambda == 0.0 {
        return SkewMatrix::zeros(n);
    }
    let k = n / 2;
    let d = xi.to_dense();
    let t = d.transpose().matmul(&d).scaled(k as f64 / (lambda * lambda));
    let mut z = Mat::identity(n);
    for _ in 0..5 {
        let tzz = t.matmul(&z.matmul(&z));
        z = z.matmul(&Mat::identity(n).scaled(3.0).sub(&tzz)).scaled(0.5);
    }
    SkewMatrix::from_dense(&d.matmul(&z))
}

/// Column-wise Gram-Schmidt over a Gaussian draw, determinant fixed to +1.
fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let mut m = Mat::zeros(n);
        for v in m.a.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        if let Some(q) = orthonormalize_columns(&m) {
            let mut q = q;
            if q.determinant() < 0.0 {
                for i in 0..n {
                    let v = q.get(i, n - 1);
                    q.set(i, n - 1, -v);
                }
            }
            return q;
        }
        // Degenerate draw (vanishing pivot); take the next one.
    }
}

fn orthonormalize_columns(m: &Mat) -> Option<Mat> {
    let n = m.n;
    let mut q = m.clone();
    for col in 0..n {
        // Two projection passes for orthogonality near machine precision.
        for _ in 0..2 {
            for prev in 0..col {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += q.get(i, col) * q.get(i, prev);
                }
                for i in 0..n {
                    let v = q.get(i, col) - dot * q.get(i, prev);
                    q.set(i, col, v);
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += q.get(i, col) * q.get(i, col);
        }
        let norm = norm.sqrt();
        if norm < 1e-8 {
            return None;
        }
        for i in 0..n {
            let v = q.get(i, col) / norm;
            q.set(i, col, v);
        }
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rand_skew(rng: &mut ChaCha8Rng, n: usize) -> SkewMatrix {
        let mut m = SkewMatrix::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn generator_layout_and_orthonormality() {
        let g = generator(0, 1, 1).unwrap();
        assert_eq!(g.to_rows(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        // All generator pairs of so(6) are orthonormal under lie_inner.
        let k = 3;
        let pairs: Vec<(usize, usize)> = (0..2 * k)
            .flat_map(|a| (a + 1..2 * k).map(move |b| (a, b)))
            .collect();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                let want = if (a, b) == (c, d) { 1.0 } else { 0.0 };
                let got = lie_inner(
                    &generator(a, b, k).unwrap(),
                    &generator(c, d, k).unwrap(),
                )
                .unwrap();
                assert_eq!(got, want);
            }
        }
        // Swapped indices negate: M_{ba} = −M_{ab}.
        let gab = generator(2, 5, 3).unwrap();
        let gba = generator(5, 2, 3).unwrap();
        assert_eq!((&gab + &gba).max_abs(), 0.0);
        assert!(generator(2, 2, 3).is_err());
        assert!(generator(0, 6, 3).is_err());
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = rand_skew(&mut rng, 6);
            let y = rand_skew(&mut rng, 6);
            let z = rand_skew(&mut rng, 6);
            let xy = bracket(&x, &y).unwrap();
            let yx = bracket(&y, &x).unwrap();
            assert!((&xy + &yx).max_abs() < 1e-14);
            // [x,[y,z]] + [y,[z,x]] + [z,[x,y]] = 0.
            let jac = &(&bracket(&x, &bracket(&y, &z).unwrap()).unwrap()
                + &bracket(&y, &bracket(&z, &x).unwrap()).unwrap())
                + &bracket(&z, &xy).unwrap();
            assert!(jac.max_abs() < 1e-13, "jacobi violated: {}", jac.max_abs());
        }
    }

    #[test]
    fn inner_product_is_ad_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let x = rand_skew(&mut rng, 8);
            let y = rand_skew(&mut rng, 8);
            let z = rand_skew(&mut rng, 8);
            let lhs = lie_inner(&bracket(&z, &x).unwrap(), &y).unwrap();
            let rhs = -lie_inner(&x, &bracket(&z, &y).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn pfaffian_base_cases_and_frozen_values() {
        let mut m = SkewMatrix::zeros(2);
        m.set(0, 1, 3.5);
        assert_eq!(pfaffian(&m).unwrap(), 3.5);
        // Pf(M_{01}) = −1 for the 2 × 2 generator.
        assert_eq!(pfaffian(&generator(0, 1, 1).unwrap()).unwrap(), -1.0);
        // Pf of the k = 2, λ = 1 base point is 1/2.
        let xi0 = orbit_base(1.0, 2).unwrap();
        assert!((pfaffian(&xi0).unwrap() - 0.5).abs() < 1e-15);
        let odd = SkewMatrix::zeros(3);
        assert_eq!(pfaffian(&odd).unwrap_err(), LieAlgError::OddSize { size: 3 });
    }

    #[test]
    fn pfaffian_squares_to_the_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = rand_skew(&mut rng, 6);
            let pf = pfaffian(&x).unwrap();
            let dense = x.to_dense();
            let det =
                nalgebra::DMatrix::from_row_slice(6, 6, &dense.a).determinant();
            let scale = 1.0_f64.max(det.abs());
            assert!(
                (pf * pf - det).abs() < 1e-12 * scale,
                "pf² = {} vs det = {}",
                pf * pf,
                det
            );
        }
    }

    #[test]
    fn pfaffian_transforms_by_the_determinant_of_the_conjugator() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = rand_skew(&mut rng, 6);
        let pf = pfaffian(&x).unwrap();
        let r = random_rotation(6, &mut rng);
        let conj = SkewMatrix::from_dense(&r.matmul(&x.to_dense()).matmul(&r.transpose()));
        assert!((pfaffian(&conj).unwrap() - pf).abs() < 1e-12 * (1.0 + pf.abs()));
        // Conjugating by a reflection (det −1) flips the sign.
        let mut refl = r.clone();
        for i in 0..6 {
            let v = refl.get(i, 0);
            refl.set(i, 0, -v);
        }
        let conj =
            SkewMatrix::from_dense(&refl.matmul(&x.to_dense()).matmul(&refl.transpose()));
        assert!((pfaffian(&conj).unwrap() + pf).abs() < 1e-12 * (1.0 + pf.abs()));
    }

    #[test]
    fn orbit_base_norm_and_membership() {
        for k in 1..=3 {
            for &lambda in &[0.5, 1.5, -0.7] {
                let xi0 = orbit_base(lambda, k).unwrap();
                let norm_sq = lie_inner(&xi0, &xi0).unwrap();
                assert!((norm_sq - lambda * lambda).abs() < 1e-14);
                assert!(orbit_membership(&xi0, lambda, k, 1e-12).unwrap());
                // Gram invariant: ξ₀ᵀ ξ₀ = (λ²/k) I.
                let gram = xi0.to_dense().transpose().matmul(&xi0.to_dense());
                for i in 0..2 * k {
                    for j in 0..2 * k {
                        let want = if i == j { lambda * lambda / k as f64 } else { 0.0 };
                        assert!((gram.get(i, j) - want).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn pfaffian_separates_the_orbit_from_its_mirror() {
        // ξ₀ with the last block negated satisfies the Gram invariant but
        // lies on the opposite component; membership must reject it.
        let lambda = 1.5;
        let k = 2;
        let mut mirror = orbit_base(lambda, k).unwrap();
        mirror.set(2, 3, -mirror.get(2, 3));
        let gram = mirror.to_dense().transpose().matmul(&mirror.to_dense());
        for i in 0..4 {
            assert!((gram.get(i, i) - lambda * lambda / 2.0).abs() < 1e-14);
        }
        assert!(!orbit_membership(&mirror, lambda, k, 1e-8).unwrap());
    }

    #[test]
    fn random_orbit_elements_are_on_orbit_and_reproducible() {
        for k in 1..=3 {
            let lambda = 1.2;
            let a = OrbitElement::random(lambda, k, 42).unwrap();
            let b = OrbitElement::random(lambda, k, 42).unwrap();
            assert_eq!(a.xi(), b.xi());
            assert!(orbit_membership(a.xi(), lambda, k, 1e-10).unwrap());
            assert!(
                (lie_inner(a.xi(), a.xi()).unwrap() - lambda * lambda).abs() < 1e-12
            );
            if k > 1 {
                let c = OrbitElement::random(lambda, k, 43).unwrap();
                assert!((c.xi() - a.xi()).max_abs() > 1e-3);
            }
        }
    }

    #[test]
    fn explicit_matrices_are_validated() {
        let k = 2;
        let lambda = 1.0;
        let xi = orbit_base(lambda, k).unwrap();
        assert!(OrbitElement::from_matrix(xi.clone(), lambda, k, 1e-10).is_ok());
        let mut off = xi;
        off.set(0, 1, off.get(0, 1) + 1e-3);
        assert!(matches!(
            OrbitElement::from_matrix(off, lambda, k, 1e-8).unwrap_err(),
            LieAlgError::OffOrbit { .. }
        ));
        // λ = 0 admits only the zero matrix.
        assert!(orbit_membership(&SkewMatrix::zeros(4), 0.0, 2, 1e-12).unwrap());
        assert!(!orbit_membership(&orbit_base(1.0, 2).unwrap(), 0.0, 2, 1e-8).unwrap());
    }

    #[test]
    fn projection_restores_a_drifted_charge() {
        let lambda = 1.5;
        let k = 3;
        let elem = OrbitElement::random(lambda, k, 9).unwrap();
        let mut drifted = elem.xi().clone();
        for i in 0..6 {
            for j in i + 1..6 {
                drifted.set(i, j, drifted.get(i, j) * (1.0 + 1e-6 * ((i + j) as f64)));
            }
        }
        assert!(orbit_residual(&drifted, lambda, k).unwrap() > 1e-7);
        let fixed = project_to_orbit(&drifted, lambda);
        assert!(orbit_residual(&fixed, lambda, k).unwrap() < 1e-13);
        // The projection is a small correction, not a jump.
        assert!((&fixed - &drifted).max_abs() < 1e-4);
    }
}
