//! Exterior algebra over ℝⁿ in grades one to three.
//!
//! Coordinates are Euclidean and orthonormal, so the inner product of two
//! p-vectors (the Gram determinant det[(xᵢ, yⱼ)] on decomposables, extended
//! bilinearly) reduces to the dot product of packed component arrays.
//! `contract` is the interior product u ⌟ X, the metric adjoint of wedging
//! by u on the left: (u ∧ Y, X) = (Y, u ⌟ X).
//!
//! `BiVector` stores the strictly upper triangle of its component table and
//! `TriVector` the components over strictly increasing triples, so
//! antisymmetry is exact by construction. A `Frame3` is an orthonormal,
//! oriented basis of a 3-dimensional subspace; it supports projection of
//! vectors and 2-vectors into the subspace and the Hodge star taken inside
//! it (⋆(b₁∧b₂) = b₃ and cyclic, with orientation b₁∧b₂∧b₃).

use thiserror::Error;

/// Largest allowed deviation of a `Frame3` from exact orthonormality.
pub const FRAME_ORTHONORMAL_TOL: f64 = 1e-12;
/// Relative residual above which an input is rejected as lying outside the
/// subspace it must belong to (Hodge star and its inverse).
pub const SUBSPACE_RESIDUAL_TOL: f64 = 1e-10;
/// Pivot cutoff, relative to the largest pivot, below which Gram-Schmidt
/// treats a candidate direction as dependent.
pub const RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum PolyVecError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the zero 3-vector spans no subspace")]
    ZeroTriVector,
    #[error("3-vector is not decomposable (contraction span has rank {rank})")]
    NotDecomposable { rank: usize },
    #[error("input lies outside the frame's subspace (relative residual {residual:.3e})")]
    NotInSubspace { residual: f64 },
    #[error("frame vectors are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },
}

fn check_dim(expected: usize, found: usize) -> Result<(), PolyVecError> {
    if expected == found {
        Ok(())
    } else {
        Err(PolyVecError::DimensionMismatch { expected, found })
    }
}

/// Linear index of the pair (j, k), j < k, in lexicographic order.
#[inline]
pub(crate) fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * (2 * n - j - 1) / 2 + (k - j - 1)
}

/// Linear index of the triple (j, k, l), j < k < l, in lexicographic order.
#[inline]
fn triple_index(n: usize, j: usize, k: usize, l: usize) -> usize {
    debug_assert!(j < k && k < l && l < n);
    let mut idx = 0;
    for a in 0..j {
        idx += (n - 1 - a) * (n - 2 - a) / 2;
    }
    idx + pair_index(n - j - 1, k - j - 1, l - j - 1)
}

/// A grade-1 element of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    c: Vec<f64>,
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector { c: components }
    }

    pub fn zeros(n: usize) -> Self {
        Vector { c: vec![0.0; n] }
    }

    /// The i-th standard basis vector of ℝⁿ.
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(i < n, "basis index out of range");
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        Vector { c }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn dot(&self, rhs: &Vector) -> f64 {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        self.c.iter().zip(&rhs.c).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector { c: self.c.iter().map(|x| x * s).collect() }
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.c[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.c[i]
    }
}

impl std::ops::Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

/// A grade-2 element of ∧²ℝⁿ; component B_{jk} for j < k is stored, the
/// rest follow by antisymmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct BiVector {
    n: usize,
    c: Vec<f64>,
}

impl BiVector {
    pub fn zeros(n: usize) -> Self {
        BiVector { n, c: vec![0.0; n * (n - 1) / 2] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Signed component B_{jk} for any j ≠ k; zero when j = k.
    pub fn comp(&self, j: usize, k: usize) -> f64 {
        match j.cmp(&k) {
            std::cmp::Ordering::Less => self.c[pair_index(self.n, j, k)],
            std::cmp::Ordering::Greater => -self.c[pair_index(self.n, k, j)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        assert!(j != k, "diagonal bivector components are identically zero");
        if j < k {
            self.c[pair_index(self.n, j, k)] = v;
        } else {
            self.c[pair_index(self.n, k, j)] = -v;
        }
    }

    /// Packed strictly-upper components in lexicographic pair order.
    pub fn packed(&self) -> &[f64] {
        &self.c
    }

    /// Iterates ((j, k), B_{jk}) over strictly increasing pairs.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |j| (j + 1..n).map(move |k| (j, k)))
            .zip(self.c.iter().copied())
            .map(|(jk, v)| (jk, v))
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> BiVector {
        BiVector { n: self.n, c: self.c.iter().map(|x| x * s).collect() }
    }
}

impl std::ops::Add for &BiVector {
    type Output = BiVector;
    fn add(self, rhs: &BiVector) -> BiVector {
        assert_eq!(self.n, rhs.n, "bivector dimension mismatch");
        BiVector { n: self.n, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for &BiVector {
    type Output = BiVector;
    fn sub(self, rhs: &BiVector) -> BiVector {
        assert_eq!(self.n, rhs.n, "bivector dimension mismatch");
        BiVector { n: self.n, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

/// A grade-3 element of ∧³ℝⁿ; component T_{jkl} for j < k < l is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TriVector {
    n: usize,
    c: Vec<f64>,
}

impl TriVector {
    pub fn zeros(n: usize) -> Self {
        TriVector { n, c: vec![0.0; n * (n - 1) * (n - 2) / 6] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Signed component T_{jkl} for any index triple; zero on repeats.
    pub fn comp(&self, j: usize, k: usize, l: usize) -> f64 {
        let (mut a, mut b, mut c) = (j, k, l);
        let mut sign = 1.0;
        // Three-element sort network; each swap flips the sign.
        if a > b {
            std::mem::swap(&mut a, &mut b);
            sign = -sign;
        }
        if b > c {
            std::mem::swap(&mut b, &mut c);
            sign = -sign;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
            sign = -sign;
        }
        if a == b || b == c {
            return 0.0;
        }
        sign * self.c[triple_index(self.n, a, b, c)]
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> TriVector {
        TriVector { n: self.n, c: self.c.iter().map(|x| x * s).collect() }
    }

    /// Iterates ((j, k, l), T_{jkl}) over strictly increasing triples.
    pub fn triples(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |j| {
                (j + 1..n).flat_map(move |k| (k + 1..n).map(move |l| (j, k, l)))
            })
            .zip(self.c.iter().copied())
            .map(|(jkl, v)| (jkl, v))
    }
}

impl std::ops::Add for &TriVector {
    type Output = TriVector;
    fn add(self, rhs: &TriVector) -> TriVector {
        assert_eq!(self.n, rhs.n, "trivector dimension mismatch");
        TriVector { n: self.n, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for &TriVector {
    type Output = TriVector;
    fn sub(self, rhs: &TriVector) -> TriVector {
        assert_eq!(self.n, rhs.n, "trivector dimension mismatch");
        TriVector { n: self.n, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

/// Left wedge by a vector: `u.wedge(&v)` is u ∧ v, `u.wedge(&B)` is u ∧ B.
pub trait Wedge<Rhs> {
    type Output;
    fn wedge(&self, rhs: &Rhs) -> Result<Self::Output, PolyVecError>;
}

impl Wedge<Vector> for Vector {
    type Output = BiVector;
    fn wedge(&self, rhs: &Vector) -> Result<BiVector, PolyVecError> {
        check_dim(self.dim(), rhs.dim())?;
        let n = self.dim();
        let mut out = BiVector::zeros(n);
        let mut idx = 0;
        for j in 0..n {
            for k in j + 1..n {
                out.c[idx] = self.c[j] * rhs.c[k] - self.c[k] * rhs.c[j];
                idx += 1;
            }
        }
        Ok(out)
    }
}

impl Wedge<BiVector> for Vector {
    type Output = TriVector;
    fn wedge(&self, rhs: &BiVector) -> Result<TriVector, PolyVecError> {
        check_dim(self.dim(), rhs.dim())?;
        let n = self.dim();
        let mut out = TriVector::zeros(n);
        let mut idx = 0;
        for j in 0..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    // Alternating sum of u_j B_kl over cyclic rotations of (j, k, l).
                    out.c[idx] = self.c[j] * rhs.comp(k, l) + self.c[k] * rhs.comp(l, j)
                        + self.c[l] * rhs.comp(j, k);
                    idx += 1;
                }
            }
        }
        Ok(out)
    }
}

/// Inner product of two elements of equal grade.
pub trait Inner {
    fn inner(&self, rhs: &Self) -> Result<f64, PolyVecError>;
}

impl Inner for Vector {
    fn inner(&self, rhs: &Vector) -> Result<f64, PolyVecError> {
        check_dim(self.dim(), rhs.dim())?;
        Ok(self.dot(rhs))
    }
}

impl Inner for BiVector {
    fn inner(&self, rhs: &BiVector) -> Result<f64, PolyVecError> {
        check_dim(self.n, rhs.n)?;
        Ok(self.c.iter().zip(&rhs.c).map(|(a, b)| a * b).sum())
    }
}

impl Inner for TriVector {
    fn inner(&self, rhs: &TriVector) -> Result<f64, PolyVecError> {
        check_dim(self.n, rhs.n)?;
        Ok(self.c.iter().zip(&rhs.c).map(|(a, b)| a * b).sum())
    }
}

/// Interior product u ⌟ X, lowering the grade of X by one.
pub trait Contract<Rhs> {
    type Output;
    fn contract(&self, rhs: &Rhs) -> Result<Self::Output, PolyVecError>;
}

impl Contract<BiVector> for Vector {
    type Output = Vector;
    /// (u ⌟ B)_k = Σ_j u_j B_{jk}.
    fn contract(&self, rhs: &BiVector) -> Result<Vector, PolyVecError> {
        check_dim(self.dim(), rhs.dim())?;
        let n = self.dim();
        let mut out = Vector::zeros(n);
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                if j != k {
                    s += self.c[j] * rhs.comp(j, k);
                }
            }
            out.c[k] = s;
        }
        Ok(out)
    }
}

impl Contract<TriVector> for Vector {
    type Output = BiVector;
    /// (u ⌟ T)_{jk} = Σ_i u_i T_{ijk}.
    fn contract(&self, rhs: &TriVector) -> Result<BiVector, PolyVecError> {
        check_dim(self.dim(), rhs.dim())?;
        let n = self.dim();
        let mut out = BiVector::zeros(n);
        let mut idx = 0;
        for j in 0..n {
            for k in j + 1..n {
                let mut s = 0.0;
                for i in 0..n {
                    if i != j && i != k {
                        s += self.c[i] * rhs.comp(i, j, k);
                    }
                }
                out.c[idx] = s;
                idx += 1;
            }
        }
        Ok(out)
    }
}

/// An orthonormal oriented basis (b₁, b₂, b₃) of a 3-dimensional subspace.
#[derive(Debug, Clone)]
pub struct Frame3 {
    b: [Vector; 3],
}

impl Frame3 {
    /// Builds a frame, rejecting bases that are not orthonormal to within
    /// [`FRAME_ORTHONORMAL_TOL`].
    pub fn new(b1: Vector, b2: Vector, b3: Vector) -> Result<Self, PolyVecError> {
        check_dim(b1.dim(), b2.dim())?;
        check_dim(b1.dim(), b3.dim())?;
        let b = [b1, b2, b3];
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((b[i].dot(&b[j]) - target).abs());
            }
        }
        if dev > FRAME_ORTHONORMAL_TOL {
            return Err(PolyVecError::NotOrthonormal { deviation: dev });
        }
        Ok(Frame3 { b })
    }

    pub fn dim(&self) -> usize {
        self.b[0].dim()
    }

    pub fn basis(&self) -> &[Vector; 3] {
        &self.b
    }

    /// The unit 3-vector b₁ ∧ b₂ ∧ b₃ fixing the frame's orientation.
    pub fn orientation(&self) -> TriVector {
        let b23 = self.b[1].wedge(&self.b[2]).expect("frame dims agree");
        self.b[0].wedge(&b23).expect("frame dims agree")
    }

    /// Orthogonal projection of a vector onto the spanned subspace.
    pub fn project_vector(&self, v: &Vector) -> Result<Vector, PolyVecError> {
        check_dim(self.dim(), v.dim())?;
        let mut out = Vector::zeros(v.dim());
        for b in &self.b {
            let c = v.dot(b);
            out = &out + &b.scaled(c);
        }
        Ok(out)
    }

    /// Coefficients of a vector in the frame basis.
    pub fn coords(&self, v: &Vector) -> Result<[f64; 3], PolyVecError> {
        check_dim(self.dim(), v.dim())?;
        Ok([v.dot(&self.b[0]), v.dot(&self.b[1]), v.dot(&self.b[2])])
    }
}

/// Orthonormal oriented frame of the subspace [T] spanned by a decomposable
/// 3-vector T, oriented so that (b₁ ∧ b₂ ∧ b₃, T) > 0.
///
/// [T] is recovered as the span of the double contractions
/// e_i ⌟ (e_j ⌟ T); the frame comes from pivoted Gram-Schmidt over that
/// spanning set. Exactly three pivots survive iff T is decomposable.
pub fn subspace_frame(t: &TriVector) -> Result<Frame3, PolyVecError> {
    let n = t.dim();
    let t_norm = t.norm();
    if t_norm == 0.0 {
        return Err(PolyVecError::ZeroTriVector);
    }

    // Candidate spanning vectors w_b = T_{ijb}, one per index pair i < j.
    let mut cands: Vec<Vector> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut w = Vector::zeros(n);
            for b in 0..n {
                w.c[b] = t.comp(i, j, b);
            }
            cands.push(w);
        }
    }

    let pivot0 = cands.iter().map(Vector::norm).fold(0.0, f64::max);
    let mut basis: Vec<Vector> = Vec::new();
    loop {
        let (best_idx, best_norm) = cands
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.norm()))
            .fold((0, 0.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if best_norm <= RANK_CUTOFF * pivot0 {
            break;
        }
        let q = cands[best_idx].scaled(1.0 / best_norm);
        for w in &mut cands {
            // Two orthogonalization passes keep the residuals near machine precision.
            for _ in 0..2 {
                let c = w.dot(&q);
                *w = &*w - &q.scaled(c);
            }
        }
        basis.push(q);
        if basis.len() > 3 {
            break;
        }
    }
    if basis.len() != 3 {
        return Err(PolyVecError::NotDecomposable { rank: basis.len() });
    }

    let mut frame = Frame3::new(
        basis[0].clone(),
        basis[1].clone(),
        basis[2].clone(),
    )?;
    let s = frame.orientation().inner(t)?;
    // For decomposable T the projection onto the frame's orientation line
    // carries the whole norm; a deficit means T was not decomposable even
    // though the contraction span degenerated to rank 3.
    let deficit = ((t_norm * t_norm - s * s).max(0.0)).sqrt() / t_norm;
    if deficit > 1e-6 {
        return Err(PolyVecError::NotDecomposable { rank: 3 });
    }
    if s < 0.0 {
        frame.b.swap(0, 1);
    }
    Ok(frame)
}

/// Orthogonal projection of a 2-vector onto ∧²[V] for the subspace carried
/// by `frame`.
pub fn project_bivector(b: &BiVector, frame: &Frame3) -> Result<BiVector, PolyVecError> {
    check_dim(frame.dim(), b.dim())?;
    let mut out = BiVector::zeros(b.dim());
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let coef = frame_coef(b, frame, i, j);
        let basis_bv = frame.b[i].wedge(&frame.b[j])?;
        out = &out + &basis_bv.scaled(coef);
    }
    Ok(out)
}

/// Coefficient of B against the basis 2-vector bᵢ ∧ bⱼ, i.e. bᵢᵀ B bⱼ.
fn frame_coef(b: &BiVector, frame: &Frame3, i: usize, j: usize) -> f64 {
    let n = b.dim();
    let mut coef = 0.0;
    for a in 0..n {
        for c in 0..n {
            if a != c {
                coef += frame.b[i].c[a] * b.comp(a, c) * frame.b[j].c[c];
            }
        }
    }
    coef
}

/// Hodge star inside the frame's 3-dimensional subspace, taking 2-vectors
/// in ∧²[V] to vectors in [V]: ⋆(b₁∧b₂) = b₃, ⋆(b₂∧b₃) = b₁, ⋆(b₃∧b₁) = b₂.
///
/// Rejects inputs whose projection residual exceeds
/// [`SUBSPACE_RESIDUAL_TOL`] relative to |B|.
pub fn hodge_star(b: &BiVector, frame: &Frame3) -> Result<Vector, PolyVecError> {
    let p = project_bivector(b, frame)?;
    let b_norm = b.norm();
    if b_norm > 0.0 {
        let residual = (b - &p).norm() / b_norm;
        if residual > SUBSPACE_RESIDUAL_TOL {
            return Err(PolyVecError::NotInSubspace { residual });
        }
    }
    Ok(star_in_frame(&p, frame))
}

fn star_in_frame(p: &BiVector, frame: &Frame3) -> Vector {
    let c12 = frame_coef(p, frame, 0, 1);
    let c13 = frame_coef(p, frame, 0, 2);
    let c23 = frame_coef(p, frame, 1, 2);
    // ⋆(b1∧b2) = b3, ⋆(b2∧b3) = b1, ⋆(b3∧b1) = b2.
    let mut out = frame.b[2].scaled(c12);
    out = &out + &frame.b[0].scaled(c23);
    out = &out + &frame.b[1].scaled(-c13);
    out
}

/// Inverse Hodge star inside the frame's subspace, taking vectors in [V]
/// to 2-vectors in ∧²[V]: ⋆⁻¹(b₃) = b₁∧b₂ and cyclic.
pub fn star_inv(v: &Vector, frame: &Frame3) -> Result<BiVector, PolyVecError> {
    let p = frame.project_vector(v)?;
    let v_norm = v.norm();
    if v_norm > 0.0 {
        let residual = (v - &p).norm() / v_norm;
        if residual > SUBSPACE_RESIDUAL_TOL {
            return Err(PolyVecError::NotInSubspace { residual });
        }
    }
    let [a1, a2, a3] = frame.coords(&p)?;
    let b23 = frame.b[1].wedge(&frame.b[2])?;
    let b31 = frame.b[2].wedge(&frame.b[0])?;
    let b12 = frame.b[0].wedge(&frame.b[1])?;
    Ok(&(&b23.scaled(a1) + &b31.scaled(a2)) + &b12.scaled(a3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vector {
        Vector::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    /// Gram-determinant oracle for the inner product of decomposable
    /// 2-vectors: (u∧v, w∧x) = det [[u·w, u·x], [v·w, v·x]].
    fn gram2(u: &Vector, v: &Vector, w: &Vector, x: &Vector) -> f64 {
        u.dot(w) * v.dot(x) - u.dot(x) * v.dot(w)
    }

    /// Gram-determinant oracle for decomposable 3-vectors.
    fn gram3(a: [&Vector; 3], b: [&Vector; 3]) -> f64 {
        let g = |i: usize, j: usize| a[i].dot(b[j]);
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    fn close(a: f64, b: f64, tol: f64) {
        let scale = 1.0_f64.max(a.abs()).max(b.abs());
        assert!(
            (a - b).abs() <= tol * scale,
            "expected {a} ~ {b} within {tol} (scale {scale})"
        );
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let e0 = Vector::basis(3, 0);
        let e1 = Vector::basis(3, 1);
        let b = e0.wedge(&e1).unwrap();
        assert_eq!(b.comp(0, 1), 1.0);
        assert_eq!(b.comp(1, 0), -1.0);
        assert_eq!(b.comp(0, 2), 0.0);
        assert_eq!(b.norm(), 1.0);
    }

    #[test]
    fn contract_is_directional_slice() {
        // (e0 ⌟ (e0∧e1)) = e1.
        let e0 = Vector::basis(3, 0);
        let e1 = Vector::basis(3, 1);
        let b = e0.wedge(&e1).unwrap();
        let w = e0.contract(&b).unwrap();
        assert_eq!(w.as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = Vector::zeros(5);
        let v = Vector::zeros(7);
        assert_eq!(
            u.wedge(&v).unwrap_err(),
            PolyVecError::DimensionMismatch { expected: 5, found: 7 }
        );
        let b = BiVector::zeros(7);
        assert!(matches!(
            u.contract(&b),
            Err(PolyVecError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inner_matches_gram_determinants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[5usize, 7] {
            for _ in 0..100 {
                let (u, v, w, x) = (
                    rand_vec(&mut rng, n),
                    rand_vec(&mut rng, n),
                    rand_vec(&mut rng, n),
                    rand_vec(&mut rng, n),
                );
                let lhs = u.wedge(&v).unwrap().inner(&w.wedge(&x).unwrap()).unwrap();
                close(lhs, gram2(&u, &v, &w, &x), 1e-12);

                let y = rand_vec(&mut rng, n);
                let z = rand_vec(&mut rng, n);
                let t1 = u.wedge(&v.wedge(&w).unwrap()).unwrap();
                let t2 = x.wedge(&y.wedge(&z).unwrap()).unwrap();
                close(
                    t1.inner(&t2).unwrap(),
                    gram3([&u, &v, &w], [&x, &y, &z]),
                    1e-12,
                );
            }
        }
    }

    #[test]
    fn lagrange_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &n in &[3usize, 5, 7] {
            for _ in 0..100 {
                let u = rand_vec(&mut rng, n);
                let v = rand_vec(&mut rng, n);
                let lhs = u.wedge(&v).unwrap().norm_sq();
                let rhs = u.norm_sq() * v.norm_sq() - u.dot(&v).powi(2);
                close(lhs, rhs, 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn contraction_is_adjoint_of_wedge(
            n in prop_oneof![Just(5usize), Just(7)],
            seed in 0u64..1u64 << 48,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = rand_vec(&mut rng, n);
            let y = rand_vec(&mut rng, n);
            let w1 = rand_vec(&mut rng, n);
            let w2 = rand_vec(&mut rng, n);
            let x2 = w1.wedge(&w2).unwrap();
            // Grade 2: (u ∧ y, X) = (y, u ⌟ X).
            let lhs = u.wedge(&y).unwrap().inner(&x2).unwrap();
            let rhs = y.inner(&u.contract(&x2).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));

            // Grade 3: (u ∧ Y, T) = (Y, u ⌟ T) for bivector Y.
            let y2 = rand_vec(&mut rng, n).wedge(&rand_vec(&mut rng, n)).unwrap();
            let w3 = rand_vec(&mut rng, n);
            let t = w1.wedge(&w2.wedge(&w3).unwrap()).unwrap();
            let lhs3 = u.wedge(&y2).unwrap().inner(&t).unwrap();
            let rhs3 = y2.inner(&u.contract(&t).unwrap()).unwrap();
            prop_assert!((lhs3 - rhs3).abs() <= 1e-12 * (1.0 + lhs3.abs()));
        }

        #[test]
        fn projector_is_idempotent_and_symmetric(
            n in prop_oneof![Just(5usize), Just(7)],
            seed in 0u64..1u64 << 48,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b, c) = (
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
            );
            let t = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assume!(t.norm() > 1e-3);
            let frame = subspace_frame(&t).unwrap();

            let x = rand_vec(&mut rng, n).wedge(&rand_vec(&mut rng, n)).unwrap();
            let y = rand_vec(&mut rng, n).wedge(&rand_vec(&mut rng, n)).unwrap();
            let px = project_bivector(&x, &frame).unwrap();
            let ppx = project_bivector(&px, &frame).unwrap();
            prop_assert!((&ppx - &px).norm() <= 1e-12 * (1.0 + px.norm()));
            let s1 = px.inner(&y).unwrap();
            let s2 = x.inner(&project_bivector(&y, &frame).unwrap()).unwrap();
            prop_assert!((s1 - s2).abs() <= 1e-12 * (1.0 + s1.abs()));
        }

        #[test]
        fn frame_spans_the_factors_and_orients_with_t(
            n in prop_oneof![Just(5usize), Just(7)],
            seed in 0u64..1u64 << 48,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b, c) = (
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
            );
            let t = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assume!(t.norm() > 1e-3);
            let frame = subspace_frame(&t).unwrap();
            for v in [&a, &b, &c] {
                let p = frame.project_vector(v).unwrap();
                prop_assert!((v - &p).norm() <= 1e-8 * v.norm());
            }
            let s = frame.orientation().inner(&t).unwrap();
            prop_assert!(s > 0.0);
            prop_assert!((s - t.norm()).abs() <= 1e-8 * t.norm());
        }
    }

    #[test]
    fn frame_is_scale_and_shuffle_invariant_as_a_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 7;
        let (a, b, c) = (
            rand_vec(&mut rng, n),
            rand_vec(&mut rng, n),
            rand_vec(&mut rng, n),
        );
        let t = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        let f1 = subspace_frame(&t).unwrap();
        let f2 = subspace_frame(&t.scaled(-3.25)).unwrap();
        // Same subspace: each basis vector of one projects onto the other with no loss.
        for v in f2.basis() {
            let p = f1.project_vector(v).unwrap();
            assert!((v - &p).norm() < 1e-10);
        }
        // Opposite scaling sign flips the orientation relative to t.
        assert!(f1.orientation().inner(&t).unwrap() > 0.0);
        assert!(f2.orientation().inner(&t).unwrap() < 0.0);
    }

    #[test]
    fn zero_and_nondecomposable_inputs_are_rejected() {
        assert_eq!(
            subspace_frame(&TriVector::zeros(7)).unwrap_err(),
            PolyVecError::ZeroTriVector
        );
        // e0∧e1∧e2 + e0∧e3∧e4 has a 5-dimensional contraction span.
        let e: Vec<Vector> = (0..7).map(|i| Vector::basis(7, i)).collect();
        let t1 = e[0].wedge(&e[1].wedge(&e[2]).unwrap()).unwrap();
        let t2 = e[0].wedge(&e[3].wedge(&e[4]).unwrap()).unwrap();
        let t = &t1 + &t2;
        assert!(matches!(
            subspace_frame(&t).unwrap_err(),
            PolyVecError::NotDecomposable { .. }
        ));
        // Fully disjoint sum e0∧e1∧e2 + e3∧e4∧e5 must be rejected as well.
        let t3 = e[3].wedge(&e[4].wedge(&e[5]).unwrap()).unwrap();
        let t = &t1 + &t3;
        assert!(matches!(
            subspace_frame(&t).unwrap_err(),
            PolyVecError::NotDecomposable { .. }
        ));
    }

    #[test]
    fn hodge_star_cycles_the_frame() {
        let e: Vec<Vector> = (0..3).map(|i| Vector::basis(3, i)).collect();
        let frame = Frame3::new(e[0].clone(), e[1].clone(), e[2].clone()).unwrap();
        let b01 = e[0].wedge(&e[1]).unwrap();
        assert_eq!(hodge_star(&b01, &frame).unwrap().as_slice(), &[0.0, 0.0, 1.0]);
        let b12 = e[1].wedge(&e[2]).unwrap();
        assert_eq!(hodge_star(&b12, &frame).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        let b20 = e[2].wedge(&e[0]).unwrap();
        assert_eq!(hodge_star(&b20, &frame).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn hodge_star_is_an_isometry_with_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 7;
        for _ in 0..50 {
            let (a, b, c) = (
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
                rand_vec(&mut rng, n),
            );
            let t = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            if t.norm() < 1e-3 {
                continue;
            }
            let frame = subspace_frame(&t).unwrap();
            // A random 2-vector inside ∧²[V].
            let raw = rand_vec(&mut rng, n).wedge(&rand_vec(&mut rng, n)).unwrap();
            let x = project_bivector(&raw, &frame).unwrap();
            let star = hodge_star(&x, &frame).unwrap();
            close(star.norm(), x.norm(), 1e-12);
            let back = star_inv(&star, &frame).unwrap();
            assert!((&back - &x).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn hodge_star_rejects_out_of_subspace_input() {
        let e: Vec<Vector> = (0..7).map(|i| Vector::basis(7, i)).collect();
        let t = e[0].wedge(&e[1].wedge(&e[2]).unwrap()).unwrap();
        let frame = subspace_frame(&t).unwrap();
        let outside = e[3].wedge(&e[4]).unwrap();
        assert!(matches!(
            hodge_star(&outside, &frame).unwrap_err(),
            PolyVecError::NotInSubspace { .. }
        ));
        assert!(matches!(
            star_inv(&e[5], &frame).unwrap_err(),
            PolyVecError::NotInSubspace { .. }
        ));
    }

    #[test]
    fn signed_component_accessors_respect_permutation_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 5;
        let (a, b, c) = (
            rand_vec(&mut rng, n),
            rand_vec(&mut rng, n),
            rand_vec(&mut rng, n),
        );
        let t = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        assert_eq!(t.comp(2, 1, 0), -t.comp(0, 1, 2));
        assert_eq!(t.comp(1, 2, 0), t.comp(0, 1, 2));
        assert_eq!(t.comp(1, 1, 2), 0.0);
        let bv = a.wedge(&b).unwrap();
        assert_eq!(bv.comp(3, 2), -bv.comp(2, 3));
        assert_eq!(bv.comp(4, 4), 0.0);
    }
}
