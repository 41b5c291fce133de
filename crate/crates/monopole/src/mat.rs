//! Dense square-matrix helpers for the small (2k × 2k, k ≤ 6) matrices the
//! Lie-algebra layer works with. Row-major storage, no allocation tricks.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let s = self.a[i * n + l];
                if s == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += s * rhs.a[l * n + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j];
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        Mat {
            n: self.n,
            a: self.a.iter().zip(&rhs.a).map(|(x, y)| x - y).collect(),
        }
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut lu = self.a.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            let mut best = lu[col * n + col].abs();
            for row in col + 1..n {
                let v = lu[row * n + col].abs();
                if v > best {
                    best = v;
                    piv = row;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    lu.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = lu[col * n + col];
            det *= d;
            for row in col + 1..n {
                let f = lu[row * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    lu[row * n + j] -= f * lu[col * n + j];
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_against_hand_product() {
        let mut a = Mat::zeros(2);
        a.a = vec![1.0, 2.0, 3.0, 4.0];
        let mut b = Mat::zeros(2);
        b.a = vec![5.0, 6.0, 7.0, 8.0];
        let c = a.matmul(&b);
        assert_eq!(c.a, vec![19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut m = Mat::zeros(3);
        m.a = vec![2.0, -1.0, 0.0, 1.0, 3.0, 2.0, 0.5, 0.0, 1.0];
        // det = 2(3*1-2*0) +1(1*1-2*0.5) + 0 = 6 + 0 = 6
        let hand = 2.0 * (3.0 * 1.0 - 2.0 * 0.0) - (-1.0) * (1.0 * 1.0 - 2.0 * 0.5);
        assert!((m.determinant() - hand).abs() < 1e-14);
    }

    #[test]
    fn transpose_involution() {
        let mut m = Mat::zeros(3);
        for i in 0..9 {
            m.a[i] = i as f64;
        }
        assert_eq!(m.transpose().transpose(), m);
    }
}
