use alloc::vec::Vec;

use super::CMatrix;
use crate::{Error, C64};

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(a: &CMatrix) -> Result<Self, Error> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("LU needs a square matrix"));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn determinant(&self) -> C64 {
        let n = self.lu.rows();
        (0..n).fold(C64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    /// `tr(A⁻¹)`, the logarithmic derivative of `det(zI - A)` at the factored point.
    pub fn trace_of_inverse(&self) -> C64 {
        let n = self.lu.rows();
        let mut t = C64::new(0.0, 0.0);
        let mut e = alloc::vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            t += self.solve(&e)[j];
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = CMatrix::from_rows(&[
            &[C64::new(0.0, 0.0), C64::new(2.0, 1.0)],
            &[C64::new(1.0, -1.0), C64::new(3.0, 0.0)],
        ]);
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let lu = Lu::new(&a).unwrap();
        let x = lu.solve(&b);
        let r = a.matvec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).norm() < 1e-14);
        }
        let det = C64::new(0.0, 0.0) * C64::new(3.0, 0.0) - C64::new(2.0, 1.0) * C64::new(1.0, -1.0);
        assert!((lu.determinant() - det).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CMatrix::zeros(3, 3);
        assert_eq!(Lu::new(&a).unwrap_err(), Error::Singular);
    }
}
