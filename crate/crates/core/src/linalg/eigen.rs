//! Non-Hermitian eigensolver: diagonal balancing, Householder reduction to
//! Hessenberg form, single-shift complex QR with Wilkinson shifts, and
//! eigenvectors by back-substitution in the Schur form.

use alloc::vec;
use alloc::vec::Vec;


use super::matrix::normalize;
use super::CMatrix;
use crate::float::{abs1, cis};
use crate::{Error, C64};

const EPS: f64 = f64::EPSILON;
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Complex Schur decomposition of a balanced copy of `A`:
/// `A = D·Q·T·Qᴴ·D⁻¹` with `Q` unitary, `T` upper triangular, `D = diag(scale)`.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
    pub scale: Vec<f64>,
}

/// Eigenvalues, unit right eigenvectors (columns) and residuals `‖Av - λv‖`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn schur(a: &CMatrix) -> Result<Schur, Error> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("eigensolver needs a square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries"));
    }
    let mut h = a.clone();
    let scale = balance(&mut h);
    let mut q = hessenberg(&mut h);
    hessenberg_qr(&mut h, &mut q)?;
    Ok(Schur { q, t: h, scale })
}

pub fn eig(a: &CMatrix) -> Result<EigenSystem, Error> {
    let s = schur(a)?;
    let values = s.eigenvalues();
    let vectors = s.eigenvectors();
    let residuals = (0..values.len())
        .map(|k| {
            let v = vectors.column(k);
            let av = a.matvec(&v);
            libm::sqrt(av.iter().zip(&v).map(|(x, y)| (x - values[k] * y).norm_sqr()).sum::<f64>())
        })
        .collect();
    Ok(EigenSystem { values, vectors, residuals })
}

impl Schur {
    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Unit eigenvectors of the original matrix, one column per diagonal entry of `T`.
    pub fn eigenvectors(&self) -> CMatrix {
        let n = self.dim();
        let tnorm = self.t.max_abs().max(f64::MIN_POSITIVE);
        let small = EPS * tnorm;
        let mut out = CMatrix::zeros(n, n);
        let mut x = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let lam = self.t[(k, k)];
            x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            x[k] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut s = C64::new(0.0, 0.0);
                for j in i + 1..=k {
                    s += self.t[(i, j)] * x[j];
                }
                let mut d = self.t[(i, i)] - lam;
                if d.norm() < small {
                    d = C64::new(small, 0.0);
                }
                x[i] = -s / d;
                // Rescale to keep the partial solution representable.
                let big = x[i].norm();
                if big > 1e100 {
                    for v in x.iter_mut().take(k + 1) {
                        *v /= big;
                    }
                }
            }
            let mut v: Vec<C64> = (0..n)
                .map(|r| (0..=k).map(|c| self.q[(r, c)] * x[c]).sum::<C64>() * self.scale[r])
                .collect();
            normalize(&mut v);
            out.set_column(k, &v);
        }
        out
    }

    /// Contour-integral spectral projection `(2πi)⁻¹∮(ζ - A)⁻¹dζ` over
    /// `|ζ - center| = radius`, trapezoidal rule with `points` nodes, returned
    /// in the coordinates of the original matrix.
    pub fn contour_projection(&self, center: C64, radius: f64, points: usize) -> CMatrix {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        let mut inv = CMatrix::zeros(n, n);
        for m in 0..points {
            let w = cis(2.0 * core::f64::consts::PI * m as f64 / points as f64) * radius;
            let zeta = center + w;
            upper_triangular_resolvent(&self.t, zeta, &mut inv);
            let weight = w / points as f64;
            for i in 0..n {
                for j in i..n {
                    acc[(i, j)] += weight * inv[(i, j)];
                }
            }
        }
        let p = self.q.matmul(&acc).matmul(&self.q.adjoint());
        CMatrix::from_fn(n, n, |i, j| p[(i, j)] * (self.scale[i] / self.scale[j]))
    }
}

/// `(ζI - T)⁻¹` for upper-triangular `T`, written into the upper triangle of `out`.
fn upper_triangular_resolvent(t: &CMatrix, zeta: C64, out: &mut CMatrix) {
    let n = t.rows();
    let diag: Vec<C64> = (0..n).map(|i| (zeta - t[(i, i)]).inv()).collect();
    for j in 0..n {
        out[(j, j)] = diag[j];
        for i in (0..j).rev() {
            // (ζ - T) X = I, column j, row i: (ζ - t_ii) x_ij - Σ_{k>i} t_ik x_kj = 0
            let mut s = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                s += t[(i, k)] * out[(k, j)];
            }
            out[(i, j)] = s * diag[i];
        }
    }
}

/// Power-of-two diagonal similarity that equalizes row and column norms.
/// Returns `d` with the matrix replaced by `D⁻¹AD`.
fn balance(a: &mut CMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let mut d = vec![1.0; n];
    let mut done = false;
    let mut rounds = 0;
    while !done && rounds < 100 {
        done = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[(j, i)]);
                    r += abs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    d
}

/// Householder reduction to upper Hessenberg form; returns the accumulated
/// unitary factor `Q` with `A_in = Q H Qᴴ`.
fn hessenberg(h: &mut CMatrix) -> CMatrix {
    let n = h.rows();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return q;
    }
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let alpha = libm::sqrt((k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>());
        let tail = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>();
        if alpha == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        for i in 0..m {
            v[i] = h[(k + 1 + i, k)];
        }
        v[0] += phase * alpha;
        normalize(&mut v[..m]);
        // Left: rows k+1.., H ← (I - 2vvᴴ) H
        for j in k..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..m {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            s *= 2.0;
            for i in 0..m {
                h[(k + 1 + i, j)] -= v[i] * s;
            }
        }
        // Right: columns k+1.., H ← H (I - 2vvᴴ), and the same on Q
        for mat in [&mut *h, &mut q] {
            for r in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..m {
                    s += mat[(r, k + 1 + j)] * v[j];
                }
                s *= 2.0;
                for j in 0..m {
                    mat[(r, k + 1 + j)] -= s * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    q
}

/// Rotation `G = [[c, s], [-s̄, c]]` with real `c` such that `G·(x, y)ᵀ = (r, 0)ᵀ`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = libm::hypot(ax, ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows(h: &mut CMatrix, k: usize, c: f64, s: C64, cols: core::ops::Range<usize>) {
    for j in cols {
        let a = h[(k, j)];
        let b = h[(k + 1, j)];
        h[(k, j)] = a * c + s * b;
        h[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(h: &mut CMatrix, k: usize, c: f64, s: C64, rows: core::ops::Range<usize>) {
    for i in rows {
        let a = h[(i, k)];
        let b = h[(i, k + 1)];
        h[(i, k)] = a * c + s.conj() * b;
        h[(i, k + 1)] = -s * a + b * c;
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Shifted QR on a Hessenberg matrix until it is upper triangular, updating
/// the full matrix (for the Schur form) and accumulating rotations into `z`.
fn hessenberg_qr(h: &mut CMatrix, z: &mut CMatrix) -> Result<(), Error> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let hnorm = h.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if s == 0.0 {
                s = hnorm;
            }
            if abs1(h[(l, l - 1)]) <= EPS * s {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NoConvergence(hi));
        }
        let mu = if iter % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75 * abs1(h[(hi, hi - 1)]), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - mu, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first = if k == l { k } else { k - 1 };
            rotate_rows(h, k, c, s, first..n);
            if k > l {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            let last = (k + 2).min(hi);
            rotate_cols(h, k, c, s, 0..last + 1);
            rotate_cols(z, k, c, s, 0..n);
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_matrix_keeps_entries_and_coordinate_vectors() {
        let d = [c(3.0, 0.0), c(-1.0, 2.0), c(0.5, 0.0)];
        let es = eig(&CMatrix::diagonal(&d)).unwrap();
        for (k, lam) in es.values.iter().enumerate() {
            let idx = d.iter().position(|x| x == lam).unwrap();
            let v = es.vector(k);
            assert!((v[idx].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_off_diagonal_gives_square_roots() {
        let bp = c(0.3, 0.1);
        let bm = c(-0.2, 0.4);
        let m = CMatrix::from_rows(&[&[c(0.0, 0.0), bm], &[bp, c(0.0, 0.0)]]);
        let es = eig(&m).unwrap();
        let r = (bp * bm).sqrt();
        let got = sorted(es.values.clone());
        let want = sorted(alloc::vec![r, -r]);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-15);
        }
        assert!(es.max_residual() < 1e-14);
    }

    #[test]
    fn jordan_block_does_not_break_the_iteration() {
        let m = CMatrix::from_rows(&[&[c(2.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        let es = eig(&m).unwrap();
        for v in &es.values {
            assert!((v - c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn schur_factors_reproduce_the_matrix() {
        let a = CMatrix::from_fn(6, 6, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 * 0.5)
        });
        let s = schur(&a).unwrap();
        let qtq = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        let back = CMatrix::from_fn(6, 6, |i, j| qtq[(i, j)] * (s.scale[i] / s.scale[j]));
        assert!(back.sub(&a).max_abs() < 1e-12);
        let unit = s.q.adjoint().matmul(&s.q).sub(&CMatrix::identity(6)).max_abs();
        assert!(unit < 1e-13);
        for i in 1..6 {
            for j in 0..i {
                assert_eq!(s.t[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn contour_projection_of_diagonal_selects_inside_entries() {
        let a = CMatrix::diagonal(&[c(0.0, 0.0), c(1.0, 0.0), c(1.1, 0.0), c(3.0, 0.0)]);
        let s = schur(&a).unwrap();
        let p = s.contour_projection(c(1.0, 0.0), 0.25, 64);
        let want = CMatrix::diagonal(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(p.sub(&want).max_abs() < 1e-12);
    }
}
