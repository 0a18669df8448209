//! Monodromy matrix of `y' = A(λ, x) y`, `A = [[-iλ, iP], [-iQ, iλ]]`, over
//! `[0, π]`, and the characteristic functions built from it.
//!
//! The free part is integrated exactly: with `y = diag(e^{-iλx}, e^{iλx})·w`
//! the remaining system `w' = [[0, iP e^{2iλx}], [-iQ e^{-2iλx}, 0]]·w` only
//! carries the potential, which keeps the embedded Dormand–Prince 5(4) steps
//! long at large `|λ|`.

use alloc::vec::Vec;

use crate::float::PI;
use crate::{BoundaryCondition, Error, FourierPotential, C64};

/// Default relative tolerance of the integrator.
pub const DEFAULT_TOL: f64 = 1e-11;
/// Tolerance used while root finding, where the characteristic functions are
/// differenced numerically.
pub const ROOT_TOL: f64 = 1e-12;

type M2 = [[C64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyMatrix {
    pub lambda: C64,
    pub m: M2,
    pub steps: usize,
    pub rejected: usize,
    /// Sum of accepted local error estimates.
    pub error_estimate: f64,
}

impl MonodromyMatrix {
    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn det_defect(&self) -> f64 {
        (self.det() - C64::new(1.0, 0.0)).norm()
    }

    /// Lyapunov function `Δ = tr M / 2`.
    pub fn half_trace(&self) -> C64 {
        (self.m[0][0] + self.m[1][1]) * 0.5
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(v: &FourierPotential, lambda: C64, x: f64, w: &M2) -> M2 {
    let (p, q) = v.eval_shifted(x, lambda * 2.0);
    let i = C64::new(0.0, 1.0);
    let b12 = i * p;
    let b21 = -i * q;
    [[b12 * w[1][0], b12 * w[1][1]], [b21 * w[0][0], b21 * w[0][1]]]
}

fn axpy(y: &M2, h: f64, coeffs: &[f64], ks: &[M2]) -> M2 {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        if *c == 0.0 {
            continue;
        }
        for r in 0..2 {
            for s in 0..2 {
                out[r][s] += k[r][s] * (h * c);
            }
        }
    }
    out
}

/// Fundamental matrix at `x = π` for spectral parameter `lambda`.
pub fn monodromy(v: &FourierPotential, lambda: C64, tol: f64) -> Result<MonodromyMatrix, Error> {
    if !(tol >= 1e-13) {
        return Err(Error::InvalidArgument("integrator tolerance must be at least 1e-13"));
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut w: M2 = [[one, zero], [zero, one]];
    let mut steps = 0;
    let mut rejected = 0;
    let mut error_estimate = 0.0;
    if !v.is_zero() {
        let mut x = 0.0;
        let mut h = 0.05;
        let mut k: [M2; 7] = [[[zero; 2]; 2]; 7];
        k[0] = rhs(v, lambda, x, &w);
        while x < PI {
            if x + h > PI {
                h = PI - x;
            }
            if h < 1e-12 * PI {
                return Err(Error::Integration { x });
            }
            for s in 1..7 {
                let ys = axpy(&w, h, &A[s][..s], &k[..s]);
                k[s] = rhs(v, lambda, x + C[s] * h, &ys);
            }
            let y5 = axpy(&w, h, &B5, &k);
            let y4 = axpy(&w, h, &B4, &k);
            let mut err: f64 = 0.0;
            for r in 0..2 {
                for s in 0..2 {
                    let scale = tol * (1.0 + w[r][s].norm().max(y5[r][s].norm()));
                    err = err.max((y5[r][s] - y4[r][s]).norm() / scale);
                }
            }
            if err <= 1.0 {
                x += h;
                w = y5;
                k[0] = k[6];
                steps += 1;
                error_estimate += err * tol;
            } else {
                rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
            h *= factor;
        }
    }
    let e = (C64::new(0.0, -PI) * lambda).exp();
    let einv = (C64::new(0.0, PI) * lambda).exp();
    let m = [[e * w[0][0], e * w[0][1]], [einv * w[1][0], einv * w[1][1]]];
    Ok(MonodromyMatrix { lambda, m, steps, rejected, error_estimate })
}

/// `χ(λ) = (M·(1,1)ᵀ)₁ - (M·(1,1)ᵀ)₂`; its zeros are the Dirichlet eigenvalues.
pub fn dirichlet_char(v: &FourierPotential, lambda: C64, tol: f64) -> Result<C64, Error> {
    let m = monodromy(v, lambda, tol)?.m;
    Ok(m[0][0] + m[0][1] - m[1][0] - m[1][1])
}

/// `Δ² - 1 = ((m₁₁ - m₂₂)/2)² + m₁₂m₂₁` (using `det M = 1`); its zeros are
/// the periodic and antiperiodic eigenvalues. This form stays accurate next
/// to double roots, where `tr M ∓ 2` loses half the digits.
pub fn periodic_char(v: &FourierPotential, lambda: C64, tol: f64) -> Result<C64, Error> {
    let m = monodromy(v, lambda, tol)?.m;
    let u = (m[0][0] - m[1][1]) * 0.5;
    Ok(u * u + m[0][1] * m[1][0])
}

/// Roots of the relevant characteristic function inside `D_n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NearRoots {
    pub n: i64,
    pub bc: BoundaryCondition,
    /// One root for Dirichlet; `(λ⁻, λ⁺)` in the usual order for Per±.
    pub roots: Vec<C64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

const DERIV_STEP: f64 = 1e-6;
const MAX_NEWTON: usize = 80;

struct Newton {
    root: C64,
    residual: f64,
    iterations: usize,
}

/// Complex Newton with a central-difference derivative. When consecutive
/// steps shrink by about one half the iterate is approaching a (near-)double
/// root, and the step is doubled to restore fast convergence.
fn newton(f: &dyn Fn(C64) -> Result<C64, Error>, seed: C64, center: f64) -> Result<Option<Newton>, Error> {
    let mut z = seed;
    let mut prev_step = f64::INFINITY;
    let mut halvings = 0;
    let mut best: Option<(C64, f64)> = None;
    for it in 0..MAX_NEWTON {
        let fz = f(z)?;
        let res = fz.norm();
        if best.map_or(true, |(_, r)| res < r) {
            best = Some((z, res));
        }
        if res == 0.0 {
            return Ok(Some(Newton { root: z, residual: 0.0, iterations: it }));
        }
        let h = DERIV_STEP * (1.0 + z.norm());
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 {
            break;
        }
        let mut step = fz / d;
        let ratio = step.norm() / prev_step;
        halvings = if (0.35..0.65).contains(&ratio) { halvings + 1 } else { 0 };
        if halvings >= 2 {
            step *= 2.0;
            halvings = 0;
        }
        if step.norm() > 0.1 {
            step *= 0.1 / step.norm();
        }
        z -= step;
        if (z - center).norm() > 0.5 {
            return Ok(None);
        }
        if step.norm() < 1e-13 * (1.0 + z.norm()) {
            let res = f(z)?.norm();
            return Ok(Some(Newton { root: z, residual: res, iterations: it + 1 }));
        }
        prev_step = step.norm();
    }
    Ok(best.map(|(root, residual)| Newton { root, residual, iterations: MAX_NEWTON }))
}

fn seeds(n: i64) -> [C64; 5] {
    let c = C64::new(n as f64, 0.0);
    [
        c,
        c + C64::new(0.1, 0.0),
        c + C64::new(0.0, 0.1),
        c - C64::new(0.1, 0.0),
        c - C64::new(0.0, 0.1),
    ]
}

fn inside(z: C64, n: i64) -> bool {
    (z - n as f64).norm() < crate::galerkin::DISC_RADIUS
}

/// Newton from the seed `n`, then from a ring of four seeds at distance 0.1.
fn multistart(f: &dyn Fn(C64) -> Result<C64, Error>, n: i64) -> Result<Newton, Error> {
    for s in seeds(n) {
        if let Some(r) = newton(f, s, n as f64)? {
            if inside(r.root, n) {
                return Ok(r);
            }
        }
    }
    Err(Error::RootNotFound(n))
}

/// Eigenvalues near `n` from the characteristic functions: the Dirichlet
/// root for `dir`, both roots (the second by deflation) for `per±`.
pub fn find_eigenvalue_near(v: &FourierPotential, n: i64, bc: BoundaryCondition) -> Result<NearRoots, Error> {
    find_eigenvalue_near_tol(v, n, bc, ROOT_TOL)
}

pub fn find_eigenvalue_near_tol(v: &FourierPotential, n: i64, bc: BoundaryCondition, tol: f64) -> Result<NearRoots, Error> {
    if !bc.admits(n) {
        return Err(Error::InvalidArgument("boundary condition has no eigenvalues near this n"));
    }
    match bc {
        BoundaryCondition::Dirichlet => {
            let f = |z: C64| dirichlet_char(v, z, tol);
            let r = multistart(&f, n)?;
            Ok(NearRoots { n, bc, roots: alloc::vec![r.root], residuals: alloc::vec![r.residual], iterations: r.iterations })
        }
        _ => {
            let f = |z: C64| periodic_char(v, z, tol);
            let r1 = multistart(&f, n)?;
            let root1 = r1.root;
            let g = |z: C64| {
                let d = z - root1;
                if d.norm() == 0.0 {
                    return Ok(C64::new(f64::INFINITY, 0.0));
                }
                Ok(f(z)? / d)
            };
            let mut second = None;
            for s in [root1 + C64::new(0.02, 0.01), root1 - C64::new(0.02, 0.01), root1 + C64::new(-0.01, 0.02)] {
                if let Some(r) = newton(&g, s, n as f64)? {
                    if inside(r.root, n) {
                        second = Some(r);
                        break;
                    }
                }
            }
            let r2 = second.ok_or(Error::RootNotFound(n))?;
            let (lo, hi) = crate::galerkin::order_pair(root1, r2.root);
            let residuals = [lo, hi].iter().map(|&z| f(z).map(|x| x.norm())).collect::<Result<Vec<_>, _>>()?;
            Ok(NearRoots { n, bc, roots: alloc::vec![lo, hi], residuals, iterations: r1.iterations + r2.iterations })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn two_mode(x: f64) -> FourierPotential {
        FourierPotential::two_mode(c(x, 0.0), c(x, 0.0), c(x, 0.0), c(x, 0.0))
    }

    #[test]
    fn free_monodromy_is_the_diagonal_exponential() {
        let lam = c(2.3, -0.1);
        let m = monodromy(&FourierPotential::zero(), lam, DEFAULT_TOL).unwrap();
        let i = c(0.0, 1.0);
        assert!((m.m[0][0] - (-i * lam * PI).exp()).norm() < 1e-15);
        assert!((m.m[1][1] - (i * lam * PI).exp()).norm() < 1e-15);
        assert_eq!(m.m[0][1], c(0.0, 0.0));
        let at5 = monodromy(&FourierPotential::zero(), c(5.0, 0.0), DEFAULT_TOL).unwrap();
        assert!((at5.m[0][0] + 1.0).norm() < 1e-14 && (at5.m[1][1] + 1.0).norm() < 1e-14);
    }

    #[test]
    fn wronskian_is_conserved() {
        let m = monodromy(&two_mode(0.1), c(5.1, 0.0), DEFAULT_TOL).unwrap();
        assert!(m.det_defect() < 1e-10, "det defect {}", m.det_defect());
        assert!(m.steps > 0);
    }

    #[test]
    fn free_dirichlet_function_is_a_sine() {
        for lam in [c(0.3, 0.0), c(1.7, 0.2), c(-2.2, -0.1)] {
            let chi = dirichlet_char(&FourierPotential::zero(), lam, DEFAULT_TOL).unwrap();
            let want = c(0.0, -2.0) * (lam * PI).sin();
            assert!((chi - want).norm() < 1e-13);
        }
        let r = find_eigenvalue_near(&FourierPotential::zero(), 4, BoundaryCondition::Dirichlet).unwrap();
        assert!((r.roots[0] - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn integration_rejects_too_tight_tolerance() {
        assert!(monodromy(&two_mode(0.1), c(1.0, 0.0), 1e-15).is_err());
    }

    #[test]
    fn dirichlet_root_stays_in_its_disc() {
        let r = find_eigenvalue_near(&two_mode(0.1), 7, BoundaryCondition::Dirichlet).unwrap();
        assert!((r.roots[0] - c(7.0, 0.0)).norm() < 0.25);
        assert!(r.residuals[0] < 1e-9);
    }

    #[test]
    fn parity_mismatch_is_refused() {
        assert!(find_eigenvalue_near(&two_mode(0.1), 7, BoundaryCondition::PerPlus).is_err());
    }
}
