//! The scalar equation `(z - α_n(z))² = β_n^+(z)·β_n^-(z)` in `|z| < 1/4`,
//! solved by the split fixed-point maps `ζ^±(z) = α_n(z) ± β_n^+(z)·√η_n(z)`,
//! `η_n = β_n^-/β_n^+`, with one continuous branch of the square root.

use alloc::vec::Vec;

use crate::coefficients::{CoefficientEvaluator, CoefficientValue, MAX_Z};
use crate::float::{wrap, PI};
use crate::galerkin::SpectralTriple;
use crate::logcomplex::LogComplex;
use crate::{Error, C64};

/// Continuous phase of `η` along a path, anchored at the principal argument
/// of the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub phi0: f64,
    pub phi: f64,
}

/// Largest admissible phase change between consecutive samples.
const MAX_JUMP: f64 = PI / 2.0;

impl Branch {
    pub fn start(eta: LogComplex) -> Result<Self, Error> {
        if eta.is_zero() || !eta.is_finite() {
            return Err(Error::Branch("eta vanishes at the base point"));
        }
        let phi0 = eta.arg();
        Ok(Self { phi0, phi: phi0 })
    }

    /// Moves the branch to a new sample and returns the continued phase.
    pub fn follow(&mut self, eta: LogComplex) -> Result<f64, Error> {
        if eta.is_zero() || !eta.is_finite() {
            return Err(Error::Branch("eta vanishes on the path"));
        }
        let jump = wrap(eta.arg() - self.phi);
        if jump.abs() > MAX_JUMP {
            return Err(Error::Branch("phase jump between samples exceeds pi/2"));
        }
        let phi = self.phi + jump;
        if (phi - self.phi0).abs() >= PI {
            return Err(Error::Branch("path winds around the origin"));
        }
        self.phi = phi;
        Ok(phi)
    }

    /// `√|η|·e^{iφ/2}` on the current branch.
    pub fn sqrt(&self, eta: LogComplex) -> LogComplex {
        LogComplex::new(0.5 * eta.log_magnitude, 0.5 * self.phi)
    }
}

/// Square roots of path samples on the branch continued from the first sample.
pub fn sqrt_branch(samples: &[C64]) -> Result<Vec<C64>, Error> {
    let Some(&first) = samples.first() else {
        return Ok(Vec::new());
    };
    let mut b = Branch::start(LogComplex::from(first))?;
    let mut out = Vec::with_capacity(samples.len());
    for (k, &s) in samples.iter().enumerate() {
        let eta = LogComplex::from(s);
        if k > 0 {
            b.follow(eta)?;
        }
        out.push(b.sqrt(eta).to_complex());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Stop once `|z_{k+1} - z_k|` drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RootMethod {
    FixedPoint,
    Newton,
    /// `β⁺β⁻ ≡ 0`: the double root of `z = α(z)`.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasicRoots {
    pub n: i64,
    /// Fixed point of `ζ⁺`.
    pub z1: C64,
    /// Fixed point of `ζ⁻`.
    pub z2: C64,
    pub iterations: [usize; 2],
    /// Largest ratio of consecutive steps after the first two, an empirical
    /// Lipschitz constant of `ζ^±`.
    pub contraction: [f64; 2],
    pub method: [RootMethod; 2],
    pub phi0: f64,
    /// Continued phase of `η` at `z1`, `z2`.
    pub phi: [f64; 2],
    /// `η` at `z1`, `z2`, carrying the continued phase.
    pub eta: [LogComplex; 2],
    /// `|(z - α)² - β⁺β⁻|` at `z1`, `z2`.
    pub residuals: [f64; 2],
    /// `|z1 - z2|`; below double precision resolution it is recovered from
    /// `(β⁺√η)(z1) + (β⁺√η)(z2)` divided by `1 - α'`.
    pub gap: LogComplex,
}

impl BasicRoots {
    pub fn degenerate(&self) -> bool {
        self.method[0] == RootMethod::Degenerate
    }

    /// `ψ = (φ(z1) - φ(z2)) / 2`.
    pub fn psi(&self) -> f64 {
        0.5 * (self.phi[0] - self.phi[1])
    }

    pub fn gap_f64(&self) -> f64 {
        self.gap.abs()
    }
}

fn eta_of(c: &CoefficientValue) -> LogComplex {
    c.beta_minus / c.beta_plus
}

fn residual(z: C64, c: &CoefficientValue) -> f64 {
    let d = z - c.alpha_c();
    (d * d - c.beta_product().to_complex()).norm()
}

struct Iterate {
    z: C64,
    iterations: usize,
    contraction: f64,
    converged: bool,
}

/// Runs `z ← α(z) + sign·β⁺(z)√η(z)` from `0` (or `z ← α(z)` when `sign` is 0).
fn fixed_point(eval: &dyn CoefficientEvaluator, n: i64, sign: f64, base: Option<Branch>, opts: &SolveOptions) -> Result<Iterate, Error> {
    let mut z = C64::new(0.0, 0.0);
    let mut branch = base;
    let mut prev_step = f64::INFINITY;
    let mut growing = 0;
    let mut contraction: f64 = 0.0;
    for it in 0..opts.max_iter {
        let c = eval.coefficients(n, z)?;
        let mut next = c.alpha_c();
        if let Some(b) = branch.as_mut() {
            let eta = eta_of(&c);
            if it > 0 {
                b.follow(eta)?;
            }
            next += (c.beta_plus * b.sqrt(eta)).to_complex() * sign;
        }
        let step = (next - z).norm();
        z = next;
        if step < opts.tol {
            return Ok(Iterate { z, iterations: it + 1, contraction, converged: true });
        }
        let ratio = step / prev_step;
        if it >= 2 {
            contraction = contraction.max(ratio);
        }
        growing = if ratio >= 1.0 { growing + 1 } else { 0 };
        if growing >= 5 || z.norm() >= 0.5 {
            return Ok(Iterate { z, iterations: it + 1, contraction, converged: false });
        }
        prev_step = step;
    }
    Ok(Iterate { z, iterations: opts.max_iter, contraction, converged: false })
}

/// Complex Newton on `F(z) = (z - α)² - β⁺β⁻`, optionally deflated by a known root.
fn newton(eval: &dyn CoefficientEvaluator, n: i64, seed: C64, deflate: Option<C64>, degenerate: bool) -> Result<Option<C64>, Error> {
    let f = |z: C64| -> Result<C64, Error> {
        let c = eval.coefficients(n, z)?;
        let d = z - c.alpha_c();
        let mut v = if degenerate { d } else { d * d - c.beta_product().to_complex() };
        if let Some(r) = deflate {
            v /= z - r;
        }
        Ok(v)
    };
    let mut z = seed;
    for _ in 0..100 {
        let fz = f(z)?;
        if fz.norm() == 0.0 {
            return Ok(Some(z));
        }
        let h = 1e-7;
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 {
            return Ok(None);
        }
        let mut step = fz / d;
        if step.norm() > 0.05 {
            step *= 0.05 / step.norm();
        }
        z -= step;
        if z.norm() >= 0.5 {
            return Ok(None);
        }
        if step.norm() < 1e-15 {
            return Ok(Some(z));
        }
    }
    Ok(Some(z))
}

/// `z1` from `ζ⁺`, `z2` from `ζ⁻`, both seeded at `0`.
pub fn solve(n: i64, eval: &dyn CoefficientEvaluator, opts: &SolveOptions) -> Result<BasicRoots, Error> {
    // Iterates or difference stencils leaving the disc mean the solver failed,
    // not that the caller asked for a bad point.
    let guarded = |m: i64, z: C64| if z.norm() > MAX_Z { Err(Error::Solver(m)) } else { eval.coefficients(m, z) };
    solve_in_disc(n, &guarded, opts)
}

fn solve_in_disc(n: i64, eval: &dyn CoefficientEvaluator, opts: &SolveOptions) -> Result<BasicRoots, Error> {
    let c0 = eval.coefficients(n, C64::new(0.0, 0.0))?;
    if c0.beta_plus.is_zero() || c0.beta_minus.is_zero() {
        return solve_degenerate(n, eval, opts);
    }
    let base = Branch::start(eta_of(&c0))?;
    let mut roots = [C64::new(0.0, 0.0); 2];
    let mut iterations = [0; 2];
    let mut contraction = [0.0; 2];
    let mut method = [RootMethod::FixedPoint; 2];
    let mut need_newton = false;
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        match fixed_point(eval, n, sign, Some(base), opts) {
            Ok(it) if it.converged => {
                roots[k] = it.z;
                iterations[k] = it.iterations;
                contraction[k] = it.contraction;
            }
            Ok(it) => {
                iterations[k] = it.iterations;
                contraction[k] = it.contraction;
                need_newton = true;
            }
            Err(Error::Branch(_)) => need_newton = true,
            Err(e) => return Err(e),
        }
    }
    if need_newton {
        let r1 = newton(eval, n, C64::new(0.0, 0.0), None, false)?.ok_or(Error::Solver(n))?;
        let r2 = [C64::new(0.01, 0.01), C64::new(-0.01, -0.01), C64::new(0.02, -0.01)]
            .into_iter()
            .find_map(|s| newton(eval, n, r1 + s, Some(r1), false).ok().flatten())
            .ok_or(Error::Solver(n))?;
        // Label by the sign of (z - α)/(β⁺√η) on the base branch.
        let label = |z: C64| -> Result<f64, Error> {
            let c = eval.coefficients(n, z)?;
            let mut b = base;
            let eta = eta_of(&c);
            b.follow(eta)?;
            let w = (c.beta_plus * b.sqrt(eta)).to_complex();
            Ok(((z - c.alpha_c()) / w).re)
        };
        let (a, b) = if label(r1)? >= label(r2)? { (r1, r2) } else { (r2, r1) };
        roots = [a, b];
        method = [RootMethod::Newton; 2];
    }
    finish(n, eval, roots, iterations, contraction, method, base)
}

fn finish(
    n: i64,
    eval: &dyn CoefficientEvaluator,
    roots: [C64; 2],
    iterations: [usize; 2],
    contraction: [f64; 2],
    method: [RootMethod; 2],
    base: Branch,
) -> Result<BasicRoots, Error> {
    let c1 = eval.coefficients(n, roots[0])?;
    let c2 = eval.coefficients(n, roots[1])?;
    let mut eta = [eta_of(&c1), eta_of(&c2)];
    let mut phi = [0.0; 2];
    let mut w = [LogComplex::ZERO; 2];
    for (k, c) in [&c1, &c2].into_iter().enumerate() {
        let mut b = base;
        phi[k] = b.follow(eta[k])?;
        eta[k] = LogComplex::new(eta[k].log_magnitude, phi[k]);
        w[k] = c.beta_plus * b.sqrt(eta[k]);
    }
    let direct = (roots[0] - roots[1]).norm();
    let gap = if direct > 1e-8 {
        LogComplex::from_complex(C64::new(direct, 0.0))
    } else {
        let mid = (roots[0] + roots[1]) * 0.5;
        let h = 1e-6;
        let slope = (eval.coefficients(n, mid + h)?.alpha_c() - eval.coefficients(n, mid - h)?.alpha_c()) / (2.0 * h);
        let sum = w[0].add(&w[1]);
        LogComplex::new(sum.log_magnitude - libm::log((C64::new(1.0, 0.0) - slope).norm()), 0.0)
    };
    Ok(BasicRoots {
        n,
        z1: roots[0],
        z2: roots[1],
        iterations,
        contraction,
        method,
        phi0: base.phi0,
        phi,
        eta,
        residuals: [residual(roots[0], &c1), residual(roots[1], &c2)],
        gap,
    })
}

fn solve_degenerate(n: i64, eval: &dyn CoefficientEvaluator, opts: &SolveOptions) -> Result<BasicRoots, Error> {
    let it = fixed_point(eval, n, 0.0, None, opts)?;
    let z = if it.converged {
        it.z
    } else {
        newton(eval, n, C64::new(0.0, 0.0), None, true)?.ok_or(Error::Solver(n))?
    };
    let c = eval.coefficients(n, z)?;
    let r = residual(z, &c);
    Ok(BasicRoots {
        n,
        z1: z,
        z2: z,
        iterations: [it.iterations; 2],
        contraction: [it.contraction; 2],
        method: [RootMethod::Degenerate; 2],
        phi0: 0.0,
        phi: [0.0; 2],
        eta: [LogComplex::ZERO; 2],
        residuals: [r, r],
        gap: LogComplex::ZERO,
    })
}

/// Number of roots of `(z - α)² - β⁺β⁻` inside `|z| = radius`, by the
/// argument principle with adaptive sampling of the circle.
pub fn count_roots(n: i64, eval: &dyn CoefficientEvaluator, radius: f64) -> Result<i64, Error> {
    let mut samples = 64;
    'refine: loop {
        let mut values = Vec::with_capacity(samples);
        for k in 0..samples {
            let z = crate::float::cis(2.0 * PI * k as f64 / samples as f64) * radius;
            let c = eval.coefficients(n, z)?;
            let d = z - c.alpha_c();
            values.push(d * d - c.beta_product().to_complex());
        }
        let mut total = 0.0;
        for k in 0..samples {
            let a = values[k];
            let b = values[(k + 1) % samples];
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return Err(Error::Contour(n));
            }
            let step = wrap(b.arg() - a.arg());
            if step.abs() > MAX_JUMP {
                if samples >= 4096 {
                    return Err(Error::Contour(n));
                }
                samples *= 2;
                continue 'refine;
            }
            total += step;
        }
        return Ok(libm::round(total / (2.0 * PI)) as i64);
    }
}

/// Which gap entered a bounds check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum GapSource {
    Galerkin,
    /// Galerkin pair below the double-detection threshold; `|z1 - z2|` used.
    BasicEquation,
}

/// Two-sided check `(2√c/(1+4c))·S ≤ γ_n ≤ 2·S` with `S = |β⁻(z*)| + |β⁺(z*)|`.
/// Magnitudes are compared in log form; margins are `ln` differences
/// (nonnegative when the bound holds).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapBoundsReport {
    pub n: i64,
    pub gamma: LogComplex,
    pub source: GapSource,
    pub beta_sum: LogComplex,
    pub upper_holds: bool,
    pub upper_margin: f64,
    pub lower_holds: Option<bool>,
    pub lower_margin: Option<f64>,
}

fn ln_or_neg_inf(x: &LogComplex) -> f64 {
    x.log_magnitude
}

/// `c` is the class-membership constant; without it only the upper bound is checked.
pub fn gap_bounds_report(triple: &SpectralTriple, at_z_star: &CoefficientValue, roots: Option<&BasicRoots>, c: Option<f64>) -> GapBoundsReport {
    let (gamma, source) = match roots {
        Some(r) if triple.is_double() => (r.gap, GapSource::BasicEquation),
        _ => (LogComplex::from(C64::new(triple.gamma, 0.0)), GapSource::Galerkin),
    };
    let beta_sum = LogComplex::sum(&[
        LogComplex::new(at_z_star.beta_minus.log_magnitude, 0.0),
        LogComplex::new(at_z_star.beta_plus.log_magnitude, 0.0),
    ]);
    let lg = ln_or_neg_inf(&gamma);
    let ls = ln_or_neg_inf(&beta_sum);
    // Both vanish: 0 ≤ 0 ≤ 0 holds with zero margin.
    let both_zero = gamma.is_zero() && beta_sum.is_zero();
    let diff = |a: f64, b: f64| if both_zero { 0.0 } else { a - b };
    let upper_margin = diff(core::f64::consts::LN_2 + ls, lg);
    let (lower_holds, lower_margin) = match c {
        Some(c) => {
            let k = 2.0 * libm::sqrt(c) / (1.0 + 4.0 * c);
            let m = diff(lg, libm::log(k) + ls);
            (Some(both_zero || m >= 0.0), Some(m))
        }
        None => (None, None),
    };
    GapBoundsReport {
        n: triple.n,
        gamma,
        source,
        beta_sum,
        upper_holds: both_zero || upper_margin >= 0.0,
        upper_margin,
        lower_holds,
        lower_margin,
    }
}
