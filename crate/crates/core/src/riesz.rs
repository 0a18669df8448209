//! Riesz projections `P_n` by resolvent contour quadrature, eigenvector
//! overlaps `⟨f(n), g(n)⟩` and the basis / no-basis classification.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::basic_equation::{self, BasicRoots, SolveOptions};
use crate::coefficients::{CoefficientEvaluator, CoefficientValue, Series};
use crate::galerkin::{self, GalerkinMatrix, SpectralTriple, DISC_RADIUS};
use crate::linalg::{inner, normalize, schur, vec_norm, CMatrix, EigenSystem, Lu, Schur};
use crate::logcomplex::LogComplex;
use crate::{BoundaryCondition, Error, FourierPotential, C64};

pub const QUADRATURE_POINTS: usize = 64;
/// Eigenvalues closer than this to the contour force a different radius.
const CONTOUR_CLEARANCE: f64 = 1e-6;
const RADII: [f64; 5] = [DISC_RADIUS, 0.2, 0.3, 0.225, 0.275];
const NORM_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for the multiplicity rank test.
const RANK_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ProjectionData {
    pub n: i64,
    pub radius: f64,
    pub p: CMatrix,
    pub p0: CMatrix,
    /// `‖P_n - P_n⁰‖`.
    pub deviation: f64,
    /// `‖P_n² - P_n‖`.
    pub idempotency: f64,
    pub trace: C64,
    pub rank: usize,
}

/// Schur form of a Galerkin matrix, reused across projections.
pub struct Projector<'a> {
    pub gm: &'a GalerkinMatrix,
    pub schur: Schur,
    values: Vec<C64>,
}

impl<'a> Projector<'a> {
    pub fn new(gm: &'a GalerkinMatrix) -> Result<Self, Error> {
        let schur = schur(&gm.matrix)?;
        let values = schur.eigenvalues();
        Ok(Self { gm, schur, values })
    }

    /// `P_n = (2πi)⁻¹ ∮_{|ζ-n|=r} (ζ - L)⁻¹ dζ` by the trapezoidal rule.
    pub fn projection(&self, n: i64, points: usize) -> Result<ProjectionData, Error> {
        let center = C64::new(n as f64, 0.0);
        let radius = RADII
            .into_iter()
            .find(|&r| self.values.iter().all(|z| ((z - center).norm() - r).abs() > CONTOUR_CLEARANCE))
            .ok_or(Error::Contour(n))?;
        let p = self.schur.contour_projection(center, radius, points);
        let p0 = self.gm.free_projection(n)?;
        let trace = p.trace();
        Ok(ProjectionData {
            n,
            radius,
            deviation: p.sub(&p0).spectral_norm(NORM_TOL),
            idempotency: p.matmul(&p).sub(&p).spectral_norm(NORM_TOL),
            rank: libm::round(trace.re).max(0.0) as usize,
            trace,
            p,
            p0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VectorSource {
    /// Unit eigenvectors of the dense solver.
    Dense,
    /// Lyapunov–Schmidt lift of the kernel vectors of the reduced 2×2 problem.
    Lift,
    /// Orthonormal pair in `Ran P_n` for a geometrically double eigenvalue.
    OrthogonalPair,
}

/// Per-`n` overlap evidence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OverlapEntry {
    pub n: i64,
    pub gamma: f64,
    pub source: VectorSource,
    /// `|⟨f(n), g(n)⟩|` from `source`.
    pub overlap: f64,
    pub overlap_dense: Option<f64>,
    pub overlap_lift: Option<f64>,
    /// `‖P⁰f‖`, `‖P⁰g‖`.
    pub free_norms: (f64, f64),
    /// `|η(z1)|`, `|η(z2)|`.
    pub eta_abs: Option<(f64, f64)>,
    pub psi: Option<f64>,
    pub pi_n: Option<f64>,
    /// `| |⟨f,g⟩|² - ‖f⁰‖²‖g⁰‖²Π_n |`.
    pub discrepancy: Option<f64>,
    /// Only meaningful for double eigenvalues: rank of `B - λI` on `Ran P_n`.
    pub double_rank: Option<usize>,
    pub defective: bool,
}

/// `Π_n` from `ln|η(z1)|`, `ln|η(z2)|` and `ψ_n`, stable for extreme magnitudes.
pub fn reduced_pi(ln_x: f64, ln_y: f64, psi: f64) -> f64 {
    let l = 0.5 * (ln_x + ln_y);
    let rot = crate::float::cis(psi);
    if l <= 0.0 {
        let num = (C64::new(1.0, 0.0) - rot * libm::exp(l)).norm_sqr();
        num / ((1.0 + libm::exp(ln_x)) * (1.0 + libm::exp(ln_y)))
    } else {
        let num = (C64::new(libm::exp(-l), 0.0) - rot).norm_sqr();
        num / ((1.0 + libm::exp(-ln_x)) * (1.0 + libm::exp(-ln_y)))
    }
}

/// Solves `(I - R⊥V) f = u` at `λ`, where `R⊥ = diag(1/(λ - k))` off the pair at `n`.
fn lift(gm: &GalerkinMatrix, n: i64, lambda: C64, u: (C64, C64)) -> Result<Vec<C64>, Error> {
    let (i1, i2) = gm.pair_coordinates(n)?;
    let m = &gm.matrix;
    let dim = gm.dim();
    let a = CMatrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        if i == i1 || i == i2 || i == j {
            id
        } else {
            id - m[(i, j)] / (lambda - m[(i, i)])
        }
    });
    let mut rhs = vec![C64::new(0.0, 0.0); dim];
    rhs[i1] = u.0;
    rhs[i2] = u.1;
    let mut f = Lu::new(&a)?.solve(&rhs);
    normalize(&mut f);
    Ok(f)
}

/// Orthonormal basis of `Ran P_n` from the images of `e¹_n`, `e²_n`.
fn range_basis(gm: &GalerkinMatrix, pd: &ProjectionData) -> Result<(Vec<C64>, Vec<C64>), Error> {
    let (i1, i2) = gm.pair_coordinates(pd.n)?;
    let mut a = pd.p.column(i1);
    let mut b = pd.p.column(i2);
    normalize(&mut a);
    let c = inner(&b, &a);
    b.iter_mut().zip(&a).for_each(|(x, y)| *x -= c * y);
    if normalize(&mut b) == 0.0 {
        return Err(Error::Singular);
    }
    Ok((a, b))
}

/// Rank of `B - (tr B/2)·I` with `B` the compression of the matrix to `Ran P_n`.
fn double_rank(gm: &GalerkinMatrix, u: &(Vec<C64>, Vec<C64>)) -> usize {
    let cols = [&u.0, &u.1];
    let mu: Vec<Vec<C64>> = cols.iter().map(|c| gm.matrix.matvec(c)).collect();
    let mut b = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            b[i][j] = inner(&mu[j], cols[i]);
        }
    }
    let h = (b[0][0] + b[1][1]) * 0.5;
    b[0][0] -= h;
    b[1][1] -= h;
    let sv = singular_values_2x2(&b);
    let scale = h.norm().max(1.0);
    sv.iter().filter(|&&s| s > RANK_CUTOFF * scale).count()
}

fn singular_values_2x2(b: &[[C64; 2]; 2]) -> [f64; 2] {
    // Eigenvalues of the Hermitian BᴴB.
    let g = |i: usize, j: usize| b[0][i].conj() * b[0][j] + b[1][i].conj() * b[1][j];
    let (a, d, c) = (g(0, 0).re, g(1, 1).re, g(0, 1).norm());
    let mean = 0.5 * (a + d);
    let r = libm::hypot(0.5 * (a - d), c);
    [libm::sqrt((mean + r).max(0.0)), libm::sqrt((mean - r).max(0.0))]
}

fn overlap(f: &[C64], g: &[C64]) -> f64 {
    inner(f, g).norm() / (vec_norm(f) * vec_norm(g))
}

fn free_norm(gm: &GalerkinMatrix, n: i64, f: &[C64]) -> Result<f64, Error> {
    let (i1, i2) = gm.pair_coordinates(n)?;
    Ok(libm::hypot(f[i1].norm(), f[i2].norm()) / vec_norm(f))
}

/// Overlap of the unit eigenvectors at `n`, with the reduced-model prediction
/// when the basic-equation roots are available.
///
/// Dense eigenvectors are used for pairs separated by at least the
/// double-detection threshold; closer pairs use the lift of the reduced kernel
/// vectors `(√η(z1), 1)` and `(-√η(z2), 1)`, and geometrically double
/// eigenvalues get an orthonormal pair.
pub fn overlap_diagnostics(
    gm: &GalerkinMatrix,
    es: &EigenSystem,
    triple: &SpectralTriple,
    pd: &ProjectionData,
    roots: Option<&BasicRoots>,
) -> Result<OverlapEntry, Error> {
    let n = triple.n;
    let dense = if triple.is_double() {
        None
    } else {
        let f = es.vector(triple.minus_index);
        let g = es.vector(triple.plus_index);
        Some((overlap(&f, &g), f, g))
    };
    let reduced = roots.filter(|r| !r.degenerate());
    let lifted = match reduced {
        Some(r) => {
            let s1 = LogComplex::new(0.5 * r.eta[0].log_magnitude, 0.5 * r.phi[0]);
            let s2 = LogComplex::new(0.5 * r.eta[1].log_magnitude, 0.5 * r.phi[1]);
            // Normalize in log form so that huge or tiny √η stays representable.
            let unit = |s: LogComplex, sign: f64| {
                let m = s.log_magnitude.max(0.0);
                (s.scale_ln(-m).to_complex() * sign, C64::new(libm::exp(-m), 0.0))
            };
            let nf = n as f64;
            let f = lift(gm, n, r.z1 + nf, unit(s1, 1.0))?;
            let g = lift(gm, n, r.z2 + nf, unit(s2, -1.0))?;
            Some((overlap(&f, &g), f, g))
        }
        None => None,
    };
    let mut double = None;
    let (source, ov, f, g) = match (&dense, &lifted) {
        (Some(d), _) => (VectorSource::Dense, d.0, d.1.clone(), d.2.clone()),
        (None, Some(l)) => (VectorSource::Lift, l.0, l.1.clone(), l.2.clone()),
        (None, None) => {
            let u = range_basis(gm, pd)?;
            double = Some(double_rank(gm, &u));
            (VectorSource::OrthogonalPair, 0.0, u.0, u.1)
        }
    };
    if triple.is_double() && double.is_none() {
        double = Some(double_rank(gm, &range_basis(gm, pd)?));
    }
    let defective = double == Some(1) && source == VectorSource::OrthogonalPair;
    let free_norms = (free_norm(gm, n, &f)?, free_norm(gm, n, &g)?);
    let (eta_abs, psi, pi_n) = match reduced {
        Some(r) => {
            let psi = r.psi();
            let pi = reduced_pi(r.eta[0].log_magnitude, r.eta[1].log_magnitude, psi);
            (Some((r.eta[0].abs(), r.eta[1].abs())), Some(psi), Some(pi))
        }
        None => (None, None, None),
    };
    let discrepancy = pi_n.map(|pi| (ov * ov - free_norms.0 * free_norms.0 * free_norms.1 * free_norms.1 * pi).abs());
    Ok(OverlapEntry {
        n,
        gamma: triple.gamma,
        source,
        overlap: ov,
        overlap_dense: dense.map(|d| d.0),
        overlap_lift: lifted.map(|l| l.0),
        free_norms,
        eta_abs,
        psi,
        pi_n,
        discrepancy,
        double_rank: double,
        defective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    RieszBasis,
    NoBasis,
    Undecided,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::RieszBasis => "riesz-basis",
            Verdict::NoBasis => "no-basis",
            Verdict::Undecided => "undecided",
        }
    }
}

/// Coefficient evidence at one `n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientEvidence {
    pub n: i64,
    pub beta_plus_star: LogComplex,
    pub beta_minus_star: LogComplex,
    pub beta_plus_zero: LogComplex,
    pub beta_minus_zero: LogComplex,
    /// `log10 |β⁻(0)/β⁺(0)|`.
    pub log10_ratio_zero: Option<f64>,
    /// Worst `max(|β^±(z)|/|β^±(0)|, |β^±(0)|/|β^±(z)|)` over the grid on `K_n`.
    pub grid_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectionSummary {
    pub n: i64,
    pub radius: f64,
    pub deviation: f64,
    pub idempotency: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub bc: BoundaryCondition,
    pub n_range: (i64, i64),
    pub usable: Vec<i64>,
    pub projections: Vec<ProjectionSummary>,
    pub overlaps: Vec<OverlapEntry>,
    pub coefficients: Vec<CoefficientEvidence>,
    pub beta_vanishes: bool,
    /// `max max(|β⁺/β⁻|, |β⁻/β⁺|)` at `z_n^*`; `None` when a single β vanishes.
    pub c_estimate: Option<f64>,
    pub nonvanishing: bool,
    pub grid_d: Option<f64>,
    /// Min and max of `|β⁻(0)/β⁺(0)|` over the tail half, per sign of `n`.
    pub tail_ratio_bounds: Vec<(i64, f64, f64)>,
    /// `sup |⟨f,g⟩|` over non-defective pairs.
    pub kappa: f64,
    /// `(1 + 16c²)/(1 + 4c)²`.
    pub delta_cap: Option<f64>,
    pub defective: Vec<i64>,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub quadrature_points: usize,
    pub solve: SolveOptions,
    /// Skip the `K_n` grid sampling.
    pub skip_grid: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { quadrature_points: QUADRATURE_POINTS, solve: SolveOptions::default(), skip_grid: false }
    }
}

/// `(1 + 16c²)/(1 + 4c)²`.
pub fn delta_cap(c: f64) -> f64 {
    (1.0 + 16.0 * c * c) / ((1.0 + 4.0 * c) * (1.0 + 4.0 * c))
}

fn ratio(a: &LogComplex, b: &LogComplex) -> Option<f64> {
    (!a.is_zero() && !b.is_zero()).then(|| (a.log_magnitude - b.log_magnitude) / core::f64::consts::LN_10)
}

/// Worst comparability constant of `β^±` over the centre, 4 axial and 4
/// diagonal points at distance `γ_n` from `z*`.
fn grid_constant(eval: &dyn CoefficientEvaluator, n: i64, z_star: C64, gamma: f64, at0: &CoefficientValue) -> Result<f64, Error> {
    let mut d: f64 = 1.0;
    for k in 0..9 {
        let z = if k == 0 { z_star } else { z_star + crate::float::cis(core::f64::consts::FRAC_PI_4 * (k - 1) as f64) * gamma };
        let c = eval.coefficients(n, z)?;
        for (x, x0) in [(c.beta_plus, at0.beta_plus), (c.beta_minus, at0.beta_minus)] {
            d = d.max(match ratio(&x, &x0) {
                Some(r) => libm::pow(10.0, r.abs()),
                None if x.is_zero() && x0.is_zero() => 1.0,
                None => f64::INFINITY,
            });
        }
    }
    Ok(d)
}

/// Trend of a sequence of `log10` ratios ordered by `|n|`: `(monotone, span)`.
fn trend(xs: &[f64]) -> (bool, f64) {
    let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min);
    let up = xs.windows(2).all(|w| w[1] >= w[0]);
    let down = xs.windows(2).all(|w| w[1] <= w[0]);
    (up || down, span)
}

/// Minimum number of usable indices for a verdict.
pub const MIN_USABLE: usize = 6;

/// Runs spectra, coefficients, basic equation and overlaps over the admissible
/// `n` with `lo ≤ |n| ≤ hi`, and classifies the root-function system.
pub fn classify(v: &FourierPotential, bc: BoundaryCondition, n_range: (i64, i64), opts: &ClassifyOptions) -> Result<ClassificationReport, Error> {
    let (lo, hi) = n_range;
    if lo < 1 || hi < lo {
        return Err(Error::InvalidArgument("n-range must satisfy 1 <= lo <= hi"));
    }
    if bc == BoundaryCondition::Dirichlet {
        return Err(Error::UnsupportedBoundary(bc));
    }
    let (gm, es, loc) = galerkin::spectrum(v, bc, hi)?;
    let projector = Projector::new(&gm)?;
    let eval = Series::new(v);
    let mut usable = Vec::new();
    let mut projections = Vec::new();
    let mut overlaps = Vec::new();
    let mut coefficients = Vec::new();
    let mut indices: Vec<i64> = (lo..=hi).filter(|&n| bc.admits(n)).flat_map(|n| [n, -n]).collect();
    indices.sort_by_key(|n| (n.abs(), *n));
    for n in indices {
        let Ok(triple) = loc.triple(n) else { continue };
        let at_star = eval.coefficients(n, triple.z_star)?;
        let at_zero = eval.coefficients(n, C64::new(0.0, 0.0))?;
        if !(at_star.converged && at_zero.converged) {
            continue;
        }
        let pd = projector.projection(n, opts.quadrature_points)?;
        let roots = basic_equation::solve(n, &eval, &opts.solve).ok();
        overlaps.push(overlap_diagnostics(&gm, &es, triple, &pd, roots.as_ref())?);
        let grid_d = if opts.skip_grid || at_zero.beta_plus.is_zero() && at_zero.beta_minus.is_zero() {
            None
        } else {
            let gamma = roots.as_ref().filter(|_| triple.is_double()).map_or(triple.gamma, |r| r.gap_f64());
            Some(grid_constant(&eval, n, triple.z_star, gamma, &at_zero)?)
        };
        coefficients.push(CoefficientEvidence {
            n,
            beta_plus_star: at_star.beta_plus,
            beta_minus_star: at_star.beta_minus,
            beta_plus_zero: at_zero.beta_plus,
            beta_minus_zero: at_zero.beta_minus,
            log10_ratio_zero: ratio(&at_zero.beta_minus, &at_zero.beta_plus),
            grid_d,
        });
        projections.push(ProjectionSummary { n, radius: pd.radius, deviation: pd.deviation, idempotency: pd.idempotency, rank: pd.rank });
        usable.push(n);
    }

    let all_zero = |c: &CoefficientEvidence| {
        c.beta_plus_star.is_zero() && c.beta_minus_star.is_zero() && c.beta_plus_zero.is_zero() && c.beta_minus_zero.is_zero()
    };
    let beta_vanishes = !coefficients.is_empty() && coefficients.iter().all(all_zero);
    let nonvanishing = coefficients.iter().all(|c| !c.beta_plus_zero.is_zero() && !c.beta_minus_zero.is_zero());
    let mut c_estimate = Some(1.0f64);
    for c in coefficients.iter().filter(|c| !all_zero(c)) {
        c_estimate = match (c_estimate, ratio(&c.beta_minus_star, &c.beta_plus_star)) {
            (Some(m), Some(r)) => Some(m.max(libm::pow(10.0, r.abs()))),
            _ => None,
        };
    }
    let grid_d = coefficients.iter().filter_map(|c| c.grid_d).reduce(f64::max);
    let defective: Vec<i64> = overlaps.iter().filter(|o| o.defective).map(|o| o.n).collect();
    let kappa = overlaps.iter().filter(|o| !o.defective).map(|o| o.overlap).fold(0.0, f64::max);

    let mut tail_ratio_bounds = Vec::new();
    let mut divergent = false;
    let mut erratic = false;
    for sign in [1, -1] {
        let side: Vec<f64> = coefficients.iter().filter(|c| c.n.signum() == sign).filter_map(|c| c.log10_ratio_zero).collect();
        let tail = &side[side.len() / 2..];
        if tail.len() < 2 {
            continue;
        }
        let (mono, span) = trend(tail);
        let lo10 = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let hi10 = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        tail_ratio_bounds.push((sign, libm::pow(10.0, lo10), libm::pow(10.0, hi10)));
        divergent |= mono && span > 1.0;
        erratic |= !mono && span > 2.0;
    }

    let (verdict, reason) = if usable.len() < MIN_USABLE {
        (Verdict::Undecided, format!("only {} usable indices", usable.len()))
    } else if beta_vanishes {
        if defective.is_empty() {
            (Verdict::RieszBasis, String::from("beta vanishes identically; double eigenvalues have orthogonal eigenvector pairs"))
        } else {
            (Verdict::Undecided, format!("beta vanishes but pairs at {defective:?} are defective"))
        }
    } else if !nonvanishing {
        (Verdict::Undecided, String::from("beta(0) vanishes at some but not all indices"))
    } else if divergent {
        (Verdict::NoBasis, format!("|beta-(0)/beta+(0)| drifts monotonically over the tail; kappa = {kappa:.6}"))
    } else if erratic {
        (Verdict::Undecided, String::from("ratio trend is non-monotone and spans more than two decades"))
    } else if kappa >= 1.0 - 1e-9 {
        (Verdict::Undecided, String::from("ratio bounded but eigenvector overlap reaches 1"))
    } else {
        (Verdict::RieszBasis, format!("|beta-(0)/beta+(0)| bounded on the tail; kappa = {kappa:.6}"))
    };

    Ok(ClassificationReport {
        bc,
        n_range,
        usable,
        projections,
        overlaps,
        coefficients,
        beta_vanishes,
        delta_cap: c_estimate.map(delta_cap),
        c_estimate,
        nonvanishing,
        grid_d,
        tail_ratio_bounds,
        kappa,
        defective,
        verdict,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn free_projection_is_exact_for_zero_potential() {
        let v = FourierPotential::zero();
        let gm = galerkin::build_matrix(&v, BoundaryCondition::PerMinus, 9).unwrap();
        let pr = Projector::new(&gm).unwrap();
        for n in [-5, 1, 7] {
            let pd = pr.projection(n, QUADRATURE_POINTS).unwrap();
            assert!(pd.deviation < 1e-14, "n={n}: {}", pd.deviation);
            assert_eq!(pd.rank, 2);
        }
    }

    #[test]
    fn equal_unit_etas_with_zero_psi_give_zero_pi() {
        assert!(reduced_pi(0.0, 0.0, 0.0).abs() < 1e-16);
        // x = y = 0 in the limit: overlap of (0,1) with (0,1) is 1.
        assert!((reduced_pi(-800.0, -800.0, 0.3) - 1.0).abs() < 1e-12);
        assert!((reduced_pi(800.0, 800.0, 0.3) - 1.0).abs() < 1e-12);
        let x: f64 = 0.3;
        let y: f64 = 2.0;
        let psi = 0.4;
        let direct = (c(1.0) - crate::float::cis(psi) * (x * y).sqrt()).norm_sqr() / ((1.0 + x) * (1.0 + y));
        assert!((reduced_pi(x.ln(), y.ln(), psi) - direct).abs() < 1e-15);
    }

    #[test]
    fn delta_cap_at_unit_constant() {
        assert!((delta_cap(1.0) - 17.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_double_gets_orthogonal_pair() {
        // q ≡ 0 makes the matrix block triangular: every pair is a double
        // eigenvalue n, and with p supported away from -2n it is semisimple.
        let v = FourierPotential::from_coeffs(&[(4, c(0.1))], &[]).unwrap();
        let (gm, es, loc) = galerkin::spectrum(&v, BoundaryCondition::PerMinus, 9).unwrap();
        let pr = Projector::new(&gm).unwrap();
        let t = loc.triple(5).unwrap();
        assert!(t.is_double());
        let pd = pr.projection(5, QUADRATURE_POINTS).unwrap();
        let e = overlap_diagnostics(&gm, &es, t, &pd, None).unwrap();
        assert_eq!(e.source, VectorSource::OrthogonalPair);
        assert_eq!(e.overlap, 0.0);
        assert_eq!(e.double_rank, Some(0));
    }

    #[test]
    fn jordan_block_is_flagged_defective() {
        // q ≡ 0 and p(-2n) ≠ 0 couples e²_n into e¹_n: a Jordan block at n.
        let v = FourierPotential::from_coeffs(&[(-6, c(0.1))], &[]).unwrap();
        let (gm, es, loc) = galerkin::spectrum(&v, BoundaryCondition::PerMinus, 5).unwrap();
        let pr = Projector::new(&gm).unwrap();
        let t = loc.triple(3).unwrap();
        let pd = pr.projection(3, QUADRATURE_POINTS).unwrap();
        let e = overlap_diagnostics(&gm, &es, t, &pd, None).unwrap();
        assert!(e.defective);
        assert_eq!(e.double_rank, Some(1));
    }

    #[test]
    fn short_range_is_undecided() {
        let v = FourierPotential::two_mode(c(0.1), c(0.1), c(0.1), c(0.1));
        let r = classify(&v, BoundaryCondition::PerMinus, (5, 7), &ClassifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Undecided);
    }
}
