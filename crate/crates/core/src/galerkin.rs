//! Fourier–Galerkin truncation of `L` under periodic and antiperiodic
//! conditions, and localization of its eigenvalues into the discs
//! `D_n = {|λ - n| < 1/4}`.
//!
//! Basis: `e¹_k = (e^{-ikx}, 0)`, `e²_k = (0, e^{ikx})`, both eigenvectors of
//! the free operator with eigenvalue `k`. In that basis the matrix is
//! `[[D, P̂], [Q̂, D]]` with `D = diag(k)`, `P̂_{kj} = p(-k-j)`, `Q̂_{kj} = q(k+j)`.

use alloc::vec::Vec;

use crate::linalg::{eig, CMatrix, EigenSystem};
use crate::{BoundaryCondition, Error, FourierPotential, C64};

/// Radius of the localization discs around integers.
pub const DISC_RADIUS: f64 = 0.25;
/// Pairs closer than this are treated as algebraically double.
pub const DOUBLE_THRESHOLD: f64 = 1e-9;
/// Modes this close to the truncation edge (beyond the potential's reach) are not trusted.
pub const EDGE_MARGIN: i64 = 8;

#[derive(Debug, Clone)]
pub struct GalerkinMatrix {
    pub bc: BoundaryCondition,
    pub k: i64,
    /// Retained mode indices in increasing order.
    pub index_list: Vec<i64>,
    /// Dimension `2·len(index_list)`: the `e¹` block first, then `e²`.
    pub matrix: CMatrix,
}

impl GalerkinMatrix {
    pub fn modes(&self) -> usize {
        self.index_list.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.modes()
    }

    fn position(&self, k: i64) -> Option<usize> {
        self.index_list.binary_search(&k).ok()
    }

    /// Coordinate of `e¹_k`.
    pub fn e1(&self, k: i64) -> Option<usize> {
        self.position(k)
    }

    /// Coordinate of `e²_k`.
    pub fn e2(&self, k: i64) -> Option<usize> {
        self.position(k).map(|i| i + self.modes())
    }

    /// Largest `|n|` whose disc is unaffected by the truncation edge.
    pub fn trusted_limit(&self, v: &FourierPotential) -> i64 {
        self.k - 2 * v.support_bound() - EDGE_MARGIN
    }

    /// Orthogonal projection onto `span{e¹_n, e²_n}`.
    pub fn free_projection(&self, n: i64) -> Result<CMatrix, Error> {
        let (i, j) = self.pair_coordinates(n)?;
        let mut p = CMatrix::zeros(self.dim(), self.dim());
        p[(i, i)] = C64::new(1.0, 0.0);
        p[(j, j)] = C64::new(1.0, 0.0);
        Ok(p)
    }

    pub fn pair_coordinates(&self, n: i64) -> Result<(usize, usize), Error> {
        match (self.e1(n), self.e2(n)) {
            (Some(i), Some(j)) => Ok((i, j)),
            _ => Err(Error::Untrusted { n, limit: self.k }),
        }
    }
}

/// Smallest admissible truncation for the potential.
pub fn min_truncation(v: &FourierPotential) -> i64 {
    v.support_bound() + 2
}

/// Truncation that keeps `|n| ≤ nmax` inside the trusted range.
pub fn truncation_for(v: &FourierPotential, nmax: i64) -> i64 {
    (nmax.abs() + 2 * v.support_bound() + EDGE_MARGIN).max(min_truncation(v)).max(16)
}

pub fn build_matrix(v: &FourierPotential, bc: BoundaryCondition, k: i64) -> Result<GalerkinMatrix, Error> {
    let parity = match bc {
        BoundaryCondition::PerPlus => 0,
        BoundaryCondition::PerMinus => 1,
        BoundaryCondition::Dirichlet => return Err(Error::UnsupportedBoundary(bc)),
    };
    let min = min_truncation(v);
    if k < min {
        return Err(Error::TruncationTooSmall { k, min });
    }
    let modes: Vec<i64> = (-k..=k).filter(|m| m.rem_euclid(2) == parity).collect();
    let matrix = matrix_on_modes(v, &modes);
    Ok(GalerkinMatrix { bc, k, index_list: modes, matrix })
}

/// The block matrix on an arbitrary sorted mode set. Using every integer
/// `|k| ≤ K` gives the 2π-periodic problem, whose spectrum is the union of
/// the periodic and antiperiodic ones.
pub fn matrix_on_modes(v: &FourierPotential, modes: &[i64]) -> CMatrix {
    let m = modes.len();
    let mut a = CMatrix::zeros(2 * m, 2 * m);
    for (i, &k) in modes.iter().enumerate() {
        a[(i, i)] = C64::new(k as f64, 0.0);
        a[(m + i, m + i)] = C64::new(k as f64, 0.0);
        for (j, &l) in modes.iter().enumerate() {
            a[(i, m + j)] = v.p(-k - l);
            a[(m + i, j)] = v.q(k + l);
        }
    }
    a
}

/// `(1/π)∫₀^π e^{isx} dx`.
fn half_period_mean(s: i64) -> C64 {
    if s == 0 {
        C64::new(1.0, 0.0)
    } else if s.rem_euclid(2) == 0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(0.0, 2.0 / (core::f64::consts::PI * s as f64))
    }
}

/// Dirichlet problem in the free Dirichlet eigenbasis
/// `u_k = (e^{-ikx}, e^{ikx})/√(2π)`, `|k| ≤ K`, all integers:
/// `⟨L u_m, u_k⟩ = m·δ_{km} + ½ Σ_j [p(j)·I(j+m+k) + q(j)·I(j-m-k)]`
/// with `I(s)` the mean of `e^{isx}` over `[0, π]`. The coupling decays only
/// like `1/|m+k|`, so truncation errors fall off algebraically in `K`.
pub fn dirichlet_matrix(v: &FourierPotential, k: i64) -> CMatrix {
    let modes: Vec<i64> = (-k..=k).collect();
    let hankel: Vec<C64> = (-2 * k..=2 * k)
        .map(|s| {
            let p: C64 = v.p_entries().map(|(j, c)| c * half_period_mean(j + s)).sum();
            let q: C64 = v.q_entries().map(|(j, c)| c * half_period_mean(j - s)).sum();
            (p + q) * 0.5
        })
        .collect();
    CMatrix::from_fn(modes.len(), modes.len(), |i, j| {
        let d = if i == j { C64::new(modes[i] as f64, 0.0) } else { C64::new(0.0, 0.0) };
        d + hankel[(modes[i] + modes[j] + 2 * k) as usize]
    })
}

/// Dirichlet eigenvalues `μ_n` for `|n| ≤ nmax`, one per disc `|λ - n| < 1/4`.
pub fn dirichlet_spectrum(v: &FourierPotential, k: i64, nmax: i64) -> Result<Vec<(i64, C64)>, Error> {
    let es = eig(&dirichlet_matrix(v, k))?;
    let mut out = Vec::new();
    for n in -nmax..=nmax {
        let inside: Vec<C64> = es.values.iter().copied().filter(|z| (z - n as f64).norm() < DISC_RADIUS).collect();
        if inside.len() != 1 {
            return Err(Error::Localization { n, found: inside.len() });
        }
        out.push((n, inside[0]));
    }
    Ok(out)
}

pub fn solve(gm: &GalerkinMatrix) -> Result<EigenSystem, Error> {
    eig(&gm.matrix)
}

/// The two eigenvalues in `D_n` plus the Dirichlet eigenvalue when known.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralTriple {
    pub n: i64,
    pub lambda_minus: C64,
    pub lambda_plus: C64,
    pub mu: Option<C64>,
    /// `|λ⁺ - λ⁻|` as computed; below [`DOUBLE_THRESHOLD`] this is rounding noise.
    pub gamma: f64,
    pub delta: Option<f64>,
    pub z_star: C64,
    /// Eigen-system columns holding `λ⁻` and `λ⁺`.
    pub minus_index: usize,
    pub plus_index: usize,
}

impl SpectralTriple {
    pub fn new(n: i64, a: (usize, C64), b: (usize, C64)) -> Self {
        let (lo, hi) = if order(a.1, b.1) { (a, b) } else { (b, a) };
        let mid = (lo.1 + hi.1) * 0.5;
        Self {
            n,
            lambda_minus: lo.1,
            lambda_plus: hi.1,
            mu: None,
            gamma: (hi.1 - lo.1).norm(),
            delta: None,
            z_star: mid - n as f64,
            minus_index: lo.0,
            plus_index: hi.0,
        }
    }

    pub fn with_mu(mut self, mu: C64) -> Self {
        self.delta = Some((mu - self.midpoint()).norm());
        self.mu = Some(mu);
        self
    }

    pub fn midpoint(&self) -> C64 {
        (self.lambda_minus + self.lambda_plus) * 0.5
    }

    pub fn is_double(&self) -> bool {
        self.gamma < DOUBLE_THRESHOLD
    }
}

/// `true` when `a` precedes `b`: smaller real part, ties broken by imaginary part.
pub fn order(a: C64, b: C64) -> bool {
    a.re < b.re || (a.re == b.re && a.im <= b.im)
}

/// Sorts a pair into `(λ⁻, λ⁺)`.
pub fn order_pair(a: C64, b: C64) -> (C64, C64) {
    if order(a, b) {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone)]
pub struct Localization {
    pub bc: BoundaryCondition,
    pub triples: Vec<SpectralTriple>,
    /// Largest `|n|` whose disc does not hold exactly two eigenvalues; pairs
    /// are only formed above it. `-1` when every disc is regular.
    pub n_low: i64,
    /// Unpaired eigenvalues with `|Re λ| ≤ n_low + 1/2`.
    pub rectangle: Vec<C64>,
    /// Eigenvalues beyond the requested window, polluted by truncation.
    pub edge: Vec<C64>,
    pub nmax: i64,
    pub occupancy: Vec<(i64, usize)>,
}

impl Localization {
    pub fn triple(&self, n: i64) -> Result<&SpectralTriple, Error> {
        if let Some(t) = self.triples.iter().find(|t| t.n == n) {
            return Ok(t);
        }
        let found = self.occupancy.iter().find(|(m, _)| *m == n).map(|(_, c)| *c);
        match found {
            Some(found) => Err(Error::Localization { n, found }),
            None => Err(Error::Untrusted { n, limit: self.nmax }),
        }
    }

    pub fn triples_in(&self, lo: i64, hi: i64) -> impl Iterator<Item = &SpectralTriple> {
        self.triples.iter().filter(move |t| t.n.abs() >= lo && t.n.abs() <= hi)
    }
}

/// Assigns eigenvalues to discs for all admissible `|n| ≤ nmax`.
pub fn localize(gm: &GalerkinMatrix, es: &EigenSystem, v: &FourierPotential, nmax: i64) -> Result<Localization, Error> {
    let limit = gm.trusted_limit(v);
    if nmax > limit {
        return Err(Error::Untrusted { n: nmax, limit });
    }
    let admissible: Vec<i64> = (-nmax..=nmax).filter(|&n| gm.bc.admits(n)).collect();
    let mut members: Vec<(i64, Vec<usize>)> = Vec::with_capacity(admissible.len());
    for &n in &admissible {
        let inside: Vec<usize> = es
            .values
            .iter()
            .enumerate()
            .filter(|(_, z)| (**z - n as f64).norm() < DISC_RADIUS)
            .map(|(i, _)| i)
            .collect();
        members.push((n, inside));
    }
    let n_low = members.iter().filter(|(_, m)| m.len() != 2).map(|(n, _)| n.abs()).max().unwrap_or(-1);
    let mut triples = Vec::new();
    for (n, m) in &members {
        if n.abs() > n_low && m.len() == 2 {
            triples.push(SpectralTriple::new(*n, (m[0], es.values[m[0]]), (m[1], es.values[m[1]])));
        }
    }
    let paired: Vec<usize> = triples.iter().flat_map(|t| [t.minus_index, t.plus_index]).collect();
    let mut rectangle = Vec::new();
    let mut edge = Vec::new();
    for (i, z) in es.values.iter().enumerate() {
        if paired.contains(&i) {
            continue;
        }
        if z.re.abs() <= n_low as f64 + 0.5 {
            rectangle.push(*z);
        } else {
            edge.push(*z);
        }
    }
    let occupancy = members.iter().map(|(n, m)| (*n, m.len())).collect();
    Ok(Localization { bc: gm.bc, triples, n_low, rectangle, edge, nmax, occupancy })
}

/// Sequences indexed by `n`; `None` where no trusted pair exists.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSequences {
    pub n: Vec<i64>,
    pub gamma: Vec<Option<f64>>,
    pub delta: Vec<Option<f64>>,
    pub z_star: Vec<Option<C64>>,
}

pub fn gap_and_deviation_sequences(loc: &Localization) -> GapSequences {
    let n: Vec<i64> = (-loc.nmax..=loc.nmax).filter(|&n| loc.bc.admits(n)).collect();
    let find = |m: i64| loc.triples.iter().find(|t| t.n == m);
    GapSequences {
        gamma: n.iter().map(|&m| find(m).map(|t| t.gamma)).collect(),
        delta: n.iter().map(|&m| find(m).and_then(|t| t.delta)).collect(),
        z_star: n.iter().map(|&m| find(m).map(|t| t.z_star)).collect(),
        n,
    }
}

/// Builds, solves and localizes in one step with a truncation sized for `nmax`.
pub fn spectrum(v: &FourierPotential, bc: BoundaryCondition, nmax: i64) -> Result<(GalerkinMatrix, EigenSystem, Localization), Error> {
    let gm = build_matrix(v, bc, truncation_for(v, nmax))?;
    let es = solve(&gm)?;
    let loc = localize(&gm, &es, v, nmax)?;
    Ok((gm, es, loc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn free_operator_matrix_is_diagonal_with_doubled_entries() {
        let gm = build_matrix(&FourierPotential::zero(), BoundaryCondition::PerPlus, 2).unwrap();
        assert_eq!(gm.index_list, [-2, 0, 2]);
        let d: Vec<f64> = (0..6).map(|i| gm.matrix[(i, i)].re).collect();
        assert_eq!(d, [-2.0, 0.0, 2.0, -2.0, 0.0, 2.0]);
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(gm.matrix[(i, j)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn small_truncation_is_refused() {
        let v = FourierPotential::two_mode(c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0));
        assert_eq!(
            build_matrix(&v, BoundaryCondition::PerMinus, 3).unwrap_err(),
            Error::TruncationTooSmall { k: 3, min: 4 }
        );
        assert!(build_matrix(&v, BoundaryCondition::Dirichlet, 8).is_err());
    }

    #[test]
    fn two_mode_blocks_have_two_anti_diagonal_bands() {
        let v = FourierPotential::two_mode(c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0), c(0.4, 0.0));
        let gm = build_matrix(&v, BoundaryCondition::PerMinus, 5).unwrap();
        let m = gm.modes();
        for (i, &k) in gm.index_list.iter().enumerate() {
            for (j, &l) in gm.index_list.iter().enumerate() {
                let p = gm.matrix[(i, m + j)];
                let q = gm.matrix[(m + i, j)];
                let on_band = (k + l).abs() == 2;
                assert_eq!(p.norm() != 0.0, on_band, "P block at ({k},{l})");
                assert_eq!(q.norm() != 0.0, on_band, "Q block at ({k},{l})");
            }
        }
    }

    #[test]
    fn free_spectrum_gives_double_integers() {
        let (_, _, loc) = spectrum(&FourierPotential::zero(), BoundaryCondition::PerMinus, 9).unwrap();
        assert_eq!(loc.n_low, -1);
        assert_eq!(loc.triples.len(), 10);
        for t in &loc.triples {
            assert!(t.gamma < 1e-12 && t.z_star.norm() < 1e-12);
        }
    }

    #[test]
    fn ordering_follows_real_then_imaginary_part() {
        let t = SpectralTriple::new(3, (0, c(3.1, 0.0)), (1, c(2.9, 0.0)));
        assert_eq!((t.lambda_minus, t.minus_index), (c(2.9, 0.0), 1));
        let u = SpectralTriple::new(3, (0, c(3.0, 0.1)), (1, c(3.0, -0.1)));
        assert_eq!(u.lambda_minus, c(3.0, -0.1));
        assert!((u.z_star).norm() < 1e-15);
    }

    #[test]
    fn free_dirichlet_spectrum_sits_on_the_integers() {
        let mu = dirichlet_spectrum(&FourierPotential::zero(), 6, 4).unwrap();
        assert_eq!(mu.len(), 9);
        for (n, z) in mu {
            assert!((z - n as f64).norm() < 1e-13, "{n}: {z}");
        }
    }

    #[test]
    fn dirichlet_coupling_uses_half_period_means() {
        let v = FourierPotential::from_coeffs(&[(2, c(0.3, 0.0))], &[]).unwrap();
        let m = dirichlet_matrix(&v, 1);
        // s = j + m + k = 2 + 0 + 0 is even and nonzero; 2 + 1 + 0 is odd.
        assert!(m[(1, 1)].norm() < 1e-16);
        let expected = c(0.0, 0.15 * 2.0 / (3.0 * core::f64::consts::PI));
        assert!((m[(1, 2)] - expected).norm() < 1e-16);
        assert!((m[(2, 2)] - c(1.0, 0.0)).norm() < 1e-16);
    }
}
