//! Spectral steps shared by the subcommands and the experiments.

use dirac_core::basic_equation::{solve, BasicRoots, SolveOptions};
use dirac_core::coefficients::Series;
use dirac_core::galerkin::{self, Localization, SpectralTriple, DISC_RADIUS};
use dirac_core::linalg::eig;
use dirac_core::monodromy::find_eigenvalue_near_tol;
use dirac_core::{BoundaryCondition, Error, FourierPotential, C64};
use rayon::prelude::*;

/// Agreement required between independent eigenvalue computations.
pub const CROSS_TOL: f64 = 1e-6;
/// Agreement required between the Galerkin gap and `|z1 - z2|`.
pub const GAP_TOL: f64 = 1e-8;

pub fn periodic_bc(bc: BoundaryCondition) -> Result<BoundaryCondition, Error> {
    match bc {
        BoundaryCondition::Dirichlet => Err(Error::UnsupportedBoundary(bc)),
        bc => Ok(bc),
    }
}

/// Galerkin localization with an explicit or automatic truncation.
pub fn galerkin_localization(v: &FourierPotential, bc: BoundaryCondition, k: Option<i64>, nmax: i64) -> Result<Localization, Error> {
    let k = k.unwrap_or_else(|| galerkin::truncation_for(v, nmax));
    let gm = galerkin::build_matrix(v, bc, k)?;
    let es = galerkin::solve(&gm)?;
    galerkin::localize(&gm, &es, v, nmax)
}

/// Dirichlet eigenvalue per disc from the Dirichlet Galerkin matrix; `None`
/// where the disc does not hold exactly one eigenvalue.
pub fn galerkin_dirichlet(v: &FourierPotential, k: i64, ns: &[i64]) -> Result<Vec<(i64, Option<C64>)>, Error> {
    let es = eig(&galerkin::dirichlet_matrix(v, k))?;
    Ok(ns
        .iter()
        .map(|&n| {
            let mut inside = es.values.iter().filter(|z| (**z - n as f64).norm() < DISC_RADIUS);
            match (inside.next(), inside.next()) {
                (Some(&z), None) => (n, Some(z)),
                _ => (n, None),
            }
        })
        .collect())
}

/// Truncation for the Dirichlet Galerkin matrix; its coupling decays only
/// algebraically, so it gets more room than the periodic one.
pub fn dirichlet_truncation(v: &FourierPotential, k: Option<i64>, nmax: i64) -> i64 {
    k.unwrap_or_else(|| (2 * galerkin::truncation_for(v, nmax)).max(64))
}

/// `(λ⁻, λ⁺)` and `μ` near every `n` from the characteristic functions.
pub fn monodromy_triples(v: &FourierPotential, bc: BoundaryCondition, ns: &[i64], tol: f64) -> Result<Vec<SpectralTriple>, Error> {
    ns.par_iter()
        .map(|&n| {
            let per = find_eigenvalue_near_tol(v, n, bc, tol)?;
            let dir = find_eigenvalue_near_tol(v, n, BoundaryCondition::Dirichlet, tol)?;
            Ok(SpectralTriple::new(n, (0, per.roots[0]), (1, per.roots[1])).with_mu(dir.roots[0]))
        })
        .collect()
}

pub fn monodromy_dirichlet(v: &FourierPotential, ns: &[i64], tol: f64) -> Result<Vec<(i64, C64)>, Error> {
    ns.par_iter()
        .map(|&n| Ok((n, find_eigenvalue_near_tol(v, n, BoundaryCondition::Dirichlet, tol)?.roots[0])))
        .collect()
}

pub fn basic_roots(v: &FourierPotential, ns: &[i64], opts: &SolveOptions) -> Result<Vec<BasicRoots>, Error> {
    ns.par_iter().map(|&n| solve(n, &Series::new(v), opts)).collect()
}

/// Distance between two unordered pairs.
pub fn pair_distance(a: (C64, C64), b: (C64, C64)) -> f64 {
    let straight = (a.0 - b.0).norm().max((a.1 - b.1).norm());
    let crossed = (a.0 - b.1).norm().max((a.1 - b.0).norm());
    straight.min(crossed)
}

/// `{n + z1, n + z2}` against the Galerkin pair.
pub fn basic_distance(roots: &BasicRoots, t: &SpectralTriple) -> f64 {
    let n = roots.n as f64;
    pair_distance((roots.z1 + n, roots.z2 + n), (t.lambda_minus, t.lambda_plus))
}

/// `|γ_n - |z1 - z2||`, or `None` for a double pair where the Galerkin
/// gap is rounding noise and only the basic-equation gap is meaningful.
pub fn gap_difference(roots: &BasicRoots, t: &SpectralTriple) -> Option<f64> {
    (!t.is_double()).then(|| (t.gamma - roots.gap_f64()).abs())
}

/// `±lo ..= ±hi` restricted to the indices `bc` admits, in increasing order.
pub fn signed_range(lo: i64, hi: i64, bc: BoundaryCondition) -> Vec<i64> {
    let mut ns: Vec<i64> = (lo..=hi).flat_map(|n| [-n, n]).filter(|&n| bc.admits(n)).collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// Parses `a:b` (inclusive).
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range {s:?} must look like a:b"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_match_in_either_order() {
        let a = (C64::new(1.0, 0.0), C64::new(2.0, 0.0));
        let b = (C64::new(2.0, 1e-3), C64::new(1.0, 0.0));
        assert!((pair_distance(a, b) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5:9"), Ok((5, 9)));
        assert_eq!(parse_range("-3:-1"), Ok((-3, -1)));
        assert!(parse_range("9:5").is_err());
        assert!(parse_range("5").is_err());
        assert_eq!(signed_range(1, 4, BoundaryCondition::PerMinus), [-3, -1, 1, 3]);
        assert_eq!(signed_range(0, 2, BoundaryCondition::PerPlus), [-2, 0, 2]);
    }

    #[test]
    fn free_dirichlet_eigenvalues_are_integers() {
        let v = FourierPotential::zero();
        for (n, mu) in galerkin_dirichlet(&v, 8, &[-2, 0, 5]).unwrap() {
            assert!((mu.unwrap() - n as f64).norm() < 1e-13);
        }
    }
}
