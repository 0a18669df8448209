//! Leading-order asymptotics of `β_n^±(0)` for the two-mode potential and the
//! correction map `A_N(v) = v + Φ_N(v)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coefficients::{eval_s, CoefficientEvaluator};
use crate::logcomplex::{ln_factorial, LogComplex};
use crate::{BoundaryCondition, Error, FourierPotential, C64};

/// Magnitudes below this are not representable as plain coefficients and are
/// flushed to zero when building potentials.
pub const PLAIN_FLOOR: f64 = 1e-250;

/// Leading terms `(β_n^+(0), β_n^-(0))` for `P = a e^{2ix} + b e^{-2ix}`,
/// `Q = A e^{2ix} + B e^{-2ix}`:
/// `β⁺ = A^{(n+1)/2} a^{(n-1)/2} 4^{1-n} / ((n-1)/2)!²` and
/// `β⁻ = b^{(n+1)/2} B^{(n-1)/2} 4^{1-n} / ((n-1)/2)!²`.
#[allow(non_snake_case)]
pub fn closed_form_beta(n: i64, a: C64, b: C64, A: C64, B: C64) -> Result<(LogComplex, LogComplex), Error> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidArgument("closed form needs odd n >= 1"));
    }
    let hi = (n + 1) / 2;
    let lo = (n - 1) / 2;
    let common = -((n - 1) as f64) * core::f64::consts::LN_2 * 2.0 - 2.0 * ln_factorial(lo as u64);
    let lc = LogComplex::from;
    let plus = (lc(A).powi(hi) * lc(a).powi(lo)).scale_ln(common);
    let minus = (lc(b).powi(hi) * lc(B).powi(lo)).scale_ln(common);
    Ok((plus, minus))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticsRow {
    pub n: i64,
    pub computed_plus: LogComplex,
    pub computed_minus: LogComplex,
    pub closed_plus: LogComplex,
    pub closed_minus: LogComplex,
    /// `computed / closed form`.
    pub ratio_plus: LogComplex,
    pub ratio_minus: LogComplex,
    /// `max |ratio - 1|` over both signs.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticsTable {
    pub rows: Vec<AsymptoticsRow>,
    /// Slope of `ln(envelope)` against `ln n`, where the envelope is the
    /// running maximum of the deviations taken from the largest `n` down.
    pub envelope_exponent: Option<f64>,
    pub envelope_decreasing: bool,
}

fn deviation(r: &LogComplex) -> f64 {
    (r.to_complex() - 1.0).norm()
}

/// Computed `β_n^±(0)` against the closed forms over the given odd `n`.
#[allow(non_snake_case)]
pub fn compare_asymptotics(a: C64, b: C64, A: C64, B: C64, ns: &[i64]) -> Result<AsymptoticsTable, Error> {
    let v = FourierPotential::two_mode(a, b, A, B);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let (cp, cm) = closed_form_beta(n, a, b, A, B)?;
        let s = eval_s(&v, n, C64::new(0.0, 0.0), None, None)?;
        let ratio_plus = s.beta_plus / cp;
        let ratio_minus = s.beta_minus / cm;
        rows.push(AsymptoticsRow {
            n,
            computed_plus: s.beta_plus,
            computed_minus: s.beta_minus,
            closed_plus: cp,
            closed_minus: cm,
            deviation: deviation(&ratio_plus).max(deviation(&ratio_minus)),
            ratio_plus,
            ratio_minus,
        });
    }
    rows.sort_by_key(|r| r.n);
    let (envelope_exponent, envelope_decreasing) = envelope_fit(&rows.iter().map(|r| (r.n, r.deviation)).collect::<Vec<_>>());
    Ok(AsymptoticsTable { rows, envelope_exponent, envelope_decreasing })
}

/// Least-squares slope of the log upper envelope against `ln n`.
pub fn envelope_fit(points: &[(i64, f64)]) -> (Option<f64>, bool) {
    let mut env: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    let mut running: f64 = 0.0;
    for &(n, d) in points.iter().rev() {
        running = running.max(d);
        env.push((libm::log(n as f64), running));
    }
    env.reverse();
    let decreasing = env.windows(2).all(|w| w[1].1 <= w[0].1);
    let pts: Vec<(f64, f64)> = env.iter().filter(|(_, y)| *y > 0.0).map(|&(x, y)| (x, libm::log(y))).collect();
    if pts.len() < 2 {
        return (None, decreasing);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    ((sxx > 0.0).then(|| sxy / sxx), decreasing)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MapResult {
    pub n_cut: i64,
    pub nmax: i64,
    /// `Φ_N`: `β_n^-(z_n^*) - p(-2n)` on mode `-2n` of `P` and
    /// `β_n^+(z_n^*) - q(2n)` on mode `2n` of `Q`, for `N < |n| ≤ nmax`.
    pub phi: FourierPotential,
    pub a_of_v: FourierPotential,
    /// Modes whose replacement fell below [`PLAIN_FLOOR`] and was stored as zero.
    pub flushed: Vec<i64>,
}

fn plain(x: LogComplex) -> Option<C64> {
    (!x.is_zero() && x.log_magnitude >= libm::log(PLAIN_FLOOR)).then(|| x.to_complex())
}

/// `Φ_N(v)` and `A_N(v)` from the centres `z_n^*` of all `N < |n| ≤ nmax`.
pub fn phi_map(
    v: &FourierPotential,
    n_cut: i64,
    nmax: i64,
    eval: &dyn CoefficientEvaluator,
    z_star: &BTreeMap<i64, C64>,
) -> Result<MapResult, Error> {
    if n_cut < 0 || nmax < n_cut {
        return Err(Error::InvalidArgument("need 0 <= N <= nmax"));
    }
    let range: Vec<i64> = (-nmax..=nmax).filter(|n| n.abs() > n_cut).collect();
    let missing: Vec<i64> = range.iter().copied().filter(|n| !z_star.contains_key(n)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingData(missing));
    }
    let mut phi_p = Vec::new();
    let mut phi_q = Vec::new();
    let mut new_p = Vec::new();
    let mut new_q = Vec::new();
    let mut flushed = Vec::new();
    for &n in &range {
        let c = eval.coefficients(n, z_star[&n])?;
        let (bm, bp) = (plain(c.beta_minus), plain(c.beta_plus));
        if bm.is_none() && !c.beta_minus.is_zero() {
            flushed.push(-2 * n);
        }
        if bp.is_none() && !c.beta_plus.is_zero() {
            flushed.push(2 * n);
        }
        let zero = C64::new(0.0, 0.0);
        let (bm, bp) = (bm.unwrap_or(zero), bp.unwrap_or(zero));
        phi_p.push((-2 * n, bm - v.p(-2 * n)));
        phi_q.push((2 * n, bp - v.q(2 * n)));
        new_p.push((-2 * n, bm));
        new_q.push((2 * n, bp));
    }
    let replaced = |k: i64| k.abs() > 2 * n_cut && k.abs() <= 2 * nmax;
    new_p.extend(v.p_entries().filter(|(k, _)| !replaced(*k)));
    new_q.extend(v.q_entries().filter(|(k, _)| !replaced(*k)));
    Ok(MapResult {
        n_cut,
        nmax,
        phi: FourierPotential::from_coeffs(&phi_p, &phi_q)?,
        a_of_v: FourierPotential::from_coeffs(&new_p, &new_q)?,
        flushed,
    })
}

/// `z_n^*` for all `N < |n| ≤ nmax` from periodic (even `n`) and antiperiodic
/// (odd `n`) Galerkin spectra.
pub fn centres_from_spectra(v: &FourierPotential, n_cut: i64, nmax: i64) -> Result<BTreeMap<i64, C64>, Error> {
    let mut out = BTreeMap::new();
    for bc in [BoundaryCondition::PerPlus, BoundaryCondition::PerMinus] {
        let (_, _, loc) = crate::galerkin::spectrum(v, bc, nmax)?;
        for t in loc.triples.iter().filter(|t| t.n.abs() > n_cut) {
            out.insert(t.n, t.z_star);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Series;
    use crate::potentials::{classify_symmetry, SymmetryClass};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn closed_form_small_cases() {
        let one = c(1.0, 0.0);
        let (p1, m1) = closed_form_beta(1, one, one, one, one).unwrap();
        assert!((p1.to_complex() - one).norm() < 1e-15 && (m1.to_complex() - one).norm() < 1e-15);
        let (p5, _) = closed_form_beta(5, one, one, one, one).unwrap();
        assert!((p5.abs() - 1.0 / 1024.0).abs() < 1e-18);
        assert!(closed_form_beta(4, one, one, one, one).is_err());
    }

    #[test]
    fn equal_products_give_constant_ratio() {
        // |aA| = |bB|: the ratio |β⁻/β⁺| = |b/A|·|bB/(aA)|^{(n-1)/2} stays at |b/A|.
        let (a, aa) = (c(0.2, 0.1), c(0.0, 0.1));
        let b = c(0.05, 0.0);
        let bb = c(-0.3, 0.4) * ((a * aa).norm() / (b.norm() * 0.5));
        for n in [3, 7, 11, 41] {
            let (p, m) = closed_form_beta(n, a, b, aa, bb).unwrap();
            assert!((m.log_magnitude - p.log_magnitude - (b.norm() / aa.norm()).ln()).abs() < 1e-12);
        }
        let one = c(0.1, 0.0);
        let (p, m) = closed_form_beta(9, one, c(0.0, 0.1), c(0.0, -0.1), one).unwrap();
        assert!((m.log_magnitude - p.log_magnitude).abs() < 1e-13);
    }

    #[test]
    fn zero_potential_maps_to_zero() {
        let v = FourierPotential::zero();
        let z: BTreeMap<i64, C64> = (-6..=6).map(|n| (n, c(0.0, 0.0))).collect();
        let m = phi_map(&v, 2, 6, &Series::new(&v), &z).unwrap();
        assert!(m.phi.is_zero() && m.a_of_v.is_zero());
    }

    #[test]
    fn missing_centres_are_listed() {
        let v = FourierPotential::zero();
        let z: BTreeMap<i64, C64> = [(3, c(0.0, 0.0))].into_iter().collect();
        match phi_map(&v, 2, 4, &Series::new(&v), &z) {
            Err(Error::MissingData(m)) => assert_eq!(m, [-4, -3, 4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn map_preserves_conjugate_symmetry() {
        for t in [1.0, -1.0] {
            let v = FourierPotential::decaying_xt(t, 0.08, 0.6, 4).unwrap();
            let z = centres_from_spectra(&v, 3, 10).unwrap();
            let m = phi_map(&v, 3, 10, &Series::new(&v), &z).unwrap();
            match classify_symmetry(&m.a_of_v, 1e-10) {
                SymmetryClass::Xt { t: got, .. } => assert!((got - t).abs() < 1e-10),
                other => panic!("t={t}: {other:?}"),
            }
        }
    }
}
