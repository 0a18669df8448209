//! The Lyapunov–Schmidt coefficients near `n`:
//! `α_n(z) = S¹¹`, `β_n^+(z) = S²¹`, `β_n^-(z) = S¹²`, as path sums over
//! chains of Fourier modes `j ≢ n` weighted by `1/(n - j + z)`.
//!
//! Every term is a product along a chain `n → j₁ → … → j_L → n` whose factors
//! alternate between `q(a + b)` and `p(-a - b)`:
//!
//! | series      | first factor | chain length `L` |
//! |-------------|--------------|------------------|
//! | `S²¹_{2ν}`   | `q`          | `2ν`             |
//! | `S¹²_{2ν}`   | `p`          | `2ν`             |
//! | `S¹¹_{2ν+1}` | `p`          | `2ν + 1`         |
//! | `S²²_{2ν+1}` | `q`          | `2ν + 1`         |
//!
//! [`eval_s`] sums these by iterated sparse Hankel products with per-order
//! rescaling; [`eval_s_bruteforce`] enumerates the chains directly.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::logcomplex::LogComplex;
use crate::potentials::{classify_symmetry, tail_energy, SymmetryClass, SYMMETRY_TOL};
use crate::{Error, FourierPotential, C64};

/// Largest `|z|` accepted by the series.
pub const MAX_Z: f64 = 0.5;
/// Relative contribution below which an order counts as negligible.
const NEGLIGIBLE: f64 = 1e-16;

/// Index window of the path sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesWindow {
    pub n: i64,
    pub z: C64,
    pub nu_max: usize,
    pub window_buf: i64,
    /// All `j ≡ n (mod 2)`, `j ≠ n`, `|j| ≤ |n| + 2·window_buf`, increasing.
    pub indices: Vec<i64>,
}

pub fn default_window_buf(v: &FourierPotential) -> i64 {
    2 * v.support_bound() + 4
}

pub fn default_nu_max(n: i64) -> usize {
    n.unsigned_abs() as usize + 6
}

impl SeriesWindow {
    pub fn new(v: &FourierPotential, n: i64, z: C64, nu_max: Option<usize>, window_buf: Option<i64>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidArgument("the coefficient series are defined for n != 0"));
        }
        if !(z.norm() <= MAX_Z) {
            return Err(Error::InvalidArgument("|z| must not exceed 1/2"));
        }
        let window_buf = window_buf.unwrap_or_else(|| default_window_buf(v));
        if window_buf < 0 {
            return Err(Error::InvalidArgument("window_buf must be non-negative"));
        }
        let r = n.abs() + 2 * window_buf;
        let start = if (-r - n).rem_euclid(2) == 0 { -r } else { -r + 1 };
        let indices = (start..=r).step_by(2).filter(|&j| j != n).collect();
        Ok(Self { n, z, nu_max: nu_max.unwrap_or_else(|| default_nu_max(n)), window_buf, indices })
    }

    fn position(&self, j: i64) -> Option<usize> {
        self.indices.binary_search(&j).ok()
    }

    fn resolvent(&self) -> Vec<C64> {
        self.indices.iter().map(|&j| (self.z + (self.n - j) as f64).inv()).collect()
    }
}

/// Terms of one order: `S¹¹_{2ν+1}`, `S²²_{2ν+1}`, `S²¹_{2ν}`, `S¹²_{2ν}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderTerms {
    pub nu: usize,
    pub s11: LogComplex,
    pub s22: LogComplex,
    pub s21: LogComplex,
    pub s12: LogComplex,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientValue {
    pub n: i64,
    pub z: C64,
    /// `S¹¹`.
    pub alpha: LogComplex,
    /// `S²²`, kept separately for the identity `S¹¹ = S²²`.
    pub s22: LogComplex,
    /// `S²¹`.
    pub beta_plus: LogComplex,
    /// `S¹²`.
    pub beta_minus: LogComplex,
    pub orders: Vec<OrderTerms>,
    /// Largest ratio of the last two nonzero terms over the four series.
    pub tail_ratio: f64,
    /// Largest `|last term| / |sum|` over the four series.
    pub tail_estimate: f64,
    pub converged: bool,
    /// Highest order actually summed (early stop may leave it below `nu_max`).
    pub nu_used: usize,
}

impl CoefficientValue {
    pub fn alpha_c(&self) -> C64 {
        self.alpha.to_complex()
    }

    pub fn beta_plus_c(&self) -> C64 {
        self.beta_plus.to_complex()
    }

    pub fn beta_minus_c(&self) -> C64 {
        self.beta_minus.to_complex()
    }

    /// `β⁺β⁻`, zero only when one factor vanishes exactly.
    pub fn beta_product(&self) -> LogComplex {
        self.beta_plus * self.beta_minus
    }

    fn from_orders(n: i64, z: C64, orders: Vec<OrderTerms>) -> Self {
        let pick = |f: fn(&OrderTerms) -> LogComplex| orders.iter().map(f).collect::<Vec<_>>();
        let series = [pick(|o| o.s11), pick(|o| o.s22), pick(|o| o.s21), pick(|o| o.s12)];
        let sums: Vec<LogComplex> = series.iter().map(|s| LogComplex::sum(s)).collect();
        let mut tail_ratio: f64 = 0.0;
        let mut tail_estimate: f64 = 0.0;
        for (s, total) in series.iter().zip(&sums) {
            let nz: Vec<&LogComplex> = s.iter().filter(|t| !t.is_zero()).collect();
            if nz.len() >= 2 {
                let last = nz[nz.len() - 1];
                let prev = nz[nz.len() - 2];
                tail_ratio = tail_ratio.max(libm::exp(last.log_magnitude - prev.log_magnitude));
            }
            if let (Some(last), false) = (s.last(), total.is_zero()) {
                if !last.is_zero() {
                    tail_estimate = tail_estimate.max(libm::exp(last.log_magnitude - total.log_magnitude));
                }
            }
        }
        let nu_used = orders.last().map_or(0, |o| o.nu);
        Self {
            n,
            z,
            alpha: sums[0],
            s22: sums[1],
            beta_plus: sums[2],
            beta_minus: sums[3],
            orders,
            tail_ratio,
            tail_estimate,
            converged: tail_ratio < 1.0,
            nu_used,
        }
    }
}

/// Sparse Hankel operator `H_{ab} = c(±(j_a + j_b))` on the window.
struct Hankel {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Hankel {
    /// `p_hat = true` gives `P̂_{ab} = p(-j_a - j_b)`, otherwise `Q̂_{ab} = q(j_a + j_b)`.
    fn new(v: &FourierPotential, w: &SeriesWindow, p_hat: bool) -> Self {
        let entries: Vec<(i64, C64)> = if p_hat { v.p_entries().collect() } else { v.q_entries().collect() };
        let rows = w
            .indices
            .iter()
            .map(|&ja| {
                entries
                    .iter()
                    .filter_map(|&(k, c)| {
                        // p(-ja - jb) = p(k) ⇔ jb = -k - ja;  q(ja + jb) = q(k) ⇔ jb = k - ja
                        let jb = if p_hat { -k - ja } else { k - ja };
                        w.position(jb).map(|b| (b, c))
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// `D·H·x`.
    fn apply(&self, d: &[C64], x: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .zip(d)
            .map(|(row, &da)| da * row.iter().map(|&(b, c)| c * x[b]).sum::<C64>())
            .collect()
    }
}

/// A vector together with a logarithmic scale factor.
struct Scaled {
    x: Vec<C64>,
    ln_scale: f64,
}

impl Scaled {
    fn renormalize(&mut self) {
        let m = self.x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if m > 0.0 && !(1e-100..=1e100).contains(&m) {
            self.x.iter_mut().for_each(|z| *z /= m);
            self.ln_scale += libm::log(m);
        }
    }

    fn dot(&self, row: &[C64]) -> LogComplex {
        let s: C64 = row.iter().zip(&self.x).map(|(a, b)| a * b).sum();
        LogComplex::from(s).scale_ln(self.ln_scale)
    }
}

fn negligible(term: &LogComplex, total: &LogComplex) -> bool {
    term.is_zero() || (!total.is_zero() && term.log_magnitude - total.log_magnitude < libm::log(NEGLIGIBLE))
}

/// Series values by iterated Hankel products, up to order `nu_max`, stopping
/// early once three consecutive orders are negligible in all four series.
pub fn eval_s(v: &FourierPotential, n: i64, z: C64, nu_max: Option<usize>, window_buf: Option<i64>) -> Result<CoefficientValue, Error> {
    let w = SeriesWindow::new(v, n, z, nu_max, window_buf)?;
    let d = w.resolvent();
    let ph = Hankel::new(v, &w, true);
    let qh = Hankel::new(v, &w, false);
    let qrow: Vec<C64> = w.indices.iter().map(|&j| v.q(n + j)).collect();
    let prow: Vec<C64> = w.indices.iter().map(|&j| v.p(-n - j)).collect();
    let mut chain_a = Scaled { x: d.iter().zip(&qrow).map(|(a, b)| a * b).collect(), ln_scale: 0.0 };
    let mut chain_b = Scaled { x: d.iter().zip(&prow).map(|(a, b)| a * b).collect(), ln_scale: 0.0 };
    let mut orders = Vec::with_capacity(w.nu_max + 1);
    orders.push(OrderTerms {
        nu: 0,
        s11: chain_a.dot(&prow),
        s22: chain_b.dot(&qrow),
        s21: LogComplex::from(v.q(2 * n)),
        s12: LogComplex::from(v.p(-2 * n)),
    });
    let mut sums = [orders[0].s11, orders[0].s22, orders[0].s21, orders[0].s12];
    let mut quiet = 0;
    for nu in 1..=w.nu_max {
        chain_a.x = ph.apply(&d, &chain_a.x);
        chain_a.renormalize();
        let s21 = chain_a.dot(&qrow);
        chain_a.x = qh.apply(&d, &chain_a.x);
        chain_a.renormalize();
        let s11 = chain_a.dot(&prow);
        chain_b.x = qh.apply(&d, &chain_b.x);
        chain_b.renormalize();
        let s12 = chain_b.dot(&prow);
        chain_b.x = ph.apply(&d, &chain_b.x);
        chain_b.renormalize();
        let s22 = chain_b.dot(&qrow);
        let terms = [s11, s22, s21, s12];
        for (s, t) in sums.iter_mut().zip(&terms) {
            *s = s.add(t);
        }
        orders.push(OrderTerms { nu, s11, s22, s21, s12 });
        let all_nonzero = sums.iter().all(|s| !s.is_zero());
        if all_nonzero && terms.iter().zip(&sums).all(|(t, s)| negligible(t, s)) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(CoefficientValue::from_orders(n, z, orders))
}

/// Direct enumeration of every chain; the reference for [`eval_s`].
/// Orders are limited to `nu_max ≤ 3`.
pub fn eval_s_bruteforce(v: &FourierPotential, n: i64, z: C64, nu_max: usize, window_buf: Option<i64>) -> Result<CoefficientValue, Error> {
    if nu_max > 3 {
        return Err(Error::InvalidArgument("brute-force summation is limited to nu_max <= 3"));
    }
    let w = SeriesWindow::new(v, n, z, Some(nu_max), window_buf)?;
    let chain = |first_is_q: bool, len: usize| LogComplex::from(chain_sum(v, &w, first_is_q, len));
    let orders = (0..=nu_max)
        .map(|nu| OrderTerms {
            nu,
            s11: chain(false, 2 * nu + 1),
            s22: chain(true, 2 * nu + 1),
            s21: chain(true, 2 * nu),
            s12: chain(false, 2 * nu),
        })
        .collect();
    Ok(CoefficientValue::from_orders(n, z, orders))
}

/// `Σ_{j₁…j_len ∈ window} f₀(n, j₁)·D_{j₁}·f₁(j₁, j₂)·…·D_{j_len}·f_len(j_len, n)`
/// with factors alternating between `q(a + b)` and `p(-a - b)`.
fn chain_sum(v: &FourierPotential, w: &SeriesWindow, first_is_q: bool, len: usize) -> C64 {
    fn factor(v: &FourierPotential, is_q: bool, a: i64, b: i64) -> C64 {
        if is_q {
            v.q(a + b)
        } else {
            v.p(-a - b)
        }
    }
    fn walk(v: &FourierPotential, w: &SeriesWindow, prev: i64, depth: usize, len: usize, is_q: bool, acc: C64) -> C64 {
        if depth == len {
            return acc * factor(v, is_q, prev, w.n);
        }
        let mut total = C64::new(0.0, 0.0);
        for &j in &w.indices {
            let f = factor(v, is_q, prev, j);
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            let d = (w.z + (w.n - j) as f64).inv();
            total += walk(v, w, j, depth + 1, len, !is_q, acc * f * d);
        }
        total
    }
    walk(v, w, w.n, 0, len, first_is_q, C64::new(1.0, 0.0))
}

/// Which coefficient to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Alpha,
    BetaPlus,
    BetaMinus,
}

impl CoefficientValue {
    pub fn get(&self, which: Which) -> LogComplex {
        match which {
            Which::Alpha => self.alpha,
            Which::BetaPlus => self.beta_plus,
            Which::BetaMinus => self.beta_minus,
        }
    }
}

/// Central difference `(f(z+h) - f(z-h)) / 2h`, in log form since `β` may be
/// far below the `f64` range.
pub fn derivative_fd(v: &FourierPotential, n: i64, z: C64, which: Which, h: f64) -> Result<LogComplex, Error> {
    if !(h > 0.0 && h <= 1e-5) {
        return Err(Error::InvalidArgument("difference step must lie in (0, 1e-5]"));
    }
    if z.norm() > 0.25 {
        return Err(Error::InvalidArgument("derivatives are taken for |z| <= 1/4"));
    }
    let fp = eval_s(v, n, z + h, None, None)?.get(which);
    let fm = eval_s(v, n, z - h, None, None)?.get(which);
    Ok(fp.sub(&fm).scale_ln(-libm::log(2.0 * h)))
}

/// `E_{|n|}(r) + |n|^{-1/2}`: the shape of the coefficient bounds, without
/// the unspecified constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBound {
    pub tail_energy: f64,
    pub value: f64,
}

pub fn truncation_bound(v: &FourierPotential, n: i64) -> TruncationBound {
    let e = tail_energy(v, n);
    TruncationBound { tail_energy: e, value: e + libm::pow(n.abs().max(1) as f64, -0.5) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub identity: String,
    /// Order index `ν`; `None` for checks on the summed values.
    pub nu: Option<usize>,
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    fn push(&mut self, identity: &str, nu: Option<usize>, a: LogComplex, b: LogComplex, tol: f64) {
        let deviation = a.relative_distance(&b);
        self.checks.push(IdentityCheck { identity: identity.into(), nu, deviation, passed: deviation <= tol });
    }
}

/// Checks, per order and to relative tolerance `tol`:
/// `S¹¹ = S²²`; `conj S²¹(n, z̄; p, q) = S¹²(n, z; p', q')` for the
/// conjugate-swapped potential; the scaling laws under `(p, q) → (tp, sq)`
/// for every pair in `scalings`; and, when `Q = c·conj(P)` with real `c`,
/// `conj S²¹(n, z̄) = c·S¹²(n, z)`.
pub fn check_identities(
    v: &FourierPotential,
    n: i64,
    z: C64,
    nu_max: usize,
    scalings: &[(f64, f64)],
    tol: f64,
) -> Result<IdentityReport, Error> {
    let base = eval_s(v, n, z, Some(nu_max), None)?;
    let at_conj = eval_s(v, n, z.conj(), Some(nu_max), None)?;
    let swapped = eval_s(&v.conjugate_swap(), n, z, Some(nu_max), Some(default_window_buf(v)))?;
    let mut rep = IdentityReport::default();
    let common = base.orders.len().min(at_conj.orders.len()).min(swapped.orders.len());
    for k in 0..base.orders.len() {
        let o = &base.orders[k];
        rep.push("S11 = S22", Some(o.nu), o.s11, o.s22, tol);
    }
    for k in 0..common {
        let (c, s) = (&at_conj.orders[k], &swapped.orders[k]);
        rep.push("conj S21(conj z) = S12 of conjugate-swapped potential", Some(c.nu), c.s21.conj(), s.s12, tol);
    }
    for &(t, s) in scalings {
        let scaled = eval_s(&v.scaled(C64::new(t, 0.0), C64::new(s, 0.0)), n, z, Some(nu_max), Some(default_window_buf(v)))?;
        let lt = LogComplex::from(C64::new(t, 0.0));
        let ls = LogComplex::from(C64::new(s, 0.0));
        for (o, so) in base.orders.iter().zip(&scaled.orders) {
            let nu = o.nu as i64;
            rep.push("S21 scaling t^nu s^(nu+1)", Some(o.nu), so.s21, o.s21 * lt.powi(nu) * ls.powi(nu + 1), tol);
            rep.push("S12 scaling t^(nu+1) s^nu", Some(o.nu), so.s12, o.s12 * lt.powi(nu + 1) * ls.powi(nu), tol);
            let both = lt.powi(nu + 1) * ls.powi(nu + 1);
            rep.push("S11 scaling (ts)^(nu+1)", Some(o.nu), so.s11, o.s11 * both, tol);
            rep.push("S22 scaling (ts)^(nu+1)", Some(o.nu), so.s22, o.s22 * both, tol);
        }
    }
    if let SymmetryClass::Xt { t, .. } = classify_symmetry(v, SYMMETRY_TOL) {
        let lc = LogComplex::from(C64::new(t, 0.0));
        for (o, c) in base.orders.iter().zip(&at_conj.orders) {
            rep.push("conj S21(conj z) = c S12(z)", Some(o.nu), c.s21.conj(), o.s12 * lc, tol);
        }
        rep.push("conj beta+(conj z) = c beta-(z)", None, at_conj.beta_plus.conj(), base.beta_minus * lc, tol);
    }
    Ok(rep)
}

/// Source of `α_n(z)`, `β_n^±(z)` for the basic-equation solver.
pub trait CoefficientEvaluator {
    fn coefficients(&self, n: i64, z: C64) -> Result<CoefficientValue, Error>;
}

/// [`eval_s`] with fixed truncation settings (`None` picks the defaults).
#[derive(Debug, Clone, Copy)]
pub struct Series<'a> {
    pub v: &'a FourierPotential,
    pub nu_max: Option<usize>,
    pub window_buf: Option<i64>,
}

impl<'a> Series<'a> {
    pub fn new(v: &'a FourierPotential) -> Self {
        Self { v, nu_max: None, window_buf: None }
    }
}

impl CoefficientEvaluator for Series<'_> {
    fn coefficients(&self, n: i64, z: C64) -> Result<CoefficientValue, Error> {
        eval_s(self.v, n, z, self.nu_max, self.window_buf)
    }
}

impl<F> CoefficientEvaluator for F
where
    F: Fn(i64, C64) -> Result<CoefficientValue, Error>,
{
    fn coefficients(&self, n: i64, z: C64) -> Result<CoefficientValue, Error> {
        self(n, z)
    }
}

/// A coefficient value with prescribed entries, for synthetic evaluators.
pub fn synthetic(n: i64, z: C64, alpha: C64, beta_plus: LogComplex, beta_minus: LogComplex) -> CoefficientValue {
    CoefficientValue {
        n,
        z,
        alpha: LogComplex::from(alpha),
        s22: LogComplex::from(alpha),
        beta_plus,
        beta_minus,
        orders: vec![],
        tail_ratio: 0.0,
        tail_estimate: 0.0,
        converged: true,
        nu_used: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn window_skips_n_and_keeps_parity() {
        let v = FourierPotential::two_mode(c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0));
        let w = SeriesWindow::new(&v, 3, c(0.0, 0.0), None, Some(2)).unwrap();
        assert_eq!(w.indices, [-7, -5, -3, -1, 1, 5, 7]);
        assert_eq!(w.nu_max, 9);
        assert!(SeriesWindow::new(&v, 0, c(0.0, 0.0), None, None).is_err());
        assert!(SeriesWindow::new(&v, 3, c(0.6, 0.0), None, None).is_err());
    }

    #[test]
    fn free_potential_has_zero_coefficients() {
        let r = eval_s(&FourierPotential::zero(), 5, c(0.1, 0.0), None, None).unwrap();
        assert!(r.alpha.is_zero() && r.beta_plus.is_zero() && r.beta_minus.is_zero());
        let b = eval_s_bruteforce(&FourierPotential::zero(), 5, c(0.0, 0.0), 3, None).unwrap();
        assert!(b.beta_plus.is_zero());
    }

    #[test]
    fn order_zero_terms_are_the_direct_couplings() {
        let (a, b, aa, bb) = (c(0.3, 0.1), c(0.2, 0.0), c(0.5, -0.2), c(0.1, 0.4));
        let v = FourierPotential::two_mode(a, b, aa, bb);
        let r = eval_s(&v, 1, c(0.0, 0.0), Some(0), None).unwrap();
        assert!((r.beta_plus_c() - aa).norm() < 1e-16);
        assert!((r.beta_minus_c() - b).norm() < 1e-16);
    }

    #[test]
    fn first_nonzero_order_at_three_is_a_single_path() {
        let (a, b, aa, bb) = (c(0.3, 0.1), c(0.2, 0.0), c(0.5, -0.2), c(0.1, 0.4));
        let v = FourierPotential::two_mode(a, b, aa, bb);
        let r = eval_s(&v, 3, c(0.0, 0.0), Some(1), None).unwrap();
        assert!(r.orders[0].s21.is_zero());
        let want_p = a * aa * aa / 16.0;
        let want_m = b * b * bb / 16.0;
        assert!((r.beta_plus_c() - want_p).norm() < 1e-15 * want_p.norm());
        assert!((r.beta_minus_c() - want_m).norm() < 1e-15 * want_m.norm());
    }

    #[test]
    fn q_free_potential_has_no_beta_plus() {
        let v = FourierPotential::from_coeffs(&[(2, c(0.2, 0.0)), (-4, c(0.1, 0.1))], &[]).unwrap();
        let r = eval_s(&v, 5, c(0.05, 0.0), None, None).unwrap();
        assert!(r.beta_plus.is_zero());
        assert!(r.alpha.is_zero());
    }

    #[test]
    fn derivative_of_order_zero_term_vanishes() {
        let v = FourierPotential::two_mode(c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0));
        let r = eval_s(&v, 1, c(0.0, 0.0), Some(0), None).unwrap();
        assert!(r.orders[0].s21.relative_distance(&LogComplex::from(c(0.1, 0.0))) < 1e-16);
        let d = derivative_fd(&FourierPotential::zero(), 5, c(0.0, 0.0), Which::BetaPlus, 1e-6).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn truncation_bound_reduces_to_the_power_term_beyond_support() {
        let v = FourierPotential::two_mode(c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.1, 0.0));
        let b = truncation_bound(&v, 9);
        assert_eq!(b.tail_energy, 0.0);
        assert!((b.value - 1.0 / 3.0).abs() < 1e-15);
    }
}
