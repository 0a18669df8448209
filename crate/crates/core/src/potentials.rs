//! Finitely supported π-periodic potentials, weights, and symmetry classes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;


use crate::float::cis;
use crate::{Error, C64};

/// `P(x) = Σ p(k)e^{ikx}` and `Q(x) = Σ q(k)e^{ikx}` over even `k`.
///
/// Zero coefficients are dropped on construction, so `support_bound` is the
/// largest `|k|` actually carrying a nonzero value.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourierPotential {
    p: BTreeMap<i64, C64>,
    q: BTreeMap<i64, C64>,
    support_bound: i64,
}

fn collect(entries: &[(i64, C64)]) -> Result<BTreeMap<i64, C64>, Error> {
    let mut map: BTreeMap<i64, C64> = BTreeMap::new();
    for &(k, c) in entries {
        if k.rem_euclid(2) != 0 {
            return Err(Error::OddIndex(k));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
    }
    map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
    Ok(map)
}

impl FourierPotential {
    /// Builds a potential from coefficient lists; duplicate indices are summed.
    pub fn from_coeffs(p: &[(i64, C64)], q: &[(i64, C64)]) -> Result<Self, Error> {
        let p = collect(p)?;
        let q = collect(q)?;
        let support_bound = p.keys().chain(q.keys()).map(|k| k.abs()).max().unwrap_or(0);
        Ok(Self { p, q, support_bound })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `P = a e^{2ix} + b e^{-2ix}`, `Q = A e^{2ix} + B e^{-2ix}`.
    #[allow(non_snake_case)]
    pub fn two_mode(a: C64, b: C64, A: C64, B: C64) -> Self {
        Self::from_coeffs(&[(2, a), (-2, b)], &[(2, A), (-2, B)]).expect("even indices")
    }

    /// Potential with `Q = t·conj(P)`, i.e. `q(k) = t·conj(p(-k))`.
    pub fn with_conjugate_partner(p: &[(i64, C64)], t: f64) -> Result<Self, Error> {
        let q: Vec<(i64, C64)> = p.iter().map(|&(k, c)| (-k, c.conj() * t)).collect();
        Self::from_coeffs(p, &q)
    }

    /// `p(2m) = amp·ratio^{|m|}·e^{iθ_m}` for `1 ≤ |m| ≤ modes` with fixed
    /// phases `θ_m = 0.7m + 0.3m²`, paired with `Q = t·conj(P)`. A smooth
    /// `X_t` potential whose gaps are all open.
    pub fn decaying_xt(t: f64, amp: f64, ratio: f64, modes: i64) -> Result<Self, Error> {
        let p: Vec<(i64, C64)> = (-modes..=modes)
            .filter(|&m| m != 0)
            .map(|m| {
                let mf = m as f64;
                (2 * m, cis(0.7 * mf + 0.3 * mf * mf) * (amp * libm::pow(ratio, m.abs() as f64)))
            })
            .collect();
        Self::with_conjugate_partner(&p, t)
    }

    pub fn p(&self, k: i64) -> C64 {
        self.p.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn q(&self, k: i64) -> C64 {
        self.q.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn p_entries(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.p.iter().map(|(&k, &c)| (k, c))
    }

    pub fn q_entries(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.q.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support_bound(&self) -> i64 {
        self.support_bound
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_empty() && self.q.is_empty()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.p.values().chain(self.q.values()).map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `P(x)·e^{iωx}` and `Q(x)·e^{-iωx}` evaluated together, the form the
    /// interaction-picture ODE needs. Powers of `e^{2ix}` replace one complex
    /// exponential per coefficient.
    pub(crate) fn eval_shifted(&self, x: f64, omega: C64) -> (C64, C64) {
        let half = (self.support_bound / 2) as usize;
        let base = cis(2.0 * x);
        let mut pow = [C64::new(1.0, 0.0); 64];
        let mut heap = Vec::new();
        let table: &mut [C64] = if half < 64 {
            &mut pow[..=half]
        } else {
            heap.resize(half + 1, C64::new(1.0, 0.0));
            &mut heap[..]
        };
        for j in 1..table.len() {
            table[j] = table[j - 1] * base;
        }
        let e = |k: i64| {
            let z = table[(k.unsigned_abs() / 2) as usize];
            if k < 0 {
                z.conj()
            } else {
                z
            }
        };
        let i = C64::new(0.0, 1.0);
        let shift = (i * omega * x).exp();
        let p: C64 = self.p.iter().map(|(&k, &c)| c * e(k)).sum();
        let q: C64 = self.q.iter().map(|(&k, &c)| c * e(k)).sum();
        (p * shift, q / shift)
    }

    pub fn eval_p(&self, x: f64) -> C64 {
        self.p.iter().map(|(&k, &c)| c * cis(k as f64 * x)).sum()
    }

    pub fn eval_q(&self, x: f64) -> C64 {
        self.q.iter().map(|(&k, &c)| c * cis(k as f64 * x)).sum()
    }

    /// `(p, q) → (t·p, s·q)`.
    pub fn scaled(&self, t: C64, s: C64) -> Self {
        let p: Vec<_> = self.p_entries().map(|(k, c)| (k, c * t)).collect();
        let q: Vec<_> = self.q_entries().map(|(k, c)| (k, c * s)).collect();
        Self::from_coeffs(&p, &q).expect("indices already validated")
    }

    /// The similar potential `(c·p, q/c)`.
    pub fn similarity(&self, c: C64) -> Self {
        self.scaled(c, c.inv())
    }

    /// Coefficients of `(conj Q, conj P)`: `p'(m) = conj(q(-m))`, `q'(m) = conj(p(-m))`.
    pub fn conjugate_swap(&self) -> Self {
        let p: Vec<_> = self.q_entries().map(|(k, c)| (-k, c.conj())).collect();
        let q: Vec<_> = self.p_entries().map(|(k, c)| (-k, c.conj())).collect();
        Self::from_coeffs(&p, &q).expect("indices already validated")
    }

    /// `q ≡ 0`: the Galerkin matrix is block upper triangular.
    pub fn without_q(&self) -> Self {
        Self { p: self.p.clone(), q: BTreeMap::new(), support_bound: self.p.keys().map(|k| k.abs()).max().unwrap_or(0) }
    }
}

/// Weight sequence `Ω(k)` with `Ω(-k) = Ω(k)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Weight {
    /// `Ω(0) = 1`, `Ω(k) = |k|^a`.
    Sobolev { a: f64 },
    /// `Ω(k) = e^{b|k|^γ}`.
    Gevrey { b: f64, gamma: f64 },
    /// `Ω(k) = e^{A|k|}`.
    Abel { a: f64 },
    /// Values indexed by `|k|`; `Ω(0)` defaults to 1 when absent.
    Table(BTreeMap<u64, f64>),
}

impl Weight {
    pub fn sobolev(a: f64) -> Self {
        Self::Sobolev { a }
    }

    pub fn gevrey(b: f64, gamma: f64) -> Result<Self, Error> {
        if !(b > 0.0 && gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidArgument("Gevrey weight needs b > 0 and 0 < gamma < 1"));
        }
        Ok(Self::Gevrey { b, gamma })
    }

    pub fn abel(a: f64) -> Result<Self, Error> {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument("Abel weight needs A > 0"));
        }
        Ok(Self::Abel { a })
    }

    /// Custom table from `(|k|, Ω)` pairs; every value must be positive.
    pub fn table(entries: &[(u64, f64)]) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        map.insert(0, 1.0);
        for &(k, w) in entries {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument("weight values must be positive and finite"));
            }
            map.insert(k, w);
        }
        Ok(Self::Table(map))
    }

    pub fn omega(&self, k: i64) -> Result<f64, Error> {
        let m = k.unsigned_abs();
        let x = m as f64;
        match self {
            Self::Sobolev { a } => Ok(if m == 0 { 1.0 } else { libm::pow(x, *a) }),
            Self::Gevrey { b, gamma } => Ok(libm::exp(b * libm::pow(x, *gamma))),
            Self::Abel { a } => Ok(libm::exp(a * x)),
            Self::Table(t) => t.get(&m).copied().ok_or(Error::WeightUndefined(m)),
        }
    }

    /// Largest `|k|` where the weight is defined, `None` for unbounded kinds.
    pub fn table_range(&self) -> Option<u64> {
        match self {
            Self::Table(t) => t.keys().next_back().copied(),
            _ => None,
        }
    }
}

/// `(Σ |f_k|² Ω(k)²)^{1/2}`.
pub fn weighted_norm(seq: &BTreeMap<i64, C64>, w: &Weight) -> Result<f64, Error> {
    let mut s = 0.0;
    for (&k, c) in seq {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let om = w.omega(k)?;
        s += c.norm_sqr() * om * om;
    }
    Ok(libm::sqrt(s))
}

/// Norm of a potential in the weighted space: the larger of the norms of `p`
/// and `q`, each re-indexed by the half mode `k/2` (coefficient of `e^{2ikx}`).
pub fn potential_norm(v: &FourierPotential, w: &Weight) -> Result<f64, Error> {
    let half = |it: &mut dyn Iterator<Item = (i64, C64)>| it.map(|(k, c)| (k / 2, c)).collect::<BTreeMap<_, _>>();
    let p = half(&mut v.p_entries());
    let q = half(&mut v.q_entries());
    Ok(weighted_norm(&p, w)?.max(weighted_norm(&q, w)?))
}

/// Outcome of the exhaustive `Ω(k+m) ≤ Ω(k)Ω(m)` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmultiplicativeReport {
    pub holds: bool,
    /// Pair maximizing `Ω(k+m)/(Ω(k)Ω(m))`, with `k + m ≥ 0`.
    pub worst_pair: (i64, i64),
    pub worst_ratio: f64,
}

/// Tests every pair `|k|, |m| ≤ range`; table weights only over pairs whose
/// sum stays inside the table.
pub fn check_submultiplicative(w: &Weight, range: u64) -> Result<SubmultiplicativeReport, Error> {
    if range == 0 {
        return Err(Error::InvalidArgument("range must be at least 1"));
    }
    let r = range as i64;
    let limit = w.table_range().map(|t| t as i64);
    let mut best = SubmultiplicativeReport { holds: true, worst_pair: (0, 0), worst_ratio: f64::NEG_INFINITY };
    for k in -r..=r {
        for m in -r..=r {
            if let Some(l) = limit {
                if k.abs() > l || m.abs() > l || (k + m).abs() > l {
                    continue;
                }
            }
            let (Ok(wk), Ok(wm), Ok(wkm)) = (w.omega(k), w.omega(m), w.omega(k + m)) else {
                continue;
            };
            let ratio = wkm / (wk * wm);
            if ratio > best.worst_ratio * (1.0 + 1e-15) {
                let pair = if k + m < 0 { (-k, -m) } else { (k, m) };
                best.worst_pair = pair;
                best.worst_ratio = ratio;
            }
        }
    }
    best.holds = best.worst_ratio <= 1.0 + 1e-12;
    Ok(best)
}

/// Membership in the classes `Q = t·conj(P)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SymmetryClass {
    General { residual: f64, note: Option<String> },
    Xt { t: f64, residual: f64 },
}

impl SymmetryClass {
    pub fn t(&self) -> Option<f64> {
        match self {
            Self::Xt { t, .. } => Some(*t),
            Self::General { .. } => None,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            Self::Xt { residual, .. } | Self::General { residual, .. } => *residual,
        }
    }
}

/// Default relative tolerance for [`classify_symmetry`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Fits the single real `t` with `q(k) = t·conj(p(-k))` by least squares and
/// accepts it when the worst deviation is below `tol·max|coefficient|`.
pub fn classify_symmetry(v: &FourierPotential, tol: f64) -> SymmetryClass {
    if v.is_zero() {
        return SymmetryClass::General {
            residual: 0.0,
            note: Some("zero potential satisfies Q = t conj(P) for every t".into()),
        };
    }
    let keys: BTreeSet<i64> = v.p.keys().map(|k| -k).chain(v.q.keys().copied()).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for &k in &keys {
        let target = v.p(-k).conj();
        num += (v.q(k) * target.conj()).re;
        den += target.norm_sqr();
    }
    let scale = v.max_coefficient();
    if den == 0.0 {
        return SymmetryClass::General { residual: scale, note: Some("P or Q vanishes identically".into()) };
    }
    let t = num / den;
    let residual = keys.iter().map(|&k| (v.q(k) - v.p(-k).conj() * t).norm()).fold(0.0, f64::max);
    if t != 0.0 && residual <= tol * scale {
        SymmetryClass::Xt { t, residual }
    } else {
        SymmetryClass::General { residual, note: None }
    }
}

/// Tail energy `E_m = (Σ_{|k|≥m} r(k)²)^{1/2}` with `r(k) = max(|p(±k)|, |q(±k)|)`.
pub fn tail_energy(v: &FourierPotential, m: i64) -> f64 {
    let m = m.abs();
    let mut s = 0.0;
    let mut k = m + m.rem_euclid(2);
    while k <= v.support_bound() {
        let r = [v.p(k), v.p(-k), v.q(k), v.q(-k)].iter().map(|c| c.norm()).fold(0.0, f64::max);
        s += if k == 0 { r * r } else { 2.0 * r * r };
        k += 2;
    }
    libm::sqrt(s)
}
