//! Complex numbers stored as `exp(log_magnitude + i·phase)`.
//!
//! The coefficient series for trigonometric-polynomial potentials decay
//! factorially in `n`, so values below the `f64` range are routine. Zero is
//! represented by `log_magnitude = -∞`.

use core::ops::{Div, Mul, Neg};


use crate::float::{cis, wrap};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogComplex {
    pub log_magnitude: f64,
    /// Not reduced modulo 2π; callers that need a principal value use [`LogComplex::arg`].
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: Self = Self { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: Self = Self { log_magnitude: 0.0, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        Self { log_magnitude, phase }
    }

    pub fn from_complex(z: C64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self { log_magnitude: libm::log(z.norm()), phase: z.arg() }
        }
    }

    /// Positive real `x`, given through its logarithm.
    pub fn from_ln(ln_x: f64) -> Self {
        Self { log_magnitude: ln_x, phase: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn is_finite(&self) -> bool {
        !self.log_magnitude.is_nan() && self.log_magnitude != f64::INFINITY && self.phase.is_finite()
    }

    /// Magnitude, which may underflow to zero.
    pub fn abs(&self) -> f64 {
        libm::exp(self.log_magnitude)
    }

    pub fn log10_abs(&self) -> f64 {
        self.log_magnitude / core::f64::consts::LN_10
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> f64 {
        wrap(self.phase)
    }

    /// Plain complex value; underflows to zero below the `f64` range.
    pub fn to_complex(&self) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        cis(self.phase) * libm::exp(self.log_magnitude)
    }

    pub fn conj(&self) -> Self {
        Self { log_magnitude: self.log_magnitude, phase: -self.phase }
    }

    pub fn recip(&self) -> Self {
        Self { log_magnitude: -self.log_magnitude, phase: -self.phase }
    }

    pub fn powi(&self, k: i64) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { Self::ZERO };
        }
        Self { log_magnitude: self.log_magnitude * k as f64, phase: self.phase * k as f64 }
    }

    /// Square root on the branch selected by the stored phase.
    pub fn sqrt(&self) -> Self {
        Self { log_magnitude: 0.5 * self.log_magnitude, phase: 0.5 * self.phase }
    }

    pub fn scale_ln(&self, ln_factor: f64) -> Self {
        Self { log_magnitude: self.log_magnitude + ln_factor, phase: self.phase }
    }

    /// Sum of terms, evaluated relative to the largest magnitude so that no
    /// term underflows before the addition.
    pub fn sum(terms: &[LogComplex]) -> Self {
        let lmax = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| t.log_magnitude)
            .fold(f64::NEG_INFINITY, f64::max);
        if lmax == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: C64 = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| cis(t.phase) * libm::exp(t.log_magnitude - lmax))
            .sum();
        Self::from_complex(s).scale_ln(lmax)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::sum(&[*self, *other])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::sum(&[*self, -*other])
    }

    /// `|self - other| / max(|self|, |other|)`, zero when both vanish.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let lmax = self.log_magnitude.max(other.log_magnitude);
        if lmax == f64::NEG_INFINITY {
            return 0.0;
        }
        let a = self.scale_ln(-lmax).to_complex();
        let b = other.scale_ln(-lmax).to_complex();
        (a - b).norm()
    }
}

impl Default for LogComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<C64> for LogComplex {
    fn from(z: C64) -> Self {
        Self::from_complex(z)
    }
}

impl Mul for LogComplex {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self { log_magnitude: self.log_magnitude + rhs.log_magnitude, phase: self.phase + rhs.phase }
    }
}

impl Div for LogComplex {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        self * rhs.recip()
    }
}

impl Neg for LogComplex {
    type Output = Self;

    fn neg(self) -> Self {
        Self { log_magnitude: self.log_magnitude, phase: self.phase + core::f64::consts::PI }
    }
}

/// `ln(k!)` through the log-gamma function.
pub fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn round_trip_through_complex() {
        let z = C64::new(-0.3, 1.7);
        assert!(close(LogComplex::from(z).to_complex(), z, 1e-15));
        assert!(LogComplex::from(C64::new(0.0, 0.0)).is_zero());
    }

    #[test]
    fn products_stay_representable_far_below_f64_range() {
        let tiny = LogComplex::from_ln(-800.0);
        let p = tiny * tiny;
        assert_eq!(p.log_magnitude, -1600.0);
        assert_eq!(p.to_complex(), C64::new(0.0, 0.0));
        let back = p / tiny;
        assert!((back.log_magnitude + 800.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_tiny_terms_is_exact_relative_to_scale() {
        let a = LogComplex::new(-1000.0, 0.0);
        let b = LogComplex::new(-1000.0 + 2.0f64.ln(), core::f64::consts::PI);
        let s = LogComplex::sum(&[a, b]);
        assert!((s.log_magnitude + 1000.0).abs() < 1e-12);
        assert!((s.arg().abs() - core::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn factorials_match_direct_products() {
        assert!(ln_factorial(0).abs() < 1e-15);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-13);
        assert!((ln_factorial(12) - 479001600f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn relative_distance_is_scale_free() {
        let a = LogComplex::new(-900.0, 0.1);
        let b = LogComplex::new(-900.0, 0.1 + 1e-9);
        assert!(a.relative_distance(&b) < 2e-9);
        assert_eq!(LogComplex::ZERO.relative_distance(&LogComplex::ZERO), 0.0);
    }
}
