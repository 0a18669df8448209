//! Small helpers over `f64` and complex values that `core` does not provide.

use crate::C64;

pub(crate) const PI: f64 = core::f64::consts::PI;

/// Wraps an angle to `(-π, π]`.
pub(crate) fn wrap(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    let mut t = libm::remainder(theta, tau);
    if t <= -PI {
        t += tau;
    }
    t
}

pub(crate) fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

pub(crate) fn abs1(z: C64) -> f64 {
    libm::fabs(z.re) + libm::fabs(z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_lands_in_half_open_interval() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-PI) - PI).abs() < 1e-12);
        assert!(wrap(0.5).eq(&0.5));
        assert!((wrap(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }
}
