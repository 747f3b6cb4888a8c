//! Frequencies are angular, in rad/μs. Inputs quoted in "MHz" are the
//! coefficient of 2π.

use std::f64::consts::TAU;

/// `2π × f` rad/μs.
pub fn mhz(f: f64) -> f64 {
    TAU * f
}

/// Inverse of [`mhz`].
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert_eq!(to_mhz(mhz(3.5)), 3.5);
        assert!((mhz(1.0) - 6.283185307179586).abs() < 1e-15);
    }
}
