//! Unit conventions and physical constants.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Planck constant in J s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular rate in rad/us for a frequency quoted as `value / 2pi` in MHz.
#[inline]
pub fn mhz(value: f64) -> f64 {
    TWO_PI * value
}

/// Inverse of [`mhz`].
#[inline]
pub fn to_mhz(rate: f64) -> f64 {
    rate / TWO_PI
}

/// Photon energy in joules at the given vacuum wavelength (meters).
pub fn photon_energy(wavelength_m: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / wavelength_m
}

/// Optical power in watts carried by a flux given in photons per microsecond.
pub fn flux_to_power(flux_per_us: f64, wavelength_m: f64) -> f64 {
    flux_per_us * 1e6 * photon_energy(wavelength_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        assert!((to_mhz(mhz(30.0)) - 30.0).abs() < 1e-13);
        assert!((mhz(1.0) - TWO_PI).abs() < 1e-15);
    }

    #[test]
    fn photon_energy_at_852nm() {
        let e = photon_energy(852e-9);
        assert!((e - 2.3316e-19).abs() < 1e-22);
    }
}
