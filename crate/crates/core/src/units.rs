//! Physical constants and unit conversions.

use std::f64::consts::PI;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const TWO_PI: f64 = 2.0 * PI;

/// Cycles per second to rad/s.
#[inline]
pub fn hz(f: f64) -> f64 {
    TWO_PI * f
}

/// rad/s to cycles per second.
#[inline]
pub fn to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}

/// Angular frequency of light with the given vacuum wavelength (m).
pub fn omega_from_wavelength(wavelength: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / wavelength
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Linear power ratio for a loss or gain expressed in dB.
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        assert_eq!(dbm_to_watts(-30.0), 1e-6);
        assert!((watts_to_dbm(1e-6) + 30.0).abs() < 1e-12);
        assert!((dbm_to_watts(watts_to_dbm(3.3e-5)) / 3.3e-5 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn telecom_wavelength() {
        let f = to_hz(omega_from_wavelength(1586e-9));
        assert!((f / 1.890_242e14 - 1.0).abs() < 1e-6, "{f}");
    }
}
