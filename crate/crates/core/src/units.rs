//! Physical constants and unit conversions.
//!
//! Constants are CODATA 2018 exact or recommended values.

use std::f64::consts::TAU;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// ¹⁷¹Yb⁺ mass, approximated as exactly 171 u.
pub const YB171_MASS: f64 = 171.0 * ATOMIC_MASS_UNIT;

/// Natural linewidth of the 369.5 nm S₁/₂ → P₁/₂ transition, Γ/2π in MHz.
pub const DEFAULT_GAMMA_MHZ: f64 = 19.6;
/// Zeeman shift of the |±1⟩ states, Δ_B/2π in MHz.
pub const DEFAULT_ZEEMAN_MHZ: f64 = 7.7;

/// Cooling transition wavelength (m).
pub const WAVELENGTH_EIT: f64 = 369.5e-9;
/// Raman beam wavelength (m).
pub const WAVELENGTH_RAMAN: f64 = 355e-9;

/// Angular frequency (rad/s) of a frequency given in MHz.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz * 1e6
}

/// Frequency in MHz of an angular frequency (rad/s).
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

/// Default Γ as an angular frequency.
pub fn default_gamma() -> f64 {
    mhz_to_angular(DEFAULT_GAMMA_MHZ)
}

/// Express an angular frequency in units of Γ.
pub fn angular_to_gamma(omega: f64, gamma: f64) -> f64 {
    omega / gamma
}

/// Convert a value in units of Γ back to an angular frequency.
pub fn gamma_to_angular(value: f64, gamma: f64) -> f64 {
    value * gamma
}

/// Wavenumber 2π/λ.
pub fn wavenumber(wavelength: f64) -> f64 {
    TAU / wavelength
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        let g = default_gamma();
        let w = mhz_to_angular(4.45);
        assert!((angular_to_mhz(w) - 4.45).abs() < 1e-12);
        assert!((gamma_to_angular(angular_to_gamma(w, g), g) - w).abs() < 1e-3);
        assert!((angular_to_gamma(w, g) - 4.45 / 19.6).abs() < 1e-12);
    }
}
