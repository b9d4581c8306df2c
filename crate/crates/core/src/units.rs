//! Physical constants and the handful of unit conversions used at the I/O
//! boundary. Everything inside the crate is SI.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Vacuum permeability, H/m.
    pub mu0: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// One debye in C·m.
    pub debye: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
        eps0: 8.854_187_812_8e-12,
        mu0: 1.256_637_062_12e-6,
        k_b: 1.380_649e-23,
        debye: 3.335_64e-30,
    };

    /// `mu0 * eps0 * c^2 - 1`. Zero for a self-consistent set.
    pub fn maxwell_defect(&self) -> f64 {
        self.mu0 * self.eps0 * self.c * self.c - 1.0
    }

    pub fn all_positive(&self) -> bool {
        [self.hbar, self.c, self.eps0, self.mu0, self.k_b, self.debye]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }

    /// Vacuum impedance `mu0 * c`.
    pub fn impedance(&self) -> f64 {
        self.mu0 * self.c
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

pub const HBAR: f64 = PhysicalConstants::SI.hbar;
pub const C: f64 = PhysicalConstants::SI.c;
pub const EPS0: f64 = PhysicalConstants::SI.eps0;
pub const MU0: f64 = PhysicalConstants::SI.mu0;
pub const K_B: f64 = PhysicalConstants::SI.k_b;
pub const DEBYE: f64 = PhysicalConstants::SI.debye;

/// Lab temperature assumed when converting pressure to gas density.
pub const ROOM_TEMPERATURE: f64 = 300.0;

pub const PA_PER_MBAR: f64 = 100.0;
pub const S_PER_PS: f64 = 1e-12;
pub const M_PER_MM: f64 = 1e-3;
pub const M_PER_UM: f64 = 1e-6;
pub const M_PER_NM: f64 = 1e-9;
/// 1 cm⁻³ = 1e6 m⁻³.
pub const PER_M3_PER_CM3: f64 = 1e6;
/// 1 W/cm² = 1e4 W/m².
pub const W_M2_PER_W_CM2: f64 = 1e4;

pub fn dipole_debye_to_si(mu_debye: f64) -> Result<f64> {
    if !(mu_debye >= 0.0) || !mu_debye.is_finite() {
        return Err(invalid("dipole", format!("{mu_debye} D must be non-negative")));
    }
    Ok(mu_debye * DEBYE)
}

pub fn dipole_si_to_debye(mu: f64) -> f64 {
    mu / DEBYE
}

/// `2πc/λ`.
pub fn wavelength_to_angular_frequency(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("wavelength", format!("{lambda} m must be positive")));
    }
    Ok(2.0 * PI * C / lambda)
}

pub fn angular_frequency_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * C / omega
}

/// Ideal-gas number density `p / (k_B T)` in m⁻³, pressure in Pa.
pub fn pressure_to_number_density(pressure: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(invalid("temperature", format!("{temperature} K must be positive")));
    }
    if !(pressure >= 0.0) {
        return Err(invalid("pressure", format!("{pressure} Pa must be non-negative")));
    }
    Ok(pressure / (K_B * temperature))
}

pub fn mbar_to_pa(p: f64) -> f64 {
    p * PA_PER_MBAR
}

pub fn pa_to_mbar(p: f64) -> f64 {
    p / PA_PER_MBAR
}

pub fn ps_to_s(t: f64) -> f64 {
    t * S_PER_PS
}

pub fn s_to_ps(t: f64) -> f64 {
    t / S_PER_PS
}
