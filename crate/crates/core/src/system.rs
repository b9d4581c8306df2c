//! The two-level ensemble and the seed pulse that drives it.

use std::f64::consts::LN_2;

use crate::error::{invalid, Result};
use crate::units::{C, EPS0};

/// Resonant two-level ensemble in a pencil-shaped active volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelMedium {
    /// Transition angular frequency, rad/s.
    pub omega: f64,
    /// Transition dipole moment, C·m.
    pub mu: f64,
    /// Summed upper + lower population density, m⁻³.
    pub density: f64,
    /// Plasma (interaction) length, m.
    pub length: f64,
    /// Initial population-probability difference, upper minus lower.
    pub w0: f64,
}

impl TwoLevelMedium {
    pub fn new(omega: f64, mu: f64, density: f64, length: f64, w0: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", format!("{omega} rad/s must be positive")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("{mu} C·m must be positive")));
        }
        if !(density >= 0.0 && density.is_finite()) {
            return Err(invalid("density", format!("{density} m⁻³ must be non-negative")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", format!("{length} m must be positive")));
        }
        if !(w0.abs() <= 1.0) {
            return Err(invalid("w0", format!("{w0} must lie in [-1, 1]")));
        }
        Ok(Self {
            omega,
            mu,
            density,
            length,
            w0,
        })
    }

    pub fn with_density(&self, density: f64) -> Result<Self> {
        Self::new(self.omega, self.mu, density, self.length, self.w0)
    }

    pub fn with_w0(&self, w0: f64) -> Result<Self> {
        Self::new(self.omega, self.mu, self.density, self.length, w0)
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.omega, self.mu, self.density, length, self.w0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Envelope {
    /// Field envelope `exp(-2 ln2 ((t - τ_s)/τ_s)²)`: peak at `t = τ_s`,
    /// intensity FWHM `τ_s`.
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedPulse {
    /// Peak electric field, V/m.
    pub e0: f64,
    /// FWHM of the intensity profile, s.
    pub tau_s: f64,
    /// Interaction time with the medium, s.
    pub tau_r: f64,
    pub envelope: Envelope,
}

impl SeedPulse {
    pub fn new(e0: f64, tau_s: f64, tau_r: f64) -> Result<Self> {
        if !(e0 >= 0.0 && e0.is_finite()) {
            return Err(invalid("E0", format!("{e0} V/m must be non-negative")));
        }
        if !(tau_s > 0.0 && tau_s.is_finite()) {
            return Err(invalid("tau_s", format!("{tau_s} s must be positive")));
        }
        if !(tau_r > 0.0 && tau_r.is_finite()) {
            return Err(invalid("tau_r", format!("{tau_r} s must be positive")));
        }
        Ok(Self {
            e0,
            tau_s,
            tau_r,
            envelope: Envelope::Gaussian,
        })
    }

    /// Builds a pulse from its peak intensity in W/m².
    pub fn from_intensity(intensity: f64, tau_s: f64, tau_r: f64) -> Result<Self> {
        Self::new(peak_field_from_intensity(intensity)?, tau_s, tau_r)
    }

    /// Peak intensity `½ ε0 c E0²`, W/m².
    pub fn peak_intensity(&self) -> f64 {
        0.5 * EPS0 * C * self.e0 * self.e0
    }

    pub fn envelope_at(&self, t: f64) -> f64 {
        seed_field_envelope(self, t)
    }
}

/// Dimensionless field envelope `f(t)` in `[0, 1]`, peak 1 at `t = τ_s`.
pub fn seed_field_envelope(pulse: &SeedPulse, t: f64) -> f64 {
    match pulse.envelope {
        Envelope::Gaussian => {
            let x = (t - pulse.tau_s) / pulse.tau_s;
            (-2.0 * LN_2 * x * x).exp()
        }
    }
}

/// `E0 = sqrt(2 I / (ε0 c))`.
pub fn peak_field_from_intensity(intensity: f64) -> Result<f64> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(invalid("seed intensity", format!("{intensity} W/m² must be non-negative")));
    }
    Ok((2.0 * intensity / (EPS0 * C)).sqrt())
}
