//! Superradiant emission after the seed has left the medium.
//!
//! Energy conservation between the active volume and the flux through its
//! end face turns the Bloch angle into a driven pendulum,
//!
//! ```text
//! dθ/dt = (μ0 c ω μ² N L w0 / 4ħ) sin θ,   t ≥ τ_r,
//! ```
//!
//! whose solution is `θ(t) = 2 atan(exp((t − τ_D)/τ_W))`. Everything else
//! (energy density, power, intensity, field) follows from `θ(t)`, so the
//! burst is a sech² pulse of width `τ_W` centered at `τ_D`.
//!
//! The closed forms here are written with `|w0|`. For an absorbing medium
//! (`w0 < 0`) the pendulum runs backwards, `θ(t) = 2 atan(exp(−(t − τ_D)/τ_W))`
//! with `τ_D = τ_r + τ_W ln tan(θ_r/2)`, which leaves the sech² profiles in
//! the same form.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{invalid, Error, Result};
use crate::ode::rk4_fixed;
use crate::system::TwoLevelMedium;
use crate::units::PhysicalConstants;

/// Exact FWHM of `sech²(t/τ_W)` in units of `τ_W`: `2 acosh(√2) ≈ 1.76275`.
pub fn sech2_fwhm_factor() -> f64 {
    2.0 * SQRT_2.acosh()
}

/// Half-intensity offset of a sech² pulse, `acosh(√2) ≈ 0.8814`.
pub fn sech2_half_width_factor() -> f64 {
    SQRT_2.acosh()
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn require_emitters(medium: &TwoLevelMedium) -> Result<()> {
    if medium.density <= 0.0 {
        return Err(Error::NoSuperradiance("population density is zero"));
    }
    if medium.w0 == 0.0 {
        return Err(Error::NoSuperradiance("initial inversion w0 is zero"));
    }
    Ok(())
}

/// `τ_W = 4ħ / (μ0 c ω μ² |w0| N L)`.
pub fn characteristic_duration(medium: &TwoLevelMedium) -> Result<f64> {
    characteristic_duration_with(&PhysicalConstants::SI, medium)
}

pub fn characteristic_duration_with(k: &PhysicalConstants, medium: &TwoLevelMedium) -> Result<f64> {
    require_emitters(medium)?;
    let m = medium;
    Ok(4.0 * k.hbar / (k.mu0 * k.c * m.omega * m.mu * m.mu * m.w0.abs() * m.density * m.length))
}

/// Single-emitter spontaneous decay time `3π ε0 ħ c³ / (ω³ μ²)`.
pub fn spontaneous_decay_time(medium: &TwoLevelMedium) -> f64 {
    spontaneous_decay_time_with(&PhysicalConstants::SI, medium)
}

pub fn spontaneous_decay_time_with(k: &PhysicalConstants, medium: &TwoLevelMedium) -> f64 {
    3.0 * PI * k.eps0 * k.hbar * k.c.powi(3) / (medium.omega.powi(3) * medium.mu * medium.mu)
}

/// `τ_W` via the decay time: `16π τ_sp / (3 λ² |w0| N L)`. Agrees with
/// [`characteristic_duration_with`] exactly when `μ0 ε0 c² = 1`.
pub fn characteristic_duration_from_decay_time(
    k: &PhysicalConstants,
    medium: &TwoLevelMedium,
) -> Result<f64> {
    require_emitters(medium)?;
    let lambda = 2.0 * PI * k.c / medium.omega;
    let tau_sp = spontaneous_decay_time_with(k, medium);
    Ok(16.0 * PI * tau_sp / (3.0 * lambda * lambda * medium.w0.abs() * medium.density * medium.length))
}

fn check_open_angle(theta_r: f64) -> Result<()> {
    if !(theta_r > 0.0 && theta_r < PI) {
        return Err(Error::DegenerateAngle {
            theta: theta_r,
            reason: "must lie strictly between 0 and π",
        });
    }
    Ok(())
}

/// Time of peak emission, `τ_D = τ_r − τ_W ln tan(θ_r/2)` for `w0 > 0`
/// (sign of the log term flipped for `w0 < 0`).
pub fn time_delay(medium: &TwoLevelMedium, theta_r: f64, tau_r: f64) -> Result<f64> {
    check_open_angle(theta_r)?;
    let tau_w = characteristic_duration(medium)?;
    Ok(tau_r - medium.w0.signum() * tau_w * half_angle_tan(theta_r).ln())
}

/// `tan(θ/2)` without cancellation on either side of `π/2`; exactly 1 at `π/2`.
fn half_angle_tan(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    if c >= 0.0 {
        s / (1.0 + c)
    } else {
        (1.0 - c) / s
    }
}

/// `2 atan(exp((t − τ_D)/τ_W))`, the `w0 > 0` branch.
pub fn superradiant_bloch_angle(t: f64, tau_d: f64, tau_w: f64) -> f64 {
    2.0 * ((t - tau_d) / tau_w).exp().atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Gain medium, weak seed: delayed sech² peak.
    GainWeakSeed = 1,
    /// Gain medium, strong seed: emission declines from the end of the seed.
    GainStrongSeed = 2,
    /// Absorber, weak seed: everything decays.
    AbsorberWeakSeed = 3,
    /// Absorber, strong seed: the medium stores seed energy and re-emits it
    /// at a delayed peak.
    AbsorberStrongSeed = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergySource {
    /// Stored inversion; the seed only triggers its release.
    Medium,
    /// The seed itself; the medium acts as a battery.
    Seed,
}

impl Regime {
    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::GainWeakSeed),
            2 => Some(Self::GainStrongSeed),
            3 => Some(Self::AbsorberWeakSeed),
            4 => Some(Self::AbsorberStrongSeed),
            _ => None,
        }
    }

    /// Peak reached after the seed (`τ_D > τ_r`).
    pub fn delayed_peak(self) -> bool {
        matches!(self, Self::GainWeakSeed | Self::AbsorberStrongSeed)
    }

    pub fn energy_source(self) -> EnergySource {
        match self {
            Self::GainWeakSeed | Self::GainStrongSeed => EnergySource::Medium,
            _ => EnergySource::Seed,
        }
    }
}

pub fn classify_regime(w0: f64, theta_r: f64) -> Result<Regime> {
    if w0 == 0.0 || !w0.is_finite() {
        return Err(invalid("w0", "zero inversion has no regime"));
    }
    check_open_angle(theta_r)?;
    if theta_r == FRAC_PI_2 {
        return Err(Error::DegenerateAngle {
            theta: theta_r,
            reason: "θ_r = π/2 separates the regimes",
        });
    }
    let weak = theta_r < FRAC_PI_2;
    Ok(match (w0 > 0.0, weak) {
        (true, true) => Regime::GainWeakSeed,
        (true, false) => Regime::GainStrongSeed,
        (false, true) => Regime::AbsorberWeakSeed,
        (false, false) => Regime::AbsorberStrongSeed,
    })
}

/// `P0 = μ0 c ω² μ² w0² N² L / 8`, W/m³.
pub fn peak_power_density(medium: &TwoLevelMedium) -> f64 {
    let k = PhysicalConstants::SI;
    let m = medium;
    k.impedance() * m.omega.powi(2) * m.mu.powi(2) * m.w0.powi(2) * m.density.powi(2) * m.length / 8.0
}

/// `I0 = L · P0`, W/m².
pub fn peak_intensity(medium: &TwoLevelMedium) -> f64 {
    peak_power_density(medium) * medium.length
}

/// Peak of the emitted field envelope `μ0 ω c μ |w0| N L / 2`, V/m.
pub fn peak_field(medium: &TwoLevelMedium) -> f64 {
    let k = PhysicalConstants::SI;
    let m = medium;
    k.impedance() * m.omega * m.mu * m.w0.abs() * m.density * m.length / 2.0
}

/// The burst following a seed that left the medium at angle `θ_r` after `τ_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperradianceSolution {
    pub tau_w: f64,
    pub tau_d: f64,
    pub theta_r: f64,
    /// Peak power density, W/m³.
    pub p0: f64,
    /// Peak intensity, W/m².
    pub i0: f64,
    /// `None` only at the boundary `θ_r = π/2`.
    pub regime: Option<Regime>,
    pub medium: TwoLevelMedium,
    pub tau_r: f64,
}

impl SuperradianceSolution {
    pub fn new(medium: TwoLevelMedium, theta_r: f64, tau_r: f64) -> Result<Self> {
        let tau_w = characteristic_duration(&medium)?;
        let tau_d = time_delay(&medium, theta_r, tau_r)?;
        let regime = if theta_r == FRAC_PI_2 {
            None
        } else {
            Some(classify_regime(medium.w0, theta_r)?)
        };
        let p0 = peak_power_density(&medium);
        Ok(Self {
            tau_w,
            tau_d,
            theta_r,
            p0,
            i0: p0 * medium.length,
            regime,
            medium,
            tau_r,
        })
    }

    fn x(&self, t: f64) -> f64 {
        (t - self.tau_d) / self.tau_w
    }

    pub fn bloch_angle(&self, t: f64) -> f64 {
        let s = self.medium.w0.signum();
        2.0 * (s * self.x(t)).exp().atan()
    }

    /// Population-probability difference `w0 cos θ(t)`.
    pub fn inversion(&self, t: f64) -> f64 {
        self.medium.w0 * self.bloch_angle(t).cos()
    }

    pub fn energy_density(&self, t: f64) -> f64 {
        let m = &self.medium;
        -0.5 * PhysicalConstants::SI.hbar * m.omega * m.w0.abs() * m.density * self.x(t).tanh()
    }

    pub fn power_density(&self, t: f64) -> f64 {
        self.p0 * sech(self.x(t)).powi(2)
    }

    pub fn intensity(&self, t: f64) -> f64 {
        self.power_density(t) * self.medium.length
    }

    pub fn field_envelope(&self, t: f64) -> f64 {
        peak_field(&self.medium) * sech(self.x(t))
    }

    /// `[τ_D − k τ_W, τ_D + k τ_W]`.
    pub fn window(&self, half_width_tau_w: f64) -> (f64, f64) {
        let h = half_width_tau_w * self.tau_w;
        (self.tau_d - h, self.tau_d + h)
    }

    /// Energy released from `τ_r` onwards per unit volume, `E_N(τ_r) − E_N(∞)`.
    pub fn released_energy_density(&self) -> f64 {
        let m = &self.medium;
        0.5 * PhysicalConstants::SI.hbar * m.omega * m.w0.abs() * m.density * (1.0 - self.x(self.tau_r).tanh())
    }
}

/// `E_N(t) = −½ ħω |w0| N tanh((t − τ_D)/τ_W)`, J/m³.
pub fn energy_density(t: f64, sol: &SuperradianceSolution) -> f64 {
    sol.energy_density(t)
}

/// `P_s(t) = P0 sech²((t − τ_D)/τ_W)`, W/m³.
pub fn emitted_power_density(t: f64, sol: &SuperradianceSolution) -> f64 {
    sol.power_density(t)
}

/// `I_s(t) = L · P_s(t)`, W/m².
pub fn emitted_intensity(t: f64, sol: &SuperradianceSolution) -> f64 {
    sol.intensity(t)
}

/// `Ē_s(t) = (μ0 ω c μ |w0| N L / 2) sech((t − τ_D)/τ_W)`, V/m.
pub fn emitted_field_envelope(t: f64, sol: &SuperradianceSolution) -> f64 {
    sol.field_envelope(t)
}

/// Signed pendulum rate `μ0 c ω μ² N L w0 / 4ħ`, 1/s.
pub fn pendulum_rate(medium: &TwoLevelMedium) -> f64 {
    let k = PhysicalConstants::SI;
    let m = medium;
    k.impedance() * m.omega * m.mu * m.mu * m.density * m.length * m.w0 / (4.0 * k.hbar)
}

/// RK4 integration of the Bloch-angle pendulum from `θ(τ_r) = θ_r` to `t_end`.
pub fn integrate_pendulum(
    theta_r: f64,
    tau_r: f64,
    medium: &TwoLevelMedium,
    t_end: f64,
    dt: f64,
) -> Result<Vec<(f64, f64)>> {
    check_open_angle(theta_r)?;
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("{dt} s must be positive")));
    }
    if !(t_end > tau_r) {
        return Err(invalid("t_end", format!("{t_end} s must exceed tau_r = {tau_r} s")));
    }
    let rate = pendulum_rate(medium);
    let traj = rk4_fixed(|_, y: &[f64; 1]| [rate * y[0].sin()], tau_r, [theta_r], t_end, dt)?;
    Ok(traj.into_iter().map(|(t, y)| (t, y[0])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{dipole_debye_to_si, wavelength_to_angular_frequency};

    fn medium(n: f64, w0: f64) -> TwoLevelMedium {
        TwoLevelMedium::new(
            wavelength_to_angular_frequency(391e-9).unwrap(),
            dipole_debye_to_si(1.7).unwrap(),
            n,
            0.01,
            w0,
        )
        .unwrap()
    }

    #[test]
    fn duration_scaling_and_errors() {
        let a = characteristic_duration(&medium(4e21, 0.1)).unwrap();
        let b = characteristic_duration(&medium(8e21, 0.1)).unwrap();
        assert!((a / b - 2.0).abs() < 1e-14);
        assert_eq!(characteristic_duration(&medium(4e21, -0.1)).unwrap(), a);
        assert!(matches!(
            characteristic_duration(&medium(0.0, 0.1)),
            Err(Error::NoSuperradiance(_))
        ));
        assert!(characteristic_duration(&medium(4e21, 0.0)).is_err());
    }

    #[test]
    fn decay_time_value_and_scaling() {
        let m = medium(1e21, 0.1);
        let tsp = spontaneous_decay_time(&m);
        assert!((tsp / 6.6e-8 - 1.0).abs() < 0.02);
        let mut m2 = m;
        m2.mu *= 2.0;
        assert!((tsp / spontaneous_decay_time(&m2) - 4.0).abs() < 1e-12);
        let mut m3 = m;
        m3.omega *= 2.0;
        assert!((tsp / spontaneous_decay_time(&m3) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn delay_values() {
        let m = medium(4e21, 0.1);
        let tw = characteristic_duration(&m).unwrap();
        assert_eq!(time_delay(&m, FRAC_PI_2, 1e-12).unwrap(), 1e-12);
        assert!(time_delay(&m, 1e-3, 1e-12).unwrap() > time_delay(&m, 1e-2, 1e-12).unwrap());
        assert!(time_delay(&m, 1e-300, 1e-12).unwrap() > 1e-12 + 600.0 * tw);
        assert!(time_delay(&m, 0.0, 1e-12).is_err());
        assert!(time_delay(&m, PI, 1e-12).is_err());
        assert!(time_delay(&m, 0.3, 1e-12).unwrap() > 1e-12);
        assert!(time_delay(&m, 2.0, 1e-12).unwrap() < 1e-12);
    }

    #[test]
    fn angle_values() {
        assert!((superradiant_bloch_angle(3.0, 3.0, 1.0) - FRAC_PI_2).abs() < 1e-15);
        assert!((superradiant_bloch_angle(4.0, 3.0, 1.0) - 2.436_565_810_034_555).abs() < 1e-12);
        assert!(superradiant_bloch_angle(-1e3, 0.0, 1.0) < 1e-300);
        assert!((superradiant_bloch_angle(1e3, 0.0, 1.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn regimes() {
        let r1 = classify_regime(0.1, 0.057 * PI).unwrap();
        assert_eq!(r1, Regime::GainWeakSeed);
        assert!(r1.delayed_peak());
        assert_eq!(r1.energy_source(), EnergySource::Medium);
        let r2 = classify_regime(0.1, 0.6 * PI).unwrap();
        assert_eq!(r2, Regime::GainStrongSeed);
        assert!(!r2.delayed_peak());
        assert_eq!(classify_regime(-0.1, 0.3 * PI).unwrap(), Regime::AbsorberWeakSeed);
        let r4 = classify_regime(-0.1, 0.6 * PI).unwrap();
        assert_eq!(r4.number(), 4);
        assert!(r4.delayed_peak());
        assert_eq!(r4.energy_source(), EnergySource::Seed);
        assert!(classify_regime(0.0, 1.0).is_err());
        for th in [0.0, FRAC_PI_2, PI] {
            assert!(classify_regime(0.1, th).is_err());
        }
        for n in 1..=4 {
            assert_eq!(Regime::from_number(n).unwrap().number(), n);
        }
    }

    #[test]
    fn profile_identities() {
        let sol = SuperradianceSolution::new(medium(4e21, 0.1), 0.057 * PI, 0.936e-12).unwrap();
        assert_eq!(sol.i0, sol.p0 * sol.medium.length);
        assert_eq!(emitted_power_density(sol.tau_d, &sol), sol.p0);
        assert_eq!(energy_density(sol.tau_d, &sol), 0.0);
        let half = sol.tau_d + sech2_half_width_factor() * sol.tau_w;
        assert!((emitted_power_density(half, &sol) / sol.p0 - 0.5).abs() < 1e-6);
        let e_peak = emitted_field_envelope(sol.tau_d, &sol);
        assert!((emitted_field_envelope(half, &sol) * SQRT_2 / e_peak - 1.0).abs() < 1e-12);
        let k = PhysicalConstants::SI;
        let i_from_field = 0.5 * (k.eps0 / k.mu0).sqrt() * e_peak * e_peak;
        assert!((i_from_field / emitted_intensity(sol.tau_d, &sol) - 1.0).abs() < 1e-9);
        assert!((sol.bloch_angle(sol.tau_d) - FRAC_PI_2).abs() < 1e-15);
        assert!((sol.bloch_angle(sol.tau_r) - sol.theta_r).abs() < 1e-12);
    }

    #[test]
    fn absorber_branch_starts_at_theta_r() {
        for th in [0.3 * PI, 0.6 * PI] {
            let sol = SuperradianceSolution::new(medium(4e21, -0.1), th, 1e-12).unwrap();
            assert!((sol.bloch_angle(sol.tau_r) - th).abs() < 1e-12);
            let e_r = 0.5 * k_hbar() * sol.medium.omega * sol.medium.w0 * sol.medium.density * th.cos();
            assert!((sol.energy_density(sol.tau_r) / e_r - 1.0).abs() < 1e-12);
        }
    }

    fn k_hbar() -> f64 {
        PhysicalConstants::SI.hbar
    }

    #[test]
    fn pendulum_rejects_degenerate() {
        let m = medium(4e21, 0.1);
        assert!(integrate_pendulum(0.0, 0.0, &m, 1e-12, 1e-15).is_err());
        assert!(integrate_pendulum(PI, 0.0, &m, 1e-12, 1e-15).is_err());
        assert!(integrate_pendulum(1.0, 0.0, &m, 1e-12, 0.0).is_err());
        assert!(integrate_pendulum(1.0, 2e-12, &m, 1e-12, 1e-15).is_err());
    }

    #[test]
    fn fwhm_factor() {
        assert!((sech2_fwhm_factor() - 1.762747).abs() < 1e-6);
    }
}
