//! Seed-phase dynamics of the resonant two-level ensemble.
//!
//! Under the rotating-wave approximation with zero detuning the Bloch vector
//! obeys
//!
//! ```text
//! du/dt = 0,   dv/dt = Ω(t) w,   dw/dt = -Ω(t) v,   Ω(t) = μ E0 f(t) / ħ
//! ```
//!
//! which starting from `(0, 0, w0)` is a pure rotation by the accumulated
//! pulse area `θ(t) = ∫₀ᵗ Ω`. Both the numerical integration and the closed
//! form are provided so each can check the other.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::ode::{rk4_fixed, simpson_anchored};
use crate::system::{seed_field_envelope, SeedPulse, TwoLevelMedium};
use crate::units::HBAR;

/// Default integration step as a fraction of the seed FWHM.
pub const STEPS_PER_TAU_S: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub t: f64,
    /// In-phase coherence.
    pub u: f64,
    /// Quadrature coherence.
    pub v: f64,
    /// Population inversion.
    pub w: f64,
}

impl BlochState {
    pub fn norm_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v + self.w * self.w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub samples: Vec<BlochState>,
    /// Accumulated Bloch angle at each sample, rad.
    pub theta: Vec<f64>,
}

impl BlochTrajectory {
    pub fn last(&self) -> &BlochState {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn final_theta(&self) -> f64 {
        *self.theta.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest `|u² + v² + w² − w0²|` along the trajectory.
    pub fn max_norm_drift(&self, w0: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm_sq() - w0 * w0).abs())
            .fold(0.0, f64::max)
    }
}

/// Peak Rabi frequency `μ E0 / ħ`, rad/s.
pub fn peak_rabi_frequency(pulse: &SeedPulse, medium: &TwoLevelMedium) -> f64 {
    medium.mu * pulse.e0 / HBAR
}

pub fn default_step(pulse: &SeedPulse) -> f64 {
    pulse.tau_s / STEPS_PER_TAU_S
}

/// Pulse area `∫₀ᵗ Ω(t') dt'` of an arbitrary Rabi-frequency profile by
/// composite Simpson on a `dt` grid anchored at `t = 0`.
pub fn pulse_area<F: Fn(f64) -> f64>(rabi: F, t: f64, dt: f64) -> f64 {
    simpson_anchored(rabi, 0.0, t, dt)
}

/// Bloch angle `θ(t) = (μE0/ħ) ∫₀ᵗ f` on the default step grid.
pub fn bloch_angle(pulse: &SeedPulse, medium: &TwoLevelMedium, t: f64) -> Result<f64> {
    bloch_angle_with_step(pulse, medium, t, default_step(pulse))
}

pub fn bloch_angle_with_step(
    pulse: &SeedPulse,
    medium: &TwoLevelMedium,
    t: f64,
    dt: f64,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} s must be non-negative")));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("{dt} s must be positive")));
    }
    let scale = peak_rabi_frequency(pulse, medium);
    Ok(scale * pulse_area(|s| seed_field_envelope(pulse, s), t, dt))
}

/// RK4 integration of the resonant optical Bloch equations from
/// `(0, 0, w0)` at `t = 0` up to `t_end`.
pub fn integrate_bloch_rwa(
    pulse: &SeedPulse,
    medium: &TwoLevelMedium,
    t_end: f64,
    dt: f64,
) -> Result<BlochTrajectory> {
    let scale = peak_rabi_frequency(pulse, medium);
    integrate_bloch_with(|t| scale * seed_field_envelope(pulse, t), medium.w0, t_end, dt)
}

/// Same as [`integrate_bloch_rwa`] for an arbitrary Rabi-frequency profile.
///
/// The Bloch angle is carried as a fourth state component, so the reported
/// `theta` is the RK4 quadrature of `Ω` on the same grid.
pub fn integrate_bloch_with<F>(rabi: F, w0: f64, t_end: f64, dt: f64) -> Result<BlochTrajectory>
where
    F: Fn(f64) -> f64,
{
    if !(t_end > 0.0) {
        return Err(invalid("t_end", format!("{t_end} s must be positive")));
    }
    if !(dt > 0.0) || dt >= t_end {
        return Err(invalid("dt", format!("{dt} s must be positive and below t_end = {t_end} s")));
    }
    let rhs = |t: f64, y: &[f64; 4]| {
        let omega = rabi(t);
        [0.0, omega * y[2], -omega * y[1], omega]
    };
    let raw = rk4_fixed(rhs, 0.0, [0.0, 0.0, w0, 0.0], t_end, dt)?;
    let mut samples = Vec::with_capacity(raw.len());
    let mut theta = Vec::with_capacity(raw.len());
    for (t, y) in raw {
        samples.push(BlochState {
            t,
            u: y[0],
            v: y[1],
            w: y[2],
        });
        theta.push(y[3]);
    }
    Ok(BlochTrajectory { samples, theta })
}

/// Closed-form seed-phase state `(0, w0 sin θ, w0 cos θ)`.
pub fn analytic_seed_solution(
    pulse: &SeedPulse,
    medium: &TwoLevelMedium,
    t: f64,
) -> Result<BlochState> {
    let theta = bloch_angle(pulse, medium, t)?;
    Ok(state_from_angle(medium.w0, theta, t))
}

/// The rotated Bloch vector for a given accumulated angle. Signed `w0` is
/// used as is, which matches the ODE for either sign.
pub fn state_from_angle(w0: f64, theta: f64, t: f64) -> BlochState {
    BlochState {
        t,
        u: 0.0,
        v: w0 * theta.sin(),
        w: w0 * theta.cos(),
    }
}

/// Slowly varying coherence amplitudes `(ρ̄21, ρ̄12) = ((u − iv)/2, (u + iv)/2)`.
pub fn coherence_amplitudes(state: &BlochState) -> (Complex64, Complex64) {
    let rho21 = Complex64::new(0.5 * state.u, -0.5 * state.v);
    (rho21, rho21.conj())
}
