//! Semiclassical model of seeded superradiance in a strong-field-ionized
//! gas: seed-phase Bloch dynamics, the analytic sech² burst, pressure
//! scaling through a calibrated density law, and sech² analysis of measured
//! temporal profiles.
//!
//! All quantities are SI internally; [`units`] holds the boundary
//! conversions.

pub mod error;
pub mod fit;
pub mod ode;
pub mod pressure;
pub mod profile;
pub mod seed;
pub mod superradiant;
pub mod system;
pub mod units;

pub use error::{Error, Result};
pub use fit::{fit_sech2, fit_sech2_with, FitOptions, SechFit};
pub use pressure::{
    calibrate_density_scale, dephasing_time, density_from_pressure, pressure_scan,
    superradiance_valid, total_emitted_energy, DensityCalibration, DephasingParameters,
    ScanRow, ScanSettings, Validity,
};
pub use profile::{
    compare_profile, compare_to_sech2, extract_fwhm, extract_peak_delay, table1_pipeline,
    tau_w_from_fwhm, Comparison, SummaryRow, TemporalTrace,
};
pub use seed::{
    analytic_seed_solution, bloch_angle, coherence_amplitudes, integrate_bloch_rwa, BlochState,
    BlochTrajectory,
};
pub use superradiant::{
    characteristic_duration, classify_regime, emitted_field_envelope, emitted_intensity,
    emitted_power_density, energy_density, integrate_pendulum, peak_intensity,
    spontaneous_decay_time, superradiant_bloch_angle, time_delay, EnergySource, Regime,
    SuperradianceSolution,
};
pub use system::{peak_field_from_intensity, seed_field_envelope, Envelope, SeedPulse, TwoLevelMedium};
pub use units::PhysicalConstants;
