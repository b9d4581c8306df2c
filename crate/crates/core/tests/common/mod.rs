#![allow(dead_code)]

use superradiance::units::{dipole_debye_to_si, wavelength_to_angular_frequency};
use superradiance::{SeedPulse, TwoLevelMedium};

pub const TAU_S: f64 = 0.26e-12;
pub const TAU_R: f64 = 3.6 * TAU_S;

/// 391 nm, 1.7 D, w0 = 0.1, L = 10 mm.
pub fn medium(density: f64) -> TwoLevelMedium {
    TwoLevelMedium::new(
        wavelength_to_angular_frequency(391e-9).unwrap(),
        dipole_debye_to_si(1.7).unwrap(),
        density,
        0.01,
        0.1,
    )
    .unwrap()
}

/// 10 MW/cm² Gaussian seed, FWHM 0.26 ps, τ_r = 3.6 τ_s.
pub fn seed() -> SeedPulse {
    SeedPulse::from_intensity(1e11, TAU_S, TAU_R).unwrap()
}

/// Independent composite Simpson with exactly `n` (even) panels.
pub fn simpson_n<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Root of a monotone bracketed function by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
