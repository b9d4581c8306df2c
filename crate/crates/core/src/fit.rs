//! Least-squares fit of `A sech²((t − τ_D)/τ_W)` to a measured trace using
//! Gauss–Newton with Levenberg–Marquardt damping.

use crate::error::Result;
use crate::profile::{extract_fwhm, extract_peak_delay, tau_w_from_fwhm, TemporalTrace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechFit {
    pub amplitude: f64,
    pub tau_d: f64,
    pub tau_w: f64,
    /// RMS of the residuals against the baseline-subtracted trace.
    pub rms_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Stop once every parameter step is below this fraction of its scale.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 200,
            initial_damping: 1e-3,
        }
    }
}

const MAX_DAMPING: f64 = 1e16;

pub fn fit_sech2(trace: &TemporalTrace, init: Option<SechFit>) -> Result<SechFit> {
    fit_sech2_with(trace, init, &FitOptions::default())
}

pub fn fit_sech2_with(
    trace: &TemporalTrace,
    init: Option<SechFit>,
    opts: &FitOptions,
) -> Result<SechFit> {
    let base = trace.baseline();
    let y: Vec<f64> = trace.intensity.iter().map(|v| v - base).collect();
    let t = &trace.t;

    let start = match init {
        Some(f) => Some([f.amplitude, f.tau_d, f.tau_w]),
        None => default_start(trace, base),
    };
    let Some(mut p) = start else {
        // Nothing pulse-like to start from.
        let span = t[t.len() - 1] - t[0];
        let peak = y.iter().copied().fold(f64::MIN, f64::max);
        let guess = [peak, t[0] + 0.5 * span, 0.25 * span];
        return Ok(SechFit {
            amplitude: guess[0],
            tau_d: guess[1],
            tau_w: guess[2],
            rms_residual: rms(t, &y, &guess),
            converged: false,
            iterations: 0,
        });
    };

    let mut cost = sum_sq(t, &y, &p);
    let mut lambda = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let (h, g) = normal_equations(t, &y, &p);
        let mut damped = h;
        for i in 0..3 {
            damped[i][i] += lambda * h[i][i];
        }
        let Some(step) = solve3(damped, [-g[0], -g[1], -g[2]]) else {
            lambda *= 10.0;
            if lambda > MAX_DAMPING {
                break;
            }
            continue;
        };
        let small = step_is_small(&step, &p, opts.tolerance);
        let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
        let trial_cost = if trial[2] > 0.0 { sum_sq(t, &y, &trial) } else { f64::INFINITY };
        if trial_cost < cost {
            p = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        if small {
            converged = true;
            break;
        }
        if lambda > MAX_DAMPING {
            break;
        }
    }

    let finite = p.iter().all(|v| v.is_finite());
    Ok(SechFit {
        amplitude: p[0],
        tau_d: p[1],
        tau_w: p[2],
        rms_residual: (cost / t.len() as f64).sqrt(),
        converged: converged && finite && p[0] > 0.0 && p[2] > 0.0,
        iterations,
    })
}

fn default_start(trace: &TemporalTrace, base: f64) -> Option<[f64; 3]> {
    let amplitude = trace.max_intensity() - base;
    let tau_d = extract_peak_delay(trace).ok()?;
    let tau_w = tau_w_from_fwhm(extract_fwhm(trace).ok()?).ok()?;
    (amplitude > 0.0).then_some([amplitude, tau_d, tau_w])
}

/// Amplitude is judged relative to itself; both times relative to `τ_W`.
fn step_is_small(step: &[f64; 3], p: &[f64; 3], tol: f64) -> bool {
    step[0].abs() <= tol * p[0].abs() && step[1].abs() <= tol * p[2] && step[2].abs() <= tol * p[2]
}

fn model(t: f64, p: &[f64; 3]) -> f64 {
    let s = 1.0 / ((t - p[1]) / p[2]).cosh();
    p[0] * s * s
}

fn sum_sq(t: &[f64], y: &[f64], p: &[f64; 3]) -> f64 {
    t.iter().zip(y).map(|(&ti, &yi)| (model(ti, p) - yi).powi(2)).sum()
}

fn rms(t: &[f64], y: &[f64], p: &[f64; 3]) -> f64 {
    (sum_sq(t, y, p) / t.len() as f64).sqrt()
}

/// `(JᵀJ, Jᵀr)` for residuals `r = model − y`.
fn normal_equations(t: &[f64], y: &[f64], p: &[f64; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut h = [[0.0; 3]; 3];
    let mut g = [0.0; 3];
    let [a, td, tw] = *p;
    for (&ti, &yi) in t.iter().zip(y) {
        let x = (ti - td) / tw;
        let s = 1.0 / x.cosh();
        let s2 = s * s;
        let th = x.tanh();
        let r = a * s2 - yi;
        let j = [s2, 2.0 * a * s2 * th / tw, 2.0 * a * s2 * th * x / tw];
        for m in 0..3 {
            g[m] += j[m] * r;
            for n in 0..3 {
                h[m][n] += j[m] * j[n];
            }
        }
    }
    (h, g)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot).skip(col) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = [[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]];
        let x = solve3(a, [5.0, 3.0, 6.0]).unwrap();
        for (xi, want) in x.iter().zip([1.4, 1.6, 1.8]) {
            assert!((xi - want).abs() < 1e-12);
        }
        assert!(solve3([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], [1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn flat_trace_does_not_converge() {
        let tr = TemporalTrace::sampled(|_| 1e-12, 0.0, 1e-11, 100, None, "flat").unwrap();
        let f = fit_sech2(&tr, None).unwrap();
        assert!(!f.converged);
        assert!(f.tau_w > 0.0);
    }

    #[test]
    fn recovers_from_offset_start() {
        let tr = TemporalTrace::sampled(
            |t| 2.0 / ((t - 4e-12) / 0.8e-12).cosh().powi(2),
            0.0,
            16e-12,
            1601,
            None,
            "s",
        )
        .unwrap();
        let init = SechFit {
            amplitude: 1.0,
            tau_d: 5e-12,
            tau_w: 1.5e-12,
            rms_residual: 0.0,
            converged: false,
            iterations: 0,
        };
        let f = fit_sech2(&tr, Some(init)).unwrap();
        assert!(f.converged);
        assert!((f.amplitude / 2.0 - 1.0).abs() < 1e-6);
        assert!((f.tau_d / 4e-12 - 1.0).abs() < 1e-6);
        assert!((f.tau_w / 0.8e-12 - 1.0).abs() < 1e-6);
    }
}
