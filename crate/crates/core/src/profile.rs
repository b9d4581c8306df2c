//! Temporal traces of the forward emission: width and delay extraction,
//! model comparison and the per-pressure summary.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::superradiant::SuperradianceSolution;

/// FWHM-to-`τ_W` divisor used when converting measured widths.
pub const FWHM_DIVISOR: f64 = 1.763;

/// Half-width of the main-lobe comparison window, in `τ_W`.
pub const MAIN_LOBE_TAU_W: f64 = 2.0;

pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalTrace {
    /// Sample times, s, strictly increasing.
    pub t: Vec<f64>,
    /// Non-negative intensity, arbitrary units.
    pub intensity: Vec<f64>,
    /// Gas pressure, mbar.
    pub pressure: Option<f64>,
    pub label: String,
}

impl TemporalTrace {
    pub fn new(
        t: Vec<f64>,
        intensity: Vec<f64>,
        pressure: Option<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if t.len() != intensity.len() {
            return Err(invalid(
                "trace",
                format!("{} times but {} intensities", t.len(), intensity.len()),
            ));
        }
        if t.len() < MIN_SAMPLES {
            return Err(invalid(
                "trace",
                format!("{} samples, need at least {MIN_SAMPLES}", t.len()),
            ));
        }
        if t.iter().any(|v| !v.is_finite()) || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("trace", "times must be finite and strictly increasing"));
        }
        if intensity.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("trace", "intensities must be finite and non-negative"));
        }
        if !intensity.iter().any(|&v| v > 0.0) {
            return Err(invalid("trace", "maximum intensity must be positive"));
        }
        if let Some(p) = pressure {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(invalid("trace pressure", format!("{p} mbar")));
            }
        }
        Ok(Self {
            t,
            intensity,
            pressure,
            label: label.into(),
        })
    }

    /// Samples `f` on a uniform grid of `n` points over `[t0, t1]`.
    pub fn sampled<F: Fn(f64) -> f64>(
        f: F,
        t0: f64,
        t1: f64,
        n: usize,
        pressure: Option<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let h = (t1 - t0) / (n - 1) as f64;
        let t: Vec<f64> = (0..n).map(|i| t0 + i as f64 * h).collect();
        let y = t.iter().map(|&s| f(s)).collect();
        Self::new(t, y, pressure, label)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensity.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Index of the first global maximum.
    fn peak_index(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.intensity.iter().enumerate() {
            if v > self.intensity[best] {
                best = i;
            }
        }
        best
    }

    fn interior_peak(&self) -> Result<usize> {
        let i = self.peak_index();
        if i == 0 || i + 1 == self.len() {
            return Err(Error::NotAPulse("maximum sits at an endpoint of the trace"));
        }
        Ok(i)
    }

    /// Median of the lowest decile of samples.
    pub fn baseline(&self) -> f64 {
        let mut sorted = self.intensity.clone();
        sorted.sort_by(f64::total_cmp);
        let n = (sorted.len() / 10).max(1);
        let low = &sorted[..n];
        if n % 2 == 1 {
            low[n / 2]
        } else {
            0.5 * (low[n / 2 - 1] + low[n / 2])
        }
    }
}

fn crossing(t0: f64, y0: f64, t1: f64, y1: f64, level: f64) -> f64 {
    t0 + (level - y0) * (t1 - t0) / (y1 - y0)
}

/// Full width at half maximum, each half-maximum crossing located by linear
/// interpolation between the bracketing samples nearest the peak.
pub fn extract_fwhm(trace: &TemporalTrace) -> Result<f64> {
    let peak = trace.interior_peak()?;
    let (t, y) = (&trace.t, &trace.intensity);
    let half = 0.5 * y[peak];

    let left = (1..=peak)
        .rev()
        .find(|&i| y[i - 1] < half)
        .map(|i| crossing(t[i - 1], y[i - 1], t[i], y[i], half))
        .ok_or(Error::NotAPulse("no half-maximum crossing before the peak"))?;
    let right = (peak..trace.len() - 1)
        .find(|&i| y[i + 1] < half)
        .map(|i| crossing(t[i], y[i], t[i + 1], y[i + 1], half))
        .ok_or(Error::NotAPulse("no half-maximum crossing after the peak"))?;
    Ok(right - left)
}

/// `τ_W = τ_FW / 1.763`.
pub fn tau_w_from_fwhm(tau_fw: f64) -> Result<f64> {
    if !(tau_fw > 0.0) {
        return Err(invalid("FWHM", format!("{tau_fw} s must be positive")));
    }
    Ok(tau_fw / FWHM_DIVISOR)
}

/// Peak time from a parabola through the maximum sample and its neighbours.
pub fn extract_peak_delay(trace: &TemporalTrace) -> Result<f64> {
    let i = trace.interior_peak()?;
    let (t, y) = (&trace.t, &trace.intensity);
    let (t0, t1, t2) = (t[i - 1], t[i], t[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    // Vertex of the interpolating parabola; valid for non-uniform spacing.
    let d0 = t0 - t1;
    let d2 = t2 - t1;
    let num = (y0 - y1) * d2 * d2 - (y2 - y1) * d0 * d0;
    let den = (y0 - y1) * d2 - (y2 - y1) * d0;
    if den == 0.0 {
        return Ok(t1);
    }
    let offset = 0.5 * num / den;
    Ok(t1 + offset.clamp(d0, d2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    /// Measured intensity over its peak.
    pub measured: f64,
    /// Model intensity over its peak.
    pub model: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// RMS residual over `[τ_D − 2τ_W, τ_D + 2τ_W]`.
    pub main_lobe_rms: f64,
    pub main_lobe_samples: usize,
    pub tau_d: f64,
    pub tau_w: f64,
}

/// Normalized measured-vs-model comparison against a sech² burst.
pub fn compare_profile(trace: &TemporalTrace, sol: &SuperradianceSolution) -> Result<Comparison> {
    compare_to_sech2(trace, sol.tau_d, sol.tau_w)
}

/// [`compare_profile`] for a bare `(τ_D, τ_W)` pair, e.g. measured values.
pub fn compare_to_sech2(trace: &TemporalTrace, tau_d: f64, tau_w: f64) -> Result<Comparison> {
    if !(tau_w > 0.0) {
        return Err(invalid("tau_W", format!("{tau_w} s must be positive")));
    }
    let lo = tau_d - MAIN_LOBE_TAU_W * tau_w;
    let hi = tau_d + MAIN_LOBE_TAU_W * tau_w;
    if trace.t[0] > hi || trace.t[trace.len() - 1] < lo {
        return Err(Error::DisjointSupport);
    }
    let peak = trace.max_intensity();
    let rows: Vec<ComparisonRow> = trace
        .t
        .iter()
        .zip(&trace.intensity)
        .map(|(&t, &y)| {
            let model = (1.0 / ((t - tau_d) / tau_w).cosh()).powi(2);
            let measured = y / peak;
            ComparisonRow {
                t,
                measured,
                model,
                residual: measured - model,
            }
        })
        .collect();
    let (sum, n) = rows
        .iter()
        .filter(|r| r.t >= lo && r.t <= hi)
        .fold((0.0, 0usize), |(s, n), r| (s + r.residual * r.residual, n + 1));
    if n == 0 {
        return Err(Error::DisjointSupport);
    }
    Ok(Comparison {
        rows,
        main_lobe_rms: (sum / n as f64).sqrt(),
        main_lobe_samples: n,
        tau_d,
        tau_w,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    /// mbar
    pub pressure: f64,
    pub tau_fw: f64,
    pub tau_w: f64,
    pub tau_d: f64,
}

/// Per-pressure `(τ_FW, τ_W, τ_D)` summary, sorted by pressure.
pub fn table1_pipeline(traces: &[TemporalTrace]) -> Result<Vec<SummaryRow>> {
    if let Some(tr) = traces.iter().find(|tr| tr.pressure.is_none()) {
        return Err(Error::MissingPressure(tr.label.clone()));
    }
    let mut rows = traces
        .par_iter()
        .map(|tr| {
            let tau_fw = extract_fwhm(tr)?;
            Ok(SummaryRow {
                label: tr.label.clone(),
                pressure: tr.pressure.expect("checked above"),
                tau_fw,
                tau_w: tau_w_from_fwhm(tau_fw)?,
                tau_d: extract_peak_delay(tr)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.pressure.total_cmp(&b.pressure));
    Ok(rows)
}
