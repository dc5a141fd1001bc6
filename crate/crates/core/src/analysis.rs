//! Transient detection and exponential fits of D_S(t).
//!
//! Fits are ordinary least squares on (t, ln D). The default window starts
//! two samples after the transient peak and stops at the validity horizon
//! or where D reaches the noise floor, whichever comes first.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath::{exp, ln, sqrt};

/// Pfaffian noise threshold; distances are trusted down to ten times this.
pub const NOISE_FLOOR: f64 = 1e-9;
pub const FIT_FLOOR: f64 = 10.0 * NOISE_FLOOR;
pub const MIN_TRANSIENT_SAMPLES: usize = 20;
pub const MIN_FIT_SAMPLES: usize = 10;
/// Width of the centered moving mean used to locate the transient peak.
pub const SMOOTHING_WIDTH: usize = 5;

const DISTANCE_SLACK: f64 = 1e-12;

/// D_S(t) samples of one subset, with the horizon past which they are unreliable.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSeries {
    label: String,
    times: Vec<f64>,
    values: Vec<f64>,
    t_star: f64,
}

impl DistanceSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>, t_star: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch(times.len(), values.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NonIncreasingTimes);
        }
        if let Some(&d) = values.iter().find(|d| !(**d >= -DISTANCE_SLACK && **d <= 1.0 + DISTANCE_SLACK)) {
            return Err(Error::DistanceOutOfRange(d));
        }
        Ok(DistanceSeries { label: label.into(), times, values, t_star })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Spacing of the first two samples.
    pub fn spacing(&self) -> Option<f64> {
        match self.times.as_slice() {
            [a, b, ..] => Some(b - a),
            _ => None,
        }
    }

    /// Samples strictly before the horizon.
    pub fn converged(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let t_star = self.t_star;
        self.times.iter().copied().zip(self.values.iter().copied()).take_while(move |&(t, _)| t < t_star)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub tau: f64,
    /// Intercept of ln D at t = 0.
    pub log_amplitude: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Root mean square of the ln D residuals.
    pub rms_residual: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        exp(self.log_amplitude - t / self.tau)
    }
}

fn log_distance(d: f64) -> f64 {
    ln(d.max(f64::MIN_POSITIVE))
}

/// End of the post-quench transient.
///
/// The transient is the initial stretch where D_S can still grow. ln D is
/// smoothed with a centered moving mean over [`SMOOTHING_WIDTH`] samples
/// and the time of its maximum is returned; a series whose smoothed
/// maximum sits in the first window never rose and yields its first time.
pub fn detect_transient(series: &DistanceSeries) -> Result<f64> {
    let n = series.len();
    if n < MIN_TRANSIENT_SAMPLES {
        return Err(Error::SeriesTooShort { len: n, need: MIN_TRANSIENT_SAMPLES });
    }
    let logs: Vec<f64> = series.values.iter().map(|&d| log_distance(d)).collect();
    let half = SMOOTHING_WIDTH / 2;
    let mut best = (half, f64::NEG_INFINITY);
    for c in half..n - half {
        let mean = logs[c - half..=c + half].iter().sum::<f64>() / SMOOTHING_WIDTH as f64;
        if mean > best.1 {
            best = (c, mean);
        }
    }
    Ok(if best.0 == half { series.times[0] } else { series.times[best.0] })
}

/// Default window: from `t_onset` plus two spacings to the last sample
/// before both the horizon and the first drop below [`FIT_FLOOR`].
pub fn default_window(series: &DistanceSeries, t_onset: f64) -> Result<(f64, f64)> {
    let dt = series.spacing().ok_or(Error::SeriesTooShort { len: series.len(), need: 2 })?;
    let t_lo = t_onset + 2.0 * dt;
    let mut t_hi = None;
    for (t, d) in series.converged() {
        if t < t_lo - 1e-9 * dt {
            continue;
        }
        if d < FIT_FLOOR {
            break;
        }
        t_hi = Some(t);
    }
    t_hi.map(|hi| (t_lo, hi)).ok_or(Error::InsufficientRange { usable: 0, need: MIN_FIT_SAMPLES })
}

/// Least-squares line through (t, ln D) over the window, never past the horizon.
pub fn fit_exponential(series: &DistanceSeries, window: (f64, f64)) -> Result<DecayFit> {
    let (t_lo, t_hi) = window;
    let tol = 1e-9 * series.spacing().unwrap_or(1.0).abs();
    let inside: Vec<(f64, f64)> = series.converged().filter(|&(t, _)| t >= t_lo - tol && t <= t_hi + tol).collect();
    let usable = inside.iter().filter(|&&(_, d)| d > FIT_FLOOR).count();
    if usable < MIN_FIT_SAMPLES || usable < inside.len() {
        return Err(Error::InsufficientRange { usable, need: MIN_FIT_SAMPLES });
    }
    let n = inside.len() as f64;
    let t_mean = inside.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = inside.iter().map(|p| ln(p.1)).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, d) in &inside {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (ln(d) - y_mean);
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::NonDecaying(slope));
    }
    let intercept = y_mean - slope * t_mean;
    let ss: f64 = inside.iter().map(|&(t, d)| (ln(d) - intercept - slope * t).powi(2)).sum();
    Ok(DecayFit {
        tau: -1.0 / slope,
        log_amplitude: intercept,
        t_lo: inside[0].0,
        t_hi: inside[inside.len() - 1].0,
        rms_residual: sqrt(ss / n),
        samples: inside.len(),
    })
}

/// Transient detection, default window and fit in one call.
pub fn fit_series(series: &DistanceSeries) -> Result<DecayFit> {
    let onset = detect_transient(series)?;
    fit_exponential(series, default_window(series, onset)?)
}

/// (max - min) / mean of the fitted timescales.
pub fn relative_spread(taus: &[f64]) -> f64 {
    if taus.is_empty() {
        return 0.0;
    }
    let max = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = taus.iter().sum::<f64>() / taus.len() as f64;
    (max - min) / mean
}

/// One point of a timescale sweep; failures are kept, not dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: f64,
    pub fit: Result<DecayFit>,
}

impl SweepPoint {
    pub fn from_series(param: f64, series: Result<DistanceSeries>) -> Self {
        SweepPoint { param, fit: series.and_then(|s| fit_series(&s)) }
    }
}

/// Fits one series per final parameter; a failing point does not stop the sweep.
pub fn tau_sweep(params: &[f64], mut series_for: impl FnMut(f64) -> Result<DistanceSeries>) -> Vec<SweepPoint> {
    params.iter().map(|&p| SweepPoint::from_series(p, series_for(p))).collect()
}
