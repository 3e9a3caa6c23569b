//! Lomb-Scargle periodogram baseline for the frequency estimate.
//!
//! The grid runs from half the lowest resolvable frequency up to the mean
//! sampling rate with fivefold oversampling, so roughly `5N` frequencies are
//! evaluated at `O(N)` each. Observations are centered on the estimated mean
//! before evaluation.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fipeft;
use crate::signal_model::{ModelParams, SampledSignal};

const MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub delta_f: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn frequency(&self, k: usize) -> f64 {
        self.f_min + k as f64 * self.delta_f
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.frequency(k))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
}

impl Periodogram {
    /// Position of the highest power; ties resolve to the lowest frequency.
    pub fn peak_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, &p) in self.power.iter().enumerate() {
            if best.is_none_or(|b| p > self.power[b]) {
                best = Some(k);
            }
        }
        best
    }

    pub fn peak_frequency(&self) -> Option<f64> {
        self.peak_index().map(|k| self.frequencies[k])
    }
}

/// `f_min = 0.5/T`, `f_max = N/T`, `Δf = 1/(5T)` with `T = x_N − x_1`.
pub fn frequency_grid(s: &SampledSignal) -> Result<FrequencyGrid> {
    let t = s.span();
    if !(t > 0.0) {
        return Err(Error::DegenerateSpan);
    }
    let f_min = 0.5 / t;
    let f_max = s.len() as f64 / t;
    let delta_f = 1.0 / (5.0 * t);
    let count = ((f_max - f_min) / delta_f).floor() as usize + 1;
    Ok(FrequencyGrid {
        f_min,
        f_max,
        delta_f,
        count,
    })
}

/// Spectral power at angular frequency `omega` of the observations centered
/// on `a1_hat`.
pub fn power_at(s: &SampledSignal, omega: f64, a1_hat: f64) -> f64 {
    let (mut s2, mut c2) = (0.0, 0.0);
    for &x in s.x() {
        let (sin, cos) = (2.0 * omega * x).sin_cos();
        s2 += sin;
        c2 += cos;
    }
    let phi = 0.5 * s2.atan2(c2);

    let (mut yc, mut ys, mut cc, mut ss) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in s.iter() {
        let (sin, cos) = (omega * x - phi).sin_cos();
        let yt = y - a1_hat;
        yc += yt * cos;
        ys += yt * sin;
        cc += cos * cos;
        ss += sin * sin;
    }
    let cos_term = if cc < MIN_DENOMINATOR {
        0.0
    } else {
        yc * yc / cc
    };
    let sin_term = if ss < MIN_DENOMINATOR {
        0.0
    } else {
        ys * ys / ss
    };
    0.5 * (cos_term + sin_term)
}

pub fn periodogram(s: &SampledSignal, a1_hat: f64) -> Result<Periodogram> {
    let grid = frequency_grid(s)?;
    let frequencies: Vec<f64> = grid.iter().collect();
    let power = frequencies
        .iter()
        .map(|&f| power_at(s, TAU * f, a1_hat))
        .collect();
    Ok(Periodogram { frequencies, power })
}

/// Frequency with the highest power over the full grid.
pub fn peak_frequency(s: &SampledSignal, a1_hat: f64) -> Result<f64> {
    let mut ops = 0;
    peak_frequency_counted(s, a1_hat, &mut ops)
}

/// [`peak_frequency`] that adds the number of per-sample evaluations to `ops`.
pub fn peak_frequency_counted(s: &SampledSignal, a1_hat: f64, ops: &mut u64) -> Result<f64> {
    let grid = frequency_grid(s)?;
    let mut best_f = grid.f_min;
    let mut best_p = f64::NEG_INFINITY;
    for f in grid.iter() {
        let p = power_at(s, TAU * f, a1_hat);
        *ops += s.len() as u64;
        if p > best_p {
            best_p = p;
            best_f = f;
        }
    }
    Ok(best_f)
}

/// Initial parameters with the frequency taken from the periodogram peak.
/// Offset, amplitude and phase are computed as in [`fipeft::estimate`].
pub fn estimate_initial_params(s: &SampledSignal) -> Result<ModelParams> {
    let raw = fipeft::prepare_stats(s);
    let a3 = TAU * peak_frequency(s, raw.a1_hat)?;
    let (cleaned, _) = fipeft::remove_spikes(s, raw.a1_hat);
    let clean_stats = fipeft::prepare_stats(&cleaned);
    let a4 = fipeft::estimate_phase(&cleaned, &clean_stats, raw.a1_hat, a3);
    Ok(ModelParams::new(raw.a1_hat, raw.a2_hat, a3, a4))
}
