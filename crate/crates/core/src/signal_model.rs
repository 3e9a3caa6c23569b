//! The cosine model `f(x|a) = a1 + a2·cos(a3·x + a4)` and the quantities shared
//! by the estimators: residual cost, analytic Jacobian, SNR and phase wrapping.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter vector of the cosine model.
///
/// `a1` is the offset, `a2` the amplitude, `a3` the angular frequency in
/// radians per unit of `x` and `a4` the phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl ModelParams {
    pub const fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        Self { a1, a2, a3, a4 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    /// Ordinary frequency `a3 / 2π`.
    pub fn frequency(&self) -> f64 {
        self.a3 / TAU
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Maps the parameters onto the canonical representative with `a2 ≥ 0`,
    /// `a3 ≥ 0` and `a4 ∈ [0, 2π)`. The model curve is unchanged, since
    /// cosine is even.
    pub fn normalized(self) -> Self {
        let (a3, a4) = if self.a3 < 0.0 {
            (-self.a3, -self.a4)
        } else {
            (self.a3, self.a4)
        };
        let (a2, a4) = if self.a2 < 0.0 {
            (-self.a2, a4 + PI)
        } else {
            (self.a2, a4)
        };
        Self::new(self.a1, a2, a3, wrap_phase(a4))
    }
}

/// Ordered condition/observation pairs `(x_i, y_i)` with non-decreasing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SampledSignal {
    /// Builds a signal from already sorted conditions.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {} conditions, {} observations",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "at least 2 samples required, got {}",
                x.len()
            )));
        }
        if let Some(i) = x.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at position {}",
                i % x.len()
            )));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(format!(
                "conditions not sorted at index {}",
                i + 1
            )));
        }
        Ok(Self { x, y })
    }

    /// Builds a signal from pairs in arbitrary order, sorting them by `x`.
    /// The sort is stable, so pairs sharing a condition keep their input order.
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (x, y) = pairs.into_iter().unzip();
        Self::new(x, y)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false; a valid signal holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn first_x(&self) -> f64 {
        self.x[0]
    }

    pub fn last_x(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// `x_N - x_1`.
    pub fn span(&self) -> f64 {
        self.last_x() - self.first_x()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.y.iter().copied())
    }

    /// Same conditions, replaced observations.
    pub(crate) fn with_y(&self, y: Vec<f64>) -> Self {
        debug_assert_eq!(y.len(), self.x.len());
        Self {
            x: self.x.clone(),
            y,
        }
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.y)
    }
}

/// Outcome of initialization followed by least-squares refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub initial: ModelParams,
    pub refined: ModelParams,
    pub chi2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Wall time spent in the initializer.
    pub init_clock_ns: u64,
}

impl FitResult {
    pub fn frequency(&self) -> f64 {
        self.refined.frequency()
    }
}

#[inline]
pub fn evaluate_model(p: &ModelParams, x: f64) -> f64 {
    p.a1 + p.a2 * (p.a3 * x + p.a4).cos()
}

/// Sum of squared residuals over raw slices.
pub fn sum_squared_residuals(p: &ModelParams, x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - evaluate_model(p, xi);
            r * r
        })
        .sum()
}

/// `χ²(a) = Σ (y_i − f(x_i|a))²`.
pub fn chi_squared(p: &ModelParams, s: &SampledSignal) -> f64 {
    sum_squared_residuals(p, s.x(), s.y())
}

/// Partial derivatives of the model with respect to `(a1, a2, a3, a4)`.
#[inline]
pub fn jacobian_row(p: &ModelParams, x: f64) -> [f64; 4] {
    let (sin, cos) = (p.a3 * x + p.a4).sin_cos();
    [1.0, cos, -p.a2 * x * sin, -p.a2 * sin]
}

/// Signal-to-noise ratio in dB, using `0.5·a2²` as the variance of the cosine.
pub fn snr_db(a2: f64, sigma_noise: f64) -> Result<f64> {
    if !(sigma_noise > 0.0) {
        return Err(Error::Domain(format!(
            "noise standard deviation must be positive, got {sigma_noise}"
        )));
    }
    if a2 == 0.0 {
        return Err(Error::Domain("amplitude must be non-zero".into()));
    }
    Ok(10.0 * (0.5 * a2 * a2 / (sigma_noise * sigma_noise)).log10())
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid may round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}
