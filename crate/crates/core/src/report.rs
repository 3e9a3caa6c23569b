//! Fit reports stored as flat `key = value` TOML.
//!
//! ```text
//! initializer = "fipeft"
//! initial_a1 = 9.97
//! ...
//! refined_a4 = 1.0
//! frequency = 0.25
//! chi2 = 4.1e3
//! iterations = 12
//! converged = true
//! init_time_ns = 8400
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal_model::{FitResult, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub initializer: String,
    pub initial_a1: f64,
    pub initial_a2: f64,
    pub initial_a3: f64,
    pub initial_a4: f64,
    pub refined_a1: f64,
    pub refined_a2: f64,
    pub refined_a3: f64,
    pub refined_a4: f64,
    /// Refined `a3 / 2π`.
    pub frequency: f64,
    pub chi2: f64,
    pub iterations: u64,
    pub converged: bool,
    pub init_time_ns: u64,
}

impl FitReport {
    pub fn new(initializer: &str, fit: &FitResult) -> Self {
        let [i1, i2, i3, i4] = fit.initial.to_array();
        let [r1, r2, r3, r4] = fit.refined.to_array();
        Self {
            initializer: initializer.to_string(),
            initial_a1: i1,
            initial_a2: i2,
            initial_a3: i3,
            initial_a4: i4,
            refined_a1: r1,
            refined_a2: r2,
            refined_a3: r3,
            refined_a4: r4,
            frequency: fit.frequency(),
            chi2: fit.chi2,
            iterations: fit.iterations as u64,
            converged: fit.converged,
            init_time_ns: fit.init_clock_ns,
        }
    }

    pub fn initial(&self) -> ModelParams {
        ModelParams::new(
            self.initial_a1,
            self.initial_a2,
            self.initial_a3,
            self.initial_a4,
        )
    }

    pub fn refined(&self) -> ModelParams {
        ModelParams::new(
            self.refined_a1,
            self.refined_a2,
            self.refined_a3,
            self.refined_a4,
        )
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self)
            .map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("cannot parse report: {e}")))
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
