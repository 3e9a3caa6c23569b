//! Fitting `y = a1 + a2·cos(a3·x + a4)` to unevenly sampled, noisy observations.
//!
//! The crate provides a linear-time initial parameter estimator based on the
//! crossings of the observations through their mean ([`fipeft`]), a
//! Lomb-Scargle periodogram baseline ([`lombscargle`]), a Levenberg-Marquardt
//! refinement ([`lmfit`]), a seeded synthetic signal generator ([`synth`]) and
//! the benchmark harness used by the `cosfit` command-line tool ([`bench`]).
//!
//! ```
//! use cosfit::{fipeft, lmfit, synth, ModelParams};
//!
//! let truth = ModelParams::new(10.0, 5.0, std::f64::consts::FRAC_PI_2, 1.0);
//! let cfg = synth::SynthConfig::new(truth, 10.0, 20.0).with_sigma(0.5).with_seed(3);
//! let signal = synth::generate(&cfg).unwrap();
//!
//! let init = fipeft::estimate_initial_params(&signal).unwrap();
//! let fit = lmfit::lm_fit(&signal, init, &lmfit::LmConfig::default()).unwrap();
//! assert!((fit.params.frequency() - 0.25).abs() < 0.005);
//! ```

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod fipeft;
pub mod io;
pub mod lmfit;
pub mod lombscargle;
pub mod report;
pub mod signal_model;
pub mod synth;

pub use error::{Error, Result};
pub use signal_model::{FitResult, ModelParams, SampledSignal};
