//! Levenberg-Marquardt refinement of the cosine model.
//!
//! Each iteration solves `(JᵀJ + μI)·Δa = Jᵀr` through an SVD pseudo-inverse
//! and proposes `a + Δa`. A proposal is kept only if it strictly lowers χ²;
//! the damping `μ` then shrinks by `mu_decrease`, otherwise it grows by
//! `mu_increase` and the step is recomputed from the same point. `μ` is
//! initialized once from the largest diagonal entry of `JᵀJ` and is never
//! reset afterwards. The run ends when every component of a computed step is
//! below `step_tol` in magnitude, or after `max_iterations` step computations.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::signal_model::{chi_squared, jacobian_row, ModelParams, SampledSignal};

/// Singular values below this fraction of the largest are dropped.
const SVD_RELATIVE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LmConfig {
    pub mu_init_scale: f64,
    pub mu_decrease: f64,
    pub mu_increase: f64,
    pub step_tol: f64,
    pub max_iterations: usize,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            mu_init_scale: 0.001,
            mu_decrease: 0.125,
            mu_increase: 9.0,
            step_tol: 1e-13,
            max_iterations: 500,
        }
    }
}

impl LmConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu_init_scale > 0.0
            && self.mu_init_scale.is_finite()
            && 0.0 < self.mu_decrease
            && self.mu_decrease < 1.0
            && 1.0 < self.mu_increase
            && self.mu_increase.is_finite()
            && self.step_tol > 0.0
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid optimizer settings: {self:?}"
            )))
        }
    }
}

/// One computed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmStep {
    /// Damping used to compute the step.
    pub mu: f64,
    /// χ² at the proposed parameters.
    pub chi2: f64,
    /// Largest absolute step component.
    pub step_max: f64,
    /// Euclidean norm of the step.
    pub step_norm: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LmTrace {
    /// χ² at the starting point.
    pub initial_chi2: f64,
    pub steps: Vec<LmStep>,
}

impl LmTrace {
    /// χ² after each accepted step, in order.
    pub fn accepted_chi2(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().filter(|s| s.accepted).map(|s| s.chi2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmFit {
    /// Best parameters found, with `a2 ≥ 0` and `a4` in `[0, 2π)`.
    pub params: ModelParams,
    pub chi2: f64,
    /// Number of steps computed, accepted or not.
    pub iterations: usize,
    /// `true` when the step-size criterion ended the run.
    pub converged: bool,
    pub trace: LmTrace,
}

/// Solves `(JᵀJ + μI)·Δa = Jᵀr` with an SVD pseudo-inverse.
///
/// An all-zero system yields a zero step. Non-finite input yields a NaN step,
/// which the caller rejects.
pub fn solve_damped_step(jtj: &Matrix4<f64>, jtr: &Vector4<f64>, mu: f64) -> Vector4<f64> {
    let a = jtj + Matrix4::identity() * mu;
    if !a.iter().all(|v| v.is_finite()) || !jtr.iter().all(|v| v.is_finite()) {
        return Vector4::repeat(f64::NAN);
    }
    let svd = a.svd(true, true);
    let s_max = svd.singular_values.max();
    if s_max <= 0.0 {
        return Vector4::zeros();
    }
    let cutoff = SVD_RELATIVE_CUTOFF * s_max;
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut coeffs = u.transpose() * jtr;
    for (c, &s) in coeffs.iter_mut().zip(svd.singular_values.iter()) {
        *c = if s > cutoff { *c / s } else { 0.0 };
    }
    v_t.transpose() * coeffs
}

fn normal_equations(p: &ModelParams, s: &SampledSignal) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (x, y) in s.iter() {
        let j = Vector4::from(jacobian_row(p, x));
        let r = y - crate::signal_model::evaluate_model(p, x);
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (jtj, jtr)
}

pub fn lm_fit(s: &SampledSignal, init: ModelParams, cfg: &LmConfig) -> Result<LmFit> {
    cfg.validate()?;
    if !init.is_finite() {
        return Err(Error::InvalidInput(
            "initial parameters must be finite".into(),
        ));
    }
    let mut chi2 = chi_squared(&init, s);
    if !chi2.is_finite() {
        return Err(Error::NonFiniteCost);
    }

    let mut trace = LmTrace {
        initial_chi2: chi2,
        steps: Vec::new(),
    };
    let mut a = Vector4::from(init.to_array());
    let (mut jtj, mut jtr) = normal_equations(&init, s);
    let mut mu = cfg.mu_init_scale * jtj.diagonal().max();
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let step = solve_damped_step(&jtj, &jtr, mu);
        let finite = step.iter().all(|v| v.is_finite());
        let step_max = if finite { step.amax() } else { f64::NAN };
        if finite && step_max < cfg.step_tol {
            // A zero step also lands here, so the record below still applies.
            trace.steps.push(LmStep {
                mu,
                chi2,
                step_max,
                step_norm: step.norm(),
                accepted: false,
            });
            converged = true;
            break;
        }

        let trial = ModelParams::from_array((a + step).into());
        let trial_chi2 = chi_squared(&trial, s);
        let accepted = finite && trial_chi2 < chi2;
        trace.steps.push(LmStep {
            mu,
            chi2: trial_chi2,
            step_max,
            step_norm: step.norm(),
            accepted,
        });
        if accepted {
            a += step;
            chi2 = trial_chi2;
            (jtj, jtr) = normal_equations(&trial, s);
            mu *= cfg.mu_decrease;
        } else {
            mu *= cfg.mu_increase;
        }
    }

    Ok(LmFit {
        params: ModelParams::from_array(a.into()).normalized(),
        chi2,
        iterations: trace.steps.len(),
        converged,
        trace,
    })
}
