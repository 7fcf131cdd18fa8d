//! Closed-form bound evaluators.
//!
//! The tail evaluators for the final theorems carry unspecified constants and
//! logarithmic factors in their original form. They are exposed here with
//! explicit multipliers ([`TailConstants`], default 1) and a
//! `(1 + ln(1/ε))` log factor, and are surrogates for scaling studies rather
//! than certified probabilities.

use serde::{Deserialize, Serialize};

use crate::datasets::{sigma_epsilon, Profile, SpectrumSummary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// Multiplier inside the exponent.
    pub c_exp: f64,
    /// Multiplier inside the polynomial prefactor.
    pub c_poly: f64,
}

impl Default for TailConstants {
    fn default() -> Self {
        Self { c_exp: 1.0, c_poly: 1.0 }
    }
}

impl TailConstants {
    pub fn new(c_exp: f64, c_poly: f64) -> Result<Self> {
        positive("c_exp", c_exp)?;
        positive("c_poly", c_poly)?;
        Ok(Self { c_exp, c_poly })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccentricityReport {
    pub sigma_eps: f64,
    pub lambda_max: f64,
    pub lambda_avg: f64,
    pub eps: f64,
    /// `λ_max / σ_ε²`.
    pub ecc: f64,
    /// `λ_max / σ_ε`.
    pub ecc_unsquared: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be finite and > 0")))
    }
}

fn unit_eps(eps: f64, closed: bool) -> Result<()> {
    let ok = eps > 0.0 && if closed { eps <= 1.0 } else { eps < 1.0 };
    if ok {
        Ok(())
    } else {
        let hi = if closed { "]" } else { ")" };
        Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1{hi}")))
    }
}

fn dim(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be >= 1".into()));
    }
    Ok(d as f64)
}

/// Radius inflation `Δ` under which a spherical Gaussian `N(0, σ² I_d)`
/// gains at most `ε` mass on any ball:
/// `σ/(2√d) · ln(1 + ε/8) / (1 + √((2/d) ln(8/ε)))`.
pub fn lemma7_delta(sigma: f64, d: usize, eps: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    let d = dim(d)?;
    unit_eps(eps, true)?;
    let growth = (eps / 8.0).ln_1p();
    Ok(sigma / (2.0 * d.sqrt()) * growth / (1.0 + ((2.0 / d) * (8.0 / eps).ln()).sqrt()))
}

/// The same inflation for a scale-mixture, driven by `σ_ε`.
pub fn corollary8_delta(sigma_eps: f64, d: usize, eps: f64) -> Result<f64> {
    lemma7_delta(sigma_eps, d, eps)
}

/// Per-ball concentration tail `min(1, 2 exp(-ε²Δ²D / (2 λ_max)))`.
pub fn claim5_tail(eps: f64, delta: f64, big_d: usize, lambda_max: f64) -> Result<f64> {
    positive("eps", eps)?;
    positive("delta", delta)?;
    positive("lambda_max", lambda_max)?;
    let big_d = dim(big_d)?;
    Ok((2.0 * (-eps * eps * delta * delta * big_d / (2.0 * lambda_max)).exp()).min(1.0))
}

/// Surrogate `min(1, exp(-c_exp (ε⁴D/d)(σ_ε²/λ_max) / (1 + ln(1/ε))²))`.
pub fn theorem9_tail(eps: f64, d: usize, big_d: usize, sigma_eps: f64, lambda_max: f64, k: TailConstants) -> Result<f64> {
    unit_eps(eps, false)?;
    let d = dim(d)?;
    let big_d = dim(big_d)?;
    positive("sigma_eps", sigma_eps)?;
    positive("lambda_max", lambda_max)?;
    let log = 1.0 + (1.0 / eps).ln();
    let exponent = k.c_exp * eps.powi(4) * big_d / d * (sigma_eps * sigma_eps / lambda_max) / (log * log);
    Ok((-exponent).exp().min(1.0))
}

/// Surrogate union bound over the ball net:
/// `min(1, (c_poly d³λ_avg/(ε³σ_ε²) (1 + ln(1/ε)))^{d/2} · theorem9_tail)`.
#[allow(clippy::too_many_arguments)]
pub fn theorem11_tail(
    eps: f64,
    d: usize,
    big_d: usize,
    sigma_eps: f64,
    lambda_max: f64,
    lambda_avg: f64,
    k: TailConstants,
) -> Result<f64> {
    let t9 = theorem9_tail(eps, d, big_d, sigma_eps, lambda_max, k)?;
    positive("lambda_avg", lambda_avg)?;
    let df = d as f64;
    let base = k.c_poly * df.powi(3) * lambda_avg / (eps.powi(3) * sigma_eps * sigma_eps) * (1.0 + (1.0 / eps).ln());
    // Combine in log space: the prefactor alone can overflow for large d.
    let log_value = 0.5 * df * base.ln() + t9.ln();
    Ok(log_value.exp().min(1.0))
}

/// Smallest `D` with `theorem11_tail ≤ target`, by doubling then bisection.
#[allow(clippy::too_many_arguments)]
pub fn theorem11_min_dim(
    eps: f64,
    d: usize,
    sigma_eps: f64,
    lambda_max: f64,
    lambda_avg: f64,
    k: TailConstants,
    target: f64,
) -> Result<usize> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target {target} must lie in (0, 1)")));
    }
    let tail = |big_d: usize| theorem11_tail(eps, d, big_d, sigma_eps, lambda_max, lambda_avg, k);
    let mut hi = 1usize;
    while tail(hi)? > target {
        hi = hi.checked_mul(2).ok_or_else(|| Error::InvalidParameter("no D reaches the target".into()))?;
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Ok(1);
    }
    // Invariant: tail(lo) > target ≥ tail(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(ecc · d² / D)^{1/4}`.
pub fn eq2_rate(d: usize, big_d: usize, ecc: f64) -> Result<f64> {
    let d = dim(d)?;
    let big_d = dim(big_d)?;
    positive("ecc", ecc)?;
    Ok((ecc * d * d / big_d).powf(0.25))
}

/// `√(d ln D / D)`.
pub fn vc_simplex_rate(d: usize, big_d: usize) -> Result<f64> {
    let d = dim(d)?;
    if big_d < 2 {
        return Err(Error::InvalidDimension(format!("D = {big_d} must be >= 2")));
    }
    let big_d = big_d as f64;
    Ok((d * big_d.ln() / big_d).sqrt())
}

pub fn eccentricity(spec: &SpectrumSummary, prof: &Profile, eps: f64) -> Result<EccentricityReport> {
    unit_eps(eps, false)?;
    let sigma_eps = sigma_epsilon(prof, eps);
    if sigma_eps <= 0.0 {
        return Err(Error::DegenerateProfile);
    }
    Ok(EccentricityReport {
        sigma_eps,
        lambda_max: spec.lambda_max,
        lambda_avg: spec.lambda_avg,
        eps,
        ecc: spec.lambda_max / (sigma_eps * sigma_eps),
        ecc_unsquared: spec.lambda_max / sigma_eps,
    })
}
