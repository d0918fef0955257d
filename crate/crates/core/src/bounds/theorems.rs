//! Closed-form lower bounds for `Γ̂_n(φ)`.

use serde::Serialize;

use crate::error::{input_err, Result};

/// `τ / Lip f`.
pub fn thm_mixing_bound(tau_value: f64, lip_f: f64) -> Result<f64> {
    if !(lip_f > 0.0) {
        return Err(input_err!("Lip(f) = {lip_f} must be positive"));
    }
    Ok(tau_value / lip_f)
}

/// `(2 κ^{1/d})^{−1} ⌊n / (2 v_n)⌋^{1/d}`; zero when `2 v_n > n`.
pub fn thm_basis_bound(n: u64, v_n: u64, kappa: f64, d: f64) -> Result<f64> {
    if n == 0 || v_n == 0 {
        return Err(input_err!("need n ≥ 1 and v(n) ≥ 1, got n = {n}, v = {v_n}"));
    }
    if !(kappa > 0.0) || !(d > 0.0) {
        return Err(input_err!("need κ > 0 and d > 0, got κ = {kappa}, d = {d}"));
    }
    let q = n / (2 * v_n);
    Ok((q as f64).powf(1.0 / d) / (2.0 * kappa.powf(1.0 / d)))
}

/// [`thm_basis_bound`] divided by `Lip f`.
pub fn thm_main_bound(n: u64, v_n: u64, kappa: f64, d: f64, lip_f: f64) -> Result<f64> {
    thm_mixing_bound(thm_basis_bound(n, v_n, kappa, d)?, lip_f)
}

pub fn thm_nonrig_bound(theta_value: f64) -> f64 {
    theta_value
}

/// `η(n)^{1/d}`.
pub fn cor_reccur_bound(eta_n: f64, d: f64) -> f64 {
    eta_n.max(0.0).powf(1.0 / d)
}

/// Terms of the estimate behind [`cor_reccur_bound`] at `ε_n = (η/ln n)^{1/(2d)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReccurChain {
    pub n: f64,
    pub eta: f64,
    pub epsilon: f64,
    /// `ε ln^{1/d} n / ln^{1/d}(1/ε)`.
    pub chain: f64,
    /// `(ln n/η)^{1/(2d)} / ln^{1/d}(ln n/η) · η^{1/d}`; `chain` is `(2d)^{1/d}` times this.
    pub rewritten: f64,
    pub target: f64,
}

pub fn cor_reccur_chain(n: f64, eta: f64, d: f64) -> Result<ReccurChain> {
    let ln_n = n.ln();
    if !(eta > 0.0 && eta < ln_n) {
        return Err(input_err!("need 0 < η < ln n, got η = {eta}, n = {n}"));
    }
    let ratio = ln_n / eta;
    let epsilon = ratio.powf(-1.0 / (2.0 * d));
    let chain = epsilon * ln_n.powf(1.0 / d) / (1.0 / epsilon).ln().powf(1.0 / d);
    let rewritten = ratio.powf(1.0 / (2.0 * d)) / ratio.ln().powf(1.0 / d) * eta.powf(1.0 / d);
    Ok(ReccurChain { n, eta, epsilon, chain, rewritten, target: cor_reccur_bound(eta, d) })
}
