//! Covering bounds for spaces of Lipschitz functions and maps, and their
//! inverse capacity functions `τ` and `θ`.
//!
//! Under a `(κ, d)` net condition a covering number `𝒩_δ(M)` is replaced by
//! `max(1, κ δ^{-d})`: a cover never has fewer than one ball. All bounds are
//! returned as natural logarithms.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

/// `𝒩_{ε/4}(Y)^{𝒩_{ε/(4R)}(A)}`, exactly.
pub fn kt_bound(n_y: u64, n_a: u32) -> Result<BigUint> {
    if n_y == 0 || n_a == 0 {
        return Err(input_err!("covering numbers must be at least 1, got ({n_y}, {n_a})"));
    }
    if n_y == 1 {
        return Ok(BigUint::one());
    }
    Ok(BigUint::from(n_y).pow(n_a))
}

fn check_kd(kappa: f64, d: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) || !(d > 0.0 && d.is_finite()) {
        return Err(input_err!("need κ > 0 and d > 0, got κ = {kappa}, d = {d}"));
    }
    Ok(())
}

/// Net-condition surrogate for `𝒩_δ`: `max(1, κ δ^{-d})`.
fn net_count(kappa: f64, d: f64, delta: f64) -> f64 {
    (kappa * delta.powf(-d)).max(1.0)
}

/// `ln D(R, ε, C)` through `([4C/ε] + 1)^{𝒩_{ε/(4R)}}`; at `R = 0` the exact
/// count `[2C/ε] + 1` of constants.
pub fn d_bound(r: f64, epsilon: f64, c: f64, kappa: f64, d: f64) -> Result<f64> {
    check_kd(kappa, d)?;
    if !(r >= 0.0) || !(epsilon > 0.0) || !(c >= 0.0) {
        return Err(input_err!("need R ≥ 0, ε > 0, C ≥ 0, got R = {r}, ε = {epsilon}, C = {c}"));
    }
    if r == 0.0 {
        return Ok(((2.0 * c / epsilon).floor() + 1.0).ln());
    }
    let per_point = ((4.0 * c / epsilon).floor() + 1.0).ln();
    Ok(net_count(kappa, d, epsilon / (4.0 * r)) * per_point)
}

/// Bisection settings for `τ` and `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bisection {
    pub rel_tol: f64,
    pub max_iter: u32,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection { rel_tol: 1e-6, max_iter: 200 }
    }
}

/// `sup{R ≥ 0 : f(R) ≤ target}` for non-decreasing `f` with `f(0) ≤ target`.
fn sup_feasible(f: impl Fn(f64) -> f64, target: f64, opts: &Bisection) -> f64 {
    let ok = |r: f64| f(r) <= target;
    let mut hi = 1.0;
    let mut doublings = 0;
    while ok(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1000 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..opts.max_iter {
        if hi - lo <= opts.rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `τ(t, C) = sup{R : D(R, 1.4, C) ≤ t}` against [`d_bound`].
pub fn tau(t: f64, c: f64, kappa: f64, d: f64, opts: &Bisection) -> Result<f64> {
    check_kd(kappa, d)?;
    let boundary = (c / 0.7).floor() + 1.0;
    if !(t >= boundary) {
        return Err(input_err!("τ needs t ≥ [C/0.7] + 1 = {boundary}, got {t}"));
    }
    if (4.0 * c / 1.4).floor() == 0.0 {
        // a single ball of radius 0.7 already covers every admissible function
        return Ok(f64::INFINITY);
    }
    let target = t.ln();
    Ok(sup_feasible(|r| d_bound(r, 1.4, c, kappa, d).expect("validated"), target, opts))
}

/// Analytic inversion of [`d_bound`] for `τ`.
pub fn tau_closed_form(t: f64, c: f64, kappa: f64, d: f64) -> f64 {
    let per_point = ((4.0 * c / 1.4).floor() + 1.0).ln();
    if per_point == 0.0 {
        return f64::INFINITY;
    }
    let ratio = t.ln() / per_point;
    if ratio < 1.0 {
        0.0
    } else {
        1.4 / 4.0 * (ratio / kappa).powf(1.0 / d)
    }
}

/// `ln Δ(R, ε)` through `𝒩_{ε/4}(M)^{𝒩_{ε/(4R)}(M)}`; at `R = 0` the bound `ln 𝒩_ε(M)`.
fn delta_bound(r: f64, epsilon: f64, kappa: f64, d: f64) -> f64 {
    if r == 0.0 {
        return net_count(kappa, d, epsilon).ln();
    }
    net_count(kappa, d, epsilon / (4.0 * r)) * net_count(kappa, d, epsilon / 4.0).ln()
}

/// `θ(t, ε) = sup{R : Δ(R, ε) ≤ t}` against the net-condition surrogate.
pub fn theta(t: f64, epsilon: f64, kappa: f64, d: f64, opts: &Bisection) -> Result<f64> {
    check_kd(kappa, d)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(input_err!("θ needs ε in (0, 1), got {epsilon}"));
    }
    let boundary = net_count(kappa, d, epsilon);
    if !(t >= boundary) {
        return Err(input_err!("θ needs t ≥ 𝒩_ε = {boundary}, got {t}"));
    }
    if net_count(kappa, d, epsilon / 4.0) <= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(sup_feasible(|r| delta_bound(r, epsilon, kappa, d), t.ln(), opts))
}

/// Analytic inversion for `θ`:
/// `(ε/4) (ln t / (κ ln 𝒩_{ε/4}))^{1/d}` once `ln t ≥ ln 𝒩_{ε/4}`.
pub fn theta_closed_form(t: f64, epsilon: f64, kappa: f64, d: f64) -> f64 {
    let per_point = net_count(kappa, d, epsilon / 4.0).ln();
    if per_point == 0.0 {
        return f64::INFINITY;
    }
    let ratio = t.ln() / per_point;
    if ratio < 1.0 {
        0.0
    } else {
        epsilon / 4.0 * (ratio / kappa).powf(1.0 / d)
    }
}
