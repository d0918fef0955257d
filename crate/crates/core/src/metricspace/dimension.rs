//! Box-counting dimension by least squares on `(ln 1/ε, ln 𝒩_ε)`.

use serde::Serialize;

use super::cover::farthest_point_order;
use super::FiniteMetricSpace;
use crate::error::{input_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DimensionSample {
    pub epsilon: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `ln 𝒩`.
    pub residual: f64,
    pub samples: Vec<DimensionSample>,
}

impl DimensionFit {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn fit_log_log(samples: Vec<DimensionSample>) -> Result<DimensionFit> {
    if samples.len() < 3 {
        return Err(input_err!("need at least 3 samples, got {}", samples.len()));
    }
    if samples.iter().any(|s| !(s.epsilon > 0.0) || s.count == 0) {
        return Err(input_err!("samples need ε > 0 and positive counts"));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (-s.epsilon.ln(), (s.count as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 1e-300 {
        return Err(input_err!("all samples share one ε; the slope is undefined"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DimensionFit { slope, intercept, residual, samples })
}

/// Greedy `𝒩_ε` at each `ε` followed by [`fit_log_log`]. The samples must span a decade.
pub fn box_dimension(space: &FiniteMetricSpace, epsilons: &[f64]) -> Result<DimensionFit> {
    if epsilons.len() < 3 {
        return Err(input_err!("need at least 3 values of ε, got {}", epsilons.len()));
    }
    let lo = epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 10.0 {
        return Err(input_err!("ε range [{lo}, {hi}] spans less than one decade"));
    }
    let order = farthest_point_order(space)?;
    fit_log_log(epsilons.iter().map(|&epsilon| DimensionSample { epsilon, count: order.count_for(epsilon) }).collect())
}

/// The smallest `κ` with a `δ`-net of at most `κ δ^{-d}` points for every
/// listed `δ`, using greedy nets (covering radius `δ`).
pub fn net_constant(space: &FiniteMetricSpace, d: f64, deltas: &[f64]) -> Result<f64> {
    let order = farthest_point_order(space)?;
    Ok(deltas.iter().map(|&delta| order.count_for(2.0 * delta) as f64 * delta.powf(d)).fold(0.0, f64::max))
}
