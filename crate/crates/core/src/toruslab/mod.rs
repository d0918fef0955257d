//! The slowly growing mixing skew product on `T³` built from a Liouville pair.

mod birkhoff;
mod growth;
mod mixing;
mod series;

pub use birkhoff::{birkhoff_derivative, birkhoff_value, certified_supnorm, BirkhoffSum, SupNorm, SupNormOptions};
pub use growth::{gamma_of_iterate, growth_at, growth_curve, GammaEnclosure, GrowthRow, MAX_DENSE_GROWTH};
pub use mixing::{
    bracket_case, circle_integral, mixing_integral, mixing_rhs, points_for_radius, stationary_intervals,
    van_der_corput_check, BracketCase, MixingResult, OscIntegral, SampledPhase, VdcCheck,
};
pub use series::{CocycleSeries, SeriesTerm};

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::logmag::LogMag;

/// `c · q_k^j / u⁻¹(e^{q_k})` for stored term `k`.
pub fn level_bound(series: &CocycleSeries, k: usize, power: u32, c: f64) -> LogMag {
    let t = &series.terms()[k];
    LogMag::from_ln(c.ln() + power as f64 * t.ln_q + t.ln_amp)
}

/// `c₁ m / u⁻¹(e^{q_k}) + q_k` (first derivative, `c₁ = 6`) or
/// `c₂ m q_k / u⁻¹(e^{q_k}) + q_k` (second derivative, `c₂ = 48`).
pub fn iterate_bound(series: &CocycleSeries, m: &BigInt, k: usize, order: u32) -> LogMag {
    let t = &series.terms()[k];
    let lm = birkhoff::ln_abs(m);
    let main = match order {
        1 => LogMag::from_ln(6f64.ln() + lm + t.ln_amp),
        _ => LogMag::from_ln(48f64.ln() + lm + t.ln_q + t.ln_amp),
    };
    main + LogMag::from_ln(t.ln_q)
}

/// The smallest of [`iterate_bound`] over every stored level.
pub fn best_iterate_bound(series: &CocycleSeries, m: &BigInt, order: u32) -> LogMag {
    (0..series.terms().len())
        .map(|k| iterate_bound(series, m, k, order))
        .fold(LogMag::from_ln(f64::INFINITY), |a, b| if b < a { b } else { a })
}

/// `2π q` as a magnitude, handy for reports.
pub fn two_pi_q(series: &CocycleSeries, k: usize) -> LogMag {
    LogMag::from_ln((2.0 * PI).ln() + series.terms()[k].ln_q)
}
