use std::f64::consts::{E, PI};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::cfrac::{GaugeFunction, LiouvillePair, Which};
use crate::error::{input_err, Result};
use crate::logmag::{ln_biguint, LogMag};

/// One cosine `cos(2π q x) / (2π q u⁻¹(e^q))` of the series.
#[derive(Clone, Debug)]
pub struct SeriesTerm {
    /// Index of `q` among the continued-fraction denominators.
    pub n: usize,
    pub q: BigUint,
    pub ln_q: f64,
    /// `ln A` with `A = 1/u⁻¹(e^q)`; the cosine amplitude is `A/(2πq)`.
    pub ln_amp: f64,
}

impl SeriesTerm {
    /// Sup-norm of the `order`-th derivative of this term, `(2πq)^{order-1} A`.
    pub fn ln_weight(&self, order: u32) -> f64 {
        if self.ln_amp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.ln_amp + (order as f64 - 1.0) * ((2.0 * PI).ln() + self.ln_q)
    }
}

/// Truncated series `Σ cos(2π q_n x)/(2π q_n u⁻¹(e^{q_n}))` over a rational rotation.
#[derive(Clone, Debug)]
pub struct CocycleSeries {
    terms: Vec<SeriesTerm>,
    rotation: BigRational,
    gauge: GaugeFunction,
    tail_ln: [f64; 4],
}

impl CocycleSeries {
    /// `freqs` are `(n, q_n)` pairs in increasing order.
    pub fn new(gauge: &GaugeFunction, freqs: Vec<(usize, BigUint)>, rotation: BigRational) -> Result<Self> {
        if freqs.is_empty() {
            return Err(input_err!("series needs at least one frequency"));
        }
        if freqs.windows(2).any(|w| w[1].1 <= w[0].1) {
            return Err(input_err!("series frequencies must be strictly increasing"));
        }
        let terms: Vec<SeriesTerm> = freqs
            .into_iter()
            .map(|(n, q)| {
                let ln_q = ln_biguint(&q);
                let y = q.to_f64().unwrap_or(f64::INFINITY);
                let ln_amp = -gauge.ln_inverse_exp(y);
                SeriesTerm { n, q, ln_q, ln_amp }
            })
            .collect();
        let last = terms.last().expect("nonempty");
        let tail_ln = std::array::from_fn(|j| last.ln_weight(j as u32) + tail_factor(j as u32, last.ln_q).ln());
        Ok(CocycleSeries { terms, rotation, gauge: gauge.clone(), tail_ln })
    }

    /// φ (over α) or ψ (over α′) from a constructed pair.
    pub fn from_pair(pair: &LiouvillePair, which: Which) -> Result<Self> {
        let cf = match which {
            Which::Alpha => &pair.alpha,
            Which::AlphaPrime => &pair.alpha_prime,
        };
        Self::new(&pair.certificate.gauge, pair.constructed(which), cf.value())
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn rotation(&self) -> &BigRational {
        &self.rotation
    }

    pub fn gauge(&self) -> &GaugeFunction {
        &self.gauge
    }

    /// Sup-norm bound of the dropped tail for derivative order `0..=3`, at `m = 1`.
    ///
    /// The dropped frequencies are distinct integers above `q_N`, and
    /// `A(q+1) ≤ A(q)/e` because `u⁻¹` is convex with `u⁻¹(0) = 0`, so the tail
    /// is at most `Σ_{i≥1} (2π(q_N+i))^{j-1} A(q_N) e^{-i}`.
    pub fn tail(&self, order: u32) -> LogMag {
        // an amplitude below the log range still leaves a nonzero tail
        LogMag::from_ln(self.tail_ln[order.min(3) as usize].max(-f64::MAX))
    }
}

/// `Σ_{i≥1} (1 + i/q)^{j-1} e^{-i}` in closed form, with `q = e^{ln_q}`.
fn tail_factor(order: u32, ln_q: f64) -> f64 {
    let s0 = 1.0 / (E - 1.0);
    let s1 = E / (E - 1.0).powi(2);
    let s2 = E * (E + 1.0) / (E - 1.0).powi(3);
    let inv_q = (-ln_q).exp();
    match order {
        0 | 1 => s0,
        2 => s0 + inv_q * s1,
        _ => s0 + 2.0 * inv_q * s1 + inv_q * inv_q * s2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn tail_factor_matches_direct_sum() {
        for (order, q) in [(0u32, 3.0f64), (1, 3.0), (2, 3.0), (3, 3.0), (3, 1.0)] {
            let direct: f64 = (1..200).map(|i| (1.0 + i as f64 / q).powi(order as i32 - 1) * (-(i as f64)).exp()).sum();
            let closed = tail_factor(order, q.ln());
            if order == 0 {
                assert!(direct <= closed);
            } else {
                assert!((direct - closed).abs() < 1e-12, "{order} {q}: {direct} vs {closed}");
            }
        }
    }

    #[test]
    fn tail_dominates_explicit_dropped_terms() {
        // φ with q = 3 only; compare its tail against the next few integer frequencies
        let g = GaugeFunction::power(0.4, 6.0).unwrap();
        let s = CocycleSeries::new(&g, vec![(1, BigUint::from(3u8))], BigRational::one()).unwrap();
        for order in 0..=3u32 {
            let explicit: f64 = (4..60)
                .map(|q| {
                    let q = q as f64;
                    (2.0 * PI * q).powi(order as i32 - 1) / g.inverse(q.exp())
                })
                .sum();
            assert!(explicit <= s.tail(order).to_f64() * (1.0 + 1e-9), "order {order}");
        }
    }

    #[test]
    fn amplitudes_follow_gauge() {
        let g = GaugeFunction::power(0.4, 6.0).unwrap();
        let s = CocycleSeries::new(&g, vec![(1, BigUint::from(3u8))], BigRational::one()).unwrap();
        let a = s.terms()[0].ln_amp.exp();
        assert!((a - 1.0 / g.inverse(3f64.exp())).abs() < 1e-12);
        assert!((a - 0.048_771_881_696_549).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let r = CocycleSeries::new(&g, vec![(1, 5u8.into()), (2, 3u8.into())], BigRational::one());
        assert!(r.is_err());
    }
}
