//! Growth of the skew product `(x, y, z) ↦ (x + α, y + α′, z + φ(x) + ψ(y))`.
//!
//! On `T³` with the max-metric, `φ^n` has forward and inverse Lipschitz
//! constant `Γ = 1 + ‖φ′^(n)‖ + ‖ψ′^(n)‖`, so with `g = max(‖φ′^(n)‖, ‖ψ′^(n)‖)`
//! we have `1 + g ≤ Γ ≤ 1 + 2g`.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::birkhoff::{certified_supnorm, BirkhoffSum, SupNorm, SupNormOptions};
use super::series::CocycleSeries;
use crate::error::{Error, Result};
use crate::logmag::LogMag;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaEnclosure {
    pub n: String,
    pub phi: SupNorm,
    pub psi: SupNorm,
    /// Enclosure of `max(‖φ′^(n)‖, ‖ψ′^(n)‖)`.
    pub g_lower: LogMag,
    pub g_upper: LogMag,
    /// Enclosure of `Γ(φ^n)` for the max-metric.
    pub gamma_lower: LogMag,
    pub gamma_upper: LogMag,
}

pub fn gamma_of_iterate(
    phi: &CocycleSeries,
    psi: &CocycleSeries,
    n: &BigInt,
    opts: &SupNormOptions,
) -> Result<GammaEnclosure> {
    let a = certified_supnorm(&BirkhoffSum::new(phi, n), 1, opts)?;
    let b = certified_supnorm(&BirkhoffSum::new(psi, n), 1, opts)?;
    Ok(GammaEnclosure {
        n: n.to_string(),
        phi: a,
        psi: b,
        g_lower: a.value.max(b.value),
        g_upper: a.upper().max(b.upper()),
        gamma_lower: LogMag::ONE + a.value + b.value,
        gamma_upper: LogMag::ONE + a.upper() + b.upper(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    pub lower: LogMag,
    pub upper: LogMag,
}

pub const MAX_DENSE_GROWTH: u64 = 1 << 20;

/// `ĝ_n = max_{1≤i≤n} g_i` for every `n ≤ n_max`.
pub fn growth_curve(phi: &CocycleSeries, psi: &CocycleSeries, n_max: u64, opts: &SupNormOptions) -> Result<Vec<GrowthRow>> {
    if n_max > MAX_DENSE_GROWTH {
        return Err(Error::Resource(format!("dense growth curve limited to n ≤ {MAX_DENSE_GROWTH}")));
    }
    let each: Vec<(LogMag, LogMag)> = (1..=n_max)
        .into_par_iter()
        .map(|i| gamma_of_iterate(phi, psi, &BigInt::from(i), opts).map(|g| (g.g_lower, g.g_upper)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(each.len());
    let (mut lo, mut hi) = (LogMag::ZERO, LogMag::ZERO);
    for (i, (l, h)) in each.into_iter().enumerate() {
        lo = lo.max(l);
        hi = hi.max(h);
        rows.push(GrowthRow { n: i as u64 + 1, lower: lo, upper: hi });
    }
    Ok(rows)
}

/// `ĝ_n` at a single, possibly huge, `n`: the lower end is `g_n`, the upper
/// end bounds every `g_i`, `i ≤ n`, through `|R| ≤ min(n, 1/sin πθ)`.
pub fn growth_at(phi: &CocycleSeries, psi: &CocycleSeries, n: &BigInt, opts: &SupNormOptions) -> Result<(LogMag, LogMag)> {
    if n.is_zero() {
        return Ok((LogMag::ZERO, LogMag::ZERO));
    }
    let g = gamma_of_iterate(phi, psi, n, opts)?;
    let up = BirkhoffSum::new(phi, n).running_bound(1).max(BirkhoffSum::new(psi, n).running_bound(1));
    Ok((g.g_lower, up))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{construct_liouville_pair, GaugeFunction, LiouvilleConfig, Which};

    fn toy() -> (CocycleSeries, CocycleSeries) {
        let g = GaugeFunction::power(0.4, 6.0).unwrap();
        let cfg = LiouvilleConfig { levels: 3, require_admissible: false, ..Default::default() };
        let pair = construct_liouville_pair(&g, &cfg).unwrap();
        (CocycleSeries::from_pair(&pair, Which::Alpha).unwrap(), CocycleSeries::from_pair(&pair, Which::AlphaPrime).unwrap())
    }

    #[test]
    fn identity_at_zero() {
        let (phi, psi) = toy();
        let g = gamma_of_iterate(&phi, &psi, &BigInt::zero(), &SupNormOptions::default()).unwrap();
        assert!(g.g_upper.is_zero());
        assert_eq!(g.gamma_upper, LogMag::ONE);
    }

    #[test]
    fn curve_is_monotone_and_starts_at_first_iterate() {
        let (phi, psi) = toy();
        let opts = SupNormOptions::default();
        let rows = growth_curve(&phi, &psi, 300, &opts).unwrap();
        let g1 = gamma_of_iterate(&phi, &psi, &BigInt::from(1), &opts).unwrap();
        assert_eq!(rows[0].lower, g1.g_lower);
        assert_eq!(rows[0].upper, g1.g_upper);
        for w in rows.windows(2) {
            assert!(w[1].lower >= w[0].lower && w[1].upper >= w[0].upper);
        }
    }

    #[test]
    fn closed_form_upper_dominates_dense_curve() {
        let (phi, psi) = toy();
        let opts = SupNormOptions::default();
        let rows = growth_curve(&phi, &psi, 500, &opts).unwrap();
        let (lo, up) = growth_at(&phi, &psi, &BigInt::from(500), &opts).unwrap();
        assert!(rows[499].upper <= up);
        assert!(lo <= rows[499].upper);
    }
}
