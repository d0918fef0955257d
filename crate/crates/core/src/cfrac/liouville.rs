//! Greedy construction of two expansions whose denominators interlock:
//!
//! ```text
//! 2 u⁻¹(e^{q'_{n-1}}) ≤ q_n / u(q_n) ≤ 3 u⁻¹(e^{q'_{n-1}})
//! 2 u⁻¹(e^{q_n})      ≤ q'_n / u(q'_n) ≤ 3 u⁻¹(e^{q_n})
//! ```
//!
//! All comparisons happen on natural logarithms, since the windows leave the
//! `f64` range after the first level.

use std::f64::consts::LN_2;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{ContinuedFraction, GaugeFunction};
use crate::error::{input_err, Error, Result};
use crate::logmag::{ln_biguint, LogMag};

pub const DEFAULT_BUDGET_BYTES: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiouvilleConfig {
    /// First index that carries the growth guarantee.
    pub n0: usize,
    /// Number of denominators to emit, alternating `q_{n0}, q'_{n0}, q_{n0+1}, ...`.
    pub levels: usize,
    /// Partial quotients `a_1..` of α below `n0`; padded with ones.
    pub seed_alpha: Vec<u64>,
    pub seed_alpha_prime: Vec<u64>,
    pub budget_bytes: usize,
    /// Reject gauges that break `u(1) ≥ 1` or `u(x) ≤ x^{3/4}`.
    pub require_admissible: bool,
}

impl Default for LiouvilleConfig {
    fn default() -> Self {
        LiouvilleConfig {
            n0: 1,
            levels: 3,
            seed_alpha: Vec::new(),
            seed_alpha_prime: Vec::new(),
            budget_bytes: DEFAULT_BUDGET_BYTES,
            require_admissible: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Alpha,
    AlphaPrime,
}

/// One emitted denominator with the window it was placed into.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    pub which: Which,
    pub q_n: String,
    pub q_ratio: String,
    pub window_lo: String,
    pub window_hi: String,
    pub ln_q_n: f64,
    pub ln_q_ratio: f64,
    pub ln_window_lo: f64,
    pub ln_window_hi: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiouvilleCertificate {
    pub n0: usize,
    pub gauge: GaugeFunction,
    pub gauge_admissible: bool,
    pub budget_bytes: usize,
    pub levels: Vec<LevelRecord>,
}

impl LiouvilleCertificate {
    pub fn all_ok(&self) -> bool {
        self.levels.iter().all(|l| l.ok)
    }
}

#[derive(Clone, Debug)]
pub struct LiouvillePair {
    pub alpha: ContinuedFraction,
    pub alpha_prime: ContinuedFraction,
    pub certificate: LiouvilleCertificate,
}

impl LiouvillePair {
    /// Denominators `q_n` with `n ≥ n0` that were placed by the construction.
    pub fn constructed(&self, which: Which) -> Vec<(usize, BigUint)> {
        let cf = match which {
            Which::Alpha => &self.alpha,
            Which::AlphaPrime => &self.alpha_prime,
        };
        self.certificate
            .levels
            .iter()
            .filter(|l| l.which == which)
            .map(|l| (l.n, cf.all_denominators()[l.n].clone()))
            .collect()
    }
}

pub fn construct_liouville_pair(gauge: &GaugeFunction, cfg: &LiouvilleConfig) -> Result<LiouvillePair> {
    if cfg.n0 == 0 {
        return Err(input_err!("n0 must be at least 1"));
    }
    let admissible = gauge.check_torus_admissible().is_ok();
    if cfg.require_admissible {
        gauge.check_torus_admissible()?;
    }
    let mut alpha = seeded(&cfg.seed_alpha, cfg.n0, "seed_alpha")?;
    let mut alpha_prime = seeded(&cfg.seed_alpha_prime, cfg.n0, "seed_alpha_prime")?;
    let mut records = Vec::with_capacity(cfg.levels);
    let mut n = cfg.n0;
    while records.len() < cfg.levels {
        let driver = alpha_prime.all_denominators()[n - 1].clone();
        records.push(place(gauge, &mut alpha, n, &driver, Which::Alpha, cfg.budget_bytes)?);
        if records.len() == cfg.levels {
            break;
        }
        let driver = alpha.all_denominators()[n].clone();
        records.push(place(gauge, &mut alpha_prime, n, &driver, Which::AlphaPrime, cfg.budget_bytes)?);
        n += 1;
    }
    Ok(LiouvillePair {
        alpha,
        alpha_prime,
        certificate: LiouvilleCertificate {
            n0: cfg.n0,
            gauge: gauge.clone(),
            gauge_admissible: admissible,
            budget_bytes: cfg.budget_bytes,
            levels: records,
        },
    })
}

fn seeded(seed: &[u64], n0: usize, name: &str) -> Result<ContinuedFraction> {
    if seed.len() > n0 - 1 {
        return Err(input_err!("{name} has {} quotients but n0 - 1 = {}", seed.len(), n0 - 1));
    }
    let mut cf = ContinuedFraction::from_quotients(seed.iter().copied())?;
    while cf.depth() < n0 - 1 {
        cf.push(BigUint::one())?;
    }
    Ok(cf)
}

/// `ln(q / u(q))` from `ln q`.
fn ln_ratio(gauge: &GaugeFunction, lq: f64) -> f64 {
    lq - gauge.ln_u_of_ln(lq)
}

/// Appends the smallest partial quotient whose denominator reaches the window
/// driven by `driver`, then checks the upper edge.
fn place(
    gauge: &GaugeFunction,
    cf: &mut ContinuedFraction,
    n: usize,
    driver: &BigUint,
    which: Which,
    budget_bytes: usize,
) -> Result<LevelRecord> {
    debug_assert_eq!(cf.depth(), n - 1);
    let budget_bits = budget_bytes as f64 * 8.0;
    let y = driver.to_f64().filter(|v| v.is_finite()).ok_or_else(|| {
        Error::Resource(format!("level {n}: driving denominator has {} bits; window exceeds budget", driver.bits()))
    })?;
    let ln_inv = gauge.ln_inverse_exp(y);
    if !ln_inv.is_finite() {
        return Err(Error::Resource(format!("level {n}: u^-1(e^{y:e}) overflows the budget")));
    }
    let lo = 2f64.ln() + ln_inv;
    let hi = 3f64.ln() + ln_inv;

    let lq_star = solve_ln_q(gauge, lo).ok_or_else(|| Error::Construction {
        level: n,
        reason: "q/u(q) never reaches the window".into(),
    })?;
    if lq_star / LN_2 > budget_bits {
        return Err(Error::Resource(format!(
            "level {n}: denominator needs ~{:.3e} bits, budget is {budget_bytes} bytes",
            lq_star / LN_2
        )));
    }

    let dens = cf.all_denominators();
    let q1 = dens[n - 1].clone();
    let q2 = if n >= 2 { dens[n - 2].clone() } else { BigUint::zero() };
    let q_of = |a: &BigUint| -> BigUint { a * &q1 + &q2 };
    let ok_lo = |q: &BigUint| ln_ratio(gauge, ln_biguint(q)) >= lo;

    let target = biguint_from_ln(lq_star + 1e-12 * lq_star.abs().max(1.0));
    let mut a = if target > q2 { (&target - &q2 + &q1 - 1u32) / &q1 } else { BigUint::zero() };
    if a.is_zero() {
        a = BigUint::one();
    }
    if q1.bits() < 48 && target.bits() < 52 {
        for _ in 0..4096 {
            if a > BigUint::one() && ok_lo(&q_of(&(&a - 1u32))) {
                a -= 1u32;
            } else {
                break;
            }
        }
        for _ in 0..4096 {
            if ok_lo(&q_of(&a)) {
                break;
            }
            a += 1u32;
        }
    }
    let q = q_of(&a);
    let lq = ln_biguint(&q);
    let ratio = ln_ratio(gauge, lq);
    let ok = ratio >= lo && ratio <= hi;
    if !ok {
        return Err(Error::Construction {
            level: n,
            reason: format!("no partial quotient lands q/u(q) in [e^{lo:.6}, e^{hi:.6}] (got e^{ratio:.6})"),
        });
    }
    cf.push(a)?;
    Ok(LevelRecord {
        n,
        which,
        q_n: q.to_string(),
        q_ratio: LogMag::from_ln(ratio).to_sci(),
        window_lo: LogMag::from_ln(lo).to_sci(),
        window_hi: LogMag::from_ln(hi).to_sci(),
        ln_q_n: lq,
        ln_q_ratio: ratio,
        ln_window_lo: lo,
        ln_window_hi: hi,
        ok,
    })
}

/// Smallest `ln q ≥ 0` with `ln(q/u(q)) ≥ target`, by bisection.
fn solve_ln_q(gauge: &GaugeFunction, target: f64) -> Option<f64> {
    if ln_ratio(gauge, 0.0) >= target {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_ratio(gauge, hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_ratio(gauge, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// An integer at least `e^{lq}`, within a relative error of `2^{-52}`.
fn biguint_from_ln(lq: f64) -> BigUint {
    if lq < 700.0 {
        return BigUint::from_f64(lq.exp().ceil()).unwrap_or_default();
    }
    let e = (lq / LN_2).floor() as u64 - 60;
    let mant = (lq - e as f64 * LN_2).exp().ceil() as u64;
    BigUint::from(mant) << e
}
