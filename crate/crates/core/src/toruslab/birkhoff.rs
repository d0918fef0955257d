//! Birkhoff sums `φ^(m)(x) = Σ_{0≤k<m} φ(x + kα)` in closed form.
//!
//! Each cosine of the series turns into `A/(2πq) Re[e^{2πiqx} R]` with the
//! geometric factor `R = (e^{2πimθ} − 1)/(e^{2πiθ} − 1)`, `θ = qα mod 1`.
//! Writing `R = e^{iπ(m−1)θ} sin(πmθ)/sin(πθ)` keeps `|R|` in log domain so
//! `θ ≈ 2^{-58000}` is no obstacle.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::series::CocycleSeries;
use crate::error::{Error, Result};
use crate::logmag::{ln_biguint, LogMag};

/// Terms more than this many e-folds below the largest are moved into the error radius.
const ACTIVE_SPAN: f64 = 40.0;

#[derive(Clone, Debug)]
struct IterTerm {
    q: BigUint,
    ln_q: f64,
    /// `ln(A |sin(πmθ)/sin(πθ)|)`.
    ln_coef: f64,
    /// Turns added to `qx` inside the oscillation.
    phase0: f64,
    /// `ln(A / sin(πθ))`, the bound on `A|R|` uniform in `m`.
    ln_coef_cap: f64,
}

impl IterTerm {
    fn ln_amp(&self, order: u32) -> f64 {
        if self.ln_coef == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.ln_coef + (order as f64 - 1.0) * ((2.0 * PI).ln() + self.ln_q)
    }
}

/// `φ^(m)` for a fixed `m`, ready for evaluation.
#[derive(Clone, Debug)]
pub struct BirkhoffSum<'a> {
    series: &'a CocycleSeries,
    m: BigInt,
    terms: Vec<IterTerm>,
}

/// Sign of `r = sin(π w/d)` and `ln |r|` for an exact rational argument.
fn ln_sin_pi(w: &BigInt, d: &BigInt) -> (f64, bool) {
    let two_d: BigInt = d * 2;
    let w = w.mod_floor(&two_d);
    let negative = w >= *d;
    let w = w.mod_floor(d);
    let other = d - &w;
    let near = if w <= other { w } else { other };
    if near.is_zero() {
        return (f64::NEG_INFINITY, false);
    }
    let f = crate::cfrac::rational_to_f64(&BigRational::new_raw(near.clone(), d.clone()));
    let ln = if f > 1e-150 {
        (PI * f).sin().ln()
    } else {
        // sin x = x (1 - O(x²)) far below double precision
        PI.ln() + ln_biguint(near.magnitude()) - ln_biguint(d.magnitude())
    };
    (ln, negative)
}

impl<'a> BirkhoffSum<'a> {
    pub fn new(series: &'a CocycleSeries, m: &BigInt) -> Self {
        let alpha = series.rotation();
        let (p, d) = (alpha.numer(), alpha.denom());
        let terms = series
            .terms()
            .iter()
            .map(|t| {
                let qp: BigInt = BigInt::from(t.q.clone()) * p;
                let r = qp.mod_floor(d);
                if r.is_zero() {
                    // θ = 0: R = m exactly
                    let ln_coef = if m.is_zero() { f64::NEG_INFINITY } else { t.ln_amp + ln_biguint(m.magnitude()) };
                    let phase0 = if m.sign() == Sign::Minus { 0.5 } else { 0.0 };
                    return IterTerm { q: t.q.clone(), ln_q: t.ln_q, ln_coef, phase0, ln_coef_cap: f64::INFINITY };
                }
                let (ln_den, _) = ln_sin_pi(&r, d);
                let (ln_num, neg) = ln_sin_pi(&(&r * m), d);
                let ln_coef = if ln_num == f64::NEG_INFINITY || t.ln_amp == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    t.ln_amp + ln_num - ln_den
                };
                let two_d: BigInt = d * 2;
                let half_turns = ((m - 1u32) * &r).mod_floor(&two_d);
                let mut phase0 = crate::cfrac::rational_to_f64(&BigRational::new_raw(half_turns, two_d));
                if neg {
                    phase0 += 0.5;
                }
                IterTerm { q: t.q.clone(), ln_q: t.ln_q, ln_coef, phase0: phase0.fract(), ln_coef_cap: t.ln_amp - ln_den }
            })
            .collect();
        BirkhoffSum { series, m: m.clone(), terms }
    }

    pub fn from_i64(series: &'a CocycleSeries, m: i64) -> Self {
        Self::new(series, &BigInt::from(m))
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn series(&self) -> &CocycleSeries {
        self.series
    }

    /// `|m|` times the dropped-tail bound for derivative `order`.
    pub fn tail(&self, order: u32) -> LogMag {
        if self.m.is_zero() {
            return LogMag::ZERO;
        }
        LogMag::from_biguint(self.m.magnitude()) * self.series.tail(order)
    }

    /// Sum of the sup-norms of every stored term's `order`-th derivative.
    pub fn termwise_bound(&self, order: u32) -> LogMag {
        self.terms.iter().fold(LogMag::ZERO, |acc, t| acc + LogMag::from_ln(t.ln_amp(order)))
    }

    /// Bound on `max_{|i|≤|m|} ‖φ^{(i)}‖` of derivative `order`, using `|R| ≤ min(|m|, 1/sin πθ)`.
    pub fn running_bound(&self, order: u32) -> LogMag {
        let ln_m = ln_biguint(self.m.magnitude());
        let stored = self.series.terms().iter().zip(&self.terms).fold(LogMag::ZERO, |acc, (s, t)| {
            let ln_coef = (s.ln_amp + ln_m).min(t.ln_coef_cap);
            let w = if ln_coef == f64::NEG_INFINITY || s.ln_amp == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                ln_coef + (order as f64 - 1.0) * ((2.0 * PI).ln() + t.ln_q)
            };
            acc + LogMag::from_ln(w).inflate(4e-12)
        });
        stored + self.tail(order)
    }

    /// Splits the stored terms into those evaluated explicitly and a sup-norm
    /// bound for the remainder (including the dropped tail).
    fn partition(&self, order: u32) -> (Vec<usize>, LogMag) {
        let top = self.terms.iter().map(|t| t.ln_amp(order)).fold(f64::NEG_INFINITY, f64::max);
        let mut active = Vec::new();
        let mut rest = self.tail(order);
        for (i, t) in self.terms.iter().enumerate() {
            let a = t.ln_amp(order);
            if a == f64::NEG_INFINITY {
                continue;
            }
            if a >= top - ACTIVE_SPAN {
                active.push(i);
            } else {
                rest = rest + LogMag::from_ln(a);
            }
        }
        (active, rest)
    }

    fn contribution(order: u32, amp: f64, angle: f64) -> f64 {
        match order % 4 {
            0 => amp * angle.cos(),
            1 => -amp * angle.sin(),
            2 => -amp * angle.cos(),
            _ => amp * angle.sin(),
        }
    }

    /// `φ^(m)` (order 0) or its derivatives at a rational point, as a plain `f64`.
    pub fn eval(&self, order: u32, x: &BigRational) -> f64 {
        let (num, den) = (x.numer(), x.denom());
        self.terms
            .iter()
            .map(|t| {
                let a = t.ln_amp(order);
                if a == f64::NEG_INFINITY {
                    return 0.0;
                }
                let qx = (BigInt::from(t.q.clone()) * num).mod_floor(den);
                let frac = crate::cfrac::rational_to_f64(&BigRational::new_raw(qx, den.clone()));
                Self::contribution(order, a.exp(), 2.0 * PI * (frac + t.phase0))
            })
            .sum()
    }

    /// Evaluates the active terms on the grid `j/g`, `j < g`, scaled by `e^{-scale}`.
    fn grid_scaled(&self, order: u32, active: &[usize], g: usize, scale: f64) -> Vec<f64> {
        let prepared: Vec<(u64, f64, f64)> = active
            .iter()
            .map(|&i| {
                let t = &self.terms[i];
                let qm = (&t.q % BigUint::from(g as u64)).to_u64().expect("fits");
                (qm, (t.ln_amp(order) - scale).exp(), t.phase0)
            })
            .collect();
        (0..g)
            .into_par_iter()
            .with_min_len(1024)
            .map(|j| {
                prepared
                    .iter()
                    .map(|&(qm, amp, ph)| {
                        let frac = ((qm as u128 * j as u128) % g as u128) as f64 / g as f64;
                        Self::contribution(order, amp, 2.0 * PI * (frac + ph))
                    })
                    .sum()
            })
            .collect()
    }

    /// Values on the grid `j/g` in absolute units, with a sup-norm bound on what was left out.
    pub fn grid(&self, order: u32, g: usize) -> (Vec<f64>, LogMag) {
        let (active, rest) = self.partition(order);
        (self.grid_scaled(order, &active, g, 0.0), rest)
    }
}

/// `φ′^(m)(x)` summed over the stored terms.
pub fn birkhoff_derivative(series: &CocycleSeries, m: i64, x: &BigRational) -> f64 {
    BirkhoffSum::from_i64(series, m).eval(1, x)
}

/// `φ^(m)(x)` summed over the stored terms.
pub fn birkhoff_value(series: &CocycleSeries, m: i64, x: &BigRational) -> f64 {
    BirkhoffSum::from_i64(series, m).eval(0, x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupNormOptions {
    /// Target radius relative to the sum of active amplitudes.
    pub rel_radius: f64,
    pub max_grid: usize,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        SupNormOptions { rel_radius: 1e-4, max_grid: 1 << 22 }
    }
}

/// `‖φ^{(m)(order)}‖_∞ ∈ [value, value + radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupNorm {
    pub value: LogMag,
    pub radius: LogMag,
    pub grid: usize,
}

impl SupNorm {
    pub fn upper(&self) -> LogMag {
        self.value + self.radius
    }
}

/// Certified sup-norm of a derivative of `φ^(m)`.
///
/// With a single dominant term the sup is its amplitude exactly. Otherwise the
/// grid maximum is widened by `h/2` times the termwise bound on the next
/// derivative.
pub fn certified_supnorm(bs: &BirkhoffSum, order: u32, opts: &SupNormOptions) -> Result<SupNorm> {
    if bs.m.is_zero() {
        return Ok(SupNorm { value: LogMag::ZERO, radius: LogMag::ZERO, grid: 0 });
    }
    let (active, rest) = bs.partition(order);
    let float_slack = |ln: f64| 1e-12 * ln.abs().max(1.0) + 1e-15;
    match active.len() {
        0 => Ok(SupNorm { value: LogMag::ZERO, radius: rest, grid: 0 }),
        1 => {
            let ln = bs.terms[active[0]].ln_amp(order);
            let eps = float_slack(ln);
            let lo = LogMag::from_ln(ln - eps);
            let hi = LogMag::from_ln(ln + eps);
            let value = lo.saturating_sub(rest);
            Ok(SupNorm { value, radius: (hi + rest).saturating_sub(value), grid: 0 })
        }
        _ => {
            let scale = active.iter().map(|&i| bs.terms[i].ln_amp(order)).fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = active.iter().map(|&i| (bs.terms[i].ln_amp(order) - scale).exp()).sum();
            let lip: f64 = active.iter().map(|&i| (bs.terms[i].ln_amp(order + 1) - scale).exp()).sum();
            if !lip.is_finite() {
                return Err(Error::Resource("derivative bound overflows; frequencies too far apart for a grid".into()));
            }
            let target = opts.rel_radius * total;
            let need = (lip / (2.0 * target)).ceil().max(16.0);
            if need > opts.max_grid as f64 {
                return Err(Error::Resource(format!(
                    "sup-norm grid needs {need:.3e} points, budget is {}",
                    opts.max_grid
                )));
            }
            let g = (need as usize).next_power_of_two().min(opts.max_grid.next_power_of_two());
            let vals = bs.grid_scaled(order, &active, g, scale);
            let gmax = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let round = 1e-14 * total * active.len() as f64;
            let disc = lip / (2.0 * g as f64);
            let s = LogMag::from_ln(scale);
            let value = (LogMag::from_f64((gmax - round).max(0.0)) * s).saturating_sub(rest);
            let radius = LogMag::from_f64(disc + 2.0 * round) * s + rest + rest;
            Ok(SupNorm { value, radius, grid: g })
        }
    }
}

/// `ln` of the integer `m` as used by bound formulas; 0 for `m = 0`.
pub fn ln_abs(m: &BigInt) -> f64 {
    if m.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_biguint(m.magnitude())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{ContinuedFraction, GaugeFunction};
    use num_traits::One;
    use std::f64::consts::LN_2;

    /// φ with frequencies 1, 2, 5 of the golden-ratio expansion, truncated to depth 12.
    fn small_series() -> CocycleSeries {
        let cf = ContinuedFraction::from_quotients([1u32; 12]).unwrap();
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let freqs = [2usize, 3, 5].iter().map(|&n| (n, cf.all_denominators()[n].clone())).collect();
        CocycleSeries::new(&g, freqs, cf.value()).unwrap()
    }

    fn phi_direct(s: &CocycleSeries, x: f64) -> f64 {
        s.terms()
            .iter()
            .map(|t| {
                let q = t.q.to_f64().unwrap();
                t.ln_amp.exp() / (2.0 * PI * q) * (2.0 * PI * q * x).cos()
            })
            .sum()
    }

    fn dphi_direct(s: &CocycleSeries, x: f64) -> f64 {
        s.terms()
            .iter()
            .map(|t| {
                let q = t.q.to_f64().unwrap();
                -t.ln_amp.exp() * (2.0 * PI * q * x).sin()
            })
            .sum()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_iterate_vanishes() {
        let s = small_series();
        assert_eq!(birkhoff_value(&s, 0, &rat(1, 3)), 0.0);
        assert_eq!(birkhoff_derivative(&s, 0, &rat(1, 3)), 0.0);
    }

    #[test]
    fn first_iterate_is_the_series() {
        let s = small_series();
        for j in 0..17 {
            let x = rat(j, 17);
            let xf = j as f64 / 17.0;
            assert!((birkhoff_value(&s, 1, &x) - phi_direct(&s, xf)).abs() < 1e-14);
            assert!((birkhoff_derivative(&s, 1, &x) - dphi_direct(&s, xf)).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_orbit_sum() {
        let s = small_series();
        let alpha = crate::cfrac::rational_to_f64(s.rotation());
        for m in [-7i64, -1, 2, 5, 13, 40] {
            for j in [0i64, 3, 11] {
                let x = j as f64 / 23.0;
                let (lo, hi) = if m >= 0 { (0, m) } else { (m, 0) };
                let sign = if m >= 0 { 1.0 } else { -1.0 };
                let direct: f64 = (lo..hi).map(|k| phi_direct(&s, x + k as f64 * alpha)).sum::<f64>() * sign;
                let ddirect: f64 = (lo..hi).map(|k| dphi_direct(&s, x + k as f64 * alpha)).sum::<f64>() * sign;
                let xr = rat(j, 23);
                assert!((birkhoff_value(&s, m, &xr) - direct).abs() < 1e-11, "m={m} j={j}");
                assert!((birkhoff_derivative(&s, m, &xr) - ddirect).abs() < 1e-11, "m={m} j={j}");
            }
        }
    }

    #[test]
    fn second_derivative_by_finite_difference() {
        let s = small_series();
        let bs = BirkhoffSum::from_i64(&s, 9);
        let h = 1e-6;
        let x0 = 0.3141;
        let x = |v: f64| BigRational::from_float(v).unwrap();
        let fd = (bs.eval(1, &x(x0 + h)) - bs.eval(1, &x(x0 - h))) / (2.0 * h);
        assert!((fd - bs.eval(2, &x(x0))).abs() < 1e-5 * bs.eval(2, &x(x0)).abs().max(1.0));
        let fd3 = (bs.eval(2, &x(x0 + h)) - bs.eval(2, &x(x0 - h))) / (2.0 * h);
        assert!((fd3 - bs.eval(3, &x(x0))).abs() < 1e-4 * fd3.abs().max(1.0));
    }

    #[test]
    fn supnorm_encloses_dense_maximum() {
        let s = small_series();
        for m in [1i64, 4, 17] {
            let bs = BirkhoffSum::from_i64(&s, m);
            for order in [1u32, 2] {
                let sn = certified_supnorm(&bs, order, &SupNormOptions::default()).unwrap();
                let dense = (0..20_000).map(|j| bs.eval(order, &rat(j, 20_000)).abs()).fold(0.0, f64::max);
                let tail = bs.tail(order).to_f64();
                assert!(sn.value.to_f64() <= dense + tail + 1e-12, "m={m} order={order}");
                assert!(dense <= sn.upper().to_f64() + 1e-12, "m={m} order={order}");
            }
        }
    }

    #[test]
    fn single_term_is_exact() {
        let g = GaugeFunction::power(0.4, 6.0).unwrap();
        let s = CocycleSeries::new(&g, vec![(1, BigUint::from(3u8))], rat(1, 7)).unwrap();
        let bs = BirkhoffSum::from_i64(&s, 5);
        let sn = certified_supnorm(&bs, 1, &SupNormOptions::default()).unwrap();
        let theta = 3.0 / 7.0;
        let r = ((5.0 * PI * theta).sin() / (PI * theta).sin()).abs();
        let expect = r / g.inverse(3f64.exp());
        assert!((sn.value.to_f64() - expect).abs() < 1e-9 * expect + s.tail(1).to_f64() * 5.0);
        assert_eq!(sn.grid, 0);
    }

    #[test]
    fn tiny_phases_stay_in_log_domain() {
        // θ = 3 / 2^5000: |R| at m = 2^4998 is sin(3π/4)/sin(3π/2^5000)
        let big = BigInt::one() << 5000usize;
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let s = CocycleSeries::new(&g, vec![(1, BigUint::from(3u8))], BigRational::new(BigInt::one(), big)).unwrap();
        let m = BigInt::one() << 4998usize;
        let bs = BirkhoffSum::new(&s, &m);
        let sn = certified_supnorm(&bs, 1, &SupNormOptions::default()).unwrap();
        let expect_ln = s.terms()[0].ln_amp + (0.75 * PI).sin().ln() - (3.0 * PI).ln() + 5000.0 * LN_2;
        assert!((bs.termwise_bound(1).ln() - expect_ln).abs() < 1e-9);
        assert!(sn.value.ln() <= expect_ln && expect_ln <= sn.upper().ln());
    }

    #[test]
    fn zero_phase_gives_linear_growth() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let s = CocycleSeries::new(&g, vec![(1, BigUint::from(4u8))], rat(1, 4)).unwrap();
        let bs = BirkhoffSum::from_i64(&s, 1000);
        let sn = certified_supnorm(&bs, 1, &SupNormOptions::default()).unwrap();
        let a = s.terms()[0].ln_amp.exp();
        assert!((bs.termwise_bound(1).to_f64() - 1000.0 * a).abs() < 1e-9 * a * 1000.0);
        assert!(sn.value.to_f64() <= 1000.0 * a && 1000.0 * a <= sn.upper().to_f64());
        let neg = BirkhoffSum::from_i64(&s, -3);
        assert!((neg.eval(1, &rat(1, 5)) + 3.0 * a * -(2.0 * PI * 4.0 / 5.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn grid_budget_is_enforced() {
        let s = small_series();
        let bs = BirkhoffSum::from_i64(&s, 3);
        let opts = SupNormOptions { rel_radius: 1e-9, max_grid: 1024 };
        assert!(matches!(certified_supnorm(&bs, 1, &opts), Err(Error::Resource(_))));
    }
}
