//! Mixing rates and their adjoint spacing sequences.
//!
//! Given `a_n → 0`, the step majorant `b_n = s/m_n` with `m_n = ⌊s / sup_{i≥n} a_i⌋`
//! (and `s ≥ sup a` a rescaling factor) is non-increasing, and `v(n)` is the least
//! `k` with `b_k/k < 1/(4n)`. Then `Σ_{0<iv(n)≤n} a_{iv(n)} ≤ (n/v(n)) b_{v(n)} ≤ 1/4`.

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RateProfile {
    /// `a_1, a_2, …` as listed.
    Table { values: Vec<f64> },
    /// `a_n = c · n^{−ν}`.
    Power { c: f64, nu: f64 },
    /// `a_n = r^n`.
    Geometric { r: f64 },
    /// `a_n = c / ln(n + 2)`.
    InverseLog { c: f64 },
}

impl RateProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            RateProfile::Table { values } => {
                !values.is_empty()
                    && values.iter().all(|a| a.is_finite() && *a > 0.0)
                    && values.last() < values.first()
            }
            RateProfile::Power { c, nu } => *c > 0.0 && c.is_finite() && *nu > 0.0 && nu.is_finite(),
            RateProfile::Geometric { r } => *r > 0.0 && *r < 1.0,
            RateProfile::InverseLog { c } => *c > 0.0 && c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(input_err!("rate {self:?} is not a positive sequence tending to zero"))
        }
    }

    /// `a_n` for `n ≥ 1`; `None` past the end of a table.
    pub fn eval(&self, n: u64) -> Option<f64> {
        debug_assert!(n >= 1);
        match self {
            RateProfile::Table { values } => values.get((n - 1) as usize).copied(),
            RateProfile::Power { c, nu } => Some(c * (n as f64).powf(-nu)),
            RateProfile::Geometric { r } => Some(r.powf(n as f64)),
            RateProfile::InverseLog { c } => Some(c / ((n + 2) as f64).ln()),
        }
    }

    /// Number of stored terms, if finite.
    pub fn term_count(&self) -> Option<u64> {
        match self {
            RateProfile::Table { values } => Some(values.len() as u64),
            _ => None,
        }
    }

    /// The analytic profiles are non-increasing, so their tail supremum is the current term.
    fn is_monotone(&self) -> bool {
        !matches!(self, RateProfile::Table { .. })
    }

    pub fn is_summable(&self) -> bool {
        match self {
            RateProfile::Power { nu, .. } => *nu > 1.0,
            RateProfile::Geometric { .. } | RateProfile::Table { .. } => true,
            RateProfile::InverseLog { .. } => false,
        }
    }
}

/// Largest `m` kept in `b_n = s/m`; beyond it `a_n` is below `f64` resolution of `s`.
const MAX_STEP: f64 = 9.007_199_254_740_992e15;

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointSequence {
    source: RateProfile,
    /// `s = max(1, sup a)`, so that `a/s ≤ 1`.
    scale: f64,
    /// `m[k−1] = m_k`, so `b_k = scale / m_k`.
    steps: Vec<f64>,
    /// `v[n−1] = v(n)`.
    v: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjointReport {
    pub n_max: u64,
    pub scale: f64,
    /// `max_n Σ_{0<iv(n)≤n} a_{iv(n)}`.
    pub max_partial_sum: f64,
    pub worst_n: u64,
    pub partial_sums_ok: bool,
    /// Whether the step majorant dominates `a` and is non-increasing; `None` for explicit spacings.
    pub majorant_ok: Option<bool>,
    /// `(2^j, 2^j / v(2^j))` for `2^j ≤ n_max`.
    pub dyadic: Vec<(u64, f64)>,
    /// Least `j` from which the dyadic ratios increase strictly to the end, if
    /// that tail has at least [`MIN_DYADIC_TAIL`] points.
    pub dyadic_threshold: Option<u32>,
}

pub const MIN_DYADIC_TAIL: usize = 4;

pub fn build_adjoint(rate: &RateProfile, n_max: u64) -> Result<AdjointSequence> {
    rate.validate()?;
    if n_max == 0 {
        return Err(input_err!("n_max must be positive"));
    }
    // b_k ≤ s, so k = ⌈4 n s⌉ + 1 always satisfies the defining inequality
    let a1 = rate.eval(1).expect("validated");
    let scale = if rate.is_monotone() {
        a1.max(1.0)
    } else {
        match rate {
            RateProfile::Table { values } => values.iter().copied().fold(1.0, f64::max),
            _ => unreachable!(),
        }
    };
    let k_max = (4.0 * n_max as f64 * scale).ceil() as u64 + 1;
    if let Some(len) = rate.term_count() {
        if len < k_max {
            return Err(input_err!("rate table has {len} terms but indices up to {k_max} are needed"));
        }
    }
    let a: Vec<f64> = (1..=k_max).map(|k| rate.eval(k).expect("range checked")).collect();
    let mut tail = vec![0.0; a.len()];
    let mut run = 0.0f64;
    for k in (0..a.len()).rev() {
        run = if rate.is_monotone() { a[k] } else { run.max(a[k]) };
        tail[k] = run;
    }
    let steps: Vec<f64> = tail
        .iter()
        .map(|&t| {
            let mut m = (scale / t).floor().clamp(1.0, MAX_STEP);
            // keep s/m ≥ a in floating point, not just in exact arithmetic
            while m > 1.0 && scale / m < t {
                m -= 1.0;
            }
            m
        })
        .collect();
    let mut v = Vec::with_capacity(n_max as usize);
    let mut k = 1u64;
    for n in 1..=n_max {
        // b_k/k is decreasing in k, so v is non-decreasing in n
        while !(4.0 * n as f64 * scale < k as f64 * steps[(k - 1) as usize]) {
            k += 1;
        }
        v.push(k);
    }
    Ok(AdjointSequence { source: rate.clone(), scale, steps, v })
}

/// `v(n) = ⌈C n^{1−ν}⌉` with `C = 4c/(1−ν)` for `a_n = c n^{−ν}`, `0 < ν < 1`.
/// From `Σ_{i≤m} i^{−ν} ≤ m^{1−ν}/(1−ν)` the partial sums are at most `c n^{1−ν}/((1−ν) v) ≤ 1/4`.
pub fn power_law_adjoint(c: f64, nu: f64, n_max: u64) -> Result<AdjointSequence> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(input_err!("power-law spacing needs 0 < ν < 1, got {nu}"));
    }
    let cc = 4.0 * c / (1.0 - nu);
    let v = (1..=n_max).map(|n| (cc * (n as f64).powf(1.0 - nu)).ceil().max(1.0) as u64).collect();
    AdjointSequence::with_spacing(RateProfile::Power { c, nu }, v)
}

/// The least constant `v_0` whose partial sums stay within `1/4` for all `n ≤ n_max`.
pub fn constant_adjoint(rate: &RateProfile, n_max: u64) -> Result<AdjointSequence> {
    rate.validate()?;
    for v0 in 1..=n_max.max(1) {
        let mut sum = 0.0;
        let mut i = 1;
        while i * v0 <= n_max && sum <= 0.25 {
            sum += rate.eval(i * v0).ok_or_else(|| input_err!("rate table ends before index {}", i * v0))?;
            i += 1;
        }
        if sum <= 0.25 {
            return AdjointSequence::with_spacing(rate.clone(), vec![v0; n_max as usize]);
        }
    }
    Err(input_err!("no constant spacing up to {n_max} keeps the partial sums within 1/4"))
}

impl AdjointSequence {
    /// An explicitly given spacing `v(1), …, v(n_max)`, without a majorant.
    pub fn with_spacing(source: RateProfile, v: Vec<u64>) -> Result<Self> {
        source.validate()?;
        if v.is_empty() || v.contains(&0) {
            return Err(input_err!("spacing must be a nonempty sequence of positive integers"));
        }
        Ok(AdjointSequence { source, scale: 1.0, steps: Vec::new(), v })
    }

    pub fn source(&self) -> &RateProfile {
        &self.source
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n_max(&self) -> u64 {
        self.v.len() as u64
    }

    pub fn v(&self, n: u64) -> u64 {
        self.v[(n - 1) as usize]
    }

    pub fn b(&self, k: u64) -> f64 {
        self.scale / self.steps[(k - 1) as usize]
    }

    /// The breakpoints `N_m` of the step majorant within the computed range.
    pub fn thresholds(&self) -> Vec<(u64, f64)> {
        let mut out = Vec::new();
        for (i, &m) in self.steps.iter().enumerate() {
            if i == 0 || m != self.steps[i - 1] {
                out.push((i as u64 + 1, m));
            }
        }
        out
    }

    fn partial_sum(&self, n: u64) -> f64 {
        let v = self.v(n);
        (1..=n / v).map(|i| self.source.eval(i * v).expect("in range")).sum()
    }

    /// Checks the partial-sum condition for every `n ≤ n_max` and the dyadic growth of `n/v(n)`.
    pub fn report(&self) -> AdjointReport {
        let n_max = self.n_max();
        // the sum only grows with n while v(n) stays fixed, so the last n of each run suffices
        let mut worst = (0.0f64, 1u64);
        for n in 1..=n_max {
            if self.steps.is_empty() && n < n_max && self.v(n + 1) == self.v(n) {
                continue;
            }
            if n == n_max || self.v(n + 1) != self.v(n) {
                let s = self.partial_sum(n);
                if s > worst.0 {
                    worst = (s, n);
                }
            }
        }
        let majorant_ok = (!self.steps.is_empty()).then(|| {
            (1..=self.steps.len() as u64).all(|k| self.b(k) >= self.source.eval(k).expect("in range"))
                && self.steps.windows(2).all(|w| w[1] >= w[0])
        });
        let dyadic: Vec<(u64, f64)> =
            (0..64).map(|j| 1u64 << j).take_while(|&n| n <= n_max).map(|n| (n, n as f64 / self.v(n) as f64)).collect();
        let mut start = dyadic.len().saturating_sub(1);
        while start > 0 && dyadic[start - 1].1 < dyadic[start].1 {
            start -= 1;
        }
        let dyadic_threshold =
            (!dyadic.is_empty() && dyadic.len() - start >= MIN_DYADIC_TAIL).then_some(start as u32);
        AdjointReport {
            n_max,
            scale: self.scale,
            max_partial_sum: worst.0,
            worst_n: worst.1,
            partial_sums_ok: worst.0 <= 0.25,
            majorant_ok,
            dyadic,
            dyadic_threshold,
        }
    }
}
