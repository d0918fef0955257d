//! Oscillatory integrals `∫ e^{2πi φ^(m)}` and the van der Corput estimate.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::birkhoff::{certified_supnorm, ln_abs, BirkhoffSum, SupNormOptions};
use super::series::CocycleSeries;
use crate::cfrac::rational_to_f64;
use crate::error::{input_err, Error, Result};

/// A complex integral with an absolute error radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscIntegral {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
    pub points: usize,
}

impl OscIntegral {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

pub const MAX_QUADRATURE_POINTS: usize = 1 << 26;

/// Uniform bound on `|d/dx φ^(m)|` usable as the quadrature Lipschitz constant.
fn phase_lipschitz(bs: &BirkhoffSum, opts: &SupNormOptions) -> Result<f64> {
    let sn = certified_supnorm(bs, 1, opts)?;
    let l = sn.upper().to_f64();
    if !l.is_finite() {
        return Err(Error::Resource("phase derivative too large for quadrature".into()));
    }
    Ok(l)
}

/// Points needed for a rectangle-rule radius of `target`.
pub fn points_for_radius(bs: &BirkhoffSum, target: f64, opts: &SupNormOptions) -> Result<usize> {
    let l = phase_lipschitz(bs, opts)?;
    let n = (PI * l / target).ceil().max(64.0);
    if n > MAX_QUADRATURE_POINTS as f64 {
        return Err(Error::Resource(format!("quadrature needs {n:.3e} points, budget is {MAX_QUADRATURE_POINTS}")));
    }
    Ok(n as usize)
}

/// `∫_T e^{2πi φ^(m)(x)} dx` by the rectangle rule on `points` nodes.
///
/// The integrand is `2π‖φ′^(m)‖`-Lipschitz, so the rule errs by at most
/// `π‖φ′^(m)‖/points`; terms left out of the evaluation add `2π` times their sup.
pub fn circle_integral(bs: &BirkhoffSum, points: usize, opts: &SupNormOptions) -> Result<OscIntegral> {
    if bs.m().is_zero() {
        return Ok(OscIntegral { re: 1.0, im: 0.0, radius: 0.0, points: 0 });
    }
    if points == 0 || points > MAX_QUADRATURE_POINTS {
        return Err(Error::Resource(format!("quadrature point count {points} outside 1..={MAX_QUADRATURE_POINTS}")));
    }
    let lip = phase_lipschitz(bs, opts)?;
    let (vals, rest) = bs.grid(0, points);
    let (mut re, mut im) = (0.0, 0.0);
    for v in &vals {
        let (s, c) = (2.0 * PI * v).sin_cos();
        re += c;
        im += s;
    }
    let n = points as f64;
    let scale = bs.termwise_bound(0).to_f64();
    let rounding = 2.0 * PI * 8.0 * f64::EPSILON * scale.max(1.0) + 4.0 * f64::EPSILON * n.log2().max(1.0);
    let radius = PI * lip / n + 2.0 * PI * rest.to_f64() + rounding;
    Ok(OscIntegral { re: re / n, im: im / n, radius, points })
}

/// Which constructed pair of levels brackets `m/u(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BracketCase {
    /// `u⁻¹(e^{q_k}) ≤ m/u(m) ≤ u⁻¹(e^{q'_k})`: the φ integral is small.
    Alpha { k: usize },
    /// `u⁻¹(e^{q'_k}) ≤ m/u(m) ≤ u⁻¹(e^{q_{k+1}})`: the ψ integral is small.
    AlphaPrime { k: usize },
    /// Below the first constructed level; no estimate applies.
    Below,
}

/// Locates `m/u(m)` among the interleaved thresholds `u⁻¹(e^{q_{n0}}) ≤ u⁻¹(e^{q'_{n0}}) ≤ ...`.
pub fn bracket_case(phi: &CocycleSeries, psi: &CocycleSeries, m: &BigInt) -> BracketCase {
    let gauge = phi.gauge();
    let lm = ln_abs(m);
    let lx = lm - gauge.ln_u_of_ln(lm);
    let mut marks: Vec<(f64, BracketCase)> = Vec::new();
    let mut a = phi.terms().iter().peekable();
    let mut b = psi.terms().iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some(ta), Some(tb)) if ta.n <= tb.n => {
                marks.push((-ta.ln_amp, BracketCase::Alpha { k: ta.n }));
                a.next();
            }
            (_, Some(tb)) => {
                marks.push((-tb.ln_amp, BracketCase::AlphaPrime { k: tb.n }));
                b.next();
            }
            (Some(ta), None) => {
                marks.push((-ta.ln_amp, BracketCase::Alpha { k: ta.n }));
                a.next();
            }
            (None, None) => break,
        }
    }
    let idx = marks.partition_point(|(t, _)| *t <= lx);
    if idx == 0 {
        BracketCase::Below
    } else {
        marks[idx - 1].1
    }
}

/// `202 log u(m) / u(m)^{1/3}`.
pub fn mixing_rhs(phi: &CocycleSeries, m: &BigInt) -> f64 {
    let lu = phi.gauge().ln_u_of_ln(ln_abs(m));
    202.0 * lu * (-lu / 3.0).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingResult {
    pub m: String,
    pub phi: OscIntegral,
    pub psi: OscIntegral,
    /// `I_m = |∫e^{2πiφ^(m)}| · |∫e^{2πiψ^(m)}|`.
    pub value: f64,
    pub radius: f64,
    /// `(f∘φ^m, f)` for `f = sin 2πz`, which equals `½ Re(∫e^{2πiφ^(m)} ∫e^{2πiψ^(m)})`.
    pub correlation: f64,
    pub bound_rhs: f64,
    pub case: BracketCase,
    pub ok: bool,
}

/// `I_m` on the 2-torus as a product of two circle integrals.
pub fn mixing_integral(
    phi: &CocycleSeries,
    psi: &CocycleSeries,
    m: &BigInt,
    points: usize,
    opts: &SupNormOptions,
) -> Result<MixingResult> {
    let a = circle_integral(&BirkhoffSum::new(phi, m), points, opts)?;
    let b = circle_integral(&BirkhoffSum::new(psi, m), points, opts)?;
    let (x, y) = (a.abs(), b.abs());
    let value = x * y;
    let radius = a.radius * (y + b.radius) + b.radius * x;
    let correlation = 0.5 * (a.re * b.re - a.im * b.im);
    let bound_rhs = mixing_rhs(phi, m);
    let ok = m.is_zero() || value <= bound_rhs + radius;
    Ok(MixingResult {
        m: m.to_string(),
        phi: a,
        psi: b,
        value,
        radius,
        correlation,
        bound_rhs,
        case: bracket_case(phi, psi, m),
        ok,
    })
}

/// A phase sampled on the uniform grid `j/N` with certified derivative bounds.
#[derive(Clone, Debug)]
pub struct SampledPhase {
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub sup_d1: f64,
    pub sup_d2: f64,
}

impl SampledPhase {
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, sup_d1: f64, sup_d2: f64) -> Self {
        let xs = (0..n).map(|j| j as f64 / n as f64);
        SampledPhase {
            values: xs.clone().map(&f).collect(),
            derivative: xs.map(&df).collect(),
            sup_d1,
            sup_d2,
        }
    }

    pub fn from_birkhoff(bs: &BirkhoffSum, n: usize, opts: &SupNormOptions) -> Result<Self> {
        let sup_d1 = certified_supnorm(bs, 1, opts)?.upper().to_f64();
        let sup_d2 = certified_supnorm(bs, 2, opts)?.upper().to_f64();
        Ok(SampledPhase { values: bs.grid(0, n).0, derivative: bs.grid(1, n).0, sup_d1, sup_d2 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VdcCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub radius: f64,
    pub ok: bool,
}

fn normalize(iv: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for &(a, b) in iv {
        if !(b > a) || b - a >= 1.0 {
            return Err(input_err!("interval ({a}, {b}) is empty or covers the circle"));
        }
        let s = a.rem_euclid(1.0);
        out.push((s, s + (b - a)));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in out.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(input_err!("intervals overlap near {}", w[1].0));
        }
    }
    if let (Some(f), Some(l)) = (out.first(), out.last()) {
        if out.len() > 1 && l.1 > 1.0 + f.0 {
            return Err(input_err!("intervals overlap across 0"));
        }
    }
    Ok(out)
}

fn inside(iv: &[(f64, f64)], x: f64) -> bool {
    iv.iter().any(|&(a, b)| (x > a && x < b) || (x + 1.0 > a && x + 1.0 < b))
}

/// Compares `|∫ e^{2πif}|` against `‖f″‖/(2πa²) + s/(πa) + Σ(b_j − a_j)`.
pub fn van_der_corput_check(f: &SampledPhase, intervals: &[(f64, f64)], a: f64) -> Result<VdcCheck> {
    let n = f.values.len();
    if n == 0 || f.derivative.len() != n {
        return Err(input_err!("phase samples are empty or mismatched"));
    }
    if !(a > 0.0) {
        return Err(input_err!("lower derivative bound a must be positive"));
    }
    let iv = normalize(intervals)?;
    for (j, d) in f.derivative.iter().enumerate() {
        let x = j as f64 / n as f64;
        if !inside(&iv, x) && d.abs() < a {
            return Err(input_err!("grid point {j} (x = {x}) has |f'| = {} < a = {a} outside the intervals", d.abs()));
        }
    }
    let (mut re, mut im) = (0.0, 0.0);
    for v in &f.values {
        let (s, c) = (2.0 * PI * v).sin_cos();
        re += c;
        im += s;
    }
    let lhs = (re / n as f64).hypot(im / n as f64);
    let radius = PI * f.sup_d1 / n as f64 + 8.0 * f64::EPSILON * (n as f64).log2();
    let s = iv.len() as f64;
    let rhs = f.sup_d2 / (2.0 * PI * a * a) + s / (PI * a) + iv.iter().map(|(x, y)| y - x).sum::<f64>();
    Ok(VdcCheck { lhs, rhs, radius, ok: lhs <= rhs + radius })
}

/// The `2q_k` exclusion intervals around the zeros of `sin 2πq_k(x + (m−1)α/2)`
/// and the derivative floor `a = m/(4 u(m)^{1/3} u⁻¹(e^{q_k}))`.
pub fn stationary_intervals(phi: &CocycleSeries, term: usize, m: &BigInt) -> Result<(Vec<(f64, f64)>, f64)> {
    let t = phi.terms().get(term).ok_or(Error::OutOfRange { index: term, available: phi.terms().len() })?;
    let q: u64 = num_traits::ToPrimitive::to_u64(&t.q)
        .filter(|q| *q <= 1_000_000)
        .ok_or_else(|| Error::Resource("too many stationary intervals".into()))?;
    let alpha = phi.rotation();
    let two_d: BigInt = alpha.denom() * 2;
    let shift = ((m - 1u32) * alpha.numer()).mod_floor(&two_d);
    let shift = rational_to_f64(&BigRational::new_raw(shift, two_d));
    let lm = ln_abs(m);
    let lu = phi.gauge().ln_u_of_ln(lm);
    let half = 1.0 / (2.0 * q as f64) * (-lu / 3.0).exp();
    let intervals = (1..=2 * q)
        .map(|j| {
            let c = j as f64 / (2.0 * q as f64) - shift;
            (c - half, c + half)
        })
        .collect();
    let a = (lm + t.ln_amp - lu / 3.0).exp() / 4.0;
    Ok((intervals, a))
}
