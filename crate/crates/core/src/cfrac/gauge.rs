use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

/// Shape of a concave increasing gauge `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GaugeKind {
    /// `u(t) = coefficient · t^exponent`.
    Power { exponent: f64, coefficient: f64 },
    /// `u(t) = ln(t)/d` for `t ≥ e`, continued linearly to `u(0) = 0`.
    LogScaled { d: f64 },
    /// Piecewise-linear through `(t, u)` points, extrapolated by the last segment.
    Table { points: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaugeKind", into = "GaugeKind")]
pub struct GaugeFunction {
    kind: GaugeKind,
}

impl TryFrom<GaugeKind> for GaugeFunction {
    type Error = crate::Error;
    fn try_from(kind: GaugeKind) -> Result<Self> {
        GaugeFunction::new(kind)
    }
}

impl From<GaugeFunction> for GaugeKind {
    fn from(g: GaugeFunction) -> Self {
        g.kind
    }
}

const BISECT_ITERS: usize = 200;

impl GaugeFunction {
    pub fn new(kind: GaugeKind) -> Result<Self> {
        match &kind {
            GaugeKind::Power { exponent, coefficient } => {
                if !(*exponent > 0.0 && *exponent <= 1.0) {
                    return Err(input_err!("power gauge exponent {exponent} outside (0, 1]"));
                }
                if !(*coefficient > 0.0 && coefficient.is_finite()) {
                    return Err(input_err!("power gauge coefficient {coefficient} must be positive"));
                }
            }
            GaugeKind::LogScaled { d } => {
                if !(*d > 0.0 && d.is_finite()) {
                    return Err(input_err!("log gauge needs d > 0, got {d}"));
                }
            }
            GaugeKind::Table { points } => {
                if points.len() < 2 {
                    return Err(input_err!("table gauge needs at least two points"));
                }
                for w in points.windows(2) {
                    if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                        return Err(input_err!("table gauge must be strictly increasing in t and u"));
                    }
                }
                for w in points.windows(3) {
                    let s0 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    let s1 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
                    if s1 > s0 * (1.0 + 1e-12) {
                        return Err(input_err!("table gauge is not concave near t={}", w[1].0));
                    }
                }
            }
        }
        Ok(GaugeFunction { kind })
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn power(exponent: f64, coefficient: f64) -> Result<Self> {
        Self::new(GaugeKind::Power { exponent, coefficient })
    }

    pub fn log_scaled(d: f64) -> Result<Self> {
        Self::new(GaugeKind::LogScaled { d })
    }

    pub fn u(&self, t: f64) -> f64 {
        match &self.kind {
            GaugeKind::Power { exponent, coefficient } => coefficient * t.max(0.0).powf(*exponent),
            GaugeKind::LogScaled { d } => {
                if t <= std::f64::consts::E {
                    t.max(0.0) / (d * std::f64::consts::E)
                } else {
                    t.ln() / d
                }
            }
            GaugeKind::Table { points } => table_eval(points, t),
        }
    }

    /// `u⁻¹(s)` by monotone bisection.
    pub fn inverse(&self, s: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.u(hi) < s {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        for _ in 0..BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.u(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// `ln u(e^{lt})`, usable far beyond the `f64` range of `t`.
    pub fn ln_u_of_ln(&self, lt: f64) -> f64 {
        match &self.kind {
            GaugeKind::Power { exponent, coefficient } => coefficient.ln() + exponent * lt,
            GaugeKind::LogScaled { d } => {
                if lt <= 1.0 {
                    lt - (d * std::f64::consts::E).ln()
                } else {
                    (lt / d).ln()
                }
            }
            GaugeKind::Table { points } => {
                if lt < 600.0 {
                    table_eval(points, lt.exp()).ln()
                } else {
                    // far out the extrapolated line is dominated by its slope
                    let (a, b) = (points[points.len() - 2], points[points.len() - 1]);
                    ((b.1 - a.1) / (b.0 - a.0)).ln() + lt
                }
            }
        }
    }

    /// `ln u⁻¹(e^y)` by bisection on `ln t`.
    pub fn ln_inverse_exp(&self, y: f64) -> f64 {
        if y == f64::INFINITY {
            return f64::INFINITY;
        }
        let mut lo = -64.0;
        let mut hi = 64.0;
        while self.ln_u_of_ln(lo) > y {
            hi = lo;
            lo *= 2.0;
            if lo < -1e300 {
                return f64::NEG_INFINITY;
            }
        }
        while self.ln_u_of_ln(hi) < y {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        for _ in 0..BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.ln_u_of_ln(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Closed-form `ln u⁻¹(e^y)` where one exists.
    pub fn ln_inverse_exp_closed(&self, y: f64) -> Option<f64> {
        match &self.kind {
            GaugeKind::Power { exponent, coefficient } => Some((y - coefficient.ln()) / exponent),
            GaugeKind::LogScaled { d } => {
                let s = y.exp();
                if s <= 1.0 / d {
                    Some((d * std::f64::consts::E).ln() + y)
                } else {
                    Some(d * s)
                }
            }
            GaugeKind::Table { .. } => None,
        }
    }

    /// Checks the torus-construction requirements `u(1) ≥ 1` and
    /// `u(x) ≤ x^{3/4}` for `x ≥ 1` on a logarithmic sample.
    pub fn check_torus_admissible(&self) -> Result<()> {
        if self.u(1.0) < 1.0 {
            return Err(input_err!("gauge has u(1) = {} < 1", self.u(1.0)));
        }
        for i in 0..=400 {
            let lt = i as f64 * 0.25;
            let lu = self.ln_u_of_ln(lt);
            if lu > 0.75 * lt + 1e-12 {
                return Err(input_err!("gauge exceeds x^(3/4) at x = e^{lt}"));
            }
        }
        Ok(())
    }
}

fn table_eval(points: &[(f64, f64)], t: f64) -> f64 {
    let i = match points.iter().position(|p| p.0 > t) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => points.len() - 2,
    };
    let (a, b) = (points[i], points[i + 1]);
    a.1 + (t - a.0) * (b.1 - a.1) / (b.0 - a.0)
}
