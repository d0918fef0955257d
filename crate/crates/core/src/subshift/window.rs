//! The metrized shift `ρ(x, y) = e^{−u(k(x, y))}`, `k(x, y) = min{|i| : x_i ≠ y_i}`,
//! seen through the finite set of windows `x_{−k+1} … x_{k−1}`.
//!
//! Windows are sorted by their centre-out reading `x_0, x_1, x_{−1}, x_2, …`, so a
//! common prefix of length `ℓ` in that order means agreement on `|i| ≤ (ℓ−1)/2`
//! and the first disagreement sits at `|i| = (ℓ+1)/2`. The level of any pair is
//! then a range minimum over adjacent prefix lengths.

use std::collections::HashSet;

use serde::Serialize;

use super::sequence::{certified_language, SymbolSequence};
use crate::cfrac::GaugeFunction;
use crate::csv::{num, CsvTable};
use crate::error::{input_err, Error, Result};
use crate::metricspace::{net_constant, FiniteMetricSpace};

/// Offset of the `p`-th symbol in centre-out order.
#[inline]
fn offset(p: usize) -> isize {
    if p == 0 {
        0
    } else if p % 2 == 1 {
        p.div_ceil(2) as isize
    } else {
        -((p / 2) as isize)
    }
}

#[inline]
fn level_of_lcp(l: usize) -> usize {
    l.div_ceil(2)
}

fn centre_out_key(w: &[u8], centre: usize, radius: usize) -> Vec<u8> {
    (0..2 * radius + 1).map(|p| w[(centre as isize + offset(p)) as usize]).collect()
}

fn lcp(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Sparse table for range minima over `u16`.
struct RangeMin {
    table: Vec<Vec<u16>>,
}

impl RangeMin {
    fn new(xs: Vec<u16>) -> Self {
        let mut table = vec![xs];
        let mut w = 1;
        while 2 * w <= table[0].len() {
            let prev = table.last().expect("nonempty");
            let next: Vec<u16> = (0..prev.len() - w).map(|i| prev[i].min(prev[i + w])).collect();
            table.push(next);
            w *= 2;
        }
        RangeMin { table }
    }

    /// Minimum over `lo..=hi`.
    #[inline]
    fn query(&self, lo: usize, hi: usize) -> u16 {
        let len = hi - lo + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.table[k];
        row[lo].min(row[hi + 1 - (1 << k)])
    }
}

/// The windows of radius `k` (length `2k − 1`) of a sequence, with a gauge.
#[derive(Clone, Debug)]
pub struct ShiftSpace {
    radius: usize,
    gauge: GaugeFunction,
    /// Windows in original orientation, sorted by centre-out reading.
    windows: Vec<Vec<u8>>,
    /// `adjacent[i]` = centre-out common prefix of windows `i − 1` and `i`.
    adjacent: Vec<u16>,
    spins: Vec<i8>,
}

impl ShiftSpace {
    /// Collects every factor of length `2k − 1` from a certified scan of the sequence.
    pub fn new(seq: &mut SymbolSequence, gauge: GaugeFunction, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(input_err!("window radius must be at least 1"));
        }
        if 2 * radius - 1 > u16::MAX as usize / 2 {
            return Err(input_err!("window radius {radius} is too large"));
        }
        let lang = certified_language(seq, 2 * radius - 1)?;
        let words: Vec<Vec<u8>> = lang.words.into_keys().collect();
        Ok(Self::from_windows(words, seq.spin_values().to_vec(), gauge, radius))
    }

    fn from_windows(words: Vec<Vec<u8>>, spins: Vec<i8>, gauge: GaugeFunction, radius: usize) -> Self {
        let c = radius - 1;
        let mut keyed: Vec<(Vec<u8>, Vec<u8>)> = words.into_iter().map(|w| (centre_out_key(&w, c, c), w)).collect();
        keyed.sort();
        let adjacent =
            (0..keyed.len()).map(|i| if i == 0 { 0 } else { lcp(&keyed[i - 1].0, &keyed[i].0) as u16 }).collect();
        let windows = keyed.into_iter().map(|(_, w)| w).collect();
        ShiftSpace { radius, gauge, windows, adjacent, spins }
    }

    pub fn with_gauge(mut self, gauge: GaugeFunction) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn gauge(&self) -> &GaugeFunction {
        &self.gauge
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn windows(&self) -> &[Vec<u8>] {
        &self.windows
    }

    /// `e^{−u(j)}` for `j = 0..=k`; level `k` stands for agreement on the whole window.
    pub fn scale(&self) -> Vec<f64> {
        (0..=self.radius).map(|j| (-self.gauge.u(j as f64)).exp()).collect()
    }

    /// Level `k(x, y)` between windows `a` and `b`.
    pub fn level(&self, a: usize, b: usize) -> usize {
        if a == b {
            return self.radius;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let l = self.adjacent[lo + 1..=hi].iter().copied().min().expect("nonempty range");
        level_of_lcp(l as usize)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        (-self.gauge.u(self.level(a, b) as f64)).exp()
    }

    /// Smallest distance between distinct windows; at least `e^{−u(k−1)}`.
    pub fn separation(&self) -> f64 {
        let top = self.adjacent.iter().skip(1).copied().max().map_or(0, |l| level_of_lcp(l as usize));
        (-self.gauge.u(top as f64)).exp()
    }

    /// Checks that every factor of length `2k + 1` restricts to a stored window,
    /// so every point of the shift lies within `e^{−u(k)}` of a window class.
    pub fn covering_radius(&self, seq: &mut SymbolSequence) -> Result<f64> {
        let lang = certified_language(seq, 2 * self.radius + 1)?;
        let stored: HashSet<&[u8]> = self.windows.iter().map(Vec::as_slice).collect();
        for w in lang.words.keys() {
            let inner = &w[1..w.len() - 1];
            if !stored.contains(inner) {
                return Err(Error::Certification(format!(
                    "a factor of length {} has a centre window missing from the space",
                    w.len()
                )));
            }
        }
        Ok((-self.gauge.u(self.radius as f64)).exp())
    }

    /// The windows as a finite ultrametric space.
    pub fn window_metric_space(&self) -> Result<FiniteMetricSpace> {
        let m = self.windows.len();
        let mut level = vec![self.radius as u16; m * m];
        for i in 0..m {
            let mut run = u16::MAX;
            for b in i + 1..m {
                run = run.min(self.adjacent[b]);
                let l = level_of_lcp(run as usize) as u16;
                level[i * m + b] = l;
                level[b * m + i] = l;
            }
        }
        FiniteMetricSpace::from_levels(m, level, self.scale())
            .map(|s| s.with_label(format!("shift windows, radius {}", self.radius)))
    }

    /// `Lip(f)` for `f(x) = spin(x_0)`: only pairs with different centres can
    /// differ, and those sit at distance `e^{−u(0)}`.
    pub fn spin_lipschitz(&self) -> f64 {
        let present: Vec<i8> = self.windows.iter().map(|w| self.spins[w[self.radius - 1] as usize]).collect();
        let (lo, hi) = present.iter().fold((i8::MAX, i8::MIN), |(l, h), &s| (l.min(s), h.max(s)));
        if present.is_empty() || lo == hi {
            return 0.0;
        }
        (hi - lo) as f64 / (-self.gauge.u(0.0)).exp()
    }

    /// `sup_j 𝒩(δ_j) δ_j^d` with `δ_j` just below `e^{−u(j)}`, `j = 0..k−1`:
    /// the net constant visible at the resolution of the windows.
    pub fn measured_net_constant(&self, d: f64) -> Result<f64> {
        let space = self.window_metric_space()?;
        let deltas: Vec<f64> = (0..self.radius).map(|j| (-self.gauge.u(j as f64)).exp() * (1.0 - 1e-9)).collect();
        net_constant(&space, d, &deltas)
    }

    /// For every `1 ≤ n ≤ n_max` and both directions, the smallest level after
    /// the shift among pairs at each starting level.
    pub fn transitions(&self, n_max: usize) -> Result<ShiftTransitions> {
        if n_max >= self.radius {
            return Err(input_err!("n_max = {n_max} must be below the window radius {}", self.radius));
        }
        let m = self.windows.len();
        let c = self.radius - 1;
        let none = u16::MAX;
        let mut forward = Vec::with_capacity(n_max);
        let mut backward = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            for (dir, out) in [(1isize, &mut forward), (-1, &mut backward)] {
                let centre = (c as isize + dir * n as isize) as usize;
                let r = c - n;
                let keys: Vec<Vec<u8>> = self.windows.iter().map(|w| centre_out_key(w, centre, r)).collect();
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
                let mut rank = vec![0usize; m];
                for (p, &i) in order.iter().enumerate() {
                    rank[i] = p;
                }
                let adj: Vec<u16> = (0..m)
                    .map(|p| if p == 0 { 0 } else { lcp(&keys[order[p - 1]], &keys[order[p]]) as u16 })
                    .collect();
                let rmq = RangeMin::new(adj);
                let full = (2 * r + 1) as u16;
                let mut min_after = vec![none; self.radius];
                for i in 0..m {
                    let mut run = u16::MAX;
                    for b in i + 1..m {
                        run = run.min(self.adjacent[b]);
                        if run == 0 {
                            break;
                        }
                        let (p, q) = (rank[i].min(rank[b]), rank[i].max(rank[b]));
                        let l = rmq.query(p + 1, q);
                        if l == full {
                            // no disagreement visible after the shift
                            continue;
                        }
                        let j = level_of_lcp(run as usize);
                        let after = level_of_lcp(l as usize) as u16;
                        if after < min_after[j] {
                            min_after[j] = after;
                        }
                    }
                }
                out.push(min_after);
            }
        }
        Ok(ShiftTransitions { radius: self.radius, forward, backward })
    }

    /// Growth table for `n = 0..=n_max` under the stored gauge.
    pub fn shift_growth(&self, n_max: usize) -> Result<GrowthTable> {
        Ok(self.transitions(n_max)?.evaluate(&self.gauge))
    }
}

/// Gauge-free summary of how the shift moves levels; see [`ShiftSpace::transitions`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftTransitions {
    radius: usize,
    /// `forward[n−1][j]`: least level of `(φ^n x, φ^n y)` over pairs with `k(x, y) = j`.
    forward: Vec<Vec<u16>>,
    backward: Vec<Vec<u16>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    /// `max(Lip φ^n, Lip φ^{−n})` estimated from window pairs.
    pub lower: f64,
    /// Running maximum of `lower`, an estimate of `Γ̂_n`.
    pub lower_running: f64,
    /// `e^{u(n)}`.
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

impl ShiftTransitions {
    pub fn n_max(&self) -> usize {
        self.forward.len()
    }

    pub fn evaluate(&self, gauge: &GaugeFunction) -> GrowthTable {
        let u: Vec<f64> = (0..=self.radius).map(|j| gauge.u(j as f64)).collect();
        let best = |table: &[u16]| {
            table
                .iter()
                .enumerate()
                .filter(|(_, &r)| r != u16::MAX)
                .map(|(j, &r)| (u[j] - u[r as usize]).exp())
                .fold(1.0f64, f64::max)
        };
        let mut rows = vec![GrowthRow { n: 0, lower: 1.0, lower_running: 1.0, upper: 1.0 }];
        let mut running = 1.0f64;
        for (n, un) in u.iter().enumerate().take(self.n_max() + 1).skip(1) {
            // a bijection and its inverse cannot both contract
            let lower = best(&self.forward[n - 1]).max(best(&self.backward[n - 1]));
            running = running.max(lower);
            rows.push(GrowthRow { n, lower, lower_running: running, upper: un.exp() });
        }
        GrowthTable { rows }
    }
}

impl GrowthTable {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(["n", "lower", "lower_running", "upper"]);
        for r in &self.rows {
            t.push(vec![r.n.to_string(), num(r.lower), num(r.lower_running), num(r.upper)]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs_space(d: f64, k: usize) -> (SymbolSequence, ShiftSpace) {
        let mut seq = SymbolSequence::rudin_shapiro_letters();
        let space = ShiftSpace::new(&mut seq, GaugeFunction::log_scaled(d).unwrap(), k).unwrap();
        (seq, space)
    }

    #[test]
    fn centre_out_offsets() {
        let offs: Vec<isize> = (0..7).map(offset).collect();
        assert_eq!(offs, vec![0, 1, -1, 2, -2, 3, -3]);
        assert_eq!((0..6).map(level_of_lcp).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn range_min_matches_scan() {
        let xs: Vec<u16> = (0..100).map(|i| ((i * 37 + 11) % 23) as u16).collect();
        let r = RangeMin::new(xs.clone());
        for lo in 0..100 {
            for hi in lo..100 {
                assert_eq!(r.query(lo, hi), *xs[lo..=hi].iter().min().unwrap());
            }
        }
    }

    #[test]
    fn window_counts() {
        let (_, s) = rs_space(1.0, 2);
        assert_eq!(s.len(), 16);
        let mut bin = SymbolSequence::rudin_shapiro();
        let one = ShiftSpace::new(&mut bin, GaugeFunction::log_scaled(1.0).unwrap(), 1).unwrap();
        let m = one.window_metric_space().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.distance(0, 1), 1.0);
    }

    #[test]
    fn levels_agree_with_direct_comparison() {
        let (_, s) = rs_space(1.0, 6);
        let c = s.radius() as isize - 1;
        for a in 0..s.len() {
            for b in 0..s.len() {
                if a == b {
                    continue;
                }
                let (x, y) = (&s.windows()[a], &s.windows()[b]);
                let direct = (0..=c).find(|&i| x[(c + i) as usize] != y[(c + i) as usize] || x[(c - i) as usize] != y[(c - i) as usize]);
                assert_eq!(Some(s.level(a, b) as isize), direct);
            }
        }
    }

    #[test]
    fn separation_and_covering_radius() {
        let (mut seq, s) = rs_space(1.0, 20);
        let g = s.gauge().clone();
        assert_eq!(s.len(), 8 * 38);
        assert!(s.separation() >= (-g.u(19.0)).exp() * (1.0 - 1e-12));
        assert_eq!(s.covering_radius(&mut seq).unwrap(), (-g.u(20.0)).exp());
        let m = s.window_metric_space().unwrap();
        m.check_triangle(0, 20_000, 3).unwrap();
    }

    #[test]
    fn net_constant_and_lipschitz() {
        let (_, s) = rs_space(1.0, 40);
        assert_eq!(s.spin_lipschitz(), 2.0);
        let kappa = s.measured_net_constant(1.0).unwrap();
        assert!((kappa - 16.0).abs() < 1e-6, "{kappa}");
    }

    #[test]
    fn growth_sandwich() {
        for d in [1.0, 2.0] {
            let (_, s) = rs_space(d, 24);
            let t = s.shift_growth(12).unwrap();
            assert_eq!(t.rows[0].lower, 1.0);
            assert_eq!(t.rows[0].upper, 1.0);
            for r in &t.rows {
                assert!(r.lower_running <= r.upper * (1.0 + 1e-12), "{r:?}");
            }
            for r in &t.rows[3..] {
                assert!((r.upper - (r.n as f64).powf(1.0 / d)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn literal_log_gauge_misses_n_to_the_one_over_d_at_small_n() {
        // a concave gauge with u(0) = 0 cannot equal ln(t)/d below t = e
        let g = GaugeFunction::log_scaled(1.0).unwrap();
        assert!((g.u(1.0).exp() - 1.0).abs() > 0.1);
        assert!((g.u(2.0).exp() - 2.0).abs() > 0.01);
        assert!((g.u(3.0).exp() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn growth_rejects_shifts_past_the_window() {
        let (_, s) = rs_space(1.0, 5);
        assert!(s.shift_growth(5).is_err());
    }

    #[test]
    fn csv_shape() {
        let (_, s) = rs_space(1.0, 8);
        let csv = s.shift_growth(4).unwrap().to_csv().render();
        assert!(csv.starts_with("n,lower,lower_running,upper\n0,1e0,1e0,1e0\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
