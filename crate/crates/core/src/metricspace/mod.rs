//! Finite metric spaces and the covering machinery built on them.

mod capacity;
mod cover;
mod dimension;
mod kt;

pub use capacity::{d_bound, kt_bound, tau, tau_closed_form, theta, theta_closed_form, Bisection};
pub use cover::{
    exact_covering_number, farthest_point_order, greedy_net, min_set_cover, Ball, CoverMethod, CoveringProfile,
    FarthestPointOrder, SetCover, DEFAULT_EXACT_BUDGET,
};
pub use dimension::{box_dimension, fit_log_log, net_constant, DimensionFit, DimensionSample};
pub use kt::{kt_oracle, KtCase, KtOutcome, DEFAULT_KT_NODES};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Store {
    Dense(Vec<f64>),
    /// `d(i, j) = scale[level[i·n + j]]`; used for ultrametrics with few distinct values.
    Levels { level: Vec<u16>, scale: Vec<f64> },
}

/// A metric on `{0, …, n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    store: Store,
    label: Option<String>,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl FiniteMetricSpace {
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(input_err!("row {i} has {} entries, expected {n}", r.len()));
            }
            d.extend(r);
        }
        Self::dense(n, d)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = if i == j { 0.0 } else { f(i, j) };
            }
        }
        Self::dense(n, d)
    }

    /// Points on the real line with the absolute-value distance.
    pub fn on_line(xs: &[f64]) -> Result<Self> {
        Self::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs())
    }

    fn dense(n: usize, d: Vec<f64>) -> Result<Self> {
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(input_err!("d({i},{i}) = {} is not zero", d[i * n + i]));
            }
            for j in 0..i {
                let (a, b) = (d[i * n + j], d[j * n + i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(input_err!("d({i},{j}) = {a} is not a finite nonnegative number"));
                }
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(input_err!("d({i},{j}) = {a} but d({j},{i}) = {b}"));
                }
            }
        }
        Ok(FiniteMetricSpace { n, store: Store::Dense(d), label: None })
    }

    /// Distances indexed by a symmetric level table: `d(i, j) = scale[level(i, j)]`.
    pub fn from_levels(n: usize, level: Vec<u16>, scale: Vec<f64>) -> Result<Self> {
        if level.len() != n * n {
            return Err(input_err!("level table has {} entries, expected {}", level.len(), n * n));
        }
        if let Some(s) = scale.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(input_err!("scale value {s} is not a finite nonnegative number"));
        }
        for i in 0..n {
            for j in 0..i {
                let l = level[i * n + j];
                if l != level[j * n + i] {
                    return Err(input_err!("level table is not symmetric at ({i},{j})"));
                }
                if l as usize >= scale.len() {
                    return Err(input_err!("level {l} at ({i},{j}) has no scale entry"));
                }
            }
        }
        Ok(FiniteMetricSpace { n, store: Store::Levels { level, scale }, label: None })
    }

    /// Reads a distance matrix from CSV. A header row and a label column are
    /// recognised by their cells not parsing as numbers.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Vec<Option<f64>> = cells.iter().map(|c| c.parse::<f64>().ok()).collect();
            let body = if parsed[0].is_none() { &parsed[1..] } else { &parsed[..] };
            if body.iter().all(Option::is_none) && rows.is_empty() {
                continue;
            }
            let row: Option<Vec<f64>> = body.iter().copied().collect();
            rows.push(row.ok_or_else(|| input_err!("line {}: non-numeric distance", ln + 1))?);
        }
        if rows.is_empty() {
            return Err(input_err!("no distance rows found"));
        }
        Self::from_matrix(rows)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text).map(|s| s.with_label(path.display().to_string()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.store {
            Store::Dense(d) => d[i * self.n + j],
            Store::Levels { level, scale } => scale[level[i * self.n + j] as usize],
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.store {
            Store::Dense(d) => d.iter().copied().fold(0.0, f64::max),
            Store::Levels { level, scale } => {
                let mut seen = vec![false; scale.len()];
                for i in 0..self.n {
                    for j in 0..i {
                        seen[level[i * self.n + j] as usize] = true;
                    }
                }
                scale.iter().zip(seen).filter(|(_, s)| *s).map(|(v, _)| *v).fold(0.0, f64::max)
            }
        }
    }

    /// The snowflaked metric `d^β`.
    pub fn holder_transform(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(input_err!("Hölder exponent {beta} outside (0, 1]"));
        }
        let store = match &self.store {
            Store::Dense(d) => Store::Dense(d.iter().map(|x| x.powf(beta)).collect()),
            Store::Levels { level, scale } => {
                Store::Levels { level: level.clone(), scale: scale.iter().map(|x| x.powf(beta)).collect() }
            }
        };
        let label = self.label.as_ref().map(|l| format!("{l}^{beta}"));
        Ok(FiniteMetricSpace { n: self.n, store, label })
    }

    /// Checks the triangle inequality on every triple when `n ≤ exhaustive_up_to`,
    /// otherwise on `samples` random triples drawn from `seed`.
    pub fn check_triangle(&self, exhaustive_up_to: usize, samples: usize, seed: u64) -> Result<()> {
        let bad = |i: usize, j: usize, k: usize| {
            let lhs = self.distance(i, k);
            let rhs = self.distance(i, j) + self.distance(j, k);
            lhs > rhs * (1.0 + 1e-12) + 1e-300
        };
        let fail = |i, j, k| {
            Err(input_err!(
                "triangle inequality fails: d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {}",
                self.distance(i, k),
                self.distance(i, j) + self.distance(j, k)
            ))
        };
        if self.n <= exhaustive_up_to {
            for i in 0..self.n {
                for j in 0..self.n {
                    for k in 0..self.n {
                        if bad(i, j, k) {
                            return fail(i, j, k);
                        }
                    }
                }
            }
        } else if self.n > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (i, j, k) = (rng.gen_range(0..self.n), rng.gen_range(0..self.n), rng.gen_range(0..self.n));
                if bad(i, j, k) {
                    return fail(i, j, k);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.n == 0 {
            Err(Error::Input("empty metric space".into()))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric_and_negative() {
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![1.0]]).is_err());
    }

    #[test]
    fn csv_with_labels() {
        let s = FiniteMetricSpace::parse_csv(",a,b,c\na,0,1,2\nb,1,0,1\nc,2,1,0\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.distance(0, 2), 2.0);
        let bare = FiniteMetricSpace::parse_csv("0,3\n3,0\n").unwrap();
        assert_eq!(bare.diameter(), 3.0);
    }

    #[test]
    fn holder_transform_examples() {
        let s = FiniteMetricSpace::on_line(&[0.0, 4.0]).unwrap();
        assert_eq!(s.holder_transform(1.0).unwrap(), s);
        assert_eq!(s.holder_transform(0.5).unwrap().distance(0, 1), 2.0);
        assert!(s.holder_transform(0.0).is_err());
        assert!(s.holder_transform(1.5).is_err());
        let line = FiniteMetricSpace::on_line(&(0..30).map(|i| (i * i) as f64).collect::<Vec<_>>()).unwrap();
        line.holder_transform(0.3).unwrap().check_triangle(100, 0, 0).unwrap();
    }

    #[test]
    fn triangle_violation_detected() {
        let s = FiniteMetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(s.check_triangle(10, 0, 0).is_err());
        assert!(s.check_triangle(2, 1000, 7).is_err());
    }

    #[test]
    fn level_store_matches_dense() {
        let level = vec![0, 1, 2, 1, 0, 2, 2, 2, 0];
        let s = FiniteMetricSpace::from_levels(3, level, vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s.distance(0, 1), 0.5);
        assert_eq!(s.distance(2, 0), 1.0);
        assert_eq!(s.diameter(), 1.0);
        assert_eq!(s.holder_transform(0.5).unwrap().distance(0, 1), 0.5f64.sqrt());
    }
}
