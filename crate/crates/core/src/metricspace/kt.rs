//! Brute-force check of `𝒩_ε(𝒟^A_R(Y)) ≤ 𝒩_{ε/4}(Y)^{𝒩_{ε/(4R)}(A)}` on tiny spaces.
//!
//! `Y` is a grid of `g` equally spaced values in `[−1, 1]`, `A` a metric space
//! with at most three points, and `𝒟^A_R(Y)` every `R`-Lipschitz map `A → Y`.
//! All covers use open balls centred in the covered set, as in the covering
//! number's definition.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::cover::{ball_sets, min_set_cover, Ball};
use super::FiniteMetricSpace;
use crate::error::{input_err, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct KtCase {
    pub name: String,
    pub a: FiniteMetricSpace,
    pub y_grid: usize,
    pub r: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtOutcome {
    pub name: String,
    pub a_points: usize,
    pub y_grid: usize,
    pub r: f64,
    pub epsilon: f64,
    /// Number of `R`-Lipschitz maps on the grid.
    pub functions: usize,
    /// Size of the best cover found; an upper bound on `𝒩_ε(𝒟^A_R(Y))`.
    pub cover: usize,
    /// Whether `cover` was proved minimal.
    pub cover_exact: bool,
    pub n_y: usize,
    pub n_a: usize,
    #[serde(serialize_with = "ser_display")]
    pub bound: BigUint,
    pub ok: bool,
}

fn ser_display<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn grid(g: usize) -> Vec<f64> {
    if g == 1 {
        vec![0.0]
    } else {
        (0..g).map(|i| -1.0 + 2.0 * i as f64 / (g - 1) as f64).collect()
    }
}

fn open_cover(space: &FiniteMetricSpace, epsilon: f64, max_nodes: u64) -> Result<(usize, bool)> {
    let sets = ball_sets(space, epsilon / 2.0, Ball::Open);
    let c = min_set_cover(&sets, space.len(), max_nodes)?;
    Ok((c.count, c.exact))
}

/// Branch-and-bound node budget per case; beyond it the best cover found is
/// reported, which still bounds the covering number from above.
pub const DEFAULT_KT_NODES: u64 = 50_000;

/// Tolerance for `|f(a) − f(b)| ≤ R ρ(a, b)` on grid values.
const LIP_TOL: f64 = 1e-12;

impl KtCase {
    fn lipschitz_maps(&self, ys: &[f64]) -> Vec<Vec<usize>> {
        let n = self.a.len();
        let g = ys.len();
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let ok = (0..n).all(|i| {
                (0..i).all(|j| (ys[idx[i]] - ys[idx[j]]).abs() <= self.r * self.a.distance(i, j) + LIP_TOL)
            });
            if ok {
                out.push(idx.clone());
            }
            let mut p = 0;
            while p < n {
                idx[p] += 1;
                if idx[p] < g {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == n {
                return out;
            }
        }
    }

    pub fn run(&self, max_nodes: u64) -> Result<KtOutcome> {
        if self.a.is_empty() || self.a.len() > 3 || self.y_grid == 0 || self.y_grid > 9 {
            return Err(input_err!("KT oracle needs 1..=3 base points and 1..=9 grid values"));
        }
        if !(self.r > 0.0) || !(self.epsilon > 0.0) {
            return Err(input_err!("KT oracle needs R > 0 and ε > 0"));
        }
        let ys = grid(self.y_grid);
        let maps = self.lipschitz_maps(&ys);
        let fspace = FiniteMetricSpace::from_fn(maps.len(), |i, j| {
            maps[i].iter().zip(&maps[j]).map(|(&p, &q)| (ys[p] - ys[q]).abs()).fold(0.0, f64::max)
        })?;
        let (cover, cover_exact) = open_cover(&fspace, self.epsilon, max_nodes)?;
        let (n_y, ey) = open_cover(&FiniteMetricSpace::on_line(&ys)?, self.epsilon / 4.0, u64::MAX)?;
        let (n_a, ea) = open_cover(&self.a, self.epsilon / (4.0 * self.r), u64::MAX)?;
        debug_assert!(ey && ea);
        let bound = super::kt_bound(n_y as u64, n_a as u32)?;
        let ok = BigUint::from(cover) <= bound;
        Ok(KtOutcome {
            name: self.name.clone(),
            a_points: self.a.len(),
            y_grid: self.y_grid,
            r: self.r,
            epsilon: self.epsilon,
            functions: maps.len(),
            cover,
            cover_exact,
            n_y,
            n_a,
            bound,
            ok,
        })
    }

    /// Every combination of a fixed family of base spaces, grids of 1 to 9
    /// values, `R ∈ {1/2, 1, 2}` and `ε ∈ {1/2, 1}`.
    pub fn standard_family() -> Vec<KtCase> {
        let bases: Vec<(&str, FiniteMetricSpace)> = vec![
            ("point", FiniteMetricSpace::on_line(&[0.0]).expect("valid")),
            ("pair-1", FiniteMetricSpace::on_line(&[0.0, 1.0]).expect("valid")),
            ("pair-0.25", FiniteMetricSpace::on_line(&[0.0, 0.25]).expect("valid")),
            ("line-0-0.5-1", FiniteMetricSpace::on_line(&[0.0, 0.5, 1.0]).expect("valid")),
            ("line-0-1-3", FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0]).expect("valid")),
            ("triangle-1", FiniteMetricSpace::from_fn(3, |_, _| 1.0).expect("valid")),
        ];
        let mut out = Vec::new();
        for (name, a) in &bases {
            for g in 1..=9 {
                for r in [0.5, 1.0, 2.0] {
                    for epsilon in [0.5, 1.0] {
                        out.push(KtCase { name: name.to_string(), a: a.clone(), y_grid: g, r, epsilon });
                    }
                }
            }
        }
        out
    }
}

/// Runs every case in parallel; results keep the input order.
pub fn kt_oracle(cases: &[KtCase], max_nodes: u64) -> Result<Vec<KtOutcome>> {
    cases.par_iter().map(|c| c.run(max_nodes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_example() {
        let c = KtCase {
            name: "pair".into(),
            a: FiniteMetricSpace::on_line(&[0.0, 1.0]).unwrap(),
            y_grid: 5,
            r: 1.0,
            epsilon: 1.0,
        };
        let o = c.run(1_000_000).unwrap();
        // grid steps of 1/2, so the two values may differ by at most two steps
        assert_eq!(o.functions, 19);
        assert!(o.cover_exact);
        assert!(o.ok, "{o:?}");
        assert_eq!(o.n_y, 5);
        assert_eq!(o.n_a, 2);
    }

    #[test]
    fn single_grid_value() {
        let c = KtCase {
            name: "flat".into(),
            a: FiniteMetricSpace::on_line(&[0.0, 0.5, 1.0]).unwrap(),
            y_grid: 1,
            r: 2.0,
            epsilon: 0.5,
        };
        let o = c.run(1000).unwrap();
        assert_eq!((o.functions, o.cover), (1, 1));
        assert_eq!(o.bound, BigUint::from(1u8));
    }

    #[test]
    fn rejects_oversized_cases() {
        let c = KtCase {
            name: "big".into(),
            a: FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0, 3.0]).unwrap(),
            y_grid: 3,
            r: 1.0,
            epsilon: 1.0,
        };
        assert!(c.run(10).is_err());
    }
}
