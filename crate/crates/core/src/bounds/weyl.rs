//! Lipschitz constants of torus eigenfunctions ordered by eigenvalue.

use serde::Serialize;

use crate::csv::{num, CsvTable};
use crate::error::{input_err, Result};

/// The first `count` vectors of `ℤ^d ∖ {0}` by `|v|²`, then lexicographically,
/// returned as their squared norms. With `half`, only one of each pair `±v` is kept.
pub(crate) fn lattice_by_norm(d: usize, count: usize, half: bool) -> Result<Vec<u64>> {
    if !(1..=4).contains(&d) {
        return Err(input_err!("lattice dimension {d} outside 1..=4"));
    }
    let mut r: i64 = 1;
    loop {
        let mut vs: Vec<(u64, Vec<i64>)> = Vec::new();
        let side = 2 * r + 1;
        let total = side.pow(d as u32);
        for idx in 0..total {
            let mut v = Vec::with_capacity(d);
            let mut t = idx;
            for _ in 0..d {
                v.push(t % side - r);
                t /= side;
            }
            let n2: i64 = v.iter().map(|x| x * x).sum();
            if n2 == 0 || n2 > r * r {
                continue;
            }
            if half && v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                continue;
            }
            vs.push((n2 as u64, v));
        }
        // every vector with |v| ≤ r lies in the box, so the ball is complete
        if vs.len() >= count {
            vs.sort();
            return Ok(vs.into_iter().take(count).map(|(n2, _)| n2).collect());
        }
        r *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub n: u64,
    /// `Π_n`, the largest Lipschitz constant among the first `n` eigenfunctions.
    pub pi_n: f64,
    /// `Π_n / n^{1/d}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylTable {
    pub d: usize,
    pub rows: Vec<WeylRow>,
}

pub const MAX_WEYL_N: u64 = 1_000_000;

/// Two eigenfunctions `√2 sin 2π(x, v)`, `√2 cos 2π(x, v)` for every `v ∈ ℤ^d ∖ {0}`
/// in order of `|v|`, each with `Lip = 2π√2 |v|`.
pub fn weyl_check(d: usize, n_max: u64) -> Result<WeylTable> {
    if !(d == 2 || d == 3) {
        return Err(input_err!("Weyl check is defined for d = 2 or 3, got {d}"));
    }
    if n_max == 0 || n_max > MAX_WEYL_N {
        return Err(input_err!("n_max = {n_max} outside 1..={MAX_WEYL_N}"));
    }
    let vs = lattice_by_norm(d, n_max.div_ceil(2) as usize, false)?;
    let c = 2.0 * std::f64::consts::PI * std::f64::consts::SQRT_2;
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut pi_n = 0.0f64;
    for n in 1..=n_max {
        let v2 = vs[((n - 1) / 2) as usize];
        pi_n = pi_n.max(c * (v2 as f64).sqrt());
        rows.push(WeylRow { n, pi_n, ratio: pi_n / (n as f64).powf(1.0 / d as f64) });
    }
    Ok(WeylTable { d, rows })
}

impl WeylTable {
    /// Extreme ratios over `n ≥ from`.
    pub fn ratio_range(&self, from: u64) -> (f64, f64) {
        self.rows
            .iter()
            .filter(|r| r.n >= from)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)))
    }

    /// Rows at `n = 1` and then every `stride`-th `n`, plus the last.
    pub fn to_csv(&self, stride: u64) -> CsvTable {
        let mut t = CsvTable::new(["d", "n", "pi_n", "ratio"]);
        let last = self.rows.len() as u64;
        for r in &self.rows {
            if r.n == 1 || r.n % stride.max(1) == 0 || r.n == last {
                t.push(vec![self.d.to_string(), r.n.to_string(), num(r.pi_n), num(r.ratio)]);
            }
        }
        t
    }
}
