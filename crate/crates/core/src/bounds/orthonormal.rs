//! Almost orthonormal systems: the quadratic-form inequality and the growth of
//! Lipschitz constants it forces.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adjoint::{AdjointSequence, RateProfile};
use super::theorems::thm_basis_bound;
use crate::error::{input_err, Result};
use crate::metricspace::FiniteMetricSpace;

/// Slack allowed in `cᵀGc ≥ ½‖c‖²` and in the hypothesis checks.
pub const FORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlmostOrthonormal {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `cᵀGc` against `½ Σ c_i²` for a unit-diagonal `G` with `|G_ij| ≤ a_{|i−j|}`.
pub fn almost_orthonormal_lower(gram: &DMatrix<f64>, c: &[f64], rate: &RateProfile) -> Result<AlmostOrthonormal> {
    let n = c.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(input_err!("Gram matrix is {}×{} for {n} coefficients", gram.nrows(), gram.ncols()));
    }
    let mut budget = 0.0;
    for p in 1..=n as u64 {
        budget += rate.eval(p).ok_or_else(|| input_err!("rate has no term {p}"))?;
    }
    if budget > 0.25 {
        return Err(input_err!("Σ_{{i≤{n}}} a_i = {budget} exceeds 1/4; the inequality does not apply"));
    }
    for i in 0..n {
        if (gram[(i, i)] - 1.0).abs() > FORM_TOL {
            return Err(input_err!("diagonal entry {i} is {}, not 1", gram[(i, i)]));
        }
        for j in 0..i {
            let a = rate.eval((i - j) as u64).expect("checked above");
            if gram[(i, j)].abs() > a + FORM_TOL || gram[(i, j)] != gram[(j, i)] {
                return Err(input_err!("entry ({i},{j}) = {} breaks |G_ij| ≤ a_{} = {a} or symmetry", gram[(i, j)], i - j));
            }
        }
    }
    let cv = nalgebra::DVector::from_column_slice(c);
    let lhs = cv.dot(&(gram * &cv));
    let rhs = 0.5 * cv.norm_squared();
    Ok(AlmostOrthonormal { lhs, rhs, ok: lhs >= rhs - FORM_TOL })
}

/// A random admissible instance: off-diagonal entries drawn from `[−a_{|i−j|}, a_{|i−j|}]`,
/// or pinned to `±a_{|i−j|}` when `extreme`, and coefficients from `[−1, 1]`.
pub fn random_instance(rng: &mut impl Rng, n: usize, rate: &RateProfile, extreme: bool) -> (DMatrix<f64>, Vec<f64>) {
    let mut g = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            let a = rate.eval((i - j) as u64).unwrap_or(0.0);
            let x = if extreme { if rng.gen::<bool>() { a } else { -a } } else { rng.gen_range(-a..=a) };
            g[(i, j)] = x;
            g[(j, i)] = x;
        }
    }
    let c = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    (g, c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub failures: usize,
    /// `min (lhs − rhs) / rhs` over all trials.
    pub min_relative_margin: f64,
}

/// `trials` random instances with sizes in `1..=max_n`; trial `t` uses its own
/// generator seeded from the `t`-th draw of the root generator.
pub fn almost_orthonormal_trials(root_seed: u64, trials: usize, max_n: usize, rate: &RateProfile) -> Result<TrialSummary> {
    if max_n == 0 {
        return Err(input_err!("max_n must be positive"));
    }
    let mut root = ChaCha8Rng::seed_from_u64(root_seed);
    let seeds: Vec<u64> = (0..trials).map(|_| root.gen()).collect();
    let results: Vec<AlmostOrthonormal> = seeds
        .par_iter()
        .enumerate()
        .map(|(t, &s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = rng.gen_range(1..=max_n);
            let (g, c) = random_instance(&mut rng, n, rate, t % 2 == 1);
            almost_orthonormal_lower(&g, &c, rate)
        })
        .collect::<Result<_>>()?;
    let failures = results.iter().filter(|r| !r.ok).count();
    let min_relative_margin = results
        .iter()
        .filter(|r| r.rhs > 0.0)
        .map(|r| (r.lhs - r.rhs) / r.rhs)
        .fold(f64::INFINITY, f64::min);
    Ok(TrialSummary { trials, failures, min_relative_margin })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemMember {
    /// Lipschitz constant, exact or a sampled lower estimate.
    pub lip: f64,
    pub sup: f64,
    pub l2: f64,
}

/// A sequence `f_1, f_2, …` summarised by per-member norms and, for each lag
/// `p ≥ 1`, `max_{i−j=p} |(f_i, f_j)|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionSystem {
    pub members: Vec<SystemMember>,
    /// `lag_max[p − 1]` for `p = 1..len`.
    pub lag_max: Vec<f64>,
}

impl FunctionSystem {
    pub fn from_parts(members: Vec<SystemMember>, lag_max: Vec<f64>) -> Result<Self> {
        if lag_max.len() + 1 < members.len() {
            return Err(input_err!("{} lags given for {} members", lag_max.len(), members.len()));
        }
        Ok(FunctionSystem { members, lag_max })
    }

    /// Functions sampled on the points of `space` with quadrature `weights`.
    /// Lipschitz constants are the largest difference quotients over sample
    /// pairs, so they never exceed the true constants.
    pub fn from_samples(space: &FiniteMetricSpace, weights: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        let m = space.len();
        if weights.len() != m || values.iter().any(|v| v.len() != m) {
            return Err(input_err!("every function needs one value per sample point"));
        }
        let inner = |f: &[f64], g: &[f64]| f.iter().zip(g).zip(weights).map(|((x, y), w)| x * y * w).sum::<f64>();
        let members = values
            .par_iter()
            .map(|f| {
                let mut lip = 0.0f64;
                for i in 0..m {
                    for j in 0..i {
                        let d = space.distance(i, j);
                        if d > 0.0 {
                            lip = lip.max((f[i] - f[j]).abs() / d);
                        }
                    }
                }
                let sup = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                SystemMember { lip, sup, l2: inner(f, f).sqrt() }
            })
            .collect();
        let n = values.len();
        let lag_max = (1..n.max(1))
            .map(|p| (p..n).map(|i| inner(&values[i], &values[i - p]).abs()).fold(0.0, f64::max))
            .collect();
        Ok(FunctionSystem { members, lag_max })
    }

    /// `√2 sin 2π(x, v)`, `√2 cos 2π(x, v)` on the flat torus `T^d`, one `v` per
    /// pair `±v`, ordered by `|v|`. The system is orthonormal and `Lip = 2π√2 |v|`.
    pub fn torus_fourier(d: usize, count: usize) -> Result<Self> {
        let vs = super::weyl::lattice_by_norm(d, count.div_ceil(2), true)?;
        let mut members = Vec::with_capacity(count);
        for v in vs {
            let lip = 2.0 * std::f64::consts::PI * std::f64::consts::SQRT_2 * (v as f64).sqrt();
            for _ in 0..2 {
                if members.len() < count {
                    members.push(SystemMember { lip, sup: std::f64::consts::SQRT_2, l2: 1.0 });
                }
            }
        }
        Ok(FunctionSystem { members, lag_max: vec![0.0; count.saturating_sub(1)] })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemCheckRow {
    pub n: u64,
    /// `Π_n = max_{i≤n} Lip f_i`.
    pub measured: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `Π_n` against `(2κ^{1/d})^{−1} ⌊n/(2v(n))⌋^{1/d}` for `n = 1..len`, after
/// checking unit norms and `|(f_i, f_j)| ≤ a_{i−j}` against the adjoint's rate.
pub fn system_growth_check(
    system: &FunctionSystem,
    adjoint: &AdjointSequence,
    kappa: f64,
    d: f64,
) -> Result<Vec<SystemCheckRow>> {
    let n = system.len() as u64;
    if n > adjoint.n_max() {
        return Err(input_err!("adjoint sequence covers n ≤ {}, system has {n} members", adjoint.n_max()));
    }
    let mut violations = Vec::new();
    for (i, m) in system.members.iter().enumerate() {
        if (m.l2 - 1.0).abs() > 1e-9 {
            violations.push(format!("‖f_{}‖ = {}", i + 1, m.l2));
        }
    }
    for (p, &c) in system.lag_max.iter().enumerate().take(system.len().saturating_sub(1)) {
        let a = adjoint.source().eval(p as u64 + 1).unwrap_or(0.0);
        if c > a + FORM_TOL {
            violations.push(format!("lag {}: |(f_i, f_j)| = {c} > a = {a}", p + 1));
        }
    }
    if !violations.is_empty() {
        violations.truncate(10);
        return Err(input_err!("system hypotheses fail: {}", violations.join("; ")));
    }
    let mut running = 0.0f64;
    let mut rows = Vec::with_capacity(n as usize);
    for (i, m) in system.members.iter().enumerate() {
        running = running.max(m.lip);
        let k = i as u64 + 1;
        let bound = thm_basis_bound(k, adjoint.v(k), kappa, d)?;
        rows.push(SystemCheckRow { n: k, measured: running, bound, ok: running >= bound - FORM_TOL });
    }
    Ok(rows)
}

/// Symmetric Toeplitz matrix `G_ij = c_{|i−j|}`.
pub fn toeplitz(c: &[f64]) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)])
}

pub fn min_eigenvalue(gram: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(gram.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::adjoint::build_adjoint;

    /// `a_i = 4^{-i}/2`.
    fn halved(n: usize) -> RateProfile {
        RateProfile::Table { values: (1..=n).map(|i| 0.5 * 0.25f64.powi(i as i32)).collect() }
    }

    #[test]
    fn identity_and_single() {
        let r = halved(3);
        let res = almost_orthonormal_lower(&DMatrix::identity(3, 3), &[1.0, -2.0, 0.5], &r).unwrap();
        assert_eq!((res.lhs, res.rhs), (5.25, 2.625));
        assert!(res.ok);
        let one = almost_orthonormal_lower(&DMatrix::identity(1, 1), &[3.0], &r).unwrap();
        assert_eq!((one.lhs, one.rhs), (9.0, 4.5));
    }

    #[test]
    fn hypotheses_enforced() {
        let big = RateProfile::Geometric { r: 0.5 };
        assert!(almost_orthonormal_lower(&DMatrix::identity(4, 4), &[1.0; 4], &big).is_err());
        let mut g = DMatrix::identity(2, 2);
        g[(0, 1)] = 0.3;
        g[(1, 0)] = 0.3;
        assert!(almost_orthonormal_lower(&g, &[1.0, 1.0], &halved(2)).is_err());
    }

    #[test]
    fn random_trials_never_fail() {
        let s = almost_orthonormal_trials(7, 1000, 64, &halved(64)).unwrap();
        assert_eq!(s.failures, 0);
        assert!(s.min_relative_margin > -1e-9);
    }

    #[test]
    fn trials_are_reproducible() {
        let a = almost_orthonormal_trials(11, 50, 16, &halved(16)).unwrap();
        let b = almost_orthonormal_trials(11, 50, 16, &halved(16)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn circle_fourier_system_from_samples() {
        let m = 64;
        let xs: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
        let circle = FiniteMetricSpace::from_fn(m, |i, j| {
            let t = (xs[i] - xs[j]).abs();
            t.min(1.0 - t)
        })
        .unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let mut values = Vec::new();
        for k in 1..=6 {
            values.push(xs.iter().map(|x| 2f64.sqrt() * (tau * k as f64 * x).sin()).collect());
            values.push(xs.iter().map(|x| 2f64.sqrt() * (tau * k as f64 * x).cos()).collect());
        }
        let sys = FunctionSystem::from_samples(&circle, &vec![1.0 / m as f64; m], &values).unwrap();
        for (i, mem) in sys.members.iter().enumerate() {
            let exact = tau * 2f64.sqrt() * (i / 2 + 1) as f64;
            assert!(mem.lip <= exact * (1.0 + 1e-12) && mem.lip > 0.95 * exact);
        }
        let adj = build_adjoint(&RateProfile::Geometric { r: 0.5 }, 12).unwrap();
        let rows = system_growth_check(&sys, &adj, 1.0, 1.0).unwrap();
        assert!(rows.iter().all(|r| r.ok));
        assert_eq!(rows[0].bound, 0.0);
    }

    #[test]
    fn torus_system_check() {
        let adj = build_adjoint(&RateProfile::Geometric { r: 0.5 }, 2000).unwrap();
        for d in [2usize, 3] {
            let sys = FunctionSystem::torus_fourier(d, 2000).unwrap();
            let rows = system_growth_check(&sys, &adj, (d as f64).powf(d as f64 / 2.0), d as f64).unwrap();
            assert!(rows.iter().all(|r| r.ok));
        }
    }

    #[test]
    fn system_hypotheses_reported() {
        let members = vec![SystemMember { lip: 1.0, sup: 1.0, l2: 1.0 }; 3];
        let sys = FunctionSystem::from_parts(members, vec![0.9, 0.0]).unwrap();
        let adj = build_adjoint(&RateProfile::Geometric { r: 0.5 }, 3).unwrap();
        let e = system_growth_check(&sys, &adj, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("lag 1"));
    }

    #[test]
    fn toeplitz_eigenvalues() {
        let g = toeplitz(&[1.0, 0.5]);
        assert!((min_eigenvalue(&g) - 0.5).abs() < 1e-12);
        assert!(min_eigenvalue(&toeplitz(&[1.0, 1.0, 1.0])).abs() < 1e-12);
    }
}
