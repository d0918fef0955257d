//! The ten experiments behind the command line.

use num_bigint::{BigInt, BigUint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CatalogEntry, Check, ExperimentId, Outcome, ParamDoc};
use crate::bounds::{
    almost_orthonormal_trials, build_adjoint, constant_adjoint, min_eigenvalue, system_check_csv,
    system_growth_check, thm_main_bound, toeplitz, weyl_check, FunctionSystem, RateProfile, MAX_WEYL_N,
};
use crate::cfrac::{construct_liouville_pair, GaugeFunction, GaugeKind, LiouvilleConfig, Which};
use crate::csv::{num, CsvTable};
use crate::error::{Error, Result};
use crate::logmag::LogMag;
use crate::metricspace::{box_dimension, kt_oracle, KtCase};
use crate::subshift::{correlations, language, rudin_shapiro_prefix, ShiftSpace, SymbolSequence};
use crate::toruslab::{
    certified_supnorm, gamma_of_iterate, growth_at, growth_curve, level_bound, mixing_integral, points_for_radius,
    BirkhoffSum, CocycleSeries, SupNormOptions, MAX_DENSE_GROWTH,
};

trait Experiment {
    type Params: Serialize + DeserializeOwned + Default;
    const DESCRIPTION: &'static str;
    /// One entry per parameter, in catalog order.
    const DOCS: &'static [(&'static str, &'static str)];
    fn validate(p: &Self::Params) -> Result<()>;
    fn run(p: &Self::Params, seed: u64) -> Result<Outcome>;
}

macro_rules! with_experiment {
    ($id:expr, $e:ident => $body:expr) => {
        match $id {
            ExperimentId::RsGrowth => {
                type $e = RsGrowth;
                $body
            }
            ExperimentId::RsCorrelation => {
                type $e = RsCorrelation;
                $body
            }
            ExperimentId::RsComplexity => {
                type $e = RsComplexity;
                $body
            }
            ExperimentId::TorusSlow => {
                type $e = TorusSlow;
                $body
            }
            ExperimentId::TorusMixing => {
                type $e = TorusMixing;
                $body
            }
            ExperimentId::Adjoint => {
                type $e = Adjoint;
                $body
            }
            ExperimentId::BoundsCompare => {
                type $e = BoundsCompare;
                $body
            }
            ExperimentId::KtOracle => {
                type $e = KtOracle;
                $body
            }
            ExperimentId::Weyl => {
                type $e = Weyl;
                $body
            }
            ExperimentId::Dimension => {
                type $e = Dimension;
                $body
            }
        }
    };
}

fn parse<E: Experiment>(params: &Value) -> Result<E::Params> {
    let p: E::Params = serde_json::from_value(params.clone()).map_err(|e| Error::Config(e.to_string()))?;
    E::validate(&p)?;
    Ok(p)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

pub(super) fn resolve(id: ExperimentId, params: &Value) -> Result<Value> {
    with_experiment!(id, E => parse::<E>(params).map(|p| to_value(&p)))
}

pub(super) fn dispatch(id: ExperimentId, params: &Value, seed: u64) -> Result<(Value, Outcome)> {
    with_experiment!(id, E => {
        let p = parse::<E>(params)?;
        let out = E::run(&p, seed)?;
        Ok((to_value(&p), out))
    })
}

pub(super) fn catalog_entry(id: ExperimentId) -> CatalogEntry {
    with_experiment!(id, E => {
        let defaults = to_value(&<E as Experiment>::Params::default());
        let parameters = E::DOCS
            .iter()
            .map(|(name, description)| ParamDoc {
                name: name.to_string(),
                default: defaults.get(*name).cloned().unwrap_or(Value::Null),
                description: description.to_string(),
            })
            .collect();
        CatalogEntry { id, description: E::DESCRIPTION.to_string(), parameters }
    })
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Input(msg()))
    }
}

fn budget(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Resource(msg()))
    }
}

fn count_check(name: &str, failures: usize, total: usize, what: &str) -> Check {
    Check::new(name, failures == 0, format!("{failures} of {total} {what} violate the bound"))
}

/// Integers with at most 18 digits exactly, larger ones by magnitude.
fn fmt_int(n: &BigUint) -> String {
    if n.bits() <= 60 {
        n.to_string()
    } else {
        LogMag::from_biguint(n).to_sci()
    }
}

// ---------------------------------------------------------------- shift growth

struct RsGrowth;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RsGrowthParams {
    pub d: f64,
    pub k: usize,
    pub n_max: usize,
}

impl Default for RsGrowthParams {
    fn default() -> Self {
        RsGrowthParams { d: 1.0, k: 256, n_max: 128 }
    }
}

const MAX_RADIUS: usize = 1024;

/// Relative tolerance for comparing `e^{u(n)}` with `n^{1/d}`.
const POWER_LAW_TOL: f64 = 1e-9;

impl Experiment for RsGrowth {
    type Params = RsGrowthParams;
    const DESCRIPTION: &'static str = "Lipschitz growth of the shift on Rudin-Shapiro windows under u(t) = ln(t)/d, \
         measured lower estimate against e^{u(n)} and the theorem bound with measured net constant";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("d", "dimension parameter of the gauge u(t) = ln(t)/d"),
        ("k", "window radius; windows have length 2k - 1"),
        ("n_max", "largest shift power, below k"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(p.d.is_finite() && p.d > 0.0 && p.d <= 16.0, || format!("d = {} outside (0, 16]", p.d))?;
        require(p.k >= 2, || format!("k = {} must be at least 2", p.k))?;
        budget(p.k <= MAX_RADIUS, || format!("k = {} exceeds the window budget {MAX_RADIUS}", p.k))?;
        require(p.n_max >= 1 && p.n_max < p.k, || format!("n_max = {} must lie in 1..k", p.n_max))
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let gauge = GaugeFunction::log_scaled(p.d)?;
        let mut seq = SymbolSequence::rudin_shapiro_letters();
        let space = ShiftSpace::new(&mut seq, gauge.clone(), p.k)?;
        let growth = space.transitions(p.n_max)?.evaluate(&gauge);
        let kappa = space.measured_net_constant(p.d)?;
        let lip = space.spin_lipschitz();

        let mut table =
            CsvTable::new(["n", "lower", "lower_running", "upper", "power_law", "theorem_bound"]);
        let (mut above, mut below, mut off_law, mut tight) = (0, 0, 0, 0);
        let mut power_law_from = 1;
        let measured: Vec<_> = growth.rows.iter().filter(|r| r.n >= 1).collect();
        for r in &measured {
            let n = r.n as u64;
            let pl = (n as f64).powf(1.0 / p.d);
            let tb = thm_main_bound(n, 1, kappa, p.d, lip)?;
            if r.lower > r.upper * (1.0 + 1e-12) {
                above += 1;
            }
            if r.lower < tb - 1e-9 {
                below += 1;
            }
            if (r.upper - pl).abs() > POWER_LAW_TOL * pl {
                power_law_from = r.n + 1;
                if r.n >= 3 {
                    off_law += 1;
                }
            }
            if r.lower == r.upper {
                tight += 1;
            }
            table.push(vec![
                r.n.to_string(),
                num(r.lower),
                num(r.lower_running),
                num(r.upper),
                num(pl),
                num(tb),
            ]);
        }
        let rows = measured.len();
        let checks = vec![
            count_check("lower_le_upper", above, rows, "rows"),
            count_check("lower_ge_theorem_bound", below, rows, "rows"),
            Check::new(
                "upper_is_power_law_from_3",
                off_law == 0,
                format!("e^(u(n)) = n^(1/d) holds from n = {power_law_from}; {off_law} rows with n >= 3 differ"),
            ),
        ];
        let summary = json!({
            "windows": space.len(),
            "kappa": kappa,
            "lip_f": lip,
            "tight_rows": tight,
            "power_law_from": power_law_from,
        });
        Ok(Outcome { table, checks, summary })
    }
}

// ---------------------------------------------------------------- correlations

struct RsCorrelation;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RsCorrelationParams {
    pub max_lag: usize,
    pub scan_log2: u32,
    pub tolerance: f64,
    pub cross_check_log2: u32,
}

impl Default for RsCorrelationParams {
    fn default() -> Self {
        RsCorrelationParams { max_lag: 64, scan_log2: 22, tolerance: 0.01, cross_check_log2: 20 }
    }
}

const MAX_SCAN_LOG2: u32 = 30;

impl Experiment for RsCorrelation {
    type Params = RsCorrelationParams;
    const DESCRIPTION: &'static str = "Shifted correlations (1/N) sum v_n v_(n+k) of the Rudin-Shapiro sequence, \
         positivity of their Toeplitz Gram matrix and agreement of the two generators";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("max_lag", "largest lag k"),
        ("scan_log2", "N = 2^scan_log2 terms are averaged"),
        ("tolerance", "bound on |correlation| for lags k >= 1"),
        ("cross_check_log2", "length 2^cross_check_log2 of the recurrence/substitution comparison"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(p.max_lag >= 1, || "max_lag must be at least 1".into())?;
        require(p.tolerance > 0.0, || format!("tolerance {} must be positive", p.tolerance))?;
        budget(p.scan_log2 <= MAX_SCAN_LOG2 && p.cross_check_log2 <= MAX_SCAN_LOG2, || {
            format!("scan lengths are limited to 2^{MAX_SCAN_LOG2}")
        })?;
        budget(p.max_lag <= 4096, || format!("max_lag {} exceeds 4096", p.max_lag))?;
        require(p.max_lag < 1usize << p.scan_log2, || "max_lag must be below the scan length".into())
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let n = 1usize << p.scan_log2;
        let mut seq = SymbolSequence::rudin_shapiro();
        let lags: Vec<usize> = (0..=p.max_lag).collect();
        let c = correlations(&mut seq, &lags, n)?;
        let mut table = CsvTable::new(["k", "n", "value"]);
        for (k, v) in lags.iter().zip(&c) {
            table.push(vec![k.to_string(), n.to_string(), num(*v)]);
        }
        let (arg, max_abs) =
            c.iter().enumerate().skip(1).fold((1, 0.0f64), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
        let lambda = min_eigenvalue(&toeplitz(&c));

        let m = 1usize << p.cross_check_log2;
        let recurrence = rudin_shapiro_prefix(m);
        let projected = SymbolSequence::rudin_shapiro_projected().spins(m);
        let mismatch = recurrence.iter().zip(&projected).position(|(a, b)| a != b);

        let checks = vec![
            Check::new("zero_lag_is_one", c[0] == 1.0, format!("c_0 = {}", c[0])),
            Check::new(
                "correlations_small",
                max_abs <= p.tolerance,
                format!("max |c_k| = {max_abs} at k = {arg}, tolerance {}", p.tolerance),
            ),
            Check::new(
                "gram_positive_definite",
                lambda > 0.0,
                format!("smallest eigenvalue of the {}x{} Toeplitz matrix is {lambda}", c.len(), c.len()),
            ),
            Check::new(
                "generators_agree",
                mismatch.is_none() && recurrence.len() == m && projected.len() == m,
                match mismatch {
                    None => format!("recurrence and projected fixed point agree on {m} terms"),
                    Some(i) => format!("first difference at index {i}"),
                },
            ),
        ];
        let summary = json!({ "n": n, "max_abs": max_abs, "argmax": arg, "min_eigenvalue": lambda });
        Ok(Outcome { table, checks, summary })
    }
}

// ---------------------------------------------------------------- complexity

struct RsComplexity;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RsComplexityParams {
    pub l_max: usize,
    pub scan_factor: usize,
}

impl Default for RsComplexityParams {
    fn default() -> Self {
        RsComplexityParams { l_max: 64, scan_factor: 64 }
    }
}

impl Experiment for RsComplexity {
    type Params = RsComplexityParams;
    const DESCRIPTION: &'static str =
        "Factor complexity of the four-letter Rudin-Shapiro fixed point against 8(L - 1)";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("l_max", "largest word length L"),
        ("scan_factor", "factors of length L are read from a prefix of length scan_factor * L"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(p.l_max >= 1, || "l_max must be at least 1".into())?;
        require(p.scan_factor >= 2, || "scan_factor must be at least 2".into())?;
        budget(p.l_max.saturating_mul(p.scan_factor) <= 1 << 26, || "scan length exceeds 2^26".into())
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let mut seq = SymbolSequence::rudin_shapiro_letters();
        let mut table = CsvTable::new(["length", "count", "expected"]);
        let mut bad = Vec::new();
        for l in 1..=p.l_max {
            let count = language(&mut seq, l, p.scan_factor * l)?.count();
            let expected = if l == 1 { 4 } else { 8 * (l - 1) };
            if count != expected {
                bad.push(l);
            }
            table.push(vec![l.to_string(), count.to_string(), expected.to_string()]);
        }
        let checks = vec![Check::new(
            "complexity_formula",
            bad.is_empty(),
            if bad.is_empty() {
                format!("p_L = 8(L - 1) for 2 <= L <= {}", p.l_max)
            } else {
                format!("mismatch at L = {bad:?}")
            },
        )];
        Ok(Outcome { table, checks, summary: json!({ "lengths": p.l_max }) })
    }
}

// ---------------------------------------------------------------- torus

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusModel {
    pub gauge: GaugeKind,
    pub liouville: LiouvilleConfig,
    /// Sup-norm radius relative to the active amplitudes.
    pub sup_rel_radius: f64,
    pub sup_max_grid: usize,
}

impl Default for TorusModel {
    fn default() -> Self {
        TorusModel {
            gauge: GaugeKind::Power { exponent: 0.4, coefficient: 6.0 },
            liouville: LiouvilleConfig { levels: 3, require_admissible: false, ..Default::default() },
            sup_rel_radius: 1e-4,
            sup_max_grid: 1 << 22,
        }
    }
}

struct Torus {
    gauge: GaugeFunction,
    n0: usize,
    phi: CocycleSeries,
    psi: CocycleSeries,
    opts: SupNormOptions,
}

impl TorusModel {
    fn validate(&self) -> Result<()> {
        GaugeFunction::new(self.gauge.clone())?;
        require(self.sup_rel_radius > 0.0 && self.sup_rel_radius < 1.0, || "sup_rel_radius must lie in (0, 1)".into())?;
        require(self.sup_max_grid >= 16, || "sup_max_grid must be at least 16".into())?;
        budget(self.sup_max_grid <= 1 << 26, || "sup_max_grid exceeds 2^26".into())
    }

    fn build(&self) -> Result<Torus> {
        let gauge = GaugeFunction::new(self.gauge.clone())?;
        let pair = construct_liouville_pair(&gauge, &self.liouville)?;
        Ok(Torus {
            gauge,
            n0: self.liouville.n0,
            phi: CocycleSeries::from_pair(&pair, Which::Alpha)?,
            psi: CocycleSeries::from_pair(&pair, Which::AlphaPrime)?,
            opts: SupNormOptions { rel_radius: self.sup_rel_radius, max_grid: self.sup_max_grid },
        })
    }
}


struct TorusSlow;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusSlowParams {
    pub model: TorusModel,
    pub n_max: u64,
}

impl Default for TorusSlowParams {
    fn default() -> Self {
        TorusSlowParams { model: TorusModel::default(), n_max: 256 }
    }
}

impl Experiment for TorusSlow {
    type Params = TorusSlowParams;
    const DESCRIPTION: &'static str = "Skew product over the constructed rotation pair: derivative bounds of the \
         Birkhoff sums at the denominators, Lipschitz growth along q_k and at (q'_k)^2, and the dense growth curve";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("model", "torus model: gauge {kind, ...}, liouville {n0, levels, seed_alpha, seed_alpha_prime, budget_bytes, require_admissible}, sup_rel_radius, sup_max_grid"),
        ("n_max", "length of the dense growth curve"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        p.model.validate()?;
        require(p.n_max >= 1, || "n_max must be at least 1".into())?;
        budget(p.n_max <= MAX_DENSE_GROWTH, || format!("n_max exceeds {MAX_DENSE_GROWTH}"))
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let t = p.model.build()?;
        let mut table = CsvTable::new(["quantity", "which", "k", "n", "lower", "upper", "bound", "ok"]);
        let which_name = |w: Which| if w == Which::Alpha { "alpha" } else { "alpha_prime" };

        // derivative sup-norms at m = q_k against c q_k^j / u⁻¹(e^{q_k})
        let mut deriv_bad = 0;
        let mut deriv_rows = 0;
        let mut phi_second_ratio = 0.0f64;
        for (which, series, c) in [(Which::Alpha, &t.phi, 6.0), (Which::AlphaPrime, &t.psi, 48.0)] {
            for (idx, term) in series.terms().iter().enumerate() {
                let m = BigInt::from(term.q.clone());
                let bs = BirkhoffSum::new(series, &m);
                for order in 1..=2u32 {
                    let sn = certified_supnorm(&bs, order, &t.opts)?;
                    let bound = level_bound(series, idx, order, c);
                    let ok = sn.value <= bound + sn.radius;
                    deriv_rows += 1;
                    if !ok {
                        deriv_bad += 1;
                    }
                    if which == Which::Alpha && order == 2 && !bound.is_zero() {
                        phi_second_ratio = phi_second_ratio.max((sn.value / level_bound(series, idx, 2, 1.0)).to_f64());
                    }
                    table.push(vec![
                        format!("d{order}_at_q"),
                        which_name(which).into(),
                        term.n.to_string(),
                        fmt_int(&term.q),
                        sn.value.to_sci(),
                        sn.upper().to_sci(),
                        bound.to_sci(),
                        ok.to_string(),
                    ]);
                }
            }
        }

        // Γ(φ^{q_k}) ≤ 20 u(q_k) + 1 for k ≥ n0
        let mut slow_bad = 0;
        let mut slow_rows = 0;
        for term in t.phi.terms().iter().filter(|s| s.n >= t.n0) {
            let g = gamma_of_iterate(&t.phi, &t.psi, &BigInt::from(term.q.clone()), &t.opts)?;
            let bound = LogMag::from_ln(20f64.ln() + t.gauge.ln_u_of_ln(term.ln_q)) + LogMag::ONE;
            let ok = g.gamma_upper <= bound;
            slow_rows += 1;
            if !ok {
                slow_bad += 1;
            }
            table.push(vec![
                "gamma_at_q".into(),
                "alpha".into(),
                term.n.to_string(),
                fmt_int(&term.q),
                g.gamma_lower.to_sci(),
                g.gamma_upper.to_sci(),
                bound.to_sci(),
                ok.to_string(),
            ]);
        }

        // ĝ_n ≤ 20 u(√n) √n at n = (q'_k)²
        let mut sq_bad = 0;
        let mut sq_rows = 0;
        for term in t.psi.terms().iter().filter(|s| s.n >= t.n0) {
            let n: BigUint = &term.q * &term.q;
            let (lo, up) = growth_at(&t.phi, &t.psi, &BigInt::from(n.clone()), &t.opts)?;
            let bound = LogMag::from_ln(20f64.ln() + t.gauge.ln_u_of_ln(term.ln_q) + term.ln_q);
            let ok = up <= bound;
            sq_rows += 1;
            if !ok {
                sq_bad += 1;
            }
            table.push(vec![
                "growth_at_q_prime_squared".into(),
                "alpha_prime".into(),
                term.n.to_string(),
                fmt_int(&n),
                lo.to_sci(),
                up.to_sci(),
                bound.to_sci(),
                ok.to_string(),
            ]);
        }

        let curve = growth_curve(&t.phi, &t.psi, p.n_max, &t.opts)?;
        let monotone = curve.windows(2).all(|w| w[1].lower >= w[0].lower && w[1].upper >= w[0].upper)
            && curve.iter().all(|r| r.lower <= r.upper);
        for r in &curve {
            table.push(vec![
                "growth".into(),
                String::new(),
                String::new(),
                r.n.to_string(),
                r.lower.to_sci(),
                r.upper.to_sci(),
                String::new(),
                String::new(),
            ]);
        }
        let last = curve.last().expect("n_max >= 1");

        let checks = vec![
            count_check("derivative_bounds_at_denominators", deriv_bad, deriv_rows, "sup-norms"),
            count_check("slow_subsequence", slow_bad, slow_rows, "levels"),
            count_check("growth_at_q_prime_squared", sq_bad, sq_rows, "levels"),
            Check::new("growth_curve_monotone", monotone, format!("{} rows", curve.len())),
        ];
        let summary = json!({
            "phi_levels": t.phi.terms().len(),
            "psi_levels": t.psi.terms().len(),
            "phi_second_derivative_constant": phi_second_ratio,
            "growth_at_n_max": { "n": last.n, "lower": last.lower, "upper": last.upper },
        });
        Ok(Outcome { table, checks, summary })
    }
}

struct TorusMixing;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TorusMixingParams {
    pub model: TorusModel,
    pub m_min: u64,
    pub m_max: u64,
    pub samples: usize,
    pub quadrature_radius: f64,
}

impl Default for TorusMixingParams {
    fn default() -> Self {
        TorusMixingParams { model: TorusModel::default(), m_min: 4096, m_max: 16384, samples: 61, quadrature_radius: 1e-3 }
    }
}

/// Geometrically spaced integers in `[lo, hi]`, without repeats.
fn geometric_integers(lo: u64, hi: u64, samples: usize) -> Vec<u64> {
    if samples <= 1 || lo == hi {
        return vec![lo];
    }
    let ratio = hi as f64 / lo as f64;
    let mut out: Vec<u64> = (0..samples)
        .map(|i| ((lo as f64) * ratio.powf(i as f64 / (samples - 1) as f64)).round() as u64)
        .map(|m| m.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

impl Experiment for TorusMixing {
    type Params = TorusMixingParams;
    const DESCRIPTION: &'static str = "Oscillatory integrals I_m of the skew product against 202 ln u(m) / u(m)^(1/3), \
         and the correlation of sin(2 pi z)";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("model", "torus model: gauge {kind, ...}, liouville {n0, levels, seed_alpha, seed_alpha_prime, budget_bytes, require_admissible}, sup_rel_radius, sup_max_grid"),
        ("m_min", "smallest iterate"),
        ("m_max", "largest iterate"),
        ("samples", "number of geometrically spaced iterates"),
        ("quadrature_radius", "target error radius of each circle integral"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        p.model.validate()?;
        require(p.m_min >= 1 && p.m_max >= p.m_min, || format!("need 1 <= m_min <= m_max, got {}..{}", p.m_min, p.m_max))?;
        require(p.samples >= 1, || "samples must be at least 1".into())?;
        require(p.quadrature_radius > 0.0, || "quadrature_radius must be positive".into())?;
        budget(p.m_max <= 1 << 30 && p.samples <= 10_000, || "m_max is limited to 2^30 and samples to 10000".into())
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let t = p.model.build()?;
        let ms = geometric_integers(p.m_min, p.m_max, p.samples);
        let mut table =
            CsvTable::new(["m", "case", "points", "value", "radius", "bound_rhs", "correlation", "ok"]);
        let (mut bad, mut corr_bad) = (0, 0);
        let mut cases = std::collections::BTreeMap::<String, usize>::new();
        let mut worst = 0.0f64;
        for &m in &ms {
            let mb = BigInt::from(m);
            let points = points_for_radius(&BirkhoffSum::new(&t.phi, &mb), p.quadrature_radius, &t.opts)?
                .max(points_for_radius(&BirkhoffSum::new(&t.psi, &mb), p.quadrature_radius, &t.opts)?);
            let r = mixing_integral(&t.phi, &t.psi, &mb, points, &t.opts)?;
            if !r.ok {
                bad += 1;
            }
            if r.correlation.abs() > r.value / 2.0 + r.radius {
                corr_bad += 1;
            }
            worst = worst.max(r.value / r.bound_rhs);
            let case = serde_json::to_value(r.case).expect("serializes");
            let case = match (case["case"].as_str(), case.get("k")) {
                (Some(c), Some(k)) => format!("{c}:{k}"),
                (Some(c), None) => c.to_string(),
                _ => String::new(),
            };
            *cases.entry(case.clone()).or_default() += 1;
            table.push(vec![
                m.to_string(),
                case,
                points.to_string(),
                num(r.value),
                num(r.radius),
                num(r.bound_rhs),
                num(r.correlation),
                r.ok.to_string(),
            ]);
        }
        let checks = vec![
            count_check("mixing_bound", bad, ms.len(), "iterates"),
            count_check("correlation_bound", corr_bad, ms.len(), "iterates"),
        ];
        let summary = json!({
            "iterates": ms.len(),
            "octaves": (p.m_max as f64 / p.m_min as f64).log2(),
            "cases": cases,
            "max_value_over_bound": worst,
        });
        Ok(Outcome { table, checks, summary })
    }
}

// ---------------------------------------------------------------- adjoint

struct Adjoint;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjointParams {
    pub rates: Vec<RateProfile>,
    pub n_max: u64,
}

impl Default for AdjointParams {
    fn default() -> Self {
        AdjointParams {
            rates: vec![
                RateProfile::Geometric { r: 0.5 },
                RateProfile::Power { c: 1.0, nu: 0.5 },
                RateProfile::InverseLog { c: 1.0 },
            ],
            n_max: 1_000_000,
        }
    }
}

fn rate_label(r: &RateProfile) -> String {
    match r {
        RateProfile::Table { values } => format!("table[{}]", values.len()),
        RateProfile::Power { c, nu } => format!("power(c={c},nu={nu})"),
        RateProfile::Geometric { r } => format!("geometric(r={r})"),
        RateProfile::InverseLog { c } => format!("inverse-log(c={c})"),
    }
}

impl Experiment for Adjoint {
    type Params = AdjointParams;
    const DESCRIPTION: &'static str = "Adjoint spacing v(n) of mixing rates: lagged partial sums at most 1/4 and \
         growth of n/v(n) along powers of two";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("rates", "rate profiles: {kind = \"geometric\", r}, {kind = \"power\", c, nu}, {kind = \"inverse-log\", c}, {kind = \"table\", values}"),
        ("n_max", "range 1..=n_max on which v(n) is built and checked"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(!p.rates.is_empty(), || "rates must not be empty".into())?;
        for r in &p.rates {
            r.validate()?;
        }
        require(p.n_max >= 1, || "n_max must be at least 1".into())?;
        budget(p.n_max <= 1 << 25, || "n_max is limited to 2^25".into())
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let mut table = CsvTable::new(["profile", "n", "v", "n_over_v"]);
        let (mut sums, mut major, mut dyadic) = (Vec::new(), Vec::new(), Vec::new());
        let mut reports = Vec::new();
        for rate in &p.rates {
            let label = rate_label(rate);
            let adj = build_adjoint(rate, p.n_max)?;
            let rep = adj.report();
            for &(n, ratio) in &rep.dyadic {
                table.push(vec![label.clone(), n.to_string(), adj.v(n).to_string(), num(ratio)]);
            }
            if !rep.partial_sums_ok {
                sums.push(format!("{label}: {} at n = {}", rep.max_partial_sum, rep.worst_n));
            }
            if rep.majorant_ok == Some(false) {
                major.push(label.clone());
            }
            if rep.dyadic_threshold.is_none() {
                dyadic.push(label.clone());
            }
            reports.push(json!({ "profile": label, "report": rep }));
        }
        let detail = |bad: &Vec<String>, good: &str| if bad.is_empty() { good.to_string() } else { bad.join("; ") };
        let checks = vec![
            Check::new("partial_sums", sums.is_empty(), detail(&sums, "every lagged partial sum is at most 1/4")),
            Check::new("majorant", major.is_empty(), detail(&major, "b_n >= a_n and non-increasing")),
            Check::new(
                "dyadic_growth",
                dyadic.is_empty(),
                detail(&dyadic, "n/v(n) increases strictly on a dyadic tail"),
            ),
        ];
        Ok(Outcome { table, checks, summary: Value::Array(reports) })
    }
}

// ---------------------------------------------------------------- bounds

struct BoundsCompare;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsCompareParams {
    pub trials: usize,
    pub max_n: usize,
    pub d: usize,
    pub system_size: usize,
    pub system_rate: RateProfile,
}

impl Default for BoundsCompareParams {
    fn default() -> Self {
        BoundsCompareParams {
            trials: 10_000,
            max_n: 64,
            d: 2,
            system_size: 2048,
            system_rate: RateProfile::Geometric { r: 0.5 },
        }
    }
}

/// `a_i = 4^{-i}/2`, whose partial sums stay below `1/6`.
fn trial_rate(n: usize) -> RateProfile {
    RateProfile::Table { values: (1..=n).map(|i| 0.5 * 0.25f64.powi(i as i32)).collect() }
}

impl Experiment for BoundsCompare {
    type Params = BoundsCompareParams;
    const DESCRIPTION: &'static str = "Random almost orthonormal Gram forms against (1/2)|c|^2 with a_i = 4^(-i)/2, \
         and the growth bound for the Fourier system of the flat torus";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("trials", "number of random Gram instances"),
        ("max_n", "largest instance size"),
        ("d", "torus dimension of the Fourier system"),
        ("system_size", "number of Fourier functions"),
        ("system_rate", "rate profile dominating the system's lagged inner products"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(p.trials >= 1 && p.max_n >= 1, || "trials and max_n must be positive".into())?;
        require((1..=4).contains(&p.d), || format!("d = {} outside 1..=4", p.d))?;
        require(p.system_size >= 1, || "system_size must be positive".into())?;
        p.system_rate.validate()?;
        budget(p.trials <= 10_000_000 && p.max_n <= 512 && p.system_size <= 1_000_000, || {
            "trials, max_n or system_size over budget".into()
        })
    }

    fn run(p: &Self::Params, seed: u64) -> Result<Outcome> {
        let trials = almost_orthonormal_trials(seed, p.trials, p.max_n, &trial_rate(p.max_n))?;
        let adj = constant_adjoint(&p.system_rate, p.system_size as u64)?;
        let system = FunctionSystem::torus_fourier(p.d, p.system_size)?;
        let d = p.d as f64;
        let kappa = d.powf(d / 2.0);
        let rows = system_growth_check(&system, &adj, kappa, d)?;
        let bad = rows.iter().filter(|r| !r.ok).count();
        let checks = vec![
            Check::new(
                "almost_orthonormal",
                trials.failures == 0,
                format!("{} failures in {} trials", trials.failures, trials.trials),
            ),
            count_check("system_growth", bad, rows.len(), "rows"),
        ];
        let summary = json!({ "trials": trials, "v": adj.v(1), "kappa": kappa });
        Ok(Outcome { table: system_check_csv(&rows), checks, summary })
    }
}

// ---------------------------------------------------------------- covering oracle

struct KtOracle;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KtOracleParams {
    pub max_nodes: u64,
}

impl Default for KtOracleParams {
    fn default() -> Self {
        KtOracleParams { max_nodes: crate::metricspace::DEFAULT_KT_NODES }
    }
}

impl Experiment for KtOracle {
    type Params = KtOracleParams;
    const DESCRIPTION: &'static str = "Brute-force covering numbers of Lipschitz maps from small spaces to grids \
         against the product bound in the covering numbers of domain and range";
    const DOCS: &'static [(&'static str, &'static str)] =
        &[("max_nodes", "branch-and-bound node budget per set cover")];

    fn validate(p: &Self::Params) -> Result<()> {
        require(p.max_nodes >= 1, || "max_nodes must be positive".into())?;
        budget(p.max_nodes <= 100_000_000, || "max_nodes is limited to 10^8".into())
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let out = kt_oracle(&KtCase::standard_family(), p.max_nodes)?;
        let mut table = CsvTable::new([
            "name", "a_points", "y_grid", "r", "epsilon", "functions", "cover", "cover_exact", "n_y", "n_a", "bound", "ok",
        ]);
        for o in &out {
            table.push(vec![
                o.name.clone(),
                o.a_points.to_string(),
                o.y_grid.to_string(),
                num(o.r),
                num(o.epsilon),
                o.functions.to_string(),
                o.cover.to_string(),
                o.cover_exact.to_string(),
                o.n_y.to_string(),
                o.n_a.to_string(),
                o.bound.to_string(),
                o.ok.to_string(),
            ]);
        }
        let bad = out.iter().filter(|o| !o.ok).count();
        let inexact = out.iter().filter(|o| !o.cover_exact).count();
        let checks = vec![count_check("covering_bound", bad, out.len(), "cases")];
        Ok(Outcome { table, checks, summary: json!({ "cases": out.len(), "inexact_covers": inexact }) })
    }
}

// ---------------------------------------------------------------- Weyl

struct Weyl;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylParams {
    pub dims: Vec<usize>,
    pub n_max: u64,
    pub from: u64,
    pub band: [f64; 2],
    pub stride: u64,
}

impl Default for WeylParams {
    fn default() -> Self {
        WeylParams { dims: vec![2, 3], n_max: 100_000, from: 100, band: [0.2, 5.0], stride: 100 }
    }
}

impl Experiment for Weyl {
    type Params = WeylParams;
    const DESCRIPTION: &'static str =
        "Largest Lipschitz constant among the first n torus eigenfunctions, divided by n^(1/d)";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("dims", "torus dimensions, each 2 or 3"),
        ("n_max", "number of eigenfunctions"),
        ("from", "first n checked against the band"),
        ("band", "closed interval for the ratio"),
        ("stride", "CSV keeps every stride-th row"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        require(!p.dims.is_empty() && p.dims.iter().all(|d| *d == 2 || *d == 3), || {
            format!("dims {:?} must be 2 or 3", p.dims)
        })?;
        require(p.n_max >= 1 && (1..=p.n_max).contains(&p.from), || "need 1 <= from <= n_max".into())?;
        require(p.band[0] > 0.0 && p.band[0] < p.band[1], || format!("band {:?} is not a positive interval", p.band))?;
        require(p.stride >= 1, || "stride must be positive".into())?;
        budget(p.n_max <= MAX_WEYL_N, || format!("n_max is limited to {MAX_WEYL_N}"))
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let mut table = CsvTable::new(["d", "n", "pi_n", "ratio"]);
        let mut outside = Vec::new();
        let mut ranges = Vec::new();
        for &d in &p.dims {
            let w = weyl_check(d, p.n_max)?;
            let (lo, hi) = w.ratio_range(p.from);
            if lo < p.band[0] || hi > p.band[1] {
                outside.push(format!("d = {d}: [{lo}, {hi}]"));
            }
            ranges.push(json!({ "d": d, "min": lo, "max": hi }));
            table.rows.extend(w.to_csv(p.stride).rows);
        }
        let checks = vec![Check::new(
            "ratio_band",
            outside.is_empty(),
            if outside.is_empty() {
                format!("ratios lie in {:?} for {} <= n <= {}", p.band, p.from, p.n_max)
            } else {
                outside.join("; ")
            },
        )];
        Ok(Outcome { table, checks, summary: Value::Array(ranges) })
    }
}

// ---------------------------------------------------------------- dimension

struct Dimension;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionParams {
    pub dims: Vec<f64>,
    pub k: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub holder_beta: f64,
    pub holder_d: f64,
}

impl Default for DimensionParams {
    fn default() -> Self {
        DimensionParams { dims: vec![1.0, 2.0], k: 512, samples: 12, tolerance: 0.15, holder_beta: 0.5, holder_d: 1.0 }
    }
}

/// Geometric `ε` from just above `2e^{−βu(k−1)}` to `2e^{−βu(2)}`: the scales at
/// which the covering count of the radius-`k` window space (with distances
/// raised to the power `β`) reflects the full shift.
pub fn eps_schedule(gauge: &GaugeFunction, k: usize, beta: f64, samples: usize) -> Vec<f64> {
    let lo = 2.0 * (-beta * gauge.u((k - 1) as f64)).exp() * 1.001;
    let hi = 2.0 * (-beta * gauge.u(2.0)).exp();
    let n = samples.max(2);
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

impl Experiment for Dimension {
    type Params = DimensionParams;
    const DESCRIPTION: &'static str = "Box-counting dimension of Rudin-Shapiro window spaces under u(t) = ln(t)/d, \
         and of a Hoelder transform of one of them";
    const DOCS: &'static [(&'static str, &'static str)] = &[
        ("dims", "values of d in the gauge u(t) = ln(t)/d"),
        ("k", "window radius"),
        ("samples", "number of scales in each fit"),
        ("tolerance", "allowed relative deviation of each fitted slope"),
        ("holder_beta", "exponent of the Hoelder transform, in (0, 1]"),
        ("holder_d", "d of the space that is transformed"),
    ];

    fn validate(p: &Self::Params) -> Result<()> {
        let positive = |d: &f64| d.is_finite() && *d > 0.0;
        require(!p.dims.is_empty() && p.dims.iter().all(positive) && positive(&p.holder_d), || {
            "every d must be positive".into()
        })?;
        require(p.k >= 4, || "k must be at least 4".into())?;
        require(p.samples >= 3, || "samples must be at least 3".into())?;
        require(p.tolerance > 0.0, || "tolerance must be positive".into())?;
        require(p.holder_beta > 0.0 && p.holder_beta <= 1.0, || "holder_beta must lie in (0, 1]".into())?;
        budget(p.k <= MAX_RADIUS, || format!("k = {} exceeds the window budget {MAX_RADIUS}", p.k))
    }

    fn run(p: &Self::Params, _seed: u64) -> Result<Outcome> {
        let mut seq = SymbolSequence::rudin_shapiro_letters();
        let base = ShiftSpace::new(&mut seq, GaugeFunction::log_scaled(p.holder_d)?, p.k)?;
        let mut table = CsvTable::new(["space", "epsilon", "count"]);
        let mut checks = Vec::new();
        let mut fits = Vec::new();
        let mut fit_space = |d: f64, beta: f64, table: &mut CsvTable| -> Result<f64> {
            let gauge = GaugeFunction::log_scaled(d)?;
            let mut space = base.clone().with_gauge(gauge.clone()).window_metric_space()?;
            if beta != 1.0 {
                space = space.holder_transform(beta)?;
            }
            let fit = box_dimension(&space, &eps_schedule(&gauge, p.k, beta, p.samples))?;
            let label = if beta == 1.0 { format!("d={d}") } else { format!("d={d},beta={beta}") };
            for s in &fit.samples {
                table.push(vec![label.clone(), num(s.epsilon), s.count.to_string()]);
            }
            fits.push(json!({ "space": label, "slope": fit.slope, "residual": fit.residual }));
            Ok(fit.slope)
        };
        let mut holder_base = None;
        for &d in &p.dims {
            let slope = fit_space(d, 1.0, &mut table)?;
            if d == p.holder_d {
                holder_base = Some(slope);
            }
            checks.push(Check::new(
                &format!("slope_d{d}"),
                (slope - d).abs() <= p.tolerance * d,
                format!("fitted slope {slope} for d = {d}"),
            ));
        }
        let base_slope = match holder_base {
            Some(s) => s,
            None => fit_space(p.holder_d, 1.0, &mut table)?,
        };
        let transformed = fit_space(p.holder_d, p.holder_beta, &mut table)?;
        let ratio = transformed / base_slope;
        let target = 1.0 / p.holder_beta;
        checks.push(Check::new(
            "holder_scales_slope",
            (ratio - target).abs() <= p.tolerance * target,
            format!("slope ratio {ratio} against 1/beta = {target}"),
        ));
        let summary = json!({ "windows": base.len(), "fits": fits });
        Ok(Outcome { table, checks, summary })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_integers_cover_range() {
        let v = geometric_integers(4096, 16384, 61);
        assert_eq!((v[0], *v.last().unwrap()), (4096, 16384));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(geometric_integers(5, 5, 10), vec![5]);
    }

    #[test]
    fn eps_schedule_spans_a_decade_at_default_radius() {
        for (d, beta) in [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
            let e = eps_schedule(&GaugeFunction::log_scaled(d).unwrap(), 512, beta, 12);
            assert!(e.last().unwrap() / e[0] > 10.0, "{d} {beta}");
        }
    }

    #[test]
    fn big_integers_print_by_magnitude() {
        assert_eq!(fmt_int(&BigUint::from(9661u32)), "9661");
        assert!(fmt_int(&(BigUint::from(1u8) << 200u32)).ends_with("e60"));
    }

    #[test]
    fn catalog_docs_name_real_fields() {
        for id in ExperimentId::ALL {
            let e = catalog_entry(id);
            let defaults = with_experiment!(id, E => to_value(&<E as Experiment>::Params::default()));
            let fields: Vec<&String> = defaults.as_object().unwrap().keys().collect();
            assert_eq!(fields.len(), e.parameters.len(), "{id}");
            assert!(e.parameters.iter().all(|p| !p.default.is_null()), "{id}");
        }
    }
}
