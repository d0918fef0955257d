use mixgrowth::bounds::{almost_orthonormal_lower, build_adjoint, min_eigenvalue, random_instance, toeplitz, RateProfile};
use mixgrowth::cfrac::{distance_to_nearest_integer, ContinuedFraction, GaugeFunction};
use mixgrowth::lab::{resolve_params, ExperimentId};
use mixgrowth::metricspace::{exact_covering_number, greedy_net, kt_bound, FiniteMetricSpace};
use mixgrowth::subshift::{rudin_shapiro_prefix, Substitution, SymbolSequence};
use mixgrowth::LogMag;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn quotients() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..500, 1..25)
}

proptest! {
    #[test]
    fn convergents_are_exact_and_close(a in quotients()) {
        let cf = ContinuedFraction::from_quotients(a.iter().map(|&x| BigUint::from(x))).unwrap();
        prop_assert!(cf.verify_exactness());
        let q = cf.all_denominators();
        prop_assert!(q.windows(2).skip(1).all(|w| w[1] > w[0]));
        let alpha = cf.value();
        for n in 1..cf.depth() {
            let err = (&alpha - cf.convergent(n).unwrap()).abs();
            let bound = BigRational::new(BigInt::one(), BigInt::from(&q[n] * &q[n + 1]));
            prop_assert!(err <= bound, "n = {n}");
        }
    }

    #[test]
    fn nearest_integer_distance(num in -10_000i64..10_000, den in 1i64..500, shift in -50i64..50) {
        let x = BigRational::new(num.into(), den.into());
        let d = distance_to_nearest_integer(&x);
        prop_assert!(d >= BigRational::from_integer(0.into()));
        prop_assert!(d <= BigRational::new(1.into(), 2.into()));
        prop_assert_eq!(d, distance_to_nearest_integer(&(x + BigRational::from_integer(shift.into()))));
    }

    #[test]
    fn logmag_arithmetic(a in 1e-200f64..1e200, b in 1e-200f64..1e200) {
        let (la, lb) = (LogMag::from_f64(a), LogMag::from_f64(b));
        let rel = |x: LogMag, y: f64| (x.to_f64() - y).abs() <= 1e-12 * y;
        prop_assert!(rel(la * lb, a * b) || !(a * b).is_normal());
        prop_assert!(rel(la / lb, a / b) || !(a / b).is_normal());
        prop_assert!(rel(la + lb, a + b));
        prop_assert!((la.max(lb).to_f64() - a.max(b)).abs() <= 1e-12 * a.max(b));
    }

    #[test]
    fn gauges_increase_and_invert(d in 0.25f64..8.0, t in 1.0f64..1e6, s in 1.0f64..1e6) {
        let g = GaugeFunction::log_scaled(d).unwrap();
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        prop_assert!(g.u(lo) <= g.u(hi));
        prop_assert!(g.u(hi) / hi <= g.u(lo) / lo * (1.0 + 1e-12));
        let y = g.u(t);
        prop_assert!((g.inverse(y) - t).abs() <= 1e-9 * t);
    }

    #[test]
    fn rudin_shapiro_recurrence(n in 0usize..50_000) {
        let v = rudin_shapiro_prefix(2 * n + 2);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(v[2 * n], v[n]);
        prop_assert_eq!(v[2 * n + 1], sign * v[n]);
    }

    #[test]
    fn substitution_is_a_morphism(u in prop::collection::vec(0u8..4, 0..40), w in prop::collection::vec(0u8..4, 0..40)) {
        let s = Substitution::rudin_shapiro();
        let mut uw = u.clone();
        uw.extend(&w);
        let mut expected = s.apply(&u);
        expected.extend(s.apply(&w));
        prop_assert_eq!(s.apply(&uw), expected);
    }

    #[test]
    fn fixed_point_is_stable(n in 1usize..2000) {
        let mut seq = SymbolSequence::rudin_shapiro_letters();
        let p = seq.prefix(n).to_vec();
        let image = Substitution::rudin_shapiro().apply(&p);
        prop_assert_eq!(&image[..n], &p[..]);
    }

    #[test]
    fn holder_transform_stays_metric(xs in prop::collection::vec(-10.0f64..10.0, 2..9), beta in 0.05f64..1.0) {
        let space = FiniteMetricSpace::on_line(&xs).unwrap();
        let h = space.holder_transform(beta).unwrap();
        prop_assert!(h.check_triangle(16, 0, 1).is_ok());
        prop_assert!((h.diameter() - space.diameter().powf(beta)).abs() <= 1e-9 * (1.0 + h.diameter()));
    }

    #[test]
    fn greedy_net_bounds_exact_cover(xs in prop::collection::vec(0.0f64..10.0, 1..12), eps in 0.1f64..4.0) {
        let space = FiniteMetricSpace::on_line(&xs).unwrap();
        let greedy = greedy_net(&space, eps).unwrap();
        let exact = exact_covering_number(&space, eps, 1 << 20).unwrap();
        prop_assert!(exact <= greedy.count);
        let coarser = exact_covering_number(&space, 2.0 * eps, 1 << 20).unwrap();
        prop_assert!(coarser <= exact);
    }

    #[test]
    fn kt_bound_is_monotone(n_y in 1u64..40, n_a in 1u32..12) {
        let b = kt_bound(n_y, n_a).unwrap();
        prop_assert!(b <= kt_bound(n_y + 1, n_a).unwrap());
        prop_assert!(b <= kt_bound(n_y, n_a + 1).unwrap());
    }

    #[test]
    fn almost_orthonormal_instances(seed in any::<u64>(), n in 1usize..48, extreme in any::<bool>()) {
        let rate = RateProfile::Table { values: (1..=n).map(|i| 0.5 * 0.25f64.powi(i as i32)).collect() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, c) = random_instance(&mut rng, n, &rate, extreme);
        let r = almost_orthonormal_lower(&g, &c, &rate).unwrap();
        prop_assert!(r.ok, "{} < {}", r.lhs, r.rhs);
        prop_assert!(min_eigenvalue(&g) >= 0.5 - 1e-12);
    }

    #[test]
    fn adjoint_partial_sums(c in 0.1f64..4.0, nu in 0.1f64..2.0) {
        let adj = build_adjoint(&RateProfile::Power { c, nu }, 20_000).unwrap();
        let rep = adj.report();
        prop_assert!(rep.partial_sums_ok, "{}", rep.max_partial_sum);
        prop_assert!(rep.max_partial_sum <= 0.25);
        prop_assert!((1..20_000).all(|n| adj.v(n) <= adj.v(n + 1)));
    }

    #[test]
    fn resolved_params_are_fixed_points(l_max in 1usize..200, scan_factor in 2usize..100) {
        let p = resolve_params(ExperimentId::RsComplexity, &json!({ "l_max": l_max, "scan_factor": scan_factor })).unwrap();
        prop_assert_eq!(resolve_params(ExperimentId::RsComplexity, &p).unwrap(), p);
    }
}

#[test]
fn toeplitz_of_unit_correlation_is_identity() {
    assert!((min_eigenvalue(&toeplitz(&[1.0, 0.0, 0.0, 0.0])) - 1.0).abs() < 1e-12);
}
