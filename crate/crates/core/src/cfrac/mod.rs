//! Exact continued fractions and the coupled Liouville-type pair.

mod gauge;
mod liouville;

pub use gauge::{GaugeFunction, GaugeKind};
pub use liouville::{construct_liouville_pair, LevelRecord, LiouvilleCertificate, LiouvilleConfig, LiouvillePair, Which};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{input_err, Error, Result};

/// Finite expansion `[0; a_1, ..., a_N]` with its convergents `p_n / q_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    partial_quotients: Vec<BigUint>,
    denominators: Vec<BigUint>,
    numerators: Vec<BigUint>,
}

impl Default for ContinuedFraction {
    fn default() -> Self {
        Self::new()
    }
}

impl ContinuedFraction {
    /// Empty expansion: `q_0 = 1`, `p_0 = 0`.
    pub fn new() -> Self {
        ContinuedFraction {
            partial_quotients: Vec::new(),
            denominators: vec![BigUint::one()],
            numerators: vec![BigUint::zero()],
        }
    }

    pub fn from_quotients<I>(quotients: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<BigUint>,
    {
        let mut cf = Self::new();
        for a in quotients {
            cf.push(a.into())?;
        }
        Ok(cf)
    }

    pub fn push(&mut self, a: BigUint) -> Result<()> {
        if a.is_zero() {
            return Err(input_err!("partial quotient {} is zero", self.partial_quotients.len() + 1));
        }
        let n = self.denominators.len();
        let (q, p) = if n == 1 {
            (a.clone(), BigUint::one())
        } else {
            (
                &a * &self.denominators[n - 1] + &self.denominators[n - 2],
                &a * &self.numerators[n - 1] + &self.numerators[n - 2],
            )
        };
        self.partial_quotients.push(a);
        self.denominators.push(q);
        self.numerators.push(p);
        Ok(())
    }

    /// Number of stored partial quotients `N`.
    pub fn depth(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn partial_quotients(&self) -> &[BigUint] {
        &self.partial_quotients
    }

    pub fn all_denominators(&self) -> &[BigUint] {
        &self.denominators
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    /// `q_0..=q_n`.
    pub fn denominators(&self, n: usize) -> Result<&[BigUint]> {
        if n > self.depth() {
            return Err(Error::OutOfRange { index: n, available: self.depth() });
        }
        Ok(&self.denominators[..=n])
    }

    pub fn convergent(&self, n: usize) -> Result<BigRational> {
        if n > self.depth() {
            return Err(Error::OutOfRange { index: n, available: self.depth() });
        }
        // p_n q_{n-1} - p_{n-1} q_n = ±1, so the pair is already reduced
        Ok(BigRational::new_raw(
            BigInt::from(self.numerators[n].clone()),
            BigInt::from(self.denominators[n].clone()),
        ))
    }

    /// The deepest stored convergent `p_N / q_N`, which stands in for α.
    pub fn value(&self) -> BigRational {
        self.convergent(self.depth()).expect("depth is always in range")
    }

    /// `p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1}` and `gcd(p_n, q_n) = 1` for every stored `n ≥ 1`.
    pub fn verify_exactness(&self) -> bool {
        (1..=self.depth()).all(|n| {
            let lhs = BigInt::from(&self.numerators[n] * &self.denominators[n - 1])
                - BigInt::from(&self.numerators[n - 1] * &self.denominators[n]);
            let expected = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            lhs == expected && self.numerators[n].gcd(&self.denominators[n]).is_one()
        })
    }
}

/// `‖x‖`, the distance from `x` to the nearest integer.
pub fn distance_to_nearest_integer(x: &BigRational) -> BigRational {
    let frac = x - x.floor();
    let other = BigRational::one() - &frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// Outcome of the two-sided gap test `1/(2q_{n+1}) < ‖q_n α‖ < 1/q_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCheck {
    pub holds: bool,
    #[serde(serialize_with = "ser_rational")]
    pub distance: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub lower: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub upper: BigRational,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Evaluates α as the deepest convergent, which must lie at least two
/// levels below `n + 1` so the tail still influences `‖q_n α‖`.
pub fn check_denominator_gap(cf: &ContinuedFraction, n: usize) -> Result<GapCheck> {
    let depth = cf.depth();
    if n + 2 > depth {
        return Err(Error::Precision(format!(
            "gap at n={n} needs convergent depth {} but only {depth} stored",
            n + 2
        )));
    }
    let alpha = cf.value();
    let qn = BigRational::from_integer(BigInt::from(cf.denominators[n].clone()));
    let qn1 = BigInt::from(cf.denominators[n + 1].clone());
    let distance = distance_to_nearest_integer(&(qn * alpha));
    let upper = BigRational::new(BigInt::one(), qn1.clone());
    let lower = BigRational::new(BigInt::one(), qn1 * 2);
    let holds = lower < distance && distance < upper;
    Ok(GapCheck { holds, distance, lower, upper })
}

/// `4‖x‖ ≤ |e^{2πix} − 1| ≤ 2π‖x‖`, with `‖x‖` exact and the rest in `f64`.
pub fn exp_bound_check(x: &BigRational) -> bool {
    let t = rational_to_f64(&distance_to_nearest_integer(x));
    let chord = 2.0 * (std::f64::consts::PI * t).sin().abs();
    let tol = 4.0 * f64::EPSILON * chord.max(1e-300);
    4.0 * t <= chord + tol && chord <= 2.0 * std::f64::consts::PI * t + tol
}

/// Nearest `f64` to a rational of any size, without overflowing intermediates.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = 64 - (nb - db);
    let scaled = if shift >= 0 {
        (x.numer().abs() << shift as usize) / x.denom()
    } else {
        x.numer().abs() / (x.denom() << (-shift) as usize)
    };
    let m = scaled.to_f64().unwrap_or(f64::INFINITY);
    sign * m * 2f64.powi(-(shift as i32))
}

/// Fractional part of `m · k · α` in `[0, 1)`, reduced exactly before rounding.
pub fn phase_mod_one(alpha: &BigRational, factor: &BigInt) -> f64 {
    let num = alpha.numer() * factor;
    let den = alpha.denom();
    let r = num.mod_floor(den);
    rational_to_f64(&BigRational::new_raw(r, den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qs(cf: &ContinuedFraction, n: usize) -> Vec<u64> {
        cf.denominators(n).unwrap().iter().map(|q| q.to_u64().unwrap()).collect()
    }

    #[test]
    fn denominators_unroll() {
        let cf = ContinuedFraction::from_quotients([1u32, 1, 1, 1, 1]).unwrap();
        assert_eq!(qs(&cf, 5), [1, 1, 2, 3, 5, 8]);
        let cf = ContinuedFraction::from_quotients([2u32]).unwrap();
        assert_eq!(qs(&cf, 1), [1, 2]);
        let cf = ContinuedFraction::from_quotients([1u32, 2, 3, 4]).unwrap();
        assert_eq!(qs(&cf, 4), [1, 1, 3, 10, 43]);
        assert!(matches!(cf.denominators(5), Err(Error::OutOfRange { index: 5, available: 4 })));
    }

    #[test]
    fn zero_quotient_rejected() {
        assert!(ContinuedFraction::from_quotients([1u32, 0]).is_err());
    }

    #[test]
    fn convergents_and_determinant() {
        let cf = ContinuedFraction::from_quotients([1u32, 2, 3, 4]).unwrap();
        // [0; 1, 2, 3, 4] = 30/43
        assert_eq!(cf.value(), rat(30, 43));
        assert!(cf.verify_exactness());
    }

    #[test]
    fn nearest_integer_distance() {
        assert_eq!(distance_to_nearest_integer(&rat(7, 3)), rat(1, 3));
        assert_eq!(distance_to_nearest_integer(&rat(5, 2)), rat(1, 2));
        assert_eq!(distance_to_nearest_integer(&rat(0, 1)), rat(0, 1));
        assert_eq!(distance_to_nearest_integer(&rat(-7, 3)), rat(1, 3));
    }

    #[test]
    fn gap_examples() {
        let golden = ContinuedFraction::from_quotients([1u32; 8]).unwrap();
        let g = check_denominator_gap(&golden, 2).unwrap();
        assert!(g.holds);
        // α = 21/34, q_2 = 2, q_3 = 3: ‖42/34‖ = 8/34
        assert_eq!(g.distance, rat(4, 17));
        assert_eq!(g.upper, rat(1, 3));
        assert_eq!(g.lower, rat(1, 6));

        let silver = ContinuedFraction::from_quotients([2u32; 6]).unwrap();
        assert!(check_denominator_gap(&silver, 1).unwrap().holds);

        assert!(matches!(check_denominator_gap(&golden, 7), Err(Error::Precision(_))));
    }

    #[test]
    fn exp_bound_examples() {
        assert!(exp_bound_check(&rat(0, 1)));
        assert!(exp_bound_check(&rat(1, 4)));
        assert!(exp_bound_check(&rat(1, 2)));
        assert!(exp_bound_check(&rat(-17, 5)));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::one() << 4000usize;
        let x = BigRational::new(big.clone() + 1, big * 3);
        assert!((rational_to_f64(&x) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn phase_reduction_is_exact() {
        let alpha = rat(30, 43);
        let f = phase_mod_one(&alpha, &BigInt::from(43 * 1_000_000_007i64 + 1));
        assert!((f - 30.0 / 43.0).abs() < 1e-15);
    }
}
