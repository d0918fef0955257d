//! Non-negative magnitudes stored by their natural logarithm.
//!
//! Birkhoff sums over Liouville-type rotations mix quantities like
//! `e^{-24000}` and `2^{58000}` in a single product; `f64` cannot hold
//! either factor but the product is an ordinary number. Every such
//! magnitude travels as a [`LogMag`] until the final comparison.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMag {
    ln: f64,
}

impl LogMag {
    pub const ZERO: LogMag = LogMag { ln: f64::NEG_INFINITY };
    pub const ONE: LogMag = LogMag { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan());
        LogMag { ln }
    }

    /// Magnitude of `x`; the sign is dropped.
    pub fn from_f64(x: f64) -> Self {
        LogMag { ln: x.abs().ln() }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        LogMag { ln: ln_biguint(x) }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// Value as `f64`; saturates to `inf` or `0` outside the representable range.
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            return if p > 0.0 { Self::ZERO } else { Self::ONE };
        }
        LogMag { ln: self.ln * p }
    }

    pub fn max(self, other: Self) -> Self {
        if self.ln >= other.ln {
            self
        } else {
            other
        }
    }

    /// `max(self - other, 0)`.
    pub fn saturating_sub(self, other: Self) -> Self {
        if other.is_zero() {
            return self;
        }
        if other.ln >= self.ln {
            return Self::ZERO;
        }
        LogMag { ln: self.ln + (-(other.ln - self.ln).exp_m1()).ln() }
    }

    /// Rounds the stored logarithm upward by a relative slack so the
    /// magnitude stays an upper bound after a chain of float operations.
    pub fn inflate(self, rel: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        LogMag { ln: self.ln + rel * self.ln.abs().max(1.0) }
    }

    /// Scientific notation that works far outside the `f64` exponent range.
    pub fn to_sci(self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.ln.is_infinite() {
            return "inf".to_string();
        }
        let log10 = self.ln / std::f64::consts::LN_10;
        if log10.abs() >= 1e15 {
            // the mantissa carries no information at this size
            return format!("e^{:e}", self.ln);
        }
        let mut exp = log10.floor();
        let mut mant = 10f64.powf(log10 - exp);
        if mant >= 9.9999995 {
            mant = 1.0;
            exp += 1.0;
        }
        format!("{mant:.6}e{}", exp as i64)
    }
}

impl Add for LogMag {
    type Output = LogMag;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.ln >= rhs.ln { (self, rhs) } else { (rhs, self) };
        if lo.is_zero() {
            return hi;
        }
        LogMag { ln: hi.ln + (lo.ln - hi.ln).exp().ln_1p() }
    }
}

impl Mul for LogMag {
    type Output = LogMag;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogMag { ln: self.ln + rhs.ln }
    }
}

impl Div for LogMag {
    type Output = LogMag;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogMag { ln: self.ln - rhs.ln }
    }
}

impl PartialOrd for LogMag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Display for LogMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci())
    }
}

impl Serialize for LogMag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sci())
    }
}

/// Natural logarithm of a big unsigned integer, accurate to a few ulps.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_floats() {
        let a = LogMag::from_f64(3.0);
        let b = LogMag::from_f64(5.0);
        assert!(((a + b).to_f64() - 8.0).abs() < 1e-12);
        assert!(((a * b).to_f64() - 15.0).abs() < 1e-12);
        assert!(((b / a).to_f64() - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(a + LogMag::ZERO, a);
        assert!((a * LogMag::ZERO).is_zero());
    }

    #[test]
    fn subtraction_saturates() {
        let a = LogMag::from_f64(5.0);
        let b = LogMag::from_f64(3.0);
        assert!((a.saturating_sub(b).to_f64() - 2.0).abs() < 1e-14);
        assert!(b.saturating_sub(a).is_zero());
        assert_eq!(a.saturating_sub(LogMag::ZERO), a);
    }

    #[test]
    fn huge_products_stay_finite() {
        let tiny = LogMag::from_ln(-24000.0);
        let huge = LogMag::from_ln(40000.0);
        let p = tiny * huge;
        assert!((p.ln() - 16000.0).abs() < 1e-9);
        assert!(p.to_f64().is_infinite());
        assert!(p.to_sci().ends_with("e6948"));
    }

    #[test]
    fn ln_of_big_integers() {
        let x = BigUint::from(1u8) << 5000u32;
        assert!((ln_biguint(&x) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::from(1u8)), 0.0);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(LogMag::from_f64(1234.5).to_sci(), "1.234500e3");
        assert_eq!(LogMag::from_f64(0.001).to_sci(), "1.000000e-3");
        assert_eq!(LogMag::ZERO.to_sci(), "0");
        assert_eq!(LogMag::from_ln(-f64::MAX).to_sci(), format!("e^{:e}", -f64::MAX));
    }
}
