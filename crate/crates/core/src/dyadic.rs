//! Exact dyadic rationals `m · 2^e`.
//!
//! Grid coordinates, spacings and box corners are all dyadic, so every grid
//! computation is exact. Conversions to `f64` are exact as long as the
//! mantissa fits in 53 bits, which holds for every grid this crate builds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: i64,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        mantissa: 0,
        exponent: 0,
    };
    pub const ONE: Dyadic = Dyadic {
        mantissa: 1,
        exponent: 0,
    };

    pub fn new(mantissa: i64, exponent: i32) -> Self {
        Self::normalized(mantissa as i128, exponent).expect("i64 mantissa always fits")
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i32) -> Self {
        Dyadic {
            mantissa: 1,
            exponent: k,
        }
    }

    fn normalized(mut m: i128, mut e: i32) -> Option<Self> {
        if m == 0 {
            return Some(Self::ZERO);
        }
        while m % 2 == 0 {
            m /= 2;
            e += 1;
        }
        let mantissa = i64::try_from(m).ok()?;
        Some(Dyadic {
            mantissa,
            exponent: e,
        })
    }

    pub fn mantissa(&self) -> i64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa > 0
    }

    /// True for `2^k`, any integer `k`.
    pub fn is_power_of_two(&self) -> bool {
        self.mantissa == 1
    }

    /// `k` such that `self == 2^k`, if `self` is a power of two.
    pub fn log2(&self) -> Option<i32> {
        self.is_power_of_two().then_some(self.exponent)
    }

    fn aligned(a: Self, b: Self) -> Option<(i128, i128, i32)> {
        let e = a.exponent.min(b.exponent);
        let sa = u32::try_from(a.exponent - e).ok()?;
        let sb = u32::try_from(b.exponent - e).ok()?;
        if sa > 100 || sb > 100 {
            return None;
        }
        let ma = (a.mantissa as i128).checked_shl(sa)?;
        let mb = (b.mantissa as i128).checked_shl(sb)?;
        // checked_shl does not detect lost high bits
        if (ma >> sa) != a.mantissa as i128 || (mb >> sb) != b.mantissa as i128 {
            return None;
        }
        Some((ma, mb, e))
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        if self.is_zero() {
            return Some(rhs);
        }
        if rhs.is_zero() {
            return Some(self);
        }
        let (a, b, e) = Self::aligned(self, rhs)?;
        Self::normalized(a.checked_add(b)?, e)
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let m = (self.mantissa as i128).checked_mul(rhs.mantissa as i128)?;
        Self::normalized(m, self.exponent.checked_add(rhs.exponent)?)
    }

    pub fn mul_int(self, n: i64) -> Self {
        self * Dyadic::from_int(n)
    }

    /// Exact quotient `self / rhs` when it is an integer.
    pub fn div_exact(self, rhs: Self) -> Option<i64> {
        if rhs.is_zero() {
            return None;
        }
        let (a, b, _) = Self::aligned(self, rhs)?;
        (a % b == 0).then(|| i64::try_from(a / b).ok()).flatten()
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa as f64 * 2f64.powi(self.exponent)
    }

    /// Exact conversion; `None` for non-finite input or mantissas that do not
    /// fit in 64 bits.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::ZERO);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i128 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i128 << 52), raw_exp - 1075)
        };
        Self::normalized(sign * m, e)
    }

    pub fn to_rational(self) -> BigRational {
        let m = BigInt::from(self.mantissa);
        if self.exponent >= 0 {
            BigRational::from_integer(m << self.exponent as usize)
        } else {
            BigRational::new(m, BigInt::from(1) << (-self.exponent) as usize)
        }
    }

    /// Largest power of two `<= x`, for finite positive `x`.
    pub fn pow2_floor(x: f64) -> Option<Self> {
        if !(x.is_finite() && x > 0.0) {
            return None;
        }
        let mut k = x.log2().floor() as i32;
        while 2f64.powi(k) > x {
            k -= 1;
        }
        while 2f64.powi(k + 1) <= x {
            k += 1;
        }
        Some(Self::pow2(k))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("dyadic addition overflow")
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Self {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("dyadic multiplication overflow")
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match Self::aligned(*self, *other) {
            Some((a, b, _)) => a.cmp(&b),
            None => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 && self.exponent < 62 {
            let v = (self.mantissa as i128) << self.exponent;
            if v.unsigned_abs().is_power_of_two() && v > 1 {
                return write!(f, "2^{}", self.exponent);
            }
            return write!(f, "{v}");
        }
        match self.mantissa {
            1 => write!(f, "2^{}", self.exponent),
            m => write!(f, "{m}*2^{}", self.exponent),
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `2^-10`, `3*2^-4`, `1/8`, `-0.375` and plain integers.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("not a dyadic number: {s:?}"));
        if let Some((m, e)) = s.split_once("*2^") {
            let m: i64 = m.trim().parse().map_err(|_| bad())?;
            let e: i32 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(m, e));
        }
        if let Some(e) = s.strip_prefix("2^") {
            let e: i32 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::pow2(e));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q <= 0 || !(q as u64).is_power_of_two() {
                return Err(bad());
            }
            return Ok(Dyadic::new(p, -(q.trailing_zeros() as i32)));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Dyadic::from_int(n));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').ok_or_else(bad)?;
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        // a terminating decimal p / 10^k is dyadic iff 5^k divides p
        let digits: i128 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let five = 5i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        if digits % five != 0 {
            return Err(bad());
        }
        let m = i64::try_from(digits / five).map_err(|_| bad())?;
        let d = Dyadic::new(if neg { -m } else { m }, -(frac.len() as i32));
        Ok(d)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Int(i64),
            Float(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Dyadic::from_int(n)),
            Repr::Float(x) => Dyadic::from_f64(x)
                .ok_or_else(|| serde::de::Error::custom(format!("not a dyadic number: {x}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!("2^-10".parse::<Dyadic>().unwrap(), Dyadic::pow2(-10));
        assert_eq!("1/8".parse::<Dyadic>().unwrap(), Dyadic::pow2(-3));
        assert_eq!("0.75".parse::<Dyadic>().unwrap(), Dyadic::new(3, -2));
        assert_eq!("-4".parse::<Dyadic>().unwrap(), Dyadic::pow2(2).mul_int(-1));
        assert_eq!("3*2^-4".parse::<Dyadic>().unwrap(), Dyadic::new(3, -4));
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("0.1".parse::<Dyadic>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for d in [
            Dyadic::pow2(-10),
            Dyadic::new(3, -4),
            Dyadic::from_int(12),
            Dyadic::ZERO,
            Dyadic::pow2(4),
        ] {
            assert_eq!(d.to_string().parse::<Dyadic>().unwrap(), d, "{d}");
        }
        assert_eq!(Dyadic::pow2(-10).to_string(), "2^-10");
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Dyadic::new(1, -3);
        let b = Dyadic::new(3, -5);
        assert_eq!((a + b).to_f64(), 0.125 + 3.0 / 32.0);
        assert_eq!((a - a), Dyadic::ZERO);
        assert_eq!(Dyadic::ONE.div_exact(Dyadic::pow2(-4)), Some(16));
        assert_eq!(Dyadic::new(3, -2).div_exact(Dyadic::pow2(-1)), None);
        assert!(a > b);
        assert_eq!(Dyadic::from_f64(0.1).unwrap().to_f64(), 0.1);
    }

    #[test]
    fn pow2_floor_brackets() {
        assert_eq!(Dyadic::pow2_floor(1.0), Some(Dyadic::ONE));
        assert_eq!(Dyadic::pow2_floor(0.3), Some(Dyadic::pow2(-2)));
        assert_eq!(Dyadic::pow2_floor(1.0 / 24.0), Some(Dyadic::pow2(-5)));
        assert_eq!(Dyadic::pow2_floor(0.0), None);
    }
}
