//! Additive agent valuations over the cake `[0, 1]`, computed exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational that serializes as `"p/q"` and parses integers,
/// fractions, exact decimals and `2^-k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("not a rational number: {s:?}"));
        if s.contains("2^") {
            let d: crate::dyadic::Dyadic = s.parse()?;
            return Ok(Rational(d.to_rational()));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Rational(BigRational::new(p, q)));
        }
        let (mantissa, exp10) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (neg, body) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = exp10 - frac.len() as i32;
        let ten = BigInt::from(10);
        let mut q = BigRational::from_integer(digits);
        if scale >= 0 {
            q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
        } else {
            q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
        }
        Ok(Rational(if neg { -q } else { q }))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // numbers go through their shortest decimal form, so 0.1 means 1/10
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n.to_string().parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

/// Piece values for one agent. Valuations are additive integrals of a
/// non-negative density, so they are monotone and vanish on empty pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Valuation {
    /// Constant density `densities[j]` on `[breakpoints[j], breakpoints[j+1]]`.
    PiecewiseConstant {
        breakpoints: Vec<Rational>,
        densities: Vec<Rational>,
    },
    /// Density interpolating `densities[j]` at `breakpoints[j]` linearly.
    PiecewiseLinear {
        breakpoints: Vec<Rational>,
        densities: Vec<Rational>,
    },
}

impl Valuation {
    pub fn uniform() -> Self {
        Valuation::PiecewiseConstant {
            breakpoints: vec![Rational::from_int(0), Rational::from_int(1)],
            densities: vec![Rational::from_int(1)],
        }
    }

    pub fn piecewise_constant(breakpoints: &[BigRational], densities: &[BigRational]) -> Result<Self> {
        let v = Valuation::PiecewiseConstant {
            breakpoints: breakpoints.iter().cloned().map(Rational).collect(),
            densities: densities.iter().cloned().map(Rational).collect(),
        };
        v.validate()?;
        Ok(v)
    }

    fn parts(&self) -> (&[Rational], &[Rational]) {
        match self {
            Valuation::PiecewiseConstant {
                breakpoints,
                densities,
            }
            | Valuation::PiecewiseLinear {
                breakpoints,
                densities,
            } => (breakpoints, densities),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (bp, dens) = self.parts();
        let expected = match self {
            Valuation::PiecewiseConstant { .. } => bp.len().saturating_sub(1),
            Valuation::PiecewiseLinear { .. } => bp.len(),
        };
        if bp.len() < 2 || dens.len() != expected {
            return Err(Error::Input(format!(
                "valuation has {} breakpoints and {} densities",
                bp.len(),
                dens.len()
            )));
        }
        if !bp[0].0.is_zero() || !bp[bp.len() - 1].0.is_one() {
            return Err(Error::Input("breakpoints must start at 0 and end at 1".into()));
        }
        if bp.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("breakpoints must be strictly increasing".into()));
        }
        if dens.iter().any(|d| d.0.is_negative()) {
            return Err(Error::Input("densities must be non-negative".into()));
        }
        Ok(())
    }

    /// Cumulative value of `[0, x]`.
    fn cdf(&self, x: &BigRational) -> BigRational {
        let (bp, dens) = self.parts();
        let mut total = BigRational::zero();
        for j in 0..bp.len() - 1 {
            let (lo, hi) = (&bp[j].0, &bp[j + 1].0);
            if x <= lo {
                break;
            }
            let end = if x < hi { x } else { hi };
            let len = end - lo;
            total += match self {
                Valuation::PiecewiseConstant { .. } => &dens[j].0 * &len,
                Valuation::PiecewiseLinear { .. } => {
                    // trapezoid from lo to end
                    let slope = (&dens[j + 1].0 - &dens[j].0) / (hi - lo);
                    let at_end = &dens[j].0 + &slope * &len;
                    (&dens[j].0 + at_end) * len / BigRational::from_integer(BigInt::from(2))
                }
            };
        }
        total
    }

    /// Value of `[a, b]`; zero when `a >= b`.
    pub fn value(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a >= b {
            return BigRational::zero();
        }
        self.cdf(b) - self.cdf(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        s.parse::<Rational>().unwrap().0
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(q("1/3"), BigRational::new(1.into(), 3.into()));
        assert_eq!(q("0.1"), BigRational::new(1.into(), 10.into()));
        assert_eq!(q("2^-3"), BigRational::new(1.into(), 8.into()));
        assert_eq!(q("-2.5e-1"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(q("7"), BigRational::from_integer(7.into()));
        assert!("1/0".parse::<Rational>().is_err());
        let r: Rational = serde_json::from_str("0.3").unwrap();
        assert_eq!(r.0, BigRational::new(3.into(), 10.into()));
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"3/10\"");
    }

    #[test]
    fn piecewise_constant_values() {
        let v: Valuation = serde_json::from_str(
            r#"{"type": "piecewise_constant", "breakpoints": [0, "1/3", 1], "densities": [3, 0]}"#,
        )
        .unwrap();
        v.validate().unwrap();
        assert_eq!(v.value(&q("0"), &q("1")), q("1"));
        assert_eq!(v.value(&q("1/6"), &q("1/2")), q("1/2"));
        assert_eq!(v.value(&q("1/2"), &q("1")), q("0"));
        assert_eq!(v.value(&q("1/2"), &q("1/2")), q("0"));
    }

    #[test]
    fn piecewise_linear_values() {
        let v = Valuation::PiecewiseLinear {
            breakpoints: vec![Rational(q("0")), Rational(q("1"))],
            densities: vec![Rational(q("0")), Rational(q("2"))],
        };
        v.validate().unwrap();
        assert_eq!(v.value(&q("0"), &q("1")), q("1"));
        assert_eq!(v.value(&q("0"), &q("1/2")), q("1/4"));
    }

    #[test]
    fn invalid_valuations() {
        let bad = Valuation::PiecewiseConstant {
            breakpoints: vec![Rational(q("0")), Rational(q("1/2"))],
            densities: vec![Rational(q("1"))],
        };
        assert!(bad.validate().is_err());
        let neg = Valuation::PiecewiseConstant {
            breakpoints: vec![Rational(q("0")), Rational(q("1"))],
            densities: vec![Rational(q("-1"))],
        };
        assert!(neg.validate().is_err());
    }
}
