//! One-dimensional bisection on switching sign functions.
//!
//! A sign function on the integer range `[lo, hi]` is positive-switching
//! when `f(lo) <= 0 <= f(hi)` and negative-switching when the inequalities
//! are reversed. Adjacent indices of a δ-continuous function never carry
//! opposite nonzero signs, so bisection always ends on a zero.

use serde::{Deserialize, Serialize};

use crate::domain::{Restriction, Sign, SignField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    /// Sign as seen by a positive-switching search.
    fn normalize(self, s: Sign) -> Sign {
        match self {
            Orientation::Positive => s,
            Orientation::Negative => s.flip(),
        }
    }
}

/// Endpoint signs the caller already knows; known endpoints are not
/// re-evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KnownEnds {
    pub lo: Option<Sign>,
    pub hi: Option<Sign>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Bracket {
    /// `f(index) = 0`.
    Root { index: i64 },
    /// `f(lo) < 0 < f(hi)` in the search orientation with `hi = lo + 1`.
    Straddle { lo: i64, hi: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketOutcome {
    pub bracket: Bracket,
    /// Every evaluation made, in order, with the raw (unoriented) sign.
    pub probes: Vec<(i64, Sign)>,
}

impl BracketOutcome {
    pub fn evaluations(&self) -> u64 {
        self.probes.len() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    pub root: i64,
    pub probes: Vec<(i64, Sign)>,
}

impl Bisection {
    pub fn evaluations(&self) -> u64 {
        self.probes.len() as u64
    }
}

/// Bisects `f` on `[lo, hi]` down to either a root or a pair of adjacent
/// indices with opposite nonzero signs.
///
/// The interval shrinks toward `[c, hi]` when `f(c) < 0` and toward
/// `[lo, c]` when `f(c) > 0`; a zero probe ends the search. Endpoints are
/// only evaluated when the interval has collapsed onto them, so the total
/// cost is at most `ceil(log2(hi - lo)) + 2` evaluations.
pub fn bracket_1d(
    mut f: impl FnMut(i64) -> Result<Sign>,
    lo: i64,
    hi: i64,
    orientation: Orientation,
    known: KnownEnds,
) -> Result<BracketOutcome> {
    if lo > hi {
        return Err(Error::Domain(format!("empty bisection range [{lo}, {hi}]")));
    }
    let mut probes = Vec::new();
    let mut probe = |i: i64, probes: &mut Vec<(i64, Sign)>| -> Result<Sign> {
        let s = f(i)?;
        probes.push((i, s));
        Ok(orientation.normalize(s))
    };
    let (lo0, hi0) = (lo, hi);
    let (mut lo, mut hi) = (lo, hi);
    let mut lo_sign = known.lo.map(|s| orientation.normalize(s));
    let mut hi_sign = known.hi.map(|s| orientation.normalize(s));
    let root = |index: i64, probes: Vec<(i64, Sign)>| {
        Ok(BracketOutcome {
            bracket: Bracket::Root { index },
            probes,
        })
    };
    if lo_sign == Some(Sign::Zero) {
        return root(lo, probes);
    }
    if hi_sign == Some(Sign::Zero) {
        return root(hi, probes);
    }

    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match probe(mid, &mut probes)? {
            Sign::Zero => return root(mid, probes),
            Sign::Neg => {
                lo = mid;
                lo_sign = Some(Sign::Neg);
            }
            Sign::Pos => {
                hi = mid;
                hi_sign = Some(Sign::Pos);
            }
        }
    }

    let lo_sign = match lo_sign {
        Some(s) => s,
        None => probe(lo, &mut probes)?,
    };
    match lo_sign {
        Sign::Zero => return root(lo, probes),
        Sign::Pos => {
            return Err(Error::Switching(format!(
                "f({lo0}) has the wrong sign for {orientation:?} switching on [{lo0}, {hi0}]"
            )))
        }
        Sign::Neg => {}
    }
    if hi == lo {
        return Err(Error::Switching(format!(
            "single-point range [{lo}, {hi}] holds no root"
        )));
    }
    let hi_sign = match hi_sign {
        Some(s) => s,
        None => probe(hi, &mut probes)?,
    };
    match hi_sign {
        Sign::Zero => root(hi, probes),
        Sign::Neg => Err(Error::Switching(format!(
            "f({hi0}) has the wrong sign for {orientation:?} switching on [{lo0}, {hi0}]"
        ))),
        Sign::Pos => Ok(BracketOutcome {
            bracket: Bracket::Straddle { lo, hi },
            probes,
        }),
    }
}

/// Finds a root of a δ-continuous switching sign function on `[lo, hi]`.
///
/// Deterministic: the probe sequence depends only on the values seen.
pub fn bisect_root_1d(
    f: impl FnMut(i64) -> Result<Sign>,
    lo: i64,
    hi: i64,
    orientation: Orientation,
) -> Result<Bisection> {
    bisect_with_ends(f, lo, hi, orientation, KnownEnds::default())
}

pub fn bisect_with_ends(
    f: impl FnMut(i64) -> Result<Sign>,
    lo: i64,
    hi: i64,
    orientation: Orientation,
    known: KnownEnds,
) -> Result<Bisection> {
    let out = bracket_1d(f, lo, hi, orientation, known)?;
    match out.bracket {
        Bracket::Root { index } => Ok(Bisection {
            root: index,
            probes: out.probes,
        }),
        Bracket::Straddle { lo, hi } => Err(Error::Continuity {
            a: vec![lo],
            b: vec![hi],
            detail: "adjacent indices carry opposite nonzero signs".into(),
        }),
    }
}

/// Bisection over a slice of sign values; convenient for tests and examples.
pub fn bisect_slice(values: &[Sign], orientation: Orientation) -> Result<Bisection> {
    if values.is_empty() {
        return Err(Error::Domain("empty sign sequence".into()));
    }
    bisect_root_1d(|i| Ok(values[i as usize]), 0, values.len() as i64 - 1, orientation)
}

/// Bisection along a restricted component of a field.
pub fn bisect_restriction<F: SignField + ?Sized>(
    r: &Restriction<'_, F>,
    orientation: Orientation,
) -> Result<Bisection> {
    let (lo, hi) = r.range();
    bisect_root_1d(|t| r.eval(t), lo, hi, orientation)
}

/// Root of component 0 of a one-dimensional field.
pub fn solve_field_1d<F: SignField + ?Sized>(field: &F, orientation: Orientation) -> Result<Bisection> {
    if field.dim() != 1 {
        return Err(Error::Domain(format!("expected a 1-dimensional field, got {}", field.dim())));
    }
    let (lo, hi) = field.bounds(0);
    bisect_root_1d(|t| Ok(field.eval(&[t])?[0]), lo, hi, orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SignVector;

    fn signs(v: &[i8]) -> Vec<Sign> {
        SignVector::from_i8(v).0
    }

    #[test]
    fn documented_trace() {
        let b = bisect_slice(&signs(&[-1, -1, -1, 0, 1, 1, 1, 1, 1]), Orientation::Positive).unwrap();
        assert_eq!(b.root, 3);
        let probed: Vec<i64> = b.probes.iter().map(|p| p.0).collect();
        assert_eq!(probed, vec![4, 2, 3]);
    }

    #[test]
    fn single_midpoint_probe() {
        let b = bisect_slice(&signs(&[-1, 0, 1]), Orientation::Positive).unwrap();
        assert_eq!((b.root, b.evaluations()), (1, 1));
    }

    #[test]
    fn zero_function_is_deterministic() {
        let z = signs(&[0; 17]);
        let a = bisect_slice(&z, Orientation::Positive).unwrap();
        let b = bisect_slice(&z, Orientation::Positive).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.root, 8);
    }

    #[test]
    fn negative_orientation_mirrors() {
        let b = bisect_slice(&signs(&[1, 1, 1, 1, 1, 0, -1, -1, -1]), Orientation::Negative).unwrap();
        assert_eq!(b.root, 5);
        assert!(bisect_slice(&signs(&[1, 1, 1, 1, 1, 0, -1, -1, -1]), Orientation::Positive).is_err());
    }

    #[test]
    fn endpoint_roots_are_found_lazily() {
        let b = bisect_slice(&signs(&[0, 1, 1, 1, 1]), Orientation::Positive).unwrap();
        assert_eq!(b.root, 0);
        let b = bisect_slice(&signs(&[-1, -1, -1, -1, 0]), Orientation::Positive).unwrap();
        assert_eq!(b.root, 4);
        assert!(b.evaluations() <= 4);
    }

    #[test]
    fn violations_are_classified() {
        let e = bisect_slice(&signs(&[1, 1, 1, 1, 1]), Orientation::Positive).unwrap_err();
        assert_eq!(e.kind(), "switching-violation");
        let e = bisect_slice(&signs(&[-1, -1, -1, -1, -1]), Orientation::Positive).unwrap_err();
        assert_eq!(e.kind(), "switching-violation");
        let e = bisect_slice(&signs(&[-1, -1, 1, 1, 1]), Orientation::Positive).unwrap_err();
        assert_eq!(e.kind(), "continuity-violation");
        let e = bisect_slice(&signs(&[1]), Orientation::Positive).unwrap_err();
        assert_eq!(e.kind(), "switching-violation");
        assert_eq!(bisect_slice(&signs(&[0]), Orientation::Positive).unwrap().root, 0);
    }

    #[test]
    fn known_ends_save_evaluations() {
        let v = signs(&[-1, -1, 0, 1, 1]);
        let mut calls = 0;
        let out = bracket_1d(
            |i| {
                calls += 1;
                Ok(v[i as usize])
            },
            0,
            4,
            Orientation::Positive,
            KnownEnds {
                lo: Some(Sign::Neg),
                hi: Some(Sign::Pos),
            },
        )
        .unwrap();
        assert_eq!(out.bracket, Bracket::Root { index: 2 });
        assert_eq!(calls, 1);
    }

    #[test]
    fn straddle_is_reported_not_raised() {
        let v = signs(&[-1, -1, -1, 1, 1]);
        let out = bracket_1d(|i| Ok(v[i as usize]), 0, 4, Orientation::Positive, KnownEnds::default()).unwrap();
        assert_eq!(out.bracket, Bracket::Straddle { lo: 2, hi: 3 });
    }
}
