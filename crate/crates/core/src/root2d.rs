//! Two-dimensional root finding with `O(log^2 N)` evaluations.
//!
//! All three solvers nest two bisections. An inner bisection follows the
//! zero set of `f_1` along one axis (the function `g`); an outer bisection
//! runs over the other axis on `h`, the sign of `f_2` at that zero. When the
//! outer bisection ends between two adjacent lines instead of on a root, a
//! root lies on the zero path of `f_1` joining the two inner roots, and
//! [`zipper_search`] finds it with a binary search over the two lines.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bisection::{bisect_root_1d, bisect_with_ends, bracket_1d, Bracket, KnownEnds, Orientation};
use crate::discretize::pad_strict;
use crate::domain::{Counted, GridPoint, Sign, SignField, SignVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode2D {
    /// `f_1` increasing in `x_1`, positive-switching.
    Diag,
    /// `f_1` decreasing in `x_2`, positive-switching (padded to strict).
    Exdiag,
    /// `f_1` increasing in `x_1`, sum-switching.
    Sum,
}

impl Mode2D {
    pub const ALL: [Mode2D; 3] = [Mode2D::Diag, Mode2D::Exdiag, Mode2D::Sum];
}

impl fmt::Display for Mode2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode2D::Diag => "diag",
            Mode2D::Exdiag => "exdiag",
            Mode2D::Sum => "sum",
        })
    }
}

impl FromStr for Mode2D {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diag" => Ok(Mode2D::Diag),
            "exdiag" => Ok(Mode2D::Exdiag),
            "sum" => Ok(Mode2D::Sum),
            _ => Err(Error::Input(format!("unknown 2D mode {s:?} (diag, exdiag, sum)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    /// The outer bisection hit a root.
    Direct,
    /// Diagonal solvers: search along the `f_1` zero path.
    Zipper,
    /// Ex-diagonal: both inner roots genuine, search along the zero path.
    Case1,
    /// Ex-diagonal: left inner search clamped low; bisect the right column.
    Case2,
    /// Ex-diagonal: right inner search clamped high; bisect the left column.
    Case3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clamp {
    Lower,
    Upper,
}

/// One evaluation of the outer function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterProbe {
    /// Coordinate index of the outer axis.
    pub at: i64,
    /// Where the inner search for a zero of `f_1` ended.
    pub inner_root: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped: Option<Clamp>,
    /// Sign of `f_2` at the inner root.
    pub value: Sign,
    /// Inner probes as `(index, sign of f_1)`.
    pub inner_probes: Vec<(i64, Sign)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipperStep {
    pub column: i64,
    pub lower: SignVector,
    pub upper: SignVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root2DTrace {
    pub mode: Mode2D,
    pub outer_probes: Vec<OuterProbe>,
    pub terminal: Terminal,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zipper_steps: Vec<ZipperStep>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub segment_probes: Vec<(i64, Sign)>,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root2D {
    pub point: GridPoint,
    pub trace: Root2DTrace,
}

pub fn solve_2d<F: SignField + ?Sized>(field: &F, mode: Mode2D) -> Result<Root2D> {
    match mode {
        Mode2D::Diag => find_root_diag(field),
        Mode2D::Exdiag => find_root_exdiag(field),
        Mode2D::Sum => find_root_sum(field),
    }
}

fn require_2d<F: SignField + ?Sized>(field: &F) -> Result<()> {
    if field.dim() != 2 {
        return Err(Error::Domain(format!("expected a 2-dimensional field, got {}", field.dim())));
    }
    Ok(())
}

fn at(search_axis: usize, col: i64, line: i64) -> [i64; 2] {
    if search_axis == 0 {
        [col, line]
    } else {
        [line, col]
    }
}

/// Finds a root on the `f_1 = 0` path between two adjacent lines.
///
/// `neg` and `pos` are `(column, line)` pairs along `search_axis`, with lines
/// in `{line0, line0 + 1}` of `line_axis = 1 - search_axis`. The caller
/// guarantees `f_1 = 0` at both points, `f_2 = -1` at `neg` and `f_2 = +1` at
/// `pos`, and that on each column strictly between them at least one of the
/// two lines has `f_1 = 0` (monotonicity plus δ-continuity).
///
/// Each step evaluates both lines at the middle column. If `f_2` vanishes on
/// a zero of `f_1` the search ends; otherwise the zero row's `f_2` sign
/// replaces `neg` or `pos`. Lower line wins when both rows are zeros of
/// `f_1`.
pub fn zipper_search<F: SignField + ?Sized>(
    field: &F,
    search_axis: usize,
    line0: i64,
    mut neg: (i64, i64),
    mut pos: (i64, i64),
    steps: &mut Vec<ZipperStep>,
) -> Result<GridPoint> {
    require_2d(field)?;
    loop {
        if (neg.0 - pos.0).abs() <= 1 {
            // adjacent columns: only a hypothesis failure leaves the block rootless
            let (c0, c1) = (neg.0.min(pos.0), neg.0.max(pos.0));
            for col in c0..=c1 {
                for line in [line0, line0 + 1] {
                    if (col, line) == neg || (col, line) == pos {
                        continue;
                    }
                    let p = at(search_axis, col, line);
                    if field.eval(&p)?.is_zero() {
                        return Ok(GridPoint(p.to_vec()));
                    }
                }
            }
            return Err(Error::Continuity {
                a: at(search_axis, neg.0, neg.1).to_vec(),
                b: at(search_axis, pos.0, pos.1).to_vec(),
                detail: "f_2 changes from -1 to +1 between neighbouring zeros of f_1".into(),
            });
        }
        let m = neg.0 + (pos.0 - neg.0) / 2;
        let lower = field.eval(&at(search_axis, m, line0))?;
        let upper = field.eval(&at(search_axis, m, line0 + 1))?;
        steps.push(ZipperStep {
            column: m,
            lower: lower.clone(),
            upper: upper.clone(),
        });
        if lower.is_zero() {
            return Ok(GridPoint(at(search_axis, m, line0).to_vec()));
        }
        if upper.is_zero() {
            return Ok(GridPoint(at(search_axis, m, line0 + 1).to_vec()));
        }
        let (line, v) = if lower[0].is_zero() {
            (line0, &lower)
        } else if upper[0].is_zero() {
            (line0 + 1, &upper)
        } else if lower[0] != upper[0] {
            return Err(Error::Continuity {
                a: at(search_axis, m, line0).to_vec(),
                b: at(search_axis, m, line0 + 1).to_vec(),
                detail: "f_1 changes from -1 to +1 between neighbouring points".into(),
            });
        } else {
            return Err(Error::Hypothesis(format!(
                "f_1 has no zero on column {m} between the two path ends; f_1 is not monotone"
            )));
        };
        match v[1] {
            Sign::Neg => neg = (m, line),
            Sign::Pos => pos = (m, line),
            Sign::Zero => unreachable!("zero vectors return above"),
        }
    }
}

fn tag_switching(e: Error, context: impl FnOnce() -> String) -> Error {
    match e {
        Error::Switching(m) => Error::Switching(format!("{}: {m}", context())),
        other => other,
    }
}

/// Inner search of the diagonal solvers: the root of `f_1` along row `x2`.
fn diag_inner<F: SignField + ?Sized>(field: &F, x2: i64) -> Result<OuterProbeFull> {
    let (lo1, hi1) = field.bounds(0);
    let mut seen: HashMap<i64, SignVector> = HashMap::new();
    let b = bisect_root_1d(
        |t| {
            let v = field.eval(&[t, x2])?;
            let s = v[0];
            seen.insert(t, v);
            Ok(s)
        },
        lo1,
        hi1,
        Orientation::Positive,
    )
    .map_err(|e| tag_switching(e, || format!("f_1 along x_2 = {x2} is not positive-switching")))?;
    let v = seen.remove(&b.root).expect("roots are evaluated");
    Ok(OuterProbeFull {
        probe: OuterProbe {
            at: x2,
            inner_root: b.root,
            clamped: None,
            value: v[1],
            inner_probes: b.probes,
        },
        vector: v,
    })
}

struct OuterProbeFull {
    probe: OuterProbe,
    vector: SignVector,
}

fn diag_core<F: SignField + ?Sized>(field: &F, mode: Mode2D) -> Result<Root2D> {
    require_2d(field)?;
    let c = Counted::new(field);
    let (lo2, hi2) = c.bounds(1);
    let mut probes: Vec<OuterProbeFull> = Vec::new();
    let outer = bracket_1d(
        |x2| {
            let p = diag_inner(&c, x2)?;
            let s = p.probe.value;
            probes.push(p);
            Ok(s)
        },
        lo2,
        hi2,
        Orientation::Positive,
        KnownEnds::default(),
    )
    .map_err(|e| {
        tag_switching(e, || match mode {
            Mode2D::Sum => "f_2 at the zero of f_1 breaks sum-switching".into(),
            _ => "f_2 is not positive-switching".into(),
        })
    })?;
    let find = |x2: i64| probes.iter().rev().find(|p| p.probe.at == x2).expect("probed");
    let mut zipper_steps = Vec::new();
    let (point, terminal) = match outer.bracket {
        Bracket::Root { index } => (GridPoint(vec![find(index).probe.inner_root, index]), Terminal::Direct),
        Bracket::Straddle { lo, hi } => {
            let (y1, z1) = (find(lo).probe.inner_root, find(hi).probe.inner_root);
            let p = zipper_search(&c, 0, lo, (y1, lo), (z1, hi), &mut zipper_steps)?;
            (p, Terminal::Zipper)
        }
    };
    Ok(Root2D {
        point,
        trace: Root2DTrace {
            mode,
            outer_probes: probes.into_iter().map(|p| p.probe).collect(),
            terminal,
            zipper_steps,
            segment_probes: Vec::new(),
            evaluations: c.count(),
        },
    })
}

/// Root of a δ-continuous positive-switching field with `f_1` weakly
/// increasing in `x_1`.
pub fn find_root_diag<F: SignField + ?Sized>(field: &F) -> Result<Root2D> {
    diag_core(field, Mode2D::Diag)
}

/// Root of a δ-continuous sum-switching field with `f_1` weakly increasing
/// in `x_1`. On the top row `f_1 = 0` at the inner root, so sum-switching
/// forces `f_2 >= 0` there, which is all the outer bisection needs.
pub fn find_root_sum<F: SignField + ?Sized>(field: &F) -> Result<Root2D> {
    diag_core(field, Mode2D::Sum)
}

/// Inner search of the ex-diagonal solver along column `x1`: a zero of the
/// decreasing function `f_1(x1, .)`, or a clamp to the bottom (`f_1 < 0`
/// everywhere) or top (`f_1 > 0` everywhere).
fn exdiag_inner<F: SignField + ?Sized>(field: &F, x1: i64) -> Result<OuterProbeFull> {
    let (lo2, hi2) = field.bounds(1);
    let mut probes = Vec::new();
    let bottom = field.eval(&[x1, lo2])?;
    probes.push((lo2, bottom[0]));
    let clamp = |root, clamped, vector: SignVector, probes| OuterProbeFull {
        probe: OuterProbe {
            at: x1,
            inner_root: root,
            clamped: Some(clamped),
            value: vector[1],
            inner_probes: probes,
        },
        vector,
    };
    if bottom[0] == Sign::Neg {
        return Ok(clamp(lo2, Clamp::Lower, bottom, probes));
    }
    let top = field.eval(&[x1, hi2])?;
    probes.push((hi2, top[0]));
    if top[0] == Sign::Pos {
        return Ok(clamp(hi2, Clamp::Upper, top, probes));
    }
    let mut seen: HashMap<i64, SignVector> = HashMap::new();
    // a zero endpoint is not taken as the answer: the search continues into
    // the interior, where f_2 may already have switched sign
    let known = KnownEnds {
        lo: Some(bottom[0]).filter(|s| !s.is_zero()),
        hi: Some(top[0]).filter(|s| !s.is_zero()),
    };
    seen.insert(lo2, bottom);
    seen.insert(hi2, top);
    let b = bisect_with_ends(
        |t| {
            let v = field.eval(&[x1, t])?;
            let s = v[0];
            seen.insert(t, v);
            Ok(s)
        },
        lo2,
        hi2,
        Orientation::Negative,
        known,
    )?;
    probes.extend(b.probes);
    let v = seen.remove(&b.root).expect("roots are evaluated");
    Ok(OuterProbeFull {
        probe: OuterProbe {
            at: x1,
            inner_root: b.root,
            clamped: None,
            value: v[1],
            inner_probes: probes,
        },
        vector: v,
    })
}

/// Root of a δ-continuous positive-switching field with `f_1` weakly
/// decreasing in `x_2`. The field is padded by one layer so that switching
/// is strict; the returned point always lies in the original box.
pub fn find_root_exdiag<F: SignField + ?Sized>(field: &F) -> Result<Root2D> {
    require_2d(field)?;
    let padded = pad_strict(field);
    let c = Counted::new(&padded);
    let (lo1, hi1) = c.bounds(0);
    let (lo2, hi2) = c.bounds(1);
    let mut probes: Vec<OuterProbeFull> = Vec::new();
    let outer = bracket_1d(
        |x1| {
            let p = exdiag_inner(&c, x1)?;
            let s = p.probe.value;
            probes.push(p);
            Ok(s)
        },
        lo1,
        hi1,
        Orientation::Positive,
        KnownEnds::default(),
    )
    .map_err(|e| tag_switching(e, || "f_2 at the zero of f_1 is not positive-switching".into()))?;
    let find = |x1: i64| probes.iter().rev().find(|p| p.probe.at == x1).expect("probed");
    let mut zipper_steps = Vec::new();
    let mut segment_probes = Vec::new();
    let (point, terminal) = match outer.bracket {
        Bracket::Root { index } => (GridPoint(vec![index, find(index).probe.inner_root]), Terminal::Direct),
        Bracket::Straddle { lo: y1, hi } => {
            let (left, right) = (find(y1), find(hi));
            let (y2, z2) = (left.probe.inner_root, right.probe.inner_root);
            match (left.vector[0].is_zero(), right.vector[0].is_zero()) {
                (true, true) => {
                    let p = zipper_search(&c, 1, y1, (y2, y1), (z2, hi), &mut zipper_steps)?;
                    (p, Terminal::Case1)
                }
                (false, true) => {
                    let b = bisect_with_ends(
                        |t| Ok(c.eval(&[hi, t])?[1]),
                        lo2,
                        z2,
                        Orientation::Positive,
                        KnownEnds {
                            lo: None,
                            hi: Some(right.vector[1]),
                        },
                    )?;
                    segment_probes = b.probes;
                    (GridPoint(vec![hi, b.root]), Terminal::Case2)
                }
                (true, false) => {
                    let b = bisect_with_ends(
                        |t| Ok(c.eval(&[y1, t])?[1]),
                        y2,
                        hi2,
                        Orientation::Positive,
                        KnownEnds {
                            lo: Some(left.vector[1]),
                            hi: None,
                        },
                    )?;
                    segment_probes = b.probes;
                    (GridPoint(vec![y1, b.root]), Terminal::Case3)
                }
                (false, false) => {
                    return Err(Error::Continuity {
                        a: vec![y1, y2],
                        b: vec![hi, z2],
                        detail: "f_1 is negative on one column and positive on the next".into(),
                    })
                }
            }
        }
    };
    if !field.in_bounds(&point.0) {
        return Err(Error::Hypothesis(format!(
            "root {:?} fell on the padding layer",
            point.0
        )));
    }
    Ok(Root2D {
        point,
        trace: Root2DTrace {
            mode: Mode2D::Exdiag,
            outer_probes: probes.into_iter().map(|p| p.probe).collect(),
            terminal,
            zipper_steps,
            segment_probes,
            evaluations: c.count(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{enumerate_roots, GridSpec, SignOracle, DEFAULT_SCAN_CAP};
    use crate::dyadic::Dyadic;

    fn grid(k: i32) -> GridSpec {
        GridSpec::unit(2, Dyadic::pow2(-k)).unwrap()
    }

    fn sgn(v: i64) -> i8 {
        v.signum() as i8
    }

    fn assert_root<F: SignField>(f: &F, r: &Root2D) {
        assert!(f.eval(&r.point.0).unwrap().is_zero(), "{:?} is not a root", r.point);
    }

    #[test]
    fn midpoint_instance() {
        let o = SignOracle::new(grid(3), |i: &[i64]| SignVector::from_i8(&[sgn(i[0] - 4), sgn(i[1] - 4)]));
        for mode in Mode2D::ALL {
            let r = solve_2d(&o, mode).unwrap();
            assert_eq!(r.point, GridPoint(vec![4, 4]), "{mode}");
        }
    }

    #[test]
    fn zero_field() {
        let o = SignOracle::new(grid(3), |_: &[i64]| SignVector::zeros(2));
        for mode in Mode2D::ALL {
            let r = solve_2d(&o, mode).unwrap();
            assert_root(&o, &r);
        }
    }

    #[test]
    fn rotated_diag_instance() {
        let o = SignOracle::new(grid(4), |i: &[i64]| {
            SignVector::from_i8(&[sgn(i[0] + i[1] - 16), sgn(i[1] - i[0])])
        });
        assert_eq!(enumerate_roots(&o, DEFAULT_SCAN_CAP).unwrap(), vec![GridPoint(vec![8, 8])]);
        let before = o.evaluations();
        let r = find_root_diag(&o).unwrap();
        assert_eq!(r.point, GridPoint(vec![8, 8]));
        assert_eq!(r.trace.evaluations, o.evaluations() - before);
    }

    #[test]
    fn exdiag_rotated_instance() {
        let o = SignOracle::new(grid(4), |i: &[i64]| {
            SignVector::from_i8(&[sgn(i[0] - i[1]), sgn(i[0] + i[1] - 16)])
        });
        let r = find_root_exdiag(&o).unwrap();
        assert_eq!(r.point, GridPoint(vec![8, 8]));
    }

    #[test]
    fn exdiag_case_two() {
        // f_1 < 0 on columns 0..=4, zero from column 5 on; f_2 switches in x_2
        let o = SignOracle::new(grid(3), |i: &[i64]| {
            SignVector::from_i8(&[if i[0] <= 4 { -1 } else { 0 }, sgn(i[1] - 3)])
        });
        let r = find_root_exdiag(&o).unwrap();
        assert_root(&o, &r);
        assert_eq!(r.trace.terminal, Terminal::Case2);
        assert_eq!(r.point, GridPoint(vec![5, 3]));
    }

    #[test]
    fn exdiag_case_three() {
        let o = SignOracle::new(grid(3), |i: &[i64]| {
            SignVector::from_i8(&[if i[0] >= 4 { 1 } else { 0 }, sgn(i[1] - 6)])
        });
        let r = find_root_exdiag(&o).unwrap();
        assert_root(&o, &r);
        assert_eq!(r.trace.terminal, Terminal::Case3);
    }

    #[test]
    fn sum_switching_top_face() {
        // top row has f_1 = +1, f_2 = -1; positive switching fails for f_2 there
        let o = SignOracle::new(grid(3), |i: &[i64]| {
            if i[1] == 8 && i[0] > 4 {
                SignVector::from_i8(&[1, -1])
            } else {
                SignVector::from_i8(&[sgn(i[0] - 4), sgn(i[1] - 4)])
            }
        });
        let r = find_root_sum(&o).unwrap();
        assert_root(&o, &r);
    }

    #[test]
    fn zipper_adjacent_columns() {
        let o = SignOracle::new(grid(2), |i: &[i64]| match (i[0], i[1]) {
            (1, 1) => SignVector::from_i8(&[0, -1]),
            (2, 2) => SignVector::from_i8(&[0, 1]),
            (1, 2) => SignVector::from_i8(&[0, 0]),
            _ => SignVector::from_i8(&[1, 1]),
        });
        let mut steps = Vec::new();
        let p = zipper_search(&o, 0, 1, (1, 1), (2, 2), &mut steps).unwrap();
        assert_eq!(p, GridPoint(vec![1, 2]));
    }

    #[test]
    fn staircase_path() {
        // f_1 zero set is a staircase x_1 in [2 x_2, 2 x_2 + 2] clipped to the grid
        let o = SignOracle::new(grid(5), |i: &[i64]| {
            let (x, y) = (i[0], i[1]);
            let f1 = if x < y { -1 } else if x > y + 3 { 1 } else { 0 };
            let f2 = sgn(x - 21);
            SignVector::from_i8(&[f1, f2])
        });
        let roots = enumerate_roots(&o, DEFAULT_SCAN_CAP).unwrap();
        let r = find_root_diag(&o).unwrap();
        assert!(roots.contains(&r.point));
    }

    #[test]
    fn violations_are_structured() {
        let o = SignOracle::new(grid(3), |_: &[i64]| SignVector::from_i8(&[1, 1]));
        assert_eq!(find_root_diag(&o).unwrap_err().kind(), "switching-violation");
        let o = SignOracle::new(grid(3), |i: &[i64]| SignVector::from_i8(&[sgn(i[0] - 4), -1]));
        assert_eq!(find_root_diag(&o).unwrap_err().kind(), "switching-violation");
    }

    #[test]
    fn trace_serializes() {
        let o = SignOracle::new(grid(3), |i: &[i64]| SignVector::from_i8(&[sgn(i[0] - 3), sgn(i[1] - 5)]));
        let r = find_root_exdiag(&o).unwrap();
        let json = serde_json::to_value(&r.trace).unwrap();
        assert_eq!(json["mode"], "exdiag");
        assert!(json["evaluations"].as_u64().unwrap() > 0);
    }
}
