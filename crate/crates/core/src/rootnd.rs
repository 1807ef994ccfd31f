//! d-dimensional root finding when every `f_i` is weakly decreasing in every
//! `x_j`, `j != i`.
//!
//! Two routes are provided. [`tarski_map`] turns the field into the lattice
//! map `p -> p - f(p)` whose fixed points are exactly the roots, and
//! [`check_lattice_claims`] verifies on a concrete grid that it is
//! order-preserving and stays inside the grid. [`find_root_recursive`]
//! finds a root directly with `O(log^d N)` evaluations by bisecting the last
//! axis and solving a `(d-1)`-dimensional section at each probe.

use serde::{Deserialize, Serialize};

use crate::bisection::{solve_field_1d, Orientation};
use crate::discretize::Table;
use crate::domain::{for_each_index, Counted, GridPoint, Section, Sign, SignField};
use crate::error::{Error, Result};
use crate::root2d::find_root_exdiag;

/// Lowest dimension handled without further recursion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseCase {
    /// Two-dimensional sections go to the ex-diagonal solver.
    #[default]
    Exdiag2d,
    /// Recurse all the way down to one-dimensional bisection.
    Bisection1d,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootNd {
    pub point: GridPoint,
    /// Probes of the last axis at the top level, with the sign of `f_d` at
    /// the lifted section root.
    pub outer_probes: Vec<(i64, Sign)>,
    pub evaluations: u64,
}

/// Root of a δ-continuous positive-switching field whose components are
/// weakly decreasing in every other variable.
pub fn find_root_recursive<F: SignField + ?Sized>(field: &F, base: BaseCase) -> Result<RootNd> {
    let d = field.dim();
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let c = Counted::new(field);
    let lower: Vec<i64> = (0..d).map(|j| c.bounds(j).0).collect();
    let upper: Vec<i64> = (0..d).map(|j| c.bounds(j).1).collect();
    let mut outer = Vec::new();
    let point = solve_box(&c, lower, upper, &[], base, Some(&mut outer))?;
    Ok(RootNd {
        point: GridPoint(point),
        outer_probes: outer,
        evaluations: c.count(),
    })
}

/// Solves the first `lower.len()` components on the box `[lower, upper]` with
/// the trailing coordinates pinned to `tail`; returns the free coordinates.
fn solve_box<F: SignField + ?Sized>(
    field: &F,
    lower: Vec<i64>,
    upper: Vec<i64>,
    tail: &[i64],
    base: BaseCase,
    mut trace: Option<&mut Vec<(i64, Sign)>>,
) -> Result<Vec<i64>> {
    let k = lower.len();
    if k == 1 || (k == 2 && base == BaseCase::Exdiag2d) {
        let section = Section::new(field, lower, upper, tail.to_vec());
        return if k == 1 {
            Ok(vec![solve_field_1d(&section, Orientation::Positive)?.root])
        } else {
            Ok(find_root_exdiag(&section)?.point.0)
        };
    }
    let (mut lo, mut hi) = (lower, upper);
    loop {
        if lo[k - 1] > hi[k - 1] {
            return Err(Error::Hypothesis(format!(
                "no root left in x_{} for the box {:?}..{:?}; monotonicity or switching fails",
                k,
                lo,
                hi
            )));
        }
        let mid = lo[k - 1] + (hi[k - 1] - lo[k - 1]) / 2;
        let mut sub_tail = Vec::with_capacity(tail.len() + 1);
        sub_tail.push(mid);
        sub_tail.extend_from_slice(tail);
        let y = solve_box(
            field,
            lo[..k - 1].to_vec(),
            hi[..k - 1].to_vec(),
            &sub_tail,
            base,
            None,
        )?;
        let mut full = y.clone();
        full.extend_from_slice(&sub_tail);
        let s = field.eval(&full)?[k - 1];
        if let Some(t) = trace.as_deref_mut() {
            t.push((mid, s));
        }
        match s {
            Sign::Zero => {
                let mut out = y;
                out.push(mid);
                return Ok(out);
            }
            // f_k < 0 on the whole face x_k = mid above y, so roots lie in [y, hi] past mid
            Sign::Neg => {
                lo[..k - 1].copy_from_slice(&y);
                lo[k - 1] = mid + 1;
            }
            Sign::Pos => {
                hi[..k - 1].copy_from_slice(&y);
                hi[k - 1] = mid - 1;
            }
        }
    }
}

/// The lattice map `p -> p - f(p)` on grid indices.
pub struct LatticeMap<'f, F: SignField + ?Sized> {
    field: &'f F,
}

pub fn tarski_map<F: SignField + ?Sized>(field: &F) -> LatticeMap<'_, F> {
    LatticeMap { field }
}

impl<F: SignField + ?Sized> LatticeMap<'_, F> {
    pub fn field(&self) -> &F {
        self.field
    }

    /// One field evaluation.
    pub fn apply(&self, p: &[i64]) -> Result<Vec<i64>> {
        let v = self.field.eval(p)?;
        Ok(p.iter().zip(&v.0).map(|(&x, s)| x - s.as_i8() as i64).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub points_checked: u64,
    pub pairs_checked: u64,
    /// Adjacent pairs `p <= q` (differing by one in one axis) with
    /// `h(p) <= h(q)` failing in some component.
    pub order_violations: Vec<(Vec<i64>, Vec<i64>)>,
    /// Points whose image leaves the grid.
    pub escapes: Vec<Vec<i64>>,
    /// Points where `h(p) = p`.
    pub fixed_points: Vec<Vec<i64>>,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.order_violations.is_empty() && self.escapes.is_empty()
    }
}

/// Exhaustively checks that the lattice map is order-preserving on every
/// adjacent pair and maps the grid into itself. Refuses grids above `cap`.
pub fn check_lattice_claims<F: SignField + ?Sized>(m: &LatticeMap<'_, F>, cap: u128) -> Result<LatticeReport> {
    let field = m.field;
    let points = field.point_count();
    if points > cap {
        return Err(Error::CapExceeded { points, cap });
    }
    let d = field.dim();
    let table = Table::build(field)?;
    let image = |p: &[i64]| -> Vec<i64> {
        p.iter().zip(table.get(p)).map(|(&x, &s)| x - s as i64).collect()
    };
    let mut report = LatticeReport::default();
    for_each_index(field, |p| {
        report.points_checked += 1;
        let hp = image(p);
        if !field.in_bounds(&hp) {
            report.escapes.push(p.to_vec());
        }
        if hp == p {
            report.fixed_points.push(p.to_vec());
        }
        for j in 0..d {
            let mut q = p.to_vec();
            q[j] += 1;
            if !field.in_bounds(&q) {
                continue;
            }
            report.pairs_checked += 1;
            let hq = image(&q);
            if hp.iter().zip(&hq).any(|(a, b)| a > b) {
                report.order_violations.push((p.to_vec(), q));
            }
        }
        Ok(())
    })?;
    Ok(report)
}

/// A fixed point of the lattice map, found as a root of the underlying
/// field with the recursive solver.
pub fn find_tarski_fixed_point<F: SignField + ?Sized>(m: &LatticeMap<'_, F>, base: BaseCase) -> Result<GridPoint> {
    let root = find_root_recursive(m.field, base)?;
    let image = m.apply(&root.point.0)?;
    if image != root.point.0 {
        return Err(Error::Hypothesis(format!(
            "solver returned {:?}, which maps to {image:?}",
            root.point.0
        )));
    }
    Ok(root.point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{enumerate_roots, GridSpec, SignOracle, SignVector, DEFAULT_SCAN_CAP};
    use crate::dyadic::Dyadic;

    fn midpoint(d: usize, k: i32) -> SignOracle<'static> {
        let g = GridSpec::unit(d, Dyadic::pow2(-k)).unwrap();
        let h = 1i64 << (k - 1);
        SignOracle::new(g, move |i: &[i64]| SignVector(i.iter().map(|&x| Sign::of_i8((x - h).signum() as i8)).collect()))
    }

    #[test]
    fn midpoint_in_three_dimensions() {
        let o = midpoint(3, 3);
        for base in [BaseCase::Exdiag2d, BaseCase::Bisection1d] {
            let r = find_root_recursive(&o, base).unwrap();
            assert_eq!(r.point, GridPoint(vec![4, 4, 4]));
        }
        assert_eq!(enumerate_roots(&o, DEFAULT_SCAN_CAP).unwrap(), vec![GridPoint(vec![4, 4, 4])]);
    }

    #[test]
    fn zero_field_any_dimension() {
        for d in 1..=4 {
            let g = GridSpec::unit(d, Dyadic::pow2(-2)).unwrap();
            let o = SignOracle::new(g, move |_: &[i64]| SignVector::zeros(d));
            let r = find_root_recursive(&o, BaseCase::Exdiag2d).unwrap();
            assert!(o.eval(&r.point.0).unwrap().is_zero());
        }
    }

    #[test]
    fn coupled_instance() {
        // v_i = 4 x_i - (sum of the others) - 8 changes by at most 6 between
        // neighbours, so a zero band of half-width 3 keeps it δ-continuous
        let g = GridSpec::unit(3, Dyadic::pow2(-4)).unwrap();
        let o = SignOracle::new(g, |i: &[i64]| {
            let s: i64 = i.iter().sum();
            SignVector(
                i.iter()
                    .map(|&x| Sign::threshold((4 * x - (s - x) - 8) as f64, 3.0))
                    .collect(),
            )
        });
        let roots = enumerate_roots(&o, DEFAULT_SCAN_CAP).unwrap();
        let r = find_root_recursive(&o, BaseCase::Bisection1d).unwrap();
        assert!(roots.contains(&r.point));
    }

    #[test]
    fn lattice_map_formula() {
        let g = GridSpec::unit(3, Dyadic::pow2(-3)).unwrap();
        let o = SignOracle::new(g, |_: &[i64]| SignVector::from_i8(&[-1, 1, 0]));
        assert_eq!(tarski_map(&o).apply(&[3, 3, 3]).unwrap(), vec![4, 2, 3]);
        let z = midpoint(2, 2);
        let m = tarski_map(&z);
        let report = check_lattice_claims(&m, DEFAULT_SCAN_CAP).unwrap();
        assert!(report.passed());
        assert_eq!(report.fixed_points, vec![vec![2, 2]]);
        assert_eq!(find_tarski_fixed_point(&m, BaseCase::Exdiag2d).unwrap(), GridPoint(vec![2, 2]));
    }

    #[test]
    fn lattice_order_violation_is_reported() {
        let g = GridSpec::unit(2, Dyadic::pow2(-2)).unwrap();
        // f_1 increasing in x_2
        let o = SignOracle::new(g, |i: &[i64]| SignVector::from_i8(&[if i[1] >= 2 { 1 } else { 0 }, 0]));
        let r = check_lattice_claims(&tarski_map(&o), DEFAULT_SCAN_CAP).unwrap();
        assert!(!r.passed());
        assert!(r.order_violations.contains(&(vec![0, 1], vec![0, 2])));
    }

    #[test]
    fn empty_range_is_a_hypothesis_violation() {
        let g = GridSpec::unit(3, Dyadic::pow2(-2)).unwrap();
        let o = SignOracle::new(g, |i: &[i64]| SignVector::from_i8(&[(i[0] - 2).signum() as i8, (i[1] - 2).signum() as i8, -1]));
        let e = find_root_recursive(&o, BaseCase::Exdiag2d).unwrap_err();
        assert!(e.is_hypothesis_violation());
    }
}
