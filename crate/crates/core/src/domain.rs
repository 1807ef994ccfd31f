//! Boxes, grids, sign vectors and counted evaluation oracles.
//!
//! Every solver in the crate consumes a [`SignField`]: a finite box of
//! integer grid indices and a map from indices to sign vectors. A
//! [`SignOracle`] is the counted, user-facing field; views such as
//! [`Section`] restrict it without touching the counter semantics (each
//! view evaluation is exactly one oracle evaluation).

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Default point budget for exhaustive scans.
pub const DEFAULT_SCAN_CAP: u128 = 1 << 24;

/// An axis-aligned box `[lower, upper]` with `lower < upper` componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<Dyadic>,
    upper: Vec<Dyadic>,
}

impl BoxDomain {
    pub fn new(lower: Vec<Dyadic>, upper: Vec<Dyadic>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Domain(format!(
                "box corners have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..lower.len()).find(|&j| lower[j] >= upper[j]) {
            return Err(Error::Domain(format!(
                "box is degenerate along axis {j}: {} >= {}",
                lower[j], upper[j]
            )));
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `[0,1]^d`.
    pub fn unit(dim: usize) -> Self {
        BoxDomain {
            lower: vec![Dyadic::ZERO; dim],
            upper: vec![Dyadic::ONE; dim],
        }
    }

    /// `[lo,hi]^d`.
    pub fn cube(dim: usize, lo: Dyadic, hi: Dyadic) -> Result<Self> {
        BoxDomain::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Dyadic] {
        &self.lower
    }

    pub fn upper(&self) -> &[Dyadic] {
        &self.upper
    }

    pub fn side(&self, axis: usize) -> Dyadic {
        self.upper[axis] - self.lower[axis]
    }
}

/// A box cut into cubes of side `delta`, with a power-of-two number of
/// cells along every axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    domain: BoxDomain,
    delta: Dyadic,
    cells: Vec<u64>,
}

impl GridSpec {
    pub fn new(domain: BoxDomain, delta: Dyadic) -> Result<Self> {
        if !delta.is_positive() || !delta.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid spacing must be a positive power of two, got {delta}"
            )));
        }
        let mut cells = Vec::with_capacity(domain.dim());
        for j in 0..domain.dim() {
            let side = domain.side(j);
            let n = side.div_exact(delta).filter(|&n| n >= 1).ok_or_else(|| {
                Error::Domain(format!("spacing {delta} does not divide side {side} of axis {j}"))
            })?;
            if !(n as u64).is_power_of_two() {
                return Err(Error::Domain(format!(
                    "axis {j} has {n} cells, which is not a power of two"
                )));
            }
            cells.push(n as u64);
        }
        Ok(GridSpec {
            domain,
            delta,
            cells,
        })
    }

    /// `[0,1]^d` with spacing `delta`.
    pub fn unit(dim: usize, delta: Dyadic) -> Result<Self> {
        GridSpec::new(BoxDomain::unit(dim), delta)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn delta(&self) -> Dyadic {
        self.delta
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    /// Number of grid points, `prod (N_j + 1)`.
    pub fn point_count(&self) -> u128 {
        self.cells.iter().map(|&n| n as u128 + 1).product()
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        p.dim() == self.dim()
            && p.0
                .iter()
                .zip(&self.cells)
                .all(|(&i, &n)| i >= 0 && i as u64 <= n)
    }

    /// Exact coordinates `a_j + index_j · delta`.
    pub fn to_coords(&self, p: &GridPoint) -> Result<Vec<Dyadic>> {
        if !self.contains(p) {
            return Err(Error::Domain(format!(
                "index {:?} outside grid with cells {:?}",
                p.0, self.cells
            )));
        }
        Ok(self.coords_unchecked(&p.0))
    }

    /// Coordinates for any index vector, including indices just outside the
    /// grid (used by padded views).
    pub fn coords_unchecked(&self, index: &[i64]) -> Vec<Dyadic> {
        index
            .iter()
            .zip(self.domain.lower())
            .map(|(&i, &a)| a + self.delta.mul_int(i))
            .collect()
    }

    pub fn coords_f64(&self, index: &[i64]) -> Vec<f64> {
        self.coords_unchecked(index)
            .into_iter()
            .map(Dyadic::to_f64)
            .collect()
    }

    /// Grid over `[0,1]^d` with at least `min_cells` cells per axis, plus the
    /// affine map from those unit coordinates back to the user box
    /// `[lower, upper]`. Used when the user box is not dyadic-aligned.
    pub fn normalized(lower: &[f64], upper: &[f64], min_cells: u64) -> Result<(Self, Rescale)> {
        let rescale = Rescale::new(lower, upper)?;
        let n = min_cells.max(1).next_power_of_two();
        let grid = GridSpec::unit(lower.len(), Dyadic::pow2(-(n.trailing_zeros() as i32)))?;
        Ok((grid, rescale))
    }
}

/// Affine map from `[0,1]^d` onto a user box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rescale {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Rescale {
    pub fn new(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Domain("box corners differ in length".into()));
        }
        if lower.iter().zip(upper).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Domain(format!("degenerate box {lower:?}..{upper:?}")));
        }
        Ok(Rescale {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        })
    }

    pub fn to_user(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (a, b))| a + t * (b - a))
            .collect()
    }

    /// Wraps a user-box oracle as an oracle on `[0,1]^d`.
    pub fn pull_back<'a>(&self, oracle: &'a RealOracle<'a>) -> RealOracle<'a> {
        let map = self.clone();
        RealOracle::new(oracle.dim(), move |t: &[f64]| {
            oracle.eval(&map.to_user(t)).unwrap_or_else(|_| vec![f64::NAN; t.len()])
        })
    }
}

/// Integer grid index; coordinates follow from a [`GridSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint(pub Vec<i64>);

impl GridPoint {
    pub fn new(index: Vec<i64>) -> Self {
        GridPoint(index)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn index(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for GridPoint {
    fn from(v: Vec<i64>) -> Self {
        GridPoint(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of_i8(v: i8) -> Self {
        match v.signum() {
            -1 => Sign::Neg,
            0 => Sign::Zero,
            _ => Sign::Pos,
        }
    }

    /// Three-way threshold: `-1` below `-eps`, `+1` above `eps`, else `0`.
    pub fn threshold(value: f64, eps: f64) -> Self {
        if value < -eps {
            Sign::Neg
        } else if value > eps {
            Sign::Pos
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn flip(self) -> Self {
        Sign::of_i8(-self.as_i8())
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            v @ -1..=1 => Ok(Sign::of_i8(v)),
            v => Err(serde::de::Error::custom(format!("sign out of range: {v}"))),
        }
    }
}

/// A vector over `{-1, 0, +1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn zeros(dim: usize) -> Self {
        SignVector(vec![Sign::Zero; dim])
    }

    pub fn from_i8(values: &[i8]) -> Self {
        SignVector(values.iter().copied().map(Sign::of_i8).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|s| s.is_zero())
    }

    pub fn as_i8(&self) -> Vec<i8> {
        self.0.iter().map(|s| s.as_i8()).collect()
    }
}

impl Index<usize> for SignVector {
    type Output = Sign;
    fn index(&self, i: usize) -> &Sign {
        &self.0[i]
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_i8())
    }
}

/// A finite box of integer indices with a sign vector at every index.
///
/// `bounds(axis)` is inclusive. `eval` must be deterministic.
pub trait SignField {
    fn dim(&self) -> usize;
    fn bounds(&self, axis: usize) -> (i64, i64);
    fn eval(&self, index: &[i64]) -> Result<SignVector>;

    fn in_bounds(&self, index: &[i64]) -> bool {
        index.len() == self.dim()
            && index.iter().enumerate().all(|(j, &i)| {
                let (lo, hi) = self.bounds(j);
                lo <= i && i <= hi
            })
    }

    fn point_count(&self) -> u128 {
        (0..self.dim())
            .map(|j| {
                let (lo, hi) = self.bounds(j);
                (hi - lo + 1).max(0) as u128
            })
            .product()
    }
}

impl<F: SignField + ?Sized> SignField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn bounds(&self, axis: usize) -> (i64, i64) {
        (**self).bounds(axis)
    }
    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        (**self).eval(index)
    }
}

type RealFn<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;
type SignFn<'a> = Box<dyn Fn(&[i64]) -> Result<SignVector> + 'a>;

/// Counted oracle for a map `R^d -> R^d`. Each call to [`RealOracle::eval`]
/// is one unit-cost query.
pub struct RealOracle<'a> {
    dim: usize,
    evaluator: RealFn<'a>,
    count: Cell<u64>,
}

impl<'a> RealOracle<'a> {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> Vec<f64> + 'a) -> Self {
        RealOracle {
            dim,
            evaluator: Box::new(f),
            count: Cell::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!(
                "expected a point of dimension {}, got {}",
                self.dim,
                x.len()
            )));
        }
        self.count.set(self.count.get() + 1);
        let y = (self.evaluator)(x);
        if y.len() != self.dim {
            return Err(Error::Evaluation {
                point: x.to_vec(),
                reason: format!("evaluator returned {} components", y.len()),
            });
        }
        Ok(y)
    }

    pub fn evaluations(&self) -> u64 {
        self.count.get()
    }

    pub fn reset_count(&self) {
        self.count.set(0);
    }
}

impl fmt::Debug for RealOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealOracle")
            .field("dim", &self.dim)
            .field("evaluations", &self.count.get())
            .finish()
    }
}

/// Counted oracle mapping grid points to sign vectors.
///
/// The counter records evaluator invocations. With [`SignOracle::memoized`]
/// repeated queries are served from a cache and only misses are counted;
/// memoization is off by default so counts match the one-query-per-call
/// model.
pub struct SignOracle<'a> {
    grid: GridSpec,
    evaluator: SignFn<'a>,
    count: Cell<u64>,
    memo: Option<RefCell<HashMap<Vec<i64>, SignVector>>>,
}

impl<'a> SignOracle<'a> {
    pub fn new(grid: GridSpec, f: impl Fn(&[i64]) -> SignVector + 'a) -> Self {
        Self::fallible(grid, move |i: &[i64]| Ok(f(i)))
    }

    pub fn fallible(grid: GridSpec, f: impl Fn(&[i64]) -> Result<SignVector> + 'a) -> Self {
        SignOracle {
            grid,
            evaluator: Box::new(f),
            count: Cell::new(0),
            memo: None,
        }
    }

    pub fn memoized(mut self) -> Self {
        self.memo = Some(RefCell::new(HashMap::new()));
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn evaluations(&self) -> u64 {
        self.count.get()
    }

    pub fn reset_count(&self) {
        self.count.set(0);
    }

    pub fn eval_point(&self, p: &GridPoint) -> Result<SignVector> {
        self.eval(&p.0)
    }

    fn invoke(&self, index: &[i64]) -> Result<SignVector> {
        self.count.set(self.count.get() + 1);
        let v = (self.evaluator)(index)?;
        if v.dim() != self.grid.dim() {
            return Err(Error::Evaluation {
                point: self.grid.coords_f64(index),
                reason: format!("sign evaluator returned {} components", v.dim()),
            });
        }
        Ok(v)
    }
}

impl SignField for SignOracle<'_> {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn bounds(&self, axis: usize) -> (i64, i64) {
        (0, self.grid.cells[axis] as i64)
    }

    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        if !self.in_bounds(index) {
            return Err(Error::Domain(format!(
                "index {index:?} outside grid with cells {:?}",
                self.grid.cells
            )));
        }
        match &self.memo {
            None => self.invoke(index),
            Some(memo) => {
                if let Some(v) = memo.borrow().get(index) {
                    return Ok(v.clone());
                }
                let v = self.invoke(index)?;
                memo.borrow_mut().insert(index.to_vec(), v.clone());
                Ok(v)
            }
        }
    }
}

impl fmt::Debug for SignOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignOracle")
            .field("cells", &self.grid.cells)
            .field("evaluations", &self.count.get())
            .field("memoized", &self.memo.is_some())
            .finish()
    }
}

/// Counts evaluations passing through to an inner field.
pub(crate) struct Counted<F> {
    pub inner: F,
    count: Cell<u64>,
}

impl<F: SignField> Counted<F> {
    pub fn new(inner: F) -> Self {
        Counted {
            inner,
            count: Cell::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }
}

impl<F: SignField> SignField for Counted<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn bounds(&self, axis: usize) -> (i64, i64) {
        self.inner.bounds(axis)
    }
    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        self.count.set(self.count.get() + 1);
        self.inner.eval(index)
    }
}

/// A sub-box of a parent field with some trailing axes pinned.
///
/// The section has `free` axes (the parent's first `free` axes, with their
/// own bounds) and exposes only the first `free` sign components.
pub struct Section<'a, F: SignField + ?Sized> {
    parent: &'a F,
    lower: Vec<i64>,
    upper: Vec<i64>,
    tail: Vec<i64>,
}

impl<'a, F: SignField + ?Sized> Section<'a, F> {
    pub fn new(parent: &'a F, lower: Vec<i64>, upper: Vec<i64>, tail: Vec<i64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        debug_assert_eq!(lower.len() + tail.len(), parent.dim());
        Section {
            parent,
            lower,
            upper,
            tail,
        }
    }

    /// Full parent index for a section index.
    pub fn lift(&self, index: &[i64]) -> Vec<i64> {
        let mut full = Vec::with_capacity(index.len() + self.tail.len());
        full.extend_from_slice(index);
        full.extend_from_slice(&self.tail);
        full
    }
}

impl<F: SignField + ?Sized> SignField for Section<'_, F> {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn bounds(&self, axis: usize) -> (i64, i64) {
        (self.lower[axis], self.upper[axis])
    }

    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        let mut v = self.parent.eval(&self.lift(index))?;
        v.0.truncate(self.lower.len());
        Ok(v)
    }
}

/// `f_i` as a function of the single index `x_j`, all other indices fixed at
/// `base`. Each call is one evaluation of the underlying field.
pub struct Restriction<'a, F: SignField + ?Sized> {
    field: &'a F,
    component: usize,
    variable: usize,
    base: Vec<i64>,
}

impl<F: SignField + ?Sized> Restriction<'_, F> {
    pub fn range(&self) -> (i64, i64) {
        self.field.bounds(self.variable)
    }

    pub fn eval(&self, t: i64) -> Result<Sign> {
        let mut idx = self.base.clone();
        idx[self.variable] = t;
        Ok(self.field.eval(&idx)?[self.component])
    }
}

pub fn restrict_component<'a, F: SignField + ?Sized>(
    field: &'a F,
    component: usize,
    variable: usize,
    base: &GridPoint,
) -> Result<Restriction<'a, F>> {
    let d = field.dim();
    if component >= d || variable >= d {
        return Err(Error::Domain(format!(
            "component {component} / variable {variable} out of range for dimension {d}"
        )));
    }
    if !field.in_bounds(&base.0) {
        return Err(Error::Domain(format!("base point {:?} outside the field", base.0)));
    }
    Ok(Restriction {
        field,
        component,
        variable,
        base: base.0.clone(),
    })
}

/// Calls `visit` on every index of the field's box in lexicographic order.
pub fn for_each_index<F: SignField + ?Sized>(
    field: &F,
    mut visit: impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    let d = field.dim();
    let bounds: Vec<(i64, i64)> = (0..d).map(|j| field.bounds(j)).collect();
    if bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(());
    }
    let mut idx: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        visit(&idx)?;
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            if idx[axis] < bounds[axis].1 {
                idx[axis] += 1;
                break;
            }
            idx[axis] = bounds[axis].0;
        }
    }
}

/// Every grid point whose sign vector is all zero, in lexicographic order.
/// Refuses grids with more than `cap` points.
pub fn enumerate_roots<F: SignField + ?Sized>(field: &F, cap: u128) -> Result<Vec<GridPoint>> {
    let points = field.point_count();
    if points > cap {
        return Err(Error::CapExceeded { points, cap });
    }
    let mut roots = Vec::new();
    for_each_index(field, |idx| {
        if field.eval(idx)?.is_zero() {
            roots.push(GridPoint(idx.to_vec()));
        }
        Ok(())
    })?;
    Ok(roots)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

/// Which monotonicity conditions hold: entry `(i, j)` describes `f_i` as a
/// function of `x_j`. Diagonal entries are the diagonal conditions, the rest
/// are ex-diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneProfile {
    matrix: Vec<Vec<Monotonicity>>,
}

impl MonotoneProfile {
    pub fn empty(dim: usize) -> Self {
        MonotoneProfile {
            matrix: vec![vec![Monotonicity::None; dim]; dim],
        }
    }

    pub fn from_matrix(matrix: Vec<Vec<Monotonicity>>) -> Result<Self> {
        let d = matrix.len();
        if matrix.iter().any(|row| row.len() != d) {
            return Err(Error::Input("monotone profile must be square".into()));
        }
        Ok(MonotoneProfile { matrix })
    }

    /// All `d` diagonal conditions (increasing) and all `d^2 - d` ex-diagonal
    /// conditions (decreasing).
    pub fn canonical(dim: usize) -> Self {
        let mut p = Self::empty(dim);
        for i in 0..dim {
            for j in 0..dim {
                p.matrix[i][j] = if i == j {
                    Monotonicity::Increasing
                } else {
                    Monotonicity::Decreasing
                };
            }
        }
        p
    }

    /// Every `f_i` decreasing in every `x_j`, `j != i`; no diagonal conditions.
    pub fn ex_diagonal_decreasing(dim: usize) -> Self {
        let mut p = Self::canonical(dim);
        for i in 0..dim {
            p.matrix[i][i] = Monotonicity::None;
        }
        p
    }

    /// `f_i` increasing in `x_i` for all `i`, and `f_i` decreasing in `x_{i-1}`.
    pub fn alternating(dim: usize) -> Self {
        let mut p = Self::empty(dim);
        for i in 0..dim {
            p.matrix[i][i] = Monotonicity::Increasing;
            if i > 0 {
                p.matrix[i][i - 1] = Monotonicity::Decreasing;
            }
        }
        p
    }

    pub fn with(mut self, component: usize, variable: usize, m: Monotonicity) -> Self {
        self.matrix[component][variable] = m;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn get(&self, component: usize, variable: usize) -> Monotonicity {
        self.matrix[component][variable]
    }

    /// Declared `(component, variable, direction)` triples.
    pub fn conditions(&self) -> Vec<(usize, usize, Monotonicity)> {
        let mut out = Vec::new();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m != Monotonicity::None {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    pub fn diagonal_count(&self) -> usize {
        self.conditions().iter().filter(|c| c.0 == c.1).count()
    }

    pub fn ex_diagonal_count(&self) -> usize {
        self.conditions().iter().filter(|c| c.0 != c.1).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter_grid() -> GridSpec {
        GridSpec::unit(2, Dyadic::pow2(-2)).unwrap()
    }

    fn midpoint_field(grid: GridSpec) -> SignOracle<'static> {
        let half: Vec<i64> = grid.cells().iter().map(|&n| n as i64 / 2).collect();
        SignOracle::new(grid, move |i: &[i64]| {
            SignVector(i.iter().zip(&half).map(|(&x, &h)| Sign::of_i8((x - h).signum() as i8)).collect())
        })
    }

    #[test]
    fn to_coords_examples() {
        let g = quarter_grid();
        let c = |i: Vec<i64>| -> Vec<f64> {
            g.to_coords(&GridPoint(i)).unwrap().into_iter().map(Dyadic::to_f64).collect()
        };
        assert_eq!(c(vec![0, 0]), vec![0.0, 0.0]);
        assert_eq!(c(vec![4, 4]), vec![1.0, 1.0]);
        assert_eq!(c(vec![1, 3]), vec![0.25, 0.75]);
        assert!(g.to_coords(&GridPoint(vec![5, 0])).is_err());
        assert!(g.to_coords(&GridPoint(vec![0, -1])).is_err());
    }

    #[test]
    fn grid_rejects_non_dyadic_layouts() {
        let side3 = BoxDomain::new(vec![Dyadic::ZERO], vec![Dyadic::from_int(3)]).unwrap();
        assert!(GridSpec::new(side3, Dyadic::ONE).is_err());
        assert!(GridSpec::unit(1, Dyadic::new(3, -4)).is_err());
        assert!(BoxDomain::new(vec![Dyadic::ONE], vec![Dyadic::ONE]).is_err());
        let g = GridSpec::new(
            BoxDomain::cube(3, Dyadic::from_int(-1), Dyadic::ONE).unwrap(),
            Dyadic::pow2(-3),
        )
        .unwrap();
        assert_eq!(g.cells(), &[16, 16, 16]);
    }

    #[test]
    fn normalization_rescales_arbitrary_boxes() {
        let (g, r) = GridSpec::normalized(&[-3.0, 10.0], &[2.0, 11.0], 100).unwrap();
        assert_eq!(g.cells(), &[128, 128]);
        assert_eq!(r.to_user(&[0.0, 1.0]), vec![-3.0, 11.0]);
        assert_eq!(r.to_user(&[0.5, 0.5]), vec![-0.5, 10.5]);
    }

    #[test]
    fn restriction_examples() {
        let g = GridSpec::unit(2, Dyadic::pow2(-3)).unwrap();
        let o = midpoint_field(g);
        let r = restrict_component(&o, 0, 0, &GridPoint(vec![0, 0])).unwrap();
        let values: Vec<i8> = (0..=8).map(|t| r.eval(t).unwrap().as_i8()).collect();
        assert_eq!(values, vec![-1, -1, -1, -1, 0, 1, 1, 1, 1]);
        assert_eq!(o.evaluations(), 9);

        let r = restrict_component(&o, 0, 1, &GridPoint(vec![6, 0])).unwrap();
        assert!((0..=8).all(|t| r.eval(t).unwrap() == Sign::Pos));
        assert!(restrict_component(&o, 2, 0, &GridPoint(vec![0, 0])).is_err());
    }

    #[test]
    fn restriction_in_one_dimension_is_the_function() {
        let g = GridSpec::unit(1, Dyadic::pow2(-2)).unwrap();
        let o = SignOracle::new(g, |i: &[i64]| SignVector::from_i8(&[(i[0] - 1).signum() as i8]));
        let r = restrict_component(&o, 0, 0, &GridPoint(vec![3])).unwrap();
        for t in 0..=4 {
            assert_eq!(r.eval(t).unwrap(), o.eval(&[t]).unwrap()[0]);
        }
    }

    #[test]
    fn enumerate_roots_examples() {
        let g = GridSpec::unit(2, Dyadic::pow2(-3)).unwrap();
        let o = midpoint_field(g.clone());
        assert_eq!(enumerate_roots(&o, DEFAULT_SCAN_CAP).unwrap(), vec![GridPoint(vec![4, 4])]);

        let zero = SignOracle::new(quarter_grid(), |_: &[i64]| SignVector::zeros(2));
        assert_eq!(enumerate_roots(&zero, DEFAULT_SCAN_CAP).unwrap().len(), 25);

        let none = SignOracle::new(g, |_: &[i64]| SignVector::from_i8(&[1, -1]));
        assert!(enumerate_roots(&none, DEFAULT_SCAN_CAP).unwrap().is_empty());

        let big = GridSpec::unit(3, Dyadic::pow2(-9)).unwrap();
        let o = SignOracle::new(big, |_: &[i64]| SignVector::zeros(3));
        assert!(matches!(enumerate_roots(&o, DEFAULT_SCAN_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn counter_matches_evaluator_calls() {
        let calls = Cell::new(0u64);
        let o = SignOracle::new(quarter_grid(), |_: &[i64]| {
            calls.set(calls.get() + 1);
            SignVector::zeros(2)
        });
        for k in 0..7 {
            o.eval(&[k % 5, 1]).unwrap();
        }
        assert_eq!(o.evaluations(), 7);
        assert_eq!(calls.get(), 7);
        assert!(o.eval(&[9, 9]).is_err());
        assert_eq!(calls.get(), 7);
    }

    #[test]
    fn memoized_oracle_counts_cache_misses() {
        let calls = Cell::new(0u64);
        let o = SignOracle::new(quarter_grid(), |_: &[i64]| {
            calls.set(calls.get() + 1);
            SignVector::zeros(2)
        })
        .memoized();
        for _ in 0..3 {
            o.eval(&[1, 2]).unwrap();
            o.eval(&[2, 1]).unwrap();
        }
        assert_eq!(o.evaluations(), 2);
        assert_eq!(calls.get(), 2);
    }

    #[test]
    fn real_oracle_counts_and_checks_shape() {
        let o = RealOracle::new(2, |x: &[f64]| vec![x[0], x[1] * 2.0]);
        assert_eq!(o.eval(&[1.0, 2.0]).unwrap(), vec![1.0, 4.0]);
        assert!(o.eval(&[1.0]).is_err());
        assert_eq!(o.evaluations(), 1);
        let bad = RealOracle::new(2, |_: &[f64]| vec![0.0]);
        assert!(matches!(bad.eval(&[0.0, 0.0]), Err(Error::Evaluation { .. })));
    }

    #[test]
    fn section_pins_trailing_axes() {
        let g = GridSpec::unit(3, Dyadic::pow2(-2)).unwrap();
        let o = SignOracle::new(g, |i: &[i64]| SignVector::from_i8(&[i[0] as i8 % 2, 1, i[2] as i8 - 2]));
        let s = Section::new(&o, vec![1, 0], vec![3, 4], vec![2]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.bounds(0), (1, 3));
        assert_eq!(s.eval(&[1, 3]).unwrap(), SignVector::from_i8(&[1, 1]));
        assert_eq!(s.lift(&[1, 3]), vec![1, 3, 2]);
        assert_eq!(o.evaluations(), 1);
    }

    #[test]
    fn profiles_count_conditions() {
        assert_eq!(MonotoneProfile::canonical(3).conditions().len(), 9);
        let p = MonotoneProfile::ex_diagonal_decreasing(3);
        assert_eq!((p.diagonal_count(), p.ex_diagonal_count()), (0, 6));
        let p = MonotoneProfile::alternating(4);
        assert_eq!((p.diagonal_count(), p.ex_diagonal_count()), (4, 3));
        assert_eq!(p.get(2, 1), Monotonicity::Decreasing);
    }
}
