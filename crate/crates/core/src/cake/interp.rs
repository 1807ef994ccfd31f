//! Freudenthal triangulation of the `r`-grid and barycentric interpolation.
//!
//! A cell with base corner `b` is split into `d!` simplices, one per
//! permutation `π`: the corners are `b`, `b + e_π(1)`, `b + e_π(1) + e_π(2)`,
//! and so on. A point lies in the simplex whose permutation sorts its
//! fractional offsets in decreasing order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A point written as a convex combination of the corners of one simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    pub base: Vec<i64>,
    pub order: Vec<usize>,
    /// `d + 1` corners as `r`-grid indices, starting from `base`.
    pub corners: Vec<Vec<i64>>,
    /// Barycentric weights, one per corner; non-negative and summing to 1.
    pub weights: Vec<BigRational>,
}

fn corners_of(base: &[i64], order: &[usize]) -> Vec<Vec<i64>> {
    let mut corners = vec![base.to_vec()];
    let mut c = base.to_vec();
    for &axis in order {
        c[axis] += 1;
        corners.push(c.clone());
    }
    corners
}

fn weights_of(offsets: &[BigRational], order: &[usize]) -> Vec<BigRational> {
    let d = order.len();
    let mut w = Vec::with_capacity(d + 1);
    w.push(BigRational::one() - &offsets[order[0]]);
    for k in 1..d {
        w.push(&offsets[order[k - 1]] - &offsets[order[k]]);
    }
    w.push(offsets[order[d - 1]].clone());
    w
}

/// Offsets of `x` inside the cell with the given base, in units of `r`.
fn offsets(x: &[BigRational], base: &[i64], r: &BigRational) -> Vec<BigRational> {
    x.iter()
        .zip(base)
        .map(|(xi, &b)| xi / r - BigRational::from_integer(BigInt::from(b)))
        .collect()
}

/// The simplex of the standard triangulation containing `x`, for a grid of
/// `cells` cells of width `r` per axis starting at 0. Points on the upper
/// boundary belong to the last cell; ties in the offsets go to the lower axis.
pub fn locate(x: &[BigRational], r: &BigRational, cells: i64) -> SimplexPoint {
    let d = x.len();
    assert!(d > 0, "interpolation needs at least one axis");
    let base: Vec<i64> = x
        .iter()
        .map(|xi| {
            let q = (xi / r).floor();
            let b: i64 = q.to_integer().try_into().unwrap_or(i64::MAX);
            b.clamp(0, cells - 1)
        })
        .collect();
    let t = offsets(x, &base, r);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| t[b].cmp(&t[a]).then(a.cmp(&b)));
    SimplexPoint {
        corners: corners_of(&base, &order),
        weights: weights_of(&t, &order),
        base,
        order,
    }
}

/// Decomposes `x` in the simplex `(base, order)`, or `None` when `x` lies
/// outside it.
pub fn decompose(x: &[BigRational], r: &BigRational, base: &[i64], order: &[usize]) -> Option<SimplexPoint> {
    let t = offsets(x, base, r);
    let w = weights_of(&t, order);
    if w.iter().any(|wi| wi.is_negative()) {
        return None;
    }
    Some(SimplexPoint {
        base: base.to_vec(),
        order: order.to_vec(),
        corners: corners_of(base, order),
        weights: w,
    })
}

impl SimplexPoint {
    /// `Σ w_k · value(corner_k)`, skipping corners of weight zero so they are
    /// never evaluated.
    pub fn interpolate(&self, mut value: impl FnMut(&[i64]) -> Vec<i64>) -> Vec<BigRational> {
        let mut acc: Option<Vec<BigRational>> = None;
        for (corner, w) in self.corners.iter().zip(&self.weights) {
            if w.is_zero() {
                continue;
            }
            let v = value(corner);
            let acc = acc.get_or_insert_with(|| vec![BigRational::zero(); v.len()]);
            for (a, vi) in acc.iter_mut().zip(v) {
                *a += w * BigRational::from_integer(BigInt::from(vi));
            }
        }
        acc.expect("barycentric weights sum to one")
    }
}
