//! Root/fixed-point duality, symmetry transforms, and the two explicit
//! hardness constructions, with their claims turned into runtime checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use std::borrow::Borrow;

use crate::domain::{BoxDomain, MonotoneProfile, Monotonicity, RealOracle, SignField, SignVector};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Max-norm Lipschitz constant of [`make_dd_insufficient_instance`] for a
/// 1-Lipschitz `g`: `1 + 2 * (1 + 2 + 1)` for `f_1` and `f_3`.
pub const DD_INSUFFICIENT_LIPSCHITZ: f64 = 9.0;

/// Max-norm Lipschitz constant of [`make_switching_necessary_instance`] for a
/// 1-Lipschitz `g`: `1 + 2 + 2` for `f_1`.
pub const SWITCHING_NECESSARY_LIPSCHITZ: f64 = 5.0;

/// Relative slack for comparisons of floating-point claims.
const SLACK: f64 = 1e-9;

/// `x -> x - f(x)`: roots of `f` are fixed points of the dual and vice versa.
pub fn dual<'a>(oracle: &'a RealOracle<'a>) -> RealOracle<'a> {
    RealOracle::new(oracle.dim(), move |x: &[f64]| match oracle.eval(x) {
        Ok(y) => x.iter().zip(&y).map(|(a, b)| a - b).collect(),
        Err(_) => vec![f64::NAN; x.len()],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrouwerReport {
    pub samples: usize,
    /// Sampled points whose image left the box.
    pub escapes: usize,
    /// Per component: the dual is `<= 0` on the lower face and `>= 0` on the
    /// upper face at every sampled face point.
    pub dual_switching: Vec<bool>,
    /// Largest observed slope of `f` over the sampled pairs.
    pub lipschitz_f: f64,
    /// Largest observed slope of the dual.
    pub lipschitz_dual: f64,
    /// Pairs where the dual's slope exceeded one plus the slope of `f`.
    pub slope_violations: usize,
}

impl BrouwerReport {
    pub fn passed(&self) -> bool {
        self.escapes == 0 && self.dual_switching.iter().all(|&b| b) && self.slope_violations == 0
    }
}

fn sample_in(rng: &mut ChaCha8Rng, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    lower.iter().zip(upper).map(|(&a, &b)| rng.gen_range(a..=b)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// For a map of the box into itself, samples the faces to confirm the dual is
/// positive-switching, and samples nearby pairs to confirm the dual's slope
/// is at most one more than the slope of `f`.
pub fn check_brouwer_to_miranda(
    oracle: &RealOracle<'_>,
    domain: &BoxDomain,
    samples: usize,
    seed: u64,
) -> Result<BrouwerReport> {
    let d = domain.dim();
    let lower: Vec<f64> = domain.lower().iter().map(|v| v.to_f64()).collect();
    let upper: Vec<f64> = domain.upper().iter().map(|v| v.to_f64()).collect();
    let inside = |y: &[f64]| (0..d).all(|j| lower[j] - SLACK <= y[j] && y[j] <= upper[j] + SLACK);
    let dual_at = |x: &[f64]| -> Result<Vec<f64>> {
        let y = oracle.eval(x)?;
        Ok(x.iter().zip(&y).map(|(a, b)| a - b).collect())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BrouwerReport {
        samples,
        escapes: 0,
        dual_switching: vec![true; d],
        lipschitz_f: 0.0,
        lipschitz_dual: 0.0,
        slope_violations: 0,
    };
    for _ in 0..samples {
        let x = sample_in(&mut rng, &lower, &upper);
        if !inside(&oracle.eval(&x)?) {
            report.escapes += 1;
        }
        for i in 0..d {
            for (face, value) in [(false, lower[i]), (true, upper[i])] {
                let mut p = sample_in(&mut rng, &lower, &upper);
                p[i] = value;
                let v = dual_at(&p)?[i];
                let ok = if face { v >= -SLACK } else { v <= SLACK };
                report.dual_switching[i] &= ok;
            }
        }
        let radius = 1e-3 * max_abs_diff(&lower, &upper);
        let y: Vec<f64> = (0..d)
            .map(|j| (x[j] + rng.gen_range(-radius..=radius)).clamp(lower[j], upper[j]))
            .collect();
        let dist = max_abs_diff(&x, &y);
        if dist > 0.0 {
            let sf = max_abs_diff(&oracle.eval(&x)?, &oracle.eval(&y)?) / dist;
            let sd = max_abs_diff(&dual_at(&x)?, &dual_at(&y)?) / dist;
            report.lipschitz_f = report.lipschitz_f.max(sf);
            report.lipschitz_dual = report.lipschitz_dual.max(sd);
            if sd > (sf + 1.0) * (1.0 + SLACK) {
                report.slope_violations += 1;
            }
        }
    }
    Ok(report)
}

/// Reflects variable `j`: `x_j -> (a_j + b_j) - x_j`. An involution, exactly
/// so on dyadic grid coordinates.
pub fn flip_variable<'a>(oracle: &'a RealOracle<'a>, domain: &BoxDomain, j: usize) -> RealOracle<'a> {
    let s = (domain.lower()[j] + domain.upper()[j]).to_f64();
    RealOracle::new(oracle.dim(), move |x: &[f64]| {
        let mut y = x.to_vec();
        y[j] = s - x[j];
        oracle.eval(&y).unwrap_or_else(|_| vec![f64::NAN; x.len()])
    })
}

/// `f_i -> -f_i`. An involution.
pub fn negate_component<'a>(oracle: &'a RealOracle<'a>, i: usize) -> RealOracle<'a> {
    RealOracle::new(oracle.dim(), move |x: &[f64]| {
        let mut y = oracle.eval(x).unwrap_or_else(|_| vec![f64::NAN; x.len()]);
        y[i] = -y[i];
        y
    })
}

/// A sign field with variable `axis` reflected inside its bounds.
pub struct FlipVariable<F> {
    inner: F,
    axis: usize,
}

pub fn flip_field<F: SignField>(inner: F, axis: usize) -> FlipVariable<F> {
    FlipVariable { inner, axis }
}

impl<F: SignField> FlipVariable<F> {
    /// Maps an index between the flipped and original frames (both ways).
    pub fn reflect(&self, index: &[i64]) -> Vec<i64> {
        let (lo, hi) = self.inner.bounds(self.axis);
        let mut p = index.to_vec();
        p[self.axis] = lo + hi - p[self.axis];
        p
    }
}

impl<F: SignField> SignField for FlipVariable<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn bounds(&self, axis: usize) -> (i64, i64) {
        self.inner.bounds(axis)
    }
    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        self.inner.eval(&self.reflect(index))
    }
}

/// A sign field with component `component` negated.
pub struct NegateComponent<F> {
    inner: F,
    component: usize,
}

pub fn negate_field<F: SignField>(inner: F, component: usize) -> NegateComponent<F> {
    NegateComponent { inner, component }
}

impl<F: SignField> SignField for NegateComponent<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn bounds(&self, axis: usize) -> (i64, i64) {
        self.inner.bounds(axis)
    }
    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        let mut v = self.inner.eval(index)?;
        v.0[self.component] = v.0[self.component].flip();
        Ok(v)
    }
}

fn trunc(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// `[-1, 1]^d`.
pub fn symmetric_cube(d: usize) -> BoxDomain {
    BoxDomain::cube(d, Dyadic::from_int(-1), Dyadic::ONE).expect("non-degenerate")
}

/// Lifts a 2-dimensional `g` on `[-1,1]^2` to `f` on `[-1,1]^d`, `d >= 3`:
///
/// ```text
/// f_1(x) = g_1(x_1, x_3) + 2 (x_1 - trunc(2 x_2 - x_3))
/// f_2(x) = 2 x_2 - x_1 - x_3
/// f_3(x) = g_2(x_1, x_3) + 2 (x_3 - trunc(2 x_2 - x_1))
/// f_i(x) = 0 for i > 3
/// ```
///
/// with `trunc` clamping to `[-1, 1]`. If `g` is 1-Lipschitz and
/// positive-switching then `f` is positive-switching, satisfies every
/// diagonal condition and four ex-diagonal ones, and every ε-root of `f`
/// projects to a 3ε-root of `g`.
///
/// `g` may be borrowed or moved in.
pub fn make_dd_insufficient_instance<'a, G>(g: G, d: usize) -> Result<RealOracle<'a>>
where
    G: Borrow<RealOracle<'a>> + 'a,
{
    if g.borrow().dim() != 2 || d < 3 {
        return Err(Error::Input(format!(
            "need a 2-dimensional g and d >= 3, got {} and {d}",
            g.borrow().dim()
        )));
    }
    Ok(RealOracle::new(d, move |x: &[f64]| {
        let gv = g.borrow().eval(&[x[0], x[2]]).unwrap_or_else(|_| vec![f64::NAN; 2]);
        let mut f = vec![0.0; d];
        f[0] = gv[0] + 2.0 * (x[0] - trunc(2.0 * x[1] - x[2]));
        f[1] = 2.0 * x[1] - x[0] - x[2];
        f[2] = gv[1] + 2.0 * (x[2] - trunc(2.0 * x[1] - x[0]));
        f
    }))
}

/// Projects an ε-root of the lifted instance to `(x_1, x_3)` and confirms it
/// is a 3ε-root of `g`.
pub fn recover_2d_root(g: &RealOracle<'_>, x: &[f64], epsilon: f64) -> Result<[f64; 2]> {
    let p = [x[0], x[2]];
    let v = g.eval(&p)?;
    check_recovered(&v, epsilon, &p)?;
    Ok(p)
}

fn check_recovered(values: &[f64], epsilon: f64, at: &[f64]) -> Result<()> {
    let worst = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // absolute slack covers rounding in the lifted evaluation at epsilon = 0
    if worst > 3.0 * epsilon * (1.0 + SLACK) + 1e-12 {
        return Err(Error::ReductionViolation(format!(
            "recovered point {at:?} has |g| = {worst}, above 3 * {epsilon}"
        )));
    }
    Ok(())
}

/// Lifts a 1-dimensional `g` on `[-1, 1]` to `f` on `[-1, 1]^2`:
/// `f_1 = g(x_1) + 2 (x_1 - x_2)`, `f_2 = x_2 - x_1`. Every root `r` of `g`
/// gives the root `(r, r)`; all four monotonicity conditions hold, but only
/// `f_2` is guaranteed to switch.
pub fn make_switching_necessary_instance<'a, G>(g: G) -> Result<RealOracle<'a>>
where
    G: Borrow<RealOracle<'a>> + 'a,
{
    if g.borrow().dim() != 1 {
        return Err(Error::Input(format!("need a 1-dimensional g, got {}", g.borrow().dim())));
    }
    Ok(RealOracle::new(2, move |x: &[f64]| {
        let gv = g.borrow().eval(&[x[0]]).map(|v| v[0]).unwrap_or(f64::NAN);
        vec![gv + 2.0 * (x[0] - x[1]), x[1] - x[0]]
    }))
}

/// Monotonicity claimed for [`make_dd_insufficient_instance`]: all
/// diagonal conditions, `f_2` decreasing in `x_1` and `x_3`, and `f_1`, `f_3`
/// decreasing in `x_2`. Seven of the nine canonical conditions when `d = 3`.
pub fn dd_insufficient_profile(d: usize) -> MonotoneProfile {
    let mut p = MonotoneProfile::empty(d);
    for i in 0..d {
        p = p.with(i, i, Monotonicity::Increasing);
    }
    p.with(1, 0, Monotonicity::Decreasing)
        .with(1, 2, Monotonicity::Decreasing)
        .with(0, 1, Monotonicity::Decreasing)
        .with(2, 1, Monotonicity::Decreasing)
}

/// Monotonicity claimed for [`make_switching_necessary_instance`]: all four
/// canonical conditions.
pub fn switching_necessary_profile() -> MonotoneProfile {
    MonotoneProfile::canonical(2)
}

/// Projects an ε-root of the lifted instance to `x_1` and confirms it is a
/// 3ε-root of `g`.
pub fn recover_1d_root(g: &RealOracle<'_>, x: &[f64], epsilon: f64) -> Result<f64> {
    let v = g.eval(&[x[0]])?;
    check_recovered(&v, epsilon, &x[..1])?;
    Ok(x[0])
}

/// A random 1-Lipschitz positive-switching map on `[-1, 1]^2` with a known
/// root:
/// `g_1 = a_1 (y_1 - u) + b_1 sin(y_2 - w)`, `g_2 = a_2 (y_2 - w) + b_2 sin(y_1 - u)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedPair {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub root: [f64; 2],
}

impl PlantedPair {
    pub fn random(rng: &mut impl Rng) -> Self {
        PlantedPair {
            a: [rng.gen_range(0.4..0.8), rng.gen_range(0.4..0.8)],
            b: [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)],
            root: [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)],
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let (u, w) = (self.root[0], self.root[1]);
        vec![
            self.a[0] * (y[0] - u) + self.b[0] * (y[1] - w).sin(),
            self.a[1] * (y[1] - w) + self.b[1] * (y[0] - u).sin(),
        ]
    }

    pub fn oracle(self) -> RealOracle<'static> {
        RealOracle::new(2, move |y: &[f64]| self.eval(y))
    }

    /// The root of the lifted instance above the planted root.
    pub fn lifted_root(&self) -> [f64; 3] {
        let (u, w) = (self.root[0], self.root[1]);
        [u, (u + w) / 2.0, w]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_examples() {
        let id = RealOracle::new(1, |x: &[f64]| x.to_vec());
        assert_eq!(dual(&id).eval(&[0.7]).unwrap(), vec![0.0]);
        let shift = RealOracle::new(1, |x: &[f64]| vec![x[0] - 0.3]);
        let d = dual(&shift);
        assert!((d.eval(&[0.9]).unwrap()[0] - 0.3).abs() < 1e-15);
        let dd = dual(&d);
        for x in [0.0, 0.25, 0.6] {
            assert!((dd.eval(&[x]).unwrap()[0] - shift.eval(&[x]).unwrap()[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn brouwer_examples() {
        let dom = BoxDomain::unit(2);
        let constant = RealOracle::new(2, |_: &[f64]| vec![0.3, 0.8]);
        assert!(check_brouwer_to_miranda(&constant, &dom, 200, 1).unwrap().passed());
        let id = RealOracle::new(2, |x: &[f64]| x.to_vec());
        assert!(check_brouwer_to_miranda(&id, &dom, 200, 1).unwrap().passed());
        let contraction = RealOracle::new(2, |x: &[f64]| x.iter().map(|v| 0.5 + 0.6 * (v - 0.5)).collect());
        let r = check_brouwer_to_miranda(&contraction, &dom, 500, 2).unwrap();
        assert!(r.passed());
        assert!(r.lipschitz_dual <= r.lipschitz_f + 1.0 + 1e-9);
        let escaping = RealOracle::new(2, |x: &[f64]| vec![x[0] + 0.5, x[1]]);
        assert!(!check_brouwer_to_miranda(&escaping, &dom, 200, 1).unwrap().passed());
    }

    #[test]
    fn flips_are_involutions() {
        let dom = BoxDomain::unit(2);
        let f = RealOracle::new(2, |x: &[f64]| vec![x[0] - 2.0 * x[1], x[1] * x[0]]);
        let once = flip_variable(&f, &dom, 1);
        let twice = flip_variable(&once, &dom, 1);
        let n1 = negate_component(&f, 0);
        let n2 = negate_component(&n1, 0);
        for x in [[0.125, 0.25], [0.5, 0.875], [1.0, 0.0]] {
            assert_eq!(twice.eval(&x).unwrap(), f.eval(&x).unwrap());
            assert_eq!(n2.eval(&x).unwrap(), f.eval(&x).unwrap());
        }
        // f_1 decreasing in x_2 becomes increasing
        assert!(once.eval(&[0.5, 0.2]).unwrap()[0] < once.eval(&[0.5, 0.8]).unwrap()[0]);
    }

    #[test]
    fn lifted_instance_examples() {
        let p = PlantedPair::random(&mut ChaCha8Rng::seed_from_u64(3));
        let g = p.oracle();
        let f = make_dd_insufficient_instance(&g, 3).unwrap();
        let at0 = f.eval(&[0.0, 0.0, 0.0]).unwrap();
        let g0 = g.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(at0, vec![g0[0], 0.0, g0[1]]);
        let r = f.eval(&p.lifted_root()).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12));
        assert!(recover_2d_root(&g, &p.lifted_root(), 0.0).is_ok());

        let zero = RealOracle::new(2, |_: &[f64]| vec![0.0, 0.0]);
        let f = make_dd_insufficient_instance(&zero, 4).unwrap();
        for t in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(f.eval(&[t, t, t, 0.5]).unwrap(), vec![0.0; 4]);
        }
        assert!(make_dd_insufficient_instance(&zero, 2).is_err());
    }

    #[test]
    fn recovery_rejects_bad_points() {
        let g = RealOracle::new(2, |y: &[f64]| vec![y[0], y[1]]);
        assert_eq!(recover_2d_root(&g, &[0.0, 0.0, 0.0], 0.0).unwrap(), [0.0, 0.0]);
        let e = recover_2d_root(&g, &[0.5, 0.0, 0.0], 0.1).unwrap_err();
        assert_eq!(e.kind(), "reduction-violation");
    }

    #[test]
    fn switching_necessary_examples() {
        let zero = RealOracle::new(1, |_: &[f64]| vec![0.0]);
        let f = make_switching_necessary_instance(&zero).unwrap();
        assert_eq!(f.eval(&[0.4, 0.4]).unwrap(), vec![0.0, 0.0]);
        assert_ne!(f.eval(&[0.4, 0.5]).unwrap(), vec![0.0, 0.0]);
        let id = RealOracle::new(1, |x: &[f64]| vec![x[0]]);
        let f = make_switching_necessary_instance(&id).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(recover_1d_root(&id, &[0.0, 0.0], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sign_field_transforms() {
        use crate::domain::{GridSpec, Sign, SignOracle};
        let g = GridSpec::unit(2, Dyadic::pow2(-2)).unwrap();
        let o = SignOracle::new(g, |i: &[i64]| SignVector::from_i8(&[(i[0] - 1).signum() as i8, 0]));
        let f = flip_field(&o, 0);
        assert_eq!(f.eval(&[3, 0]).unwrap()[0], Sign::Zero);
        assert_eq!(f.reflect(&[3, 2]), vec![1, 2]);
        let n = negate_field(&o, 0);
        assert_eq!(n.eval(&[0, 0]).unwrap()[0], Sign::Pos);
    }
}
