//! Seeded random instance families.
//!
//! Real families come with a Lipschitz constant in the max norm and are
//! discretized with `ε = L·δ`, which makes the sign field δ-continuous.
//! Grid families are built directly as sign fields. The same seed always
//! produces the same instance.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::discretize;
use crate::domain::{BoxDomain, GridSpec, MonotoneProfile, RealOracle, Sign, SignOracle, SignVector};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::root2d::Mode2D;

/// A real-valued instance with the constants needed to discretize it.
pub struct RealInstance {
    pub oracle: RealOracle<'static>,
    pub domain: BoxDomain,
    /// Max-norm Lipschitz constant: `|f(x) - f(y)|_∞ <= L |x - y|_∞`.
    pub lipschitz: f64,
}

impl RealInstance {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Threshold that makes the grid of spacing `delta` δ-continuous.
    pub fn epsilon_for(&self, delta: Dyadic) -> f64 {
        self.lipschitz * delta.to_f64()
    }

    pub fn grid(&self, delta: Dyadic) -> Result<GridSpec> {
        GridSpec::new(self.domain.clone(), delta)
    }

    /// Sign field on the grid of spacing `delta` with `ε = L·δ`.
    pub fn signs(&self, delta: Dyadic) -> Result<SignOracle<'_>> {
        Ok(discretize(&self.oracle, self.epsilon_for(delta), &self.grid(delta)?))
    }
}

impl fmt::Debug for RealInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealInstance")
            .field("domain", &self.domain)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `c + Σ_k b_k sin(2π k t + θ_k) / k` with `Σ |b_k| <= amplitude`; returns
/// the function and its Lipschitz constant.
fn wiggle(rng: &mut ChaCha8Rng, center: f64, amplitude: f64) -> (impl Fn(f64) -> f64 + Clone, f64) {
    let mut terms = [(0.0f64, 0.0f64); 3];
    let mut budget = amplitude;
    for t in terms.iter_mut() {
        let b = rng.gen_range(0.0..=budget) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        budget -= b.abs();
        *t = (b, rng.gen_range(0.0..TAU));
    }
    let slope: f64 = terms.iter().map(|(b, _)| b.abs() * TAU).sum();
    let f = move |t: f64| {
        center
            + terms
                .iter()
                .enumerate()
                .map(|(k, (b, th))| b * (TAU * (k + 1) as f64 * t + th).sin() / (k + 1) as f64)
                .sum::<f64>()
    };
    (f, slope)
}

/// `f_1 = a_1 (x_1 - φ(x_2))`, `f_2 = a_2 (x_2 - ψ(x_1))` on the unit
/// square with smooth random curves `φ, ψ` valued in `[0.1, 0.9]`. Each
/// `f_i` increases in `x_i` and switches sign strictly.
pub fn random_monotone_2d(seed: u64) -> RealInstance {
    let mut r = rng(seed);
    let a = [r.gen_range(0.5..1.0), r.gen_range(0.5..1.0)];
    let (phi, s1) = wiggle(&mut r, 0.5, 0.3);
    let (psi, s2) = wiggle(&mut r, 0.5, 0.3);
    curve_pair(a, phi, s1, psi, s2)
}

/// Like [`random_monotone_2d`] but sum-switching: `ψ` stays in
/// `[0.1, 0.5]` and `a_2 = 2 a_1`, so `f_1 + f_2 >= 0` on the top edge.
pub fn random_sum_2d(seed: u64) -> RealInstance {
    let mut r = rng(seed);
    let a1 = r.gen_range(0.5..1.0);
    let (phi, s1) = wiggle(&mut r, 0.5, 0.4);
    let (psi, s2) = wiggle(&mut r, 0.3, 0.2);
    curve_pair([a1, 2.0 * a1], phi, s1, psi, s2)
}

fn curve_pair(
    a: [f64; 2],
    phi: impl Fn(f64) -> f64 + 'static,
    s1: f64,
    psi: impl Fn(f64) -> f64 + 'static,
    s2: f64,
) -> RealInstance {
    RealInstance {
        oracle: RealOracle::new(2, move |x: &[f64]| vec![a[0] * (x[0] - phi(x[1])), a[1] * (x[1] - psi(x[0]))]),
        domain: BoxDomain::unit(2),
        lipschitz: (a[0] * (1.0 + s1)).max(a[1] * (1.0 + s2)),
    }
}

/// `f_i = a_i (x_i - φ_i(x))` where `φ_i` depends only on the other
/// coordinates and is increasing in each of them, with values in
/// `[0.1, 0.9]`. Every `f_i` is decreasing in every `x_j`, `j != i`,
/// increasing in `x_i`, and switches sign strictly.
pub fn random_exdiag(dim: usize, seed: u64) -> RealInstance {
    let mut r = rng(seed);
    let a: Vec<f64> = (0..dim).map(|_| r.gen_range(0.5..1.0)).collect();
    let c: Vec<f64> = (0..dim).map(|_| r.gen_range(0.1..0.3)).collect();
    // h_j(t) = t + β_j sin(2πt) / 2π is increasing with h(0) = 0, h(1) = 1
    let beta: Vec<f64> = (0..dim).map(|_| r.gen_range(-0.9..0.9)).collect();
    let w: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let raw: Vec<f64> = (0..dim).map(|j| if i == j { 0.0 } else { r.gen_range(0.0..1.0) }).collect();
            let total: f64 = raw.iter().sum::<f64>().max(1e-12);
            let budget = r.gen_range(0.0..0.6);
            raw.iter().map(|v| v / total * budget).collect()
        })
        .collect();
    let lipschitz = (0..dim)
        .map(|i| a[i] * (1.0 + (0..dim).map(|j| w[i][j] * (1.0 + beta[j].abs())).sum::<f64>()))
        .fold(0.0, f64::max);
    let oracle = RealOracle::new(dim, move |x: &[f64]| {
        let h: Vec<f64> = x.iter().zip(&beta).map(|(&t, b)| t + b * (TAU * t).sin() / TAU).collect();
        (0..dim)
            .map(|i| {
                let phi = c[i] + (0..dim).map(|j| w[i][j] * h[j]).sum::<f64>();
                a[i] * (x[i] - phi)
            })
            .collect()
    });
    RealInstance {
        oracle,
        domain: BoxDomain::unit(dim),
        lipschitz,
    }
}

/// `f_i = a_i (x_i - t_i)` with `t_i ∈ [0.1, 0.9]`.
pub fn separable(dim: usize, seed: u64) -> RealInstance {
    let mut r = rng(seed);
    let a: Vec<f64> = (0..dim).map(|_| r.gen_range(0.5..2.0)).collect();
    let t: Vec<f64> = (0..dim).map(|_| r.gen_range(0.1..0.9)).collect();
    let lipschitz = a.iter().cloned().fold(0.0, f64::max);
    RealInstance {
        oracle: RealOracle::new(dim, move |x: &[f64]| (0..dim).map(|i| a[i] * (x[i] - t[i])).collect()),
        domain: BoxDomain::unit(dim),
        lipschitz,
    }
}

/// A rotated linear form `f = S R_θ (x - x*)` with `x* ∈ [0.3, 0.7]^2`.
/// `S` scales the second row by 5 for the sum mode, which also keeps
/// `|θ| <= 0.2`; the exdiag mode uses `θ >= 0` so `f_1` decreases in `x_2`.
pub fn rotated_linear(mode: Mode2D, seed: u64) -> RealInstance {
    let mut r = rng(seed);
    let theta = match mode {
        Mode2D::Exdiag => r.gen_range(0.0..0.4),
        Mode2D::Diag => r.gen_range(-0.4..0.4),
        Mode2D::Sum => r.gen_range(-0.2..0.2),
    };
    let scale = if mode == Mode2D::Sum { 5.0 } else { 1.0 };
    let star = [r.gen_range(0.3..0.7), r.gen_range(0.3..0.7)];
    let (s, c) = f64::sin_cos(theta);
    let m = [[c, -s], [scale * s, scale * c]];
    let offset = m.iter().map(|row| -(row[0] * star[0] + row[1] * star[1])).collect();
    linear(m.iter().map(|row| row.to_vec()).collect(), offset, BoxDomain::unit(2))
}

/// `f(x) = A x + b` on the given box.
pub fn linear(matrix: Vec<Vec<f64>>, offset: Vec<f64>, domain: BoxDomain) -> RealInstance {
    let d = offset.len();
    let lipschitz = matrix
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    RealInstance {
        oracle: RealOracle::new(d, move |x: &[f64]| {
            matrix
                .iter()
                .zip(&offset)
                .map(|(row, b)| row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + b)
                .collect()
        }),
        domain,
        lipschitz,
    }
}

fn band(v: i64, width: i64) -> Sign {
    if v < -width {
        Sign::Neg
    } else if v > width {
        Sign::Pos
    } else {
        Sign::Zero
    }
}

/// A staircase path of length `len + 1` in `[lo, hi]`: long flat runs
/// broken by jumps of at most `step`, non-decreasing when `monotone`.
fn staircase_path(r: &mut ChaCha8Rng, len: usize, lo: i64, hi: i64, step: i64, monotone: bool) -> Vec<i64> {
    let mut s = vec![r.gen_range(lo..=hi)];
    for _ in 0..len {
        let prev = *s.last().unwrap();
        let jump = if r.gen_bool(0.25) {
            let down = if monotone { 0 } else { step };
            r.gen_range(-down..=step)
        } else {
            0
        };
        s.push((prev + jump).clamp(lo, hi));
    }
    s
}

/// Grid family with staircase zero sets: `f_1 = band(x_1 - s(x_2))` and
/// `f_2 = band(x_2 - t(x_1))` with a zero band of half-width `w`. Paths jump
/// by at most `2w`, which keeps the field δ-continuous. For the exdiag mode
/// `s` is non-decreasing so `f_1` decreases in `x_2`.
pub fn staircase(mode: Mode2D, cells: u64, seed: u64) -> Result<SignOracle<'static>> {
    if cells < 8 {
        return Err(Error::Input(format!("staircase needs at least 8 cells, got {cells}")));
    }
    if !cells.is_power_of_two() {
        return Err(Error::Input(format!("cell count must be a power of two, got {cells}")));
    }
    let n = cells as i64;
    let grid = GridSpec::unit(2, Dyadic::pow2(-(cells.trailing_zeros() as i32)))?;
    let mut r = rng(seed);
    let w = if n >= 32 && r.gen_bool(0.5) { 2 } else { 1 };
    let s = staircase_path(&mut r, cells as usize, w + 1, n - w - 1, 2 * w, mode == Mode2D::Exdiag);
    let t = staircase_path(&mut r, cells as usize, w + 1, n - w - 1, 2 * w, false);
    Ok(SignOracle::new(grid, move |i: &[i64]| {
        SignVector(vec![band(i[0] - s[i[1] as usize], w), band(i[1] - t[i[0] as usize], w)])
    }))
}

/// A δ-continuous switching sequence on `cells + 1` points: a lazy random
/// walk over `{-1, 0, 1}` with `s_0 <= 0 <= s_N`.
pub fn random_switching_1d(cells: u64, seed: u64) -> Result<SignOracle<'static>> {
    if !cells.is_power_of_two() {
        return Err(Error::Input(format!("cell count must be a power of two, got {cells}")));
    }
    let grid = GridSpec::unit(1, Dyadic::pow2(-(cells.trailing_zeros() as i32)))?;
    let mut r = rng(seed);
    let mut s: Vec<i8> = vec![r.gen_range(-1..=0)];
    for _ in 0..cells {
        let prev = *s.last().unwrap();
        s.push((prev + r.gen_range(-1..=1)).clamp(-1, 1));
    }
    let last = s.len() - 1;
    s[last] = s[last].max(0);
    Ok(SignOracle::new(grid, move |i: &[i64]| SignVector::from_i8(&[s[i[0] as usize]])))
}

/// Family identifiers shared by the instance format and the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Switching1d,
    RandomMonotone2d,
    RandomSum2d,
    RandomExdiag,
    Separable,
    RotatedLinear,
    Staircase,
    Recursive3d,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Switching1d,
        Family::RandomMonotone2d,
        Family::RandomSum2d,
        Family::RandomExdiag,
        Family::Separable,
        Family::RotatedLinear,
        Family::Staircase,
        Family::Recursive3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Switching1d => "switching-1d",
            Family::RandomMonotone2d => "random-monotone-2d",
            Family::RandomSum2d => "random-sum-2d",
            Family::RandomExdiag => "random-exdiag",
            Family::Separable => "separable",
            Family::RotatedLinear => "rotated-linear",
            Family::Staircase => "staircase",
            Family::Recursive3d => "recursive-3d",
        }
    }

    /// Monotonicity conditions every member satisfies, in dimension `dim`.
    pub fn profile(self, dim: usize) -> MonotoneProfile {
        use crate::domain::Monotonicity::*;
        match self {
            Family::RandomExdiag | Family::Recursive3d | Family::Separable => MonotoneProfile::canonical(dim),
            Family::RandomMonotone2d | Family::RandomSum2d => {
                MonotoneProfile::empty(2).with(0, 0, Increasing).with(1, 1, Increasing)
            }
            Family::RotatedLinear | Family::Staircase | Family::Switching1d => {
                MonotoneProfile::empty(dim).with(0, 0, Increasing)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Input(format!("unknown family {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// A generated instance, either real-valued or a sign field on a grid.
pub enum Generated {
    Real(RealInstance),
    Grid(SignOracle<'static>),
}

impl Generated {
    pub fn dim(&self) -> usize {
        match self {
            Generated::Real(r) => r.dim(),
            Generated::Grid(g) => g.grid().dim(),
        }
    }
}

/// Builds a member of `family`. `dim` is used by dimension-generic
/// families, `mode` by the 2D families that depend on the solver, and
/// `cells` by grid families.
pub fn generate(family: Family, dim: usize, mode: Mode2D, cells: u64, seed: u64) -> Result<Generated> {
    Ok(match family {
        Family::Switching1d => Generated::Grid(random_switching_1d(cells, seed)?),
        Family::RandomMonotone2d => Generated::Real(random_monotone_2d(seed)),
        Family::RandomSum2d => Generated::Real(random_sum_2d(seed)),
        Family::RandomExdiag => Generated::Real(random_exdiag(dim, seed)),
        Family::Separable => Generated::Real(separable(dim, seed)),
        Family::RotatedLinear => Generated::Real(rotated_linear(mode, seed)),
        Family::Staircase => Generated::Grid(staircase(mode, cells, seed)?),
        Family::Recursive3d => Generated::Real(random_exdiag(3, seed)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{
        check_delta_continuity, check_monotonicity, check_positive_switching, check_sum_switching, CheckConfig,
    };
    use crate::domain::SignField;

    fn all_pass(field: &impl SignField, profile: &MonotoneProfile, sum: bool) {
        let cfg = CheckConfig::default();
        assert!(check_delta_continuity(field, &cfg).unwrap().passed());
        assert!(check_monotonicity(field, profile, &cfg).unwrap().passed());
        if sum {
            assert!(check_sum_switching(field, &cfg).unwrap().passed());
        } else {
            assert!(check_positive_switching(field, &cfg).unwrap().passed());
        }
    }

    #[test]
    fn real_families_meet_their_hypotheses() {
        let delta = Dyadic::pow2(-5);
        for seed in 0..20 {
            let f = random_monotone_2d(seed);
            all_pass(&f.signs(delta).unwrap(), &Family::RandomMonotone2d.profile(2), false);
            let f = random_sum_2d(seed);
            all_pass(&f.signs(delta).unwrap(), &Family::RandomSum2d.profile(2), true);
            for d in 1..=3 {
                let f = random_exdiag(d, seed);
                all_pass(&f.signs(Dyadic::pow2(-4)).unwrap(), &MonotoneProfile::canonical(d), false);
            }
            for mode in Mode2D::ALL {
                let f = rotated_linear(mode, seed);
                let mut profile = Family::RotatedLinear.profile(2);
                if mode == Mode2D::Exdiag {
                    profile = profile.with(0, 1, crate::domain::Monotonicity::Decreasing);
                }
                all_pass(&f.signs(delta).unwrap(), &profile, mode == Mode2D::Sum);
            }
        }
    }

    #[test]
    fn grid_families_meet_their_hypotheses() {
        for seed in 0..20 {
            for mode in Mode2D::ALL {
                let s = staircase(mode, 32, seed).unwrap();
                let mut profile = Family::Staircase.profile(2);
                if mode == Mode2D::Exdiag {
                    profile = profile.with(0, 1, crate::domain::Monotonicity::Decreasing);
                }
                all_pass(&s, &profile, mode == Mode2D::Sum);
            }
            let s = random_switching_1d(64, seed).unwrap();
            let cfg = CheckConfig::default();
            assert!(check_delta_continuity(&s, &cfg).unwrap().passed());
            assert!(check_positive_switching(&s, &cfg).unwrap().passed());
        }
    }

    #[test]
    fn seeds_determine_instances() {
        let a = random_exdiag(3, 9);
        let b = random_exdiag(3, 9);
        let x = [0.2, 0.7, 0.4];
        assert_eq!(a.oracle.eval(&x).unwrap(), b.oracle.eval(&x).unwrap());
        assert_eq!("recursive-3d".parse::<Family>().unwrap(), Family::Recursive3d);
        assert!("nope".parse::<Family>().is_err());
    }
}
