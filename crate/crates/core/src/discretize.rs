//! Sign discretization of real oracles and checkers for the structural
//! hypotheses the solvers rely on: switching, sum-switching, monotonicity
//! and δ-continuity.
//!
//! Checkers run exhaustively when the field has at most `cap` points and
//! fall back to seeded sampling otherwise; every report states which mode
//! ran.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    for_each_index, BoxDomain, GridSpec, Monotonicity, MonotoneProfile, RealOracle, Sign,
    SignField, SignOracle, SignVector, DEFAULT_SCAN_CAP,
};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Threshold `epsilon`, Lipschitz constant `lipschitz`, and the grid spacing
/// `delta <= epsilon / lipschitz` derived from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationParams {
    pub epsilon: f64,
    pub lipschitz: f64,
    pub delta: Dyadic,
}

impl DiscretizationParams {
    /// Picks the largest power-of-two spacing `<= epsilon / lipschitz` that
    /// lays a valid grid over `domain`.
    pub fn new(epsilon: f64, lipschitz: f64, domain: &BoxDomain) -> Result<Self> {
        if !(epsilon > 0.0 && lipschitz > 0.0 && epsilon.is_finite() && lipschitz.is_finite()) {
            return Err(Error::Input(format!(
                "epsilon and lipschitz must be positive, got {epsilon} and {lipschitz}"
            )));
        }
        let mut delta = Dyadic::pow2_floor(epsilon / lipschitz)
            .ok_or_else(|| Error::Input("epsilon / lipschitz is not representable".into()))?;
        let min_side = (0..domain.dim()).map(|j| domain.side(j)).min().expect("non-empty box");
        while delta > min_side {
            delta = delta * Dyadic::pow2(-1);
        }
        GridSpec::new(domain.clone(), delta)?;
        Ok(DiscretizationParams {
            epsilon,
            lipschitz,
            delta,
        })
    }

    /// Uses an explicit spacing; fails if it is coarser than `epsilon / lipschitz`.
    pub fn with_delta(epsilon: f64, lipschitz: f64, delta: Dyadic) -> Result<Self> {
        if delta.to_f64() > epsilon / lipschitz {
            return Err(Error::Input(format!(
                "spacing {delta} exceeds epsilon / lipschitz = {}",
                epsilon / lipschitz
            )));
        }
        Ok(DiscretizationParams {
            epsilon,
            lipschitz,
            delta,
        })
    }

    pub fn grid(&self, domain: &BoxDomain) -> Result<GridSpec> {
        GridSpec::new(domain.clone(), self.delta)
    }
}

/// Sign oracle whose component `i` is `-1` when `f_i < -epsilon`, `+1` when
/// `f_i > epsilon` and `0` otherwise. One real evaluation per call.
pub fn discretize<'a>(oracle: &'a RealOracle<'a>, epsilon: f64, grid: &GridSpec) -> SignOracle<'a> {
    let g = grid.clone();
    SignOracle::fallible(grid.clone(), move |index: &[i64]| {
        let x = g.coords_f64(index);
        let y = oracle.eval(&x)?;
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                point: x,
                reason: format!("oracle returned non-finite value {v}"),
            });
        }
        Ok(SignVector(y.iter().map(|&v| Sign::threshold(v, epsilon)).collect()))
    })
}

/// The field extended by one layer on every face. On the new face below
/// axis `i` component `i` is `-1`, on the new face above it is `+1`; every
/// other component copies the nearest original point. Indices keep the
/// original frame, so the padded bounds are `[lo - 1, hi + 1]`.
pub struct Padded<F> {
    inner: F,
}

pub fn pad_strict<F: SignField>(field: F) -> Padded<F> {
    Padded { inner: field }
}

impl<F: SignField> Padded<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: SignField> SignField for Padded<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn bounds(&self, axis: usize) -> (i64, i64) {
        let (lo, hi) = self.inner.bounds(axis);
        (lo - 1, hi + 1)
    }

    fn eval(&self, index: &[i64]) -> Result<SignVector> {
        if !self.in_bounds(index) {
            return Err(Error::Domain(format!("index {index:?} outside padded box")));
        }
        let clamped: Vec<i64> = index
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let (lo, hi) = self.inner.bounds(j);
                i.clamp(lo, hi)
            })
            .collect();
        let mut v = self.inner.eval(&clamped)?;
        for (j, &i) in index.iter().enumerate() {
            let (lo, hi) = self.inner.bounds(j);
            if i < lo {
                v.0[j] = Sign::Neg;
            } else if i > hi {
                v.0[j] = Sign::Pos;
            }
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<usize>,
    pub points: Vec<Vec<i64>>,
    pub values: Vec<Vec<i8>>,
}

/// Outcome of one checked condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionStatus {
    pub component: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Monotonicity>,
    pub holds: bool,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: String,
    pub mode: CheckMode,
    pub points_checked: u64,
    pub conditions: Vec<ConditionStatus>,
    /// The first few violations of each condition.
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn new(property: &str, mode: CheckMode) -> Self {
        CheckReport {
            property: property.into(),
            mode,
            points_checked: 0,
            conditions: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn holds(&self, component: usize, variable: Option<usize>) -> bool {
        self.conditions
            .iter()
            .filter(|c| c.component == component && c.variable == variable)
            .all(|c| c.holds)
    }

    pub fn holding_count(&self) -> usize {
        self.conditions.iter().filter(|c| c.holds).count()
    }

    fn record(&mut self, status: &mut ConditionStatus, listed: &mut usize, cfg: &CheckConfig, v: Violation) {
        status.holds = false;
        status.violations += 1;
        if *listed < cfg.max_listed {
            *listed += 1;
            self.violations.push(v);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Largest point count checked exhaustively.
    pub cap: u128,
    /// Sampled base points when above the cap.
    pub samples: usize,
    pub seed: u64,
    /// Violations listed per condition (all are counted).
    pub max_listed: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            cap: DEFAULT_SCAN_CAP,
            samples: 1 << 14,
            seed: 0,
            max_listed: 16,
        }
    }
}

/// All sign vectors of a field, stored densely.
pub(crate) struct Table {
    lower: Vec<i64>,
    extent: Vec<i64>,
    dim: usize,
    values: Vec<i8>,
}

impl Table {
    pub(crate) fn build<F: SignField + ?Sized>(field: &F) -> Result<Self> {
        let d = field.dim();
        let lower: Vec<i64> = (0..d).map(|j| field.bounds(j).0).collect();
        let extent: Vec<i64> = (0..d).map(|j| field.bounds(j).1 - field.bounds(j).0 + 1).collect();
        let mut values = Vec::with_capacity(field.point_count() as usize * d);
        for_each_index(field, |idx| {
            values.extend(field.eval(idx)?.as_i8());
            Ok(())
        })?;
        Ok(Table {
            lower,
            extent,
            dim: d,
            values,
        })
    }

    fn offset(&self, idx: &[i64]) -> usize {
        let mut off = 0i64;
        for j in 0..self.dim {
            off = off * self.extent[j] + (idx[j] - self.lower[j]);
        }
        off as usize * self.dim
    }

    pub(crate) fn get(&self, idx: &[i64]) -> &[i8] {
        let o = self.offset(idx);
        &self.values[o..o + self.dim]
    }
}

/// Source of sign vectors for checkers: a dense table in exhaustive mode,
/// direct evaluation in sampled mode.
enum Source<'f, F: SignField + ?Sized> {
    Table(Table),
    Direct(&'f F),
}

impl<F: SignField + ?Sized> Source<'_, F> {
    fn get(&self, idx: &[i64]) -> Result<Vec<i8>> {
        match self {
            Source::Table(t) => Ok(t.get(idx).to_vec()),
            Source::Direct(f) => Ok(f.eval(idx)?.as_i8()),
        }
    }
}

fn random_point<F: SignField + ?Sized>(field: &F, rng: &mut ChaCha8Rng) -> Vec<i64> {
    (0..field.dim())
        .map(|j| {
            let (lo, hi) = field.bounds(j);
            rng.gen_range(lo..=hi)
        })
        .collect()
}

/// Max-norm neighbours `q > p` in lexicographic order of offsets.
fn forward_offsets(d: usize) -> Vec<Vec<i64>> {
    let total = 3usize.pow(d as u32);
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect::<Vec<i64>>()
        })
        .filter(|o| o.iter().rev().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// Lists adjacent pairs (max-norm distance one index) where some component
/// jumps between `-1` and `+1`.
pub fn check_delta_continuity<F: SignField + ?Sized>(field: &F, cfg: &CheckConfig) -> Result<CheckReport> {
    let d = field.dim();
    let offsets = forward_offsets(d);
    let exhaustive = field.point_count() <= cfg.cap;
    let mut report = CheckReport::new(
        "delta-continuity",
        if exhaustive { CheckMode::Exhaustive } else { CheckMode::Sampled },
    );
    let mut statuses: Vec<ConditionStatus> = (0..d)
        .map(|i| ConditionStatus {
            component: i,
            variable: None,
            direction: None,
            holds: true,
            violations: 0,
        })
        .collect();
    let mut listed = vec![0usize; d];
    let mut visit = |p: &[i64], src: &Source<'_, F>, report: &mut CheckReport| -> Result<()> {
        let fp = src.get(p)?;
        for off in &offsets {
            let q: Vec<i64> = p.iter().zip(off).map(|(a, b)| a + b).collect();
            if !field.in_bounds(&q) {
                continue;
            }
            let fq = src.get(&q)?;
            for i in 0..d {
                if (fp[i] - fq[i]).abs() == 2 {
                    report.record(
                        &mut statuses[i],
                        &mut listed[i],
                        cfg,
                        Violation {
                            kind: "sign-jump".into(),
                            component: Some(i),
                            variable: None,
                            points: vec![p.to_vec(), q.clone()],
                            values: vec![fp.clone(), fq.clone()],
                        },
                    );
                }
            }
        }
        report.points_checked += 1;
        Ok(())
    };
    if exhaustive {
        let src = Source::Table(Table::build(field)?);
        for_each_index(field, |p| visit(p, &src, &mut report))?;
    } else {
        let src = Source::Direct(field);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.samples {
            let p = random_point(field, &mut rng);
            visit(&p, &src, &mut report)?;
        }
    }
    report.conditions = statuses;
    Ok(report)
}

/// Iterates the face `x_axis = value` of the field's box.
fn for_each_on_face<F: SignField + ?Sized>(
    field: &F,
    axis: usize,
    value: i64,
    visit: impl FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    let d = field.dim();
    let lower: Vec<i64> = (0..d).map(|j| if j == axis { value } else { field.bounds(j).0 }).collect();
    let upper: Vec<i64> = (0..d).map(|j| if j == axis { value } else { field.bounds(j).1 }).collect();
    let face = crate::domain::Section::new(field, lower, upper, vec![]);
    for_each_index(&face, visit)
}

fn face_points<F: SignField + ?Sized>(field: &F) -> u128 {
    (0..field.dim())
        .map(|j| {
            let (lo, hi) = field.bounds(j);
            field.point_count() / (hi - lo + 1) as u128
        })
        .max()
        .unwrap_or(0)
}

/// Which boundary rule a face check applies.
#[derive(Clone, Copy)]
enum FaceRule {
    Positive { strict: bool },
    Sum,
}

fn check_faces<F: SignField + ?Sized>(field: &F, rule: FaceRule, cfg: &CheckConfig) -> Result<CheckReport> {
    let d = field.dim();
    let exhaustive = face_points(field) <= cfg.cap;
    let property = match rule {
        FaceRule::Positive { strict: false } => "positive-switching",
        FaceRule::Positive { strict: true } => "strict-positive-switching",
        FaceRule::Sum => "sum-switching",
    };
    let mut report = CheckReport::new(property, if exhaustive { CheckMode::Exhaustive } else { CheckMode::Sampled });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..d {
        let mut status = ConditionStatus {
            component: i,
            variable: None,
            direction: None,
            holds: true,
            violations: 0,
        };
        let mut listed = 0;
        let (lo, hi) = field.bounds(i);
        for (face, value) in [("lower", lo), ("upper", hi)] {
            let mut visit = |p: &[i64]| -> Result<()> {
                let f = field.eval(p)?.as_i8();
                let ok = match (rule, face == "lower") {
                    (FaceRule::Positive { strict: true }, true) => f[i] < 0,
                    (FaceRule::Positive { strict: true }, false) => f[i] > 0,
                    (FaceRule::Positive { strict: false }, true) | (FaceRule::Sum, true) => f[i] <= 0,
                    (FaceRule::Positive { strict: false }, false) => f[i] >= 0,
                    (FaceRule::Sum, false) => f[..=i].iter().map(|&s| s as i64).sum::<i64>() >= 0,
                };
                report.points_checked += 1;
                if !ok {
                    report.record(
                        &mut status,
                        &mut listed,
                        cfg,
                        Violation {
                            kind: format!("{face}-face"),
                            component: Some(i),
                            variable: None,
                            points: vec![p.to_vec()],
                            values: vec![f],
                        },
                    );
                }
                Ok(())
            };
            if exhaustive {
                for_each_on_face(field, i, value, &mut visit)?;
            } else {
                for _ in 0..cfg.samples {
                    let mut p = random_point(field, &mut rng);
                    p[i] = value;
                    visit(&p)?;
                }
            }
        }
        report.conditions.push(status);
    }
    Ok(report)
}

/// `f_i <= 0` on the face `x_i = lo_i` and `f_i >= 0` on `x_i = hi_i`, per
/// component.
pub fn check_positive_switching<F: SignField + ?Sized>(field: &F, cfg: &CheckConfig) -> Result<CheckReport> {
    check_faces(field, FaceRule::Positive { strict: false }, cfg)
}

/// Strict variant: `f_i < 0` on the lower face and `f_i > 0` on the upper.
pub fn check_strict_switching<F: SignField + ?Sized>(field: &F, cfg: &CheckConfig) -> Result<CheckReport> {
    check_faces(field, FaceRule::Positive { strict: true }, cfg)
}

/// `f_i <= 0` on the lower face, and on the upper face `x_i = hi_i` the
/// prefix sum `f_1 + ... + f_i >= 0`.
pub fn check_sum_switching<F: SignField + ?Sized>(field: &F, cfg: &CheckConfig) -> Result<CheckReport> {
    check_faces(field, FaceRule::Sum, cfg)
}

/// Checks weak monotonicity of `f_i` along every grid line in direction
/// `x_j` for each declared `(i, j)` of the profile.
pub fn check_monotonicity<F: SignField + ?Sized>(
    field: &F,
    profile: &MonotoneProfile,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let d = field.dim();
    if profile.dim() != d {
        return Err(Error::Input(format!(
            "profile has dimension {}, field has {d}",
            profile.dim()
        )));
    }
    let exhaustive = field.point_count() <= cfg.cap;
    let mut report = CheckReport::new(
        "monotonicity",
        if exhaustive { CheckMode::Exhaustive } else { CheckMode::Sampled },
    );
    let src = if exhaustive {
        Source::Table(Table::build(field)?)
    } else {
        Source::Direct(field)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for (i, j, dir) in profile.conditions() {
        let mut status = ConditionStatus {
            component: i,
            variable: Some(j),
            direction: Some(dir),
            holds: true,
            violations: 0,
        };
        let mut listed = 0;
        let (_, hi_j) = field.bounds(j);
        let mut visit = |p: &[i64], report: &mut CheckReport| -> Result<()> {
            if p[j] >= hi_j {
                return Ok(());
            }
            let mut q = p.to_vec();
            q[j] += 1;
            let (a, b) = (src.get(p)?, src.get(&q)?);
            let ok = match dir {
                Monotonicity::Increasing => a[i] <= b[i],
                Monotonicity::Decreasing => a[i] >= b[i],
                Monotonicity::None => true,
            };
            report.points_checked += 1;
            if !ok {
                report.record(
                    &mut status,
                    &mut listed,
                    cfg,
                    Violation {
                        kind: "monotonicity".into(),
                        component: Some(i),
                        variable: Some(j),
                        points: vec![p.to_vec(), q],
                        values: vec![a, b],
                    },
                );
            }
            Ok(())
        };
        if exhaustive {
            for_each_index(field, |p| visit(p, &mut report))?;
        } else {
            let (lo_j, _) = field.bounds(j);
            for _ in 0..cfg.samples {
                let mut p = random_point(field, &mut rng);
                for t in lo_j..hi_j {
                    p[j] = t;
                    visit(&p, &mut report)?;
                }
            }
        }
        report.conditions.push(status);
    }
    Ok(report)
}

/// Largest observed ratio `|f(x) - f(y)|_max / |x - y|_norm` over random
/// pairs with `|x - y|_max <= radius`. `l1` selects the ℓ1 norm for the
/// displacement, otherwise the max norm is used.
pub fn lipschitz_spot_check(
    oracle: &RealOracle<'_>,
    domain: &BoxDomain,
    radius: f64,
    pairs: usize,
    l1: bool,
    seed: u64,
) -> Result<f64> {
    let d = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower: Vec<f64> = domain.lower().iter().map(|v| v.to_f64()).collect();
    let upper: Vec<f64> = domain.upper().iter().map(|v| v.to_f64()).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..d).map(|j| rng.gen_range(lower[j]..=upper[j])).collect();
        let y: Vec<f64> = (0..d)
            .map(|j| (x[j] + rng.gen_range(-radius..=radius)).clamp(lower[j], upper[j]))
            .collect();
        let dist = if l1 {
            x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>()
        } else {
            x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        if dist == 0.0 {
            continue;
        }
        let (fx, fy) = (oracle.eval(&x)?, oracle.eval(&y)?);
        let diff = fx.iter().zip(&fy).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / dist);
    }
    Ok(worst)
}
