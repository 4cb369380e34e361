//! Private convex costs `f_v` with closed-form proximal maps, and the
//! centralized minimizer used as the error reference.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_rho, Error, Result};

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        Point(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance_sq(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point(vec![x])
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Convex, proper, closed cost with an exact proximal map.
///
/// * `Quadratic { a, c }`: `a * ||y - c||^2` with `a >= 0`.
/// * `Zero`: the zero function.
/// * `AbsoluteValue { c }`: `||y - c||_1` (the absolute value in one dimension).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum CostFunction {
    Quadratic { a: f64, c: Point },
    Zero,
    AbsoluteValue { c: Point },
}

impl CostFunction {
    pub fn quadratic(a: f64, c: impl Into<Point>) -> Result<Self> {
        let f = CostFunction::Quadratic { a, c: c.into() };
        f.check()?;
        Ok(f)
    }

    pub fn absolute_value(c: impl Into<Point>) -> Result<Self> {
        let f = CostFunction::AbsoluteValue { c: c.into() };
        f.check()?;
        Ok(f)
    }

    /// Validates parameters; deserialized costs must go through this.
    pub fn check(&self) -> Result<()> {
        match self {
            CostFunction::Quadratic { a, c } => {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(Error::InvalidCost(format!(
                        "quadratic scale must be finite and nonnegative, got {a}"
                    )));
                }
                check_center(c)
            }
            CostFunction::AbsoluteValue { c } => check_center(c),
            CostFunction::Zero => Ok(()),
        }
    }

    /// Dimension fixed by the parameters, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            CostFunction::Quadratic { c, .. } | CostFunction::AbsoluteValue { c } => Some(c.dim()),
            CostFunction::Zero => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        match self.dim() {
            Some(d) if d != x.len() => Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            CostFunction::Quadratic { a, c } => a * c.distance_sq(x),
            CostFunction::Zero => 0.0,
            CostFunction::AbsoluteValue { c } => {
                c.iter().zip(x).map(|(ci, xi)| (xi - ci).abs()).sum()
            }
        })
    }

    /// `argmin_y f(y) + rho/2 ||y - u||^2`.
    pub fn prox(&self, rho: f64, u: &[f64]) -> Result<Point> {
        check_rho(rho)?;
        self.check_dim(u)?;
        Ok(match self {
            CostFunction::Quadratic { a, c } => {
                let denom = 2.0 * a + rho;
                c.iter()
                    .zip(u)
                    .map(|(ci, ui)| (2.0 * a * ci + rho * ui) / denom)
                    .collect::<Vec<_>>()
                    .into()
            }
            CostFunction::Zero => u.to_vec().into(),
            CostFunction::AbsoluteValue { c } => {
                let threshold = 1.0 / rho;
                c.iter()
                    .zip(u)
                    .map(|(ci, ui)| ci + soft_threshold(ui - ci, threshold))
                    .collect::<Vec<_>>()
                    .into()
            }
        })
    }

    /// Gradient where the cost is differentiable, `None` at kinks.
    pub fn gradient(&self, x: &[f64]) -> Result<Option<Point>> {
        self.check_dim(x)?;
        Ok(match self {
            CostFunction::Quadratic { a, c } => Some(
                c.iter()
                    .zip(x)
                    .map(|(ci, xi)| 2.0 * a * (xi - ci))
                    .collect::<Vec<_>>()
                    .into(),
            ),
            CostFunction::Zero => Some(Point::zeros(x.len())),
            CostFunction::AbsoluteValue { c } => {
                if c.iter().zip(x).any(|(ci, xi)| ci == xi) {
                    None
                } else {
                    Some(
                        c.iter()
                            .zip(x)
                            .map(|(ci, xi)| (xi - ci).signum())
                            .collect::<Vec<_>>()
                            .into(),
                    )
                }
            }
        })
    }
}

fn check_center(c: &Point) -> Result<()> {
    if c.dim() == 0 {
        return Err(Error::InvalidCost(
            "center must have at least one coordinate".into(),
        ));
    }
    if !c.is_finite() {
        return Err(Error::InvalidCost("center must be finite".into()));
    }
    Ok(())
}

pub fn soft_threshold(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        x - threshold
    } else if x < -threshold {
        x + threshold
    } else {
        0.0
    }
}

/// `sum_v f_v(x)`.
pub fn aggregate_value(costs: &[CostFunction], x: &[f64]) -> Result<f64> {
    costs.iter().map(|f| f.evaluate(x)).sum()
}

const GRID_POINTS: usize = 2001;

/// Minimizer of `sum_v f_v` over `R^dim`.
///
/// Quadratic (and zero) costs with a positive total scale use the weighted
/// mean `sum a_v c_v / sum a_v`. Otherwise each coordinate is minimized
/// separately (every variant is coordinate-separable) by a grid scan over
/// the hull of the centers refined by bisection on the subgradient.
pub fn centralized_minimizer(costs: &[CostFunction], dim: usize) -> Result<Point> {
    if costs.is_empty() {
        return Err(Error::UnsupportedMix("no cost functions".into()));
    }
    for f in costs {
        if let Some(d) = f.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
        }
    }

    let all_quadratic = costs
        .iter()
        .all(|f| matches!(f, CostFunction::Quadratic { .. } | CostFunction::Zero));
    let total_scale: f64 = costs
        .iter()
        .map(|f| match f {
            CostFunction::Quadratic { a, .. } => *a,
            _ => 0.0,
        })
        .sum();
    if all_quadratic && total_scale > 0.0 {
        let mut x = Point::zeros(dim);
        for f in costs {
            if let CostFunction::Quadratic { a, c } = f {
                for (xi, ci) in x.iter_mut().zip(c.iter()) {
                    *xi += a * ci;
                }
            }
        }
        x.iter_mut().for_each(|xi| *xi /= total_scale);
        return Ok(x);
    }

    let has_center = costs.iter().any(|f| match f {
        CostFunction::Quadratic { a, .. } => *a > 0.0,
        CostFunction::AbsoluteValue { .. } => true,
        CostFunction::Zero => false,
    });
    if !has_center {
        return Err(Error::UnsupportedMix(
            "aggregate cost is constant; no unique minimizer".into(),
        ));
    }

    let mut x = Point::zeros(dim);
    for (i, xi) in x.iter_mut().enumerate() {
        let centers = costs.iter().filter_map(|f| match f {
            CostFunction::Quadratic { a, c } if *a > 0.0 => Some(c[i]),
            CostFunction::AbsoluteValue { c } => Some(c[i]),
            _ => None,
        });
        let (lo, hi) = centers.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c), hi.max(c))
        });
        // Right derivative of the coordinate cost; nondecreasing in t.
        let slope = |t: f64| -> f64 {
            costs
                .iter()
                .map(|f| match f {
                    CostFunction::Quadratic { a, c } => 2.0 * a * (t - c[i]),
                    CostFunction::AbsoluteValue { c } => {
                        if t >= c[i] {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    CostFunction::Zero => 0.0,
                })
                .sum()
        };
        *xi = minimize_convex_1d(slope, lo - 1.0, hi + 1.0);
    }
    Ok(x)
}

/// Minimizer of a convex function on `[lo, hi]` given its right
/// derivative: a grid scan brackets the sign change, then bisection
/// narrows it to adjacent floats.
fn minimize_convex_1d(slope: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let first_up = (0..GRID_POINTS)
        .find(|&i| slope(lo + step * i as f64) >= 0.0)
        .unwrap_or(GRID_POINTS - 1);
    if first_up == 0 {
        return lo;
    }
    let mut a = lo + step * (first_up - 1) as f64;
    let mut b = lo + step * first_up as f64;
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return b;
        }
        if slope(mid) >= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
}
