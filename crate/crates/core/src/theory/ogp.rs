use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `f(alpha, y1, y2) = 4 - y1 - y2 - 2 alpha^2 / (1 + y1 y2)`.
pub fn f_overlap(alpha: f64, y1: f64, y2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y1) || !(0.0..=1.0).contains(&y2) {
        return Err(Error::Domain(format!("overlaps must lie in [0, 1], got ({y1}, {y2})")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    Ok(f_unchecked(alpha, y1, y2))
}

#[inline]
fn f_unchecked(alpha: f64, y1: f64, y2: f64) -> f64 {
    4.0 - y1 - y2 - 2.0 * alpha * alpha / (1.0 + y1 * y2)
}

/// Exponent `-2 alpha^2 k^2 / (k^2 + k1 k2)` of the pair probability.
pub fn overlap_prob_exponent_closed(alpha: f64, k: usize, k1: usize, k2: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if k1 > k || k2 > k {
        return Err(Error::Domain(format!("need k1, k2 <= k, got k1={k1}, k2={k2}, k={k}")));
    }
    let kk = (k * k) as f64;
    Ok(-2.0 * alpha * alpha * kk / (kk + (k1 * k2) as f64))
}

fn quartic(alpha: f64, y: f64) -> f64 {
    let y2 = y * y;
    y2 * y2 + 2.0 * y2 - 2.0 * alpha * alpha * y + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticRoot {
    pub y: f64,
    /// Set for a double root (the quartic touches zero at its minimum).
    pub double: bool,
}

/// Bisection to the last representable bit on a bracket with a sign change.
fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizer of the quartic: the real root of `y^3 + y = alpha^2 / 2`.
fn quartic_minimizer(alpha: f64) -> f64 {
    let c = 0.5 * alpha * alpha;
    bisect(|y| y * y * y + y - c, 0.0, c.max(1.0))
}

/// Real roots in `[0, 1]` of `y^4 + 2 y^2 - 2 alpha^2 y + 1`, ascending.
///
/// The quartic is convex with value 1 at zero, so it has at most two real
/// roots, both nonnegative, one on each side of its minimizer.
pub fn quartic_stationary_roots(alpha: f64) -> Vec<QuarticRoot> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Vec::new();
    }
    let ym = quartic_minimizer(alpha);
    let pm = quartic(alpha, ym);
    if pm.abs() <= 1e-14 {
        return if ym <= 1.0 { vec![QuarticRoot { y: ym, double: true }] } else { Vec::new() };
    }
    if pm > 0.0 {
        return Vec::new();
    }
    let g = |y: f64| quartic(alpha, y);
    let left = bisect(g, 0.0, ym);
    let right = bisect(g, ym, ym + 1.0 + alpha * alpha);
    // a root a rounding error past 1 (alpha = sqrt 2) is the corner root
    [left, right]
        .into_iter()
        .filter(|y| (0.0..=1.0 + 1e-9).contains(y))
        .map(|y| QuarticRoot { y: y.min(1.0), double: false })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAlphas {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// `sqrt(3/2)`: the largest alpha at which both boundary minima
/// `f(alpha, 1, 0) = 3 - 2 alpha^2` and `f(alpha, 1, 1) = 2 - alpha^2` are
/// nonnegative and no interior stationary point exists yet.
pub fn critical_alpha1() -> Result<f64> {
    let alpha = 1.5f64.sqrt();
    let edge = f_unchecked(alpha, 1.0, 0.0);
    let corner = f_unchecked(alpha, 1.0, 1.0);
    if edge.abs() > 1e-12 || corner < 0.0 || !quartic_stationary_roots(alpha).is_empty() {
        return Err(Error::Numeric(format!(
            "boundary conditions fail at sqrt(3/2): f(a,1,0)={edge}, f(a,1,1)={corner}"
        )));
    }
    // just above, the edge value turns negative
    if f_unchecked(alpha + 1e-9, 1.0, 0.0) >= 0.0 {
        return Err(Error::Numeric("f(a,1,0) does not change sign at sqrt(3/2)".into()));
    }
    Ok(alpha)
}

/// Smallest alpha on `(alpha1, sqrt 2)` at which the diagonal stationary
/// point `y` (a root of the quartic) has `f(alpha, y, y) = 0`, returned with
/// that `y`.
pub fn critical_alpha2_point() -> Result<(f64, f64)> {
    let alpha1 = critical_alpha1()?;
    let top = std::f64::consts::SQRT_2;
    let min_quartic = |a: f64| quartic(a, quartic_minimizer(a));
    if min_quartic(alpha1) <= 0.0 || min_quartic(top) >= 0.0 {
        return Err(Error::Numeric("stationary points do not appear inside (alpha1, sqrt 2)".into()));
    }
    // first alpha with a (double) stationary root
    let alpha0 = bisect(min_quartic, alpha1, top);

    let h = |a: f64| -> f64 {
        let roots = quartic_stationary_roots(a);
        let ys: Vec<f64> =
            if roots.is_empty() { vec![quartic_minimizer(a)] } else { roots.iter().map(|r| r.y).collect() };
        ys.into_iter().map(|y| f_unchecked(a, y, y)).fold(f64::INFINITY, f64::min)
    };
    let (h_lo, h_hi) = (h(alpha0), h(top - 1e-12));
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return Err(Error::Numeric(format!("no sign change of f at stationary points: {h_lo} .. {h_hi}")));
    }
    let alpha2 = bisect(h, alpha0, top - 1e-12);
    let y = quartic_stationary_roots(alpha2)
        .into_iter()
        .map(|r| r.y)
        .min_by(|a, b| f_unchecked(alpha2, *a, *a).total_cmp(&f_unchecked(alpha2, *b, *b)))
        .ok_or_else(|| Error::Numeric("no stationary root at alpha2".into()))?;
    Ok((alpha2, y))
}

pub fn critical_alpha2() -> Result<f64> {
    Ok(critical_alpha2_point()?.0)
}

pub fn critical_alphas() -> Result<CriticalAlphas> {
    Ok(CriticalAlphas { alpha1: critical_alpha1()?, alpha2: critical_alpha2()? })
}

/// `f(alpha, ., .)` sampled at cell centers of a square grid on `[0, 1]^2`;
/// row `i` is the `y1` cell, column `j` the `y2` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub alpha: f64,
    pub resolution: usize,
    pub f_values: Array2<f64>,
    pub mask: Array2<bool>,
}

pub fn region_grid(alpha: f64, resolution: usize) -> Result<RegionGrid> {
    if resolution < 16 {
        return Err(Error::Domain(format!("resolution must be at least 16, got {resolution}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    let r = resolution as f64;
    let f_values = Array2::from_shape_fn((resolution, resolution), |(i, j)| {
        f_unchecked(alpha, (i as f64 + 0.5) / r, (j as f64 + 0.5) / r)
    });
    let mask = f_values.mapv(|v| v >= 0.0);
    Ok(RegionGrid { alpha, resolution, f_values, mask })
}

/// Number of 4-connected components of the mask.
pub fn region_components(grid: &RegionGrid) -> usize {
    let (rows, cols) = grid.mask.dim();
    let mut seen = Array2::from_elem((rows, cols), false);
    let mut stack = Vec::new();
    let mut count = 0;
    for start in grid.mask.indexed_iter().filter(|(_, &on)| on).map(|(p, _)| p) {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some((i, j)) = stack.pop() {
            let neighbours = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
            for (a, b) in neighbours {
                if a < rows && b < cols && grid.mask[(a, b)] && !seen[(a, b)] {
                    seen[(a, b)] = true;
                    stack.push((a, b));
                }
            }
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Y1,
    Y2,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y1" => Ok(Axis::Y1),
            "y2" => Ok(Axis::Y2),
            _ => Err(Error::Parse(format!("unknown axis {s:?}, expected y1 or y2"))),
        }
    }
}

/// Widest empty stretch between occupied stretches of the mask's projection
/// onto `axis`, as `(lo, hi)` in `[0, 1]`; `None` when the projection is a
/// single interval (or empty).
pub fn projection_gap(grid: &RegionGrid, axis: Axis) -> Option<(f64, f64)> {
    let res = grid.resolution;
    let occupied: Vec<bool> = (0..res)
        .map(|t| match axis {
            Axis::Y1 => grid.mask.row(t).iter().any(|&b| b),
            Axis::Y2 => grid.mask.column(t).iter().any(|&b| b),
        })
        .collect();
    let first = occupied.iter().position(|&b| b)?;
    let last = occupied.iter().rposition(|&b| b)?;
    let mut best: Option<(usize, usize)> = None;
    let mut t = first;
    while t <= last {
        if occupied[t] {
            t += 1;
            continue;
        }
        let start = t;
        while !occupied[t] {
            t += 1;
        }
        if best.is_none_or(|(a, b)| t - start > b - a) {
            best = Some((start, t));
        }
    }
    best.map(|(a, b)| (a as f64 / res as f64, b as f64 / res as f64))
}
