//! Closed forms and numerics: centering constants, performance predictions,
//! the overlap function `f` and its phase transitions.

mod exponent;
mod ogp;
pub mod quadrature;

pub use crate::special::{log_normal_tail, normal_quantile, normal_tail};
pub use exponent::{log_pair_probability, overlap_exponent_numeric};
pub use ogp::{
    critical_alpha1, critical_alpha2, critical_alphas, f_overlap, overlap_prob_exponent_closed, projection_gap,
    quartic_stationary_roots, region_components, region_grid, Axis, CriticalAlphas, QuarticRoot, RegionGrid,
};

use serde::{Deserialize, Serialize};

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};
use crate::special::{normal_pdf, normal_upper_quantile};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `b_n = sqrt(2 ln n) - ln(4 pi ln n) / (2 sqrt(2 ln n))`, the centering of
/// the maximum of `n` standard normals.
pub fn b_n(n: f64) -> Result<f64> {
    if !(n >= 3.0) || !n.is_finite() {
        return Err(Error::Domain(format!("b_n needs a finite n >= 3, got {n}")));
    }
    let l = n.ln();
    let s = (2.0 * l).sqrt();
    Ok(s - (4.0 * std::f64::consts::PI * l).ln() / (2.0 * s))
}

/// Threshold `theta` with `Q(theta) = n^(-1/k)`.
pub fn theta_n(n: f64, k: usize) -> Result<f64> {
    if !(n >= 2.0) || !n.is_finite() || k == 0 {
        return Err(Error::Domain(format!("theta_n needs n >= 2 and k >= 1, got n={n}, k={k}")));
    }
    normal_upper_quantile((-n.ln() / k as f64).exp())
}

/// Value level each algorithm is expected to reach on an `n x n` Gaussian
/// matrix. The asymptotic forms are the limiting constants; the finite forms
/// replace `sqrt(2 ln n)` by the centering `b_n` of the relevant maxima.
pub fn predicted_ave(alg: Algorithm, n: f64, k: usize, finite_correction: bool) -> Result<f64> {
    if !(n >= 3.0) || !n.is_finite() || k == 0 || k as f64 > n {
        return Err(Error::Domain(format!("predictions need n >= 3 and 1 <= k <= n, got n={n}, k={k}")));
    }
    let kf = k as f64;
    let level = (2.0 * n.ln() / kf).sqrt();
    Ok(match (alg, finite_correction) {
        (Algorithm::Las, false) | (Algorithm::Greedy, false) => level,
        (Algorithm::Las, true) => b_n(n)? / kf.sqrt(),
        (Algorithm::Greedy, true) => theta_n(n, k)?,
        (Algorithm::Igp, false) => 4.0 / 3.0 * level,
        (Algorithm::Igp, true) => {
            let roots: f64 = (1..=k).map(|r| (r as f64).sqrt()).sum();
            let weight = 2.0 * roots - kf.sqrt();
            weight * b_n((n / kf).floor())? / (kf * kf)
        }
        (Algorithm::Brute, _) => 2.0 * (n.ln() / kf).sqrt(),
    })
}

/// Bracket `phi(u)/u * (1 - 2/u^2) <= Q(u) <= phi(u)/u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn tail_bounds(u: f64) -> Result<TailBounds> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("tail bounds need u > 0, got {u}")));
    }
    let upper = normal_pdf(u) / u;
    Ok(TailBounds { lower: upper * (1.0 - 2.0 / (u * u)), upper })
}

/// Standard Gumbel law, the limit of `sqrt(2 ln n) (max - b_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GumbelReference {
    pub mean: f64,
    pub variance: f64,
}

impl GumbelReference {
    pub fn cdf(&self, w: f64) -> f64 {
        gumbel_cdf(w)
    }
}

pub fn gumbel_cdf(w: f64) -> f64 {
    (-(-w).exp()).exp()
}

pub fn gumbel_reference() -> GumbelReference {
    GumbelReference { mean: EULER_GAMMA, variance: std::f64::consts::PI.powi(2) / 6.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_n_reference_value() {
        // mpmath, 30 digits
        assert!((b_n(100.0).unwrap() - 2.366_254_8).abs() < 1e-6);
        assert!(b_n(2.999).is_err());
        assert!(b_n(f64::NAN).is_err());
        assert!(b_n(3.0).unwrap().is_finite());
    }

    #[test]
    fn b_n_increases_and_stays_below_leading_term() {
        let mut prev = f64::NEG_INFINITY;
        let mut n = 3u64;
        while n <= 1_000_000 {
            let b = b_n(n as f64).unwrap();
            assert!(b > prev, "n={n}");
            assert!(b < (2.0 * (n as f64).ln()).sqrt());
            prev = b;
            n += if n < 1000 { 1 } else { 997 };
        }
    }

    #[test]
    fn theta_n_cases() {
        assert_eq!(theta_n(16.0, 4).unwrap(), 0.0);
        let t = theta_n(1e4, 3).unwrap();
        // scipy norm.isf(1e4 ** (-1/3))
        assert!((t - 1.680_645_580_923_412_2).abs() < 1e-12);
        // the ratio to sqrt(2 ln n / k) climbs towards 1 only slowly
        let mut prev = 0.0;
        for e in [4.0, 8.0, 16.0, 64.0, 256.0] {
            let n = 10f64.powf(e);
            let ratio = theta_n(n, 3).unwrap() / (2.0 * n.ln() / 3.0).sqrt();
            assert!(ratio > prev && ratio < 1.0, "n=1e{e}: {ratio}");
            prev = ratio;
        }
        let target = 1e4f64.powf(-1.0 / 3.0);
        assert!((normal_tail(t) / target - 1.0).abs() < 1e-10);
        let mut prev = f64::NEG_INFINITY;
        for e in 1..40 {
            let t = theta_n(10f64.powf(e as f64 / 2.0).max(2.0), 3).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(theta_n(1.5, 2).is_err());
        assert!(theta_n(10.0, 0).is_err());
    }

    #[test]
    fn predictions() {
        let las = predicted_ave(Algorithm::Las, 5000.0, 3, false).unwrap();
        assert!((las - 2.383).abs() < 1e-3);
        let las_finite = predicted_ave(Algorithm::Las, 5000.0, 3, true).unwrap();
        assert!((las_finite - 2.056).abs() < 1e-3);
        assert_eq!(predicted_ave(Algorithm::Greedy, 1e4, 3, true).unwrap(), theta_n(1e4, 3).unwrap());
        let igp = predicted_ave(Algorithm::Igp, 4.0, 1, true).unwrap();
        assert_eq!(igp, b_n(4.0).unwrap());
        let global = predicted_ave(Algorithm::Brute, 100.0, 4, true).unwrap();
        assert_eq!(global, predicted_ave(Algorithm::Brute, 100.0, 4, false).unwrap());
        assert!(predicted_ave(Algorithm::Las, 2.0, 1, false).is_err());
        assert!(predicted_ave(Algorithm::Las, 10.0, 11, false).is_err());
    }

    #[test]
    fn igp_prediction_approaches_the_four_thirds_limit() {
        let mut prev_gap = f64::INFINITY;
        for e in [8.0, 16.0, 32.0, 64.0, 128.0, 256.0] {
            let n = 10f64.powf(e);
            let k = n.ln().sqrt().floor() as usize;
            let ratio = predicted_ave(Algorithm::Igp, n, k, true).unwrap()
                / predicted_ave(Algorithm::Igp, n, k, false).unwrap();
            let gap = (1.0 - ratio).abs();
            assert!(gap < prev_gap, "n=1e{e}: ratio {ratio}");
            prev_gap = gap;
        }
        assert!(prev_gap < 0.08);
    }

    #[test]
    fn tail_sandwich_on_a_grid() {
        for step in 0..=600 {
            let u = 2.0 + step as f64 * 0.01;
            let b = tail_bounds(u).unwrap();
            let q = normal_tail(u);
            assert!(b.lower <= q && q <= b.upper, "u={u}");
            assert!(0.0 <= b.lower);
        }
        assert!(tail_bounds(0.0).is_err());
    }

    #[test]
    fn gumbel() {
        let g = gumbel_reference();
        assert!((g.cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((g.mean - 0.577_215_664_9).abs() < 1e-9);
        assert!((g.variance - 1.644_934_066_848_226).abs() < 1e-15);
        let mut prev = 0.0;
        for i in -100..100 {
            let c = g.cdf(i as f64 * 0.1);
            assert!(c >= prev);
            prev = c;
        }
    }
}
