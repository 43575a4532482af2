//! Growth exponent of the expected number of submatrix pairs with a given
//! value level and overlap, evaluated exactly at finite `n`.

use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::special::{log_normal_interval, log_sum_exp};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Golden-section search for the maximum of a unimodal `g` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(g: &F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    0.5 * (a + b)
}

/// `ln P(X + Y1 in [lo, hi], X + Y2 in [lo, hi])` for independent
/// `X ~ N(0, k1 k2)` and `Y1, Y2 ~ N(0, k^2 - k1 k2)`.
///
/// Conditioning on `X = x` leaves the square of a Gaussian window
/// probability; the log of the integrand is concave, so the integral is
/// taken around its mode out to where the integrand has fallen by `e^-60`.
pub fn log_pair_probability(k: usize, k1: usize, k2: usize, lo: f64, hi: f64) -> Result<f64> {
    if k == 0 || k1 > k || k2 > k {
        return Err(Error::Domain(format!("need 0 <= k1, k2 <= k and k >= 1, got k={k}, k1={k1}, k2={k2}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("need a finite window lo < hi, got [{lo}, {hi}]")));
    }
    let kk = (k * k) as f64;
    let shared = (k1 * k2) as f64;
    let kf = k as f64;
    if k1 * k2 == 0 {
        return Ok(2.0 * log_normal_interval(lo / kf, hi / kf));
    }
    if k1 * k2 == k * k {
        return Ok(log_normal_interval(lo / kf, hi / kf));
    }
    let sx = shared.sqrt();
    let sy = (kk - shared).sqrt();
    let g = |x: f64| -> f64 {
        let z = x / sx;
        -0.5 * z * z - LN_SQRT_2PI - sx.ln() + 2.0 * log_normal_interval((lo - x) / sy, (hi - x) / sy)
    };

    let mid = 0.5 * (lo + hi);
    let mode = if mid == 0.0 { 0.0 } else { golden_max(&g, mid.min(0.0), mid.max(0.0)) };
    let peak = g(mode);
    if !peak.is_finite() {
        return Err(Error::Numeric(format!("integrand is not finite at its mode x={mode}")));
    }

    let h = 1e-3 * sx.min(sy);
    let curvature = (g(mode + h) - 2.0 * peak + g(mode - h)) / (h * h);
    let sigma = if curvature < 0.0 { (-1.0 / curvature).sqrt().min(sx) } else { sx.min(sy) };
    let reach = |dir: f64| -> Result<f64> {
        let mut step = sigma;
        for _ in 0..200 {
            let x = mode + dir * step;
            if g(x) < peak - 60.0 {
                return Ok(x);
            }
            step *= 1.5;
        }
        Err(Error::Numeric(format!("integrand does not decay away from x={mode}")))
    };
    let (left, right) = (reach(-1.0)?, reach(1.0)?);
    let integral = integrate(|x| (g(x) - peak).exp(), left, right, 0.0, 1e-11, 2000)?;
    if !(integral > 0.0) {
        return Err(Error::Numeric(format!("nonpositive integral {integral} on [{left}, {right}] around mode {mode}")));
    }
    Ok(peak + integral.ln())
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

/// `ln` of the multinomial `n! / ((k - s)! s! (k - s)! (n - 2k + s)!)`: the
/// number of ways to pick two `k`-subsets of `[n]` sharing `s` elements.
fn ln_pair_count(n: f64, k: usize, s: usize) -> f64 {
    let falling: f64 = (0..2 * k - s).map(|i| (n - i as f64).ln()).sum();
    falling - 2.0 * ln_factorial(k - s) - ln_factorial(s)
}

/// Integers strictly inside `((y - delta) k, (y + delta) k)`, clipped to `[0, k]`.
fn window(y: f64, delta: f64, k: usize) -> Vec<usize> {
    let kf = k as f64;
    (0..=k)
        .filter(|&s| {
            let s = s as f64;
            s > (y - delta) * kf && s < (y + delta) * kf
        })
        .collect()
}

/// `ln E|O(alpha, y1, y2, delta)| / (k ln n)`: the expected number of
/// ordered pairs of `k x k` submatrices with both averages in
/// `(alpha +- delta) sqrt(2 ln n / k)` sharing `k1` rows and `k2` columns,
/// summed over the integers `k1`, `k2` in the `delta`-windows around
/// `y1 k`, `y2 k`.
///
/// Returns `-inf` when a window holds no integer.
pub fn overlap_exponent_numeric(n: f64, k: usize, alpha: f64, y1: f64, y2: f64, delta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("need k >= 2, got {k}")));
    }
    if !n.is_finite() || n < (2 * k) as f64 || n < 3.0 {
        return Err(Error::Domain(format!("need finite n >= max(2k, 3), got n={n}, k={k}")));
    }
    if !(delta > 0.0 && delta < 0.1) {
        return Err(Error::Domain(format!("delta must lie in (0, 0.1), got {delta}")));
    }
    if !(alpha > delta) || !alpha.is_finite() {
        return Err(Error::Domain(format!("need alpha > delta, got alpha={alpha}")));
    }
    if !(0.0..=1.0).contains(&y1) || !(0.0..=1.0).contains(&y2) {
        return Err(Error::Domain(format!("overlaps must lie in [0, 1], got ({y1}, {y2})")));
    }

    let kf = k as f64;
    let scale = kf * kf * (2.0 * n.ln() / kf).sqrt();
    let (lo, hi) = ((alpha - delta) * scale, (alpha + delta) * scale);
    let mut terms = Vec::new();
    for k1 in window(y1, delta, k) {
        for k2 in window(y2, delta, k) {
            let count = ln_pair_count(n, k, k1) + ln_pair_count(n, k, k2);
            terms.push(count + log_pair_probability(k, k1, k2, lo, hi)?);
        }
    }
    Ok(log_sum_exp(&terms) / (kf * n.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;
    use crate::theory::{f_overlap, overlap_prob_exponent_closed};

    /// Plain trapezoid over a wide fixed range, for moderate windows where
    /// nothing underflows.
    fn trapezoid_pair_probability(k: usize, k1: usize, k2: usize, lo: f64, hi: f64) -> f64 {
        let sx = ((k1 * k2) as f64).sqrt();
        let sy = ((k * k - k1 * k2) as f64).sqrt();
        let steps = 200_000;
        let (a, b) = (-12.0 * sx, 12.0 * sx);
        let dx = (b - a) / steps as f64;
        let mut sum = 0.0;
        for s in 0..=steps {
            let x = a + s as f64 * dx;
            let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
            let p = normal_cdf((hi - x) / sy) - normal_cdf((lo - x) / sy);
            sum += w * (-0.5 * (x / sx).powi(2)).exp() / (sx * (2.0 * std::f64::consts::PI).sqrt()) * p * p;
        }
        sum * dx
    }

    #[test]
    fn pair_probability_matches_direct_integration() {
        for &(k, k1, k2, lo, hi) in
            &[(4, 2, 2, 1.0, 5.0), (5, 3, 1, -2.0, 3.0), (6, 5, 6, 4.0, 9.0), (3, 1, 1, 0.0, 0.5)]
        {
            let direct = trapezoid_pair_probability(k, k1, k2, lo, hi);
            let ours = log_pair_probability(k, k1, k2, lo, hi).unwrap().exp();
            assert!((ours / direct - 1.0).abs() < 1e-8, "{k} {k1} {k2}: {ours} vs {direct}");
        }
    }

    #[test]
    fn degenerate_covariances() {
        let lo = 3.0;
        let hi = 7.0;
        let single = log_normal_interval(lo / 5.0, hi / 5.0);
        assert_eq!(log_pair_probability(5, 0, 3, lo, hi).unwrap(), 2.0 * single);
        assert_eq!(log_pair_probability(5, 5, 5, lo, hi).unwrap(), single);
        // a single shared cell barely correlates the two sums
        let nearly_disjoint = log_pair_probability(50, 1, 1, lo * 10.0, hi * 10.0).unwrap();
        let disjoint = log_pair_probability(50, 0, 1, lo * 10.0, hi * 10.0).unwrap();
        assert!((nearly_disjoint - disjoint).abs() < 1e-3);
        assert!(log_pair_probability(5, 6, 0, lo, hi).is_err());
        assert!(log_pair_probability(5, 1, 1, hi, lo).is_err());
    }

    #[test]
    fn pair_counts() {
        // n = 6, k = 2, s = 1: 6!/(1! 1! 1! 3!) = 120
        assert!((ln_pair_count(6.0, 2, 1) - 120f64.ln()).abs() < 1e-12);
        // s = k: C(n, k)
        assert!((ln_pair_count(10.0, 3, 3) - 120f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn windows() {
        assert_eq!(window(0.25, 0.02, 20), vec![5]);
        assert_eq!(window(1.0, 0.02, 20), vec![20]);
        assert_eq!(window(0.0, 0.02, 20), vec![0]);
        assert!(window(0.51, 0.01, 10).is_empty());
        assert_eq!(overlap_exponent_numeric(1e6, 10, 1.2, 0.51, 0.5, 0.01).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn reference_values_at_large_n() {
        // independent evaluation in 40-digit arithmetic (mpmath quad)
        let cases = [
            (1.1, 0.25, 1.069_089_881),
            (1.1, 0.5, 0.954_342_467_8),
            (1.2, 0.25, 0.643_358_129_2),
            (1.2, 0.5, 0.592_422_643_2),
            (1.3, 0.25, 0.180_005_292_3),
            (1.3, 0.5, 0.198_528_756),
        ];
        for (alpha, y, expected) in cases {
            let e = overlap_exponent_numeric(1e12, 20, alpha, y, y, 0.02).unwrap();
            assert!((e - expected).abs() < 1e-8, "alpha {alpha} y {y}: {e}");
            assert!((e - f_overlap(alpha, y, y).unwrap()).abs() <= 0.25);
        }
    }

    #[test]
    fn gap_to_f_shrinks_with_n() {
        let f = f_overlap(1.2, 0.5, 0.5).unwrap();
        let gaps: Vec<f64> = [1e6, 1e8, 1e10, 1e12]
            .iter()
            .map(|&n| overlap_exponent_numeric(n, 20, 1.2, 0.5, 0.5, 0.02).unwrap() - f)
            .collect();
        let expected = [-0.280_816_09, -0.192_348_04, -0.139_129_74, -0.103_577_36];
        for (g, e) in gaps.iter().zip(expected) {
            assert!((g - e).abs() < 1e-7, "{gaps:?}");
        }
        assert!(gaps.windows(2).all(|w| w[1].abs() < w[0].abs()));
    }

    #[test]
    fn full_overlap_probability_tends_to_minus_alpha_squared() {
        let (k, alpha) = (10usize, 1.2);
        let mut prev = f64::INFINITY;
        for e in [10.0, 30.0, 100.0, 300.0] {
            let n = 10f64.powf(e);
            let kf = k as f64;
            let scale = kf * kf * (2.0 * n.ln() / kf).sqrt();
            let lp = log_pair_probability(k, k, k, alpha * scale, (alpha + 1e-3) * scale).unwrap() / (kf * n.ln());
            let closed = overlap_prob_exponent_closed(alpha, k, k, k).unwrap();
            let gap = (lp - closed).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn exponent_decreases_in_alpha() {
        let mut prev = f64::INFINITY;
        for alpha in [1.05, 1.1, 1.15, 1.2, 1.25, 1.3, 1.35] {
            let e = overlap_exponent_numeric(1e10, 12, alpha, 0.5, 0.25, 0.02).unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn argument_checks() {
        assert!(overlap_exponent_numeric(1e6, 1, 1.2, 0.5, 0.5, 0.02).is_err());
        assert!(overlap_exponent_numeric(30.0, 20, 1.2, 0.5, 0.5, 0.02).is_err());
        assert!(overlap_exponent_numeric(1e6, 5, 1.2, 0.5, 0.5, 0.2).is_err());
        assert!(overlap_exponent_numeric(1e6, 5, 1.2, 1.5, 0.5, 0.02).is_err());
    }
}
