//! Standard normal tail, log-tail and quantile.
//!
//! `erfc` follows W. J. Cody's rational Chebyshev approximations; the
//! quantile is Wichura's AS241 (PPND16). Both are accurate to a few ulps
//! in double precision.

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_869_5e-1;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

/// Above this the tail is evaluated through its asymptotic log expansion.
const ASYMPTOTIC_CUTOFF: f64 = 8.0;

#[inline]
fn exp_neg_square(y: f64) -> f64 {
    // exp(-y^2) split as exp(-ysq^2) * exp(-del) to limit cancellation
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Complementary error function, Cody's three-interval rational form.
pub fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.161_123_743_870_565_60e0,
        1.138_641_541_510_501_56e2,
        3.774_852_376_853_020_21e2,
        3.209_377_589_138_469_47e3,
        1.857_777_061_846_031_53e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_09e1,
        2.440_246_379_344_441_73e2,
        1.282_616_526_077_372_28e3,
        2.844_236_833_439_170_62e3,
    ];
    const C: [f64; 9] = [
        5.641_884_969_886_700_89e-1,
        8.883_149_794_388_375_94e0,
        6.611_919_063_714_162_95e1,
        2.986_351_381_974_001_31e2,
        8.819_522_212_417_690_90e2,
        1.712_047_612_634_070_58e3,
        2.051_078_377_826_071_47e3,
        1.230_339_354_797_997_25e3,
        2.153_115_354_744_038_46e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_47e1,
        1.176_939_508_913_124_99e2,
        5.371_811_018_620_098_58e2,
        1.621_389_574_566_690_19e3,
        3.290_799_235_733_459_63e3,
        4.362_619_090_143_247_16e3,
        3.439_367_674_143_721_64e3,
        1.230_339_354_803_749_42e3,
    ];
    const P: [f64; 6] = [
        3.053_266_349_612_323_44e-1,
        3.603_448_999_498_044_39e-1,
        1.257_817_261_112_292_46e-1,
        1.608_378_514_874_227_66e-2,
        6.587_491_615_298_378_03e-4,
        1.631_538_713_730_209_78e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_42e0,
        1.872_952_849_923_460_47e0,
        5.279_051_029_514_284_12e-1,
        6.051_834_131_244_131_91e-2,
        2.335_204_976_268_691_85e-3,
    ];
    const THRESH: f64 = 0.468_75;
    const XBIG: f64 = 26.543;

    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    let result = if y <= THRESH {
        let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + A[i]) * ysq;
            den = (den + B[i]) * ysq;
        }
        // erf(x) directly; sign already carried by x
        return 1.0 - x * (num + A[3]) / (den + B[3]);
    } else if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        exp_neg_square(y) * (num + C[7]) / (den + D[7])
    } else if y >= XBIG {
        0.0
    } else {
        let ysq = 1.0 / (y * y);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        exp_neg_square(y) * (FRAC_1_SQRT_PI - r) / y
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// `ln Q(u)` for `u > 8` from the asymptotic series of the Mills ratio,
/// truncated at its smallest term.
fn log_tail_asymptotic(u: f64) -> f64 {
    let inv = 1.0 / (u * u);
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut n = 1.0;
    loop {
        let next = -term * (2.0 * n - 1.0) * inv;
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            break;
        }
        sum += next;
        term = next;
        n += 1.0;
    }
    -0.5 * u * u - u.ln() - LN_SQRT_2PI + sum.ln()
}

/// Upper tail `Q(u) = 1 - Phi(u)`.
pub fn normal_tail(u: f64) -> f64 {
    if u > ASYMPTOTIC_CUTOFF {
        log_tail_asymptotic(u).exp()
    } else if u < -ASYMPTOTIC_CUTOFF {
        1.0 - log_tail_asymptotic(-u).exp()
    } else {
        0.5 * erfc(u * std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// `ln Q(u)`, finite for every finite `u`.
pub fn log_normal_tail(u: f64) -> f64 {
    if u > ASYMPTOTIC_CUTOFF {
        log_tail_asymptotic(u)
    } else if u < 0.0 {
        (-normal_tail(-u)).ln_1p()
    } else {
        normal_tail(u).ln()
    }
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(u: f64) -> f64 {
    normal_tail(-u)
}

/// `ln(Phi(hi) - Phi(lo))` for `lo < hi`, stable when both bounds sit deep
/// in the same tail.
pub fn log_normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return f64::NEG_INFINITY;
    }
    if lo >= 0.0 {
        let a = log_normal_tail(lo);
        let b = log_normal_tail(hi);
        a + log1m_exp(b - a)
    } else if hi <= 0.0 {
        let a = log_normal_tail(-hi);
        let b = log_normal_tail(-lo);
        a + log1m_exp(b - a)
    } else {
        (-(normal_tail(hi) + normal_tail(-lo))).ln_1p()
    }
}

/// `ln(1 - e^d)` for `d <= 0`.
pub fn log1m_exp(d: f64) -> f64 {
    if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}

/// `ln(sum exp(x_i))` accumulated left to right.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

#[inline]
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// AS241 on `p` in `(0, 1)`; no domain checks.
fn ppnd16(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34e0,
        4.630_337_846_156_545_295_90e0,
        5.769_497_221_460_691_405_50e0,
        3.647_848_324_763_204_605_04e0,
        1.270_458_252_452_368_382_58e0,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87e0,
        1.676_384_830_183_803_849_40e0,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20e0,
        5.463_784_911_164_114_369_90e0,
        1.784_826_539_917_291_335_80e0,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];
    const SPLIT1: f64 = 0.425;
    const SPLIT2: f64 = 5.0;
    const CONST1: f64 = 0.180_625;
    const CONST2: f64 = 1.6;

    let q = p - 0.5;
    if q.abs() <= SPLIT1 {
        let r = CONST1 - q * q;
        return q * horner(&A, r) / horner(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let value = if r <= SPLIT2 {
        let r = r - CONST2;
        horner(&C, r) / horner(&D, r)
    } else {
        let r = r - SPLIT2;
        horner(&E, r) / horner(&F, r)
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

/// Inverse of the standard normal CDF (AS241).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile probability must lie in (0, 1), got {p}")));
    }
    Ok(ppnd16(p))
}

/// `u` with `Q(u) = p`, evaluated without forming `1 - p`.
pub fn normal_upper_quantile(p: f64) -> Result<f64> {
    let z = -normal_quantile(p)?;
    // keep the median at +0.0
    Ok(if z == 0.0 { 0.0 } else { z })
}

/// Maps a raw 64-bit draw `x` to `Phi^{-1}((x + 0.5) / 2^64)`.
///
/// The upper half of the range is mapped through the complement `!x` so
/// that the probability handed to AS241 never rounds to 1. The map is
/// odd-symmetric (`x` and `!x` give opposite values) and nondecreasing in
/// `x`.
#[inline]
pub fn normal_from_bits(x: u64) -> f64 {
    const TWO_POW_NEG_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;
    if x >> 63 == 0 {
        ppnd16((x as f64 + 0.5) * TWO_POW_NEG_64)
    } else {
        -ppnd16(((!x) as f64 + 0.5) * TWO_POW_NEG_64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Q(u) at 40 significant digits (mpmath ncdf(-u)).
    const TAIL_REFERENCE: [(f64, f64); 9] = [
        (0.25, 0.401_293_674_317_076_28),
        (1.0, 0.158_655_253_931_457_05),
        (2.0, 0.022_750_131_948_179_207),
        (3.0, 0.001_349_898_031_630_094_5),
        (5.0, 2.866_515_718_791_939_1e-7),
        (8.0, 6.220_960_574_271_784_1e-16),
        (10.0, 7.619_853_024_160_526e-24),
        (20.0, 2.753_624_118_606_233_7e-89),
        (37.0, 5.725_571_222_524_576_8e-300),
    ];

    #[test]
    fn tail_matches_high_precision_values() {
        for &(u, expected) in &TAIL_REFERENCE {
            let got = normal_tail(u);
            let rel = (got - expected).abs() / expected;
            assert!(rel <= 1e-12, "u={u}: {got} vs {expected} (rel {rel:e})");
            let lrel = (log_normal_tail(u) - expected.ln()).abs() / expected.ln().abs();
            assert!(lrel <= 1e-13, "log tail at u={u}");
        }
    }

    #[test]
    fn tail_at_zero_is_half() {
        assert_eq!(normal_tail(0.0), 0.5);
    }

    #[test]
    fn tail_symmetry() {
        let mut u = -8.0;
        while u <= 8.0 {
            let s = normal_tail(u) + normal_tail(-u);
            assert!((s - 1.0).abs() <= 1e-14, "u={u}: {s}");
            u += 0.01;
        }
    }

    #[test]
    fn erfc_reference_values() {
        // mpmath erfc at 40 digits of the double x, rounded to the nearest double
        for (x, want) in [
            (-1.412_000_000_000_009_7, 1.954_160_644_219_516_2),
            (-0.746_000_000_000_010_3, 1.708_576_192_528_058),
            (0.517_999_999_999_999_9, 0.463_825_233_489_455_75),
            (-6.0, 2.0),
            (-5.2, 1.9999999999998075),
            (-4.4, 1.999999999510829),
            (-3.6, 1.999999644137007),
            (-2.8, 1.9999249868053346),
            (-2.0, 1.9953222650189528),
            (-1.2, 1.9103139782296354),
            (-0.4, 1.4283923550466684),
            (0.4, 0.5716076449533315),
            (1.2, 0.08968602177036464),
            (2.0, 0.004677734981047266),
            (2.8, 7.501319466545911e-05),
            (3.6, 3.5586299300768504e-07),
            (4.4, 4.891710270605872e-10),
            (5.2, 1.9249061099972322e-13),
            (6.0, 2.1519736712498913e-17),
            (6.8, 6.80086056533125e-22),
            (7.6, 6.05453518048931e-27),
            (8.4, 1.514615352797302e-32),
            (9.2, 1.0627315595404888e-38),
            (10.0, 2.088487583762545e-45),
            (10.8, 1.1482879122081691e-52),
            (11.6, 1.7648286893153022e-60),
            (12.4, 7.576748890435947e-69),
            (13.2, 9.0811984959798e-78),
            (14.0, 3.0372298477503115e-87),
            (14.8, 2.8334416144045497e-97),
            (15.6, 7.370680712322154e-108),
            (16.4, 5.344827857346181e-119),
            (17.2, 1.0801552080946892e-130),
            (18.0, 6.082369231816399e-143),
            (18.8, 9.541426434130704e-156),
            (19.6, 4.169052842365248e-169),
            (20.4, 5.073212776926065e-183),
            (21.2, 1.7190774436258463e-197),
            (22.0, 1.6219058609334726e-212),
            (22.8, 4.260200356683923e-228),
            (23.6, 3.115081485566365e-244),
            (24.4, 6.340281221916943e-261),
            (25.2, 3.5918274311984665e-278),
            (26.0, 5.663192408856143e-296),
        ] {
            let got: f64 = erfc(x);
            assert!((got - want).abs() <= 4e-15 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn erfc_agrees_with_independent_implementation() {
        // statrs is only good to about 1e-10, the table above is the tight check
        let mut x = -6.0;
        while x <= 26.0 {
            let a = erfc(x);
            let b = statrs::function::erf::erfc(x);
            if b > 1e-300 {
                assert!((a - b).abs() <= 1e-9 * b, "x={x}: {a} vs {b}");
            }
            x += 0.037;
        }
    }

    #[test]
    fn quantile_special_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959_964).abs() < 1e-5);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_deep_tail_reference() {
        // roots of log Phi(z) = log p, solved at 50 digits
        let cases = [
            (1e-16, -8.222_082_216_130_435),
            (1e-50, -14.933_337_534_788_489),
            (1e-100, -21.273_453_560_965_326),
            (1e-300, -37.047_096_299_361_2),
        ];
        for (p, z) in cases {
            let got = normal_quantile(p).unwrap();
            assert!(((got - z) / z).abs() < 1e-14, "p={p}: {got}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        // |Phi(q(p)) - p| over a log-spaced sweep and the upper end
        let mut e = -300.0;
        while e < -0.302 {
            let p = 10f64.powf(e);
            let z = normal_quantile(p).unwrap();
            let back = normal_cdf(z);
            assert!((back - p).abs() <= 1e-12, "p={p:e}");
            e += 0.25;
        }
        for p in [0.6, 0.9, 0.99, 1.0 - 1e-9, 1.0 - 1e-15] {
            let z = normal_quantile(p).unwrap();
            assert!((normal_cdf(z) - p).abs() <= 1e-12);
        }
    }

    #[test]
    fn quantile_tail_round_trip() {
        let mut u = 0.0;
        while u <= 6.0 {
            let z = normal_upper_quantile(normal_tail(u)).unwrap();
            assert!((z - u).abs() <= 1e-9, "u={u}: {z}");
            // Forming 1 - Q(u) rounds by up to half an ulp of 1, which moves
            // the quantile by about 5.6e-17 / phi(u).
            let z = normal_quantile(1.0 - normal_tail(u)).unwrap();
            let slack = 1e-9f64.max(1.2e-16 / normal_pdf(u));
            assert!((z - u).abs() <= slack, "u={u}: {z}");
            if u <= 5.5 {
                assert!((z - u).abs() <= 1e-9, "u={u}: {z}");
            }
            u += 0.05;
        }
    }

    #[test]
    fn upper_quantile_of_half_is_positive_zero() {
        let z = normal_upper_quantile(0.5).unwrap();
        assert_eq!(z.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn bits_map_is_odd_and_monotone() {
        assert_eq!(normal_from_bits(0), -normal_from_bits(u64::MAX));
        assert!(normal_from_bits(0) < -9.0);
        let mut prev = f64::NEG_INFINITY;
        let mut x: u64 = 0;
        for _ in 0..4096 {
            let v = normal_from_bits(x);
            assert!(v.is_finite());
            assert!(v >= prev);
            prev = v;
            x = x.wrapping_add(0x0010_0000_0000_0001).min(u64::MAX - 1);
        }
        for x in [(1u64 << 63) - 1, 1u64 << 63] {
            assert_eq!(normal_from_bits(x), 0.0);
        }
    }

    #[test]
    fn interval_log_probabilities() {
        let direct = (normal_cdf(1.0) - normal_cdf(-0.5)).ln();
        assert!((log_normal_interval(-0.5, 1.0) - direct).abs() < 1e-14);
        // deep in the tail: Q(30) - Q(31) ~ Q(30)
        let v = log_normal_interval(30.0, 31.0);
        assert!((v - log_normal_tail(30.0)).abs() < 1e-10);
        let w = log_normal_interval(-31.0, -30.0);
        assert_eq!(v, w);
        assert_eq!(log_normal_interval(1.0, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn log_sum_exp_basics() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + std::f64::consts::LN_2)).abs() < 1e-12);
    }
}
