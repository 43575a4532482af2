//! Seeded Monte Carlo trials and the statistics they are summarized by.
//!
//! Trial `t` of a run with master seed `s` uses the matrix seeded by
//! `derive_seed(s, t)`. Trials run in parallel on the current rayon pool;
//! records are collected in trial order and every statistic is recomputed
//! from that ordered list, so the output does not depend on the number of
//! threads or on how partial runs are merged.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{brute_force, run_greedy, run_igp, run_las, Algorithm};
use crate::error::{Error, Result};
use crate::matrix::{ave, is_local_max, GaussianMatrix, MatrixView, SeededGaussian, Selection};
use crate::rng::{derive_seed, splitmix_at};
use crate::special::normal_from_bits;
use crate::theory::{b_n, predicted_ave, theta_n};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub alg: Algorithm,
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_override: Option<f64>,
}

impl TrialConfig {
    pub fn new(alg: Algorithm, n: usize, k: usize, trials: u64, master_seed: u64) -> Self {
        Self { alg, n, k, trials, master_seed, theta_override: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.n == 0 || self.k == 0 || self.k > self.n {
            return Err(Error::Domain(format!("need 1 <= k <= n, got n={}, k={}", self.n, self.k)));
        }
        if let Some(t) = self.theta_override {
            if t.is_nan() {
                return Err(Error::Domain("theta must not be NaN".into()));
            }
        }
        match self.alg {
            Algorithm::Greedy if self.theta_override.is_none() && self.n < 2 => {
                Err(Error::Domain("greedy threshold needs n >= 2".into()))
            }
            Algorithm::Brute => {
                let c = crate::algorithms::binomial(self.n, self.k);
                if c.saturating_mul(c) > crate::algorithms::ENUMERATION_BUDGET {
                    return Err(Error::Budget {
                        needed: c.saturating_mul(c),
                        budget: crate::algorithms::ENUMERATION_BUDGET,
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn trial_seed(&self, trial: u64) -> u64 {
        derive_seed(self.master_seed, trial)
    }
}

/// Outcome of one trial. `error` is set (and the value fields are empty)
/// when the trial failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ave: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_las: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_max: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_monotone: Option<bool>,
    /// Greedy only: every selected entry of the clique exceeds theta.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub above_theta: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn empty(trial: u64, seed: u64) -> Self {
        Self {
            trial,
            seed,
            ave: None,
            t_las: None,
            m: None,
            local_max: None,
            trace_monotone: None,
            above_theta: None,
            error: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub config: TrialConfig,
    pub per_trial: Vec<TrialRecord>,
    pub completed: usize,
    pub failures: usize,
    pub mean_ave: f64,
    /// Sample standard deviation (divisor `count - 1`), zero for one trial.
    pub std_ave: f64,
    pub quantiles: Quantiles,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_las_histogram: Option<BTreeMap<usize, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction_finite: Option<f64>,
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl TrialStats {
    /// Aggregates records (in any order) for `config`.
    pub fn from_records(config: TrialConfig, mut records: Vec<TrialRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.trial);
        if records.windows(2).any(|w| w[0].trial == w[1].trial) {
            return Err(Error::Domain("duplicate trial index in records".into()));
        }
        let values: Vec<f64> = records.iter().filter_map(|r| r.ave).collect();
        if values.is_empty() {
            let reason = records.iter().find_map(|r| r.error.clone()).unwrap_or_else(|| "no records".into());
            return Err(Error::Numeric(format!("all {} trials failed: {reason}", records.len())));
        }
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let quantiles = Quantiles {
            q05: quantile_sorted(&sorted, 0.05),
            q50: quantile_sorted(&sorted, 0.5),
            q95: quantile_sorted(&sorted, 0.95),
        };
        let t_las_histogram = (config.alg == Algorithm::Las).then(|| {
            let mut h = BTreeMap::new();
            for t in records.iter().filter_map(|r| r.t_las) {
                *h.entry(t).or_insert(0) += 1;
            }
            h
        });
        let n = config.n as f64;
        Ok(Self {
            prediction_asymptotic: predicted_ave(config.alg, n, config.k, false).ok(),
            prediction_finite: predicted_ave(config.alg, n, config.k, true).ok(),
            completed: values.len(),
            failures: records.len() - values.len(),
            config,
            per_trial: records,
            mean_ave: mean,
            std_ave: std,
            quantiles,
            t_las_histogram,
        })
    }

    /// Combines two partial runs of the same configuration.
    pub fn merge(self, other: TrialStats) -> Result<Self> {
        if self.config != other.config {
            return Err(Error::Domain("cannot merge statistics of different configurations".into()));
        }
        let mut records = self.per_trial;
        records.extend(other.per_trial);
        Self::from_records(self.config, records)
    }

    /// Most frequent `t_las` (smallest on ties).
    pub fn t_las_mode(&self) -> Option<usize> {
        let h = self.t_las_histogram.as_ref()?;
        h.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(t, _)| *t)
    }

    /// `trial,seed,ave,t_las,m` with empty fields for absent values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["trial", "seed", "ave", "t_las", "m"]).map_err(err)?;
        for r in &self.per_trial {
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                opt(r.ave.map(|v| format!("{v:?}"))),
                opt(r.t_las.map(|v| v.to_string())),
                opt(r.m.map(|v| v.to_string())),
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn min_entry<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> f64 {
    let mut lo = f64::INFINITY;
    for &i in sel.rows() {
        for &j in sel.cols() {
            lo = lo.min(matrix.entry(i, j));
        }
    }
    lo
}

fn run_one(cfg: &TrialConfig, trial: u64) -> TrialRecord {
    let seed = cfg.trial_seed(trial);
    let mut rec = TrialRecord::empty(trial, seed);
    let outcome: Result<()> = (|| {
        match cfg.alg {
            Algorithm::Las => {
                let m = SeededGaussian::square(cfg.n, seed)?;
                let r = run_las(&m, cfg.k, None)?;
                rec.local_max = Some(is_local_max(&m, &r.selection)?);
                rec.trace_monotone = Some(r.trace.windows(2).all(|w| w[1].ave >= w[0].ave));
                rec.t_las = Some(r.t_las);
                rec.ave = Some(r.ave);
            }
            Algorithm::Igp => {
                let m = SeededGaussian::square(cfg.n, seed)?;
                rec.ave = Some(run_igp(&m, cfg.k)?.ave);
            }
            Algorithm::Greedy => {
                let m = SeededGaussian::square(cfg.n, seed)?;
                let theta = match cfg.theta_override {
                    Some(t) => t,
                    None => theta_n(cfg.n as f64, cfg.k)?,
                };
                let r = run_greedy(&m, theta)?;
                rec.m = Some(r.m);
                rec.above_theta = Some(r.m == 0 || min_entry(&m, &r.selection) > theta);
                if r.m < cfg.k {
                    return Err(Error::UnderTarget { achieved: r.m, target: cfg.k, theta });
                }
                let sel = Selection::new(r.selection.rows()[..cfg.k].to_vec(), r.selection.cols()[..cfg.k].to_vec())?;
                rec.ave = Some(ave(&m, &sel)?);
            }
            Algorithm::Brute => {
                let m = GaussianMatrix::generate(cfg.n, cfg.n, seed)?;
                rec.ave = Some(brute_force(&m, cfg.k)?.1);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.ave = None;
        rec.error = Some(e.to_string());
    }
    rec
}

/// Runs `cfg.trials` independent trials.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialStats> {
    run_trial_range(cfg, 0..cfg.trials)
}

/// Runs the trials with indices in `range`; merging the results of a
/// partition of `0..trials` reproduces [`run_trials`] exactly.
pub fn run_trial_range(cfg: &TrialConfig, range: std::ops::Range<u64>) -> Result<TrialStats> {
    cfg.validate()?;
    if range.end > cfg.trials || range.is_empty() {
        return Err(Error::Domain(format!("trial range {range:?} is empty or exceeds {}", cfg.trials)));
    }
    let records: Vec<TrialRecord> = range.into_par_iter().map(|t| run_one(cfg, t)).collect();
    TrialStats::from_records(cfg.clone(), records)
}

/// Empirical `P(T_LAS > t)` over the successful trials of an LAS run.
pub fn t_las_tail(stats: &TrialStats, t: usize) -> Result<f64> {
    if stats.config.alg != Algorithm::Las {
        return Err(Error::Domain(format!("t_las_tail needs LAS statistics, got {}", stats.config.alg)));
    }
    let counts: Vec<usize> = stats.per_trial.iter().filter_map(|r| r.t_las).collect();
    if counts.is_empty() {
        return Err(Error::Domain("no completed LAS trials".into()));
    }
    Ok(counts.iter().filter(|&&c| c > t).count() as f64 / counts.len() as f64)
}

/// `sqrt(2 ln n) (max of n standard normals - b_n)` for `trials` fresh
/// samples. The normal transform is nondecreasing in the raw draw, so the
/// maximum is taken over raw 64-bit outputs and transformed once.
pub fn sample_max_normalized(n: u64, trials: u64, seed: u64) -> Result<Vec<f64>> {
    if n < 10 {
        return Err(Error::Domain(format!("need n >= 10, got {n}")));
    }
    let nf = n as f64;
    let scale = (2.0 * nf.ln()).sqrt();
    let centre = b_n(nf)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let child = derive_seed(seed, t);
            let top = (0..n).map(|i| splitmix_at(child, i)).max().expect("n >= 10");
            scale * (normal_from_bits(top) - centre)
        })
        .collect())
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("ks_statistic needs at least one sample".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("samples contain NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / count - f).max(f - i as f64 / count);
    }
    Ok(d.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub igp_mean: f64,
    pub las_mean: f64,
    pub ratio_of_means: f64,
    pub win_fraction: f64,
    pub igp: Vec<f64>,
    pub las: Vec<f64>,
}

/// IGP against LAS on the same matrix for each trial index.
pub fn igp_vs_las(n: usize, k: usize, trials: u64, seed: u64) -> Result<PairedComparison> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let m = SeededGaussian::square(n, derive_seed(seed, t))?;
            Ok((run_igp(&m, k)?.ave, run_las(&m, k, None)?.ave))
        })
        .collect::<Result<_>>()?;
    let count = trials as f64;
    let igp: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let las: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let igp_mean = igp.iter().sum::<f64>() / count;
    let las_mean = las.iter().sum::<f64>() / count;
    let wins = pairs.iter().filter(|(a, b)| a > b).count();
    Ok(PairedComparison {
        n,
        k,
        trials,
        seed,
        igp_mean,
        las_mean,
        ratio_of_means: igp_mean / las_mean,
        win_fraction: wins as f64 / count,
        igp,
        las,
    })
}
