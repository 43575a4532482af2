//! Built-in self checks, each a list of named pass/fail results.

use clap::ValueEnum;
use itertools::Itertools;
use ndarray::Array2;
use serde::Serialize;

use submax::algorithms::{brute_force, run_igp, run_las};
use submax::experiments::{ks_statistic, sample_max_normalized};
use submax::matrix::{anova, ave, overlap_cholesky, psi_col, psi_row, reconstruct, reconstruct_psi};
use submax::rng::{derive_seed, Rng64};
use submax::special::normal_upper_quantile;
use submax::theory::{
    critical_alphas, f_overlap, gumbel_cdf, gumbel_reference, log_normal_tail, normal_tail, overlap_exponent_numeric,
    projection_gap, region_components, region_grid, tail_bounds, Axis,
};
use submax::{GaussianMatrix, MatrixView, Result, Selection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tails,
    Anova,
    Gumbel,
    Oracle,
    Ogp,
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let value = self.to_possible_value().expect("no skipped variants");
        f.write_str(value.get_name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn at_most(name: &str, value: f64, limit: f64, detail: String) -> Check {
    Check { name: name.into(), passed: value <= limit, value, limit, detail }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Report> {
    let checks = match suite {
        Suite::Tails => tails()?,
        Suite::Anova => decompositions(seed)?,
        Suite::Gumbel => gumbel(seed)?,
        Suite::Oracle => oracle(seed)?,
        Suite::Ogp => ogp()?,
    };
    Ok(Report { suite, seed, passed: checks.iter().all(|c| c.passed), checks })
}

fn tails() -> Result<Vec<Check>> {
    let mut outside = 0;
    for step in 0..=600 {
        let u = 2.0 + step as f64 * 0.01;
        let b = tail_bounds(u)?;
        let q = normal_tail(u);
        if !(b.lower <= q && q <= b.upper) {
            outside += 1;
        }
    }
    let mut symmetry = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut log_gap = 0.0f64;
    for step in -800..=800 {
        let u = step as f64 * 0.01;
        symmetry = symmetry.max((normal_tail(u) + normal_tail(-u) - 1.0).abs());
        if (0.0..=6.0).contains(&u) {
            round_trip = round_trip.max((normal_upper_quantile(normal_tail(u))? - u).abs());
        }
        log_gap = log_gap.max((log_normal_tail(u) - normal_tail(u).ln()).abs());
    }
    Ok(vec![
        at_most("tail_sandwich_violations", outside as f64, 0.0, "601 grid points on [2, 8]".into()),
        at_most("tail_symmetry", symmetry, 1e-14, "|Q(u) + Q(-u) - 1| on [-8, 8]".into()),
        at_most("quantile_round_trip", round_trip, 1e-9, "|Qinv(Q(u)) - u| on [0, 6]".into()),
        at_most("log_tail_consistency", log_gap, 1e-12, "|ln Q(u) - log_normal_tail(u)| on [-8, 8]".into()),
    ])
}

fn normal_block(k: usize, rng: &mut Rng64) -> Array2<f64> {
    Array2::from_shape_fn((k, k), |_| rng.next_normal())
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Families of `k`-sets in which set `a` owns the private element `a`, so
/// the indicator vectors are linearly independent.
fn subset_family(rng: &mut Rng64) -> Vec<Vec<usize>> {
    let r = 2 + rng.next_below(5) as usize;
    let k = 1 + rng.next_below(8) as usize;
    let pool = 2 * k + 2;
    (0..r)
        .map(|a| {
            let mut shared: Vec<usize> = (0..pool).map(|j| r + j).collect();
            for i in 0..k - 1 {
                let pick = i + rng.next_below((pool - i) as u64) as usize;
                shared.swap(i, pick);
            }
            let mut set = vec![a];
            set.extend_from_slice(&shared[..k - 1]);
            set
        })
        .collect()
}

pub fn decompositions(seed: u64) -> Result<Vec<Check>> {
    let mut anova_err = 0.0f64;
    let mut psi_err = 0.0f64;
    for t in 0..100u64 {
        let k = 1 + (t % 20) as usize;
        let mut rng = Rng64::child(seed, t);
        let b = normal_block(k, &mut rng);
        anova_err = anova_err.max(max_abs_diff(&reconstruct(&anova(&b)?)?, &b));
        for parts in [psi_row(&b, 5000.0)?, psi_col(&b, 5000.0)?] {
            psi_err = psi_err.max(max_abs_diff(&reconstruct_psi(&parts)?, &b));
        }
    }
    let mut chol_err = 0.0f64;
    let mut norm_err = 0.0f64;
    for t in 0..100u64 {
        let mut rng = Rng64::child(derive_seed(seed, 1 << 32), t);
        let family = subset_family(&mut rng);
        let k = family[0].len() as f64;
        let l = overlap_cholesky(&family)?;
        let sigma = Array2::from_shape_fn((family.len(), family.len()), |(a, b)| {
            family[a].iter().filter(|x| family[b].contains(x)).count() as f64 / k
        });
        chol_err = chol_err.max(max_abs_diff(&l.dot(&l.t()), &sigma));
        for row in l.rows() {
            norm_err = norm_err.max((row.dot(&row).sqrt() - 1.0).abs());
        }
    }
    Ok(vec![
        at_most("anova_round_trip", anova_err, 1e-12, "100 random k x k blocks, k in 1..=20".into()),
        at_most("psi_round_trip", psi_err, 1e-10, "row and column variants, n = 5000".into()),
        at_most("cholesky_reproduces_covariance", chol_err, 1e-10, "100 random subset families".into()),
        at_most("cholesky_unit_rows", norm_err, 1e-10, "row norms of L".into()),
    ])
}

pub fn gumbel(seed: u64) -> Result<Vec<Check>> {
    let samples = sample_max_normalized(1_000_000, 2000, seed)?;
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let ks = ks_statistic(&samples, gumbel_cdf)?;
    let below_zero = samples.iter().filter(|&&s| s <= 0.0).count() as f64 / count;
    let euler = gumbel_reference().mean;
    Ok(vec![
        at_most(
            "mean_offset",
            (mean - euler).abs(),
            0.10,
            format!("sample mean {mean:.4}, 2000 maxima of 1e6 normals"),
        ),
        at_most("ks_statistic", ks, 0.05, "against exp(-exp(-w))".into()),
        at_most("cdf_at_zero", (below_zero - (-1.0f64).exp()).abs(), 0.03, format!("P(sample <= 0) = {below_zero:.4}")),
    ])
}

/// Best `k x k` average by listing every row pair and column pair, with the
/// first strict maximum kept.
pub fn naive_best(m: &GaussianMatrix, k: usize) -> (Selection, f64) {
    let mut best = (Selection::empty(), f64::NEG_INFINITY);
    for rows in (0..m.n_rows()).combinations(k) {
        for cols in (0..m.n_cols()).combinations(k) {
            let sum: f64 =
                rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| m.entry(i, j)).sum();
            if sum > best.1 {
                best = (Selection::new(rows.clone(), cols).expect("combinations are increasing"), sum);
            }
        }
    }
    let kk = (k * k) as f64;
    (best.0, best.1 / kk)
}

pub fn oracle(seed: u64) -> Result<Vec<Check>> {
    let mut mismatches = 0;
    let mut below_las = 0;
    let mut below_igp = 0;
    for t in 0..50u64 {
        let m = GaussianMatrix::generate(8, 8, derive_seed(seed, t))?;
        let (sel, value) = brute_force(&m, 2)?;
        let (naive_sel, naive_value) = naive_best(&m, 2);
        if sel != naive_sel || (value - naive_value).abs() > 1e-12 {
            mismatches += 1;
        }
        // the same summation for every selection, so equal blocks compare equal
        let best = ave(&m, &sel)?;
        if best < ave(&m, &run_las(&m, 2, None)?.selection)? {
            below_las += 1;
        }
        if best < ave(&m, &run_igp(&m, 2)?.selection)? {
            below_igp += 1;
        }
    }
    Ok(vec![
        at_most("brute_vs_naive_mismatches", mismatches as f64, 0.0, "50 instances, n = 8, k = 2".into()),
        at_most("brute_below_las", below_las as f64, 0.0, "instances where LAS beat the optimum".into()),
        at_most("brute_below_igp", below_igp as f64, 0.0, "instances where IGP beat the optimum".into()),
    ])
}

pub fn ogp() -> Result<Vec<Check>> {
    let c = critical_alphas()?;
    let mut checks = vec![
        at_most("alpha1", (c.alpha1 - 1.224_744_871).abs(), 1e-8, format!("alpha1 = {}", c.alpha1)),
        at_most("alpha2", (c.alpha2 - 1.360_827_635).abs(), 1e-6, format!("alpha2 = {}", c.alpha2)),
    ];
    for (alpha, want) in [(1.0, 1usize), (1.30, 1), (1.364, 2), (1.40, 2)] {
        let grid = region_grid(alpha, 800)?;
        let got = region_components(&grid);
        checks.push(Check {
            name: format!("components_{alpha}"),
            passed: got == want,
            value: got as f64,
            limit: want as f64,
            detail: "4-connected components of {f >= 0} at resolution 800".into(),
        });
        if alpha == 1.364 {
            let gap = projection_gap(&grid, Axis::Y1);
            let off = gap.map_or(f64::INFINITY, |(a, b)| (a - 0.28).abs().max((b - 0.40).abs()));
            checks.push(at_most("gap_1.364", off, 0.02, format!("projection gap {gap:?}, expected (0.28, 0.40)")));
        }
    }
    let mut worst = 0.0f64;
    for alpha in [1.1, 1.2, 1.3] {
        for y in [0.25, 0.5] {
            let e = overlap_exponent_numeric(1e12, 20, alpha, y, y, 0.02)?;
            worst = worst.max((e - f_overlap(alpha, y, y)?).abs());
        }
    }
    checks.push(at_most("exponent_vs_closed_form", worst, 0.25, "n = 1e12, k = 20, delta = 0.02".into()));
    Ok(checks)
}
