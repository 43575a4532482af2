//! Search procedures for large-average submatrices.
//!
//! Every routine breaks ties towards the lexicographically smallest index
//! set, so crafted matrices with repeated values give reproducible output.

mod brute;
mod greedy;
mod igp;
mod las;

pub use brute::{brute_force, enumerate_local_maxima, ENUMERATION_BUDGET};
pub use greedy::{greedy_for_k, run_greedy, GreedyResult};
pub use igp::{run_igp, IgpResult};
pub use las::{run_las, LasResult, LasStep};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The search procedures; `Brute` doubles as the global optimum in
/// predictions and also parses from `global`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Las,
    Greedy,
    Igp,
    #[serde(alias = "global")]
    Brute,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Las => "las",
            Algorithm::Greedy => "greedy",
            Algorithm::Igp => "igp",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "las" => Ok(Algorithm::Las),
            "greedy" => Ok(Algorithm::Greedy),
            "igp" => Ok(Algorithm::Igp),
            "brute" | "global" => Ok(Algorithm::Brute),
            _ => Err(Error::Parse(format!("unknown algorithm {s:?}, expected las, greedy, igp or brute"))),
        }
    }
}

/// Indices of the `k` largest values, larger values first and smaller
/// indices first among equal values; returned sorted ascending.
pub(crate) fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let by_rank = |a: &usize, b: &usize| -> Ordering { values[*b].total_cmp(&values[*a]).then(a.cmp(b)) };
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, by_rank);
    }
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// First index of the largest value.
pub(crate) fn argmax_first(values: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

/// `C(n, k)` saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_k_prefers_small_indices_on_ties() {
        assert_eq!(top_k(&[1.0, 3.0, 3.0, 2.0, 3.0], 2), vec![1, 2]);
        assert_eq!(top_k(&[0.0; 5], 3), vec![0, 1, 2]);
        assert_eq!(top_k(&[5.0, -1.0], 2), vec![0, 1]);
        assert!(top_k(&[5.0, -1.0], 0).is_empty());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in [Algorithm::Las, Algorithm::Greedy, Algorithm::Igp, Algorithm::Brute] {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
            assert_eq!(serde_json::to_string(&alg).unwrap(), format!("\"{alg}\""));
        }
        assert_eq!("global".parse::<Algorithm>().unwrap(), Algorithm::Brute);
        assert!("lass".parse::<Algorithm>().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(50, 25), 126_410_606_437_752);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10, 0), 1);
    }

    #[test]
    fn argmax_keeps_first() {
        assert_eq!(argmax_first([(4, 1.0), (5, 2.0), (6, 2.0)]), Some((5, 2.0)));
        assert_eq!(argmax_first(std::iter::empty()), None);
    }
}
