use itertools::Itertools;

use super::{binomial, top_k};
use crate::error::{Error, Result};
use crate::matrix::{col_sums_over, is_row_dominant, MatrixView, Selection};

/// Largest `C(n, k) * C(m, k)` the exhaustive routines accept.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

fn check_budget(n: usize, m: usize, k: usize, budget: u128) -> Result<()> {
    if k == 0 || k > n || k > m {
        return Err(Error::Domain(format!("need 1 <= k <= min(n, m), got k={k} for {n}x{m}")));
    }
    let needed = binomial(n, k).saturating_mul(binomial(m, k));
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

/// Exact maximum-average `k x k` submatrix.
///
/// Row sets are enumerated in lexicographic order; for each one the best
/// columns are the `k` largest column sums over those rows. Only a strictly
/// larger sum replaces the incumbent, so ties resolve to the
/// lexicographically smallest selection.
pub fn brute_force<M: MatrixView + ?Sized>(matrix: &M, k: usize) -> Result<(Selection, f64)> {
    let (n, m) = (matrix.n_rows(), matrix.n_cols());
    check_budget(n, m, k, ENUMERATION_BUDGET)?;
    let mut best: Option<(Vec<usize>, Vec<usize>, f64)> = None;
    for rows in (0..n).combinations(k) {
        let sums = col_sums_over(matrix, &rows);
        let cols = top_k(&sums, k);
        let total: f64 = cols.iter().map(|&j| sums[j]).sum();
        if best.as_ref().is_none_or(|(_, _, b)| total > *b) {
            best = Some((rows, cols, total));
        }
    }
    let (rows, cols, total) = best.expect("at least one row set");
    Ok((Selection::new(rows, cols)?, total / (k * k) as f64))
}

/// Every `k x k` selection that is both row and column dominant.
///
/// For a row set the column-dominant column sets are the top-`k` column
/// sums with any choice among values tied at the cut; each such candidate is
/// then tested for row dominance. Output is sorted and free of duplicates.
pub fn enumerate_local_maxima<M: MatrixView + ?Sized>(matrix: &M, k: usize, budget: u128) -> Result<Vec<Selection>> {
    let (n, m) = (matrix.n_rows(), matrix.n_cols());
    check_budget(n, m, k, budget.min(ENUMERATION_BUDGET))?;
    let mut found = Vec::new();
    for rows in (0..n).combinations(k) {
        let sums = col_sums_over(matrix, &rows);
        let top = top_k(&sums, k);
        let cut = top.iter().map(|&j| sums[j]).fold(f64::INFINITY, f64::min);
        let above: Vec<usize> = (0..m).filter(|&j| sums[j] > cut).collect();
        let tied: Vec<usize> = (0..m).filter(|&j| sums[j] == cut).collect();
        for extra in tied.into_iter().combinations(k - above.len()) {
            let sel = Selection::from_unsorted(rows.clone(), above.iter().copied().chain(extra).collect())?;
            if is_row_dominant(matrix, &sel)? {
                found.push(sel);
            }
        }
    }
    found.sort();
    found.dedup();
    Ok(found)
}
