use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MatrixView, Selection};
use crate::theory::theta_n;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub selection: Selection,
    /// Side of the balanced clique.
    pub m: usize,
    pub theta: f64,
}

/// Greedy bipartite clique in the graph `i ~ j  <=>  M[i][j] > theta`.
///
/// Starts from the first row with an edge, then alternates: pick a column
/// adjacent to every chosen row, pick a row adjacent to every chosen column.
/// Among the fresh candidates the smallest index is taken that still leaves a
/// fresh candidate on the opposite side, so the construction runs for as
/// many steps as the candidate sets allow. The run ends after a column pick,
/// which keeps both sides the same size.
pub fn run_greedy<M: MatrixView + ?Sized>(matrix: &M, theta: f64) -> Result<GreedyResult> {
    if theta.is_nan() {
        return Err(Error::Domain("theta must not be NaN".into()));
    }
    let (n, m) = (matrix.n_rows(), matrix.n_cols());
    let empty = GreedyResult { selection: Selection::empty(), m: 0, theta };

    let neighbours_of_row = |i: usize, within: &[usize]| -> Vec<usize> {
        within.iter().copied().filter(|&j| matrix.entry(i, j) > theta).collect()
    };
    let neighbours_of_col = |j: usize, within: &[usize]| -> Vec<usize> {
        within.iter().copied().filter(|&i| matrix.entry(i, j) > theta).collect()
    };

    let all_cols: Vec<usize> = (0..m).collect();
    let Some((first_row, mut col_cands)) =
        (0..n).map(|i| (i, neighbours_of_row(i, &all_cols))).find(|(_, c)| !c.is_empty())
    else {
        return Ok(empty);
    };

    let all_rows: Vec<usize> = (0..n).collect();
    let mut rows = vec![first_row];
    let mut cols: Vec<usize> = Vec::new();
    let mut row_cands: Vec<usize> = Vec::new();

    loop {
        // Column step: the candidates are adjacent to every chosen row.
        let fresh: Vec<usize> = col_cands.iter().copied().filter(|j| !cols.contains(j)).collect();
        let Some(&fallback) = fresh.first() else { break };
        let pool = if cols.is_empty() { &all_rows } else { &row_cands };
        let pick = fresh
            .iter()
            .copied()
            .map(|j| (j, neighbours_of_col(j, pool)))
            .find(|(_, r)| r.iter().any(|i| !rows.contains(i)));
        match pick {
            Some((j, next_rows)) => {
                cols.push(j);
                row_cands = next_rows;
            }
            None => {
                cols.push(fallback);
                break;
            }
        }

        // Row step.
        let fresh: Vec<usize> = row_cands.iter().copied().filter(|i| !rows.contains(i)).collect();
        let pick = fresh
            .iter()
            .copied()
            .map(|i| (i, neighbours_of_row(i, &col_cands)))
            .find(|(_, c)| c.iter().any(|j| !cols.contains(j)));
        match pick {
            Some((i, next_cols)) => {
                rows.push(i);
                col_cands = next_cols;
            }
            None => break,
        }
    }

    debug_assert_eq!(rows.len(), cols.len());
    let side = rows.len();
    Ok(GreedyResult { selection: Selection::from_unsorted(rows, cols)?, m: side, theta })
}

/// Greedy at the threshold `theta_n(n, k)`, cut down to the `k` smallest
/// row and column indices of the clique.
pub fn greedy_for_k<M: MatrixView + ?Sized>(matrix: &M, k: usize) -> Result<GreedyResult> {
    if k < 2 {
        return Err(Error::Domain(format!("greedy_for_k needs k >= 2, got {k}")));
    }
    let theta = theta_n(matrix.n_rows() as f64, k)?;
    let full = run_greedy(matrix, theta)?;
    if full.m < k {
        return Err(Error::UnderTarget { achieved: full.m, target: k, theta });
    }
    let rows = full.selection.rows()[..k].to_vec();
    let cols = full.selection.cols()[..k].to_vec();
    Ok(GreedyResult { selection: Selection::new(rows, cols)?, m: k, theta })
}
