use serde::{Deserialize, Serialize};

use super::argmax_first;
use crate::error::{Error, Result};
use crate::matrix::{MatrixView, Selection};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgpResult {
    pub selection: Selection,
    pub ave: f64,
    /// Entry sums of the added lines in order: column, row, column, ...
    pub step_sums: Vec<f64>,
}

/// Incremental greedy procedure. Row `r` (0-based) comes from the block
/// `[r b, (r + 1) b)` with `b = floor(n / k)`, column `r` likewise with
/// `floor(m / k)`. The first row is index 0; every later line is the one in
/// its block with the largest sum against the lines chosen so far.
pub fn run_igp<M: MatrixView + ?Sized>(matrix: &M, k: usize) -> Result<IgpResult> {
    let (n, m) = (matrix.n_rows(), matrix.n_cols());
    if k == 0 {
        return Err(Error::Domain("IGP needs k >= 1".into()));
    }
    let (rb, cb) = (n / k, m / k);
    if rb == 0 || cb == 0 {
        return Err(Error::Domain(format!("IGP needs k <= min(n, m), got k={k} for {n}x{m}")));
    }

    let mut rows = vec![0usize];
    let mut cols: Vec<usize> = Vec::with_capacity(k);
    let mut step_sums = Vec::with_capacity(2 * k - 1);
    let mut total = 0.0;
    for r in 0..k {
        let (j, s) =
            argmax_first((r * cb..(r + 1) * cb).map(|j| (j, rows.iter().map(|&i| matrix.entry(i, j)).sum::<f64>())))
                .expect("blocks are nonempty");
        cols.push(j);
        step_sums.push(s);
        total += s;
        if r + 1 == k {
            break;
        }
        let (i, s) = argmax_first(
            ((r + 1) * rb..(r + 2) * rb).map(|i| (i, cols.iter().map(|&j| matrix.entry(i, j)).sum::<f64>())),
        )
        .expect("blocks are nonempty");
        rows.push(i);
        step_sums.push(s);
        total += s;
    }

    Ok(IgpResult { selection: Selection::new(rows, cols)?, ave: total / (k * k) as f64, step_sums })
}
