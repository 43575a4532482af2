use serde::{Deserialize, Serialize};

use super::top_k;
use crate::error::{Error, Result};
use crate::matrix::{ave, col_sums_over, row_sums_over, MatrixView, Selection};

/// One trace record: the selection after search step `iteration` (step 0 is
/// the initial selection).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasStep {
    pub iteration: usize,
    pub selection: Selection,
    pub ave: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasResult {
    pub selection: Selection,
    pub ave: f64,
    /// Completed searches, the final confirming one included.
    pub t_las: usize,
    pub trace: Vec<LasStep>,
    pub converged: bool,
}

/// Alternating best-response search: columns for the current rows, then
/// rows for the current columns, until a search hands back the incumbent.
///
/// The very first search cannot end the run, because the initial rows were
/// not chosen as a best response; every later confirmation leaves a
/// selection that is both row and column dominant.
pub fn run_las<M: MatrixView + ?Sized>(matrix: &M, k: usize, init: Option<Selection>) -> Result<LasResult> {
    let (n, m) = (matrix.n_rows(), matrix.n_cols());
    if k == 0 || k > n || k > m {
        return Err(Error::Domain(format!("LAS needs 1 <= k <= min(n, m), got k={k} for {n}x{m}")));
    }
    let init = init.unwrap_or_else(|| Selection::leading(k));
    if init.rows().len() != k || init.cols().len() != k {
        return Err(Error::Shape(format!(
            "initial selection is {}x{}, expected {k}x{k}",
            init.rows().len(),
            init.cols().len()
        )));
    }
    init.validate_for(matrix)?;

    let mut rows = init.rows().to_vec();
    let mut cols = init.cols().to_vec();
    let mut trace = vec![LasStep { iteration: 0, ave: ave(matrix, &init)?, selection: init }];
    let mut t = 0usize;
    loop {
        let search_cols = t.is_multiple_of(2);
        let (next, incumbent) = if search_cols {
            (top_k(&col_sums_over(matrix, &rows), k), &cols)
        } else {
            (top_k(&row_sums_over(matrix, &cols), k), &rows)
        };
        t += 1;
        let unchanged = next == *incumbent;
        if search_cols {
            cols = next;
        } else {
            rows = next;
        }
        let selection = Selection::new(rows.clone(), cols.clone())?;
        let value = ave(matrix, &selection)?;
        trace.push(LasStep { iteration: t, selection, ave: value });
        if unchanged && t > 1 {
            let last = trace.last().expect("trace is nonempty");
            return Ok(LasResult {
                selection: last.selection.clone(),
                ave: last.ave,
                t_las: t,
                trace,
                converged: true,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{is_local_max, GaussianMatrix};
    use proptest::prelude::*;

    #[test]
    fn hand_traced_three_by_three() {
        let m = GaussianMatrix::from_rows(&[vec![1.0, 4.0, 0.0], vec![0.0, 2.0, 9.0], vec![3.0, 0.0, 5.0]]).unwrap();
        let init = Selection::new(vec![0], vec![0]).unwrap();
        let r = run_las(&m, 1, Some(init)).unwrap();
        assert_eq!(r.selection, Selection::new(vec![0], vec![1]).unwrap());
        assert_eq!(r.ave, 4.0);
        assert_eq!(r.t_las, 2);
        assert!(r.converged);
        assert!(is_local_max(&m, &r.selection).unwrap());
        let aves: Vec<f64> = r.trace.iter().map(|s| s.ave).collect();
        assert_eq!(aves, vec![1.0, 4.0, 4.0]);
    }

    #[test]
    fn block_of_tens_confirms_in_two_searches() {
        let n = 7;
        let block = [2usize, 5];
        let mut e = vec![0.0; n * n];
        for &i in &block {
            for &j in &block {
                e[i * n + j] = 10.0;
            }
        }
        let m = GaussianMatrix::from_entries(n, n, e).unwrap();
        let init = Selection::new(block.to_vec(), block.to_vec()).unwrap();
        let r = run_las(&m, 2, Some(init.clone())).unwrap();
        assert_eq!(r.t_las, 2);
        assert_eq!(r.ave, 10.0);
        assert_eq!(r.selection, init);
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = GaussianMatrix::generate(3, 3, 0).unwrap();
        assert!(matches!(run_las(&m, 4, None), Err(Error::Domain(_))));
        assert!(matches!(run_las(&m, 0, None), Err(Error::Domain(_))));
        let wrong = Selection::new(vec![0], vec![0, 1]).unwrap();
        assert!(matches!(run_las(&m, 2, Some(wrong)), Err(Error::Shape(_))));
    }

    #[test]
    fn outputs_are_local_maxima_on_random_instances() {
        for seed in 0..100 {
            let m = GaussianMatrix::generate(50, 50, seed).unwrap();
            let r = run_las(&m, 3, None).unwrap();
            assert!(is_local_max(&m, &r.selection).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn default_init_is_leading_block() {
        let m = GaussianMatrix::generate(10, 10, 3).unwrap();
        let r = run_las(&m, 2, None).unwrap();
        assert_eq!(r.trace[0].selection, Selection::leading(2));
        assert_eq!(r, run_las(&m, 2, Some(Selection::leading(2))).unwrap());
    }

    proptest! {
        #[test]
        fn trace_is_monotone_and_bounded(seed in any::<u64>(), n in 2usize..30, k in 1usize..4) {
            prop_assume!(k <= n);
            let m = GaussianMatrix::generate(n, n, seed).unwrap();
            let r = run_las(&m, k, None).unwrap();
            for w in r.trace.windows(2) {
                prop_assert!(w[1].ave >= w[0].ave);
            }
            let c = super::super::binomial(n, k);
            prop_assert!((r.t_las as u128) <= c.saturating_mul(c).max(2));
            prop_assert_eq!(r.trace.len(), r.t_las + 1);
            prop_assert!(is_local_max(&m, &r.selection).unwrap());
        }

        #[test]
        fn terminates_on_integer_ties(entries in proptest::collection::vec(-2i8..3, 36), k in 1usize..4) {
            let m = GaussianMatrix::from_entries(6, 6, entries.into_iter().map(f64::from).collect()).unwrap();
            let r = run_las(&m, k, None).unwrap();
            prop_assert!(is_local_max(&m, &r.selection).unwrap());
        }
    }
}
