use super::{col_sums_over, row_sums_over, MatrixView, Selection};
use crate::error::Result;

/// `min` over members against `max` over the rest; an empty competitor set
/// has maximum `-inf`, so a selection covering every line is dominant.
fn dominates(sums: &[f64], members: &[usize]) -> bool {
    let mut inside = members.iter().peekable();
    let mut min_in = f64::INFINITY;
    let mut max_out = f64::NEG_INFINITY;
    for (idx, &s) in sums.iter().enumerate() {
        if inside.peek() == Some(&&idx) {
            inside.next();
            min_in = min_in.min(s);
        } else {
            max_out = max_out.max(s);
        }
    }
    min_in >= max_out
}

/// Every selected row's sum over the selected columns is at least that of
/// every unselected row.
pub fn is_row_dominant<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> Result<bool> {
    sel.validate_for(matrix)?;
    Ok(dominates(&row_sums_over(matrix, sel.cols()), sel.rows()))
}

pub fn is_column_dominant<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> Result<bool> {
    sel.validate_for(matrix)?;
    Ok(dominates(&col_sums_over(matrix, sel.rows()), sel.cols()))
}

/// Row dominant and column dominant: a fixed point of the alternating search.
pub fn is_local_max<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> Result<bool> {
    Ok(is_row_dominant(matrix, sel)? && is_column_dominant(matrix, sel)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::GaussianMatrix;

    fn block_matrix(n: usize, block: &[usize]) -> GaussianMatrix {
        let mut e = vec![0.0; n * n];
        for &i in block {
            for &j in block {
                e[i * n + j] = 10.0;
            }
        }
        GaussianMatrix::from_entries(n, n, e).unwrap()
    }

    #[test]
    fn separated_block_is_a_local_max() {
        let m = block_matrix(6, &[1, 4]);
        let sel = Selection::new(vec![1, 4], vec![1, 4]).unwrap();
        assert!(is_row_dominant(&m, &sel).unwrap());
        assert!(is_column_dominant(&m, &sel).unwrap());
        assert!(is_local_max(&m, &sel).unwrap());
        let off = Selection::new(vec![0, 1], vec![1, 4]).unwrap();
        assert!(!is_row_dominant(&m, &off).unwrap());
    }

    #[test]
    fn two_by_two_hand_evaluation() {
        let m = GaussianMatrix::from_rows(&[vec![5.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let sel = Selection::new(vec![0], vec![0]).unwrap();
        assert!(is_row_dominant(&m, &sel).unwrap());
        assert!(is_column_dominant(&m, &sel).unwrap());
        assert!(is_local_max(&m, &sel).unwrap());
        let sel = Selection::new(vec![0], vec![1]).unwrap();
        // row 0 over col 1 is 0 < 9
        assert!(!is_row_dominant(&m, &sel).unwrap());
    }

    #[test]
    fn full_selection_is_vacuously_dominant() {
        let m = GaussianMatrix::generate(3, 3, 1).unwrap();
        let full = Selection::leading(3);
        assert!(is_local_max(&m, &full).unwrap());
    }

    #[test]
    fn agrees_with_rescan_on_random_instances() {
        for seed in 0..40u64 {
            let m = GaussianMatrix::generate(8, 8, seed).unwrap();
            let mut rng = crate::rng::Rng64::new(seed ^ 0xABCD);
            let mut pick = |count: usize| {
                let mut v: Vec<usize> = (0..8).collect();
                for i in 0..count {
                    let j = i + rng.next_below((8 - i) as u64) as usize;
                    v.swap(i, j);
                }
                v.truncate(count);
                v
            };
            let sel = Selection::from_unsorted(pick(3), pick(3)).unwrap();
            let rsum = |i: usize| sel.cols().iter().map(|&j| m.entry(i, j)).sum::<f64>();
            let csum = |j: usize| sel.rows().iter().map(|&i| m.entry(i, j)).sum::<f64>();
            let row_ok =
                sel.rows().iter().all(|&i| (0..8).filter(|r| !sel.rows().contains(r)).all(|o| rsum(i) >= rsum(o)));
            let col_ok =
                sel.cols().iter().all(|&j| (0..8).filter(|c| !sel.cols().contains(c)).all(|o| csum(j) >= csum(o)));
            assert_eq!(is_row_dominant(&m, &sel).unwrap(), row_ok);
            assert_eq!(is_column_dominant(&m, &sel).unwrap(), col_ok);
        }
    }

    #[test]
    fn rejects_out_of_range_selection() {
        let m = GaussianMatrix::generate(2, 2, 1).unwrap();
        let sel = Selection::new(vec![2], vec![0]).unwrap();
        assert!(is_local_max(&m, &sel).is_err());
    }
}
