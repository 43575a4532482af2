use ndarray::Array2;

use super::Selection;
use crate::error::{Error, Result};

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Shared-row and shared-column fractions `(|I1 n I2| / k, |J1 n J2| / k)`.
pub fn overlap(a: &Selection, b: &Selection, k: usize) -> Result<(f64, f64)> {
    for s in [a, b] {
        if s.rows().len() != k || s.cols().len() != k {
            return Err(Error::Shape(format!(
                "expected {k}x{k} selections, got {}x{}",
                s.rows().len(),
                s.cols().len()
            )));
        }
    }
    if k == 0 {
        return Err(Error::Domain("overlap needs k >= 1".into()));
    }
    let kf = k as f64;
    Ok((intersection_size(a.rows(), b.rows()) as f64 / kf, intersection_size(a.cols(), b.cols()) as f64 / kf))
}

/// Lower Cholesky factor of `Sigma_ab = |I_a n I_b| / k`, the covariance of
/// the sums `k^{-1/2} sum_{i in I_a} Z_i`.
pub fn overlap_cholesky(index_sets: &[Vec<usize>]) -> Result<Array2<f64>> {
    let r = index_sets.len();
    if r == 0 {
        return Err(Error::Domain("need at least one index set".into()));
    }
    let k = index_sets[0].len();
    if k == 0 {
        return Err(Error::Domain("index sets must be nonempty".into()));
    }
    let mut sorted = Vec::with_capacity(r);
    for (pos, set) in index_sets.iter().enumerate() {
        if set.len() != k {
            return Err(Error::Shape(format!("set {pos} has {} elements, expected {k}", set.len())));
        }
        let mut s = set.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSelection(format!("set {pos} repeats an index")));
        }
        sorted.push(s);
    }

    let kf = k as f64;
    let sigma = Array2::from_shape_fn((r, r), |(a, b)| intersection_size(&sorted[a], &sorted[b]) as f64 / kf);
    let mut l = Array2::<f64>::zeros((r, r));
    for i in 0..r {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|p| l[[i, p]] * l[[j, p]]).sum();
            if i == j {
                let pivot = sigma[[i, i]] - dot;
                if pivot <= 1e-12 {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: pivot });
                }
                l[[i, i]] = pivot.sqrt();
            } else {
                l[[i, j]] = (sigma[[i, j]] - dot) / l[[j, j]];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_counts() {
        let a = Selection::new(vec![0, 1, 2, 3], vec![0, 1, 2, 3]).unwrap();
        assert_eq!(overlap(&a, &a, 4).unwrap(), (1.0, 1.0));
        let b = Selection::new(vec![4, 5, 6, 7], vec![4, 5, 6, 7]).unwrap();
        assert_eq!(overlap(&a, &b, 4).unwrap(), (0.0, 0.0));
        let c = Selection::new(vec![1, 3, 8, 9], vec![3, 10, 11, 12]).unwrap();
        assert_eq!(overlap(&a, &c, 4).unwrap(), (0.5, 0.25));
        assert!(overlap(&a, &c, 3).is_err());
    }

    #[test]
    fn disjoint_sets_give_identity() {
        let l = overlap_cholesky(&[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(l, Array2::<f64>::eye(2));
    }

    #[test]
    fn two_sets_closed_form() {
        // k = 5, t = 3 shared
        let l = overlap_cholesky(&[vec![0, 1, 2, 3, 4], vec![9, 2, 0, 1, 7]]).unwrap();
        let rho: f64 = 3.0 / 5.0;
        assert_eq!(l[[0, 0]], 1.0);
        assert!((l[[1, 0]] - rho).abs() < 1e-15);
        assert!((l[[1, 1]] - (1.0 - rho * rho).sqrt()).abs() < 1e-15);
        assert_eq!(l[[0, 1]], 0.0);
    }

    #[test]
    fn duplicate_sets_are_not_factorizable() {
        let err = overlap_cholesky(&[vec![0, 1], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 1, .. }));
        assert!(overlap_cholesky(&[vec![0, 1], vec![2]]).is_err());
        assert!(overlap_cholesky(&[]).is_err());
    }
}
