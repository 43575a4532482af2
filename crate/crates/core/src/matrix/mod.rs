//! Gaussian matrices, selections and the reductions the search algorithms
//! are built from.
//!
//! Entry `(i, j)` of the `n x m` matrix with seed `s` is the normal score of
//! draw `i * m + j` of the SplitMix64 stream seeded by `s`. [`GaussianMatrix`]
//! stores those entries; [`SeededGaussian`] recomputes them on demand, which
//! is how the large Monte Carlo trials avoid allocating `n^2` floats.

mod anova;
mod dominance;
mod io;
mod overlap;

pub use anova::{anova, psi_col, psi_row, reconstruct, reconstruct_psi, AnovaParts, PsiParts, PsiVariant};
pub use dominance::{is_column_dominant, is_local_max, is_row_dominant};
pub use io::MatrixDescriptor;
pub use overlap::{overlap, overlap_cholesky};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::splitmix_at;
use crate::special::normal_from_bits;

/// Largest number of entries a dense matrix may hold (2 GiB of `f64`).
pub const MAX_DENSE_ENTRIES: usize = 1 << 28;

/// Read access to a rectangular array of `f64`.
pub trait MatrixView {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;
}

impl<T: MatrixView + ?Sized> MatrixView for &T {
    fn n_rows(&self) -> usize {
        (**self).n_rows()
    }
    fn n_cols(&self) -> usize {
        (**self).n_cols()
    }
    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        (**self).entry(i, j)
    }
}

/// Dense row-major matrix of i.i.d. standard normals, or of external data
/// when `seed` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>,
    seed: Option<u64>,
}

impl GaussianMatrix {
    /// Generates the `n x m` matrix for `seed`.
    pub fn generate(n: usize, m: usize, seed: u64) -> Result<Self> {
        let len = checked_len(n, m)?;
        let entries = (0..len as u64).map(|t| normal_from_bits(splitmix_at(seed, t))).collect();
        Ok(Self { n, m, entries, seed: Some(seed) })
    }

    /// Wraps row-major data. Every entry must be finite.
    pub fn from_entries(n: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        let len = checked_len(n, m)?;
        if entries.len() != len {
            return Err(Error::Shape(format!("expected {len} entries for a {n}x{m} matrix, got {}", entries.len())));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("entry ({}, {}) is not finite", pos / m, pos % m)));
        }
        Ok(Self { n, m, entries, seed: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Shape(format!("row {bad} has {} entries, expected {m}", rows[bad].len())));
        }
        Self::from_entries(n, m, rows.concat())
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    /// Regeneration descriptor, present only for generated matrices.
    pub fn descriptor(&self) -> Option<MatrixDescriptor> {
        self.seed.map(|seed| MatrixDescriptor { n: self.n, m: self.m, seed })
    }
}

impl MatrixView for GaussianMatrix {
    fn n_rows(&self) -> usize {
        self.n
    }
    fn n_cols(&self) -> usize {
        self.m
    }
    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }
}

/// The matrix of [`GaussianMatrix::generate`] evaluated lazily.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededGaussian {
    n: usize,
    m: usize,
    seed: u64,
}

impl SeededGaussian {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Domain(format!("matrix dimensions must be positive, got {n}x{m}")));
        }
        n.checked_mul(m)
            .filter(|len| u64::try_from(*len).is_ok())
            .ok_or_else(|| Error::Capacity(format!("{n}x{m} overflows the index space")))?;
        Ok(Self { n, m, seed })
    }

    pub fn square(n: usize, seed: u64) -> Result<Self> {
        Self::new(n, n, seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn materialize(&self) -> Result<GaussianMatrix> {
        GaussianMatrix::generate(self.n, self.m, self.seed)
    }
}

impl MatrixView for SeededGaussian {
    fn n_rows(&self) -> usize {
        self.n
    }
    fn n_cols(&self) -> usize {
        self.m
    }
    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        normal_from_bits(splitmix_at(self.seed, (i * self.m + j) as u64))
    }
}

fn checked_len(n: usize, m: usize) -> Result<usize> {
    if n == 0 || m == 0 {
        return Err(Error::Domain(format!("matrix dimensions must be positive, got {n}x{m}")));
    }
    match n.checked_mul(m) {
        Some(len) if len <= MAX_DENSE_ENTRIES => Ok(len),
        _ => Err(Error::Capacity(format!("{n}x{m} exceeds the dense limit of {MAX_DENSE_ENTRIES} entries"))),
    }
}

/// A submatrix index pair. Both index lists are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Selection {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Selection {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        for (name, idx) in [("rows", &rows), ("cols", &cols)] {
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSelection(format!("{name} must be strictly increasing: {idx:?}")));
            }
        }
        Ok(Self { rows, cols })
    }

    /// Sorts both lists first; duplicates are still rejected.
    pub fn from_unsorted(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        cols.sort_unstable();
        Self::new(rows, cols)
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new(), cols: Vec::new() }
    }

    /// `{0..k-1} x {0..k-1}`.
    pub fn leading(k: usize) -> Self {
        Self { rows: (0..k).collect(), cols: (0..k).collect() }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    /// Checks the indices against the matrix shape.
    pub fn validate_for<M: MatrixView + ?Sized>(&self, matrix: &M) -> Result<()> {
        if self.rows.last().is_some_and(|&i| i >= matrix.n_rows()) {
            return Err(Error::InvalidSelection(format!("row index out of range for {} rows", matrix.n_rows())));
        }
        if self.cols.last().is_some_and(|&j| j >= matrix.n_cols()) {
            return Err(Error::InvalidSelection(format!("column index out of range for {} columns", matrix.n_cols())));
        }
        Ok(())
    }
}

/// Sum of the selected entries in row-major order.
pub fn selected_sum<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> f64 {
    let mut sum = 0.0;
    for &i in sel.rows() {
        for &j in sel.cols() {
            sum += matrix.entry(i, j);
        }
    }
    sum
}

/// Average of the selected submatrix.
pub fn ave<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> Result<f64> {
    sel.validate_for(matrix)?;
    if sel.rows().is_empty() || sel.cols().is_empty() {
        return Err(Error::InvalidSelection("average of an empty selection".into()));
    }
    Ok(selected_sum(matrix, sel) / (sel.rows().len() * sel.cols().len()) as f64)
}

/// For every row `i`, the sum of `M[i][j]` over `cols` (in the given order).
pub fn row_sums_over<M: MatrixView + ?Sized>(matrix: &M, cols: &[usize]) -> Vec<f64> {
    (0..matrix.n_rows()).map(|i| cols.iter().map(|&j| matrix.entry(i, j)).sum()).collect()
}

/// For every column `j`, the sum of `M[i][j]` over `rows` (in the given order).
pub fn col_sums_over<M: MatrixView + ?Sized>(matrix: &M, rows: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0; matrix.n_cols()];
    for &i in rows {
        for (j, acc) in sums.iter_mut().enumerate() {
            *acc += matrix.entry(i, j);
        }
    }
    sums
}

/// Copies the selected submatrix out.
pub fn submatrix<M: MatrixView + ?Sized>(matrix: &M, sel: &Selection) -> Result<Array2<f64>> {
    sel.validate_for(matrix)?;
    let (r, c) = (sel.rows().len(), sel.cols().len());
    Ok(Array2::from_shape_fn((r, c), |(a, b)| matrix.entry(sel.rows()[a], sel.cols()[b])))
}
