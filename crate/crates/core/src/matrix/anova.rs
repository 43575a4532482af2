//! Two-way ANOVA split of a square block and the rescaled `Psi` coordinates
//! used to describe dominant blocks near the extreme-value scale.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theory::b_n;

/// `B = grand_mean * 11' + Row(B) + Col(B) + residual`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnovaParts {
    pub grand_mean: f64,
    /// `B_i. - B..`
    pub row_effects: Array1<f64>,
    /// `B_.j - B..`
    pub col_effects: Array1<f64>,
    /// Doubly centered remainder.
    pub residual: Array2<f64>,
}

impl AnovaParts {
    pub fn k(&self) -> usize {
        self.row_effects.len()
    }

    /// `Row(B)`: row effect `i` repeated across row `i`.
    pub fn row_matrix(&self) -> Array2<f64> {
        let k = self.k();
        Array2::from_shape_fn((k, k), |(i, _)| self.row_effects[i])
    }

    /// `Col(B)`: column effect `j` repeated down column `j`.
    pub fn col_matrix(&self) -> Array2<f64> {
        let k = self.k();
        Array2::from_shape_fn((k, k), |(_, j)| self.col_effects[j])
    }
}

fn require_square(b: &Array2<f64>) -> Result<usize> {
    let (r, c) = b.dim();
    if r != c || r == 0 {
        return Err(Error::Shape(format!("expected a nonempty square matrix, got {r}x{c}")));
    }
    Ok(r)
}

pub fn anova(b: &Array2<f64>) -> Result<AnovaParts> {
    let k = require_square(b)?;
    let kf = k as f64;
    let row_means = b.sum_axis(Axis(1)) / kf;
    let col_means = b.sum_axis(Axis(0)) / kf;
    let grand_mean = b.sum() / (kf * kf);
    let residual = Array2::from_shape_fn((k, k), |(i, j)| b[[i, j]] - row_means[i] - col_means[j] + grand_mean);
    Ok(AnovaParts { grand_mean, row_effects: row_means - grand_mean, col_effects: col_means - grand_mean, residual })
}

pub fn reconstruct(parts: &AnovaParts) -> Result<Array2<f64>> {
    let k = parts.k();
    if parts.col_effects.len() != k || parts.residual.dim() != (k, k) {
        return Err(Error::Shape(format!(
            "inconsistent ANOVA parts: {} row effects, {} column effects, residual {:?}",
            k,
            parts.col_effects.len(),
            parts.residual.dim()
        )));
    }
    Ok(Array2::from_shape_fn((k, k), |(i, j)| {
        parts.grand_mean + parts.row_effects[i] + parts.col_effects[j] + parts.residual[[i, j]]
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiVariant {
    Row,
    Col,
}

/// `(sqrt(2 log n)(sqrt(k) ave - b_n), Row, Col, ANOVA)` with either the row
/// or the column effects stretched by `sqrt(2 k log n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiParts {
    pub psi1: f64,
    pub psi2: Array2<f64>,
    pub psi3: Array2<f64>,
    pub psi4: Array2<f64>,
    pub variant: PsiVariant,
    pub n_context: f64,
}

fn psi(a: &Array2<f64>, n: f64, variant: PsiVariant) -> Result<PsiParts> {
    let k = require_square(a)? as f64;
    let bn = b_n(n)?;
    let parts = anova(a)?;
    let log_n = n.ln();
    let stretch = (2.0 * k * log_n).sqrt();
    let row = parts.row_matrix();
    let col = parts.col_matrix();
    let (psi2, psi3) = match variant {
        PsiVariant::Row => (row * stretch, col),
        PsiVariant::Col => (row, col * stretch),
    };
    Ok(PsiParts {
        psi1: (2.0 * log_n).sqrt() * (k.sqrt() * parts.grand_mean - bn),
        psi2,
        psi3,
        psi4: parts.residual,
        variant,
        n_context: n,
    })
}

pub fn psi_row(a: &Array2<f64>, n: f64) -> Result<PsiParts> {
    psi(a, n, PsiVariant::Row)
}

pub fn psi_col(a: &Array2<f64>, n: f64) -> Result<PsiParts> {
    psi(a, n, PsiVariant::Col)
}

/// Rebuilds `A` from its `Psi` coordinates.
pub fn reconstruct_psi(parts: &PsiParts) -> Result<Array2<f64>> {
    let k = parts.psi4.nrows();
    for m in [&parts.psi2, &parts.psi3, &parts.psi4] {
        if m.dim() != (k, k) || k == 0 {
            return Err(Error::Shape("Psi components must share one square shape".into()));
        }
    }
    let kf = k as f64;
    let bn = b_n(parts.n_context)?;
    let stretch = (2.0 * kf * parts.n_context.ln()).sqrt();
    let level = parts.psi1 / stretch + bn / kf.sqrt();
    let (row, col) = match parts.variant {
        PsiVariant::Row => (&parts.psi2 / stretch, parts.psi3.clone()),
        PsiVariant::Col => (parts.psi2.clone(), &parts.psi3 / stretch),
    };
    Ok(row + col + &parts.psi4 + level)
}
