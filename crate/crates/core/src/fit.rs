//! Linear least squares on explicit basis columns.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest acceptable condition number of the column-normalised design.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Condition number of the column-normalised design matrix.
    pub condition: f64,
}

/// Minimises `‖Σ_j c_j columns[j] − y‖₂` by SVD of the column-normalised
/// design.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LinearFit> {
    least_squares_with_limit(columns, y, MAX_CONDITION)
}

/// [`least_squares`] with a caller-chosen condition-number ceiling.
pub fn least_squares_with_limit(
    columns: &[Vec<f64>],
    y: &[f64],
    max_condition: f64,
) -> Result<LinearFit> {
    let n = y.len();
    let m = columns.len();
    if m == 0 || n < m {
        return Err(Error::IllConditioned(format!(
            "{n} samples cannot determine {m} coefficients"
        )));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidInput("basis columns differ in length".into()));
    }
    if y.iter().chain(columns.iter().flatten()).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample in least-squares data".into()));
    }
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    if scales.contains(&0.0) {
        return Err(Error::IllConditioned("a basis column vanishes on the grid".into()));
    }
    let a = DMatrix::from_fn(n, m, |i, j| columns[j][i] / scales[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::IllConditioned(format!(
            "condition number {condition:e} exceeds {max_condition:e}"
        )));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let r = &a * &x - &b;
    let residual = (r.norm_squared() / n as f64).sqrt();
    let coefficients = x.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(LinearFit {
        coefficients,
        residual,
        condition,
    })
}

/// `n` points spaced evenly in `log v` on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
