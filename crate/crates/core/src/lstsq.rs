//! Dense complex least squares with a ridge filter.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative ridge parameter: singular values are filtered by
/// `sigma / (sigma^2 + (RIDGE sigma_max)^2)`.
pub const RIDGE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LstsqSolution {
    pub x: Vec<Complex64>,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    /// Set when the ridge term changed the solution materially.
    pub regularized: bool,
}

/// Minimizes `||A x - b||_2` through the SVD of the column-equilibrated matrix.
pub fn solve(rows: usize, cols: usize, a: &[Complex64], b: &[Complex64]) -> LstsqSolution {
    solve_with_ridge(rows, cols, a, b, RIDGE)
}

/// [`solve`] with an explicit relative ridge parameter.
pub fn solve_with_ridge(
    rows: usize,
    cols: usize,
    a: &[Complex64],
    b: &[Complex64],
    ridge: f64,
) -> LstsqSolution {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    let mut m = DMatrix::from_row_slice(rows, cols, a);
    let scales: Vec<f64> = (0..cols)
        .map(|j| {
            let n = m.column(j).norm();
            if n > 0.0 {
                1.0 / n
            } else {
                0.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        m.column_mut(j).scale_mut(*s);
    }
    let rhs = DVector::from_column_slice(b);
    let svd = m.svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors");
    let v_t = svd.v_t.as_ref().expect("right singular vectors");
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let mu = ridge * sigma_max;
    let mut y = DVector::<Complex64>::zeros(cols);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let proj = u.column(k).dotc(&rhs);
        let filt = s / (s * s + mu * mu);
        // v_k = conj of row k of V^H
        for j in 0..cols {
            y[j] += v_t[(k, j)].conj() * proj * filt;
        }
    }
    let x = y
        .iter()
        .zip(&scales)
        .map(|(yj, s)| *yj * *s)
        .collect();
    let condition = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    LstsqSolution {
        x,
        condition,
        regularized: sigma_min < 100.0 * mu,
    }
}
