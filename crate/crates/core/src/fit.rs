//! Weighted linear least squares through an SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of a weighted least-squares problem.
#[derive(Clone, Debug)]
pub struct LstsqFit {
    pub coef: Vec<f64>,
    /// Root-mean-square of the weighted residuals.
    pub rms: f64,
    pub condition: f64,
}

/// Minimises `sum_i w_i^2 (rows_i . coef - rhs_i)^2`.
pub fn weighted_lstsq(rows: &[Vec<f64>], rhs: &[f64], weights: &[f64]) -> Result<LstsqFit> {
    let m = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if m < k || k == 0 || rhs.len() != m || weights.len() != m {
        return Err(Error::DegenerateFit);
    }
    let a = DMatrix::from_fn(m, k, |i, j| rows[i][j] * weights[i]);
    let b = DVector::from_iterator(m, rhs.iter().zip(weights).map(|(r, w)| r * w));
    // Column scaling keeps the conditioning estimate about geometry, not units.
    let scales: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    if scales.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(Error::DegenerateFit);
    }
    let scaled = DMatrix::from_fn(m, k, |i, j| a[(i, j)] / scales[j]);
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(smin > 1e-13 * smax) {
        return Err(Error::DegenerateFit);
    }
    let x = svd.solve(&b, 0.0).map_err(|_| Error::DegenerateFit)?;
    let resid = &scaled * &x - &b;
    let coef = (0..k).map(|j| x[j] / scales[j]).collect();
    Ok(LstsqFit {
        coef,
        rms: (resid.norm_squared() / m as f64).sqrt(),
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|x| vec![1.0, *x]).collect();
        let rhs: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x).collect();
        let fit = weighted_lstsq(&rows, &rhs, &[1.0; 10]).unwrap();
        assert!((fit.coef[0] - 2.0).abs() < 1e-12 && (fit.coef[1] + 3.0).abs() < 1e-12);
        assert!(fit.rms < 1e-12);
    }

    #[test]
    fn collinear_columns_rejected() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let err = weighted_lstsq(&rows, &[0.0; 5], &[1.0; 5]).unwrap_err();
        assert_eq!(err.code(), "E_DEGENERATE_FIT");
    }
}
