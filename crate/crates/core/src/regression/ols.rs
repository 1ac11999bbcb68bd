use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot below which a column is treated as linearly dependent.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ssr: f64,
}

/// Least squares of `y` on the given columns through a Householder QR.
///
/// Fails when a diagonal entry of `R` is below `PIVOT_TOL` times the norm of
/// its column.
pub fn ols(y: &[f64], columns: &[&[f64]]) -> Result<OlsFit> {
    let n = y.len();
    let p = columns.len();
    if p == 0 {
        return Ok(OlsFit {
            coefficients: Vec::new(),
            residuals: y.to_vec(),
            ssr: y.iter().map(|v| v * v).sum(),
        });
    }
    if n < p {
        return Err(Error::Regression(format!("{n} observations cannot fit {p} coefficients")));
    }
    let x = DMatrix::from_fn(n, p, |r, c| columns[c][r]);
    let qr = x.clone().qr();
    let r = qr.r();
    for c in 0..p {
        let norm = x.column(c).norm();
        let pivot = r[(c, c)].abs();
        if norm == 0.0 || pivot <= PIVOT_TOL * norm {
            return Err(Error::RankDeficient { column: c, pivot });
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { column: p - 1, pivot: 0.0 })?;
    let fitted = &x * &beta;
    let residuals: Vec<f64> = yv.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let ssr = residuals.iter().map(|e| e * e).sum();
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        residuals,
        ssr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let ones = vec![1.0; 6];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = ols(&y, &[&ones, &x]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] + 0.5).abs() < 1e-12);
        assert!(fit.ssr < 1e-24);
    }

    #[test]
    fn residual_is_orthogonal() {
        let ones = vec![1.0; 8];
        let a = vec![0.3, 1.1, -0.4, 2.0, 0.0, 0.7, -1.3, 0.9];
        let b = vec![1.0, 0.0, 1.0, 0.5, 0.25, 0.0, 2.0, 1.0];
        let y = vec![3.0, -1.0, 2.2, 0.4, 5.5, 1.0, -0.3, 2.0];
        let fit = ols(&y, &[&ones, &a, &b]).unwrap();
        for col in [&ones, &a, &b] {
            let dot: f64 = col.iter().zip(&fit.residuals).map(|(c, e)| c * e).sum();
            let scale = col.iter().map(|v| v * v).sum::<f64>().sqrt() * fit.ssr.sqrt();
            assert!(dot.abs() < 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn collinear_columns_rejected() {
        let ones = vec![1.0; 5];
        let twos = vec![2.0; 5];
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(ols(&y, &[&ones, &twos]), Err(Error::RankDeficient { column: 1, .. })));
    }
}
