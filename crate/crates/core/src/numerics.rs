//! Shared numerical utilities: eigensolver wrappers, special functions, and
//! quadrature helpers.

use crate::error::{KerrError, Result};
use crate::C64;
use faer::Mat;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>> {
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| KerrError::Eigsolver(format!("{e:?}")))?;
    let s = evd.S();
    Ok((0..m.nrows()).map(|i| s[i].re).collect())
}

/// Full Hermitian eigendecomposition; eigenvalues ascending with matching
/// eigenvector columns.
pub fn hermitian_eigen(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| KerrError::Eigsolver(format!("{e:?}")))?;
    let s = evd.S();
    let vals: Vec<f64> = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Eigenvalues of a general complex matrix.
pub fn general_eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| KerrError::Eigsolver(format!("{e:?}")))
}

/// Eigendecomposition of a general complex matrix: (eigenvalues, right
/// eigenvector columns).
pub fn general_eigen(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let evd = m.eigen().map_err(|e| KerrError::Eigsolver(format!("{e:?}")))?;
    let s = evd.S();
    let vals: Vec<C64> = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

/// ln(n!) for n in 0..dim.
pub fn ln_factorial_table(dim: usize) -> Vec<f64> {
    let mut t = vec![0.0; dim.max(1)];
    for n in 1..dim {
        t[n] = t[n - 1] + (n as f64).ln();
    }
    t
}

/// Complementary error function, Chebyshev fit (|fractional error| < 1.2e-7).
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.15e-9).
pub fn inv_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Stratified standard-normal samples: quantile midpoints of n equal-mass
/// bins. Deterministic and mean-zero by symmetry.
pub fn stratified_normal(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| inv_normal_cdf((i as f64 + 0.5) / n as f64))
        .collect()
}

/// Trapezoid rule on a possibly non-uniform axis.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// 2-D trapezoid over a rectangular grid; `values[ip][ix]`.
pub fn trapezoid_2d(xs: &[f64], ps: &[f64], values: &[Vec<f64>]) -> f64 {
    let per_p: Vec<f64> = values.iter().map(|row| trapezoid(xs, row)).collect();
    trapezoid(ps, &per_p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_known_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-7);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 2e-7);
        assert!((normal_cdf(-2.0) - 0.022750131948179195).abs() < 2e-7);
    }

    #[test]
    fn quantile_roundtrip() {
        for &p in &[0.001, 0.05, 0.3, 0.5, 0.77, 0.999] {
            let x = inv_normal_cdf(p);
            assert!((normal_cdf(x) - p).abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn stratified_samples_symmetric() {
        let z = stratified_normal(33);
        let mean: f64 = z.iter().sum::<f64>() / 33.0;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn trapezoid_quadratic() {
        let xs: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((trapezoid(&xs, &ys) - 1.0 / 3.0).abs() < 1e-4);
    }
}
