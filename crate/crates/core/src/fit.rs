//! Least-squares fitting of a tensor against the span of others.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CurvError, Result};
use crate::tensor::{res, Tensor};

/// Relative singular-value cutoff on the column-normalized basis.
const RANK_CUTOFF: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub exact: bool,
}

impl FitResult {
    pub fn coef(&self, i: usize) -> f64 {
        self.coefficients[i]
    }
}

/// Minimal-norm least-squares solution of `target ≈ Σ c_i basis_i`.
///
/// Columns are normalized before the SVD; the minimal-norm tie break is
/// applied in the original coefficients.
pub fn fit_span(target: &Tensor, basis: &[&Tensor], tol: f64) -> Result<FitResult> {
    if basis.is_empty() {
        return Err(CurvError::EmptyBasis);
    }
    for b in basis {
        target.check_same_shape(b)?;
    }
    let k = basis.len();
    let rows = target.len();
    let scales: Vec<f64> =
        basis.iter().map(|b| b.norm()).map(|s| if s > 0.0 { s } else { 1.0 }).collect();
    // Zero padding keeps the full right-singular basis when rows < k.
    let padded = rows.max(k);
    let a = DMatrix::from_fn(padded, k, |i, j| if i < rows { basis[j].data()[i] / scales[j] } else { 0.0 });
    let b = DVector::from_fn(padded, |i, _| if i < rows { target.data()[i] } else { 0.0 });
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested Vᵀ");
    let smax = svd.singular_values.iter().fold(0.0f64, |x, &v| x.max(v));
    let utb = u.transpose() * &b;
    let mut y = DVector::zeros(k);
    let mut null_dirs = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let row = vt.row(i).transpose();
        if smax > 0.0 && s > RANK_CUTOFF * smax {
            y += row * (utb[i] / s);
        } else {
            null_dirs.push(row);
        }
    }
    let mut x = DVector::from_fn(k, |i, _| y[i] / scales[i]);
    if !null_dirs.is_empty() {
        let nmat = DMatrix::from_fn(k, null_dirs.len(), |i, j| null_dirs[j][i] / scales[i]);
        let gram = nmat.transpose() * &nmat;
        if let Some(gi) = gram.try_inverse() {
            let proj = &nmat * gi * nmat.transpose() * &x;
            x -= proj;
        }
    }
    let coefficients: Vec<f64> = x.iter().copied().collect();
    let mut approx = Tensor::zeros(target.n(), target.rank());
    for (c, bt) in coefficients.iter().zip(basis) {
        approx.axpy(*c, bt);
    }
    let residual = res(target, &approx);
    Ok(FitResult { coefficients, residual, exact: residual <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(v: &[f64]) -> Tensor {
        Tensor::from_vec(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn exact_multiple() {
        let b = vecs(&[1.0, 2.0, -1.0]);
        let f = fit_span(&b.scaled(2.0), &[&b], 1e-8).unwrap();
        assert!((f.coef(0) - 2.0).abs() < 1e-14 && f.exact && f.residual < 1e-15);
    }

    #[test]
    fn zero_target_and_zero_basis() {
        let z = vecs(&[0.0, 0.0, 0.0]);
        let f = fit_span(&z, &[&z], 1e-8).unwrap();
        assert_eq!(f.coef(0), 0.0);
        assert!(f.exact);
    }

    #[test]
    fn minimal_norm_on_dependent_basis() {
        // target = λ³ e ≈ α (λ e) + β e has solutions with λα + β = λ³.
        let lam = 2.0;
        let e = vecs(&[1.0, 1.0, 1.0, 1.0]);
        let h = e.scaled(lam);
        let f = fit_span(&e.scaled(lam * lam), &[&h, &e], 1e-8).unwrap();
        let want = [lam.powi(3) / (lam * lam + 1.0), lam * lam / (lam * lam + 1.0)];
        assert!((f.coef(0) - want[0]).abs() < 1e-12 && (f.coef(1) - want[1]).abs() < 1e-12);
        assert!(f.exact);
    }

    #[test]
    fn inexact_residual_is_reported() {
        let f = fit_span(&vecs(&[1.0, 0.0]), &[&vecs(&[0.0, 1.0])], 1e-8).unwrap();
        assert!(!f.exact && (f.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(fit_span(&vecs(&[1.0]), &[], 1e-8), Err(CurvError::EmptyBasis));
        assert!(fit_span(&vecs(&[1.0, 2.0]), &[&Tensor::zeros(2, 2)], 1e-8).is_err());
    }
}
