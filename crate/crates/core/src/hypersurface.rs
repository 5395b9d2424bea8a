//! Hypersurfaces in space forms: intrinsic curvature from the second
//! fundamental tensor and the cubic relations it satisfies.

use nalgebra::Complex;
use serde::Serialize;

use crate::conditions::Tolerances;
use crate::curvature::{weyl_decompose, Ambient, CurvaturePackage};
use crate::error::{CurvError, Result};
use crate::fit::fit_span;
use crate::tensor::{metric_power, metric_trace, numeric_rank, operator_eigenvalues, res, MetricPoint, Sym2};

/// Induced metric, second fundamental tensor, normal sign and ambient scalar curvature.
#[derive(Clone, Debug)]
pub struct HypersurfaceData {
    pub metric: MetricPoint,
    pub h: Sym2,
    pub epsilon: f64,
    pub kappa_tilde: f64,
}

impl HypersurfaceData {
    pub fn new(metric: MetricPoint, h: Sym2, epsilon: f64, kappa_tilde: f64) -> Result<Self> {
        if h.n() != metric.n() {
            return Err(CurvError::DimensionMismatch { expected: metric.n(), found: h.n() });
        }
        if epsilon != 1.0 && epsilon != -1.0 {
            return Err(CurvError::InvalidParams(format!("epsilon must be +1 or -1, got {epsilon}")));
        }
        if !kappa_tilde.is_finite() {
            return Err(CurvError::InvalidParams("kappa_tilde must be finite".into()));
        }
        Ok(HypersurfaceData { metric, h, epsilon, kappa_tilde })
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    /// Ambient curvature `c = κ̃/(n(n+1))`.
    pub fn c(&self) -> f64 {
        self.ambient().c(self.n())
    }

    pub fn ambient(&self) -> Ambient {
        Ambient { epsilon: self.epsilon, kappa_tilde: self.kappa_tilde }
    }

    pub fn tr_h(&self) -> f64 {
        metric_trace(&self.h, &self.metric)
    }

    pub fn h2(&self) -> Sym2 {
        metric_power(&self.h, &self.metric, 2).expect("matching dimensions")
    }

    pub fn h3(&self) -> Sym2 {
        metric_power(&self.h, &self.metric, 3).expect("matching dimensions")
    }

    /// Eigenvalues of the shape operator `g⁻¹H`.
    pub fn principal_curvatures(&self) -> Vec<Complex<f64>> {
        operator_eigenvalues(&self.h, &self.metric)
    }

    /// Number of distinct principal curvatures, clustering with a relative gap.
    pub fn distinct_principal_curvatures(&self, gap: f64) -> usize {
        let ev = self.principal_curvatures();
        let scale = ev.iter().fold(1.0f64, |s, z| s.max(z.norm()));
        let mut reps: Vec<Complex<f64>> = Vec::new();
        for z in ev {
            if !reps.iter().any(|r| (r - z).norm() <= gap * scale) {
                reps.push(z);
            }
        }
        reps.len()
    }

    pub fn rank_h(&self, tol_rel: f64) -> usize {
        numeric_rank(&self.h, tol_rel)
    }
}

/// Curvature package of the hypersurface from the Gauss equation
/// `R = ε/2 H∧H + κ̃/(n(n+1)) G`.
pub fn gauss_package(h: &HypersurfaceData) -> Result<CurvaturePackage> {
    if h.n() < 3 {
        return Err(CurvError::DimensionOutOfRange(h.n(), 3, crate::tensor::MAX_DIM));
    }
    let r = (0.5 * h.epsilon) * h.h.kn(&h.h) + h.c() * h.metric.big_g();
    Ok(weyl_decompose(&r, &h.metric)?.with_ambient(h.ambient()))
}

/// Residuals of the contracted Gauss equations for `S` and `κ` against the package.
pub fn gauss_contraction_residuals(h: &HypersurfaceData, pkg: &CurvaturePackage) -> (f64, f64) {
    let n = h.n() as f64;
    let tr = h.tr_h();
    let h2 = h.h2();
    let s = h.epsilon * (tr * &h.h - &h2) + ((n - 1.0) * h.kappa_tilde / (n * (n + 1.0))) * h.metric.g();
    let kappa = h.epsilon * (tr * tr - metric_trace(&h2, &h.metric)) + (n - 1.0) * h.kappa_tilde / (n + 1.0);
    (res(&pkg.s, &s), scalar_res(pkg.kappa, kappa))
}

/// `|a - b| / max(1, |a| + |b|)`.
pub fn scalar_res(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1.0)
}

/// Result of fitting `H² ≈ αH + βg`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UhDetection {
    pub in_uh: bool,
    /// Present when the fit is exact, i.e. off `U_H`.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub residual: f64,
}

pub fn detect_uh(h: &HypersurfaceData, tol: f64) -> UhDetection {
    let f = fit_span(h.h2().tensor(), &[h.h.tensor(), h.metric.g().tensor()], tol).expect("same shapes");
    let in_uh = !f.exact;
    UhDetection {
        in_uh,
        alpha: (!in_uh).then(|| f.coef(0)),
        beta: (!in_uh).then(|| f.coef(1)),
        residual: f.residual,
    }
}

/// Fit of `H³ = tr(H) H² + ψH + ρg` and of the general cubic `H³ = φH² + ψH + ρg`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubicFit {
    pub psi: f64,
    pub rho: f64,
    /// Coefficient of `H²` in the general cubic when that fit is exact.
    pub phi_opt: Option<f64>,
    pub residual: f64,
    pub general_residual: f64,
    /// `ψ, ρ` are unique only on `U_H`.
    pub in_uh: bool,
}

pub fn fit_cubic(h: &HypersurfaceData, tol: &Tolerances) -> CubicFit {
    let h2 = h.h2();
    let h3 = h.h3();
    let g = h.metric.g();
    let target = &h3 - &(h.tr_h() * &h2);
    let f = fit_span(target.tensor(), &[h.h.tensor(), g.tensor()], tol.exact).expect("same shapes");
    let gen = fit_span(h3.tensor(), &[h2.tensor(), h.h.tensor(), g.tensor()], tol.exact).expect("same shapes");
    CubicFit {
        psi: f.coef(0),
        rho: f.coef(1),
        phi_opt: gen.exact.then(|| gen.coef(0)),
        residual: f.residual,
        general_residual: gen.residual,
        in_uh: detect_uh(h, tol.nonzero).in_uh,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(h: &[f64]) -> HypersurfaceData {
        HypersurfaceData::new(MetricPoint::euclidean(h.len()), Sym2::diag(h), 1.0, 0.0).unwrap()
    }

    #[test]
    fn rank_two_gauss_package() {
        let hd = euclid(&[2.0, 3.0, 0.0, 0.0, 0.0]);
        let pkg = gauss_package(&hd).unwrap();
        assert!(res(&pkg.s, &Sym2::diag(&[6.0, 6.0, 0.0, 0.0, 0.0])) < 1e-14);
        assert!((pkg.kappa - 12.0).abs() < 1e-12);
        let (rs, rk) = gauss_contraction_residuals(&hd, &pkg);
        assert!(rs < 1e-14 && rk < 1e-14);
        let cf = fit_cubic(&hd, &Tolerances::default());
        assert!(cf.in_uh && (cf.psi + 6.0).abs() < 1e-12 && cf.rho.abs() < 1e-12 && cf.residual < 1e-14);
        assert!((cf.phi_opt.unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn umbilical_is_constant_curvature() {
        let lam = 1.5;
        let m = MetricPoint::euclidean(5);
        let hd = HypersurfaceData::new(m.clone(), lam * m.g(), 1.0, 0.0).unwrap();
        let pkg = gauss_package(&hd).unwrap();
        assert!(res(&pkg.r, &((lam * lam) * m.big_g())) < 1e-14);
        let d = detect_uh(&hd, 1e-8);
        assert!(!d.in_uh);
        let den = lam * lam + 1.0;
        assert!((d.alpha.unwrap() - lam.powi(3) / den).abs() < 1e-12);
        assert!((d.beta.unwrap() - lam * lam / den).abs() < 1e-12);
    }

    #[test]
    fn two_eigenvalue_fit() {
        let d = detect_uh(&euclid(&[2.0, 1.0, 1.0, 1.0, 1.0]), 1e-8);
        assert!(!d.in_uh && (d.alpha.unwrap() - 3.0).abs() < 1e-12 && (d.beta.unwrap() + 2.0).abs() < 1e-12);
        assert!(detect_uh(&euclid(&[2.0, 3.0, 0.0, 0.0, 0.0]), 1e-8).in_uh);
    }

    #[test]
    fn three_curvatures_instance() {
        let hd = euclid(&[1.0, 1.0, -1.0, -1.0, 0.0]);
        let pkg = gauss_package(&hd).unwrap();
        assert!((pkg.kappa + 4.0).abs() < 1e-12);
        assert!(res(&pkg.s, &Sym2::diag(&[-1.0, -1.0, -1.0, -1.0, 0.0])) < 1e-14);
        let cf = fit_cubic(&hd, &Tolerances::default());
        assert!((cf.psi - 1.0).abs() < 1e-12 && cf.rho.abs() < 1e-12);
        assert_eq!(hd.distinct_principal_curvatures(1e-7), 3);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let m = MetricPoint::euclidean(4);
        assert!(HypersurfaceData::new(m.clone(), Sym2::identity(4), 0.5, 0.0).is_err());
        assert!(HypersurfaceData::new(m, Sym2::identity(5), 1.0, 0.0).is_err());
    }
}
