//! Pseudosymmetry-type conditions: fits, Roter decomposition, condition (∗)
//! and the per-point classification.

use serde::Serialize;

use crate::curvature::CurvaturePackage;
use crate::derived::{lin, Derived};
use crate::error::{CurvError, Result};
use crate::fit::{fit_span, FitResult};
use crate::tensor::{numeric_rank, res, res0, CurvTensor, MetricPoint, Sym2};

/// Thresholds shared by fits, set memberships and implication audits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// A fit or conclusion holds when its residual is at most this.
    pub exact: f64,
    /// A premise holds when its residual is at most this.
    pub premise: f64,
    /// A tensor is non-zero (membership in `U_S`, `U_C`, `U_R`, `U_H`) above this.
    pub nonzero: f64,
    /// Relative singular-value cutoff for ranks.
    pub rank_rel: f64,
    /// Relative gap for counting equal eigenvalues.
    pub eig_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-8, premise: 1e-9, nonzero: 1e-8, rank_rel: 1e-9, eig_gap: 1e-7 }
    }
}

impl Tolerances {
    /// Sets the shared exactness tolerance; premises get a tenth of it.
    pub fn with_exact(mut self, tol: f64) -> Self {
        self.exact = tol;
        self.premise = tol / 10.0;
        self
    }
}

/// Outcome of the spectral quasi-Einstein test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuasiEinstein {
    /// `S = (κ/n) g`.
    Einstein,
    /// `rank(S - αg) = 1`.
    Quasi { alpha: f64 },
    /// `rank(S - αg) > 1` for every α; reports the best candidate and its rank.
    Not { alpha: Option<f64>, rank: usize },
}

impl QuasiEinstein {
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            QuasiEinstein::Quasi { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_quasi(&self) -> bool {
        matches!(self, QuasiEinstein::Quasi { .. })
    }
}

/// `true` when `a` is not a multiple of `g` beyond tolerance.
pub fn outside_multiples_of_g(a: &Sym2, m: &MetricPoint, tol: f64) -> bool {
    let t = crate::tensor::metric_trace(a, m) / m.n() as f64;
    res(a, &(t * m.g())) > tol
}

/// Eigenvalue clusters of `g⁻¹A` with multiplicity at least `n - 1`, verified by `rank(A - αg) ≤ 1`.
pub fn spectral_alpha(a: &Sym2, m: &MetricPoint, tol: &Tolerances) -> QuasiEinstein {
    if !outside_multiples_of_g(a, m, tol.nonzero) {
        return QuasiEinstein::Einstein;
    }
    let n = m.n();
    let eig = crate::tensor::operator_eigenvalues(a, m);
    let scale = eig.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    let mut best: Option<(usize, f64)> = None;
    for zi in eig.iter() {
        let members: Vec<_> =
            eig.iter().filter(|zj| (*zj - zi).norm() <= tol.eig_gap * scale).collect();
        let mean = members.iter().map(|z| z.re).sum::<f64>() / members.len() as f64;
        if best.is_none_or(|(c, _)| members.len() > c) {
            best = Some((members.len(), mean));
        }
    }
    let (count, alpha) = best.expect("n >= 1 eigenvalues");
    let rank = numeric_rank(&(a - &(alpha * m.g())), tol.rank_rel);
    if count + 1 >= n && rank == 1 {
        QuasiEinstein::Quasi { alpha }
    } else {
        QuasiEinstein::Not { alpha: Some(alpha), rank }
    }
}

/// Scalars derived from a Roter decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoterDerived {
    pub alpha1: f64,
    pub alpha2: f64,
    pub l_r: f64,
    pub l: f64,
    pub l_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoterFit {
    pub applicable: bool,
    pub phi: f64,
    pub mu: f64,
    pub eta: f64,
    pub residual: f64,
    pub exact: bool,
    pub derived: Option<RoterDerived>,
    /// Residuals of the consequences evaluated with the fitted scalars.
    pub derived_residuals: Vec<(String, f64)>,
}

impl RoterDerived {
    pub fn from_coefficients(n: usize, kappa: f64, phi: f64, mu: f64, eta: f64) -> Self {
        let nf = n as f64;
        let alpha1 = kappa + ((nf - 2.0) * mu - 1.0) / phi;
        let alpha2 = (mu * kappa + (nf - 1.0) * eta) / phi;
        let l_r = ((nf - 2.0) * (mu * mu - phi * eta) - mu) / phi;
        let l = (nf - 2.0) * (mu * mu - phi * eta) / phi;
        let l_c = l_r + (kappa / (nf - 1.0) - alpha1) / (nf - 2.0);
        RoterDerived { alpha1, alpha2, l_r, l, l_c }
    }
}

pub(crate) fn fit_roter_with(d: &Derived, tol: &Tolerances) -> RoterFit {
    let pkg = d.pkg;
    let applicable = outside_multiples_of_g(&pkg.s, &pkg.metric, tol.nonzero)
        && res0(&pkg.c) > tol.nonzero;
    let half_ss = 0.5 * d.s_s();
    let half_gg = d.big_g();
    let f = fit_span(pkg.r.tensor(), &[half_ss.tensor(), d.g_s().tensor(), half_gg.tensor()], tol.exact)
        .expect("basis shares the shape of R");
    let (phi, mu, eta) = (f.coef(0), f.coef(1), f.coef(2));
    let mut out = RoterFit {
        applicable,
        phi,
        mu,
        eta,
        residual: f.residual,
        exact: f.exact,
        derived: None,
        derived_residuals: Vec::new(),
    };
    if applicable && f.exact && phi.abs() > tol.nonzero {
        let dv = RoterDerived::from_coefficients(d.n(), pkg.kappa, phi, mu, eta);
        let g = pkg.g();
        out.derived_residuals = vec![
            ("s2".into(), res(d.s2(), &(dv.alpha1 * &pkg.s + dv.alpha2 * g))),
            ("rr_pseudosymmetric".into(), res(d.rr(), d.q_g_r().scaled(dv.l_r))),
            ("rr_genpseudo".into(), res(d.rr(), lin(&[(1.0, d.q_s_r()), (dv.l, d.q_g_c())]))),
            ("cc_weyl".into(), res(d.cc(), d.q_g_c().scaled(dv.l_c))),
        ];
        out.derived = Some(dv);
    }
    out
}

/// Least-squares Roter decomposition `R = φ/2 S∧S + μ g∧S + η/2 g∧g`.
pub fn fit_roter(pkg: &CurvaturePackage, tol: &Tolerances) -> RoterFit {
    fit_roter_with(&Derived::new(pkg), tol)
}

pub(crate) fn condition_star_with(d: &Derived) -> f64 {
    let k = d.pkg.kappa / (d.nf() - 1.0);
    res(d.cr() - d.rc(), lin(&[(1.0, d.q_s_c()), (-k, d.q_g_c())]))
}

/// Residual of `C·R - R·C = Q(S,C) - κ/(n-1) Q(g,C)`.
pub fn condition_star_residual(pkg: &CurvaturePackage) -> Result<f64> {
    if pkg.n() < 4 {
        return Err(CurvError::DimensionOutOfRange(pkg.n(), 4, crate::tensor::MAX_DIM));
    }
    Ok(condition_star_with(&Derived::new(pkg)))
}

/// Single-coefficient fit summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportional {
    /// Whether the point lies in the set where the condition is meaningful.
    pub applicable: bool,
    pub coefficient: f64,
    pub residual: f64,
    pub exact: bool,
}

impl Proportional {
    fn from_fit(f: &FitResult, applicable: bool) -> Self {
        Proportional { applicable, coefficient: f.coef(0), residual: f.residual, exact: f.exact }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cond01 {
    pub l1: f64,
    pub l2: f64,
    pub residual: f64,
    pub exact: bool,
}

/// Every pseudosymmetry-type condition evaluated at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub signature: usize,
    pub kappa: f64,
    pub in_u_s: bool,
    pub in_u_c: bool,
    pub in_u_r: bool,
    /// The identity `U_S ∪ U_C = U_R` at this point.
    pub u_sets_consistent: bool,
    pub einstein: bool,
    pub einstein_residual: f64,
    pub quasi_einstein: QuasiEinstein,
    /// `R·R = L_R Q(g,R)`.
    pub pseudosymmetric: Proportional,
    /// `R·S = L_S Q(g,S)`.
    pub ricci_pseudosymmetric: Proportional,
    /// `R·C = L_1 Q(g,C)`.
    pub weyl_pseudosymmetric: Proportional,
    /// `C·C = L_C Q(g,C)`.
    pub pseudosymmetric_weyl: Proportional,
    /// `R·R - Q(S,R) = L Q(g,C)`.
    pub genpseudo: Proportional,
    pub roter: RoterFit,
    pub condition_star_residual: f64,
    /// `R·C - C·R = L_1 Q(S,C) + L_2 Q(g,C)`.
    pub cond01: Cond01,
    pub max_symmetry_defect: f64,
}

fn proportional(d: &Derived, target: &crate::tensor::Tensor, basis: &crate::tensor::Tensor, applicable: bool, tol: f64) -> Proportional {
    let f = fit_span(target, &[basis], tol).expect("same shapes");
    Proportional::from_fit(&f, applicable && d.n() > 0)
}

pub(crate) fn classify_with(d: &Derived, tol: &Tolerances) -> ClassificationReport {
    let pkg = d.pkg;
    let m = &pkg.metric;
    let nf = d.nf();
    let in_u_s = outside_multiples_of_g(&pkg.s, m, tol.nonzero);
    let in_u_c = res0(&pkg.c) > tol.nonzero;
    let proj: CurvTensor = (pkg.kappa / ((nf - 1.0) * nf)) * d.big_g();
    let in_u_r = res(&pkg.r, &proj) > tol.nonzero;
    let einstein_residual = res(&pkg.s, &((pkg.kappa / nf) * m.g()));
    let cond = fit_span(d.rc_minus_cr(), &[d.q_s_c(), d.q_g_c()], tol.exact).expect("same shapes");
    ClassificationReport {
        n: d.n(),
        signature: m.signature(),
        kappa: pkg.kappa,
        in_u_s,
        in_u_c,
        in_u_r,
        u_sets_consistent: (in_u_s || in_u_c) == in_u_r,
        einstein: !in_u_s,
        einstein_residual,
        quasi_einstein: spectral_alpha(&pkg.s, m, tol),
        pseudosymmetric: proportional(d, d.rr(), d.q_g_r(), in_u_r, tol.exact),
        ricci_pseudosymmetric: proportional(d, d.rs(), d.q_g_s(), in_u_s, tol.exact),
        weyl_pseudosymmetric: proportional(d, d.rc(), d.q_g_c(), in_u_c, tol.exact),
        pseudosymmetric_weyl: proportional(d, d.cc(), d.q_g_c(), in_u_c, tol.exact),
        genpseudo: proportional(d, &(d.rr() - d.q_s_r()), d.q_g_c(), in_u_c, tol.exact),
        roter: fit_roter_with(d, tol),
        condition_star_residual: condition_star_with(d),
        cond01: Cond01 { l1: cond.coef(0), l2: cond.coef(1), residual: cond.residual, exact: cond.exact },
        max_symmetry_defect: pkg.r.symmetry_defects().max(),
    }
}

/// Classifies a package against every condition.
pub fn classify(pkg: &CurvaturePackage, tol: &Tolerances) -> ClassificationReport {
    classify_with(&Derived::new(pkg), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::weyl_decompose;

    fn clifford(n: usize, p: usize) -> CurvaturePackage {
        let m = MetricPoint::euclidean(n);
        let mut r = CurvTensor::zeros(n);
        for (off, dim, r2) in [(0, p, p as f64 / n as f64), (p, n - p, (n - p) as f64 / n as f64)] {
            let mut dg = vec![0.0; n];
            dg[off..off + dim].iter_mut().for_each(|x| *x = 1.0);
            let gb = Sym2::diag(&dg);
            r += &((0.5 / r2) * gb.kn(&gb));
        }
        weyl_decompose(&r, &m).unwrap()
    }

    #[test]
    fn clifford_roter_coefficients() {
        let pkg = clifford(5, 2);
        let rf = fit_roter(&pkg, &Tolerances::default());
        assert!(rf.applicable && rf.exact);
        assert!((rf.phi - 6.0).abs() < 1e-10 && (rf.mu + 18.0).abs() < 1e-10 && (rf.eta - 55.0).abs() < 1e-9);
        for (name, r) in &rf.derived_residuals {
            assert!(*r < 1e-10, "{name}: {r}");
        }
        assert!(condition_star_residual(&pkg).unwrap() < 1e-12);
    }

    #[test]
    fn space_form_classification() {
        let m = MetricPoint::euclidean(5);
        let pkg = weyl_decompose(&(0.3 * m.big_g()), &m).unwrap();
        let rep = classify(&pkg, &Tolerances::default());
        assert!(rep.einstein && !rep.in_u_r && !rep.roter.applicable);
        assert_eq!(rep.quasi_einstein, QuasiEinstein::Einstein);
        assert!(rep.pseudosymmetric.exact && rep.u_sets_consistent);
    }

    #[test]
    fn clifford_classification() {
        let rep = classify(&clifford(5, 2), &Tolerances::default());
        assert!(rep.pseudosymmetric.exact && rep.pseudosymmetric.coefficient.abs() < 1e-10);
        assert!(matches!(rep.quasi_einstein, QuasiEinstein::Not { .. }));
        assert!(rep.condition_star_residual < 1e-12);
    }

    #[test]
    fn spectral_alpha_finds_rank_one_shift() {
        let m = MetricPoint::euclidean(5);
        let s = Sym2::diag(&[-1.0, -1.0, -1.0, -1.0, 0.0]);
        let q = spectral_alpha(&s, &m, &Tolerances::default());
        assert!((q.alpha().unwrap() + 1.0).abs() < 1e-12);
        let s = Sym2::diag(&[6.0, 6.0, 0.0, 0.0, 0.0]);
        assert!(!spectral_alpha(&s, &m, &Tolerances::default()).is_quasi());
    }

    #[test]
    fn spectral_alpha_handles_null_rank_one() {
        let mut g = Sym2::identity(5);
        g.set(0, 0, 0.0);
        g.set(1, 1, 0.0);
        g.set(0, 1, 1.0);
        let m = MetricPoint::new(g).unwrap();
        let mut s = (0.7) * m.g();
        s.set(1, 1, 2.0);
        let q = spectral_alpha(&s, &m, &Tolerances::default());
        assert!((q.alpha().unwrap() - 0.7).abs() < 1e-7, "{q:?}");
    }
}
