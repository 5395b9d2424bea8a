//! Named implication audits: each checks a premise at one point and, when it
//! holds, the residuals of the identities it implies.

mod general;
mod hyper;

use std::cell::OnceCell;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::chart::ChartKind;
use crate::conditions::{classify_with, spectral_alpha, ClassificationReport, QuasiEinstein, Tolerances};
use crate::curvature::CurvaturePackage;
use crate::derived::Derived;
use crate::error::{CurvError, Result};
use crate::fit::fit_span;
use crate::hypersurface::{detect_uh, fit_cubic, CubicFit, HypersurfaceData, UhDetection};
use crate::tensor::{res, res0, Sym2, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Premise {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "failed")]
    Failed,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Premise {
    pub fn as_str(&self) -> &'static str {
        match self {
            Premise::Holds => "holds",
            Premise::Failed => "failed",
            Premise::NotApplicable => "n/a",
        }
    }
}

/// Result of one audit at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditOutcome {
    pub name: String,
    pub premise: Premise,
    pub residuals: BTreeMap<String, f64>,
    pub constants: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// False only when the premise holds and some residual exceeds the tolerance.
    pub passed: bool,
}

impl AuditOutcome {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, &v| if v.is_nan() { f64::NAN } else { m.max(v) })
    }

    /// Residuals above `tol` (NaN counts as a failure).
    pub fn failing(&self, tol: f64) -> Vec<&str> {
        self.residuals.iter().filter(|(_, &v)| !(v <= tol)).map(|(k, _)| k.as_str()).collect()
    }
}

/// Builder used by the individual audits.
pub(crate) struct Out {
    premise: Premise,
    residuals: BTreeMap<String, f64>,
    constants: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Out {
    fn new(premise: Premise) -> Self {
        Out { premise, residuals: BTreeMap::new(), constants: BTreeMap::new(), notes: Vec::new() }
    }

    pub(crate) fn na() -> Self {
        Self::new(Premise::NotApplicable)
    }

    pub(crate) fn when(cond: bool) -> Self {
        Self::new(if cond { Premise::Holds } else { Premise::Failed })
    }

    pub(crate) fn holds(&self) -> bool {
        self.premise == Premise::Holds
    }

    pub(crate) fn r(&mut self, name: &str, v: f64) -> &mut Self {
        self.residuals.insert(name.to_string(), v);
        self
    }

    pub(crate) fn k(&mut self, name: &str, v: f64) -> &mut Self {
        self.constants.insert(name.to_string(), v);
        self
    }

    pub(crate) fn note(&mut self, s: &str) -> &mut Self {
        self.notes.push(s.to_string());
        self
    }

    fn finish(self, name: &str, tol: f64) -> AuditOutcome {
        let passed = self.premise != Premise::Holds || self.residuals.values().all(|&v| v <= tol);
        AuditOutcome {
            name: name.to_string(),
            premise: self.premise,
            residuals: self.residuals,
            constants: self.constants,
            notes: self.notes,
            passed,
        }
    }
}

/// `0` when two boolean verdicts agree, `1` otherwise.
pub(crate) fn mismatch(a: bool, b: bool) -> f64 {
    if a == b {
        0.0
    } else {
        1.0
    }
}

/// Where a package came from; some audits only apply to specific sources.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// Chart family and the coordinates of the sample point.
    Chart(ChartKind, Vec<f64>),
    Hypersurface,
    Algebraic,
}

/// Hypersurface quantities shared by the hypersurface audits.
pub struct HypFacts {
    pub data: HypersurfaceData,
    pub uh: UhDetection,
    pub cubic: CubicFit,
    /// Residual of `H³ = tr(H) H² + ψH` (no `g` term).
    pub ds4aa_residual: f64,
    pub rank_h: usize,
    pub tr_h: f64,
    pub c: f64,
    pub eps: f64,
    pub kt: f64,
}

impl HypFacts {
    fn new(data: HypersurfaceData, tol: &Tolerances) -> Self {
        let uh = detect_uh(&data, tol.nonzero);
        let cubic = fit_cubic(&data, tol);
        let target = &data.h3() - &(data.tr_h() * &data.h2());
        let ds4aa = fit_span(target.tensor(), &[data.h.tensor()], tol.exact).expect("same shapes");
        HypFacts {
            uh,
            cubic,
            ds4aa_residual: ds4aa.residual,
            rank_h: data.rank_h(tol.rank_rel),
            tr_h: data.tr_h(),
            c: data.c(),
            eps: data.epsilon,
            kt: data.kappa_tilde,
            data,
        }
    }

    pub fn psi(&self) -> f64 {
        self.cubic.psi
    }

    pub fn rho(&self) -> f64 {
        self.cubic.rho
    }
}

/// Everything an audit may look at for one point.
pub struct AuditContext<'a> {
    pub d: Derived<'a>,
    pub tol: Tolerances,
    pub provenance: Provenance,
    hyp: Option<HypFacts>,
    report: OnceCell<ClassificationReport>,
}

impl<'a> AuditContext<'a> {
    pub fn new(pkg: &'a CurvaturePackage, provenance: Provenance, tol: Tolerances) -> Self {
        AuditContext { d: Derived::new(pkg), tol, provenance, hyp: None, report: OnceCell::new() }
    }

    /// Context for a Gauss-equation package built from `data`.
    pub fn for_hypersurface(pkg: &'a CurvaturePackage, data: HypersurfaceData, tol: Tolerances) -> Self {
        let mut cx = Self::new(pkg, Provenance::Hypersurface, tol);
        cx.hyp = Some(HypFacts::new(data, &tol));
        cx
    }

    pub fn pkg(&self) -> &'a CurvaturePackage {
        self.d.pkg
    }

    pub fn hyp(&self) -> Option<&HypFacts> {
        self.hyp.as_ref()
    }

    pub fn report(&self) -> &ClassificationReport {
        self.report.get_or_init(|| classify_with(&self.d, &self.tol))
    }

    pub(crate) fn n(&self) -> usize {
        self.d.n()
    }

    pub(crate) fn nf(&self) -> f64 {
        self.d.nf()
    }

    pub(crate) fn kappa(&self) -> f64 {
        self.d.pkg.kappa
    }

    /// Conclusion check `res(l, r) ≤ exact`.
    pub(crate) fn close(&self, l: impl AsRef<Tensor>, r: impl AsRef<Tensor>) -> bool {
        res(l, r) <= self.tol.exact
    }

    pub(crate) fn quasi_alpha(&self) -> Option<f64> {
        self.report().quasi_einstein.alpha()
    }

    /// `rank(A - αg) > 1` for every α, at the spectral level.
    pub(crate) fn never_rank_one(&self, a: &Sym2) -> bool {
        matches!(spectral_alpha(a, &self.d.pkg.metric, &self.tol), QuasiEinstein::Not { .. })
    }
}

/// Which packages an audit can apply to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Any,
    Hypersurface,
    Chart,
}

pub struct AuditSpec {
    pub name: &'static str,
    pub scope: Scope,
    pub summary: &'static str,
    run: fn(&AuditContext) -> Out,
}

impl AuditSpec {
    pub fn run(&self, cx: &AuditContext) -> AuditOutcome {
        (self.run)(cx).finish(self.name, cx.tol.exact)
    }
}

macro_rules! registry {
    ($( $name:ident, $scope:ident, $summary:expr; )*) => {
        static REGISTRY: &[AuditSpec] = &[
            $( AuditSpec { name: stringify!($name), scope: Scope::$scope, summary: $summary, run: $name }, )*
        ];
    };
}

use general::*;
use hyper::*;

registry! {
    lemma21_cyclic, Any, "cyclic sum of Tachibana tensors vanishes";
    lemma21_kernel, Any, "Q(g,T) = 0 iff T is a multiple of G";
    prop22, Any, "R·C + C·R = R·R + C·C - Q(g, -κ/(n-1) g∧S + g∧S²)/(n-2)²";
    eqn21_identities, Any, "Weyl decomposition, Q(A,G) = -Q(g,g∧A), Q(g,G) = 0, Q(S,C) expansion";
    thm23_i, Any, "Einstein implies condition (*)";
    thm23_ii, Any, "Einstein pseudosymmetric: R·R, C·C, R·C + C·R formulas";
    thm24, Any, "Roter type: derived scalars and curvature conditions";
    thm24_ii, Any, "Roter type implies (*) and the R·C + C·R formula";
    remark25_ii, Any, "quasi-Einstein: Q(S,R) in terms of Q(S,C) and Q(g,g∧S)";
    weyl_pseudo_bis, Any, "pseudosymmetry implies R·S = L_R Q(g,S) and R·C = L_R Q(g,C)";
    remark25_warped, Chart, "warped product with Einstein fibre: quasi-Einstein, Ricci-pseudosymmetric";
    remark25_v, Chart, "Reissner-Nordström(-(A)dS) is Roter type";
    example36, Any, "Clifford torus: semisymmetric Roter type with condition (*)";
    gauss_contraction, Hypersurface, "contracted Gauss equation for S and κ";
    eq900ab, Hypersurface, "R·R = Q(S,R) - (n-2)c Q(g,C) and its Q(S,G) form";
    remark37_i, Hypersurface, "Einstein hypersurface: H² in terms of H and g";
    remark37_ii, Hypersurface, "C = 0 iff rank(H - α₁g) ≤ 1";
    thm31, Hypersurface, "H² = αH + βg implies R·R = (c - εβ) Q(g,R)";
    thm32_i, Hypersurface, "pseudosymmetric: Q(S - (L_R + (n-2)c)g, R - cG) = 0";
    thm32_ii, Hypersurface, "pseudosymmetric iff H² = αH + βg or rank H = 2";
    thm32_iii, Hypersurface, "rank H = 2 implies R·R = c Q(g,R)";
    thm32_iv, Hypersurface, "rank H = 2 on U_H: Q(S - (n-1)c g, R - cG) = 0";
    thm32_v, Hypersurface, "rank H = 2 on U_H: R - cG = φ/2 S̄∧S̄";
    thm33, Hypersurface, "H² = αH + βg: Roter coefficients from α, β";
    thm34, Hypersurface, "H² = αH + βg implies condition (*)";
    thm35, Hypersurface, "at most two principal curvatures implies condition (*)";
    prop41, Hypersurface, "cubic relation: R·C, C·R, R·C - C·R, C·C, R·S formulas";
    prop42, Hypersurface, "cubic relation: S² relation and Ricci-power formulas";
    prop42_ii, Hypersurface, "S² = β₁S + β₂g forces ρ = 0, β₁ = -α₃, β₂ = -λ/n";
    prop43_i, Hypersurface, "n = 4: the cubic has ρ = 0";
    prop43_ii, Hypersurface, "rank H = 2: ψ formulas";
    prop43_iii, Hypersurface, "rank H = 2, rank S̄ > 1: Roter coefficients and curvature conditions";
    prop43_iv, Hypersurface, "on U_H: R·R = c Q(g,R) iff R·C = c Q(g,C)";
    prop43_v, Hypersurface, "ρ = 0 implies R·S = c Q(g,S)";
    prop47_i, Hypersurface, "R·C + C·R identity on hypersurfaces";
    prop47_ii, Hypersurface, "cubic relation: C·C and (n-2)C·R + R·C formulas";
    thm44_45, Hypersurface, "Q(S,R) = Q(g,T): five B-tensor forms modulo G";
    thm48, Hypersurface, "quasi-Einstein with ρ = 0: α formula, A tensor, (*) criterion";
    remark25_iii_b, Hypersurface, "principal curvatures λ, -λ, 0: displayed relations";
    example49_iii, Hypersurface, "non-quasi-Einstein instance with ρ ≠ 0: displayed relations";
    thm51, Hypersurface, "quasi-Einstein with (cond01): ρ = 0 and (n-2)(R·C - C·R) formula";
    thm52_53, Hypersurface, "non-quasi-Einstein with (cond01): (*), Q(S,R) form, B-tensor forms";
}

/// All audits in registry order.
pub fn registry() -> &'static [AuditSpec] {
    REGISTRY
}

pub fn audit_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|a| a.name).collect()
}

pub fn find_audit(name: &str) -> Result<&'static AuditSpec> {
    REGISTRY.iter().find(|a| a.name == name).ok_or_else(|| CurvError::UnknownKind(format!("audit {name}")))
}

/// Runs the named audits, or all of them when `names` is `None`.
pub fn run_audits(cx: &AuditContext, names: Option<&[String]>) -> Result<Vec<AuditOutcome>> {
    match names {
        None => Ok(REGISTRY.iter().map(|a| a.run(cx)).collect()),
        Some(list) => list.iter().map(|n| find_audit(n).map(|a| a.run(cx))).collect(),
    }
}

/// Conditions a configuration may assert at a point.
pub const CLAIMS: &[&str] = &[
    "condition_star",
    "einstein",
    "conformally_flat",
    "semisymmetric",
    "pseudosymmetric",
    "ricci_pseudosymmetric",
    "weyl_pseudosymmetric",
    "pseudosymmetric_weyl",
    "genpseudo",
    "roter",
    "cond01",
    "quasi_einstein",
];

/// An asserted condition, audited with a premise that always holds.
pub fn run_claim(cx: &AuditContext, claim: &str) -> Result<AuditOutcome> {
    let rep = cx.report();
    let r = match claim {
        "condition_star" => rep.condition_star_residual,
        "einstein" => rep.einstein_residual,
        "conformally_flat" => res0(&cx.pkg().c),
        "semisymmetric" => res0(cx.d.rr()),
        "pseudosymmetric" => rep.pseudosymmetric.residual,
        "ricci_pseudosymmetric" => rep.ricci_pseudosymmetric.residual,
        "weyl_pseudosymmetric" => rep.weyl_pseudosymmetric.residual,
        "pseudosymmetric_weyl" => rep.pseudosymmetric_weyl.residual,
        "genpseudo" => rep.genpseudo.residual,
        "roter" => rep.roter.residual,
        "cond01" => rep.cond01.residual,
        "quasi_einstein" => mismatch(rep.quasi_einstein.is_quasi(), true),
        other => return Err(CurvError::UnknownKind(format!("claim {other}"))),
    };
    let mut o = Out::new(Premise::Holds);
    o.r(claim, r).note("premise asserted by configuration");
    Ok(o.finish(&format!("claim:{claim}"), cx.tol.exact))
}

#[cfg(test)]
mod tests;
