//! Pointwise semi-Riemannian curvature laboratory.

pub mod audit;
pub mod chart;
pub mod conditions;
pub mod curvature;
pub mod derived;
pub mod error;
pub mod fit;
pub mod hypersurface;
pub mod tensor;

pub use chart::{build_chart, curvature_at, Chart, ChartKind, CHART_KINDS};

pub use curvature::{
    curvature_action, cyclic_sum_residual, prop22_residual, qg_kernel_test,
    random_algebraic_curvature, random_metric, random_sym2, ricci, seeded_algebraic_package, tachibana, weyl_decompose, Ambient, CurvaturePackage,
};
pub use error::{CurvError, Result};
pub use tensor::{
    kn_product, metric_power, metric_trace, numeric_rank, res, res0, CurvTensor, MetricPoint,
    Sym2, Tensor,
};
pub use audit::{
    audit_names, find_audit, registry, run_audits, run_claim, AuditContext, AuditOutcome, AuditSpec,
    Premise, Provenance, Scope, CLAIMS,
};
pub use conditions::{
    classify, condition_star_residual, fit_roter, spectral_alpha, ClassificationReport, QuasiEinstein,
    RoterDerived, RoterFit, Tolerances,
};
pub use fit::{fit_span, FitResult};
pub use hypersurface::{detect_uh, fit_cubic, gauss_package, CubicFit, HypersurfaceData, UhDetection};
