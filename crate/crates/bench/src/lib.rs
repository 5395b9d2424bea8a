//! Fixed inputs shared by the kernel benchmarks.

use std::collections::BTreeMap;

use curvlab_core::{
    build_chart, gauss_package, seeded_algebraic_package, Chart, CurvaturePackage, HypersurfaceData, MetricPoint, Sym2,
};

pub fn algebraic(n: usize) -> CurvaturePackage {
    seeded_algebraic_package(17, n, 1, 3).expect("valid dimensions")
}

pub fn three_curvature() -> (CurvaturePackage, HypersurfaceData) {
    let data = HypersurfaceData::new(MetricPoint::euclidean(5), Sym2::diag(&[1.0, 1.0, -1.0, -1.0, 0.0]), 1.0, 0.0)
        .expect("valid hypersurface");
    (gauss_package(&data).expect("n >= 3"), data)
}

pub fn rn_chart() -> Chart {
    let params: BTreeMap<String, f64> =
        [("M", 1.0), ("Q", 0.5), ("Lambda", 0.01)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_chart("rn_ds", &params).expect("valid parameters")
}
