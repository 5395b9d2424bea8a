//! Coordinate charts with closed-form metrics and their Riemann tensor via
//! second-order forward differentiation.

mod taylor;

use std::collections::BTreeMap;

pub use taylor::{Scalar, TaylorScalar};

use crate::curvature::{weyl_decompose, CurvaturePackage};
use crate::error::{CurvError, Result};
use crate::tensor::{CurvTensor, MetricPoint, Sym2, Tensor, MAX_DIM};

/// Guard margin for horizons, poles and conformal-factor zeros.
const GUARD_EPS: f64 = 1e-9;

/// Names of the built-in chart families.
pub const CHART_KINDS: &[&str] =
    &["flat", "sphere", "space_form", "product_spheres", "rn_ds", "warped_1d_einstein"];

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    /// `diag(-1,..,-1,1,..,1)` everywhere.
    Flat { n: usize, signature: usize },
    /// Round sphere of the given radius in hyperspherical angles.
    Sphere { n: usize, radius: f64 },
    /// `η / (1 + c⟨x,x⟩_η / 4)²`, constant curvature `c`.
    SpaceForm { n: usize, c: f64, signature: usize },
    /// `S^p(r1) × S^q(r2)` in hyperspherical angles on each factor.
    ProductSpheres { p: usize, r1: f64, q: usize, r2: f64 },
    /// Reissner-Nordström-(anti-)de Sitter in Schwarzschild coordinates `(t, r, θ, φ)`.
    RnDs { mass: f64, charge: f64, lambda: f64 },
    /// `±dt² + F(t)² (S²(ρ) × S²(ρ))` with `F(t) = a0 + a1 t + a2 t²`.
    Warped1dEinstein { base_sign: f64, fiber_radius: f64, warp: [f64; 3] },
}

/// A coordinate chart: metric function plus domain guard.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    kind: ChartKind,
}

struct Params<'a> {
    kind: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CurvError::InvalidParams(format!(
                    "unknown parameter `{key}` for chart kind `{}`",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn f(&self, key: &str) -> Result<f64> {
        let v = self.map.get(key).copied().ok_or_else(|| {
            CurvError::InvalidParams(format!("chart kind `{}` needs parameter `{key}`", self.kind))
        })?;
        if !v.is_finite() {
            return Err(CurvError::InvalidParams(format!("parameter `{key}` must be finite")));
        }
        Ok(v)
    }

    fn f_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.map.contains_key(key) {
            self.f(key)
        } else {
            Ok(default)
        }
    }

    fn count(&self, key: &str, default: Option<usize>) -> Result<usize> {
        let v = match (self.map.get(key), default) {
            (None, Some(d)) => return Ok(d),
            _ => self.f(key)?,
        };
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CurvError::InvalidParams(format!(
                "parameter `{key}` must be a non-negative integer"
            )));
        }
        Ok(v as usize)
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.f(key)?;
        if v <= 0.0 {
            return Err(CurvError::InvalidParams(format!("parameter `{key}` must be positive")));
        }
        Ok(v)
    }
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if !(min..=MAX_DIM).contains(&n) {
        return Err(CurvError::DimensionOutOfRange(n, min, MAX_DIM));
    }
    Ok(())
}

/// Builds a chart from its kind name and numeric parameters.
pub fn build_chart(kind: &str, params: &BTreeMap<String, f64>) -> Result<Chart> {
    let p = Params { kind, map: params };
    let kind = match kind {
        "flat" => {
            p.check_known(&["n", "signature"])?;
            let n = p.count("n", None)?;
            let signature = p.count("signature", Some(0))?;
            check_dim(n, 2)?;
            if signature > n {
                return Err(CurvError::InvalidParams("signature exceeds dimension".into()));
            }
            ChartKind::Flat { n, signature }
        }
        "sphere" => {
            p.check_known(&["n", "radius"])?;
            let n = p.count("n", None)?;
            check_dim(n, 2)?;
            ChartKind::Sphere { n, radius: p.positive("radius")? }
        }
        "space_form" => {
            p.check_known(&["n", "c", "signature"])?;
            let n = p.count("n", None)?;
            let signature = p.count("signature", Some(0))?;
            check_dim(n, 2)?;
            if signature > n {
                return Err(CurvError::InvalidParams("signature exceeds dimension".into()));
            }
            ChartKind::SpaceForm { n, c: p.f("c")?, signature }
        }
        "product_spheres" => {
            p.check_known(&["p", "r1", "q", "r2"])?;
            let (pp, q) = (p.count("p", None)?, p.count("q", None)?);
            if pp == 0 || q == 0 {
                return Err(CurvError::InvalidParams("sphere factors need dimension >= 1".into()));
            }
            check_dim(pp + q, 2)?;
            ChartKind::ProductSpheres { p: pp, r1: p.positive("r1")?, q, r2: p.positive("r2")? }
        }
        "rn_ds" => {
            p.check_known(&["M", "Q", "Lambda"])?;
            let (mass, charge) = (p.f("M")?, p.f("Q")?);
            if mass == 0.0 || charge == 0.0 {
                return Err(CurvError::InvalidParams("M and Q must be non-zero".into()));
            }
            ChartKind::RnDs { mass, charge, lambda: p.f_or("Lambda", 0.0)? }
        }
        "warped_1d_einstein" => {
            p.check_known(&["base_sign", "fiber_radius", "a0", "a1", "a2"])?;
            let base_sign = p.f("base_sign")?;
            if base_sign != 1.0 && base_sign != -1.0 {
                return Err(CurvError::InvalidParams("base_sign must be +1 or -1".into()));
            }
            ChartKind::Warped1dEinstein {
                base_sign,
                fiber_radius: p.positive("fiber_radius")?,
                warp: [p.f("a0")?, p.f_or("a1", 0.0)?, p.f_or("a2", 0.0)?],
            }
        }
        other => return Err(CurvError::UnknownKind(other.to_string())),
    };
    Ok(Chart { kind })
}

/// Hyperspherical metric factors `1, sin²x0, sin²x0 sin²x1, ...` scaled by `r²`.
fn sphere_diag<T: Scalar>(x: &[T], r: f64, out: &mut Vec<T>) {
    let mut w = T::constant(r * r, &x[0]);
    for (i, xi) in x.iter().enumerate() {
        out.push(w.clone());
        if i + 1 < x.len() {
            let s = xi.sin();
            w = w * s.clone() * s;
        }
    }
}

fn sphere_guard(x: &[f64], what: &str) -> Result<()> {
    for (i, xi) in x.iter().enumerate().take(x.len().saturating_sub(1)) {
        if xi.sin().abs() <= GUARD_EPS {
            return Err(CurvError::OutsideDomain(format!("{what}: sin(x{i}) = 0 (coordinate pole)")));
        }
    }
    Ok(())
}

impl Chart {
    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        match self.kind {
            ChartKind::Flat { n, .. } | ChartKind::Sphere { n, .. } | ChartKind::SpaceForm { n, .. } => n,
            ChartKind::ProductSpheres { p, q, .. } => p + q,
            ChartKind::RnDs { .. } => 4,
            ChartKind::Warped1dEinstein { .. } => 5,
        }
    }

    /// Row-major metric components at `x`.
    pub fn metric<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.n();
        assert_eq!(x.len(), n, "coordinate count must equal chart dimension");
        let zero = T::constant(0.0, &x[0]);
        let mut diag: Vec<T> = Vec::with_capacity(n);
        match &self.kind {
            ChartKind::Flat { signature, .. } => {
                for i in 0..n {
                    diag.push(T::constant(if i < *signature { -1.0 } else { 1.0 }, &x[0]));
                }
            }
            ChartKind::Sphere { radius, .. } => sphere_diag(x, *radius, &mut diag),
            ChartKind::SpaceForm { c, signature, .. } => {
                let mut q = zero.clone();
                for (i, xi) in x.iter().enumerate() {
                    let term = xi.clone() * xi.clone();
                    q = if i < *signature { q - term } else { q + term };
                }
                let conf = q.scale(c / 4.0).add_const(1.0).powi(-2);
                for i in 0..n {
                    diag.push(if i < *signature { -conf.clone() } else { conf.clone() });
                }
            }
            ChartKind::ProductSpheres { p, r1, r2, .. } => {
                sphere_diag(&x[..*p], *r1, &mut diag);
                sphere_diag(&x[*p..], *r2, &mut diag);
            }
            ChartKind::RnDs { mass, charge, lambda } => {
                let r = &x[1];
                let h = r.powi(-1).scale(-2.0 * mass).add_const(1.0)
                    + r.powi(-2).scale(charge * charge)
                    - r.powi(2).scale(lambda / 3.0);
                let r2 = r.clone() * r.clone();
                let s = x[2].sin();
                diag.push(-h.clone());
                diag.push(h.powi(-1));
                diag.push(r2.clone());
                diag.push(r2 * s.clone() * s);
            }
            ChartKind::Warped1dEinstein { base_sign, fiber_radius, warp } => {
                let t = &x[0];
                let f = t.scale(warp[1]) + (t.clone() * t.clone()).scale(warp[2]);
                let f2 = f.add_const(warp[0]).powi(2);
                diag.push(T::constant(*base_sign, t));
                let mut fib = Vec::with_capacity(4);
                sphere_diag(&x[1..3], *fiber_radius, &mut fib);
                sphere_diag(&x[3..5], *fiber_radius, &mut fib);
                diag.extend(fib.into_iter().map(|w| w * f2.clone()));
            }
        }
        let mut g = vec![zero; n * n];
        for (i, d) in diag.into_iter().enumerate() {
            g[i * n + i] = d;
        }
        g
    }

    /// Rejects coordinate singularities, horizons and points outside the chart.
    pub fn domain_guard(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(CurvError::DimensionMismatch { expected: self.n(), found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CurvError::OutsideDomain("non-finite coordinate".into()));
        }
        match &self.kind {
            ChartKind::Flat { .. } => Ok(()),
            ChartKind::Sphere { .. } => sphere_guard(x, "sphere"),
            ChartKind::SpaceForm { c, signature, .. } => {
                let q: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if i < *signature { -v * v } else { v * v })
                    .sum();
                if (1.0 + c * q / 4.0).abs() <= GUARD_EPS {
                    return Err(CurvError::OutsideDomain("conformal factor blows up".into()));
                }
                Ok(())
            }
            ChartKind::ProductSpheres { p, .. } => {
                sphere_guard(&x[..*p], "first factor")?;
                sphere_guard(&x[*p..], "second factor")
            }
            ChartKind::RnDs { mass, charge, lambda } => {
                let (r, th) = (x[1], x[2]);
                if r <= 0.0 {
                    return Err(CurvError::OutsideDomain("r must be positive".into()));
                }
                let h = 1.0 - 2.0 * mass / r + charge * charge / (r * r) - lambda * r * r / 3.0;
                if h.abs() <= GUARD_EPS {
                    return Err(CurvError::OutsideDomain(format!("h(r) = 0 at r = {r} (horizon)")));
                }
                if th.sin().abs() <= GUARD_EPS {
                    return Err(CurvError::OutsideDomain("sin(theta) = 0 (pole)".into()));
                }
                Ok(())
            }
            ChartKind::Warped1dEinstein { warp, .. } => {
                let t = x[0];
                if (warp[0] + warp[1] * t + warp[2] * t * t).abs() <= GUARD_EPS {
                    return Err(CurvError::OutsideDomain("warping function vanishes".into()));
                }
                sphere_guard(&x[1..3], "fiber factor 1")?;
                sphere_guard(&x[3..5], "fiber factor 2")
            }
        }
    }

    /// Metric components on plain floats.
    pub fn metric_at(&self, x: &[f64]) -> Result<Sym2> {
        self.domain_guard(x)?;
        let g = self.metric(x);
        let n = self.n();
        Ok(Sym2::from_fn(n, |i, j| g[i * n + j]))
    }
}

/// Metric values, first and second partials at `x`: `(g, dg[k][ij], ddg[k][l][ij])`.
pub struct MetricJet {
    pub g: Sym2,
    pub dg: Vec<f64>,
    pub ddg: Vec<f64>,
}

/// Evaluates the metric over Taylor scalars.
pub fn metric_jet(chart: &Chart, x: &[f64]) -> Result<MetricJet> {
    chart.domain_guard(x)?;
    let n = chart.n();
    let vars: Vec<TaylorScalar> =
        x.iter().enumerate().map(|(i, &v)| TaylorScalar::variable(v, i, n)).collect();
    let gt = chart.metric(&vars);
    let nn = n * n;
    let mut dg = vec![0.0; n * nn];
    let mut ddg = vec![0.0; n * n * nn];
    for (ij, comp) in gt.iter().enumerate() {
        for k in 0..n {
            dg[k * nn + ij] = comp.grad[k];
            for l in 0..n {
                ddg[(k * n + l) * nn + ij] = comp.hess[k * n + l];
            }
        }
    }
    let g = Sym2::from_fn(n, |i, j| gt[i * n + j].value);
    Ok(MetricJet { g, dg, ddg })
}

/// Metric and Riemann tensor `R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l)` at `x`.
pub fn riemann_at(chart: &Chart, x: &[f64]) -> Result<(MetricPoint, CurvTensor)> {
    let jet = metric_jet(chart, x)?;
    let n = chart.n();
    let nn = n * n;
    let m = MetricPoint::new(jet.g)?;
    let gi = m.g_inv();
    let d = |k: usize, i: usize, j: usize| jet.dg[k * nn + i * n + j];
    let dd = |k: usize, l: usize, i: usize, j: usize| jet.ddg[(k * n + l) * nn + i * n + j];
    // Lowered Christoffel symbols Γ_{s,ij} and their partials ∂_k Γ_{s,ij}.
    let mut gam = vec![0.0; n * nn];
    let mut dgam = vec![0.0; n * n * nn];
    for s in 0..n {
        for i in 0..n {
            for j in 0..n {
                gam[(s * n + i) * n + j] = 0.5 * (d(i, j, s) + d(j, i, s) - d(s, i, j));
                for k in 0..n {
                    dgam[((k * n + s) * n + i) * n + j] =
                        0.5 * (dd(k, i, j, s) + dd(k, j, i, s) - dd(k, s, i, j));
                }
            }
        }
    }
    let g1 = |s: usize, i: usize, j: usize| gam[(s * n + i) * n + j];
    let dg1 = |k: usize, s: usize, i: usize, j: usize| dgam[((k * n + s) * n + i) * n + j];
    let mut r = Tensor::zeros(n, 4);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dg1(i, l, j, k) - dg1(j, l, i, k);
                    for mm in 0..n {
                        for p in 0..n {
                            let w = gi.get(mm, p);
                            if w != 0.0 {
                                v += w * (g1(mm, j, l) * g1(p, i, k) - g1(mm, i, l) * g1(p, j, k));
                            }
                        }
                    }
                    r.set(&[i, j, k, l], v);
                }
            }
        }
    }
    Ok((m, CurvTensor::from_tensor(r)?))
}

/// Full curvature package of the chart metric at `x`.
pub fn curvature_at(chart: &Chart, x: &[f64]) -> Result<CurvaturePackage> {
    let (m, r) = riemann_at(chart, x)?;
    weyl_decompose(&r, &m)
}
