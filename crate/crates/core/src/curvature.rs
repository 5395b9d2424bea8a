//! Ricci and Weyl extraction, the derivation action `B·T`, the Tachibana
//! tensor `Q(A,T)`, and the universal algebraic identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CurvError, Result};
use crate::tensor::{metric_power, metric_trace, res, CurvTensor, MetricPoint, Sym2, Tensor};

/// Normal sign and ambient scalar curvature of a hypersurface or space form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ambient {
    pub epsilon: f64,
    pub kappa_tilde: f64,
}

impl Ambient {
    /// Ambient sectional curvature `c = κ̃ / (n(n+1))`.
    pub fn c(&self, n: usize) -> f64 {
        self.kappa_tilde / (n * (n + 1)) as f64
    }
}

/// Curvature data at one point.
#[derive(Clone, Debug)]
pub struct CurvaturePackage {
    pub metric: MetricPoint,
    pub r: CurvTensor,
    pub s: Sym2,
    pub kappa: f64,
    pub c: CurvTensor,
    pub ambient: Option<Ambient>,
}

impl CurvaturePackage {
    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn g(&self) -> &Sym2 {
        self.metric.g()
    }

    pub fn with_ambient(mut self, ambient: Ambient) -> Self {
        self.ambient = Some(ambient);
        self
    }
}

/// Ricci tensor `S_ij = g^{ha} T_{aijh}`.
pub fn ricci(t: &CurvTensor, m: &MetricPoint) -> Sym2 {
    let n = m.n();
    let gi = m.g_inv();
    Sym2::from_fn(n, |i, j| {
        let mut s = 0.0;
        for h in 0..n {
            for a in 0..n {
                let w = gi.get(h, a);
                if w != 0.0 {
                    s += w * t.get(a, i, j, h);
                }
            }
        }
        s
    })
}

/// Scalar curvature `κ(T)` of a generalized curvature tensor.
pub fn scalar_curvature(t: &CurvTensor, m: &MetricPoint) -> f64 {
    metric_trace(&ricci(t, m), m)
}

/// `C = R - g∧S/(n-2) + κ G/((n-2)(n-1))` together with `S` and `κ`.
pub fn weyl_decompose(r: &CurvTensor, m: &MetricPoint) -> Result<CurvaturePackage> {
    let n = m.n();
    if n < 3 {
        return Err(CurvError::DimensionOutOfRange(n, 3, crate::tensor::MAX_DIM));
    }
    if r.n() != n {
        return Err(CurvError::DimensionMismatch { expected: n, found: r.n() });
    }
    let s = ricci(r, m);
    let kappa = metric_trace(&s, m);
    let nf = n as f64;
    let c = r - &((1.0 / (nf - 2.0)) * m.g().kn(&s))
        + (kappa / ((nf - 2.0) * (nf - 1.0))) * m.big_g();
    Ok(CurvaturePackage { metric: m.clone(), r: r.clone(), s, kappa, c, ambient: None })
}

fn action_with_endomorphism(e: &[f64], t: &Tensor) -> Tensor {
    let n = t.n();
    let k = t.rank();
    let nn = n * n;
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
    let td = t.data();
    let mut out = Tensor::zeros(n, k + 2);
    let od = out.data_mut();
    let mut idx = vec![0usize; k];
    let mut acc = vec![0.0; nn];
    for flat in 0..td.len() {
        acc.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..k {
            let is = idx[s];
            let st = strides[s];
            let tbase = flat - is * st;
            for pq in 0..nn {
                let eoff = (pq * n + is) * n;
                let mut sum = 0.0;
                for mm in 0..n {
                    sum += e[eoff + mm] * td[tbase + mm * st];
                }
                acc[pq] += sum;
            }
        }
        let ob = flat * nn;
        for pq in 0..nn {
            od[ob + pq] = -acc[pq];
        }
        for s in (0..k).rev() {
            idx[s] += 1;
            if idx[s] < n {
                break;
            }
            idx[s] = 0;
        }
    }
    out
}

/// `(B·T)(X_1..X_k, X, Y) = -Σ_i T(.., 𝓑(X,Y)X_i, ..)` with the fourth slot of `B` raised.
pub fn curvature_action(b: &CurvTensor, t: &Tensor, m: &MetricPoint) -> Result<Tensor> {
    let n = m.n();
    for found in [b.n(), t.n()] {
        if found != n {
            return Err(CurvError::DimensionMismatch { expected: n, found });
        }
    }
    let bd = b.tensor().data();
    let gi = m.g_inv();
    let mut e = vec![0.0; n.pow(4)];
    for pqi in 0..n * n * n {
        for mm in 0..n {
            let mut s = 0.0;
            for bb in 0..n {
                s += bd[pqi * n + bb] * gi.get(bb, mm);
            }
            e[pqi * n + mm] = s;
        }
    }
    Ok(action_with_endomorphism(&e, t))
}

/// Tachibana tensor `Q(A,T)(X_1..X_k, X, Y) = -Σ_i T(.., (X ∧_A Y)X_i, ..)`.
pub fn tachibana(a: &Sym2, t: &Tensor) -> Result<Tensor> {
    let n = a.n();
    if t.n() != n {
        return Err(CurvError::DimensionMismatch { expected: n, found: t.n() });
    }
    let k = t.rank();
    let nn = n * n;
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
    let td = t.data();
    let mut out = Tensor::zeros(n, k + 2);
    let od = out.data_mut();
    let mut idx = vec![0usize; k];
    for flat in 0..td.len() {
        let ob = flat * nn;
        for s in 0..k {
            let is = idx[s];
            let st = strides[s];
            let tbase = flat - is * st;
            for p in 0..n {
                let a_p = a.get(p, is);
                let t_p = td[tbase + p * st];
                for q in 0..n {
                    od[ob + p * n + q] -= a.get(q, is) * t_p - a_p * td[tbase + q * st];
                }
            }
        }
        for s in (0..k).rev() {
            idx[s] += 1;
            if idx[s] < n {
                break;
            }
            idx[s] = 0;
        }
    }
    Ok(out)
}

/// Relative norm of the sum over cyclic permutations of the slot pairs (12), (34), (56).
pub fn cyclic_sum_residual(q6: &Tensor) -> Result<f64> {
    if q6.rank() != 6 {
        return Err(CurvError::RankMismatch { expected: 6, found: q6.rank() });
    }
    let mut sum = q6.clone();
    sum.axpy(1.0, &q6.permuted(&[2, 3, 4, 5, 0, 1]));
    sum.axpy(1.0, &q6.permuted(&[4, 5, 0, 1, 2, 3]));
    Ok(sum.norm() / q6.norm().max(1.0))
}

/// Outcome of the two equivalent tests for `Q(g,T) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelTest {
    pub vanishes: bool,
    pub qg_residual: f64,
    pub projection_residual: f64,
    pub agree: bool,
}

/// Tests `Q(g,T) = 0` and cross-checks it against `T = κ(T)/((n-1)n) G`.
pub fn qg_kernel_test(t: &CurvTensor, m: &MetricPoint, tol: f64) -> Result<KernelTest> {
    let q = tachibana(m.g(), t.tensor())?;
    let qg_residual = crate::tensor::res0(&q);
    let nf = m.n() as f64;
    let proj = (scalar_curvature(t, m) / ((nf - 1.0) * nf)) * m.big_g();
    let projection_residual = res(t, &proj);
    let a = qg_residual <= tol;
    let b = projection_residual <= tol;
    Ok(KernelTest { vanishes: a, qg_residual, projection_residual, agree: a == b })
}

/// Residual of `R·C + C·R = R·R + C·C - Q(g, -κ/(n-1) g∧S + g∧S²)/(n-2)²`.
pub fn prop22_residual(pkg: &CurvaturePackage) -> Result<f64> {
    let n = pkg.n();
    if n < 4 {
        return Err(CurvError::DimensionOutOfRange(n, 4, crate::tensor::MAX_DIM));
    }
    let m = &pkg.metric;
    let (r, c) = (pkg.r.tensor(), pkg.c.tensor());
    let rc = curvature_action(&pkg.r, c, m)?;
    let cr = curvature_action(&pkg.c, r, m)?;
    let rr = curvature_action(&pkg.r, r, m)?;
    let cc = curvature_action(&pkg.c, c, m)?;
    let nf = n as f64;
    let s2 = metric_power(&pkg.s, m, 2)?;
    let bracket = (-pkg.kappa / (nf - 1.0)) * m.g().kn(&pkg.s) + m.g().kn(&s2);
    let q = tachibana(m.g(), bracket.tensor())?;
    let rhs = rr + cc - (1.0 / ((nf - 2.0) * (nf - 2.0))) * q;
    Ok(res(rc + cr, rhs))
}

/// Random metric of signature `s` and random curvature tensor, both determined by `seed`.
pub fn seeded_algebraic_package(seed: u64, n: usize, s: usize, terms: usize) -> Result<CurvaturePackage> {
    if !(2..=crate::tensor::MAX_DIM).contains(&n) || s > n {
        return Err(CurvError::InvalidParams(format!("need 2 <= n <= {} and s <= n", crate::tensor::MAX_DIM)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let m = random_metric(&mut rng, n, s)?;
    let r = random_algebraic_curvature(seed, &m, terms)?;
    weyl_decompose(&r, &m)
}

/// Random symmetric matrix with entries uniform in `[-1, 1]`.
pub fn random_sym2(rng: &mut impl Rng, n: usize) -> Sym2 {
    Sym2::from_fn(n, |_, _| rng.random_range(-1.0..=1.0))
}

/// Well-conditioned random metric of signature `s`: `Pᵀ diag(-1..,1..) P` with `P` near identity.
pub fn random_metric(rng: &mut impl Rng, n: usize, s: usize) -> Result<MetricPoint> {
    let d: Vec<f64> = (0..n).map(|i| if i < s { -1.0 } else { 1.0 }).collect();
    let p = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let noise: f64 = rng.random_range(-0.2..=0.2);
        if i == j { 1.0 + noise } else { noise }
    });
    let g = p.transpose() * nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * p;
    MetricPoint::new(Sym2::symmetrize(&g))
}

/// `Σ_i A_i ∧ B_i` for random symmetric `A_i`, `B_i` with entries in `[-1, 1]`.
pub fn random_algebraic_curvature(seed: u64, m: &MetricPoint, terms: usize) -> Result<CurvTensor> {
    if terms == 0 {
        return Err(CurvError::InvalidParams("terms must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.n();
    let mut t = CurvTensor::zeros(n);
    for _ in 0..terms {
        let a = random_sym2(&mut rng, n);
        let b = random_sym2(&mut rng, n);
        t += &a.kn(&b);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::res0;

    fn sphere_blocks(n: usize, blocks: &[(usize, usize, f64)]) -> CurvTensor {
        let mut r = CurvTensor::zeros(n);
        for &(off, dim, radius) in blocks {
            let mut d = vec![0.0; n];
            d[off..off + dim].iter_mut().for_each(|x| *x = 1.0);
            let gb = Sym2::diag(&d);
            r += &((0.5 / (radius * radius)) * gb.kn(&gb));
        }
        r
    }

    #[test]
    fn unit_sphere_sign_convention() {
        for n in 3..7 {
            let m = MetricPoint::euclidean(n);
            let pkg = weyl_decompose(&m.big_g(), &m).unwrap();
            assert!((pkg.kappa - (n * (n - 1)) as f64).abs() < 1e-12);
            assert!(res0(&pkg.c) < 1e-14);
            assert!(res(&pkg.s, &((n - 1) as f64 * m.g())) < 1e-14);
        }
    }

    #[test]
    fn space_form_has_zero_weyl() {
        let m = MetricPoint::pseudo_euclidean(5, 1).unwrap();
        let pkg = weyl_decompose(&(-0.7 * m.big_g()), &m).unwrap();
        assert!(res0(&pkg.c) < 1e-14);
        assert!((pkg.kappa + 0.7 * 20.0).abs() < 1e-12);
    }

    #[test]
    fn product_of_unit_two_spheres_is_einstein_not_conformally_flat() {
        let m = MetricPoint::euclidean(4);
        let pkg = weyl_decompose(&sphere_blocks(4, &[(0, 2, 1.0), (2, 2, 1.0)]), &m).unwrap();
        assert!(res(&pkg.s, m.g()) < 1e-14);
        assert!(pkg.c.tensor().norm() > 0.5);
    }

    #[test]
    fn weyl_is_trace_free() {
        let m = MetricPoint::pseudo_euclidean(6, 1).unwrap();
        let r = random_algebraic_curvature(7, &m, 3).unwrap();
        let pkg = weyl_decompose(&r, &m).unwrap();
        assert!(ricci(&pkg.c, &m).tensor().norm() < 1e-12);
    }

    #[test]
    fn weyl_rejects_small_dimension() {
        let m = MetricPoint::euclidean(2);
        assert!(weyl_decompose(&m.big_g(), &m).is_err());
    }

    #[test]
    fn multiple_of_big_g_acts_as_tachibana() {
        let m = MetricPoint::pseudo_euclidean(4, 1).unwrap();
        let t = random_algebraic_curvature(3, &m, 2).unwrap();
        let lhs = curvature_action(&(2.5 * m.big_g()), t.tensor(), &m).unwrap();
        let rhs = tachibana(m.g(), t.tensor()).unwrap().scaled(2.5);
        assert!(res(&lhs, &rhs) < 1e-14);
        let gg = curvature_action(&m.big_g(), m.big_g().tensor(), &m).unwrap();
        assert!(gg.norm() < 1e-14);
    }

    #[test]
    fn clifford_curvature_is_semisymmetric() {
        let m = MetricPoint::euclidean(5);
        let r = sphere_blocks(5, &[(0, 2, (0.4f64).sqrt()), (2, 3, (0.6f64).sqrt())]);
        let pkg = weyl_decompose(&r, &m).unwrap();
        assert!(curvature_action(&r, r.tensor(), &m).unwrap().norm() < 1e-12);
        assert!(curvature_action(&r, pkg.c.tensor(), &m).unwrap().norm() < 1e-12);
        let kt = qg_kernel_test(&pkg.c, &m, 1e-10).unwrap();
        assert!(!kt.vanishes && kt.agree);
    }

    #[test]
    fn tachibana_identities() {
        let m = MetricPoint::pseudo_euclidean(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_sym2(&mut rng, 5);
        assert!(tachibana(m.g(), m.big_g().tensor()).unwrap().norm() < 1e-14);
        let lhs = tachibana(&a, m.big_g().tensor()).unwrap();
        let rhs = tachibana(m.g(), m.g().kn(&a).tensor()).unwrap().scaled(-1.0);
        assert!(res(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn kernel_test_examples() {
        let m = MetricPoint::euclidean(4);
        let kt = qg_kernel_test(&(7.0 * m.big_g()), &m, 1e-10).unwrap();
        assert!(kt.vanishes && kt.agree);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = random_sym2(&mut rng, 4).kn(&random_sym2(&mut rng, 4));
        let kt = qg_kernel_test(&t, &m, 1e-10).unwrap();
        assert!(!kt.vanishes && kt.agree);
    }

    #[test]
    fn cyclic_sum_requires_rank_six() {
        assert!(cyclic_sum_residual(&Tensor::zeros(3, 4)).is_err());
    }

    #[test]
    fn random_curvature_is_reproducible_and_valid() {
        let m = MetricPoint::euclidean(5);
        let a = random_algebraic_curvature(42, &m, 3).unwrap();
        let b = random_algebraic_curvature(42, &m, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.symmetry_defects().within(1e-14));
        assert!(random_algebraic_curvature(1, &m, 0).is_err());
    }

    #[test]
    fn prop22_on_space_form_and_dimension_guard() {
        let m = MetricPoint::euclidean(5);
        let pkg = weyl_decompose(&(3.0 * m.big_g()), &m).unwrap();
        assert!(prop22_residual(&pkg).unwrap() < 1e-14);
        let m3 = MetricPoint::euclidean(3);
        let pkg3 = weyl_decompose(&m3.big_g(), &m3).unwrap();
        assert!(prop22_residual(&pkg3).is_err());
    }
}
