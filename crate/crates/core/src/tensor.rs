//! Dense covariant tensors at a point, symmetric 2-tensors, generalized
//! curvature tensors, the metric arena, and the Kulkarni-Nomizu product.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Complex, DMatrix, Schur};
use serde::Serialize;

use crate::error::{CurvError, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

/// Dense covariant tensor of valence (0, rank) with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Tensor { n, rank, data: vec![0.0; n.pow(rank as u32)] }
    }

    pub fn from_vec(n: usize, rank: usize, data: Vec<f64>) -> Result<Self> {
        let expected = n.pow(rank as u32);
        if data.len() != expected {
            return Err(CurvError::BadLength { expected, found: data.len() });
        }
        Ok(Tensor { n, rank, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Plain Frobenius norm of the components.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Tensor) -> f64 {
        self.assert_same_shape(other);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor { n: self.n, rank: self.rank, data: self.data.iter().map(|x| c * x).collect() }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Tensor) {
        self.assert_same_shape(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Returns `out` with `out[i_0..i_{k-1}] = self[i_{perm[0]}..i_{perm[k-1]}]`.
    pub fn permuted(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank, "permutation length must equal rank");
        let k = self.rank;
        let n = self.n;
        let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
        let mut out = Tensor::zeros(n, k);
        let mut idx = vec![0usize; k];
        for o in 0..self.data.len() {
            let src: usize = perm.iter().zip(&strides).map(|(&p, &st)| idx[p] * st).sum();
            out.data[o] = self.data[src];
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

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.n == other.n && self.rank == other.rank
    }

    fn assert_same_shape(&self, other: &Tensor) {
        assert!(
            self.same_shape(other),
            "tensor shape mismatch: (n={}, rank={}) vs (n={}, rank={})",
            self.n,
            self.rank,
            other.n,
            other.rank
        );
    }

    pub fn check_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.n != other.n {
            return Err(CurvError::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.rank != other.rank {
            return Err(CurvError::RankMismatch { expected: self.rank, found: other.rank });
        }
        Ok(())
    }
}

impl AsRef<Tensor> for Tensor {
    fn as_ref(&self) -> &Tensor {
        self
    }
}

/// Relative residual `|L - R| / max(1, |L| + |R|)`.
pub fn res(l: impl AsRef<Tensor>, r: impl AsRef<Tensor>) -> f64 {
    let (l, r) = (l.as_ref(), r.as_ref());
    l.assert_same_shape(r);
    let d: f64 = l.data.iter().zip(&r.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    d / (l.norm() + r.norm()).max(1.0)
}

/// Residual of `t` against zero, `|t| / max(1, |t|)`.
pub fn res0(t: impl AsRef<Tensor>) -> f64 {
    let nt = t.as_ref().norm();
    nt / nt.max(1.0)
}

macro_rules! linear_ops {
    ($ty:ident, $wrap:expr) => {
        impl Add for &$ty {
            type Output = $ty;
            fn add(self, o: &$ty) -> $ty {
                let mut t = self.as_ref().clone();
                t.axpy(1.0, o.as_ref());
                $wrap(t)
            }
        }
        impl Add for $ty {
            type Output = $ty;
            fn add(self, o: $ty) -> $ty {
                &self + &o
            }
        }
        impl Add<&$ty> for $ty {
            type Output = $ty;
            fn add(self, o: &$ty) -> $ty {
                &self + o
            }
        }
        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, o: &$ty) -> $ty {
                let mut t = self.as_ref().clone();
                t.axpy(-1.0, o.as_ref());
                $wrap(t)
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, o: $ty) -> $ty {
                &self - &o
            }
        }
        impl Sub<&$ty> for $ty {
            type Output = $ty;
            fn sub(self, o: &$ty) -> $ty {
                &self - o
            }
        }
        impl Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $wrap(self.as_ref().scaled(-1.0))
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                -&self
            }
        }
        impl Mul<&$ty> for f64 {
            type Output = $ty;
            fn mul(self, o: &$ty) -> $ty {
                $wrap(o.as_ref().scaled(self))
            }
        }
        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, o: $ty) -> $ty {
                self * &o
            }
        }
        impl AddAssign<&$ty> for $ty {
            fn add_assign(&mut self, o: &$ty) {
                self.as_mut().axpy(1.0, o.as_ref());
            }
        }
        impl SubAssign<&$ty> for $ty {
            fn sub_assign(&mut self, o: &$ty) {
                self.as_mut().axpy(-1.0, o.as_ref());
            }
        }
    };
}

impl AsMut<Tensor> for Tensor {
    fn as_mut(&mut self) -> &mut Tensor {
        self
    }
}

linear_ops!(Tensor, |t: Tensor| t);

/// Symmetric covariant 2-tensor. Writes mirror across the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Sym2(Tensor);

impl AsRef<Tensor> for Sym2 {
    fn as_ref(&self) -> &Tensor {
        &self.0
    }
}

impl AsMut<Tensor> for Sym2 {
    fn as_mut(&mut self) -> &mut Tensor {
        &mut self.0
    }
}

linear_ops!(Sym2, Sym2);

impl Sym2 {
    pub fn zeros(n: usize) -> Self {
        Sym2(Tensor::zeros(n, 2))
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut s = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    /// Builds from rows; the input must be symmetric to `1e-12` relative.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut scale: f64 = 0.0;
        for r in rows {
            if r.len() != n {
                return Err(CurvError::DimensionMismatch { expected: n, found: r.len() });
            }
            for v in r {
                scale = scale.max(v.abs());
            }
        }
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((rows[i][j] - rows[j][i]).abs());
            }
        }
        if defect > 1e-12 * scale.max(1.0) {
            return Err(CurvError::NotSymmetric(defect));
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Symmetric part of an arbitrary square matrix.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.data[i * self.0.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.0.n;
        self.0.data[i * n + j] = v;
        self.0.data[j * n + i] = v;
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n(), self.n(), &self.0.data)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.data.chunks(self.n()).map(|r| r.to_vec()).collect()
    }

    /// `self ∧ other`, always a generalized curvature tensor.
    pub fn kn(&self, other: &Sym2) -> CurvTensor {
        assert_eq!(self.n(), other.n(), "dimension mismatch in Kulkarni-Nomizu product");
        CurvTensor(kn_raw(self, &other.0))
    }
}

impl TryFrom<Tensor> for Sym2 {
    type Error = CurvError;
    fn try_from(t: Tensor) -> Result<Self> {
        if t.rank != 2 {
            return Err(CurvError::RankMismatch { expected: 2, found: t.rank });
        }
        Sym2::from_rows(&t.data.chunks(t.n).map(|r| r.to_vec()).collect::<Vec<_>>())
    }
}

/// Covariant 4-tensor meant to carry the symmetries of a curvature tensor.
/// The symmetries are checked by [`CurvTensor::symmetry_defects`], not by storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor(Tensor);

impl AsRef<Tensor> for CurvTensor {
    fn as_ref(&self) -> &Tensor {
        &self.0
    }
}

impl AsMut<Tensor> for CurvTensor {
    fn as_mut(&mut self) -> &mut Tensor {
        &mut self.0
    }
}

linear_ops!(CurvTensor, CurvTensor);

/// Relative defects of the three generalized-curvature symmetries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryDefects {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl SymmetryDefects {
    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.pair_symmetry).max(self.bianchi)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl CurvTensor {
    pub fn zeros(n: usize) -> Self {
        CurvTensor(Tensor::zeros(n, 4))
    }

    pub fn from_tensor(t: Tensor) -> Result<Self> {
        if t.rank != 4 {
            return Err(CurvError::RankMismatch { expected: 4, found: t.rank });
        }
        Ok(CurvTensor(t))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn get(&self, h: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.0.n;
        self.0.data[((h * n + i) * n + j) * n + k]
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }

    /// Relative defects of `T_hijk = -T_ihjk = -T_hikj`, `T_hijk = T_jkhi`,
    /// and `T_hijk + T_jhik + T_ijhk = 0`.
    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let n = self.n();
        let scale = self.0.norm();
        let rel = |s: f64| if scale > 0.0 { s.sqrt() / scale } else { 0.0 };
        let (mut anti, mut pair, mut bian) = (0.0, 0.0, 0.0);
        for h in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let t = self.get(h, i, j, k);
                        let a1 = t + self.get(i, h, j, k);
                        let a2 = t + self.get(h, i, k, j);
                        anti += a1 * a1 + a2 * a2;
                        let p = t - self.get(j, k, h, i);
                        pair += p * p;
                        let b = t + self.get(j, h, i, k) + self.get(i, j, h, k);
                        bian += b * b;
                    }
                }
            }
        }
        SymmetryDefects { antisymmetry: rel(anti), pair_symmetry: rel(pair), bianchi: rel(bian) }
    }
}

/// The metric and its inverse at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPoint {
    g: Sym2,
    g_inv: Sym2,
    signature: usize,
}

impl MetricPoint {
    pub fn new(g: Sym2) -> Result<Self> {
        let n = g.n();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(CurvError::DimensionOutOfRange(n, 2, MAX_DIM));
        }
        let m = g.to_matrix();
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return Err(CurvError::Singular);
        }
        let lu = m.clone().lu();
        if lu.determinant().abs() <= 1e-12 * scale.powi(n as i32) {
            return Err(CurvError::Singular);
        }
        let inv = lu.try_inverse().ok_or(CurvError::Singular)?;
        let check = &m * &inv - DMatrix::<f64>::identity(n, n);
        if check.amax() > 1e-12 * (scale * inv.amax()).max(1.0) {
            return Err(CurvError::Singular);
        }
        let g_inv = Sym2::symmetrize(&inv);
        let signature = m.symmetric_eigen().eigenvalues.iter().filter(|&&e| e < 0.0).count();
        Ok(MetricPoint { g, g_inv, signature })
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new(Sym2::identity(n)).expect("identity metric is valid")
    }

    /// `diag(-1, .., -1, 1, .., 1)` with `s` negative entries.
    pub fn pseudo_euclidean(n: usize, s: usize) -> Result<Self> {
        let d: Vec<f64> = (0..n).map(|i| if i < s { -1.0 } else { 1.0 }).collect();
        Self::new(Sym2::diag(&d))
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn g(&self) -> &Sym2 {
        &self.g
    }

    pub fn g_inv(&self) -> &Sym2 {
        &self.g_inv
    }

    pub fn signature(&self) -> usize {
        self.signature
    }

    /// `G = ½ g∧g`.
    pub fn big_g(&self) -> CurvTensor {
        0.5 * self.g.kn(&self.g)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n() {
            return Err(CurvError::DimensionMismatch { expected: self.n(), found: n });
        }
        Ok(())
    }
}

fn kn_raw(e: &Sym2, t: &Tensor) -> Tensor {
    let n = e.n();
    let k = t.rank;
    let tail = n.pow(k as u32 - 2);
    let mut out = Tensor::zeros(n, k + 2);
    let e = |i: usize, j: usize| e.0.data[i * n + j];
    let tb = |i: usize, j: usize| (i * n + j) * tail;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let (ead, ebc, eac, ebd) = (e(a, d), e(b, c), e(a, c), e(b, d));
                    if ead == 0.0 && ebc == 0.0 && eac == 0.0 && ebd == 0.0 {
                        continue;
                    }
                    let o = (((a * n + b) * n + c) * n + d) * tail;
                    let (t_bc, t_ad, t_bd, t_ac) = (tb(b, c), tb(a, d), tb(b, d), tb(a, c));
                    for y in 0..tail {
                        out.data[o + y] = ead * t.data[t_bc + y] + ebc * t.data[t_ad + y]
                            - eac * t.data[t_bd + y]
                            - ebd * t.data[t_ac + y];
                    }
                }
            }
        }
    }
    out
}

/// Kulkarni-Nomizu product `E∧T` of a symmetric 2-tensor with a (0,k) tensor, k ≥ 2.
pub fn kn_product(e: &Sym2, t: &Tensor) -> Result<Tensor> {
    if e.n() != t.n {
        return Err(CurvError::DimensionMismatch { expected: e.n(), found: t.n });
    }
    if t.rank < 2 {
        return Err(CurvError::RankMismatch { expected: 2, found: t.rank });
    }
    Ok(kn_raw(e, t))
}

fn compose(a: &Sym2, gi: &Sym2, b: &Sym2) -> Sym2 {
    Sym2::symmetrize(&(a.to_matrix() * gi.to_matrix() * b.to_matrix()))
}

/// `A² = A g⁻¹ A` for k = 2, `A³ = A² g⁻¹ A` for k = 3.
pub fn metric_power(a: &Sym2, m: &MetricPoint, k: u32) -> Result<Sym2> {
    m.check_dim(a.n())?;
    match k {
        2 => Ok(compose(a, m.g_inv(), a)),
        3 => Ok(compose(&compose(a, m.g_inv(), a), m.g_inv(), a)),
        _ => Err(CurvError::InvalidParams(format!("metric power must be 2 or 3, got {k}"))),
    }
}

/// `g^{ij} A_ij`.
pub fn metric_trace(a: &Sym2, m: &MetricPoint) -> f64 {
    a.0.dot(&m.g_inv().0)
}

/// Eigenvalues of the operator `g⁻¹A`.
///
/// Definite metrics reduce to a symmetric problem through a Cholesky factor.
/// Otherwise a bounded real Schur iteration is used, retried with spectral
/// shifts when it stalls on clustered eigenvalues.
pub fn operator_eigenvalues(a: &Sym2, m: &MetricPoint) -> Vec<Complex<f64>> {
    let n = m.n();
    let sign = if m.signature() == 0 { 1.0 } else { -1.0 };
    if m.signature() == 0 || m.signature() == n {
        if let Some(ch) = (sign * m.g().to_matrix()).cholesky() {
            let l = ch.l();
            if let Some(li) = l.clone().try_inverse() {
                let s = &li * a.to_matrix() * li.transpose();
                let s = (&s + s.transpose()) * 0.5;
                return s.symmetric_eigenvalues().iter().map(|&v| Complex::new(sign * v, 0.0)).collect();
            }
        }
    }
    let op = m.g_inv().to_matrix() * a.to_matrix();
    let scale = op.amax().max(f64::MIN_POSITIVE);
    for shift in [0.0, 0.137, -0.291, 0.613] {
        let shifted = &op + DMatrix::identity(n, n) * (shift * scale);
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 2000) {
            return schur.complex_eigenvalues().iter().map(|z| z - Complex::new(shift * scale, 0.0)).collect();
        }
    }
    (0..n).map(|i| Complex::new(op[(i, i)], 0.0)).collect()
}

/// Singular values above `tol_rel` times the largest one.
pub fn numeric_rank(a: &Sym2, tol_rel: f64) -> usize {
    let sv = a.to_matrix().singular_values();
    let smax = sv.iter().fold(0.0f64, |x, &v| x.max(v));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&v| v > tol_rel * smax).count()
}
