//! Lazily computed products of a curvature package shared by fits and audits.

use std::cell::OnceCell;

use crate::curvature::{curvature_action, tachibana, CurvaturePackage};
use crate::tensor::{metric_power, metric_trace, CurvTensor, Sym2, Tensor};

macro_rules! cached {
    ($( $(#[$doc:meta])* $name:ident : $ty:ty = |$d:ident| $body:expr; )*) => {
        /// Memoized derived tensors of one package.
        pub struct Derived<'a> {
            pub pkg: &'a CurvaturePackage,
            $( $name: OnceCell<$ty>, )*
        }

        impl<'a> Derived<'a> {
            pub fn new(pkg: &'a CurvaturePackage) -> Self {
                Derived { pkg, $( $name: OnceCell::new(), )* }
            }

            $(
                $(#[$doc])*
                pub fn $name(&self) -> &$ty {
                    self.$name.get_or_init(|| { let $d = self; $body })
                }
            )*
        }
    };
}

cached! {
    /// `G = ½ g∧g`.
    big_g: CurvTensor = |d| d.pkg.metric.big_g();
    s2: Sym2 = |d| metric_power(&d.pkg.s, &d.pkg.metric, 2).expect("matching dimensions");
    s3: Sym2 = |d| metric_power(&d.pkg.s, &d.pkg.metric, 3).expect("matching dimensions");
    tr_s2: f64 = |d| metric_trace(d.s2(), &d.pkg.metric);
    tr_s3: f64 = |d| metric_trace(d.s3(), &d.pkg.metric);
    /// `g∧S`.
    g_s: CurvTensor = |d| d.pkg.g().kn(&d.pkg.s);
    /// `S∧S`.
    s_s: CurvTensor = |d| d.pkg.s.kn(&d.pkg.s);
    /// `g∧S²`.
    g_s2: CurvTensor = |d| d.pkg.g().kn(d.s2());
    rr: Tensor = |d| d.act(&d.pkg.r, d.pkg.r.tensor());
    rc: Tensor = |d| d.act(&d.pkg.r, d.pkg.c.tensor());
    cr: Tensor = |d| d.act(&d.pkg.c, d.pkg.r.tensor());
    cc: Tensor = |d| d.act(&d.pkg.c, d.pkg.c.tensor());
    rs: Tensor = |d| d.act(&d.pkg.r, d.pkg.s.tensor());
    cs: Tensor = |d| d.act(&d.pkg.c, d.pkg.s.tensor());
    /// `R·C - C·R`.
    rc_minus_cr: Tensor = |d| d.rc() - d.cr();
    q_g_r: Tensor = |d| d.q(d.pkg.g(), d.pkg.r.tensor());
    q_g_c: Tensor = |d| d.q(d.pkg.g(), d.pkg.c.tensor());
    q_s_r: Tensor = |d| d.q(&d.pkg.s, d.pkg.r.tensor());
    q_s_c: Tensor = |d| d.q(&d.pkg.s, d.pkg.c.tensor());
    q_s_g: Tensor = |d| d.q(&d.pkg.s, d.big_g().tensor());
    q_g_s: Tensor = |d| d.q(d.pkg.g(), d.pkg.s.tensor());
    q_g_s2: Tensor = |d| d.q(d.pkg.g(), d.s2().tensor());
    q_g_gs: Tensor = |d| d.q(d.pkg.g(), d.g_s().tensor());
    q_g_ss: Tensor = |d| d.q(d.pkg.g(), d.s_s().tensor());
    q_g_gs2: Tensor = |d| d.q(d.pkg.g(), d.g_s2().tensor());
}

impl Derived<'_> {
    pub fn n(&self) -> usize {
        self.pkg.n()
    }

    pub fn nf(&self) -> f64 {
        self.pkg.n() as f64
    }

    /// `B·T` at this point.
    pub fn act(&self, b: &CurvTensor, t: &Tensor) -> Tensor {
        curvature_action(b, t, &self.pkg.metric).expect("matching dimensions")
    }

    /// `Q(A,T)`.
    pub fn q(&self, a: &Sym2, t: &Tensor) -> Tensor {
        tachibana(a, t).expect("matching dimensions")
    }

    /// `Q(g,T)`.
    pub fn qg(&self, t: &CurvTensor) -> Tensor {
        self.q(self.pkg.g(), t.tensor())
    }

    pub fn trace(&self, a: &Sym2) -> f64 {
        metric_trace(a, &self.pkg.metric)
    }
}

/// `Σ c_i T_i` over tensors of one shape.
pub fn lin<T: AsRef<Tensor>>(terms: &[(f64, T)]) -> Tensor {
    let first = terms[0].1.as_ref();
    let mut out = Tensor::zeros(first.n(), first.rank());
    for (c, t) in terms {
        out.axpy(*c, t.as_ref());
    }
    out
}
