//! Audits for Gauss-equation packages of hypersurfaces in space forms.

use super::{mismatch, AuditContext, HypFacts, Out};
use crate::derived::lin;
use crate::fit::fit_span;
use crate::hypersurface::{gauss_contraction_residuals, scalar_res};
use crate::tensor::{numeric_rank, res, res0, Sym2, Tensor};

fn facts<'c>(cx: &'c AuditContext) -> Option<&'c HypFacts> {
    cx.hyp()
}

/// `|ρ| ‖g‖` relative to `‖H³‖`.
fn rho_rel(h: &HypFacts) -> f64 {
    let scale = h.data.h3().tensor().norm();
    h.rho().abs() * h.data.metric.g().tensor().norm() / scale.max(1.0)
}

/// Points of `U_H` where the cubic `H³ = tr(H) H² + ψH + ρg` is exact.
fn ds4(cx: &AuditContext, h: &HypFacts) -> bool {
    h.uh.in_uh && h.cubic.residual <= cx.tol.premise
}

/// `R - cG` and `S - (n-1)c g`.
fn shifted(cx: &AuditContext, h: &HypFacts) -> (crate::tensor::CurvTensor, Sym2) {
    let pkg = cx.pkg();
    let rb = &pkg.r - &(h.c * cx.d.big_g());
    let sb = &pkg.s - &(((cx.nf() - 1.0) * h.c) * pkg.g());
    (rb, sb)
}

/// `Q(g, (n-2)/2 S∧S - κ g∧S + g∧S²)`.
fn x_tensor(cx: &AuditContext) -> Tensor {
    let d = &cx.d;
    lin(&[(0.5 * (cx.nf() - 2.0), d.q_g_ss()), (-cx.kappa(), d.q_g_gs()), (1.0, d.q_g_gs2())])
}

pub(super) fn gauss_contraction(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let (s, k) = gauss_contraction_residuals(&h.data, cx.pkg());
    let mut o = Out::when(true);
    o.r("ricci", s).r("scalar", k);
    o
}

pub(super) fn eq900ab(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let d = &cx.d;
    let (n, c) = (cx.nf(), h.c);
    let mut o = Out::when(true);
    o.r("weyl_form", res(d.rr(), lin(&[(1.0, d.q_s_r()), (-(n - 2.0) * c, d.q_g_c())])))
        .r("g_form", res(d.rr(), lin(&[(1.0, d.q_s_r()), (-(n - 2.0) * c, d.q_g_r()), (-c, d.q_s_g())])));
    o
}

pub(super) fn remark37_i(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let mut o = Out::when(rep.einstein_residual <= cx.tol.premise);
    if o.holds() {
        let (n, k) = (cx.nf(), cx.kappa());
        let g = h.data.metric.g();
        let rhs = h.tr_h * &h.data.h + ((n - 1.0) * h.eps / n * (h.kt / (n + 1.0) - k / (n - 1.0))) * g;
        o.r("h2", res(h.data.h2(), rhs));
    }
    o
}

pub(super) fn remark37_ii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4);
    if !o.holds() {
        return o;
    }
    let conformally_flat = !cx.report().in_u_c;
    let rank_one = !cx.never_rank_one(&h.data.h);
    o.r("conformally_flat_iff_rank_one", mismatch(conformally_flat, rank_one));
    if rank_one {
        o.r("implies_two", h.uh.residual);
    }
    o
}

pub(super) fn thm31(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(!h.uh.in_uh && h.uh.residual <= cx.tol.premise && cx.report().in_u_r);
    if let (true, Some(beta)) = (o.holds(), h.uh.beta) {
        let l = h.c - h.eps * beta;
        o.k("l_r", l).r("rr", res(cx.d.rr(), cx.d.q_g_r().scaled(l)));
    }
    o
}

pub(super) fn thm32_i(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let ps = rep.pseudosymmetric;
    let mut o = Out::when(rep.in_u_r && ps.residual <= cx.tol.premise);
    if o.holds() {
        let d = &cx.d;
        let (rb, _) = shifted(cx, h);
        let l = ps.coefficient + (cx.nf() - 2.0) * h.c;
        o.k("l_r", ps.coefficient)
            .r("q_s_rbar", res(d.q(&cx.pkg().s, rb.tensor()), d.qg(&rb).scaled(l)));
    }
    o
}

pub(super) fn thm32_ii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let mut o = Out::when(rep.in_u_r);
    if o.holds() {
        let ps = rep.pseudosymmetric.residual <= cx.tol.exact;
        let branch = !h.uh.in_uh || h.rank_h == 2;
        o.r("pseudosymmetric_iff_branch", mismatch(ps, branch));
    }
    o
}

pub(super) fn thm32_iii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(h.rank_h == 2);
    if o.holds() {
        o.r("rr", res(cx.d.rr(), cx.d.q_g_r().scaled(h.c)));
    }
    o
}

pub(super) fn thm32_iv(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(h.rank_h == 2 && h.uh.in_uh);
    if o.holds() {
        let d = &cx.d;
        let (rb, sb) = shifted(cx, h);
        o.r("q_sbar_rbar", res(d.q(&cx.pkg().s, rb.tensor()), d.qg(&rb).scaled((cx.nf() - 1.0) * h.c)))
            .r("q_sbar_rbar_zero", res(d.q(&sb, rb.tensor()), Tensor::zeros(cx.n(), 6)));
    }
    o
}

pub(super) fn thm32_v(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let (rb, sb) = shifted(cx, h);
    let mut o = Out::when(h.rank_h == 2 && h.uh.in_uh && numeric_rank(&sb, cx.tol.rank_rel) > 1);
    if o.holds() {
        let half = 0.5 * sb.kn(&sb);
        let f = fit_span(rb.tensor(), &[half.tensor()], cx.tol.exact).expect("same shapes");
        o.k("phi", f.coef(0)).r("roter_shifted", f.residual);
        o.note("constancy of phi across points is not checked");
    }
    o
}

pub(super) fn thm33(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let mut o = Out::when(!h.uh.in_uh && rep.in_u_s && rep.in_u_c);
    let (Some(alpha), Some(beta)) = (h.uh.alpha, h.uh.beta) else { return o };
    if !o.holds() {
        return o;
    }
    let (n, c, eps) = (cx.nf(), h.c, h.eps);
    let phi = eps / (h.tr_h - alpha).powi(2);
    let t = (n - 1.0) * c - eps * beta;
    let mu = -phi * t;
    let eta = phi * t * t + c;
    o.k("phi", phi).k("mu", mu).k("eta", eta);
    let d = &cx.d;
    let form = lin(&[(0.5 * phi, d.s_s()), (mu, d.g_s()), (eta, d.big_g())]);
    let rf = &rep.roter;
    o.r("roter_form", res(&cx.pkg().r, form))
        .r("phi_vs_fit", scalar_res(phi, rf.phi))
        .r("mu_vs_fit", scalar_res(mu, rf.mu))
        .r("eta_vs_fit", scalar_res(eta, rf.eta));
    o
}

pub(super) fn thm34(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4 && !h.uh.in_uh);
    if o.holds() {
        o.r("condition_star", cx.report().condition_star_residual);
    }
    o
}

pub(super) fn thm35(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let distinct = h.data.distinct_principal_curvatures(cx.tol.eig_gap);
    let mut o = Out::when(cx.n() >= 4 && h.data.metric.signature() == 0 && h.eps == 1.0 && distinct <= 2);
    o.k("distinct_principal_curvatures", distinct as f64);
    if o.holds() {
        o.r("condition_star", cx.report().condition_star_residual);
    }
    o
}

struct Prop41 {
    alpha1: f64,
    alpha2: f64,
}

fn prop41_scalars(cx: &AuditContext, h: &HypFacts) -> Prop41 {
    let (n, c) = (cx.nf(), h.c);
    Prop41 {
        alpha1: (cx.kappa() / (n - 1.0) + h.eps * h.psi() - (n * n - 3.0 * n + 3.0) * c) / (n - 2.0),
        alpha2: -(n - 3.0) * c / (n - 2.0),
    }
}

pub(super) fn prop41(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4 && ds4(cx, h));
    o.k("psi", h.psi()).k("rho", h.rho());
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (n, c, k, eps, rho) = (cx.nf(), h.c, cx.kappa(), h.eps, h.rho());
    let Prop41 { alpha1: a1, alpha2: a2 } = prop41_scalars(cx, h);
    o.k("alpha1", a1).k("alpha2", a2);
    let q_h_g = d.q(&h.data.h, d.big_g().tensor());
    o.r("zz1", res(d.rc(), lin(&[(1.0, d.q_s_r()), (-(n - 2.0) * c, d.q_g_r()), (a2, d.q_s_g()), (rho / (n - 2.0), &q_h_g)])))
        .r("zz2", res(d.cr(), lin(&[((n - 3.0) / (n - 2.0), d.q_s_r()), (a1, d.q_g_r()), (a2, d.q_s_g())])))
        .r(
            "zz3",
            res(
                d.rc_minus_cr().scaled(n - 2.0),
                lin(&[(1.0, d.q_s_r()), (rho, &q_h_g), ((n - 1.0) * c - k / (n - 1.0) - eps * h.psi(), d.q_g_r())]),
            ),
        )
        .r(
            "ds16a",
            res(
                d.cc().scaled(n - 2.0),
                lin(&[
                    (n - 3.0, d.q_s_r()),
                    ((n - 2.0) * a1, d.q_g_r()),
                    (a1 - a2, d.q_s_g()),
                    ((n - 3.0) / (n - 2.0) * rho, &q_h_g),
                ]),
            ),
        )
        .r("dz004", res(d.rs(), lin(&[(c, d.q_g_s()), (rho, &d.q(cx.pkg().g(), h.data.h.tensor()))])));
    o
}

struct Prop42 {
    alpha3: f64,
    lambda: f64,
}

fn prop42_scalars(cx: &AuditContext, h: &HypFacts) -> Prop42 {
    let n = cx.nf();
    let alpha3 = h.eps * h.psi() - 2.0 * (n - 1.0) * h.c;
    let lambda = h.rho() * h.tr_h - cx.kappa() * alpha3 - *cx.d.tr_s2();
    Prop42 { alpha3, lambda }
}

pub(super) fn prop42(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4 && ds4(cx, h));
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let pkg = cx.pkg();
    let g = pkg.g();
    let (n, c, k, eps, psi, rho) = (cx.nf(), h.c, cx.kappa(), h.eps, h.psi(), h.rho());
    let Prop41 { alpha1: a1, alpha2: a2 } = prop41_scalars(cx, h);
    let Prop42 { alpha3: a3, lambda } = prop42_scalars(cx, h);
    let rho1 = -(n - 2.0) * c - a3;
    let rho2 = -lambda / n - ((n - 1.0) * c + a3) * a3;
    let rho3 = (*d.tr_s3() + (2.0 * eps * psi - 3.0 * (n - 1.0) * c) * *d.tr_s2() - k * rho2) / n;
    o.k("alpha3", a3).k("lambda", lambda).k("rho1", rho1).k("rho2", rho2).k("rho3", rho3);
    let big_g = d.big_g().tensor();
    let rho_h = rho * &h.data.h;
    let comb = &(a3 * &pkg.s) + d.s2();
    o.r("dz005", res(d.q(&rho_h, big_g), d.q(&comb, big_g)))
        .r("dz008", res(&rho_h, &comb + &((lambda / n) * g)))
        .r("dz006", scalar_res(a3, (n - 2.0).powi(2) * ((a1 - a2) / (n - 2.0) - 2.0 * a2 - c) - k / (n - 1.0)))
        .r("ggg01", res(d.rs(), lin(&[(1.0, d.q_g_s2()), (eps * psi - (2.0 * n - 3.0) * c, d.q_g_s())])))
        .r(
            "eee01",
            res(
                d.act(&pkg.r, d.s2().tensor()),
                lin(&[(1.0, &d.q(&pkg.s, d.s2().tensor())), (rho1, d.q_g_s2()), (rho2, d.q_g_s())]),
            ),
        )
        .r(
            "eee01new",
            res(
                d.s3(),
                lin(&[((-2.0 * eps * psi + 3.0 * (n - 1.0) * c), d.s2().tensor()), (rho2, pkg.s.tensor()), (rho3, g.tensor())]),
            ),
        );
    o
}

pub(super) fn prop42_ii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let pkg = cx.pkg();
    let d = &cx.d;
    let f = fit_span(d.s2().tensor(), &[pkg.s.tensor(), pkg.g().tensor()], cx.tol.premise).expect("same shapes");
    let mut o = Out::when(cx.n() >= 4 && ds4(cx, h) && f.exact);
    o.k("beta1", f.coef(0)).k("beta2", f.coef(1));
    if o.holds() {
        let Prop42 { alpha3, lambda } = prop42_scalars(cx, h);
        o.k("alpha3", alpha3).k("beta1_reference_deviation", scalar_res(f.coef(0), alpha3));
        o.r("rho_zero", rho_rel(h))
            .r("beta1", scalar_res(f.coef(0), -alpha3))
            .r("beta2", scalar_res(f.coef(1), -lambda / cx.nf()));
        o.note("beta1 = -alpha3 follows from rho H = S^2 + alpha3 S + (lambda/n) g");
    }
    o
}

pub(super) fn prop43_i(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() == 4 && ds4(cx, h));
    if o.holds() {
        o.k("rho", h.rho()).r("rho_zero", rho_rel(h));
    }
    o
}

pub(super) fn prop43_ii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(h.rank_h == 2 && h.uh.in_uh);
    if o.holds() {
        let (n, k) = (cx.nf(), cx.kappa());
        let tr_h2 = cx.d.trace(&h.data.h2());
        o.k("psi", h.psi())
            .r("ds4aa", h.ds4aa_residual)
            .r("psi_traces", scalar_res(h.psi(), 0.5 * (tr_h2 - h.tr_h * h.tr_h)))
            .r("psi_curvatures", scalar_res(h.psi(), (n - 1.0) * h.eps / 2.0 * (h.kt / (n + 1.0) - k / (n - 1.0))));
    }
    o
}

pub(super) fn prop43_iii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let (_, sb) = shifted(cx, h);
    let mut o = Out::when(h.rank_h == 2 && h.uh.in_uh && numeric_rank(&sb, cx.tol.rank_rel) > 1);
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (n, c, k) = (cx.nf(), h.c, cx.kappa());
    let phi14 = 2.0 / ((n - 1.0) * (h.kt / (n + 1.0) - k / (n - 1.0)));
    let rf = &cx.report().roter;
    let phi = rf.phi;
    let l = (n - 3.0) / ((n - 2.0) * (n - 1.0) * phi14);
    o.k("phi_fit", phi).k("phi_reference", phi14);
    o.r("roter_fit", rf.residual)
        .r("phi_sign_flipped", scalar_res(phi, -phi14))
        .r("mu", scalar_res(rf.mu, -(n - 1.0) * c * phi))
        .r("eta", scalar_res(rf.eta, c * ((n - 1.0).powi(2) * c * phi + 1.0)))
        .r("pc01", res(d.rr(), d.q_g_r().scaled(c)))
        .r("pc02", res(d.rc(), d.q_g_c().scaled(c)))
        .r("pc03", res(d.cr(), d.q_g_r().scaled(l)))
        .r("pc04", res(d.cc(), d.q_g_c().scaled(l)));
    o.note("the reference phi formula has the opposite sign of the fitted Roter coefficient");
    o
}

pub(super) fn prop43_iv(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(h.uh.in_uh);
    if o.holds() {
        let d = &cx.d;
        let a = cx.close(d.rr(), d.q_g_r().scaled(h.c));
        let b = cx.close(d.rc(), d.q_g_c().scaled(h.c));
        o.r("equivalence", mismatch(a, b));
    }
    o
}

pub(super) fn prop43_v(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(ds4(cx, h) && h.ds4aa_residual <= cx.tol.premise);
    if o.holds() {
        o.r("dz004_reduced", res(cx.d.rs(), cx.d.q_g_s().scaled(h.c)));
    }
    o
}

pub(super) fn prop47_i(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4);
    if o.holds() {
        let d = &cx.d;
        let n = cx.nf();
        let rhs = lin(&[(1.0, d.q_s_c()), (-(n - 2.0) * h.c, d.q_g_c()), (1.0, d.cc()), (-1.0 / (n - 2.0).powi(2), &x_tensor(cx))]);
        o.r("identity01hyper", res(d.rc() + d.cr(), rhs));
    }
    o
}

pub(super) fn prop47_ii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let mut o = Out::when(cx.n() >= 4 && ds4(cx, h));
    if o.holds() {
        let d = &cx.d;
        let (n, c, k, eps) = (cx.nf(), h.c, cx.kappa(), h.eps);
        let a = k / (n - 1.0) + eps * h.psi();
        o.r("ds16anew01", res(d.cc(), lin(&[((n - 3.0) / (n - 2.0), d.rc()), ((a - (2.0 * n - 3.0) * c) / (n - 2.0), d.q_g_c())])))
            .r(
                "identity01hyper17",
                res(
                    lin(&[(n - 2.0, d.cr()), (1.0, d.rc())]),
                    lin(&[(n - 2.0, d.q_s_c()), (a - (n - 1.0).powi(2) * c, d.q_g_c()), (-1.0 / (n - 2.0), &x_tensor(cx))]),
                ),
            );
    }
    o
}

/// `Q(g,B)` for the five B-tensors, paired with their targets.
fn b_forms(cx: &AuditContext, h: &HypFacts) -> Vec<(&'static str, Tensor, Tensor)> {
    let d = &cx.d;
    let pkg = cx.pkg();
    let (n, c, k, eps, psi) = (cx.nf(), h.c, cx.kappa(), h.eps, h.psi());
    let ep = eps * psi;
    let (r, gs, ss, gs2) = (pkg.r.tensor(), d.g_s().tensor(), d.s_s().tensor(), d.g_s2().tensor());
    let a = k + ep - (n - 1.0).powi(2) * c;
    let b1 = lin(&[(a, r), (-0.5, ss), (1.0, gs2), (ep - (n - 1.0) * c, gs)]).scaled(1.0 / (n - 1.0));
    let b2 = lin(&[(a, r), (-1.0 / (n - 2.0), gs2), (-0.5, ss), (-(ep - (n - 1.0).powi(2) * c) / (n - 2.0), gs)])
        .scaled(1.0 / (n - 1.0));
    let lead = k / (n - 1.0) + 2.0 * ep / (n - 1.0) - h.kt / (n + 1.0);
    let w = (n - 3.0) / ((n - 2.0) * (n - 1.0));
    let b3 = lin(&[(lead, r), (w * (ep - (n - 1.0) * c), gs), (-0.5 * w, ss), (w, gs2)]);
    let b4 = lin(&[
        (-ep / (n - 1.0) + c, r),
        (-ep / (n - 1.0) + 2.0 * c, gs),
        (-1.0 / (n - 1.0), gs2),
        (-1.0 / (2.0 * (n - 2.0) * (n - 1.0)), ss),
    ]);
    let wb = (n - 3.0) / ((n - 2.0).powi(2) * (n - 1.0));
    let b = lin(&[(lead, pkg.c.tensor()), (-wb * (n - 2.0) / 2.0, ss), (wb * k, gs), (-wb, gs2)]);
    let g = pkg.g();
    vec![
        ("b1_rr", d.rr().clone(), d.q(g, &b1)),
        ("b2_rc", d.rc().clone(), d.q(g, &b2)),
        ("b3_cr", d.cr().clone(), d.q(g, &b3)),
        ("b4_rc_minus_cr", d.rc_minus_cr().clone(), d.q(g, &b4)),
        ("b_cc", d.cc().clone(), d.q(g, &b)),
    ]
}

pub(super) fn thm44_45(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    if cx.n() < 4 {
        return Out::na();
    }
    let d = &cx.d;
    let hyp = fit_span(d.q_s_r(), &[d.q_g_r(), d.q_g_gs(), d.q_g_gs2(), d.q_g_ss()], cx.tol.premise).expect("same shapes");
    let mut o = Out::when(ds4(cx, h) && hyp.exact);
    o.k("tachibana_hypothesis_residual", hyp.residual);
    if o.holds() {
        for (name, target, q) in b_forms(cx, h) {
            o.r(name, res(target, q));
        }
        o.note("lambda indeterminate (annihilated by Q(g,.))");
    }
    o
}

pub(super) fn thm48(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let alpha = cx.quasi_alpha();
    let mut o = Out::when(cx.n() >= 4 && h.uh.in_uh && alpha.is_some() && h.ds4aa_residual <= cx.tol.premise);
    let Some(alpha) = alpha else { return o };
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (n, c, k) = (cx.nf(), h.c, cx.kappa());
    let a = ((n - 2.0) * k / (n - 1.0) + c) / (n - 1.0);
    let big_a = lin(&[(1.0, d.q_s_c()), (-a, d.q_g_c())]);
    let star = cx.report().condition_star_residual <= cx.tol.exact;
    let q08a = scalar_res(k / (n - 1.0), h.kt / (n + 1.0)) <= cx.tol.exact;
    let q08b = cx.close(d.q_s_c(), d.q_g_c().scaled(k / n));
    let a_zero = cx.close(d.q_s_c(), d.q_g_c().scaled(a));
    o.k("alpha", alpha).k("a", a).k("a_norm", big_a.norm());
    o.k("qqee08a", f64::from(u8::from(q08a))).k("qqee08b", f64::from(u8::from(q08b)));
    let rhs03 = |scale: f64| lin(&[(k / (n - 1.0), d.q_g_c()), (-1.0, d.q_s_c()), (scale, &big_a)]);
    o.k("qqee03_reference_deviation", res(d.rc_minus_cr(), rhs03(1.0)));
    o.r("qqee02", scalar_res(alpha, k / (n - 1.0) - c))
        .r("qqee03", res(d.rc_minus_cr(), rhs03((n - 1.0) / (n - 2.0))))
        .r("qqee05", res(d.rc_minus_cr().scaled(n - 2.0), lin(&[(1.0, d.q_s_r()), (-c, d.q_g_r())])))
        .r("qqee06", res(d.rc_minus_cr(), lin(&[(1.0 / (n - 2.0), d.q_s_c()), (-c / (n - 2.0), d.q_g_c())])))
        .r("star_iff_qqee08", mismatch(star, q08a && q08b))
        .r("star_iff_a_zero", mismatch(star, a_zero));
    o.note("A enters R.C - C.R with the factor (n-1)/(n-2); the unscaled form is reported as a constant");
    o
}

/// Sorted real principal curvatures when all are real.
fn real_curvatures(h: &HypFacts) -> Option<Vec<f64>> {
    let ev = h.data.principal_curvatures();
    let scale = ev.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    if ev.iter().any(|z| z.im.abs() > 1e-12 * scale) {
        return None;
    }
    let mut v: Vec<f64> = ev.iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    Some(v)
}

pub(super) fn remark25_iii_b(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let n = cx.n();
    let pattern = real_curvatures(h).is_some_and(|v| {
        let p = n / 2;
        let lam = v[n - 1];
        let tol = 1e-9 * lam.abs().max(1.0);
        lam.abs() > tol
            && v[..p].iter().all(|x| (x + lam).abs() <= tol)
            && v[p].abs() <= tol
            && v[p + 1..].iter().all(|x| (x - lam).abs() <= tol)
    });
    let mut o = Out::when(
        n >= 5 && n % 2 == 1 && h.kt == 0.0 && h.eps == 1.0 && h.data.metric.signature() == 0 && pattern,
    );
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (nf, k) = (cx.nf(), cx.kappa());
    let hm = &h.data.h;
    o.r("h3", res(h.data.h3(), (-k / (nf - 1.0)) * hm))
        .r("ricci_semisymmetric", res0(d.rs()))
        .r("alpha", cx.quasi_alpha().map_or(1.0, |a| scalar_res(a, k / (nf - 1.0))))
        .r("rc", res(d.rc(), d.q_s_c()))
        .r("cr", res(d.cr(), d.q_s_c().scaled((nf - 3.0) / (nf - 2.0))))
        .r("rc_minus_cr", res(d.rc_minus_cr().scaled(nf - 2.0), d.q_s_c()));
    o
}

pub(super) fn example49_iii(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let (nf, k) = (cx.nf(), cx.kappa());
    let pre = cx.n() >= 5
        && h.kt == 0.0
        && h.eps == 1.0
        && ds4(cx, h)
        && scalar_res(h.psi(), -k / (nf - 1.0)) <= cx.tol.premise
        && scalar_res(h.rho(), k * h.tr_h / (nf - 1.0)) <= cx.tol.premise
        && rho_rel(h) > cx.tol.nonzero;
    let mut o = Out::when(pre);
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let pkg = cx.pkg();
    let xs = &(1.0 * d.s2()) - &((k / (nf - 1.0)) * &pkg.s);
    let xp = d.q(&xs, d.big_g().tensor());
    let w = (nf - 3.0) / (nf - 2.0);
    let rhs_rc = lin(&[(1.0, d.q_s_r()), (1.0 / (nf - 2.0), &xp)]);
    let s3_rhs = lin(&[
        (2.0 * k / (nf - 1.0), d.s2().tensor()),
        (*d.tr_s3() / k - 2.0 * *d.tr_s2() / (nf - 1.0), pkg.s.tensor()),
    ]);
    o.r("s3", res(d.s3(), s3_rhs))
        .r("dz020", res(d.rc(), &rhs_rc))
        .r("dz021", res(d.cr(), d.q_s_r().scaled(w)))
        .r("dz022", res(d.cc(), rhs_rc.scaled(w)))
        .r("dz024", res(d.cc(), d.rc().scaled(w)))
        .r("rc_minus_cr", res(d.rc_minus_cr().scaled(nf - 2.0), lin(&[(1.0, d.q_s_r()), (1.0, &xp)])))
        .r("cc_cr", res(d.cc(), lin(&[(1.0, d.cr()), (w / (nf - 2.0), &xp)])))
        .r(
            "ds16anew01",
            res(d.cc(), lin(&[(w, d.rc()), ((k / (nf - 1.0) + h.psi()) / (nf - 2.0), d.q_g_c())])),
        )
        .r("not_quasi_einstein", mismatch(cx.quasi_alpha().is_some(), false));
    o
}

pub(super) fn thm51(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let alpha = cx.quasi_alpha();
    let mut o = Out::when(cx.n() >= 4 && h.uh.in_uh && alpha.is_some() && rep.cond01.residual <= cx.tol.premise);
    let Some(alpha) = alpha else { return o };
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (n, c, k) = (cx.nf(), h.c, cx.kappa());
    let star = rep.condition_star_residual <= cx.tol.exact;
    let q08a = scalar_res(k / (n - 1.0), h.kt / (n + 1.0)) <= cx.tol.exact;
    let q08b = cx.close(d.q_s_c(), d.q_g_c().scaled(k / n));
    o.k("l1", rep.cond01.l1).k("l2", rep.cond01.l2).k("psi", h.psi()).k("alpha", alpha);
    o.r("ds4aa", h.ds4aa_residual)
        .r("rho_zero", rho_rel(h))
        .r("quasi321", res(d.rc_minus_cr().scaled(n - 2.0), lin(&[(1.0, d.q_s_c()), (-c, d.q_g_c())])))
        .r("qqee02", scalar_res(alpha, k / (n - 1.0) - c))
        .r("star_iff_qqee08", mismatch(star, q08a && q08b));
    o
}

pub(super) fn thm52_53(cx: &AuditContext) -> Out {
    let Some(h) = facts(cx) else { return Out::na() };
    let rep = cx.report();
    let pkg = cx.pkg();
    let mut o = Out::when(
        cx.n() >= 4 && h.uh.in_uh && rep.cond01.residual <= cx.tol.premise && cx.never_rank_one(&pkg.s),
    );
    o.k("l1", rep.cond01.l1).k("l2", rep.cond01.l2);
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let (n, c, k, ep) = (cx.nf(), h.c, cx.kappa(), h.eps * h.psi());
    let bracket = lin(&[
        (ep + k - (n - 1.0) * c, pkg.r.tensor()),
        (ep - 2.0 * (n - 1.0) * c, d.g_s().tensor()),
        (1.0, d.g_s2().tensor()),
        (-0.5, d.s_s().tensor()),
    ]);
    o.r("condition_star", rep.condition_star_residual)
        .r("cond02uuu", res(d.q_s_r().scaled(n - 1.0), d.q(pkg.g(), &bracket)));
    for (name, target, q) in b_forms(cx, h) {
        o.r(name, res(target, q));
    }
    o
}
