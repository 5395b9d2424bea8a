//! Audits that apply to any curvature package.

use super::{mismatch, AuditContext, Out, Provenance};
use crate::chart::ChartKind;
use crate::conditions::RoterDerived;
use crate::curvature::{cyclic_sum_residual, qg_kernel_test, ricci};
use crate::derived::lin;
use crate::fit::fit_span;
use crate::hypersurface::scalar_res;
use crate::tensor::{res, res0, CurvTensor, Sym2, Tensor};

pub(super) fn lemma21_cyclic(cx: &AuditContext) -> Out {
    let d = &cx.d;
    let mut o = Out::when(true);
    let cyc = |t: &Tensor| cyclic_sum_residual(t).expect("valence 6");
    o.r("q_g_r", cyc(d.q_g_r()))
        .r("q_s_r", cyc(d.q_s_r()))
        .r("q_s_c", cyc(d.q_s_c()))
        .r("q_s2_c", cyc(&d.q(d.s2(), cx.pkg().c.tensor())))
        .r("q_s_g", cyc(d.q_s_g()));
    o.k("rc_minus_cr_cyclic", cyc(d.rc_minus_cr()));
    o
}

pub(super) fn lemma21_kernel(cx: &AuditContext) -> Out {
    let pkg = cx.pkg();
    let mut o = Out::when(true);
    for (name, t) in [("r", &pkg.r), ("c", &pkg.c)] {
        let kt = qg_kernel_test(t, &pkg.metric, cx.tol.nonzero).expect("matching dimensions");
        o.r(&format!("{name}_agree"), mismatch(kt.agree, true))
            .k(&format!("{name}_qg_residual"), kt.qg_residual)
            .k(&format!("{name}_projection_residual"), kt.projection_residual);
    }
    o
}

pub(super) fn prop22(cx: &AuditContext) -> Out {
    if cx.n() < 4 {
        return Out::na();
    }
    let mut o = Out::when(true);
    o.r("identity01", crate::curvature::prop22_residual(cx.pkg()).expect("n >= 4"));
    o
}

pub(super) fn eqn21_identities(cx: &AuditContext) -> Out {
    let d = &cx.d;
    let pkg = cx.pkg();
    let n = cx.nf();
    let mut o = Out::when(true);
    let rebuilt: CurvTensor = &pkg.r - &((1.0 / (n - 2.0)) * d.g_s()) + (cx.kappa() / ((n - 2.0) * (n - 1.0))) * d.big_g();
    o.r("weyl", res(&pkg.c, &rebuilt))
        .r("weyl_trace_free", res0(&ricci(&pkg.c, &pkg.metric)))
        .r("ricci", res(&pkg.s, &ricci(&pkg.r, &pkg.metric)))
        .r("q_s_g", res(d.q_s_g(), d.q_g_gs().scaled(-1.0)))
        .r("q_g_g", res0(d.qg(d.big_g())))
        .r("g_action", res(d.act(d.big_g(), pkg.r.tensor()), d.q_g_r()));
    let srsr = lin(&[
        (1.0, d.q_s_r()),
        (0.5 / (n - 2.0), d.q_g_ss()),
        (-cx.kappa() / ((n - 2.0) * (n - 1.0)), d.q_g_gs()),
    ]);
    o.r("q_s_c", res(d.q_s_c(), srsr));
    o
}

pub(super) fn thm23_i(cx: &AuditContext) -> Out {
    if cx.n() < 4 {
        return Out::na();
    }
    let rep = cx.report();
    let mut o = Out::when(rep.einstein_residual <= cx.tol.premise);
    o.k("einstein_residual", rep.einstein_residual);
    if o.holds() {
        o.r("condition_star", rep.condition_star_residual);
    }
    o
}

pub(super) fn thm23_ii(cx: &AuditContext) -> Out {
    if cx.n() < 4 {
        return Out::na();
    }
    let rep = cx.report();
    let ps = rep.pseudosymmetric;
    let mut o = Out::when(rep.einstein_residual <= cx.tol.premise && rep.in_u_r && ps.residual <= cx.tol.premise);
    o.k("l_r", ps.coefficient);
    if o.holds() {
        let d = &cx.d;
        let (n, k, l) = (cx.nf(), cx.kappa(), ps.coefficient);
        o.r("rr", res(d.rr(), lin(&[(1.0, d.q_s_r()), (l - k / n, d.q_g_c())])))
            .r("cc", res(d.cc(), d.q_g_c().scaled(l - k / ((n - 1.0) * n))))
            .r("rc_plus_cr", res(d.rc() + d.cr(), lin(&[(1.0, d.q_s_c()), (2.0 * l - k / (n - 1.0), d.q_g_c())])));
    }
    o
}

/// Roter premise shared by the Roter-type audits.
fn roter_premise(cx: &AuditContext) -> (Out, Option<(f64, f64, f64, RoterDerived)>) {
    if cx.n() < 4 {
        return (Out::na(), None);
    }
    let rf = &cx.report().roter;
    let ok = rf.applicable && rf.residual <= cx.tol.premise && rf.phi.abs() > cx.tol.nonzero;
    let mut o = Out::when(ok);
    o.k("phi", rf.phi).k("mu", rf.mu).k("eta", rf.eta).k("fit_residual", rf.residual);
    if !ok {
        return (o, None);
    }
    let dv = RoterDerived::from_coefficients(cx.n(), cx.kappa(), rf.phi, rf.mu, rf.eta);
    o.k("alpha1", dv.alpha1).k("alpha2", dv.alpha2).k("l_r", dv.l_r).k("l", dv.l).k("l_c", dv.l_c);
    (o, Some((rf.phi, rf.mu, rf.eta, dv)))
}

pub(super) fn thm24(cx: &AuditContext) -> Out {
    let (mut o, fit) = roter_premise(cx);
    let Some((phi, mu, eta, dv)) = fit else { return o };
    let d = &cx.d;
    let pkg = cx.pkg();
    let (n, k) = (cx.nf(), cx.kappa());
    o.r("s2", res(d.s2(), dv.alpha1 * &pkg.s + dv.alpha2 * pkg.g()))
        .r("rc", res(d.rc(), d.q_g_c().scaled(dv.l_r)))
        .r("rr", res(d.rr(), d.q_g_r().scaled(dv.l_r)))
        .r("rs", res(d.rs(), d.q_g_s().scaled(dv.l_r)))
        .r("rr_q_s_r", res(d.rr(), lin(&[(1.0, d.q_s_r()), (dv.l, d.q_g_c())])))
        .r("l_identity", scalar_res(dv.l, dv.l_r + mu / phi))
        .r("cc", res(d.cc(), d.q_g_c().scaled(dv.l_c)))
        .r("cr", res(d.cr(), d.q_g_r().scaled(dv.l_c)))
        .r("cs", res(d.cs(), d.q_g_s().scaled(dv.l_c)));
    let first = lin(&[
        (1.0 / (n - 2.0), d.q_s_r()),
        (((n - 1.0) * mu - 1.0) / ((n - 2.0) * phi) + k / (n - 1.0), d.q_g_r()),
        ((mu * ((n - 1.0) * mu - 1.0) - (n - 1.0) * phi * eta) / ((n - 2.0) * phi), d.q_s_g()),
    ]);
    let second = lin(&[
        ((mu - 1.0 / (n - 2.0)) / phi + k / (n - 1.0), d.q_g_r()),
        (mu / phi * (mu - 1.0 / (n - 2.0)) - eta, d.q_s_g()),
    ]);
    o.r("rc_minus_cr_first", res(d.rc_minus_cr(), first)).r("rc_minus_cr_second", res(d.rc_minus_cr(), second));
    o
}

pub(super) fn thm24_ii(cx: &AuditContext) -> Out {
    let (mut o, fit) = roter_premise(cx);
    let Some((phi, _, _, dv)) = fit else { return o };
    let d = &cx.d;
    let n = cx.nf();
    o.r("condition_star", cx.report().condition_star_residual).r(
        "rc_plus_cr",
        res(d.rc() + d.cr(), lin(&[(1.0, d.q_s_c()), (dv.l + dv.l_c - 1.0 / ((n - 2.0) * phi), d.q_g_c())])),
    );
    o
}

pub(super) fn remark25_ii(cx: &AuditContext) -> Out {
    if cx.n() < 3 {
        return Out::na();
    }
    let alpha = cx.quasi_alpha();
    let mut o = Out::when(alpha.is_some());
    let Some(a) = alpha else { return o };
    let d = &cx.d;
    let pkg = cx.pkg();
    let (n, k) = (cx.nf(), cx.kappa());
    o.k("alpha", a);
    let sb = &pkg.s - &(a * pkg.g());
    o.r("rank_one_kn", res(sb.kn(&sb), CurvTensor::zeros(cx.n())))
        .r("half_ss", res(0.5 * d.s_s(), a * d.g_s() - (a * a) * d.big_g()))
        .r("q_half_ss", res(d.q_g_ss().scaled(0.5), d.q_g_gs().scaled(a)))
        .r("q_s_r", res(d.q_s_r(), lin(&[(1.0, d.q_s_c()), (-(a - k / (n - 1.0)) / (n - 2.0), d.q_g_gs())])));
    o
}

pub(super) fn weyl_pseudo_bis(cx: &AuditContext) -> Out {
    let rep = cx.report();
    let ps = rep.pseudosymmetric;
    let mut o = Out::when(rep.in_u_r && ps.residual <= cx.tol.premise);
    o.k("l_r", ps.coefficient);
    if o.holds() {
        let d = &cx.d;
        o.r("rs", res(d.rs(), d.q_g_s().scaled(ps.coefficient)))
            .r("rc", res(d.rc(), d.q_g_c().scaled(ps.coefficient)));
    }
    o
}

pub(super) fn remark25_warped(cx: &AuditContext) -> Out {
    let Provenance::Chart(ChartKind::Warped1dEinstein { .. }, _) = &cx.provenance else {
        return Out::na();
    };
    let rep = cx.report();
    let mut o = Out::when(cx.n() >= 5 && rep.in_u_s && rep.in_u_c);
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let ls = rep.ricci_pseudosymmetric.coefficient;
    let alpha = cx.quasi_alpha();
    o.k("l_s", ls).k("alpha", alpha.unwrap_or(f64::NAN));
    o.r("quasi_einstein", mismatch(alpha.is_some(), true))
        .r("ricci_pseudosymmetric", rep.ricci_pseudosymmetric.residual)
        .r("alpha_relation", alpha.map_or(1.0, |a| scalar_res(a, cx.kappa() / (cx.nf() - 1.0) - ls)))
        .r("quasi022", res(d.rc_minus_cr().scaled(cx.nf() - 2.0), lin(&[(1.0, d.q_s_c()), (-ls, d.q_g_c())])));
    o
}

/// Reference Reissner-Nordström-(A)dS Roter scalars at radius `r`.
pub fn rn_reference_roter(m: f64, q: f64, l: f64, r: f64) -> (f64, f64, f64) {
    let q2 = q * q;
    let q4 = q2 * q2;
    let phi = 1.5 * (q2 - m * r) * r.powi(4) / q4;
    let mu = 0.5 * (q4 + 3.0 * q2 * l * r.powi(4) - 3.0 * l * m * r.powi(5)) / q4;
    let eta = (3.0 * q4 * q2 + 4.0 * q4 * l * r.powi(4) - 3.0 * q4 * m * r + 9.0 * q2 * l * l * r.powi(8)
        - 9.0 * l * l * m * r.powi(9))
        / (12.0 * r.powi(4) * q4);
    (phi, mu, eta)
}

pub(super) fn remark25_v(cx: &AuditContext) -> Out {
    let Provenance::Chart(ChartKind::RnDs { mass, charge, lambda }, x) = &cx.provenance else {
        return Out::na();
    };
    let rep = cx.report();
    let mut o = Out::when(rep.in_u_s && rep.in_u_c);
    let rf = &rep.roter;
    let (phi_p, mu_p, eta_p) = rn_reference_roter(*mass, *charge, *lambda, x[1]);
    o.k("phi_fit", rf.phi).k("mu_fit", rf.mu).k("eta_fit", rf.eta);
    o.k("phi_reference", phi_p).k("mu_reference", mu_p).k("eta_reference", eta_p);
    o.k("phi_reference_deviation", scalar_res(rf.phi, phi_p))
        .k("mu_reference_deviation", scalar_res(rf.mu, mu_p))
        .k("eta_reference_deviation", scalar_res(rf.eta, eta_p));
    if o.holds() {
        o.r("roter_fit", rf.residual)
            .r("condition_star", rep.condition_star_residual)
            .r("phi_sign_flipped", scalar_res(rf.phi, -phi_p))
            .r("mu", scalar_res(rf.mu, mu_p))
            .r("eta_sign_flipped_doubled", scalar_res(rf.eta, -2.0 * eta_p));
        o.note("reference phi and eta differ from the fit by the curvature sign convention and a factor 2 in eta");
    }
    o
}

/// `(p, q)` when the package is a Clifford torus `S^p(√(p/n)) × S^q(√(q/n))`.
fn clifford_split(cx: &AuditContext) -> Option<(usize, usize)> {
    match &cx.provenance {
        Provenance::Chart(ChartKind::ProductSpheres { p, r1, q, r2 }, _) => {
            let n = (p + q) as f64;
            let ok = (r1 * r1 - *p as f64 / n).abs() <= 1e-12 && (r2 * r2 - *q as f64 / n).abs() <= 1e-12;
            ok.then_some((*p, *q))
        }
        Provenance::Hypersurface => {
            let h = cx.hyp()?;
            if h.eps != 1.0 || (h.c - 1.0).abs() > 1e-12 || h.data.metric.signature() != 0 {
                return None;
            }
            let mut ev: Vec<f64> = h.data.principal_curvatures().iter().map(|z| z.re).collect();
            ev.sort_by(|a, b| b.total_cmp(a));
            let n = ev.len();
            let p = ev.iter().filter(|&&v| (v - ev[0]).abs() <= 1e-9 * ev[0].abs().max(1.0)).count();
            let (l1, l2) = (ev[0], ev[n - 1]);
            let tail_ok = ev[p..].iter().all(|&v| (v - l2).abs() <= 1e-9 * l2.abs().max(1.0));
            let ok = tail_ok && (l1 * l2 + 1.0).abs() <= 1e-9 && (p as f64 * l1 * l1 - (n - p) as f64).abs() <= 1e-9 * n as f64;
            ok.then_some((p, n - p))
        }
        Provenance::Algebraic | Provenance::Chart(..) => None,
    }
}

pub(super) fn example36(cx: &AuditContext) -> Out {
    let Some((p, q)) = clifford_split(cx) else { return Out::na() };
    let n = p + q;
    let mut o = Out::when(n >= 4 && n != 2 * p && p >= 2 && q >= 2);
    if !o.holds() {
        return o;
    }
    let d = &cx.d;
    let pkg = cx.pkg();
    let nf = n as f64;
    let coef = (p * q) as f64 / (2.0 * ((n as f64) - 2.0 * p as f64).powi(2));
    let sb: Sym2 = &pkg.s - &((nf - 2.0) * pkg.g());
    let formula = coef * sb.kn(&sb) + d.big_g().clone();
    let fit = fit_span(pkg.r.tensor(), &[formula.tensor()], cx.tol.exact).expect("same shapes");
    let rf = &cx.report().roter;
    o.k("phi", rf.phi).k("mu", rf.mu).k("eta", rf.eta);
    o.r("rr", res0(d.rr()))
        .r("rc", res0(d.rc()))
        .r("roter_formula", res(&pkg.r, &formula))
        .r("roter_formula_scale", scalar_res(fit.coef(0), 1.0))
        .r("condition_star", cx.report().condition_star_residual)
        .r("cr", res(d.cr(), lin(&[(1.0, d.q_s_c()), (-cx.kappa() / (nf - 1.0), d.q_g_c())])));
    o
}
