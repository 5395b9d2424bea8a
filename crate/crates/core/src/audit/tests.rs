use std::collections::BTreeMap;

use super::*;
use crate::chart::{build_chart, curvature_at};
use crate::curvature::{random_algebraic_curvature, random_metric, random_sym2, weyl_decompose};
use crate::hypersurface::gauss_package;
use crate::tensor::MetricPoint;
use rand::SeedableRng;

fn hyp(m: MetricPoint, h: Sym2, eps: f64, kt: f64) -> (CurvaturePackage, HypersurfaceData) {
    let data = HypersurfaceData::new(m, h, eps, kt).unwrap();
    (gauss_package(&data).unwrap(), data)
}

fn euclid(h: &[f64], kt: f64) -> (CurvaturePackage, HypersurfaceData) {
    hyp(MetricPoint::euclidean(h.len()), Sym2::diag(h), 1.0, kt)
}

fn run_hyp((pkg, data): &(CurvaturePackage, HypersurfaceData)) -> Vec<AuditOutcome> {
    let cx = AuditContext::for_hypersurface(pkg, data.clone(), Tolerances::default());
    run_audits(&cx, None).unwrap()
}

fn chart(kind: &str, kv: &[(&str, f64)], x: &[f64]) -> Vec<AuditOutcome> {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let ch = build_chart(kind, &params).unwrap();
    let pkg = curvature_at(&ch, x).unwrap();
    let cx = AuditContext::new(&pkg, Provenance::Chart(ch.kind().clone(), x.to_vec()), Tolerances::default());
    run_audits(&cx, None).unwrap()
}

fn get<'a>(v: &'a [AuditOutcome], name: &str) -> &'a AuditOutcome {
    v.iter().find(|o| o.name == name).unwrap()
}

fn cases() -> Vec<(String, Vec<AuditOutcome>)> {
    let mut cases: Vec<(String, Vec<AuditOutcome>)> = Vec::new();
    cases.push(("rank2".into(), run_hyp(&euclid(&[2.0, 3.0, 0.0, 0.0, 0.0], 0.0))));
    cases.push(("rank2_kt".into(), run_hyp(&euclid(&[2.0, 3.0, 0.0, 0.0, 0.0], 7.0))));
    cases.push(("pm".into(), run_hyp(&euclid(&[1.0, 1.0, -1.0, -1.0, 0.0], 0.0))));
    cases.push(("ex49".into(), run_hyp(&euclid(&[1.0, 1.0, -1.0, -1.0, 2.0], 0.0))));
    cases.push(("two".into(), run_hyp(&euclid(&[2.0, 2.0, 1.0, 1.0, 1.0], 0.0))));
    let l1 = 1.5f64.sqrt();
    cases.push(("clifford_hyp".into(), run_hyp(&euclid(&[l1, l1, -1.0 / l1, -1.0 / l1, -1.0 / l1], 30.0))));
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for i in 0..6 {
        let n = 4 + i % 3;
        let m = random_metric(&mut rng, n, i % 2).unwrap();
        let h = random_sym2(&mut rng, n);
        let eps = if i % 3 == 0 { -1.0 } else { 1.0 };
        cases.push((format!("rand{i}"), run_hyp(&hyp(m, h, eps, (i as f64) - 2.0))));
    }
    cases.push(("jordan".into(), run_hyp(&jordan())));
    let r1 = (2.0f64 / 5.0).sqrt();
    let r2 = (3.0f64 / 5.0).sqrt();
    cases.push((
        "clifford".into(),
        chart("product_spheres", &[("p", 2.0), ("q", 3.0), ("r1", r1), ("r2", r2)], &[0.9, 0.4, 1.1, 0.7, 0.3]),
    ));
    cases.push(("rn3".into(), chart("rn_ds", &[("M", 1.0), ("Q", 1.0), ("Lambda", 0.01)], &[0.1, 3.0, 1.0, 0.2])));
    cases.push(("rn5".into(), chart("rn_ds", &[("M", 0.7), ("Q", 0.5), ("Lambda", -0.02)], &[0.1, 5.0, 1.2, 0.2])));
    cases.push((
        "warped".into(),
        chart(
            "warped_1d_einstein",
            &[("base_sign", -1.0), ("fiber_radius", 1.3), ("a0", 1.0), ("a1", 0.3), ("a2", 0.2)],
            &[0.4, 0.9, 0.5, 1.1, 0.6],
        ),
    ));
    for seed in 0..3 {
        let m = random_metric(&mut rng, 5, seed as usize % 2).unwrap();
        let r = random_algebraic_curvature(seed, &m, 3).unwrap();
        let pkg = weyl_decompose(&r, &m).unwrap();
        let cx = AuditContext::new(&pkg, Provenance::Algebraic, Tolerances::default());
        cases.push((format!("alg{seed}"), run_audits(&cx, None).unwrap()));
    }
    cases
}

fn jordan() -> (CurvaturePackage, HypersurfaceData) {
    let mut g = Sym2::identity(5);
    g.set(0, 0, 0.0);
    g.set(1, 1, 0.0);
    g.set(0, 1, 1.0);
    let mut h = Sym2::zeros(5);
    h.set(1, 1, 1.0);
    h.set(2, 2, 0.7);
    hyp(MetricPoint::new(g).unwrap(), h, 1.0, 0.0)
}

#[test]
fn no_premise_true_conclusion_false() {
    for (label, outs) in cases() {
        for o in &outs {
            assert!(o.passed, "{label}/{}: {:?}", o.name, o.failing(1e-8));
        }
    }
}

#[test]
fn expected_premises_fire() {
    let all = cases();
    let holds = |case: &str, audit: &str| {
        let outs = &all.iter().find(|(l, _)| l == case).unwrap().1;
        get(outs, audit).premise == Premise::Holds
    };
    for a in ["prop41", "prop42", "prop43_ii", "prop43_iii", "thm32_v", "thm44_45", "prop47_ii"] {
        assert!(holds("rank2", a), "rank2 {a}");
    }
    for a in ["remark25_iii_b", "thm48", "thm51", "prop41"] {
        assert!(holds("pm", a), "pm {a}");
    }
    assert!(holds("ex49", "example49_iii"));
    for a in ["thm31", "thm33", "thm34", "thm35"] {
        assert!(holds("two", a), "two {a}");
    }
    assert!(holds("clifford", "example36") && holds("clifford_hyp", "example36"));
    assert!(holds("rn3", "remark25_v") && holds("rn5", "thm24"));
    assert!(holds("warped", "remark25_warped"));
    assert!(holds("jordan", "thm48"));
    assert!(!holds("alg0", "thm24"));
}

#[test]
fn hypersurface_audits_skip_chart_packages() {
    let all = cases();
    let outs = &all.iter().find(|(l, _)| l == "clifford").unwrap().1;
    for spec in registry().iter().filter(|s| s.scope == Scope::Hypersurface) {
        assert_eq!(get(outs, spec.name).premise, Premise::NotApplicable, "{}", spec.name);
    }
}

#[test]
fn reference_deviations_are_reported() {
    let pm = run_hyp(&euclid(&[1.0, 1.0, -1.0, -1.0, 0.0], 0.0));
    let t48 = get(&pm, "thm48");
    assert!(t48.constants["qqee03_reference_deviation"] > 1e-2);
    let rank2 = run_hyp(&euclid(&[2.0, 3.0, 0.0, 0.0, 0.0], 0.0));
    let p = get(&rank2, "prop43_iii");
    assert!((p.constants["phi_reference"] + 1.0 / 6.0).abs() < 1e-12);
    assert!((p.constants["phi_fit"] - 1.0 / 6.0).abs() < 1e-10);
    assert!(get(&rank2, "prop42_ii").constants["beta1_reference_deviation"] > 0.5);
}

#[test]
fn claims_and_lookup() {
    let (pkg, data) = euclid(&[1.0, 1.0, -1.0, -1.0, 0.0], 0.0);
    let cx = AuditContext::for_hypersurface(&pkg, data, Tolerances::default());
    let star = run_claim(&cx, "condition_star").unwrap();
    assert!(!star.passed && star.residuals["condition_star"] > 1e-4);
    assert!(run_claim(&cx, "quasi_einstein").unwrap().passed);
    assert!(run_claim(&cx, "bogus").is_err());
    assert!(find_audit("thm48").is_ok() && find_audit("nope").is_err());
    let names = vec!["prop41".to_string(), "thm48".to_string()];
    assert_eq!(run_audits(&cx, Some(&names)).unwrap().len(), 2);
    assert_eq!(audit_names().len(), registry().len());
}
