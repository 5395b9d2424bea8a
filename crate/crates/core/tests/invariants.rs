use curvlab_core::derived::Derived;
use curvlab_core::hypersurface::gauss_contraction_residuals;
use curvlab_core::{
    classify, condition_star_residual, fit_roter, fit_span, gauss_package, prop22_residual, random_metric,
    random_sym2, res, res0, ricci, seeded_algebraic_package, weyl_decompose, CurvTensor, HypersurfaceData,
    MetricPoint, Sym2, Tolerances,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hypersurface(seed: u64, n: usize, s: usize, eps: f64, kt: f64) -> HypersurfaceData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_metric(&mut rng, n, s).unwrap();
    HypersurfaceData::new(m, random_sym2(&mut rng, n), eps, kt).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn algebraic_packages_have_curvature_symmetries(seed in any::<u64>(), n in 4usize..=6, s in 0usize..=1, terms in 1usize..=4) {
        let pkg = seeded_algebraic_package(seed, n, s, terms).unwrap();
        prop_assert!(pkg.r.symmetry_defects().max() <= 1e-12);
        prop_assert!(pkg.c.symmetry_defects().max() <= 1e-12);
        prop_assert!(res0(&ricci(&pkg.c, &pkg.metric)) <= 1e-12);
        prop_assert!(prop22_residual(&pkg).unwrap() <= 1e-10);
    }

    #[test]
    fn gauss_contractions_match(seed in any::<u64>(), n in 4usize..=6, s in 0usize..=1, neg in any::<bool>(), kt in -10.0f64..40.0) {
        let h = hypersurface(seed, n, s, if neg { -1.0 } else { 1.0 }, kt);
        let pkg = gauss_package(&h).unwrap();
        let (rs, rk) = gauss_contraction_residuals(&h, &pkg);
        prop_assert!(rs <= 1e-10 && rk <= 1e-10);
    }

    #[test]
    fn span_fit_is_scale_equivariant(seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let pkg = seeded_algebraic_package(seed, 5, 0, 2).unwrap();
        let d = Derived::new(&pkg);
        let target: CurvTensor = &(2.0 * d.g_s()) - &(0.75 * d.s_s());
        let basis = [d.s_s().tensor(), d.g_s().tensor(), d.big_g().tensor()];
        let f1 = fit_span(target.tensor(), &basis, 1e-8).unwrap();
        let f2 = fit_span(&target.tensor().scaled(lambda), &basis, 1e-8).unwrap();
        prop_assert!(f1.exact && f2.exact);
        for i in 0..3 {
            prop_assert!((f2.coef(i) - lambda * f1.coef(i)).abs() <= 1e-7 * (1.0 + lambda * f1.coef(i).abs()));
        }
        prop_assert!((f1.coef(0) + 0.75).abs() < 1e-8 && (f1.coef(1) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn roter_scalars_rescale_with_curvature(lambda in 0.1f64..10.0) {
        // Clifford-type product S^2 x S^3 is Roter; scaling R by λ sends (φ, μ, η) to (φ/λ, μ, λη).
        let n = 5;
        let m = MetricPoint::euclidean(n);
        let mut r = CurvTensor::zeros(n);
        for (off, dim, r2) in [(0, 2, 0.4), (2, 3, 0.6)] {
            let mut dg = vec![0.0; n];
            dg[off..off + dim].iter_mut().for_each(|x| *x = 1.0);
            let gb = Sym2::diag(&dg);
            r += &((0.5 / r2) * gb.kn(&gb));
        }
        let tol = Tolerances::default();
        let a = fit_roter(&weyl_decompose(&r, &m).unwrap(), &tol);
        let b = fit_roter(&weyl_decompose(&(lambda * &r), &m).unwrap(), &tol);
        prop_assert!((b.phi * lambda - a.phi).abs() <= 1e-7 * a.phi.abs());
        prop_assert!((b.mu - a.mu).abs() <= 1e-7 * a.mu.abs());
        prop_assert!((b.eta / lambda - a.eta).abs() <= 1e-7 * a.eta.abs());
    }

    #[test]
    fn weyl_decomposition_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let pkg = seeded_algebraic_package(seed, 5, 1, 2).unwrap();
        let scaled = weyl_decompose(&(a * &pkg.r), &pkg.metric).unwrap();
        prop_assert!(res(&scaled.c, &(a * &pkg.c)) <= 1e-12);
        prop_assert!((scaled.kappa - a * pkg.kappa).abs() <= 1e-10 * (1.0 + pkg.kappa.abs()));
    }
}

#[test]
fn space_forms_are_trivial_for_every_condition() {
    let tol = Tolerances::default();
    for s in 0..=1 {
        let m = MetricPoint::pseudo_euclidean(5, s).unwrap();
        let pkg = weyl_decompose(&(0.7 * &m.big_g()), &m).unwrap();
        let rep = classify(&pkg, &tol);
        assert!(!rep.in_u_s && !rep.in_u_c && !rep.in_u_r && rep.u_sets_consistent);
        assert!(rep.einstein);
        assert!(condition_star_residual(&pkg).unwrap() <= 1e-12);
        assert!(res0(Derived::new(&pkg).rr()) <= 1e-12);
    }
}

#[test]
fn condition_star_is_invariant_under_curvature_scaling() {
    for seed in 0..5 {
        let pkg = seeded_algebraic_package(seed, 5, 0, 3).unwrap();
        let scaled = weyl_decompose(&(3.5 * &pkg.r), &pkg.metric).unwrap();
        let a = condition_star_residual(&pkg).unwrap();
        let b = condition_star_residual(&scaled).unwrap();
        assert!(a > 1e-6);
        assert!((a - b).abs() <= 1e-6 * a.max(b), "{a} vs {b}");
    }
}
