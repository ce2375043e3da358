use proptest::prelude::*;
use sphct_cterm::exppoly::{expfit, ExpPolynomial, ExpTerm};
use sphct_cterm::linalg::{c, op_norm, C};
use sphct_cterm::rapidfit::{fit_rate, DecayFamily};
use sphct_cterm::spectral::{elambda_growth_check, joint_spectrum, Class};
use sphct_cterm::synthetic::{RandomSystem, StagedSystem};
use sphct_cterm::transport::{constant_term_ray, phi_lambda_infty, ray_from_limits};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_data_are_consistent(seed in 0u64..10_000, rank in 1usize..=2, dim in 1usize..=6) {
        let rs = RandomSystem::seeded(seed, rank, dim).unwrap();
        let sp = joint_spectrum(&rs.system).unwrap();
        prop_assert!(sp.checks.passed(), "{:?}", sp.checks);
        let total: usize = sp.exponents.iter().map(|e| e.rank).sum();
        prop_assert_eq!(total, dim);
        let samples: Vec<Vec<f64>> = rs.system.cone.samples().cloned().collect();
        for e in &sp.exponents {
            prop_assert!(elambda_growth_check(e, &samples).1);
        }
    }

    #[test]
    fn expfit_recovers_synthesized_polynomials(
        freqs in proptest::collection::vec(-2.0f64..2.0, 1..4),
        decay in proptest::collection::vec(-0.3f64..0.0, 4),
        coef in proptest::collection::vec(0.5f64..2.0, 4),
    ) {
        // keep frequencies separated
        let mut fs = freqs.clone();
        fs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assume!(fs.windows(2).all(|w| w[1] - w[0] > 0.3));
        let terms: Vec<ExpTerm> = fs.iter().enumerate().map(|(k, f)| ExpTerm { exponent: C::new(decay[k], *f), poly: vec![c(coef[k])] }).collect();
        let p = ExpPolynomial::new(terms);
        let h = 0.1;
        let y: Vec<C> = (0..120).map(|i| p.eval(i as f64 * h)).collect();
        let fit = expfit(0.0, h, &y, 8).unwrap();
        prop_assert_eq!(fit.poly.order(), p.order());
        for (a, b) in fit.poly.terms.iter().zip(&p.terms) {
            prop_assert!((a.exponent - b.exponent).norm() < 1e-6);
            prop_assert!((a.poly[0] - b.poly[0]).norm() < 1e-5);
        }
    }

    #[test]
    fn fit_rate_ignores_linear_change_of_norm(eps in 0.5f64..3.0, m in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let g: Vec<f64> = (0..24).map(|i| i as f64 * 0.25).collect();
        let pts = g.iter().map(|&s| vec![2.0 + (-eps * s).exp(), -1.0 + 0.3 * (-eps * s).exp()]).collect();
        let fam = DecayFamily::new("x", g, pts, vec![2.0, -1.0]).unwrap();
        let mat = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0 + m[0], m[1], m[2], 2.0 + m[3]]);
        let a = fit_rate(&fam).unwrap();
        let b = fit_rate(&fam.mapped(&mat)).unwrap();
        prop_assert!(a.is_rapid && b.is_rapid);
        prop_assert!((a.epsilon - b.epsilon).abs() <= 0.01 * a.epsilon);
    }

    #[test]
    fn sum_of_rapid_families_is_rapid(ex in 0.5f64..3.0, ey in 0.5f64..3.0) {
        let g: Vec<f64> = (0..24).map(|i| i as f64 * 0.25).collect();
        let fam = |e: f64, l: f64| DecayFamily::new("x", g.clone(), g.iter().map(|&s| vec![l + (-e * s).exp()]).collect(), vec![l]).unwrap();
        let x = fam(ex, 1.0);
        let y = fam(ey, -3.0);
        let sum_pts = x.points.iter().zip(&y.points).map(|(a, b)| vec![a[0] + b[0] - y.limit[0]]).collect();
        let sum = DecayFamily::new("x+y", g.clone(), sum_pts, x.limit.clone()).unwrap();
        let (fx, fy, fs) = (fit_rate(&x).unwrap(), fit_rate(&y).unwrap(), fit_rate(&sum).unwrap());
        prop_assert!(fx.is_rapid && fy.is_rapid && fs.is_rapid);
        prop_assert!(fs.epsilon >= 0.95 * fx.epsilon.min(fy.epsilon));
    }
}

#[test]
fn staged_constant_terms_are_transitive() {
    let st = StagedSystem::standard();
    let a = [0.15, -0.25];
    let x = [-1.0, -0.6];
    let t: Vec<f64> = (0..12).map(|i| 0.3 * i as f64).collect();
    let phi = st.exact(&a);
    let full = st.system(&[], None).unwrap();
    let sp = joint_spectrum(&full).unwrap();
    let direct = constant_term_ray(&full, &sp, &phi, &a, &x).unwrap();
    for j in [vec![0usize], vec![1]] {
        let sys_j = st.system(&j, None).unwrap();
        let sp_j = joint_spectrum(&sys_j).unwrap();
        let mut phi_j = sphct_cterm::linalg::CVec::zeros(6);
        for e in sp_j.of_class(Class::Zero) {
            phi_j += phi_lambda_infty(&sys_j, e, &phi, &a).unwrap();
        }
        let hom = st.system(&[], Some(&j)).unwrap();
        let sp_hom = joint_spectrum(&hom).unwrap();
        let limits: Vec<(usize, _)> = sp_hom
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| e.class == Class::Zero)
            .map(|(k, e)| (k, phi_lambda_infty(&hom, e, &phi_j, &a).unwrap()))
            .collect();
        let iterated = ray_from_limits(&hom, &sp_hom, &limits, &x);
        for &ti in &t {
            let y = [a[0] + ti * x[0], a[1] + ti * x[1]];
            let truth = st.constant_term_truth(&[], &y);
            assert!((direct.eval(ti) - truth).norm() < 1e-8, "direct at {ti}");
            assert!((iterated.eval(ti) - truth).norm() < 1e-8, "iterated via {j:?} at {ti}");
        }
    }
}

#[test]
fn q0_projector_norms_stay_bounded() {
    let rs = RandomSystem::seeded(11, 2, 6).unwrap();
    let sp = joint_spectrum(&rs.system).unwrap();
    for e in &sp.exponents {
        assert!(op_norm(&e.projector) < 1e6);
    }
}
