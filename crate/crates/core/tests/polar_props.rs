use proptest::prelude::*;
use rand::Rng;
use regpolar::hilbmod::range_projection;
use regpolar::polar::{polar_matrix, verify_thm31, PolarDecomposition};
use regpolar::random;
use regpolar::Tolerances;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn matrix_verdicts_all_true(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let t = random::conditioned_operator(&mut rng, &profile, k, m);
        let r = verify_thm31(&t.into(), &tol).unwrap();
        prop_assert!(r.verdicts_agree());
        prop_assert!(r.cond_i && r.cond_ii && r.cond_iii);
        prop_assert!(r.certificate.is_none());
        prop_assert!(r.max_residual() <= 1e-8, "{:?}", r.residuals);
    }

    #[test]
    fn isometry_is_unique(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let t = random::conditioned_operator(&mut rng, &profile, k, m);
        let r = verify_thm31(&t.into(), &tol).unwrap();
        prop_assert!(r.residuals["V unique"] <= 1e-8);
        prop_assert!(r.residuals["s dual agreement"] <= 1e-8);
    }

    #[test]
    fn initial_and_final_projections(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let t = random::conditioned_operator(&mut rng, &profile, k, m);
        let p = polar_matrix(&t, &tol).unwrap();
        let initial = range_projection(&t.adjoint(), &tol).unwrap();
        let final_ = range_projection(&t, &tol).unwrap();
        prop_assert!(p.initial.distance(initial.operator()) <= 1e-8);
        prop_assert!(p.final_projection.distance(final_.operator()) <= 1e-8);
        prop_assert!(p.abs_t.then(&p.v).unwrap().distance(&t) <= 1e-8 * (1.0 + t.norm()));
    }

    #[test]
    fn rank_deficient_operators_decompose(seed in any::<u64>()) {
        // the zero operator and products through a thinner module
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let a = random::conditioned_operator(&mut rng, &profile, k, 1);
        let b = random::conditioned_operator(&mut rng, &profile, 1, m);
        let t = a.then(&b).unwrap();
        let r = verify_thm31(&t.into(), &tol).unwrap();
        prop_assert!(r.cond_i && r.cond_ii && r.cond_iii);
        prop_assert!(matches!(r.polar, Some(PolarDecomposition::Matrix(_))));
    }
}

#[test]
fn zero_operator_convention() {
    use regpolar::hilbmod::OperatorMatrix;
    use regpolar::matalg::BlockProfile;
    use regpolar::polar::{generalized_inverse, InverseDatum};

    let tol = Tolerances::default();
    let profile = BlockProfile::new(vec![1, 2]).unwrap();
    for (k, m) in [(2, 3), (0, 2), (2, 0)] {
        let t = OperatorMatrix::zero(&profile, k, m);
        let r = verify_thm31(&t.clone().into(), &tol).unwrap();
        assert!(r.cond_i && r.cond_ii && r.cond_iii, "{k}->{m}");
        assert!(r.max_residual() <= 1e-12);
        let p = polar_matrix(&t, &tol).unwrap();
        assert_eq!(p.v, t);
        assert_eq!(p.abs_t.norm(), 0.0);
        let InverseDatum::Matrix(s) = generalized_inverse(&t.clone().into(), &tol).unwrap().s
        else {
            panic!("matrix inverse expected");
        };
        assert_eq!(s, t.adjoint());
    }
}
