use num_bigint::BigInt;
use proptest::prelude::*;
use regpolar::funbackend::{
    diag_identities, diag_pinv, diag_polar, pw_abs, pw_recip_support, pw_sign_support, shifted_x,
    zero_set, DiagOperator, Domain1D, PwRational, Q,
};
use regpolar::polar::{closed_range_suite, verify_thm31, Operator};
use regpolar::random;
use regpolar::Tolerances;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Rebuilding from the pieces re-runs the exact breakpoint agreement check.
fn continuous(f: &PwRational) -> bool {
    PwRational::new(f.domain().clone(), f.pieces().to_vec()).is_ok()
}

fn unit() -> Domain1D {
    Domain1D::interval(q(0, 1), q(1, 1)).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn interior_root_is_rejected(num in 0i64..=12, den in 1i64..=12) {
        prop_assume!(num <= den);
        let tol = Tolerances::default();
        let root = q(num, den);
        let d = DiagOperator::new(unit(), vec![shifted_x(&unit(), root.clone())]).unwrap();
        let r = verify_thm31(&d.into(), &tol).unwrap();
        prop_assert!(!r.cond_i && !r.cond_ii && !r.cond_iii);
        prop_assert_eq!(r.certificate.map(|c| c.point), Some(root));
    }

    #[test]
    fn exterior_root_is_accepted_exactly(num in 13i64..=40, den in 1i64..=12) {
        prop_assume!(num > den);
        let tol = Tolerances::default();
        let d = DiagOperator::new(unit(), vec![shifted_x(&unit(), q(num, den))]).unwrap();
        let r = verify_thm31(&d.into(), &tol).unwrap();
        prop_assert!(r.cond_i && r.cond_ii && r.cond_iii);
        prop_assert!(r.residuals.values().all(|&v| v == 0.0));
    }

    #[test]
    fn random_families_follow_the_dichotomy(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let rooted: Operator = random::rooted_diag(&mut rng).into();
        let r = verify_thm31(&rooted, &tol).unwrap();
        prop_assert!(r.verdicts_agree() && !r.cond_i && r.certificate.is_some());

        let clopen: Operator = random::clopen_diag(&mut rng).into();
        let r = verify_thm31(&clopen, &tol).unwrap();
        prop_assert!(r.verdicts_agree() && r.cond_i);

        for op in [&rooted, &clopen] {
            prop_assert!(closed_range_suite(op, &tol).unwrap().consistent);
        }
    }

    #[test]
    fn identities_hold_exactly(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let d = random::clopen_diag(&mut rng);
        let (v, abs_t) = diag_polar(&d).unwrap();
        let s = diag_pinv(&d).unwrap();
        for (name, r) in diag_identities(&d, &v, &abs_t, &s).unwrap() {
            prop_assert!(r == 0.0, "{name}: {r:e}");
        }
    }

    #[test]
    fn operations_stay_continuous(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let d = random::clopen_diag(&mut rng);
        let rooted = random::rooted_diag(&mut rng);
        for f in d.entries().iter().chain(rooted.entries()) {
            prop_assert!(continuous(f));
            prop_assert!(continuous(&f.mul(f).unwrap()));
            prop_assert!(continuous(&f.add(&f.neg()).unwrap()));
            prop_assert!(continuous(&pw_abs(f).unwrap()));
            prop_assert!(pw_abs(f).unwrap().mul(&pw_abs(f).unwrap()).unwrap().equals(&f.mul(f).unwrap()).unwrap());
            prop_assert!(zero_set(f).is_ok());
        }
        for f in d.entries() {
            prop_assert!(continuous(&pw_sign_support(f).unwrap()));
            prop_assert!(continuous(&pw_recip_support(f).unwrap()));
        }
        let (v, abs_t) = diag_polar(&d).unwrap();
        for f in v.entries().iter().chain(abs_t.entries()) {
            prop_assert!(continuous(f));
        }
    }
}
