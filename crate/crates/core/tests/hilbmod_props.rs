use proptest::prelude::*;
use rand::Rng;
use regpolar::hilbmod::{
    decompose, inner_product, kernel_projection, range_projection, OperatorMatrix,
    ProjectionOperator, Submodule,
};
use regpolar::random;
use regpolar::Tolerances;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn inner_product_is_positive_and_hermitian(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let k = rng.gen_range(1..=3);
        let x = random::random_vector(&mut rng, &profile, k);
        let y = random::random_vector(&mut rng, &profile, k);
        prop_assert!(inner_product(&x, &x).unwrap().is_positive(&tol));
        let xy = inner_product(&x, &y).unwrap();
        let yx = inner_product(&y, &x).unwrap();
        prop_assert!(xy.sub(&yx.star()).unwrap().norm() <= 1e-12 * (1.0 + xy.norm()));
    }

    #[test]
    fn module_norm_triangle_inequality(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let k = rng.gen_range(1..=3);
        let x = random::random_vector(&mut rng, &profile, k);
        let y = random::random_vector(&mut rng, &profile, k);
        prop_assert!(x.add(&y).unwrap().norm() <= x.norm() + y.norm() + 1e-10);
    }

    #[test]
    fn operators_are_module_maps(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let b = random::gaussian_operator(&mut rng, &profile, k, m);
        let x = random::random_vector(&mut rng, &profile, k);
        let y = random::random_vector(&mut rng, &profile, m);
        let a = random::random_element(&mut rng, &profile);

        let lhs = b.apply(&x.left_mul(&a).unwrap()).unwrap();
        let rhs = b.apply(&x).unwrap().left_mul(&a).unwrap();
        let scale = 1.0 + a.norm() * b.norm() * x.norm();
        for (l, r) in lhs.entries().iter().zip(rhs.entries()) {
            prop_assert!(l.sub(r).unwrap().norm() <= 1e-12 * scale);
        }

        let bxy = inner_product(&b.apply(&x).unwrap(), &y).unwrap();
        let xby = inner_product(&x, &b.adjoint().apply(&y).unwrap()).unwrap();
        prop_assert!(bxy.sub(&xby).unwrap().norm() <= 1e-10 * (1.0 + b.norm() * x.norm() * y.norm()));
        prop_assert_eq!(b.adjoint().adjoint(), b);
    }

    #[test]
    fn composition_is_associative_and_reverses_adjoints(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let r: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=3)).collect();
        let a = random::gaussian_operator(&mut rng, &profile, r[0], r[1]);
        let b = random::gaussian_operator(&mut rng, &profile, r[1], r[2]);
        let c = random::gaussian_operator(&mut rng, &profile, r[2], r[3]);
        let scale = 1.0 + a.norm() * b.norm() * c.norm();
        let left = a.then(&b).unwrap().then(&c).unwrap();
        let right = a.then(&b.then(&c).unwrap()).unwrap();
        prop_assert!(left.distance(&right) <= 1e-12 * scale);
        let adj = a.then(&b).unwrap().adjoint();
        let rev = b.adjoint().then(&a.adjoint()).unwrap();
        prop_assert!(adj.distance(&rev) <= 1e-12 * scale);
    }

    #[test]
    fn range_and_kernel_projections(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let (k, m) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let b = random::conditioned_operator(&mut rng, &profile, k, m);
        let ran = range_projection(&b, &tol).unwrap();
        let (sa, idem) = ProjectionOperator::defects(ran.operator()).unwrap();
        prop_assert!(sa <= 1e-8 && idem <= 1e-8);
        prop_assert!(b.then(ran.operator()).unwrap().distance(&b) <= 1e-8);

        let ker = kernel_projection(&b, &tol).unwrap();
        let co = range_projection(&b.adjoint(), &tol).unwrap();
        let sum = ker.operator().add(co.operator()).unwrap();
        prop_assert!(sum.distance(&OperatorMatrix::identity(&profile, k)) <= 1e-8);
        prop_assert!(ker.operator().then(&b).unwrap().norm() <= 1e-8 * (1.0 + b.norm()));
    }

    #[test]
    fn submodule_decomposition_is_orthogonal(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = random::rng(seed);
        let profile = random::random_profile(&mut rng);
        let k = rng.gen_range(1..=3);
        let g = rng.gen_range(1..=3);
        let gens: Vec<_> = (0..g).map(|_| random::random_vector(&mut rng, &profile, k)).collect();
        let s = Submodule::generated_by(&profile, k, &gens, &tol).unwrap();
        // bases are stored as orthonormal rows
        for basis in s.bases() {
            let r = basis.nrows();
            prop_assert!((basis * basis.adjoint() - regpolar::matalg::CMat::identity(r, r)).norm() <= 1e-10);
        }
        let (p, q) = decompose(k, &s).unwrap();
        let sum = p.operator().add(q.operator()).unwrap();
        prop_assert!(sum.distance(&OperatorMatrix::identity(&profile, k)) <= 1e-12);
        let x = random::random_vector(&mut rng, &profile, k);
        let y = random::random_vector(&mut rng, &profile, k);
        let px = p.operator().apply(&x).unwrap();
        let qy = q.operator().apply(&y).unwrap();
        prop_assert!(inner_product(&px, &qy).unwrap().norm() <= 1e-10 * (1.0 + x.norm() * y.norm()));
    }
}
