//! Seeded generators for algebra elements, module vectors and operators.
//!
//! The corpus operators have controlled singular values in `[0.3, 3]` per
//! block (plus exact zeros for rank deficiency), so identity residuals are
//! governed by roundoff rather than by conditioning.

use nalgebra::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use num_traits::One;

use crate::funbackend::{DiagOperator, Domain1D, Interval, Piece, Poly, PwRational, QPoly, Q};
use crate::hilbmod::{ModuleVector, OperatorMatrix};
use crate::matalg::{eigen, AlgElement, BlockProfile, CMat, C64};

pub type SeededRng = ChaCha8Rng;

/// Profiles the randomized suites draw from.
pub const CORPUS_PROFILES: [&[usize]; 4] = [&[1], &[2], &[1, 2], &[2, 3]];

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_profile(rng: &mut impl Rng) -> BlockProfile {
    let sizes = CORPUS_PROFILES.choose(rng).expect("nonempty");
    BlockProfile::new(sizes.to_vec()).expect("static profiles are valid")
}

pub fn random_element(rng: &mut impl Rng, profile: &BlockProfile) -> AlgElement {
    let blocks = profile
        .sizes()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n))
        .collect();
    AlgElement::new(profile.clone(), blocks).expect("shapes follow the profile")
}

pub fn random_hermitian(rng: &mut impl Rng, profile: &BlockProfile) -> AlgElement {
    let a = random_element(rng, profile);
    a.add(&a.star()).expect("same profile")
}

pub fn random_vector(rng: &mut impl Rng, profile: &BlockProfile, rank: usize) -> ModuleVector {
    let entries = (0..rank).map(|_| random_element(rng, profile)).collect();
    ModuleVector::new(profile.clone(), entries).expect("same profile")
}

/// Operator with independent Gaussian entries.
pub fn gaussian_operator(
    rng: &mut impl Rng,
    profile: &BlockProfile,
    domain_rank: usize,
    codomain_rank: usize,
) -> OperatorMatrix {
    let blocks = profile
        .sizes()
        .iter()
        .map(|&n| gaussian_matrix(rng, domain_rank * n, codomain_rank * n))
        .collect();
    OperatorMatrix::from_blocks(profile.clone(), domain_rank, codomain_rank, blocks)
        .expect("shapes follow the profile")
}

/// `rows × r` matrix with orthonormal columns.
pub fn random_isometry(rng: &mut impl Rng, rows: usize, r: usize) -> CMat {
    if r == 0 {
        return CMat::zeros(rows, 0);
    }
    let g = gaussian_matrix(rng, rows, r);
    g.qr().q().columns(0, r).into_owned()
}

/// Operator whose blocks are `U diag(σ) W*` with a random rank (full rank about
/// half the time) and singular values drawn from `[0.3, 3]`.
pub fn conditioned_operator(
    rng: &mut impl Rng,
    profile: &BlockProfile,
    domain_rank: usize,
    codomain_rank: usize,
) -> OperatorMatrix {
    let blocks = profile
        .sizes()
        .iter()
        .map(|&n| {
            let (rows, cols) = (domain_rank * n, codomain_rank * n);
            let full = rows.min(cols);
            let r = if rng.gen_bool(0.5) {
                full
            } else {
                rng.gen_range(0..=full)
            };
            let u = random_isometry(rng, rows, r);
            let w = random_isometry(rng, cols, r);
            let sigma: Vec<f64> = (0..r).map(|_| rng.gen_range(0.3..3.0)).collect();
            u * eigen::real_diagonal(&sigma) * w.adjoint()
        })
        .collect();
    OperatorMatrix::from_blocks(profile.clone(), domain_rank, codomain_rank, blocks)
        .expect("shapes follow the profile")
}

/// Square variant of [`conditioned_operator`] with a Hermitian result.
pub fn conditioned_hermitian(
    rng: &mut impl Rng,
    profile: &BlockProfile,
    rank: usize,
) -> OperatorMatrix {
    let blocks = profile
        .sizes()
        .iter()
        .map(|&n| {
            let d = rank * n;
            let u = random_isometry(rng, d, d);
            let vals: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let h = &u * eigen::real_diagonal(&vals) * u.adjoint();
            (&h + h.adjoint()).map(|z| z * 0.5)
        })
        .collect();
    OperatorMatrix::from_blocks(profile.clone(), rank, rank, blocks).expect("square")
}

/// The randomized operator corpus: profiles from [`CORPUS_PROFILES`], module
/// ranks in `1..=3`.
pub fn corpus(seed: u64, count: usize) -> Vec<OperatorMatrix> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let profile = random_profile(&mut rng);
            let k = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            conditioned_operator(&mut rng, &profile, k, m)
        })
        .collect()
}

fn rational(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Q {
    Q::new(rng.gen_range(lo..=hi).into(), den.into())
}

/// One to three unit-scale intervals with small rational endpoints.
pub fn random_domain(rng: &mut impl Rng) -> Domain1D {
    let count = rng.gen_range(1..=3);
    let mut lo = rational(rng, -4, 4, 2);
    let mut comps = Vec::with_capacity(count);
    for _ in 0..count {
        let hi = &lo + rational(rng, 1, 4, 2);
        comps.push(Interval::new(lo.clone(), hi.clone()).expect("positive length"));
        lo = hi + rational(rng, 1, 2, 2);
    }
    Domain1D::new(comps).expect("sorted and disjoint")
}

/// `c·((x − a)² + b)` with `b, c > 0`: positive on the whole line.
fn positive_poly(rng: &mut impl Rng) -> QPoly {
    let a = rational(rng, -6, 6, 2);
    let b = rational(rng, 1, 4, 4);
    let c = rational(rng, 1, 6, 2);
    let shifted = Poly::linear_root(a);
    shifted.mul(&shifted).add(&Poly::constant(b)).scale(&c)
}

fn positive_den(rng: &mut impl Rng) -> QPoly {
    if rng.gen_bool(0.5) {
        Poly::one()
    } else {
        let shifted = Poly::linear_root(rational(rng, -4, 4, 2));
        shifted.mul(&shifted).add(&Poly::one())
    }
}

/// Pieces of a zero-free function of one sign on `comp`, possibly split in
/// two at the midpoint and possibly with a nonconstant denominator.
fn zero_free_pieces(rng: &mut impl Rng, comp: &Interval) -> Vec<Piece> {
    let sign = if rng.gen_bool(0.5) {
        Q::one()
    } else {
        -Q::one()
    };
    let num = positive_poly(rng).scale(&sign);
    let den = positive_den(rng);
    if rng.gen_bool(0.5) {
        return vec![rational_piece(comp.clone(), &num, &den)];
    }
    let mid = comp.midpoint();
    let bump = Poly::linear_root(mid.clone());
    let k = rational(rng, 1, 4, 2);
    let num2 = num.add(&bump.mul(&bump).mul(&den).scale(&(k * sign)));
    vec![
        rational_piece(
            Interval::new(comp.lo.clone(), mid.clone()).unwrap(),
            &num,
            &den,
        ),
        rational_piece(Interval::new(mid, comp.hi.clone()).unwrap(), &num2, &den),
    ]
}

fn rational_piece(span: Interval, num: &QPoly, den: &QPoly) -> Piece {
    Piece::new(span, num.to_complex(), den.to_complex()).expect("denominator is positive")
}

fn zero_piece(comp: &Interval) -> Piece {
    Piece::polynomial(comp.clone(), Poly::zero())
}

/// Pieces on `comp` with a zero that is not a whole component: an isolated
/// rational root, or a zero interval ending inside the component.
fn rooted_pieces(rng: &mut impl Rng, comp: &Interval) -> Vec<Piece> {
    let width = &comp.hi - &comp.lo;
    let g = positive_poly(rng);
    match rng.gen_range(0..3) {
        0 | 1 => {
            let t = rational(rng, 0, 8, 8);
            let r = &comp.lo + width * t;
            let mut root = Poly::linear_root(r);
            if rng.gen_bool(0.3) {
                root = root.mul(&root);
            }
            vec![rational_piece(
                comp.clone(),
                &root.mul(&g),
                &positive_den(rng),
            )]
        }
        _ => {
            let t = rational(rng, 1, 7, 8);
            let beta = &comp.lo + width * t;
            let left = Interval::new(comp.lo.clone(), beta.clone()).unwrap();
            let right = Interval::new(beta.clone(), comp.hi.clone()).unwrap();
            let ramp = Poly::linear_root(beta);
            if rng.gen_bool(0.5) {
                vec![
                    zero_piece(&left),
                    rational_piece(right, &ramp.mul(&g), &Poly::one()),
                ]
            } else {
                vec![
                    rational_piece(left, &ramp.mul(&g).neg(), &Poly::one()),
                    zero_piece(&right),
                ]
            }
        }
    }
}

/// A real function whose zero set is a union of whole components.
pub fn component_constant_function(rng: &mut impl Rng, domain: &Domain1D) -> PwRational {
    let pieces = domain
        .components()
        .iter()
        .map(|c| {
            if rng.gen_bool(0.3) {
                vec![zero_piece(c)]
            } else {
                zero_free_pieces(rng, c)
            }
        })
        .collect();
    PwRational::new(domain.clone(), pieces).expect("continuous by construction")
}

/// A real function with a zero in the closure of its support.
pub fn rooted_function(rng: &mut impl Rng, domain: &Domain1D) -> PwRational {
    let n = domain.components().len();
    let hit = rng.gen_range(0..n);
    let pieces = domain
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == hit {
                rooted_pieces(rng, c)
            } else if rng.gen_bool(0.3) {
                vec![zero_piece(c)]
            } else {
                zero_free_pieces(rng, c)
            }
        })
        .collect();
    PwRational::new(domain.clone(), pieces).expect("continuous by construction")
}

/// Diagonal operator of rank `1..=3` with at least one rooted entry.
pub fn rooted_diag(rng: &mut impl Rng) -> DiagOperator {
    let domain = random_domain(rng);
    let rank = rng.gen_range(1..=3);
    let bad = rng.gen_range(0..rank);
    let entries = (0..rank)
        .map(|i| {
            if i == bad {
                rooted_function(rng, &domain)
            } else {
                component_constant_function(rng, &domain)
            }
        })
        .collect();
    DiagOperator::new(domain, entries).expect("real entries")
}

/// Diagonal operator of rank `1..=3` whose entries vanish only on whole components.
pub fn clopen_diag(rng: &mut impl Rng) -> DiagOperator {
    let domain = random_domain(rng);
    let rank = rng.gen_range(1..=3);
    let entries = (0..rank)
        .map(|_| component_constant_function(rng, &domain))
        .collect();
    DiagOperator::new(domain, entries).expect("real entries")
}
