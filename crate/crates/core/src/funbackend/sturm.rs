//! Sturm chains and exact rational root extraction.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::field::Q;
use super::poly::{sign, QPoly};
use crate::error::{Error, Result};

/// Sturm chain of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain(Vec<QPoly>);

impl SturmChain {
    pub fn new(p: &QPoly) -> Self {
        let p = p.square_free();
        let mut chain = vec![p.clone()];
        let mut prev = p.clone();
        let mut cur = p.derivative();
        while !cur.is_zero() {
            chain.push(cur.clone());
            let next = prev.rem(&cur).neg();
            prev = cur;
            cur = next;
        }
        SturmChain(chain)
    }

    /// Sign changes of the chain evaluated at `x`, zeros skipped.
    pub fn variations(&self, x: &Q) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.0 {
            let s = sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    fn base(&self) -> &QPoly {
        &self.0[0]
    }

    /// Distinct roots in the half-open interval `(lo, hi]`.
    pub fn count_left_open(&self, lo: &Q, hi: &Q) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }

    /// Distinct roots in the closed interval `[lo, hi]`.
    pub fn count_closed(&self, lo: &Q, hi: &Q) -> usize {
        self.count_left_open(lo, hi) + usize::from(self.base().eval(lo).is_zero())
    }

    /// Distinct roots in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: &Q, hi: &Q) -> usize {
        self.count_left_open(lo, hi) - usize::from(self.base().eval(hi).is_zero())
    }
}

/// Number of distinct real roots of `p` in the half-open interval `[lo, hi)`.
pub fn sturm_count(p: &QPoly, lo: &Q, hi: &Q) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if lo >= hi {
        return Ok(0);
    }
    let chain = SturmChain::new(p);
    let at = |x: &Q| usize::from(p.eval(x).is_zero());
    Ok(chain.count_left_open(lo, hi) + at(lo) - at(hi))
}

/// Distinct real roots of `p` in `[lo, hi]`, all of which must be rational.
///
/// Roots are isolated by Sturm bisection until the bracket is narrower than
/// `1/L²` (`L` the leading coefficient of the primitive integer form); a
/// rational root `p/q` has `q | L`, so it must then be the simplest fraction
/// in the bracket. Any root that fails this test is irrational.
pub fn rational_roots(p: &QPoly, lo: &Q, hi: &Q) -> Result<Vec<Q>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sf = p.square_free();
    if sf.is_constant() {
        return Ok(vec![]);
    }
    let ints = sf.primitive_integer();
    let lead = ints.last().expect("nonconstant").abs();
    let width = Q::new(BigInt::one(), &lead * &lead);
    let chain = SturmChain::new(&sf);

    let mut roots = Vec::new();
    for end in [lo, hi] {
        if sf.eval(end).is_zero() && !roots.contains(end) {
            roots.push(end.clone());
        }
    }
    let mut stack = vec![(lo.clone(), hi.clone(), chain.count_open(lo, hi))];
    while let Some((a, b, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 && &b - &a < width {
            let candidate = simplest_between(&a, &b);
            if sf.eval(&candidate).is_zero() {
                roots.push(candidate);
                continue;
            }
            return Err(Error::UnsupportedIrrationalRoot {
                lo: a.to_string(),
                hi: b.to_string(),
            });
        }
        let mid = (&a + &b) / Q::from_integer(BigInt::from(2));
        let mid_root = sf.eval(&mid).is_zero();
        if mid_root {
            roots.push(mid.clone());
        }
        let left = chain.count_open(&a, &mid);
        let right = n - left - usize::from(mid_root);
        stack.push((a, mid.clone(), left));
        stack.push((mid, b, right));
    }
    roots.sort();
    Ok(roots)
}

/// The fraction with smallest denominator (then smallest magnitude) in `[a, b]`.
pub fn simplest_between(a: &Q, b: &Q) -> Q {
    debug_assert!(a <= b);
    if !a.is_positive() && !b.is_negative() {
        return Q::zero();
    }
    if b.is_negative() {
        return -simplest_between(&-b.clone(), &-a.clone());
    }
    let fl = a.floor();
    if &fl == a {
        return a.clone();
    }
    let next = &fl + Q::one();
    if &next <= b {
        return next;
    }
    let inner = simplest_between(&(b - &fl).recip(), &(a - &fl).recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funbackend::poly::Poly;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn qp(c: &[(i64, i64)]) -> QPoly {
        Poly::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn sturm_examples() {
        // x² - 1 on [0, 2): root 1
        assert_eq!(
            sturm_count(&qp(&[(-1, 1), (0, 1), (1, 1)]), &q(0, 1), &q(2, 1)).unwrap(),
            1
        );
        // x² + 1 on [0, 1)
        assert_eq!(
            sturm_count(&qp(&[(1, 1), (0, 1), (1, 1)]), &q(0, 1), &q(1, 1)).unwrap(),
            0
        );
        // x (x - 1/2)(x - 2) on [0, 1): roots 0 and 1/2
        let p = qp(&[(0, 1), (1, 1)])
            .mul(&qp(&[(-1, 2), (1, 1)]))
            .mul(&qp(&[(-2, 1), (1, 1)]));
        assert_eq!(sturm_count(&p, &q(0, 1), &q(1, 1)).unwrap(), 2);
        assert!(matches!(
            sturm_count(&Poly::zero(), &q(0, 1), &q(1, 1)),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn multiple_roots_counted_once() {
        let p = qp(&[(-1, 3), (1, 1)]).mul(&qp(&[(-1, 3), (1, 1)]));
        assert_eq!(sturm_count(&p, &q(0, 1), &q(1, 1)).unwrap(), 1);
    }

    #[test]
    fn rational_roots_found() {
        let p = qp(&[(0, 1), (1, 1)])
            .mul(&qp(&[(-1, 2), (1, 1)]))
            .mul(&qp(&[(-7, 3), (1, 1)]))
            .mul(&qp(&[(2, 5), (1, 1)]));
        assert_eq!(
            rational_roots(&p, &q(-1, 1), &q(3, 1)).unwrap(),
            vec![q(-2, 5), q(0, 1), q(1, 2), q(7, 3)]
        );
        assert_eq!(
            rational_roots(&p, &q(0, 1), &q(1, 2)).unwrap(),
            vec![q(0, 1), q(1, 2)]
        );
    }

    #[test]
    fn irrational_root_rejected() {
        let p = qp(&[(-2, 1), (0, 1), (1, 1)]);
        assert!(matches!(
            rational_roots(&p, &q(0, 1), &q(2, 1)),
            Err(Error::UnsupportedIrrationalRoot { .. })
        ));
        // √2 outside [0, 1]
        assert!(rational_roots(&p, &q(0, 1), &q(1, 1)).unwrap().is_empty());
    }

    #[test]
    fn simplest_fraction() {
        assert_eq!(simplest_between(&q(1, 3), &q(1, 2)), q(1, 2));
        assert_eq!(simplest_between(&q(3, 10), &q(7, 20)), q(1, 3));
        assert_eq!(simplest_between(&q(-7, 20), &q(-3, 10)), q(-1, 3));
        assert_eq!(simplest_between(&q(-1, 5), &q(1, 7)), q(0, 1));
        assert_eq!(simplest_between(&q(5, 2), &q(7, 2)), q(3, 1));
    }
}
