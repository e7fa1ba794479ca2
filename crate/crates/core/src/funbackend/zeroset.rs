//! Exact zero sets of real piecewise-rational functions.

use std::fmt;

use super::field::Q;
use super::pw::{Interval, PwRational};
use super::sturm::rational_roots;
use crate::error::{Error, Result};

/// A point where a zero set touches the closure of the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// 1-based diagonal entry, when the function is an operator entry.
    pub entry: Option<usize>,
    pub point: Q,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.entry {
            Some(e) => write!(f, "entry {e}, point {}", self.point),
            None => write!(f, "point {}", self.point),
        }
    }
}

/// Zeros of a function on one domain component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentZeros {
    pub component: Interval,
    /// Maximal closed subintervals where the function vanishes identically.
    pub intervals: Vec<Interval>,
    /// Isolated roots, disjoint from `intervals`.
    pub points: Vec<Q>,
}

impl ComponentZeros {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0] == self.component
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSet {
    pub components: Vec<ComponentZeros>,
}

impl ZeroSet {
    pub fn is_empty(&self) -> bool {
        self.components.iter().all(ComponentZeros::is_empty)
    }
}

pub fn zero_set(f: &PwRational) -> Result<ZeroSet> {
    if !f.is_real() {
        return Err(Error::NotReal);
    }
    let mut components = Vec::with_capacity(f.pieces().len());
    for (comp, part) in f.domain().components().iter().zip(f.pieces()) {
        let mut intervals: Vec<Interval> = Vec::new();
        let mut points: Vec<Q> = Vec::new();
        for piece in part {
            if piece.num.is_zero() {
                match intervals.last_mut() {
                    Some(last) if last.hi == piece.span.lo => last.hi = piece.span.hi.clone(),
                    _ => intervals.push(piece.span.clone()),
                }
            } else {
                points.extend(rational_roots(
                    &piece.num.real_part(),
                    &piece.span.lo,
                    &piece.span.hi,
                )?);
            }
        }
        points.sort();
        points.dedup();
        points.retain(|p| !intervals.iter().any(|iv| iv.contains(p)));
        components.push(ComponentZeros {
            component: comp.clone(),
            intervals,
            points,
        });
    }
    Ok(ZeroSet { components })
}

/// Whether `z` is a union of whole components, with a witness point otherwise.
pub fn is_clopen(z: &ZeroSet) -> (bool, Option<Q>) {
    for cz in &z.components {
        if cz.is_empty() || cz.is_whole() {
            continue;
        }
        let mut candidates: Vec<Q> = cz.points.clone();
        for iv in &cz.intervals {
            if iv.lo != cz.component.lo {
                candidates.push(iv.lo.clone());
            }
            if iv.hi != cz.component.hi {
                candidates.push(iv.hi.clone());
            }
        }
        let witness = candidates
            .into_iter()
            .min()
            .expect("a partial zero set has a boundary");
        return (false, Some(witness));
    }
    (true, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funbackend::field::Gq;
    use crate::funbackend::poly::{Poly, QPoly};
    use crate::funbackend::pw::{Domain1D, Piece};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn iv(a: Q, b: Q) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn identity_function_has_isolated_root() {
        let d = Domain1D::interval(q(0, 1), q(1, 1)).unwrap();
        let z = zero_set(&PwRational::polynomial(&d, &Poly::x())).unwrap();
        assert_eq!(z.components[0].points, vec![q(0, 1)]);
        assert!(z.components[0].intervals.is_empty());
        assert_eq!(is_clopen(&z), (false, Some(q(0, 1))));
    }

    #[test]
    fn vanishing_component_is_clopen() {
        let d = Domain1D::new(vec![iv(q(0, 1), q(1, 1)), iv(q(2, 1), q(3, 1))]).unwrap();
        let f = PwRational::new(
            d.clone(),
            vec![
                vec![Piece::constant(iv(q(0, 1), q(1, 1)), Gq::from_int(0))],
                vec![Piece::constant(iv(q(2, 1), q(3, 1)), Gq::from_int(1))],
            ],
        )
        .unwrap();
        let z = zero_set(&f).unwrap();
        assert_eq!(z.components[0].intervals, vec![iv(q(0, 1), q(1, 1))]);
        assert!(z.components[1].is_empty());
        assert_eq!(is_clopen(&z), (true, None));
    }

    #[test]
    fn half_interval_zero_set() {
        let d = Domain1D::interval(q(0, 1), q(1, 1)).unwrap();
        // 0 on [0,1/2], x - 1/2 on [1/2,1]
        let f = PwRational::from_pieces(
            d,
            vec![
                Piece::constant(iv(q(0, 1), q(1, 2)), Gq::from_int(0)),
                Piece::polynomial(iv(q(1, 2), q(1, 1)), Poly::linear_root(Gq::real(q(1, 2)))),
            ],
        )
        .unwrap();
        let z = zero_set(&f).unwrap();
        assert_eq!(z.components[0].intervals, vec![iv(q(0, 1), q(1, 2))]);
        assert!(z.components[0].points.is_empty());
        assert_eq!(is_clopen(&z), (false, Some(q(1, 2))));
    }

    #[test]
    fn irrational_root_is_rejected() {
        let d = Domain1D::interval(q(0, 1), q(2, 1)).unwrap();
        let p: QPoly = Poly::new(vec![q(-2, 1), q(0, 1), q(1, 1)]);
        assert!(matches!(
            zero_set(&PwRational::polynomial(&d, &p)),
            Err(Error::UnsupportedIrrationalRoot { .. })
        ));
    }

    #[test]
    fn complex_input_is_rejected() {
        let d = Domain1D::interval(q(0, 1), q(1, 1)).unwrap();
        let f = PwRational::constant(&d, Gq::new(q(0, 1), q(1, 1)));
        assert!(matches!(zero_set(&f), Err(Error::NotReal)));
    }
}
