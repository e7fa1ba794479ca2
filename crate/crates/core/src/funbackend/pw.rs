//! Exact piecewise-rational functions on a finite union of closed intervals.

use std::fmt;

use super::field::{Field, Gq, Q};
use super::poly::{GPoly, Poly, QPoly};
use super::sturm::SturmChain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidDomain(format!(
                "interval [{lo}, {hi}] has no length"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint closed intervals of positive length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain1D {
    components: Vec<Interval>,
}

impl Domain1D {
    pub fn new(components: Vec<Interval>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDomain(
                "domain needs at least one interval".into(),
            ));
        }
        for w in components.windows(2) {
            if w[0].hi >= w[1].lo {
                return Err(Error::InvalidDomain(format!(
                    "intervals {} and {} overlap or are out of order",
                    w[0], w[1]
                )));
            }
        }
        Ok(Domain1D { components })
    }

    /// The single interval `[lo, hi]`.
    pub fn interval(lo: Q, hi: Q) -> Result<Self> {
        Domain1D::new(vec![Interval::new(lo, hi)?])
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn component_of(&self, x: &Q) -> Option<usize> {
        self.components.iter().position(|c| c.contains(x))
    }
}

/// `num / den` on `[lo, hi]`, with `den` free of roots there.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub span: Interval,
    pub num: GPoly,
    pub den: GPoly,
}

impl Piece {
    pub fn new(span: Interval, num: GPoly, den: GPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidFunction(format!(
                "zero denominator on {span}"
            )));
        }
        let piece = Piece { span, num, den }.normalized();
        if piece.den_has_root() {
            return Err(Error::InvalidFunction(format!(
                "denominator vanishes on {}",
                piece.span
            )));
        }
        Ok(piece)
    }

    pub fn polynomial(span: Interval, num: GPoly) -> Self {
        Piece {
            span,
            num,
            den: Poly::one(),
        }
    }

    pub fn constant(span: Interval, c: Gq) -> Self {
        Piece::polynomial(span, Poly::constant(c))
    }

    /// Reduced by the gcd, monic denominator, zero numerator over `1`.
    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return Piece {
                span: self.span,
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = self.num.gcd(&self.den);
        let num = self.num.div_rem(&g).0;
        let den = self.den.div_rem(&g).0;
        let lead = den.leading().expect("nonzero").clone();
        let inv = Gq::one().div(&lead);
        Piece {
            span: self.span,
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    /// Real roots of the denominator are common roots of its real and imaginary parts.
    fn den_has_root(&self) -> bool {
        let common: QPoly = self.den.real_part().gcd(&self.den.imag_part());
        if common.is_constant() {
            return false;
        }
        SturmChain::new(&common).count_closed(&self.span.lo, &self.span.hi) > 0
    }

    pub fn eval(&self, x: &Q) -> Gq {
        self.num.eval_real(x).div(&self.den.eval_real(x))
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real() && self.den.is_real()
    }

    fn same_formula(&self, other: &Piece) -> bool {
        self.num == other.num && self.den == other.den
    }

    fn restricted(&self, span: Interval) -> Piece {
        Piece {
            span,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwOp {
    Add,
    Mul,
}

/// Continuous piecewise-rational function on a [`Domain1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct PwRational {
    domain: Domain1D,
    /// One partition per domain component.
    pieces: Vec<Vec<Piece>>,
}

impl PwRational {
    /// Validates the partition of each component and continuity at breakpoints.
    pub fn new(domain: Domain1D, pieces: Vec<Vec<Piece>>) -> Result<Self> {
        if pieces.len() != domain.components.len() {
            return Err(Error::InvalidFunction(format!(
                "{} partitions for {} components",
                pieces.len(),
                domain.components.len()
            )));
        }
        for (comp, part) in domain.components.iter().zip(&pieces) {
            let first = part
                .first()
                .ok_or_else(|| Error::InvalidFunction(format!("no pieces on {comp}")))?;
            if first.span.lo != comp.lo || part.last().expect("nonempty").span.hi != comp.hi {
                return Err(Error::InvalidFunction(format!(
                    "pieces do not cover {comp}"
                )));
            }
            for w in part.windows(2) {
                if w[0].span.hi != w[1].span.lo {
                    return Err(Error::InvalidFunction(format!(
                        "gap or overlap between {} and {}",
                        w[0].span, w[1].span
                    )));
                }
                let x = &w[0].span.hi;
                if w[0].eval(x) != w[1].eval(x) {
                    return Err(Error::InvalidFunction(format!("discontinuous at {x}")));
                }
            }
        }
        Ok(PwRational { domain, pieces })
    }

    /// Builds from pieces given in order across all components.
    pub fn from_pieces(domain: Domain1D, flat: Vec<Piece>) -> Result<Self> {
        let mut parts: Vec<Vec<Piece>> = vec![Vec::new(); domain.components.len()];
        for p in flat {
            let c = domain
                .components
                .iter()
                .position(|c| c.lo <= p.span.lo && p.span.hi <= c.hi)
                .ok_or_else(|| {
                    Error::InvalidFunction(format!("piece {} lies outside the domain", p.span))
                })?;
            parts[c].push(p);
        }
        for part in &mut parts {
            part.sort_by(|a, b| a.span.lo.cmp(&b.span.lo));
        }
        PwRational::new(domain, parts)
    }

    pub fn constant(domain: &Domain1D, c: Gq) -> Self {
        let pieces = domain
            .components
            .iter()
            .map(|comp| vec![Piece::constant(comp.clone(), c.clone())])
            .collect();
        PwRational {
            domain: domain.clone(),
            pieces,
        }
    }

    pub fn zero(domain: &Domain1D) -> Self {
        Self::constant(domain, Gq::zero())
    }

    pub fn one(domain: &Domain1D) -> Self {
        Self::constant(domain, Gq::one())
    }

    /// A single real polynomial on every component.
    pub fn polynomial(domain: &Domain1D, p: &QPoly) -> Self {
        let pieces = domain
            .components
            .iter()
            .map(|comp| vec![Piece::polynomial(comp.clone(), p.to_complex())])
            .collect();
        PwRational {
            domain: domain.clone(),
            pieces,
        }
    }

    pub fn domain(&self) -> &Domain1D {
        &self.domain
    }

    pub fn pieces(&self) -> &[Vec<Piece>] {
        &self.pieces
    }

    pub fn flat_pieces(&self) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().flatten()
    }

    pub fn is_real(&self) -> bool {
        self.flat_pieces().all(Piece::is_real)
    }

    pub fn eval(&self, x: &Q) -> Option<Gq> {
        let c = self.domain.component_of(x)?;
        self.pieces[c]
            .iter()
            .find(|p| p.span.contains(x))
            .map(|p| p.eval(x))
    }

    /// Merge neighbouring pieces carrying the same formula.
    fn merged(domain: Domain1D, pieces: Vec<Vec<Piece>>) -> Self {
        let pieces = pieces
            .into_iter()
            .map(|part| {
                let mut out: Vec<Piece> = Vec::with_capacity(part.len());
                for p in part {
                    match out.last_mut() {
                        Some(last) if last.same_formula(&p) => last.span.hi = p.span.hi,
                        _ => out.push(p),
                    }
                }
                out
            })
            .collect();
        PwRational { domain, pieces }
    }

    /// Apply `f` piecewise on the common refinement of `self` and `other`.
    fn zip_with(
        &self,
        other: &PwRational,
        f: impl Fn(&Piece, &Piece) -> Result<Piece>,
    ) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let mut out = Vec::with_capacity(self.pieces.len());
        for (pa, pb) in self.pieces.iter().zip(&other.pieces) {
            let mut cuts: Vec<Q> = pa
                .iter()
                .chain(pb.iter())
                .flat_map(|p| [p.span.lo.clone(), p.span.hi.clone()])
                .collect();
            cuts.sort();
            cuts.dedup();
            let mut part = Vec::with_capacity(cuts.len());
            for w in cuts.windows(2) {
                let span = Interval::new(w[0].clone(), w[1].clone())?;
                let a = covering(pa, &span);
                let b = covering(pb, &span);
                part.push(f(&a.restricted(span.clone()), &b.restricted(span))?);
            }
            out.push(part);
        }
        Ok(Self::merged(self.domain.clone(), out))
    }

    pub fn map_pieces(&self, f: impl Fn(&Piece) -> Result<Vec<Piece>>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.pieces.len());
        for part in &self.pieces {
            let mut np = Vec::new();
            for p in part {
                np.extend(f(p)?);
            }
            out.push(np);
        }
        let merged = Self::merged(self.domain.clone(), out);
        debug_assert!(PwRational::new(merged.domain.clone(), merged.pieces.clone()).is_ok());
        Ok(merged)
    }

    pub fn add(&self, other: &PwRational) -> Result<Self> {
        self.zip_with(other, |a, b| {
            Piece::new(
                a.span.clone(),
                a.num.mul(&b.den).add(&b.num.mul(&a.den)),
                a.den.mul(&b.den),
            )
        })
    }

    pub fn mul(&self, other: &PwRational) -> Result<Self> {
        self.zip_with(other, |a, b| {
            Piece::new(a.span.clone(), a.num.mul(&b.num), a.den.mul(&b.den))
        })
    }

    pub fn neg(&self) -> Self {
        self.map_pieces(|p| {
            Ok(vec![Piece {
                span: p.span.clone(),
                num: p.num.neg(),
                den: p.den.clone(),
            }])
        })
        .expect("negation cannot fail")
    }

    pub fn sub(&self, other: &PwRational) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Complex conjugation of all coefficients.
    pub fn star(&self) -> Self {
        self.map_pieces(|p| {
            Ok(vec![Piece {
                span: p.span.clone(),
                num: p.num.conj(),
                den: p.den.conj(),
            }])
        })
        .expect("conjugation cannot fail")
    }

    pub fn is_identically_zero(&self) -> bool {
        self.flat_pieces().all(|p| p.num.is_zero())
    }

    /// Exact equality as functions.
    pub fn equals(&self, other: &PwRational) -> Result<bool> {
        Ok(self.sub(other)?.is_identically_zero())
    }

    /// Largest `|f|` over breakpoints and piece midpoints, as a float.
    pub fn sampled_sup(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.flat_pieces()
            .flat_map(|p| {
                [p.span.lo.clone(), p.span.midpoint(), p.span.hi.clone()]
                    .into_iter()
                    .map(move |x| p.eval(&x))
            })
            .map(|v| {
                let re = v.re.to_f64().unwrap_or(f64::INFINITY);
                let im = v.im.to_f64().unwrap_or(f64::INFINITY);
                re.hypot(im)
            })
            .fold(0.0, f64::max)
    }
}

fn covering<'a>(part: &'a [Piece], span: &Interval) -> &'a Piece {
    part.iter()
        .find(|p| p.span.lo <= span.lo && span.hi <= p.span.hi)
        .expect("cuts refine every partition")
}

pub fn pw_arith(f: &PwRational, g: &PwRational, op: PwOp) -> Result<PwRational> {
    match op {
        PwOp::Add => f.add(g),
        PwOp::Mul => f.mul(g),
    }
}

pub fn pw_star(f: &PwRational) -> PwRational {
    f.star()
}
