//! Diagonal multiplication operators on `C(X)^k` and their exact polar data.

use super::field::{Field, Gq, Q};
use super::poly::{sign, Poly};
use super::pw::{Domain1D, Interval, Piece, PwRational};
use super::sturm::rational_roots;
use super::zeroset::{is_clopen, zero_set, Certificate};
use crate::error::{Error, Result};

fn require_real(f: &PwRational) -> Result<()> {
    if f.is_real() {
        Ok(())
    } else {
        Err(Error::NotReal)
    }
}

fn sign_at(piece: &Piece, x: &Q) -> i8 {
    sign(&piece.eval(x).re)
}

/// `|f|`, splitting pieces at rational roots.
pub fn pw_abs(f: &PwRational) -> Result<PwRational> {
    require_real(f)?;
    f.map_pieces(|p| {
        if p.num.is_zero() {
            return Ok(vec![p.clone()]);
        }
        let roots = rational_roots(&p.num.real_part(), &p.span.lo, &p.span.hi)?;
        let mut cuts = vec![p.span.lo.clone()];
        cuts.extend(
            roots
                .into_iter()
                .filter(|r| *r != p.span.lo && *r != p.span.hi),
        );
        cuts.push(p.span.hi.clone());
        let mut out = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let span = Interval::new(w[0].clone(), w[1].clone())?;
            let num = if sign_at(p, &span.midpoint()) < 0 {
                p.num.neg()
            } else {
                p.num.clone()
            };
            out.push(Piece {
                span,
                num,
                den: p.den.clone(),
            });
        }
        Ok(out)
    })
}

/// Per component: `None` where `f` vanishes identically, else the constant sign.
fn component_signs(f: &PwRational) -> Result<Vec<Option<i8>>> {
    require_real(f)?;
    let z = zero_set(f)?;
    if let (false, Some(point)) = is_clopen(&z) {
        return Err(Error::NotComplemented(Certificate { entry: None, point }));
    }
    Ok(z.components
        .iter()
        .zip(f.pieces())
        .map(|(cz, part)| {
            if cz.is_whole() {
                None
            } else {
                let first = &part[0];
                Some(sign_at(first, &first.span.lo))
            }
        })
        .collect())
}

fn support_map(
    f: &PwRational,
    on_support: impl Fn(&Piece, i8) -> Result<Piece>,
) -> Result<PwRational> {
    let signs = component_signs(f)?;
    let pieces = f
        .pieces()
        .iter()
        .zip(signs)
        .map(|(part, s)| match s {
            None => Ok(vec![Piece::constant(
                Interval::new(
                    part[0].span.lo.clone(),
                    part.last().unwrap().span.hi.clone(),
                )?,
                Gq::zero(),
            )]),
            Some(s) => part.iter().map(|p| on_support(p, s)).collect(),
        })
        .collect::<Result<Vec<_>>>()?;
    PwRational::new(f.domain().clone(), pieces)
}

/// `±1` on components where `f` has no zeros, `0` where it vanishes.
pub fn pw_sign_support(f: &PwRational) -> Result<PwRational> {
    support_map(f, |p, s| {
        Ok(Piece::constant(p.span.clone(), Gq::from_int(s as i64)))
    })
}

/// `1/f` on the support, `0` elsewhere.
pub fn pw_recip_support(f: &PwRational) -> Result<PwRational> {
    support_map(f, |p, _| {
        Piece::new(p.span.clone(), p.den.clone(), p.num.clone())
    })
}

/// `diag(f_1, ..., f_k)` acting on `C(X)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagOperator {
    domain: Domain1D,
    entries: Vec<PwRational>,
}

impl DiagOperator {
    pub fn new(domain: Domain1D, entries: Vec<PwRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidFunction(
                "operator needs at least one entry".into(),
            ));
        }
        for e in &entries {
            if e.domain() != &domain {
                return Err(Error::DomainMismatch);
            }
            require_real(e)?;
        }
        Ok(DiagOperator { domain, entries })
    }

    pub fn domain(&self) -> &Domain1D {
        &self.domain
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[PwRational] {
        &self.entries
    }

    pub fn identity(domain: &Domain1D, rank: usize) -> Self {
        DiagOperator {
            domain: domain.clone(),
            entries: vec![PwRational::one(domain); rank],
        }
    }

    /// Entrywise conjugate; the identity on real entries.
    pub fn adjoint(&self) -> Self {
        DiagOperator {
            domain: self.domain.clone(),
            entries: self.entries.iter().map(PwRational::star).collect(),
        }
    }

    /// Composition; diagonal operators commute.
    pub fn mul(&self, other: &DiagOperator) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::ShapeMismatch(format!(
                "diagonal ranks {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_>>()?;
        Ok(DiagOperator {
            domain: self.domain.clone(),
            entries,
        })
    }

    pub fn equals(&self, other: &DiagOperator) -> Result<bool> {
        if self.rank() != other.rank() {
            return Ok(false);
        }
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.equals(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn map(&self, f: impl Fn(&PwRational) -> Result<PwRational>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<_>>()?;
        Ok(DiagOperator {
            domain: self.domain.clone(),
            entries,
        })
    }

    /// Entrywise `sup |f|`, sampled at breakpoints and midpoints.
    pub fn sampled_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(PwRational::sampled_sup)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementCheck {
    pub entries: Vec<bool>,
    pub complemented: bool,
    pub certificate: Option<Certificate>,
}

pub fn diag_complement_check(t: &DiagOperator) -> Result<ComplementCheck> {
    let mut entries = Vec::with_capacity(t.rank());
    let mut certificate = None;
    for (i, f) in t.entries.iter().enumerate() {
        let (ok, point) = is_clopen(&zero_set(f)?);
        if !ok && certificate.is_none() {
            certificate = point.map(|point| Certificate {
                entry: Some(i + 1),
                point,
            });
        }
        entries.push(ok);
    }
    Ok(ComplementCheck {
        complemented: entries.iter().all(|&b| b),
        entries,
        certificate,
    })
}

fn with_entry(i: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NotComplemented(c) => Error::NotComplemented(Certificate {
            entry: Some(i + 1),
            ..c
        }),
        other => other,
    }
}

/// `(V, |T|)` with `V = diag(sign)` and `|T| = diag(|f|)`.
pub fn diag_polar(t: &DiagOperator) -> Result<(DiagOperator, DiagOperator)> {
    let mut v = Vec::with_capacity(t.rank());
    for (i, f) in t.entries.iter().enumerate() {
        v.push(pw_sign_support(f).map_err(with_entry(i))?);
    }
    let v = DiagOperator {
        domain: t.domain.clone(),
        entries: v,
    };
    Ok((v, t.map(pw_abs)?))
}

/// `s = diag(1/f)` on the support.
pub fn diag_pinv(t: &DiagOperator) -> Result<DiagOperator> {
    let mut s = Vec::with_capacity(t.rank());
    for (i, f) in t.entries.iter().enumerate() {
        s.push(pw_recip_support(f).map_err(with_entry(i))?);
    }
    Ok(DiagOperator {
        domain: t.domain.clone(),
        entries: s,
    })
}

/// `0` on exact equality, otherwise the sampled size of the difference.
pub fn exact_residual(a: &DiagOperator, b: &DiagOperator) -> Result<f64> {
    if a.equals(b)? {
        return Ok(0.0);
    }
    if a.rank() != b.rank() {
        return Ok(f64::INFINITY);
    }
    let diff = a.map(|_| Ok(PwRational::zero(&a.domain)))?;
    let entries = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.sub(y))
        .collect::<Result<Vec<_>>>()?;
    let diff = DiagOperator { entries, ..diff };
    Ok(diff.sampled_norm().max(f64::MIN_POSITIVE))
}

/// Exact residuals of the polar and generalized-inverse identities.
pub fn diag_identities(
    t: &DiagOperator,
    v: &DiagOperator,
    abs_t: &DiagOperator,
    s: &DiagOperator,
) -> Result<Vec<(&'static str, f64)>> {
    let ts = s.mul(t)?;
    let st = t.mul(s)?;
    let vs = v.adjoint().mul(v)?;
    let vv = v.mul(&v.adjoint())?;
    let ran_t = pw_projection(t)?;
    Ok(vec![
        ("t=V|t|", exact_residual(&v.mul(abs_t)?, t)?),
        ("V*t=|t|", exact_residual(&v.adjoint().mul(t)?, abs_t)?),
        ("VV*t=t", exact_residual(&vv.mul(t)?, t)?),
        ("partial_isometry", exact_residual(&v.mul(&vs)?, v)?),
        ("tst=t", exact_residual(&ts.mul(t)?, t)?),
        ("sts=s", exact_residual(&st.mul(s)?, s)?),
        ("(ts)*=ts", exact_residual(&ts.adjoint(), &ts)?),
        ("(st)*=st", exact_residual(&st.adjoint(), &st)?),
        ("ts idempotent", exact_residual(&ts.mul(&ts)?, &ts)?),
        (
            "V*V=ran t*",
            exact_residual(&vs, &pw_projection(&t.adjoint())?)?,
        ),
        ("VV*=ran t", exact_residual(&vv, &ran_t)?),
        (
            "V*V=closure(t*s*)",
            exact_residual(&vs, &t.adjoint().mul(&s.adjoint())?)?,
        ),
        ("VV*=closure(ts)", exact_residual(&vv, &ts)?),
        (
            "s* inverts t*",
            exact_residual(&diag_pinv(&t.adjoint())?, &s.adjoint())?,
        ),
    ])
}

/// Projection onto the range closure: the support indicator of each entry.
fn pw_projection(t: &DiagOperator) -> Result<DiagOperator> {
    t.map(|f| {
        let signs = component_signs(f)?;
        let pieces = f
            .domain()
            .components()
            .iter()
            .zip(signs)
            .map(|(c, s)| {
                vec![Piece::constant(
                    c.clone(),
                    Gq::from_int(if s.is_some() { 1 } else { 0 }),
                )]
            })
            .collect();
        PwRational::new(f.domain().clone(), pieces)
    })
}

/// `x - r` as a real polynomial function on `domain`.
pub fn shifted_x(domain: &Domain1D, r: Q) -> PwRational {
    PwRational::polynomial(domain, &Poly::linear_root(r))
}
