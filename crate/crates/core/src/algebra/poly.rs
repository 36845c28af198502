//! Multivariate polynomials over the Gaussian rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::{Monomial, MAX_DIM};
use super::scalar::{format_rational, parse_rational, Scalar};
use crate::error::{Error, Result};

/// A polynomial in `x1..xd`. Zero coefficients are never stored, so `==` is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Scalar) -> Self {
        Poly::monomial(dim, Monomial::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Scalar::one())
    }

    /// The coordinate function `x_{axis+1}`.
    pub fn var(dim: usize, axis: usize) -> Self {
        Poly::monomial(dim, Monomial::unit(dim, axis), Scalar::one())
    }

    pub fn monomial(dim: usize, exp: Monomial, c: Scalar) -> Self {
        debug_assert_eq!(exp.dim(), dim);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { dim, terms }
    }

    /// Checked constructor: validates the dimension and every exponent length.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut p = Poly::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Monomial) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Largest exponent of each variable over all terms.
    pub fn max_exponents(&self) -> Monomial {
        let mut m = vec![0; self.dim];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(&e.0) {
                *a = (*a).max(*b);
            }
        }
        Monomial(m)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_zero)
    }

    pub(crate) fn add_term(&mut self, e: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    fn check_dim(&self, other: &Poly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly { dim: self.dim, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative along `axis` (zero-based).
    pub fn partial(&self, axis: usize) -> Result<Poly> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(self.derivative(&Monomial::unit(self.dim, axis)))
    }

    /// Mixed partial derivative ∂^k.
    pub fn derivative(&self, k: &Monomial) -> Poly {
        if k.is_zero() {
            return self.clone();
        }
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if let Some(f) = k.falling_factor(e) {
                let rest = e.checked_sub(k).expect("falling factor implies k <= e");
                out.add_term(rest, &(c * &Scalar::from_bigint(f)));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.dim {
            return Err(Error::LengthMismatch { expected: self.dim, found: point.len() });
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Multiplies every coefficient by `f(exponent)`.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Monomial, &Scalar) -> Scalar) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(e, c));
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        assert_eq!(self.dim, o.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        assert_eq!(self.dim, o.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.dim, o.dim, "polynomial dimension mismatch");
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                out.add_term(ea + eb, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative_real = c.is_real() && c.re.is_negative();
            let shown = if negative_real { -c } else { c.clone() };
            if n == 0 {
                if negative_real {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative_real { " - " } else { " + " })?;
            }
            let vars: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                .collect();
            let coeff = if !shown.is_real() && !shown.re.is_zero() {
                format!("({shown})")
            } else {
                shown.to_string()
            };
            if vars.is_empty() {
                write!(f, "{coeff}")?;
            } else if shown.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[d={}]({self})", self.dim)
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: Vec<u32>,
    re: String,
    #[serde(default = "zero_string")]
    im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    d: usize,
    terms: Vec<TermWire>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyWire {
            d: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermWire { exp: e.0.clone(), re: format_rational(&c.re), im: format_rational(&c.im) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PolyWire::deserialize(d)?;
        let terms = w
            .terms
            .into_iter()
            .map(|t| {
                let re = parse_rational(&t.re)?;
                let im = parse_rational(&t.im)?;
                Ok((Monomial(t.exp), Scalar::new(re, im)))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Poly::from_terms(w.d, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    #[test]
    fn square_of_sum() {
        let s = &x(0) + &x(1);
        let sq = &s * &s;
        let expected = &(&x(0).pow(2) + &x(0).scale(&Scalar::from_int(2)).mul(&x(1))) + &x(1).pow(2);
        assert_eq!(sq, expected);
        let v = sq.eval(&[Scalar::from_int(1), Scalar::from_int(2)]).unwrap();
        assert_eq!(v, Scalar::from_int(9));
    }

    #[test]
    fn partials() {
        let p = &x(0).pow(2) * &x(1);
        assert_eq!(p.partial(0).unwrap(), (&x(0) * &x(1)).scale(&Scalar::from_int(2)));
        assert!(x(0).partial(1).unwrap().is_zero());
        assert_eq!((&x(0) * &x(1)).partial(0).unwrap().partial(1).unwrap(), Poly::one(2));
        assert!(p.partial(2).is_err());
    }

    #[test]
    fn eval_rational_point() {
        let p = &x(0).pow(2) + &x(1);
        let v = p.eval(&[Scalar::ratio(1, 2), Scalar::ratio(1, 4)]).unwrap();
        assert_eq!(v, Scalar::ratio(1, 2));
        assert!(p.eval(&[Scalar::one()]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(Poly::var(2, 0).try_mul(&Poly::var(3, 0)).is_err());
    }

    #[test]
    fn rendering() {
        let d = 3;
        let a = Poly::monomial(d, Monomial(vec![2, 1, 0]), Scalar::from_int(2));
        let b = Poly::monomial(
            d,
            Monomial(vec![0, 0, 1]),
            Scalar::new(num_rational::BigRational::new(1.into(), 2.into()), num_rational::BigRational::from_integer(3.into())),
        );
        assert_eq!((&a + &b).to_string(), "2*x1^2*x2 + (1/2+3i)*x3");
        assert_eq!((&Poly::var(2, 0) - &Poly::one(2)).to_string(), "x1 - 1");
        assert_eq!(Poly::zero(2).to_string(), "0");
    }

    #[test]
    fn json_roundtrip() {
        let p = &(&x(0).pow(3) - &x(1).scale(&Scalar::ratio(2, 3))) + &Poly::constant(2, Scalar::i());
        let s = serde_json::to_string(&p).unwrap();
        let q: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Poly>(r#"{"d":2,"terms":[{"exp":[1],"re":"1"}]}"#).is_err());
    }
}
