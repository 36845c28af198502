//! Polydifferential operators Σ c(x) ∂^{K_1} ⊗ … ⊗ ∂^{K_m}.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{multinomial_splits, Monomial, Payload, Poly, Scalar};
use crate::error::{Error, Result};

/// An m-ary polydifferential operator, stored as a map from derivative tuples to coefficients.
/// Arity 0 is a plain function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiDiffOp {
    dim: usize,
    arity: usize,
    terms: BTreeMap<Vec<Monomial>, Poly>,
}

impl MultiDiffOp {
    pub fn zero(dim: usize, arity: usize) -> Self {
        MultiDiffOp { dim, arity, terms: BTreeMap::new() }
    }

    /// The arity-0 operator carrying `p`.
    pub fn function(p: Poly) -> Self {
        let mut op = MultiDiffOp::zero(p.dim(), 0);
        op.add_term(Vec::new(), &p);
        op
    }

    /// The pointwise product μ(f, g) = fg.
    pub fn mu(dim: usize) -> Self {
        MultiDiffOp::term(Poly::one(dim), vec![Monomial::zero(dim); 2])
    }

    pub fn identity(dim: usize) -> Self {
        MultiDiffOp::term(Poly::one(dim), vec![Monomial::zero(dim)])
    }

    /// A single term `coeff · ∂^{derivs[0]} ⊗ …`.
    pub fn term(coeff: Poly, derivs: Vec<Monomial>) -> Self {
        let mut op = MultiDiffOp::zero(coeff.dim(), derivs.len());
        op.add_term(derivs, &coeff);
        op
    }

    /// Checked constructor used at input boundaries.
    pub fn from_terms(dim: usize, arity: usize, terms: impl IntoIterator<Item = (Poly, Vec<Monomial>)>) -> Result<Self> {
        let mut op = MultiDiffOp::zero(dim, arity);
        for (c, derivs) in terms {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
            }
            if derivs.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: derivs.len() });
            }
            if let Some(k) = derivs.iter().find(|k| k.dim() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: k.dim() });
            }
            op.add_term(derivs, &c);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Shifted degree `arity − 1`.
    pub fn degree(&self) -> i64 {
        self.arity as i64 - 1
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Monomial>, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, derivs: &[Monomial]) -> Poly {
        self.terms.get(derivs).cloned().unwrap_or_else(|| Poly::zero(self.dim))
    }

    /// For arity 0, the function it represents.
    pub fn as_function(&self) -> Option<Poly> {
        (self.arity == 0).then(|| self.coefficient(&[]))
    }

    pub(crate) fn add_term(&mut self, derivs: Vec<Monomial>, c: &Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&derivs) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&derivs);
                }
            }
            None => {
                self.terms.insert(derivs, c.clone());
            }
        }
    }

    pub(crate) fn add_assign_scaled(&mut self, other: &MultiDiffOp, s: &Scalar) {
        debug_assert_eq!(self.arity, other.arity);
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            if s.is_one() {
                self.add_term(k.clone(), c);
            } else {
                self.add_term(k.clone(), &c.scale(s));
            }
        }
    }

    fn check_shape(&self, other: &MultiDiffOp) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: other.arity });
        }
        Ok(())
    }

    pub(crate) fn check_dim(&self, other: &MultiDiffOp) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiDiffOp) -> Result<MultiDiffOp> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::one());
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiDiffOp) -> Result<MultiDiffOp> {
        self.check_shape(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, &Scalar::from_int(-1));
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> MultiDiffOp {
        let mut out = MultiDiffOp::zero(self.dim, self.arity);
        out.add_assign_scaled(self, s);
        out
    }

    pub fn neg(&self) -> MultiDiffOp {
        self.scale(&Scalar::from_int(-1))
    }

    /// Evaluates Σ c · Π_k ∂^{K_k} args[k].
    pub fn apply(&self, args: &[Poly]) -> Result<Poly> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.dim() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.dim() });
        }
        let mut out = Poly::zero(self.dim);
        for (derivs, c) in &self.terms {
            let mut t = c.clone();
            for (k, a) in derivs.iter().zip(args) {
                let da = a.derivative(k);
                if da.is_zero() {
                    t = Poly::zero(self.dim);
                    break;
                }
                t = &t * &da;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Partial insertion `f ∘_slot g`: g's output fed into slot `slot` of `self`.
    /// The result has arity `arity(f) + arity(g) − 1`.
    pub fn insert(&self, slot: usize, g: &MultiDiffOp) -> Result<MultiDiffOp> {
        self.check_dim(g)?;
        if slot >= self.arity {
            return Err(Error::OutOfRange(format!("slot {slot} for arity {}", self.arity)));
        }
        let arity = self.arity + g.arity - 1;
        let mut out = MultiDiffOp::zero(self.dim, arity);
        let mut split_cache: BTreeMap<Monomial, Vec<(Vec<Monomial>, Scalar)>> = BTreeMap::new();
        for (kf, cf) in &self.terms {
            let splits = split_cache.entry(kf[slot].clone()).or_insert_with(|| {
                multinomial_splits(&kf[slot], g.arity + 1)
                    .into_iter()
                    .map(|(p, c)| (p, Scalar::from_bigint(c)))
                    .collect()
            });
            for (lg, cg) in &g.terms {
                for (parts, w) in splits.iter() {
                    let dcg = cg.derivative(&parts[0]);
                    if dcg.is_zero() {
                        continue;
                    }
                    let coeff = (cf * &dcg).scale(w);
                    let mut derivs = Vec::with_capacity(arity);
                    derivs.extend_from_slice(&kf[..slot]);
                    for (l, a) in lg.iter().zip(&parts[1..]) {
                        derivs.push(l + a);
                    }
                    derivs.extend_from_slice(&kf[slot + 1..]);
                    out.add_term(derivs, &coeff);
                }
            }
        }
        Ok(out)
    }

    /// Exchanges the two arguments of an arity-2 operator.
    pub fn transpose(&self) -> Result<MultiDiffOp> {
        if self.arity != 2 {
            return Err(Error::WrongArity { expected: 2, found: self.arity });
        }
        let mut out = MultiDiffOp::zero(self.dim, 2);
        for (k, c) in &self.terms {
            out.add_term(vec![k[1].clone(), k[0].clone()], c);
        }
        Ok(out)
    }

    /// Largest total derivative order appearing in each slot.
    pub fn slot_orders(&self) -> Vec<u32> {
        let mut m = vec![0; self.arity];
        for k in self.terms.keys() {
            for (a, d) in m.iter_mut().zip(k) {
                *a = (*a).max(d.degree());
            }
        }
        m
    }

    /// True if every term differentiates each argument exactly once.
    pub fn is_first_order_each(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|d| d.degree() == 1))
    }

    /// Largest coefficient modulus over all terms, for reporting.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|p| p.terms().map(|(_, c)| c.abs_f64()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

impl Payload for MultiDiffOp {
    fn zero_like(&self) -> Self {
        MultiDiffOp::zero(self.dim, self.arity)
    }
    fn is_zero_payload(&self) -> bool {
        self.is_zero()
    }
    fn try_add_payload(&self, other: &Self) -> Result<Self> {
        self.try_add(other)
    }
    fn scale_payload(&self, s: &Scalar) -> Self {
        self.scale(s)
    }
}

impl fmt::Display for MultiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let render = |k: &Monomial| -> String {
            if k.is_zero() {
                return "1".into();
            }
            k.0.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("d{}", i + 1) } else { format!("d{}^{}", i + 1, e) })
                .collect::<Vec<_>>()
                .join("")
        };
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let slots: Vec<String> = k.iter().map(render).collect();
            if slots.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*[{}]", slots.join(" x "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiDiffOp[d={}, m={}]({self})", self.dim, self.arity)
    }
}

#[derive(Serialize, Deserialize)]
struct OpTermWire {
    coeff: Poly,
    derivs: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct OpWire {
    d: usize,
    arity: usize,
    terms: Vec<OpTermWire>,
}

impl Serialize for MultiDiffOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OpWire {
            d: self.dim,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| OpTermWire { coeff: c.clone(), derivs: k.iter().map(|m| m.0.clone()).collect() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiDiffOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = OpWire::deserialize(d)?;
        MultiDiffOp::from_terms(
            w.d,
            w.arity,
            w.terms.into_iter().map(|t| (t.coeff, t.derivs.into_iter().map(Monomial).collect())),
        )
        .map_err(D::Error::custom)
    }
}
