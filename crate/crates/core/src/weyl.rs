//! The Weyl algebra in normal order, Weyl quantization and the Moyal product.
//!
//! Phase-space polynomials live in 2n variables ordered `q1..qn, p1..pn`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{HbarSeries, Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::hochschild::MultiDiffOp;
use crate::polyvector::PolyVectorField;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct WeylKey {
    q: Monomial,
    p: Monomial,
    hbar: u32,
}

/// Σ c · ħ^h q̂^I p̂^J with every q̂ to the left of every p̂.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylOp {
    n: usize,
    terms: BTreeMap<WeylKey, Scalar>,
}

fn binom(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, t| acc * (n - t) / (t + 1))
}

impl WeylOp {
    pub fn zero(n: usize) -> Self {
        WeylOp { n, terms: BTreeMap::new() }
    }

    /// `c · ħ^hbar q̂^q p̂^p`.
    pub fn term(n: usize, q: Monomial, p: Monomial, hbar: u32, c: Scalar) -> Self {
        let mut op = WeylOp::zero(n);
        op.add_term(WeylKey { q, p, hbar }, &c);
        op
    }

    pub fn scalar(n: usize, c: Scalar) -> Self {
        WeylOp::term(n, Monomial::zero(n), Monomial::zero(n), 0, c)
    }

    pub fn identity(n: usize) -> Self {
        WeylOp::scalar(n, Scalar::one())
    }

    pub fn q(n: usize, k: usize) -> Self {
        WeylOp::term(n, Monomial::unit(n, k), Monomial::zero(n), 0, Scalar::one())
    }

    pub fn p(n: usize, k: usize) -> Self {
        WeylOp::term(n, Monomial::zero(n), Monomial::unit(n, k), 0, Scalar::one())
    }

    pub fn pairs(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The ħ-polynomial multiplying q̂^I p̂^J.
    pub fn coefficient(&self, q: &Monomial, p: &Monomial) -> HbarSeries<Scalar> {
        let found: Vec<(u32, Scalar)> = self
            .terms
            .iter()
            .filter(|(k, _)| &k.q == q && &k.p == p)
            .map(|(k, c)| (k.hbar, c.clone()))
            .collect();
        let top = found.iter().map(|(h, _)| *h).max().unwrap_or(0) as usize;
        let mut coeffs = vec![Scalar::zero(); top + 1];
        for (h, c) in found {
            coeffs[h as usize] = c;
        }
        HbarSeries::new(coeffs)
    }

    /// Terms as `(I, J, ħ-power, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, u32, &Scalar)> {
        self.terms.iter().map(|(k, c)| (&k.q, &k.p, k.hbar, c))
    }

    fn add_term(&mut self, k: WeylKey, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    fn check(&self, o: &WeylOp) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: o.n });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &WeylOp) -> Result<WeylOp> {
        self.check(o)?;
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &WeylOp) -> Result<WeylOp> {
        self.try_add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> WeylOp {
        let mut out = WeylOp::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &(c * s));
        }
        out
    }

    /// Multiplies by ħ^k.
    pub fn shift_hbar(&self, k: u32) -> WeylOp {
        WeylOp {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (WeylKey { hbar: key.hbar + k, ..key.clone() }, c.clone()))
                .collect(),
        }
    }

    /// Product `self · o`, re-normal-ordered with p̂^b q̂^c = Σ_t C(b,t) c!/(c−t)! (−iħ)^t q̂^{c−t} p̂^{b−t}.
    pub fn compose(&self, o: &WeylOp) -> Result<WeylOp> {
        self.check(o)?;
        let n = self.n;
        let minus_i = -&Scalar::i();
        let mut out = WeylOp::zero(n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                // reorder p̂^{J} q̂^{K}, one canonical pair at a time
                let mut acc = vec![(Monomial::zero(n), Monomial::zero(n), 0u32, Scalar::one())];
                for k in 0..n {
                    let (b, c) = (ka.p.0[k], kb.q.0[k]);
                    let mut next = Vec::new();
                    for t in 0..=b.min(c) {
                        let falling: BigInt = (0..t).fold(BigInt::one(), |a, s| a * (c - s));
                        let w = &Scalar::from_bigint(binom(b, t) * falling) * &minus_i.pow(t);
                        for (q, p, h, s) in &acc {
                            let mut q = q.clone();
                            let mut p = p.clone();
                            q.0[k] = c - t;
                            p.0[k] = b - t;
                            next.push((q, p, h + t, s * &w));
                        }
                    }
                    acc = next;
                }
                let c0 = ca * cb;
                for (q, p, h, s) in acc {
                    let key = WeylKey { q: &ka.q + &q, p: &p + &kb.p, hbar: ka.hbar + kb.hbar + h };
                    out.add_term(key, &(&c0 * &s));
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, o: &WeylOp) -> Result<WeylOp> {
        self.compose(o)?.try_sub(&o.compose(self)?)
    }

    /// Reinterprets a single-pair operator on pair `k` of `n`.
    fn embed(&self, n: usize, k: usize) -> WeylOp {
        let mut out = WeylOp::zero(n);
        for (key, c) in &self.terms {
            let mut q = Monomial::zero(n);
            let mut p = Monomial::zero(n);
            q.0[k] = key.q.0[0];
            p.0[k] = key.p.0[0];
            out.add_term(WeylKey { q, p, hbar: key.hbar }, c);
        }
        out
    }
}

/// Sum over all words with `a` letters q̂ and `b` letters p̂, for a single pair.
fn word_sum(a: u32, b: u32, memo: &mut HashMap<(u32, u32), WeylOp>) -> WeylOp {
    if let Some(w) = memo.get(&(a, b)) {
        return w.clone();
    }
    let w = if a == 0 && b == 0 {
        WeylOp::identity(1)
    } else {
        let mut w = WeylOp::zero(1);
        if a > 0 {
            let rest = word_sum(a - 1, b, memo);
            w = w.try_add(&WeylOp::q(1, 0).compose(&rest).expect("single pair")).expect("single pair");
        }
        if b > 0 {
            let rest = word_sum(a, b - 1, memo);
            w = w.try_add(&WeylOp::p(1, 0).compose(&rest).expect("single pair")).expect("single pair");
        }
        w
    };
    memo.insert((a, b), w.clone());
    w
}

fn pairs_of(f: &Poly) -> Result<usize> {
    if f.dim() % 2 != 0 {
        return Err(Error::Parse(format!("phase-space polynomial needs an even dimension, got {}", f.dim())));
    }
    Ok(f.dim() / 2)
}

/// Weyl quantization: each monomial maps to the average of all orderings of its letters.
pub fn weyl_quantize(f: &Poly) -> Result<WeylOp> {
    let n = pairs_of(f)?;
    let mut memo = HashMap::new();
    let mut out = WeylOp::zero(n);
    for (e, c) in f.terms() {
        let mut op = WeylOp::scalar(n, c.clone());
        for k in 0..n {
            let (a, b) = (e.0[k], e.0[n + k]);
            if a + b == 0 {
                continue;
            }
            let s = word_sum(a, b, &mut memo).scale(&Scalar::real(num_rational::BigRational::new(
                BigInt::one(),
                binom(a + b, a),
            )));
            op = op.compose(&s.embed(n, k))?;
        }
        out = out.try_add(&op)?;
    }
    Ok(out)
}

/// Quantizes Σ ħ^k f_k term by term.
pub fn weyl_quantize_series(f: &HbarSeries<Poly>) -> Result<WeylOp> {
    let n = pairs_of(f.coeff(0))?;
    let mut out = WeylOp::zero(n);
    for (k, fk) in f.coeffs().iter().enumerate() {
        out = out.try_add(&weyl_quantize(fk)?.shift_hbar(k as u32))?;
    }
    Ok(out)
}

/// Inverse of [`weyl_quantize_series`] on its image: peels off the highest-degree normal-ordered
/// term, which Weyl ordering reproduces up to lower-degree corrections.
pub fn wigner_symbol(a: &WeylOp) -> Result<HbarSeries<Poly>> {
    let n = a.n;
    let d = 2 * n;
    let mut rest = a.clone();
    let mut symbol: BTreeMap<u32, Poly> = BTreeMap::new();
    let mut memo = HashMap::new();
    while let Some((key, c)) = rest
        .terms
        .iter()
        .max_by(|x, y| (x.0.q.degree() + x.0.p.degree()).cmp(&(y.0.q.degree() + y.0.p.degree())).then(x.0.cmp(y.0)))
        .map(|(k, c)| (k.clone(), c.clone()))
    {
        let mut exp = key.q.0.clone();
        exp.extend_from_slice(&key.p.0);
        let entry = symbol.entry(key.hbar).or_insert_with(|| Poly::zero(d));
        *entry = &*entry + &Poly::monomial(d, Monomial(exp), c.clone());
        let mut op = WeylOp::scalar(n, c);
        for k in 0..n {
            let (qa, pb) = (key.q.0[k], key.p.0[k]);
            if qa + pb == 0 {
                continue;
            }
            let s = word_sum(qa, pb, &mut memo)
                .scale(&Scalar::real(num_rational::BigRational::new(BigInt::one(), binom(qa + pb, qa))));
            op = op.compose(&s.embed(n, k))?;
        }
        rest = rest.try_sub(&op.shift_hbar(key.hbar))?;
    }
    let top = symbol.keys().next_back().copied().unwrap_or(0) as usize;
    let mut coeffs = vec![Poly::zero(d); top + 1];
    for (h, p) in symbol {
        coeffs[h as usize] = p;
    }
    Ok(HbarSeries::new(coeffs))
}

/// The standard symplectic bivector Σ_k ∂_{q_k} ∧ ∂_{p_k} on R^{2n}.
pub fn canonical_poisson(n: usize) -> PolyVectorField {
    let d = 2 * n;
    PolyVectorField::from_components(d, 2, (0..n).map(|k| (vec![k, n + k], Poly::one(d)))).expect("valid indices")
}

fn check_matrix(pi: &[Vec<Scalar>]) -> Result<()> {
    let d = pi.len();
    for i in 0..d {
        if pi[i].len() != d {
            return Err(Error::NotAntisymmetric);
        }
        for j in 0..d {
            if pi[i][j] != -&pi[j][i] {
                return Err(Error::NotAntisymmetric);
            }
        }
    }
    Ok(())
}

/// P^m with P = Σ π^{ij} ∂_i ⊗ ∂_j, for a constant antisymmetric matrix.
pub fn moyal_operator(pi: &[Vec<Scalar>], m: usize) -> Result<MultiDiffOp> {
    check_matrix(pi)?;
    let d = pi.len();
    let z = Monomial::zero(d);
    let mut acc = MultiDiffOp::term(Poly::one(d), vec![z.clone(), z]);
    for _ in 0..m {
        let mut next = MultiDiffOp::zero(d, 2);
        for (k, c) in acc.terms() {
            for (i, row) in pi.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    next.add_term(vec![k[0].with_incremented(i), k[1].with_incremented(j)], &c.scale(v));
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Closed-form Moyal coefficients P^m / (2^m m!) in the ħ-absorbed convention, with μ at ħ^0.
pub fn moyal_series(pi: &[Vec<Scalar>], order: usize) -> Result<HbarSeries<MultiDiffOp>> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut den = 1i64;
    for m in 0..=order {
        if m > 0 {
            den *= 2 * m as i64;
        }
        coeffs.push(moyal_operator(pi, m)?.scale(&Scalar::ratio(1, den)));
    }
    Ok(HbarSeries::new(coeffs))
}

/// f ⋆ g = Σ_{m≤N} (iħ)^m/(2^m m!) P^m(f, g), with an explicit i.
pub fn moyal_product(f: &Poly, g: &Poly, pi: &[Vec<Scalar>], order: usize) -> Result<HbarSeries<Poly>> {
    if f.dim() != pi.len() || g.dim() != pi.len() {
        return Err(Error::DimensionMismatch { expected: pi.len(), found: f.dim().max(g.dim()) });
    }
    let series = moyal_series(pi, order)?.rescale_hbar(&Scalar::i());
    let coeffs = series
        .coeffs()
        .iter()
        .map(|op| op.apply(&[f.clone(), g.clone()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(HbarSeries::new(coeffs))
}

/// Both sides of the Groenewold obstruction for exponents (a, b).
#[derive(Clone, Debug)]
pub struct GroenewoldReport {
    /// {q^a, p^b} − (1/12){{q^a, p^{b−1}}, {q^{a−1}, p^b}}.
    pub poisson_side: Poly,
    /// The same combination built from commutators of Weyl-quantized factors.
    pub operator_side: WeylOp,
    /// `operator_side − Q_W(poisson_side)`.
    pub discrepancy: WeylOp,
}

pub fn groenewold(a: u32, b: u32) -> Result<GroenewoldReport> {
    if a == 0 || b == 0 {
        return Err(Error::OutOfRange("Groenewold exponents must be positive".into()));
    }
    let pi = canonical_poisson(1);
    let mono = |qa: u32, pb: u32| Poly::monomial(2, Monomial(vec![qa, pb]), Scalar::one());
    let br = |f: &Poly, g: &Poly| pi.pairing(f, g);
    let outer = br(&mono(a, 0), &mono(0, b))?;
    let inner = br(&br(&mono(a, 0), &mono(0, b - 1))?, &br(&mono(a - 1, 0), &mono(0, b))?)?;
    let twelfth = Scalar::ratio(1, 12);
    let poisson_side = &outer - &inner.scale(&twelfth);

    let q = |f: &Poly| weyl_quantize(f);
    // 1/(iħ) is applied as a factor −i together with a ħ-degree drop
    let div_ih = |op: &WeylOp| -> Result<WeylOp> {
        let mut out = WeylOp::zero(op.n);
        for (k, c) in &op.terms {
            if k.hbar == 0 {
                return Err(Error::Parse("commutator without a factor of hbar".into()));
            }
            out.add_term(WeylKey { hbar: k.hbar - 1, ..k.clone() }, &(c * &-&Scalar::i()));
        }
        Ok(out)
    };
    let first = div_ih(&q(&mono(a, 0))?.commutator(&q(&mono(0, b))?)?)?;
    let l = div_ih(&q(&mono(a, 0))?.commutator(&q(&mono(0, b - 1))?)?)?;
    let r = div_ih(&q(&mono(a - 1, 0))?.commutator(&q(&mono(0, b))?)?)?;
    let second = div_ih(&l.commutator(&r)?)?;
    let operator_side = first.try_sub(&second.scale(&twelfth))?;
    let discrepancy = operator_side.try_sub(&weyl_quantize(&poisson_side)?)?;
    Ok(GroenewoldReport { poisson_side, operator_side, discrepancy })
}

/// The operator discrepancy of Groenewold's q³/p³ counterexample.
pub fn groenewold_residual() -> Result<WeylOp> {
    Ok(groenewold(3, 3)?.discrepancy)
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut parts = vec![format!("({c})")];
            if k.hbar > 0 {
                parts.push(if k.hbar == 1 { "hbar".into() } else { format!("hbar^{}", k.hbar) });
            }
            for (name, m) in [("Q", &k.q), ("P", &k.p)] {
                for (j, &e) in m.0.iter().enumerate() {
                    if e == 1 {
                        parts.push(format!("{name}{}", j + 1));
                    } else if e > 1 {
                        parts.push(format!("{name}{}^{e}", j + 1));
                    }
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylOp[n={}]({self})", self.n)
    }
}

#[derive(Serialize, Deserialize)]
struct WeylTermWire {
    q: Vec<u32>,
    p: Vec<u32>,
    hbar: u32,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct WeylWire {
    n: usize,
    terms: Vec<WeylTermWire>,
}

impl Serialize for WeylOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeylWire {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| WeylTermWire {
                    q: k.q.0.clone(),
                    p: k.p.0.clone(),
                    hbar: k.hbar,
                    re: crate::algebra::format_rational(&c.re),
                    im: crate::algebra::format_rational(&c.im),
                })
                .collect(),
        }
        .serialize(s)
    }
}
