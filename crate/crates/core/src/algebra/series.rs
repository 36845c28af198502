//! Formal power series in ħ truncated at a fixed order.

use crate::error::{Error, Result};

use super::{Poly, Scalar};

/// Values that can sit in an ħ-series slot.
pub trait Payload: Clone + PartialEq {
    /// The zero with the same shape (dimension, arity) as `self`.
    fn zero_like(&self) -> Self;
    fn is_zero_payload(&self) -> bool;
    fn try_add_payload(&self, other: &Self) -> Result<Self>;
    fn scale_payload(&self, s: &Scalar) -> Self;
}

/// Payloads with a product, used by [`HbarSeries::try_mul`].
pub trait MulPayload: Payload {
    fn try_mul_payload(&self, other: &Self) -> Result<Self>;
}

impl Payload for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn is_zero_payload(&self) -> bool {
        self.is_zero()
    }
    fn try_add_payload(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn scale_payload(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl MulPayload for Scalar {
    fn try_mul_payload(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
}

impl Payload for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.dim())
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

impl MulPayload for Poly {
    fn try_mul_payload(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)
    }
}

/// `Σ_{k≤N} ħ^k c_k`; every operation drops terms above the truncation order.
#[derive(Clone, PartialEq, Debug)]
pub struct HbarSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Payload> HbarSeries<T> {
    /// Builds a series from `c_0, …, c_N`. Panics on an empty vector.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the hbar^0 coefficient");
        HbarSeries { coeffs }
    }

    /// The zero series shaped like `template`.
    pub fn zero(template: &T, order: usize) -> Self {
        HbarSeries { coeffs: vec![template.zero_like(); order + 1] }
    }

    /// `c` placed at ħ^0.
    pub fn constant(c: T, order: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = c;
        HbarSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn set(&mut self, k: usize, c: T) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Payload::is_zero_payload)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        HbarSeries { coeffs: self.coeffs[..keep].to_vec() }
    }

    /// Sum; the result has the smaller of the two truncation orders.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.coeffs[k].try_add_payload(&other.coeffs[k]))
            .collect::<Result<Vec<_>>>()?;
        Ok(HbarSeries { coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        HbarSeries { coeffs: self.coeffs.iter().map(|c| c.scale_payload(s)).collect() }
    }

    /// Multiplies the ħ^k coefficient by `s^k`, i.e. substitutes ħ ↦ s·ħ.
    pub fn rescale_hbar(&self, s: &Scalar) -> Self {
        let mut f = Scalar::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.scale_payload(&f));
            f = &f * s;
        }
        HbarSeries { coeffs }
    }

    /// Cauchy product with an arbitrary bilinear pairing, truncated at `min(N_a, N_b)`.
    pub fn convolve<U: Payload, V: Payload>(
        &self,
        other: &HbarSeries<U>,
        zero: &V,
        mut pair: impl FnMut(&T, &U) -> Result<V>,
    ) -> Result<HbarSeries<V>> {
        let n = self.order().min(other.order());
        let mut coeffs = vec![zero.zero_like(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero_payload() {
                continue;
            }
            for j in 0..=(n - i) {
                if other.coeffs[j].is_zero_payload() {
                    continue;
                }
                let t = pair(&self.coeffs[i], &other.coeffs[j])?;
                coeffs[i + j] = coeffs[i + j].try_add_payload(&t)?;
            }
        }
        Ok(HbarSeries { coeffs })
    }
}

impl<T: MulPayload> HbarSeries<T> {
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let zero = self.coeffs[0].zero_like();
        self.convolve(other, &zero, |a, b| a.try_mul_payload(b))
    }
}

impl HbarSeries<Scalar> {
    pub fn from_scalars(coeffs: Vec<Scalar>) -> Self {
        HbarSeries::new(coeffs)
    }
}

/// Checks that two series share a truncation order.
pub fn same_order<A: Payload, B: Payload>(a: &HbarSeries<A>, b: &HbarSeries<B>) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch(a.order(), b.order()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[i64]) -> HbarSeries<Scalar> {
        HbarSeries::new(v.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    #[test]
    fn telescoping() {
        let p = Poly::var(1, 0);
        let a = HbarSeries::new(vec![Poly::one(1), p.clone()]);
        let b = HbarSeries::new(vec![Poly::one(1), -&p]);
        let c = a.try_mul(&b).unwrap();
        assert_eq!(c, HbarSeries::constant(Poly::one(1), 1));
    }

    #[test]
    fn truncation_kills_high_orders() {
        let a = HbarSeries::new(vec![Poly::zero(2), Poly::var(2, 0)]);
        let b = HbarSeries::new(vec![Poly::zero(2), Poly::var(2, 1)]);
        assert!(a.try_mul(&b).unwrap().is_zero());
    }

    #[test]
    fn square_of_one_plus_hbar() {
        assert_eq!(s(&[1, 1, 0]).try_mul(&s(&[1, 1, 0])).unwrap(), s(&[1, 2, 1]));
    }

    #[test]
    fn add_takes_min_order() {
        assert_eq!(s(&[1, 2, 3]).try_add(&s(&[1, 1])).unwrap(), s(&[2, 3]));
    }

    #[test]
    fn incompatible_payloads() {
        let a = HbarSeries::constant(Poly::one(1), 1);
        let b = HbarSeries::constant(Poly::one(2), 1);
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn hbar_rescaling() {
        let r = s(&[1, 1, 1]).rescale_hbar(&Scalar::i());
        assert_eq!(r.coeff(1), &Scalar::i());
        assert_eq!(r.coeff(2), &Scalar::from_int(-1));
    }
}
