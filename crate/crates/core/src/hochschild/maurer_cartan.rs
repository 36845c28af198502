//! Maurer–Cartan residuals, associators and the gauge action on ħ-series of operators.

use crate::algebra::{same_order, HbarSeries, Scalar};
use crate::error::{Error, Result};

use super::{gerstenhaber_bracket, modified_d, MultiDiffOp};

pub type OpSeries = HbarSeries<MultiDiffOp>;

/// Bracket of two operator series, truncated at the smaller order.
pub fn series_bracket(a: &OpSeries, b: &OpSeries) -> Result<OpSeries> {
    let (x, y) = (a.coeff(0), b.coeff(0));
    let arity = (x.arity() + y.arity()).saturating_sub(1);
    let zero = MultiDiffOp::zero(x.dim(), arity);
    a.convolve(b, &zero, gerstenhaber_bracket)
}

/// Composition-style insertion of two series into a fixed slot.
pub fn series_insert(a: &OpSeries, slot: usize, b: &OpSeries) -> Result<OpSeries> {
    let (x, y) = (a.coeff(0), b.coeff(0));
    let zero = MultiDiffOp::zero(x.dim(), x.arity() + y.arity() - 1);
    a.convolve(b, &zero, |f, g| f.insert(slot, g))
}

fn require_arity(s: &OpSeries, arity: usize) -> Result<()> {
    let found = s.coeff(0).arity();
    if found != arity {
        return Err(Error::WrongArity { expected: arity, found });
    }
    Ok(())
}

fn require_no_constant(s: &OpSeries) -> Result<()> {
    if !s.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    Ok(())
}

/// d_H B + ½[B, B]_G, truncated at the order of `b`.
pub fn mc_residual(b: &OpSeries) -> Result<OpSeries> {
    require_arity(b, 2)?;
    require_no_constant(b)?;
    let half = Scalar::ratio(1, 2);
    let bb = series_bracket(b, b)?;
    let mut coeffs = Vec::with_capacity(b.order() + 1);
    for k in 0..=b.order() {
        let mut r = modified_d(b.coeff(k));
        r.add_assign_scaled(bb.coeff(k), &half);
        coeffs.push(r);
    }
    Ok(HbarSeries::new(coeffs))
}

/// The arity-2 series μ + B.
pub fn with_mu(b: &OpSeries) -> OpSeries {
    let mut s = b.clone();
    let mu = MultiDiffOp::mu(b.coeff(0).dim());
    s.set(0, s.coeff(0).try_add(&mu).expect("same shape"));
    s
}

/// The associator (f⋆g)⋆h − f⋆(g⋆h) of an arity-2 series, as arity-3 operators per order.
pub fn associator(star: &OpSeries) -> Result<OpSeries> {
    require_arity(star, 2)?;
    let left = series_insert(star, 0, star)?;
    let right = series_insert(star, 1, star)?;
    left.try_sub(&right)
}

/// An element of ħ·D_poly⁰⟦ħ⟧ whose exponential is a gauge transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    generator: OpSeries,
}

impl GaugeElement {
    /// Validates arity 1, a vanishing ħ⁰ part, and that no term acts by multiplication
    /// (so the exponential fixes constants).
    pub fn new(generator: OpSeries) -> Result<Self> {
        require_arity(&generator, 1)?;
        require_no_constant(&generator)?;
        for k in 1..=generator.order() {
            if generator.coeff(k).terms().any(|(d, _)| d[0].is_zero()) {
                return Err(Error::GeneratorOnConstants);
            }
        }
        Ok(GaugeElement { generator })
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        GaugeElement { generator: HbarSeries::zero(&MultiDiffOp::zero(dim, 1), order) }
    }

    pub fn generator(&self) -> &OpSeries {
        &self.generator
    }

    pub fn order(&self) -> usize {
        self.generator.order()
    }

    pub fn neg(&self) -> GaugeElement {
        GaugeElement { generator: self.generator.scale(&Scalar::from_int(-1)) }
    }

    /// exp(X) = Σ X^k/k! under composition, an arity-1 series with ħ⁰ part the identity.
    pub fn exponential(&self) -> Result<OpSeries> {
        let dim = self.generator.coeff(0).dim();
        let n = self.order();
        let id = HbarSeries::constant(MultiDiffOp::identity(dim), n);
        let mut acc = id.clone();
        let mut term = id;
        for k in 1..=n {
            term = series_insert(&self.generator, 0, &term)?.scale(&Scalar::ratio(1, k as i64));
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }
}

/// e^{[−, x0]_G}(μ + B) − μ; at most N nested brackets survive truncation.
pub fn gauge_act(x0: &GaugeElement, b: &OpSeries) -> Result<OpSeries> {
    require_arity(b, 2)?;
    require_no_constant(b)?;
    same_order(x0.generator(), b)?;
    let y = with_mu(b);
    let mut acc = y.clone();
    let mut term = y;
    for k in 1..=b.order() {
        term = series_bracket(&term, x0.generator())?.scale(&Scalar::ratio(1, k as i64));
        acc = acc.try_add(&term)?;
    }
    let mu = MultiDiffOp::mu(b.coeff(0).dim());
    acc.set(0, acc.coeff(0).try_sub(&mu)?);
    Ok(acc)
}

/// Baker–Campbell–Hausdorff series through fourth-degree brackets, exact for truncation orders ≤ 4.
pub fn bch(x: &GaugeElement, y: &GaugeElement) -> Result<GaugeElement> {
    same_order(x.generator(), y.generator())?;
    let (x, y) = (x.generator(), y.generator());
    let xy = series_bracket(x, y)?;
    let x_xy = series_bracket(x, &xy)?;
    let y_xy = series_bracket(y, &xy)?;
    let y_x_xy = series_bracket(y, &x_xy)?;
    let z = x
        .try_add(y)?
        .try_add(&xy.scale(&Scalar::ratio(1, 2)))?
        .try_add(&x_xy.scale(&Scalar::ratio(1, 12)))?
        .try_sub(&y_xy.scale(&Scalar::ratio(1, 12)))?
        .try_sub(&y_x_xy.scale(&Scalar::ratio(1, 24)))?;
    GaugeElement::new(z)
}
