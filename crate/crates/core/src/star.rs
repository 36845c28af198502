//! Kontsevich star products assembled from graphs and weights, with their verification suite.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{HbarSeries, Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::graphs::{b_gamma, canonical_form, enumerate, AdmissibleGraph, EnumerateOptions, GraphKey};
use crate::hochschild::{
    associator, gerstenhaber_bracket, mc_residual, modified_d, series_insert, GaugeElement, MultiDiffOp,
    OpSeries,
};
use crate::polyvector::{hkr, is_poisson, PolyVectorField};
use crate::weights::{analytic_weight, mc_weight, WeightTable};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 3;

/// Sign c in d_H U₂(ξ₁,ξ₂) + [U₁ξ₁, U₁ξ₂]_G = c·U₁([ξ₁,ξ₂]_SN) under this crate's conventions.
pub const FORMALITY_SIGN: i64 = -1;

/// Where graph weights come from. Resolution order: analytic, then table, then Monte Carlo.
#[derive(Clone, Debug, Default)]
pub struct WeightSource {
    pub analytic: bool,
    pub table: Option<WeightTable>,
    pub monte_carlo: Option<MonteCarlo>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: u64,
    pub seed: u64,
}

impl WeightSource {
    /// Closed-form weights only.
    pub fn analytic() -> Self {
        WeightSource { analytic: true, ..Default::default() }
    }

    /// Closed-form weights, then the table.
    pub fn table(table: WeightTable) -> Self {
        WeightSource { analytic: true, table: Some(table), monte_carlo: None }
    }

    /// Closed-form weights, falling back to Monte Carlo.
    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        WeightSource { analytic: true, table: None, monte_carlo: Some(MonteCarlo { samples, seed }) }
    }

    /// Monte Carlo for every graph, including those with closed forms.
    pub fn monte_carlo_only(samples: u64, seed: u64) -> Self {
        WeightSource { analytic: false, table: None, monte_carlo: Some(MonteCarlo { samples, seed }) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightOrigin {
    Analytic,
    Table,
    MonteCarlo,
}

/// A weight as used in assembly: exact for closed forms, the dyadic value of the estimate otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedWeight {
    pub value: Scalar,
    pub std_error: f64,
    pub origin: WeightOrigin,
}

/// Provenance of one graph class contributing at one order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub order: usize,
    pub graph_key: String,
    pub weight: f64,
    pub std_error: f64,
    pub origin: WeightOrigin,
    /// Number of ordered graphs in the class.
    pub multiplicity: usize,
}

fn resolve_weight(rep: &AdmissibleGraph, source: &WeightSource) -> Result<ResolvedWeight> {
    if source.analytic {
        if let Some(value) = analytic_weight(rep) {
            return Ok(ResolvedWeight { value, std_error: 0.0, origin: WeightOrigin::Analytic });
        }
    }
    if let Some((mean, std_error)) = source.table.as_ref().and_then(|t| t.lookup(rep)) {
        let value = Scalar::from_f64(mean).ok_or_else(|| Error::MissingWeight(rep.to_string()))?;
        return Ok(ResolvedWeight { value, std_error, origin: WeightOrigin::Table });
    }
    if let Some(mc) = source.monte_carlo {
        let e = mc_weight(rep, mc.samples, mc.seed)?;
        let value = Scalar::from_f64(e.mean).ok_or_else(|| Error::MissingWeight(rep.to_string()))?;
        return Ok(ResolvedWeight { value, std_error: e.std_error, origin: WeightOrigin::MonteCarlo });
    }
    Err(Error::MissingWeight(canonical_form(rep).key.to_string()))
}

/// One isomorphism class: Σ_g sign(g)·B_g over its members, to be multiplied by W(representative).
struct ClassTerm {
    key: GraphKey,
    op: MultiDiffOp,
    weight: ResolvedWeight,
    multiplicity: usize,
}

/// Groups the connected graphs of G_{n,m} with out-degrees deg(ξ_k) by class and resolves one weight
/// per class whose operator sum is nonzero.
fn class_terms(m: usize, xs: &[PolyVectorField], source: &WeightSource) -> Result<Vec<ClassTerm>> {
    let n = xs.len();
    let degrees: Vec<usize> = xs.iter().map(PolyVectorField::degree).collect();
    let graphs = enumerate(n, m, &degrees, EnumerateOptions::default())?;
    let mut classes: BTreeMap<GraphKey, Vec<(AdmissibleGraph, i8)>> = BTreeMap::new();
    for g in graphs {
        let cf = canonical_form(&g);
        classes.entry(cf.key).or_default().push((g, cf.weight_sign));
    }
    let classes: Vec<_> = classes.into_iter().collect();
    let terms: Vec<Option<ClassTerm>> = classes
        .par_iter()
        .map(|(key, members)| -> Result<Option<ClassTerm>> {
            let d = xs[0].dim();
            let mut op = MultiDiffOp::zero(d, m);
            for (g, sign) in members {
                if *sign != 0 {
                    op = op.try_add(&b_gamma(g, xs)?.scale(&Scalar::from_int(*sign as i64)))?;
                }
            }
            if op.is_zero() {
                return Ok(None);
            }
            let rep = AdmissibleGraph::from_encoded(key.n, key.m, &key.stars)?;
            let weight = resolve_weight(&rep, source)?;
            Ok(Some(ClassTerm { key: key.clone(), op, weight, multiplicity: members.len() }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(terms.into_iter().flatten().collect())
}

/// U_n(ξ₁,…,ξ_n) = Σ_Γ W_Γ B_Γ(ξ₁,…,ξ_n) over graphs with m ground vertices.
pub fn formality_component(m: usize, xs: &[PolyVectorField], source: &WeightSource) -> Result<MultiDiffOp> {
    let d = xs.first().map(PolyVectorField::dim).ok_or(Error::UnsupportedAerial(0))?;
    let mut out = MultiDiffOp::zero(d, m);
    for t in class_terms(m, xs, source)? {
        out = out.try_add(&t.op.scale(&t.weight.value))?;
    }
    Ok(out)
}

/// μ + Σ_{n≥1} ħⁿ B_n with B_n = U_n(π,…,π)/n!, plus the per-class provenance of each order.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    series: OpSeries,
    provenance: Vec<GraphRecord>,
}

impl StarProduct {
    /// Wraps an arity-2 series whose ħ⁰ coefficient is μ.
    pub fn from_series(series: OpSeries) -> Result<Self> {
        let c0 = series.coeff(0);
        if c0.arity() != 2 {
            return Err(Error::WrongArity { expected: 2, found: c0.arity() });
        }
        if *c0 != MultiDiffOp::mu(c0.dim()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(StarProduct { series, provenance: Vec::new() })
    }

    /// The undeformed product μ.
    pub fn pointwise(dim: usize, order: usize) -> Self {
        let mut series = HbarSeries::zero(&MultiDiffOp::zero(dim, 2), order);
        series.set(0, MultiDiffOp::mu(dim));
        StarProduct { series, provenance: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn dim(&self) -> usize {
        self.series.coeff(0).dim()
    }

    /// The full series, μ included.
    pub fn series(&self) -> &OpSeries {
        &self.series
    }

    /// B_k, the ħ^k coefficient.
    pub fn coefficient(&self, k: usize) -> &MultiDiffOp {
        self.series.coeff(k)
    }

    /// The deformation s − μ.
    pub fn deformation(&self) -> OpSeries {
        let mut b = self.series.clone();
        b.set(0, MultiDiffOp::zero(self.dim(), 2));
        b
    }

    pub fn provenance(&self) -> &[GraphRecord] {
        &self.provenance
    }

    /// Largest standard error among the weights used.
    pub fn max_weight_std_error(&self) -> f64 {
        self.provenance.iter().map(|r| r.std_error).fold(0.0, f64::max)
    }

    /// f ⋆ g as an ħ-series of polynomials.
    pub fn apply(&self, f: &Poly, g: &Poly) -> Result<HbarSeries<Poly>> {
        let coeffs = self.series.coeffs().iter().map(|b| b.apply(&[f.clone(), g.clone()])).collect::<Result<_>>()?;
        Ok(HbarSeries::new(coeffs))
    }
}

#[derive(Serialize)]
struct StarWire<'a> {
    order: usize,
    dim: usize,
    terms: &'a [MultiDiffOp],
    provenance: &'a [GraphRecord],
}

impl Serialize for StarProduct {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StarWire { order: self.order(), dim: self.dim(), terms: self.series.coeffs(), provenance: &self.provenance }
            .serialize(s)
    }
}

fn check_bivector(pi: &PolyVectorField) -> Result<()> {
    if pi.degree() != 2 {
        return Err(Error::NotABivector(format!("degree {}", pi.degree())));
    }
    Ok(())
}

/// Assembles ⋆ = μ + Σ_{n≤N} ħⁿ/n! Σ_Γ W_Γ B_Γ(π,…,π) over connected graphs in G_{n,2}.
pub fn assemble(pi: &PolyVectorField, order: usize, source: &WeightSource) -> Result<StarProduct> {
    check_bivector(pi)?;
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge(order));
    }
    let (poisson, jacobiator) = is_poisson(pi)?;
    if !poisson {
        return Err(Error::NotPoisson(jacobiator.components().count()));
    }
    let d = pi.dim();
    let mut star = StarProduct::pointwise(d, order);
    let mut fact = 1i64;
    for n in 1..=order {
        fact *= n as i64;
        let xs = vec![pi.clone(); n];
        let mut bn = MultiDiffOp::zero(d, 2);
        for t in class_terms(2, &xs, source)? {
            bn = bn.try_add(&t.op.scale(&t.weight.value))?;
            star.provenance.push(GraphRecord {
                order: n,
                graph_key: t.key.to_string(),
                weight: t.weight.value.re_f64(),
                std_error: t.weight.std_error,
                origin: t.weight.origin,
                multiplicity: t.multiplicity,
            });
        }
        star.series.set(n, bn.scale(&Scalar::ratio(1, fact)));
    }
    Ok(star)
}

/// Converts a series in the ħ-absorbed real convention to the explicit-i convention (ħ ↦ iħ).
pub fn to_explicit_i(series: &OpSeries) -> OpSeries {
    series.rescale_hbar(&Scalar::i())
}

/// Inverse of [`to_explicit_i`] (ħ ↦ −iħ).
pub fn from_explicit_i(series: &OpSeries) -> OpSeries {
    series.rescale_hbar(&-Scalar::i())
}

/// B₁ − B₁ᵀ read as a bivector; its pairing reproduces the commutator at order ħ.
pub fn first_order_bracket(s: &StarProduct) -> Result<PolyVectorField> {
    if s.order() < 1 {
        return Err(Error::OrderMismatch(s.order(), 1));
    }
    let b1 = s.coefficient(1);
    let c = b1.try_sub(&b1.transpose()?)?;
    let d = s.dim();
    let mut comps = Vec::new();
    for (derivs, coeff) in c.terms() {
        if derivs.iter().any(|m| m.degree() != 1) {
            return Err(Error::NotABivector(format!("term {coeff} with derivatives of order {:?}", c.slot_orders())));
        }
        let i = derivs[0].0.iter().position(|&e| e == 1).expect("first order");
        let j = derivs[1].0.iter().position(|&e| e == 1).expect("first order");
        if i < j {
            comps.push((vec![i, j], coeff.clone()));
        }
    }
    PolyVectorField::from_components(d, 2, comps)
}

/// Per-order associativity diagnostics of a truncated star product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociativityReport {
    pub order: usize,
    /// Largest coefficient magnitude of mc_residual(s − μ) at each order 0..=N.
    pub mc_residual: Vec<f64>,
    /// Largest coefficient magnitude of (f⋆g)⋆h − f⋆(g⋆h) over all monomial triples, per order.
    pub associator_on_monomials: Vec<f64>,
    /// Largest coefficient of the ħ^{N+1} part of ½[B,B], which order N+1 terms would have to cancel.
    pub next_order_obstruction: f64,
    pub max_monomial_degree: u32,
    pub triples: usize,
    /// Largest standard error among the weights used; zero for exact weights.
    pub max_weight_std_error: f64,
}

impl AssociativityReport {
    /// True when every residual through order N is exactly zero.
    pub fn is_exact(&self) -> bool {
        self.mc_residual.iter().chain(&self.associator_on_monomials).all(|&x| x == 0.0)
    }
}

pub fn verify_associativity(s: &StarProduct, max_monomial_degree: u32) -> Result<AssociativityReport> {
    let b = s.deformation();
    let residual = mc_residual(&b)?;
    let mut padded = b.coeffs().to_vec();
    padded.push(MultiDiffOp::zero(s.dim(), 2));
    let next = mc_residual(&HbarSeries::new(padded))?;
    let assoc = associator(s.series())?;
    let monomials: Vec<Poly> = Monomial::all_up_to(s.dim(), max_monomial_degree)
        .into_iter()
        .map(|m| Poly::monomial(s.dim(), m, Scalar::one()))
        .collect();
    let k = monomials.len();
    let triples: Vec<(usize, usize, usize)> =
        (0..k).flat_map(|a| (0..k).flat_map(move |b| (0..k).map(move |c| (a, b, c)))).collect();
    let per_triple: Vec<Vec<f64>> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            let t = [monomials[a].clone(), monomials[b].clone(), monomials[c].clone()];
            assoc
                .coeffs()
                .iter()
                .map(|op| op.apply(&t).map(|p| p.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut on_monomials = vec![0.0f64; s.order() + 1];
    for row in &per_triple {
        for (acc, x) in on_monomials.iter_mut().zip(row) {
            *acc = acc.max(*x);
        }
    }
    Ok(AssociativityReport {
        order: s.order(),
        mc_residual: residual.coeffs().iter().map(MultiDiffOp::max_abs_coeff).collect(),
        associator_on_monomials: on_monomials,
        next_order_obstruction: next.coeff(s.order() + 1).max_abs_coeff(),
        max_monomial_degree,
        triples: triples.len(),
        max_weight_std_error: s.max_weight_std_error(),
    })
}

/// ⋆' = φ ∘ ⋆ ∘ (φ⁻¹ ⊗ φ⁻¹) with φ = exp(X), truncated at the common order.
pub fn gauge_transform(s: &StarProduct, x: &GaugeElement) -> Result<StarProduct> {
    if x.order() != s.order() {
        return Err(Error::OrderMismatch(x.order(), s.order()));
    }
    let phi = x.exponential()?;
    let phi_inv = x.neg().exponential()?;
    let inner = series_insert(&series_insert(s.series(), 0, &phi_inv)?, 1, &phi_inv)?;
    let series = series_insert(&phi, 0, &inner)?;
    Ok(StarProduct { series, provenance: s.provenance.clone() })
}

/// Discrepancy of the formality equation evaluated on concrete arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalityReport {
    /// (d_H U_n + quadratic terms − c·U₁(bracket)) applied to the arguments.
    pub discrepancy: Poly,
    pub max_abs: f64,
    /// Propagated weight standard error at the coefficient with the largest ratio |discrepancy|/σ.
    pub sigma: f64,
    /// Every coefficient lies within 3σ of zero (exactly zero where σ = 0).
    pub within_tolerance: bool,
}

/// Evaluates the formality equation at n ∈ {1, 2}: d_H U₁(ξ) = 0, and
/// d_H U₂(ξ₁,ξ₂) + [U₁ξ₁, U₁ξ₂]_G − c·U₁([ξ₁,ξ₂]_SN) = 0 with c = [`FORMALITY_SIGN`].
pub fn formality_residual(xs: &[PolyVectorField], fs: &[Poly], source: &WeightSource) -> Result<FormalityReport> {
    let exact = |op: &MultiDiffOp| -> Result<FormalityReport> {
        let p = op.apply(fs)?;
        let max_abs = p.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max);
        Ok(FormalityReport { within_tolerance: p.is_zero(), discrepancy: p, max_abs, sigma: 0.0 })
    };
    match xs {
        [x] => exact(&modified_d(&hkr(x))),
        [x1, x2] => {
            if x1.dim() != x2.dim() {
                return Err(Error::DimensionMismatch { expected: x1.dim(), found: x2.dim() });
            }
            let m = (x1.degree() + x2.degree()) as i64 - 2;
            if !(1..=2).contains(&m) {
                return Err(Error::UnsupportedFormality(format!(
                    "degrees ({}, {}) need weights on m = {m} ground points",
                    x1.degree(),
                    x2.degree()
                )));
            }
            let quadratic = gerstenhaber_bracket(&hkr(x1), &hkr(x2))?;
            let bracket = hkr(&x1.schouten_nijenhuis(x2)?).scale(&Scalar::from_int(FORMALITY_SIGN));
            let mut total = quadratic.try_sub(&bracket)?.apply(fs)?;
            // per-class contributions for error propagation
            let mut parts: Vec<(Poly, f64)> = Vec::new();
            for t in class_terms(m as usize, xs, source)? {
                let p = modified_d(&t.op).apply(fs)?;
                total = total.try_add(&p.scale(&t.weight.value))?;
                parts.push((p, t.weight.std_error));
            }
            let mut worst = (0.0f64, 0.0f64, true);
            let mut max_abs = 0.0f64;
            for (mono, c) in total.terms() {
                let r = c.abs_f64();
                max_abs = max_abs.max(r);
                let var: f64 = parts.iter().map(|(p, se)| (se * p.coeff(mono).abs_f64()).powi(2)).sum();
                let sigma = var.sqrt();
                let ok = r <= 3.0 * sigma;
                let ratio = if sigma > 0.0 { r / sigma } else { f64::INFINITY };
                if !ok || worst.0 == 0.0 || ratio > worst.0 / worst.1.max(f64::MIN_POSITIVE) {
                    worst = (r, sigma, worst.2 && ok);
                }
                worst.2 &= ok;
            }
            Ok(FormalityReport { discrepancy: total, max_abs, sigma: worst.1, within_tolerance: worst.2 })
        }
        _ => Err(Error::UnsupportedFormality(format!("n = {}", xs.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyvector::so3_lie_poisson as so3;
    use crate::weyl::{canonical_poisson, moyal_series};

    #[test]
    fn moyal_coincidence_r2() {
        let pi = canonical_poisson(1);
        let s = assemble(&pi, 3, &WeightSource::analytic()).unwrap();
        let m = moyal_series(&pi.to_matrix().unwrap(), 3).unwrap();
        assert_eq!(s.series(), &m);
        assert!(verify_associativity(&s, 2).unwrap().is_exact());
    }

    #[test]
    fn zero_bivector_gives_pointwise_product() {
        let s = assemble(&PolyVectorField::zero(3, 2), 2, &WeightSource::analytic()).unwrap();
        assert_eq!(s, StarProduct::pointwise(3, 2));
    }

    #[test]
    fn so3_first_order() {
        let pi = so3();
        let s = assemble(&pi, 1, &WeightSource::analytic()).unwrap();
        assert_eq!(first_order_bracket(&s).unwrap(), pi);
        let report = verify_associativity(&s, 1).unwrap();
        assert!(report.is_exact());
        assert!(report.next_order_obstruction > 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = |i| Poly::var(3, i);
        let bad = PolyVectorField::from_components(3, 2, [(vec![0, 1], x(1)), (vec![1, 2], Poly::one(3))]).unwrap();
        assert!(matches!(assemble(&bad, 1, &WeightSource::analytic()), Err(Error::NotPoisson(_))));
        assert!(matches!(assemble(&so3(), 4, &WeightSource::analytic()), Err(Error::OrderTooLarge(4))));
        assert!(matches!(assemble(&so3(), 2, &WeightSource::analytic()), Err(Error::MissingWeight(_))));
    }

    #[test]
    fn unit_law_and_gauge_invariance() {
        let d = 3;
        let s = assemble(&so3(), 1, &WeightSource::analytic()).unwrap();
        let e = |i| Monomial::unit(d, i);
        let gen = MultiDiffOp::term(Poly::var(d, 0), vec![&e(1) + &e(2)])
            .try_add(&MultiDiffOp::term(Poly::one(d), vec![e(0)]))
            .unwrap();
        let x = GaugeElement::new(HbarSeries::new(vec![MultiDiffOp::zero(d, 1), gen])).unwrap();
        let t = gauge_transform(&s, &x).unwrap();
        assert_eq!(first_order_bracket(&t).unwrap(), first_order_bracket(&s).unwrap());
        let f = &Poly::var(d, 0).pow(2) * &Poly::var(d, 2);
        let one = Poly::one(d);
        for star in [&s, &t] {
            let l = star.apply(&one, &f).unwrap();
            let r = star.apply(&f, &one).unwrap();
            assert_eq!(l.coeff(0), &f);
            assert_eq!(r.coeff(0), &f);
            for k in 1..=star.order() {
                assert!(l.coeff(k).is_zero() && r.coeff(k).is_zero());
            }
        }
        let via_bracket = crate::hochschild::with_mu(&crate::hochschild::gauge_act(&x.neg(), &s.deformation()).unwrap());
        assert_eq!(t.series(), &via_bracket);
    }

    #[test]
    fn explicit_i_round_trip() {
        let pi = canonical_poisson(1);
        let s = assemble(&pi, 2, &WeightSource::analytic()).unwrap();
        assert_eq!(&from_explicit_i(&to_explicit_i(s.series())), s.series());
    }

    #[test]
    fn formality_low_orders() {
        let xi = so3();
        let fs: Vec<Poly> = (0..3).map(|i| Poly::var(3, i).pow(2)).collect();
        assert!(formality_residual(&[xi.clone()], &fs, &WeightSource::analytic()).unwrap().within_tolerance);
        // constant inputs need only closed-form weights
        let a = PolyVectorField::basis(3, &[0, 1], Poly::one(3)).unwrap();
        let b = PolyVectorField::basis(3, &[1, 2], Poly::constant(3, Scalar::from_int(2))).unwrap();
        let r = formality_residual(&[a, b], &fs, &WeightSource::analytic()).unwrap();
        assert!(r.discrepancy.is_zero());
    }
}
