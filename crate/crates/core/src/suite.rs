//! Randomised and exhaustive property suites, shared by the command line and the acceptance target.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{HbarSeries, Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::hochschild::{
    associator, bch, gauge_act, gerstenhaber_bracket, hochschild_delta, koszul_sign_sym, mc_residual, modified_d, mu,
    with_mu, GaugeElement, MultiDiffOp, OpSeries,
};
use crate::oracle::{bch_by_logarithm, koszul_sign_by_transpositions, sn_by_definition};
use crate::polyvector::{hkr, so3_lie_poisson, PolyVectorField};
use crate::star::{assemble, first_order_bracket, gauge_transform, WeightSource};
use crate::weyl::{canonical_poisson, groenewold, moyal_series, weyl_quantize};

/// Result of one property over a batch of cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case, or a summary note on success.
    pub note: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}/{} cases", self.name, self.cases - self.failures, self.cases)?;
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &["dgla", "mc", "hkr", "bracket", "groenewold", "moyal", "oracles"];

/// Runs one named suite, or all of them for "all".
pub fn run_suite(name: &str, cases: usize, seed: u64) -> Result<Vec<SuiteOutcome>> {
    match name {
        "dgla" => Ok(dgla_suite(cases, seed)),
        "mc" => Ok(vec![mc_associator_suite(cases, seed)]),
        "hkr" => Ok(vec![hkr_chain_map_suite(cases, seed)]),
        "bracket" => Ok(vec![first_order_bracket_suite(cases, seed)?]),
        "groenewold" => groenewold_suite(),
        "moyal" => moyal_suite(seed),
        "oracles" => Ok(vec![koszul_suite(cases, seed), bch_suite(cases, seed)]),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cases, seed)?);
            }
            Ok(out)
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// Deterministic generator for case `index` of a suite.
pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn small_int(rng: &mut impl Rng) -> Scalar {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3i64..=3);
    }
    Scalar::from_int(c)
}

fn random_monomial(rng: &mut impl Rng, d: usize, max_deg: u32) -> Monomial {
    let deg = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; d];
    for _ in 0..deg {
        e[rng.gen_range(0..d)] += 1;
    }
    Monomial(e)
}

/// A polynomial with up to `max_terms` small integer terms of degree ≤ `max_deg`.
pub fn random_poly(rng: &mut impl Rng, d: usize, max_deg: u32, max_terms: usize) -> Poly {
    let mut p = Poly::zero(d);
    for _ in 0..rng.gen_range(1..=max_terms) {
        p = &p + &Poly::monomial(d, random_monomial(rng, d, max_deg), small_int(rng));
    }
    p
}

/// A multidifferential operator with derivative order ≤ `max_order` per slot and coefficients of degree ≤ 2.
pub fn random_multidiff(rng: &mut impl Rng, d: usize, arity: usize, max_order: u32, max_terms: usize) -> MultiDiffOp {
    let mut op = MultiDiffOp::zero(d, arity);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let derivs = (0..arity).map(|_| random_monomial(rng, d, max_order)).collect();
        let t = MultiDiffOp::term(random_poly(rng, d, 2, 2), derivs);
        op = op.try_add(&t).expect("same shape");
    }
    op
}

/// A polyvector field of the given degree with coefficients of degree ≤ `max_deg`.
pub fn random_polyvector(rng: &mut impl Rng, d: usize, degree: usize, max_deg: u32) -> PolyVectorField {
    let mut x = PolyVectorField::zero(d, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(degree);
        idx.sort_unstable();
        let b = PolyVectorField::basis(d, &idx, random_poly(rng, d, max_deg, 2)).expect("valid indices");
        x = x.try_add(&b).expect("same shape");
    }
    x
}

/// A nonzero bivector on R^d whose coefficients are linear forms with entries in −2..=2.
pub fn random_linear_bivector(rng: &mut impl Rng, d: usize) -> PolyVectorField {
    loop {
        let mut comps = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let mut c = Poly::zero(d);
                for k in 0..d {
                    c = &c + &Poly::var(d, k).scale(&Scalar::from_int(rng.gen_range(-2..=2)));
                }
                comps.push((vec![i, j], c));
            }
        }
        let x = PolyVectorField::from_components(d, 2, comps).expect("valid indices");
        if !x.is_zero() {
            return x;
        }
    }
}

/// A monomial with coefficient 1 and degree in 1..=max_deg.
pub fn random_nonconstant_monomial(rng: &mut impl Rng, d: usize, max_deg: u32) -> Poly {
    let deg = rng.gen_range(1..=max_deg.max(1));
    let mut e = vec![0u32; d];
    for _ in 0..deg {
        e[rng.gen_range(0..d)] += 1;
    }
    Poly::monomial(d, Monomial(e), Scalar::one())
}

/// A gauge generator with derivative orders 1..=2 at every positive ħ-order.
pub fn random_gauge(rng: &mut impl Rng, d: usize, order: usize) -> GaugeElement {
    let mut coeffs = vec![MultiDiffOp::zero(d, 1)];
    for _ in 1..=order {
        let mut op = MultiDiffOp::zero(d, 1);
        for _ in 0..rng.gen_range(1..=2) {
            let mut m = random_monomial(rng, d, 1);
            m.0[rng.gen_range(0..d)] += 1;
            op = op.try_add(&MultiDiffOp::term(random_poly(rng, d, 2, 2), vec![m])).expect("same shape");
        }
        coeffs.push(op);
    }
    GaugeElement::new(HbarSeries::new(coeffs)).expect("generators have no zero-order part")
}

fn random_b(rng: &mut impl Rng, d: usize, order: usize) -> OpSeries {
    let mut coeffs = vec![MultiDiffOp::zero(d, 2)];
    for _ in 1..=order {
        coeffs.push(random_multidiff(rng, d, 2, 2, 3));
    }
    HbarSeries::new(coeffs)
}

/// Runs `check` on `cases` independent random cases in parallel; failures are reported in case order.
fn run_cases<F>(name: &str, cases: usize, seed: u64, check: F) -> SuiteOutcome
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<String>> + Sync,
{
    let results: Vec<Option<String>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            match check(&mut rng) {
                Ok(r) => r.map(|m| format!("case {i}: {m}")),
                Err(e) => Some(format!("case {i}: error {e}")),
            }
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_some()).count();
    SuiteOutcome { name: name.into(), cases, failures, note: results.into_iter().flatten().next() }
}

fn fail_unless(ok: bool, what: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(what)
}

/// δ² = 0, d_H = [μ, −]_G, graded Jacobi and Leibniz for both brackets, and SN against its definition.
pub fn dgla_suite(cases: usize, seed: u64) -> Vec<SuiteOutcome> {
    let dim = |rng: &mut ChaCha8Rng| rng.gen_range(1..=3usize);
    let op = |rng: &mut ChaCha8Rng, d: usize| {
        let arity = rng.gen_range(1..=2);
        random_multidiff(rng, d, arity, 2, 2)
    };
    let pv = |rng: &mut ChaCha8Rng, d: usize, min: usize| {
        let k = rng.gen_range(min..=d.min(3));
        random_polyvector(rng, d, k, 2)
    };
    let sgn = |k: i64| Scalar::from_int(if k.rem_euclid(2) == 0 { 1 } else { -1 });
    vec![
        run_cases("hochschild delta squared", cases, seed, |rng| {
            let d = dim(rng);
            let f = op(rng, d);
            Ok(fail_unless(hochschild_delta(&hochschild_delta(&f)).is_zero(), || format!("{f}")))
        }),
        run_cases("d_H equals bracket with mu", cases, seed ^ 1, |rng| {
            let d = dim(rng);
            let f = op(rng, d);
            Ok(fail_unless(modified_d(&f) == gerstenhaber_bracket(&mu(d), &f)?, || format!("{f}")))
        }),
        run_cases("Gerstenhaber graded Jacobi", cases, seed ^ 2, |rng| {
            let d = dim(rng);
            let (f, g, h) = (op(rng, d), op(rng, d), op(rng, d));
            let br = gerstenhaber_bracket;
            let lhs = br(&f, &br(&g, &h)?)?;
            let rhs = br(&br(&f, &g)?, &h)?.try_add(&br(&g, &br(&f, &h)?)?.scale(&sgn(f.degree() * g.degree())))?;
            Ok(fail_unless(lhs == rhs, || format!("{f} | {g} | {h}")))
        }),
        run_cases("Gerstenhaber graded Leibniz", cases, seed ^ 3, |rng| {
            let d = dim(rng);
            let (f, g) = (op(rng, d), op(rng, d));
            let br = gerstenhaber_bracket;
            let lhs = modified_d(&br(&f, &g)?);
            let rhs = br(&modified_d(&f), &g)?.try_add(&br(&f, &modified_d(&g))?.scale(&sgn(f.degree())))?;
            Ok(fail_unless(lhs == rhs, || format!("{f} | {g}")))
        }),
        run_cases("Schouten-Nijenhuis graded Jacobi", cases, seed ^ 4, |rng| {
            let d = dim(rng);
            let (x, y, z) = (pv(rng, d, 1), pv(rng, d, 1), pv(rng, d, 0));
            let br = |a: &PolyVectorField, b: &PolyVectorField| a.schouten_nijenhuis(b);
            let (a, b) = (x.degree() as i64 - 1, y.degree() as i64 - 1);
            let lhs = br(&x, &br(&y, &z)?)?;
            let rhs = br(&br(&x, &y)?, &z)?.try_add(&br(&y, &br(&x, &z)?)?.scale(&sgn(a * b)))?;
            Ok(fail_unless(lhs == rhs, || format!("{x} | {y} | {z}")))
        }),
        run_cases("Schouten-Nijenhuis graded Leibniz", cases, seed ^ 5, |rng| {
            let d = dim(rng);
            let (x, y, z) = (pv(rng, d, 1), pv(rng, d, 0), pv(rng, d, 0));
            let lhs = x.schouten_nijenhuis(&y.wedge(&z)?)?;
            let s = sgn((x.degree() as i64 - 1) * y.degree() as i64);
            let rhs = x.schouten_nijenhuis(&y)?.wedge(&z)?.try_add(&y.wedge(&x.schouten_nijenhuis(&z)?)?.scale(&s))?;
            Ok(fail_unless(lhs == rhs, || format!("{x} | {y} | {z}")))
        }),
        run_cases("Schouten-Nijenhuis via diamond matches definition", cases, seed ^ 6, |rng| {
            let d = dim(rng);
            let (x, y) = (pv(rng, d, 1), pv(rng, d, 0));
            Ok(fail_unless(x.schouten_nijenhuis(&y)? == sn_by_definition(&x, &y)?, || format!("{x} | {y}")))
        }),
    ]
}

/// mc_residual(B) equals the associator of μ + B at every order, for random B truncated at ħ².
pub fn mc_associator_suite(cases: usize, seed: u64) -> SuiteOutcome {
    run_cases("Maurer-Cartan residual equals associator", cases, seed, |rng| {
        let d = rng.gen_range(1..=3);
        let b = random_b(rng, d, 2);
        Ok(fail_unless(mc_residual(&b)? == associator(&with_mu(&b))?, || format!("{:?}", b.coeffs())))
    })
}

/// d_H(hkr(X)) = 0 for random polyvector fields.
pub fn hkr_chain_map_suite(cases: usize, seed: u64) -> SuiteOutcome {
    run_cases("HKR map is a chain map", cases, seed, |rng| {
        let d = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=d);
        let x = random_polyvector(rng, d, k, 2);
        Ok(fail_unless(modified_d(&hkr(&x)).is_zero(), || format!("{x}")))
    })
}

/// For so(3): the order-ħ bracket of the assembled product is π, before and after random gauge transforms.
pub fn first_order_bracket_suite(gauges: usize, seed: u64) -> Result<SuiteOutcome> {
    let pi = so3_lie_poisson();
    let s = assemble(&pi, 1, &WeightSource::analytic())?;
    let base = first_order_bracket(&s)?;
    let mut out = run_cases("first-order bracket is gauge invariant", gauges, seed, |rng| {
        let x = random_gauge(rng, 3, 1);
        let t = gauge_transform(&s, &x)?;
        Ok(fail_unless(first_order_bracket(&t)? == pi, || format!("{:?}", x.generator().coeffs())))
    });
    out.cases += 1;
    if base != pi {
        out.failures += 1;
        out.note = Some(format!("assembled bracket {base} differs from {pi}"));
    }
    Ok(out)
}

/// The q³/p³ obstruction and the exactness of quantization on brackets with quadratic polynomials.
pub fn groenewold_suite() -> Result<Vec<SuiteOutcome>> {
    let r = groenewold(3, 3)?;
    let ih = Scalar::i();
    let expected = crate::weyl::WeylOp::term(1, Monomial::zero(1), Monomial::zero(1), 2, &Scalar::from_int(3) * &(&ih * &ih));
    let ok = r.poisson_side.is_zero() && r.discrepancy == expected;
    let obstruction = SuiteOutcome {
        name: "Groenewold obstruction".into(),
        cases: 1,
        failures: usize::from(!ok),
        note: Some(format!(
            "Poisson side {}, operator discrepancy {} = −3ħ² (i²-resolved); the literal −3(iħ)² has the opposite sign",
            r.poisson_side, r.discrepancy
        )),
    };
    let pi = canonical_poisson(1);
    let low = Monomial::all_up_to(2, 2);
    let high = Monomial::all_up_to(2, 5);
    let pairs: Vec<(Monomial, Monomial)> =
        low.iter().flat_map(|f| high.iter().map(move |g| (f.clone(), g.clone()))).collect();
    let results: Vec<Result<bool>> = pairs
        .par_iter()
        .map(|(f, g)| {
            let (f, g) = (Poly::monomial(2, f.clone(), Scalar::one()), Poly::monomial(2, g.clone(), Scalar::one()));
            let lhs = weyl_quantize(&f)?.commutator(&weyl_quantize(&g)?)?;
            let rhs = weyl_quantize(&pi.pairing(&f, &g)?)?.shift_hbar(1).scale(&Scalar::i());
            Ok(lhs == rhs)
        })
        .collect();
    let mut failures = 0;
    for r in results {
        failures += usize::from(!r?);
    }
    let exact = SuiteOutcome {
        name: "quantization exact for quadratic f".into(),
        cases: pairs.len(),
        failures,
        note: Some("all monomials f of degree <= 2, g of degree <= 5".into()),
    };
    Ok(vec![obstruction, exact])
}

/// Assembled star products with closed-form weights against the Moyal series through ħ³, on R² and R⁴.
pub fn moyal_suite(seed: u64) -> Result<Vec<SuiteOutcome>> {
    let mut rng = case_rng(seed, 0);
    let mut generic = vec![vec![Scalar::zero(); 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            let c = Scalar::from_int(rng.gen_range(-3..=3));
            generic[j][i] = -c.clone();
            generic[i][j] = c;
        }
    }
    let cases = [
        ("R2 canonical", canonical_poisson(1)),
        ("R4 canonical", canonical_poisson(2)),
        ("R4 generic constant", PolyVectorField::from_matrix(&generic)?),
    ];
    let mut out = Vec::new();
    for (label, pi) in cases {
        let s = assemble(&pi, 3, &WeightSource::analytic())?;
        let m = moyal_series(&pi.to_matrix()?, 3)?;
        let diff = s.series().try_sub(&m)?;
        let max = diff.coeffs().iter().map(MultiDiffOp::max_abs_coeff).fold(0.0, f64::max);
        out.push(SuiteOutcome {
            name: format!("Moyal coincidence {label}"),
            cases: 4,
            failures: diff.coeffs().iter().filter(|c| !c.is_zero()).count(),
            note: Some(format!("max discrepancy {max}")),
        });
    }
    Ok(out)
}

/// koszul_sign_sym against adjacent transpositions.
pub fn koszul_suite(cases: usize, seed: u64) -> SuiteOutcome {
    run_cases("Koszul sign matches transpositions", cases, seed, |rng| {
        let n = rng.gen_range(1..=6);
        let degrees: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=3)).collect();
        let mut sigma: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            sigma.swap(i, rng.gen_range(0..=i));
        }
        let a = koszul_sign_sym(&degrees, &sigma)?;
        let b = koszul_sign_by_transpositions(&degrees, &sigma)?;
        Ok(fail_unless(a == b, || format!("{degrees:?} {sigma:?}")))
    })
}

/// bch against log(e^X e^Y), and the composition law of the gauge action.
pub fn bch_suite(cases: usize, seed: u64) -> SuiteOutcome {
    run_cases("BCH matches logarithm and composes gauge actions", cases, seed, |rng| {
        let d = rng.gen_range(1..=2);
        let order = rng.gen_range(1..=3);
        let (x, y) = (random_gauge(rng, d, order), random_gauge(rng, d, order));
        let z = bch(&x, &y)?;
        if z.generator() != &bch_by_logarithm(&x, &y)? {
            return Ok(Some("bch differs from log(exp exp)".into()));
        }
        let b = random_b(rng, d, order);
        let lhs = gauge_act(&y, &gauge_act(&x, &b)?)?;
        Ok(fail_unless(lhs == gauge_act(&z, &b)?, || "gauge action does not compose".into()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_batches_pass() {
        for o in run_suite("all", 12, 3).unwrap() {
            assert!(o.passed(), "{o}");
        }
    }

    #[test]
    fn outcomes_are_deterministic() {
        assert_eq!(run_suite("dgla", 8, 1).unwrap(), run_suite("dgla", 8, 1).unwrap());
        assert!(run_suite("nope", 1, 1).is_err());
    }
}
