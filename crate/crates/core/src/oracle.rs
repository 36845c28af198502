//! Independent reference implementations used to cross-check the main algorithms.

use crate::algebra::{HbarSeries, Poly, Scalar};
use crate::error::{Error, Result};
use crate::hochschild::{series_insert, GaugeElement, MultiDiffOp, OpSeries};
use crate::polyvector::PolyVectorField;

/// [V, W]^j = V^i ∂_i W^j − W^i ∂_i V^j for vector fields.
pub fn lie_bracket(v: &PolyVectorField, w: &PolyVectorField) -> Result<PolyVectorField> {
    if v.degree() != 1 || w.degree() != 1 {
        return Err(Error::WrongDegree { expected: 1, found: if v.degree() != 1 { v.degree() } else { w.degree() } });
    }
    let d = v.dim();
    let mut comps = Vec::with_capacity(d);
    for j in 0..d {
        let mut c = Poly::zero(d);
        for i in 0..d {
            c = &c + &(&v.component(&[i]) * &w.component(&[j]).partial(i)?);
            c = &c - &(&w.component(&[i]) * &v.component(&[j]).partial(i)?);
        }
        comps.push((vec![j], c));
    }
    PolyVectorField::from_components(d, 1, comps)
}

/// c·∂_{i1}∧…∧∂_{ik} as the list of vector fields (c∂_{i1}, ∂_{i2}, …, ∂_{ik}).
fn decompose(x: &PolyVectorField) -> Vec<(Poly, Vec<PolyVectorField>)> {
    let d = x.dim();
    x.components()
        .map(|(idx, c)| {
            let fields = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| {
                    let coeff = if a == 0 { c.clone() } else { Poly::one(d) };
                    PolyVectorField::basis(d, &[i], coeff).expect("valid index")
                })
                .collect();
            (c.clone(), fields)
        })
        .collect()
}

fn wedge_all(d: usize, fields: impl IntoIterator<Item = PolyVectorField>) -> Result<PolyVectorField> {
    let mut acc = PolyVectorField::function(Poly::one(d));
    for f in fields {
        acc = acc.wedge(&f)?;
    }
    Ok(acc)
}

fn sign(k: usize) -> Scalar {
    Scalar::from_int(if k % 2 == 0 { 1 } else { -1 })
}

/// [X₁∧…∧X_k, g] = Σ_a (−1)^{k−a} X_a(g) X₁∧…X̂_a…∧X_k for a function g.
fn bracket_with_function(x: &PolyVectorField, g: &Poly) -> Result<PolyVectorField> {
    let d = x.dim();
    let k = x.degree();
    let mut out = PolyVectorField::zero(d, k - 1);
    for (_, fields) in decompose(x) {
        for a in 0..k {
            let xa_g = fields[a].apply_vector(g)?;
            let rest = wedge_all(d, fields.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, f)| f.clone()))?;
            let term = rest.scale(&sign(k - (a + 1))).wedge(&PolyVectorField::function(xa_g))?;
            out = out.try_add(&term)?;
        }
    }
    Ok(out)
}

/// Schouten–Nijenhuis bracket from its values on decomposable fields:
/// [X₁∧…∧X_k, Y₁∧…∧Y_l] = Σ_{a,b} (−1)^{a+b} [X_a, Y_b] ∧ X₁…X̂_a…X_k ∧ Y₁…Ŷ_b…Y_l,
/// extended to functions by [X, g] above and graded antisymmetry.
pub fn sn_by_definition(x: &PolyVectorField, y: &PolyVectorField) -> Result<PolyVectorField> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let d = x.dim();
    let (k, l) = (x.degree(), y.degree());
    match (k, l) {
        (0, 0) => Ok(PolyVectorField::zero(d, 0)),
        (_, 0) => bracket_with_function(x, &y.component(&[])),
        (0, _) => Ok(bracket_with_function(y, &x.component(&[]))?.scale(&sign(l))),
        _ => {
            let mut out = PolyVectorField::zero(d, k + l - 1);
            for (_, xs) in decompose(x) {
                for (_, ys) in decompose(y) {
                    for a in 0..k {
                        for b in 0..l {
                            let head = lie_bracket(&xs[a], &ys[b])?;
                            let rest_x = xs.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, f)| f.clone());
                            let rest_y = ys.iter().enumerate().filter(|&(j, _)| j != b).map(|(_, f)| f.clone());
                            let term = wedge_all(d, std::iter::once(head).chain(rest_x).chain(rest_y))?;
                            out = out.try_add(&term.scale(&sign(a + b)))?;
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Koszul sign of placing input `sigma[k]` in output slot k, accumulated one adjacent transposition at a time.
pub fn koszul_sign_by_transpositions(degrees: &[i64], sigma: &[usize]) -> Result<i8> {
    let n = degrees.len();
    if sigma.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: sigma.len() });
    }
    let mut arr: Vec<usize> = (0..n).collect();
    let mut s = 1i8;
    for pos in 0..n {
        let j = arr[pos..]
            .iter()
            .position(|&v| v == sigma[pos])
            .ok_or_else(|| Error::InvalidPermutation(format!("{sigma:?}")))?
            + pos;
        for t in (pos..j).rev() {
            if (degrees[arr[t]] * degrees[arr[t + 1]]).rem_euclid(2) == 1 {
                s = -s;
            }
            arr.swap(t, t + 1);
        }
    }
    Ok(s)
}

/// log(e^X ∘ e^Y) in the composition algebra of arity-1 operator series.
pub fn bch_by_logarithm(x: &GaugeElement, y: &GaugeElement) -> Result<OpSeries> {
    let e = series_insert(&x.exponential()?, 0, &y.exponential()?)?;
    let d = e.coeff(0).dim();
    let id = HbarSeries::constant(MultiDiffOp::identity(d), e.order());
    let a = e.try_sub(&id)?;
    let mut power = a.clone();
    let mut log = a.clone();
    for k in 2..=e.order() {
        power = series_insert(&power, 0, &a)?;
        let s = if k % 2 == 0 { -1 } else { 1 };
        log = log.try_add(&power.scale(&Scalar::ratio(s, k as i64)))?;
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Monomial;
    use crate::hochschild::{bch, koszul_sign_sym, permutations};

    #[test]
    fn sn_agrees_on_low_degrees() {
        let d = 3;
        let x = |i| Poly::var(d, i);
        let v = PolyVectorField::from_components(d, 1, [(vec![0], x(1)), (vec![2], &x(0) * &x(0))]).unwrap();
        let w = PolyVectorField::from_components(d, 2, [(vec![0, 1], x(2)), (vec![1, 2], x(0))]).unwrap();
        let f = PolyVectorField::function(&x(0) * &x(2));
        for (a, b) in [(&v, &w), (&w, &v), (&w, &w), (&w, &f), (&f, &w), (&v, &f)] {
            assert_eq!(sn_by_definition(a, b).unwrap(), a.schouten_nijenhuis(b).unwrap());
        }
    }

    #[test]
    fn koszul_matches() {
        let degrees = [1, 2, 3, 1];
        for p in permutations(4) {
            assert_eq!(koszul_sign_by_transpositions(&degrees, &p).unwrap(), koszul_sign_sym(&degrees, &p).unwrap());
        }
    }

    #[test]
    fn bch_matches_logarithm() {
        let d = 2;
        let e = |i| Monomial::unit(d, i);
        let gx = MultiDiffOp::term(Poly::var(d, 1), vec![e(0)]);
        let gy = MultiDiffOp::term(Poly::var(d, 0).pow(2), vec![e(1)]);
        let z = MultiDiffOp::zero(d, 1);
        let x = GaugeElement::new(HbarSeries::new(vec![z.clone(), gx.clone(), gy.clone(), z.clone()])).unwrap();
        let y = GaugeElement::new(HbarSeries::new(vec![z.clone(), gy, z.clone(), gx])).unwrap();
        assert_eq!(bch(&x, &y).unwrap().generator(), &bch_by_logarithm(&x, &y).unwrap());
    }
}
