//! Hochschild differential and the Gerstenhaber product and bracket.

use crate::algebra::{multinomial_splits, Monomial, Scalar};
use crate::error::Result;

use super::MultiDiffOp;

fn sign(k: i64) -> Scalar {
    Scalar::from_int(if k.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// δ_H f, expanded symbolically:
/// (δf)(u0..up) = u0 f(u1..) + Σ_r (−1)^r f(.., u_{r−1}u_r, ..) + (−1)^{p+1} f(..) u_p.
pub fn hochschild_delta(f: &MultiDiffOp) -> MultiDiffOp {
    let d = f.dim();
    let p = f.arity();
    let zero = Monomial::zero(d);
    let mut out = MultiDiffOp::zero(d, p + 1);
    let last = sign(p as i64 + 1);
    for (k, c) in f.terms() {
        let mut lead = Vec::with_capacity(p + 1);
        lead.push(zero.clone());
        lead.extend(k.iter().cloned());
        out.add_term(lead, c);

        let mut tail: Vec<Monomial> = k.clone();
        tail.push(zero.clone());
        out.add_term(tail, &c.scale(&last));

        for r in 1..=p {
            let s = sign(r as i64);
            for (parts, w) in multinomial_splits(&k[r - 1], 2) {
                let mut derivs = Vec::with_capacity(p + 1);
                derivs.extend_from_slice(&k[..r - 1]);
                derivs.extend(parts);
                derivs.extend_from_slice(&k[r..]);
                out.add_term(derivs, &c.scale(&(&s * &Scalar::from_bigint(w))));
            }
        }
    }
    out
}

/// d_H f = (−1)^{p+1} δ_H f with p the arity; equals [μ, f]_G.
pub fn modified_d(f: &MultiDiffOp) -> MultiDiffOp {
    hochschild_delta(f).scale(&sign(f.arity() as i64 + 1))
}

/// f • g = Σ_i (−1)^{i q} f ∘_i g with q = arity(g) − 1. Zero when f has no slots.
pub fn gerstenhaber_product(f: &MultiDiffOp, g: &MultiDiffOp) -> Result<MultiDiffOp> {
    f.check_dim(g)?;
    let q = g.degree();
    let arity = (f.arity() + g.arity()).saturating_sub(1);
    let mut out = MultiDiffOp::zero(f.dim(), arity);
    for i in 0..f.arity() {
        let t = f.insert(i, g)?;
        out.add_assign_scaled(&t, &sign(i as i64 * q));
    }
    Ok(out)
}

/// [f, g]_G = f • g − (−1)^{pq} g • f on shifted degrees.
pub fn gerstenhaber_bracket(f: &MultiDiffOp, g: &MultiDiffOp) -> Result<MultiDiffOp> {
    let p = f.degree();
    let q = g.degree();
    let mut out = gerstenhaber_product(f, g)?;
    let gf = gerstenhaber_product(g, f)?;
    if out.arity() != gf.arity() {
        // only when both have arity 0: both products vanish
        return Ok(MultiDiffOp::zero(f.dim(), 0));
    }
    out.add_assign_scaled(&gf, &-sign(p * q));
    Ok(out)
}
