//! Polyvector fields with wedge, ⋄-product, Schouten–Nijenhuis bracket and the HKR map.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::hochschild::{permutation_sign, permutations, MultiDiffOp};

/// Sorts `idx` and returns the sign of the sorting permutation, or `None` on a repeated index.
pub(crate) fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A k-vector field Σ_{i1<…<ik} X^{i1…ik} ∂_{i1}∧…∧∂_{ik}; indices are zero-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Poly>,
}

impl PolyVectorField {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PolyVectorField { dim, degree, coeffs: BTreeMap::new() }
    }

    pub fn function(p: Poly) -> Self {
        let mut x = PolyVectorField::zero(p.dim(), 0);
        x.add_component(&[], &p);
        x
    }

    /// `c ∂_{idx[0]} ∧ ∂_{idx[1]} ∧ …` for any (not necessarily sorted) index list.
    pub fn basis(dim: usize, idx: &[usize], c: Poly) -> Result<Self> {
        if let Some(&i) = idx.iter().find(|&&i| i >= dim) {
            return Err(Error::AxisOutOfRange { axis: i, dim });
        }
        if c.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        let mut x = PolyVectorField::zero(dim, idx.len());
        x.add_component(idx, &c);
        Ok(x)
    }

    /// Checked constructor from sorted components.
    pub fn from_components(dim: usize, degree: usize, comps: impl IntoIterator<Item = (Vec<usize>, Poly)>) -> Result<Self> {
        let mut x = PolyVectorField::zero(dim, degree);
        for (idx, c) in comps {
            if idx.len() != degree {
                return Err(Error::WrongDegree { expected: degree, found: idx.len() });
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::OutOfRange(format!("indices {idx:?} are not strictly increasing")));
            }
            if let Some(&i) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::AxisOutOfRange { axis: i, dim });
            }
            if c.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
            }
            x.add_component(&idx, &c);
        }
        Ok(x)
    }

    /// A bivector from an antisymmetric matrix of constants.
    pub fn from_matrix(m: &[Vec<Scalar>]) -> Result<Self> {
        let d = m.len();
        if m.iter().any(|r| r.len() != d) {
            return Err(Error::NotAntisymmetric);
        }
        let mut x = PolyVectorField::zero(d, 2);
        for i in 0..d {
            for j in 0..d {
                if m[i][j] != -&m[j][i] {
                    return Err(Error::NotAntisymmetric);
                }
            }
            for j in i + 1..d {
                x.add_component(&[i, j], &Poly::constant(d, m[i][j].clone()));
            }
        }
        Ok(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.coeffs.iter()
    }

    /// Antisymmetric extension X^{idx} for an arbitrary index tuple.
    pub fn component(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx) {
            Some((sorted, s)) => match self.coeffs.get(&sorted) {
                Some(c) if s == 1 => c.clone(),
                Some(c) => -c,
                None => Poly::zero(self.dim),
            },
            None => Poly::zero(self.dim),
        }
    }

    fn add_component(&mut self, idx: &[usize], c: &Poly) {
        let Some((sorted, s)) = sort_with_sign(idx) else { return };
        if c.is_zero() {
            return;
        }
        let c = if s == 1 { c.clone() } else { -c };
        let entry = self.coeffs.entry(sorted.clone()).or_insert_with(|| Poly::zero(self.dim));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&sorted);
        }
    }

    fn check_dim(&self, o: &PolyVectorField) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: o.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(o)?;
        if self.degree != o.degree {
            return Err(Error::WrongDegree { expected: self.degree, found: o.degree });
        }
        let mut out = self.clone();
        for (i, c) in &o.coeffs {
            out.add_component(i, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &PolyVectorField) -> Result<PolyVectorField> {
        self.try_add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> PolyVectorField {
        let mut out = PolyVectorField::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            out.add_component(i, &c.scale(s));
        }
        out
    }

    /// Coefficientwise partial derivative ∂_axis.
    pub fn partial(&self, axis: usize) -> Result<PolyVectorField> {
        let mut out = PolyVectorField::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            out.add_component(i, &c.partial(axis)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, o: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(o)?;
        let mut out = PolyVectorField::zero(self.dim, self.degree + o.degree);
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_component(&idx, &(a * b));
            }
        }
        Ok(out)
    }

    /// X ⋄ Y = Σ_I Σ_r (−1)^{r+1} (X^I ∂_{I∖i_r}) ∧ (∂_{i_r} Y).
    pub fn diamond(&self, o: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(o)?;
        if self.degree == 0 {
            return Err(Error::DiamondOfFunction);
        }
        let mut out = PolyVectorField::zero(self.dim, self.degree + o.degree - 1);
        let mut derived: BTreeMap<usize, PolyVectorField> = BTreeMap::new();
        for (idx, c) in &self.coeffs {
            for (r, &axis) in idx.iter().enumerate() {
                if !derived.contains_key(&axis) {
                    derived.insert(axis, o.partial(axis)?);
                }
                let dy = &derived[&axis];
                let mut rest = idx.clone();
                rest.remove(r);
                let sign = if r % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
                let left = PolyVectorField::basis(self.dim, &rest, c.scale(&sign))?;
                out = out.try_add(&left.wedge(dy)?)?;
            }
        }
        Ok(out)
    }

    /// Schouten–Nijenhuis bracket via the ⋄-product, with shifted degrees a = k_X − 1, b = k_Y − 1:
    /// [X, Y] = (−1)^a X⋄Y − (−1)^{(a−1)b} Y⋄X.
    pub fn schouten_nijenhuis(&self, o: &PolyVectorField) -> Result<PolyVectorField> {
        self.check_dim(o)?;
        let k = (self.degree + o.degree).saturating_sub(1);
        if self.degree + o.degree == 0 {
            return Ok(PolyVectorField::zero(self.dim, 0));
        }
        let a = self.degree as i64 - 1;
        let b = o.degree as i64 - 1;
        let mut out = PolyVectorField::zero(self.dim, k);
        if self.degree > 0 {
            let s = if a.rem_euclid(2) == 0 { 1 } else { -1 };
            out = out.try_add(&self.diamond(o)?.scale(&Scalar::from_int(s)))?;
        }
        if o.degree > 0 {
            let s = if ((a - 1) * b).rem_euclid(2) == 0 { -1 } else { 1 };
            out = out.try_add(&o.diamond(self)?.scale(&Scalar::from_int(s)))?;
        }
        Ok(out)
    }

    /// X(f) for a vector field X.
    pub fn apply_vector(&self, f: &Poly) -> Result<Poly> {
        if self.degree != 1 {
            return Err(Error::WrongDegree { expected: 1, found: self.degree });
        }
        let mut out = Poly::zero(self.dim);
        for (i, c) in &self.coeffs {
            out = &out + &(c * &f.partial(i[0])?);
        }
        Ok(out)
    }

    /// The bracket π(f, g) = Σ_{i,j} π^{ij} ∂_i f ∂_j g over the antisymmetric extension.
    pub fn pairing(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        if self.degree != 2 {
            return Err(Error::WrongDegree { expected: 2, found: self.degree });
        }
        let mut out = Poly::zero(self.dim);
        for (idx, c) in &self.coeffs {
            let (i, j) = (idx[0], idx[1]);
            let t = &(&f.partial(i)? * &g.partial(j)?) - &(&f.partial(j)? * &g.partial(i)?);
            out = &out + &(c * &t);
        }
        Ok(out)
    }

    /// True when every coefficient is constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(Poly::is_constant)
    }

    /// Constant bivector as a full antisymmetric matrix.
    pub fn to_matrix(&self) -> Result<Vec<Vec<Scalar>>> {
        if self.degree != 2 {
            return Err(Error::WrongDegree { expected: 2, found: self.degree });
        }
        let d = self.dim;
        let mut m = vec![vec![Scalar::zero(); d]; d];
        for (idx, c) in &self.coeffs {
            if !c.is_constant() {
                return Err(Error::Parse("bivector has non-constant coefficients".into()));
            }
            let v = c.coeff(&Monomial::zero(d));
            m[idx[1]][idx[0]] = -&v;
            m[idx[0]][idx[1]] = v;
        }
        Ok(m)
    }
}

/// Returns `[π, π]_SN` and whether it vanishes.
pub fn is_poisson(pi: &PolyVectorField) -> Result<(bool, PolyVectorField)> {
    if pi.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, found: pi.degree() });
    }
    let r = pi.schouten_nijenhuis(pi)?;
    Ok((r.is_zero(), r))
}

/// U_1(ξ)(f_1..f_n) = (1/n!) Σ ξ^{i1…in} ∂_{i1}f_1 ⋯ ∂_{in}f_n.
pub fn hkr(x: &PolyVectorField) -> MultiDiffOp {
    let d = x.dim();
    let n = x.degree();
    if n == 0 {
        return MultiDiffOp::function(x.component(&[]));
    }
    let fact: i64 = (1..=n as i64).product();
    let perms = permutations(n);
    let mut out = MultiDiffOp::zero(d, n);
    for (idx, c) in x.components() {
        for p in &perms {
            let s = permutation_sign(p).expect("valid permutation");
            let derivs = p.iter().map(|&k| Monomial::unit(d, idx[k])).collect();
            out.add_term(derivs, &c.scale(&Scalar::ratio(s as i64, fact)));
        }
    }
    out
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else {
                let w: Vec<String> = idx.iter().map(|i| format!("d{}", i + 1)).collect();
                write!(f, "({c})*{}", w.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyVectorField[d={}, k={}]({self})", self.dim, self.degree)
    }
}

#[derive(Serialize, Deserialize)]
struct CompWire {
    idx: Vec<usize>,
    poly: Poly,
}

#[derive(Serialize, Deserialize)]
struct PvWire {
    d: usize,
    k: usize,
    coeffs: Vec<CompWire>,
}

impl Serialize for PolyVectorField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PvWire {
            d: self.dim,
            k: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|(i, c)| CompWire { idx: i.iter().map(|x| x + 1).collect(), poly: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyVectorField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = PvWire::deserialize(d)?;
        let comps = w
            .coeffs
            .into_iter()
            .map(|c| {
                if c.idx.contains(&0) {
                    return Err(D::Error::custom("polyvector indices are 1-based"));
                }
                Ok((c.idx.into_iter().map(|i| i - 1).collect(), c.poly))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PolyVectorField::from_components(w.d, w.k, comps).map_err(D::Error::custom)
    }
}

/// The Lie–Poisson structure of so(3) on R³: x3·∂1∧∂2 + x1·∂2∧∂3 + x2·∂3∧∂1.
pub fn so3_lie_poisson() -> PolyVectorField {
    let x = |i| Poly::var(3, i);
    PolyVectorField::from_components(3, 2, [(vec![0, 1], x(2)), (vec![1, 2], x(0)), (vec![0, 2], -&x(1))])
        .expect("valid indices")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(d: usize, i: usize) -> Poly {
        Poly::var(d, i)
    }

    fn vf(d: usize, i: usize, c: Poly) -> PolyVectorField {
        PolyVectorField::basis(d, &[i], c).unwrap()
    }

    fn so3() -> PolyVectorField {
        so3_lie_poisson()
    }

    #[test]
    fn wedge_examples() {
        let d = 2;
        let w = vf(d, 0, Poly::one(d)).wedge(&vf(d, 1, Poly::one(d))).unwrap();
        assert_eq!(w.component(&[0, 1]), Poly::one(d));
        assert_eq!(w.component(&[1, 0]), -&Poly::one(d));
        assert!(vf(d, 0, Poly::one(d)).wedge(&vf(d, 0, Poly::one(d))).unwrap().is_zero());
        let w = vf(d, 0, x(d, 1)).wedge(&vf(d, 1, Poly::one(d))).unwrap();
        assert_eq!(w.component(&[0, 1]), x(d, 1));
    }

    #[test]
    fn diamond_with_function() {
        let d = 2;
        let f = PolyVectorField::function(&x(d, 0).pow(2) * &x(d, 1));
        let v = vf(d, 0, x(d, 1));
        let r = v.diamond(&f).unwrap();
        assert_eq!(r.degree(), 0);
        assert_eq!(r.component(&[]), v.apply_vector(&f.component(&[])).unwrap());
        assert!(vf(d, 0, Poly::one(d)).diamond(&vf(d, 1, Poly::one(d))).unwrap().is_zero());
        assert_eq!(f.diamond(&v).unwrap_err(), Error::DiamondOfFunction);
    }

    #[test]
    fn sn_low_degree_cases() {
        let d = 2;
        let v = vf(d, 0, x(d, 1));
        let f = PolyVectorField::function(&x(d, 0) * &x(d, 0));
        let vf_ = v.schouten_nijenhuis(&f).unwrap();
        assert_eq!(vf_.component(&[]), v.apply_vector(&f.component(&[])).unwrap());
        let fv = f.schouten_nijenhuis(&v).unwrap();
        assert_eq!(fv, vf_.scale(&Scalar::from_int(-1)));
    }

    #[test]
    fn poisson_detection() {
        let (ok, _) = is_poisson(&PolyVectorField::basis(2, &[0, 1], Poly::one(2)).unwrap()).unwrap();
        assert!(ok);
        let (ok, r) = is_poisson(&so3()).unwrap();
        assert!(ok, "{r}");
        let d = 3;
        let bad = PolyVectorField::from_components(d, 2, vec![(vec![0, 1], x(d, 1)), (vec![1, 2], Poly::one(d))]).unwrap();
        let (ok, r) = is_poisson(&bad).unwrap();
        assert!(!ok);
        assert!(!r.is_zero());
        assert_eq!(r.degree(), 3);
        assert!(is_poisson(&vf(2, 0, Poly::one(2))).is_err());
    }

    #[test]
    fn hkr_of_bivector() {
        let d = 2;
        let op = hkr(&PolyVectorField::basis(d, &[0, 1], Poly::one(d)).unwrap());
        let f = &x(d, 0).pow(2) * &x(d, 1);
        let g = &x(d, 1).pow(3) + &x(d, 0);
        let direct = &(&f.partial(0).unwrap() * &g.partial(1).unwrap()) - &(&f.partial(1).unwrap() * &g.partial(0).unwrap());
        assert_eq!(op.apply(&[f, g]).unwrap(), direct.scale(&Scalar::ratio(1, 2)));
        assert!(op.is_first_order_each());
        let h = hkr(&PolyVectorField::function(x(d, 1)));
        assert_eq!(h.as_function(), Some(x(d, 1)));
    }

    #[test]
    fn matrix_roundtrip() {
        let m = vec![
            vec![Scalar::zero(), Scalar::from_int(2)],
            vec![Scalar::from_int(-2), Scalar::zero()],
        ];
        let pi = PolyVectorField::from_matrix(&m).unwrap();
        assert_eq!(pi.to_matrix().unwrap(), m);
        let bad = vec![vec![Scalar::zero(), Scalar::one()], vec![Scalar::one(), Scalar::zero()]];
        assert_eq!(PolyVectorField::from_matrix(&bad).unwrap_err(), Error::NotAntisymmetric);
    }

    #[test]
    fn json_roundtrip() {
        let s = serde_json::to_string(&so3()).unwrap();
        assert!(s.contains("\"idx\":[1,2]"));
        assert_eq!(serde_json::from_str::<PolyVectorField>(&s).unwrap(), so3());
    }
}
