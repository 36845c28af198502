//! Admissible graphs G_{n,m}, their enumeration and canonical forms, and the operators B_Γ.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::hochschild::{koszul_sign_sym, permutation_sign, permutations, MultiDiffOp};
use crate::polyvector::PolyVectorField;

/// Target of an edge. Indices are zero-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Vertex {
    Aerial(usize),
    Ground(usize),
}

impl Vertex {
    /// JSON encoding: aerial `k` ↦ k+1, ground `j` ↦ −(j+1).
    pub fn encode(self) -> i32 {
        match self {
            Vertex::Aerial(k) => k as i32 + 1,
            Vertex::Ground(j) => -(j as i32) - 1,
        }
    }

    pub fn decode(x: i32) -> Result<Vertex> {
        match x {
            0 => Err(Error::InvalidGraph("target 0 is not a vertex".into())),
            x if x > 0 => Ok(Vertex::Aerial(x as usize - 1)),
            x => Ok(Vertex::Ground((-x) as usize - 1)),
        }
    }
}

/// A graph with `n` aerial vertices, each carrying an ordered star of targets, and `m` ground vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleGraph {
    n: usize,
    m: usize,
    stars: Vec<Vec<Vertex>>,
}

impl AdmissibleGraph {
    /// Validates targets, loops and repeated edges. Connectivity is checked separately.
    pub fn new(n: usize, m: usize, stars: Vec<Vec<Vertex>>) -> Result<Self> {
        if stars.len() != n {
            return Err(Error::InvalidGraph(format!("{} stars for {n} aerial vertices", stars.len())));
        }
        for (k, star) in stars.iter().enumerate() {
            for (a, t) in star.iter().enumerate() {
                match *t {
                    Vertex::Aerial(j) if j >= n => {
                        return Err(Error::InvalidGraph(format!("aerial target {} out of range", j + 1)))
                    }
                    Vertex::Aerial(j) if j == k => return Err(Error::InvalidGraph(format!("loop at vertex {}", k + 1))),
                    Vertex::Ground(j) if j >= m => {
                        return Err(Error::InvalidGraph(format!("ground target {} out of range", j + 1)))
                    }
                    _ => {}
                }
                if star[..a].contains(t) {
                    return Err(Error::InvalidGraph(format!("repeated edge from vertex {}", k + 1)));
                }
            }
        }
        Ok(AdmissibleGraph { n, m, stars })
    }

    /// Builds from encoded stars (aerial 1..n, ground −1..−m).
    pub fn from_encoded(n: usize, m: usize, stars: &[Vec<i32>]) -> Result<Self> {
        let stars = stars
            .iter()
            .map(|s| s.iter().map(|&x| Vertex::decode(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        AdmissibleGraph::new(n, m, stars)
    }

    /// One aerial vertex with ordered star (1̄, 2̄).
    pub fn wedge() -> Self {
        AdmissibleGraph::moyal(1)
    }

    /// n aerial vertices, each with ordered star (1̄, 2̄).
    pub fn moyal(n: usize) -> Self {
        AdmissibleGraph { n, m: 2, stars: vec![vec![Vertex::Ground(0), Vertex::Ground(1)]; n] }
    }

    /// One aerial vertex with ordered star (1̄, …, m̄).
    pub fn hkr(m: usize) -> Self {
        AdmissibleGraph { n: 1, m, stars: vec![(0..m).map(Vertex::Ground).collect()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn stars(&self) -> &[Vec<Vertex>] {
        &self.stars
    }

    pub fn encoded_stars(&self) -> Vec<Vec<i32>> {
        self.stars.iter().map(|s| s.iter().map(|v| v.encode()).collect()).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.stars.iter().map(Vec::len).sum()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.stars.iter().map(Vec::len).collect()
    }

    /// Edges `(source, target)` in the order used by the weight form: by source, then star order.
    pub fn edges(&self) -> Vec<(usize, Vertex)> {
        self.stars.iter().enumerate().flat_map(|(k, s)| s.iter().map(move |&t| (k, t))).collect()
    }

    /// True when #E = 2n + m − 2, the dimension of C⁺_{n,m}.
    pub fn has_top_degree(&self) -> bool {
        self.num_edges() as i64 == 2 * self.n as i64 + self.m as i64 - 2
    }

    pub fn is_connected(&self) -> bool {
        let total = self.n + self.m;
        if total == 0 {
            return true;
        }
        let idx = |v: Vertex| match v {
            Vertex::Aerial(k) => k,
            Vertex::Ground(j) => self.n + j,
        };
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (k, t) in self.edges() {
            let (a, b) = (find(&mut parent, k), find(&mut parent, idx(t)));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (1..total).all(|x| find(&mut parent, x) == root)
    }

    /// Exchanges positions `a` and `b` of the star of vertex `k`.
    pub fn swap_in_star(&self, k: usize, a: usize, b: usize) -> Result<Self> {
        let mut g = self.clone();
        let star = g.stars.get_mut(k).ok_or_else(|| Error::OutOfRange(format!("vertex {k}")))?;
        if a >= star.len() || b >= star.len() {
            return Err(Error::OutOfRange(format!("star positions {a}, {b}")));
        }
        star.swap(a, b);
        Ok(g)
    }

    /// Relabels aerial vertices: old vertex `k` becomes `sigma[k]`.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        permutation_sign(sigma)?;
        if sigma.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, found: sigma.len() });
        }
        let mut stars = vec![Vec::new(); self.n];
        for (k, s) in self.stars.iter().enumerate() {
            stars[sigma[k]] = s
                .iter()
                .map(|&t| match t {
                    Vertex::Aerial(j) => Vertex::Aerial(sigma[j]),
                    g => g,
                })
                .collect();
        }
        Ok(AdmissibleGraph { n: self.n, m: self.m, stars })
    }

    /// Reverses the ground labels j ↦ m−1−j.
    pub fn mirror(&self) -> Self {
        let stars = self
            .stars
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&t| match t {
                        Vertex::Ground(j) => Vertex::Ground(self.m - 1 - j),
                        a => a,
                    })
                    .collect()
            })
            .collect();
        AdmissibleGraph { n: self.n, m: self.m, stars }
    }
}

impl fmt::Display for AdmissibleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", GraphKey { n: self.n, m: self.m, stars: self.encoded_stars() })
    }
}

impl fmt::Debug for AdmissibleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AdmissibleGraph({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: usize,
    m: usize,
    stars: Vec<Vec<i32>>,
}

impl Serialize for AdmissibleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphWire { n: self.n, m: self.m, stars: self.encoded_stars() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AdmissibleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = GraphWire::deserialize(d)?;
        AdmissibleGraph::from_encoded(w.n, w.m, &w.stars).map_err(D::Error::custom)
    }
}

/// Isomorphism-class key: equal iff the graphs agree after relabeling aerial vertices and reordering stars.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GraphKey {
    pub n: usize,
    pub m: usize,
    pub stars: Vec<Vec<i32>>,
}

impl fmt::Display for GraphKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stars: Vec<String> = self
            .stars
            .iter()
            .map(|s| format!("[{}]", s.iter().map(i32::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "n{}m{}:{}", self.n, self.m, stars.join(""))
    }
}

impl std::str::FromStr for GraphKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid graph key '{s}'"));
        let rest = s.strip_prefix('n').ok_or_else(bad)?;
        let (n, rest) = rest.split_once('m').ok_or_else(bad)?;
        let (m, rest) = rest.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let m: usize = m.parse().map_err(|_| bad())?;
        let mut stars = Vec::new();
        for chunk in rest.split('[').skip(1) {
            let body = chunk.strip_suffix(']').ok_or_else(bad)?;
            let star = if body.is_empty() {
                Vec::new()
            } else {
                body.split(',').map(|x| x.parse::<i32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
            };
            stars.push(star);
        }
        if stars.len() != n {
            return Err(bad());
        }
        Ok(GraphKey { n, m, stars })
    }
}

/// Canonical representative of a graph's class together with the signs relating the two.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: GraphKey,
    /// The relabeled graph with every star sorted.
    pub representative: AdmissibleGraph,
    /// W(g) = weight_sign · W(representative); 0 when an automorphism forces W = −W.
    pub weight_sign: i8,
    /// B_g(π, …, π) = star_sign · B_rep(π, …, π) for identical antisymmetric inputs.
    pub star_sign: i8,
}

fn sort_star(star: &[i32]) -> (Vec<i32>, i8) {
    let mut order: Vec<usize> = (0..star.len()).collect();
    // ground vertices first in natural order, then aerial vertices
    order.sort_by_key(|&i| if star[i] < 0 { (0, -star[i]) } else { (1, star[i]) });
    let sign = permutation_sign(&order).expect("valid permutation");
    (order.iter().map(|&i| star[i]).collect(), sign)
}

/// Exhaustive minimal labeling over all n! relabelings (intended for n ≤ 6).
pub fn canonical_form(g: &AdmissibleGraph) -> CanonicalForm {
    let n = g.n;
    let degrees: Vec<i64> = g.stars.iter().map(|s| s.len() as i64).collect();
    let mut best: Option<(Vec<Vec<i32>>, i8, i8)> = None;
    let mut conflicting = false;
    for sigma in permutations(n) {
        let h = g.relabel(&sigma).expect("valid relabeling");
        let mut stars = Vec::with_capacity(n);
        let mut star_sign = 1i8;
        for s in h.encoded_stars() {
            let (sorted, sg) = sort_star(&s);
            star_sign *= sg;
            stars.push(sorted);
        }
        // output slot sigma[k] holds old block k
        let mut inverse = vec![0; n];
        for (k, &t) in sigma.iter().enumerate() {
            inverse[t] = k;
        }
        let block = koszul_sign_sym(&degrees, &inverse).expect("valid permutation");
        let wsign = block * star_sign;
        match &best {
            Some((b, w, _)) if *b == stars => {
                if *w != wsign {
                    conflicting = true;
                }
            }
            Some((b, _, _)) if *b < stars => {}
            _ => {
                best = Some((stars, wsign, star_sign));
                conflicting = false;
            }
        }
    }
    let (stars, wsign, ssign) = best.expect("at least one permutation");
    let representative = AdmissibleGraph::from_encoded(n, g.m, &stars).expect("relabeling preserves validity");
    CanonicalForm {
        key: GraphKey { n, m: g.m, stars },
        representative,
        weight_sign: if conflicting { 0 } else { wsign },
        star_sign: ssign,
    }
}

pub fn canonical_key(g: &AdmissibleGraph) -> GraphKey {
    canonical_form(g).key
}

/// Enumeration options.
#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Keep only graphs whose underlying undirected graph is connected.
    pub connected: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { connected: true }
    }
}

fn ordered_tuples(pool: &[Vertex], len: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(pool: &[Vertex], len: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &v in pool {
            if !cur.contains(&v) {
                cur.push(v);
                rec(pool, len, cur, out);
                cur.pop();
            }
        }
    }
    rec(pool, len, &mut cur, &mut out);
    out
}

/// All admissible graphs with the prescribed ordered out-stars, in lexicographic order.
pub fn enumerate(n: usize, m: usize, out_degrees: &[usize], opts: EnumerateOptions) -> Result<Vec<AdmissibleGraph>> {
    if 2 * n + m < 2 {
        return Err(Error::InvalidGraph(format!("2n+m-2 < 0 for n={n}, m={m}")));
    }
    if out_degrees.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: out_degrees.len() });
    }
    let choices: Vec<Vec<Vec<Vertex>>> = (0..n)
        .map(|k| {
            let pool: Vec<Vertex> = (0..n)
                .filter(|&j| j != k)
                .map(Vertex::Aerial)
                .chain((0..m).map(Vertex::Ground))
                .collect();
            ordered_tuples(&pool, out_degrees[k])
        })
        .collect();
    if n == 0 {
        let g = AdmissibleGraph { n, m, stars: Vec::new() };
        return Ok(if !opts.connected || g.is_connected() { vec![g] } else { Vec::new() });
    }
    let finish = |stars: Vec<Vec<Vertex>>| -> Option<AdmissibleGraph> {
        let g = AdmissibleGraph { n, m, stars };
        (!opts.connected || g.is_connected()).then_some(g)
    };
    let out: Vec<AdmissibleGraph> = choices[0]
        .par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut stack = vec![first.clone()];
            fn rec(
                k: usize,
                choices: &[Vec<Vec<Vertex>>],
                stack: &mut Vec<Vec<Vertex>>,
                found: &mut Vec<AdmissibleGraph>,
                finish: &dyn Fn(Vec<Vec<Vertex>>) -> Option<AdmissibleGraph>,
            ) {
                if k == choices.len() {
                    if let Some(g) = finish(stack.clone()) {
                        found.push(g);
                    }
                    return;
                }
                for c in &choices[k] {
                    stack.push(c.clone());
                    rec(k + 1, choices, stack, found, finish);
                    stack.pop();
                }
            }
            rec(1, &choices, &mut stack, &mut found, &finish);
            found
        })
        .collect();
    Ok(out)
}

/// Removes graphs that differ only in star ordering, keeping the sorted-star form.
pub fn dedup_star_order(graphs: &[AdmissibleGraph]) -> Vec<AdmissibleGraph> {
    let mut seen = BTreeMap::new();
    for g in graphs {
        let stars: Vec<Vec<i32>> = g.encoded_stars().iter().map(|s| sort_star(s).0).collect();
        seen.entry(stars.clone())
            .or_insert_with(|| AdmissibleGraph::from_encoded(g.n, g.m, &stars).expect("sorting preserves validity"));
    }
    seen.into_values().collect()
}

/// One representative per isomorphism class, sorted by key.
pub fn dedup_isomorphism(graphs: &[AdmissibleGraph]) -> Vec<(GraphKey, usize)> {
    let mut classes: BTreeMap<GraphKey, usize> = BTreeMap::new();
    for g in graphs {
        *classes.entry(canonical_key(g)).or_default() += 1;
    }
    classes.into_iter().collect()
}

/// B_Γ(ξ_1, …, ξ_n): sum over index maps of the products of differentiated coefficients,
/// using the full antisymmetric tensors T^{i1…ik} = ξ_ext^{i1…ik} / k!.
pub fn b_gamma(g: &AdmissibleGraph, xs: &[PolyVectorField]) -> Result<MultiDiffOp> {
    if xs.len() != g.n {
        return Err(Error::LengthMismatch { expected: g.n, found: xs.len() });
    }
    let d = match xs.first() {
        Some(x) => x.dim(),
        None => return Err(Error::InvalidGraph("B_Γ needs at least one aerial vertex".into())),
    };
    if let Some(x) = xs.iter().find(|x| x.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: x.dim() });
    }
    let zero = MultiDiffOp::zero(d, g.m);
    if xs.iter().zip(&g.stars).any(|(x, s)| x.degree() != s.len()) {
        return Ok(zero);
    }
    // vertices receiving more derivatives than their coefficients can absorb give nothing
    let mut incoming = vec![0u32; g.n];
    for (_, t) in g.edges() {
        if let Vertex::Aerial(j) = t {
            incoming[j] += 1;
        }
    }
    for (k, x) in xs.iter().enumerate() {
        let top = x.components().filter_map(|(_, c)| c.degree()).max();
        match top {
            None => return Ok(zero),
            Some(deg) if deg < incoming[k] => return Ok(zero),
            _ => {}
        }
    }
    // nonzero tensor entries per vertex
    let entries: Vec<Vec<(Vec<usize>, Poly)>> = xs
        .iter()
        .map(|x| {
            let k = x.degree();
            let fact: i64 = (1..=k as i64).product();
            let mut out = Vec::new();
            for (idx, c) in x.components() {
                for p in permutations(k) {
                    let s = permutation_sign(&p).expect("valid");
                    let full: Vec<usize> = p.iter().map(|&i| idx[i]).collect();
                    out.push((full, c.scale(&Scalar::ratio(s as i64, fact))));
                }
            }
            out
        })
        .collect();
    let mut out = zero;
    let mut chosen: Vec<usize> = Vec::with_capacity(g.n);
    fn rec(
        k: usize,
        g: &AdmissibleGraph,
        d: usize,
        entries: &[Vec<(Vec<usize>, Poly)>],
        chosen: &mut Vec<usize>,
        out: &mut MultiDiffOp,
    ) {
        if k == g.n {
            let mut aerial_derivs = vec![Monomial::zero(d); g.n];
            let mut ground = vec![Monomial::zero(d); g.m];
            for (src, star) in g.stars.iter().enumerate() {
                let idx = &entries[src][chosen[src]].0;
                for (t, &i) in star.iter().zip(idx) {
                    match *t {
                        Vertex::Aerial(j) => aerial_derivs[j].0[i] += 1,
                        Vertex::Ground(j) => ground[j].0[i] += 1,
                    }
                }
            }
            let mut coeff = Poly::one(d);
            for v in 0..g.n {
                let c = entries[v][chosen[v]].1.derivative(&aerial_derivs[v]);
                if c.is_zero() {
                    return;
                }
                coeff = &coeff * &c;
            }
            out.add_term(ground, &coeff);
            return;
        }
        for i in 0..entries[k].len() {
            chosen.push(i);
            rec(k + 1, g, d, entries, chosen, out);
            chosen.pop();
        }
    }
    rec(0, g, d, &entries, &mut chosen, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(connected: bool) -> EnumerateOptions {
        EnumerateOptions { connected }
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate(1, 2, &[2], opts(true)).unwrap().len(), 2);
        assert!(enumerate(1, 0, &[2], opts(true)).unwrap().is_empty());
        assert!(enumerate(0, 1, &[], opts(true)).is_err());
        assert_eq!(enumerate(3, 2, &[2, 2, 2], opts(false)).unwrap().len(), 1728);
    }

    #[test]
    fn g22_counts() {
        let all = enumerate(2, 2, &[2, 2], opts(true)).unwrap();
        assert_eq!(dedup_star_order(&all).len(), 7);
        let relaxed = enumerate(2, 2, &[2, 2], opts(false)).unwrap();
        assert_eq!(dedup_star_order(&relaxed).len(), 9);
    }

    #[test]
    fn key_invariances() {
        let w = AdmissibleGraph::wedge();
        let w2 = w.swap_in_star(0, 0, 1).unwrap();
        assert_eq!(canonical_key(&w), canonical_key(&w2));
        assert_eq!(canonical_form(&w2).weight_sign, -1);
        assert_ne!(canonical_key(&w), canonical_key(&AdmissibleGraph::hkr(3)));
        let g = AdmissibleGraph::from_encoded(3, 2, &[vec![2, -1], vec![3, -2], vec![-1, -2]]).unwrap();
        for sigma in permutations(3) {
            assert_eq!(canonical_key(&g.relabel(&sigma).unwrap()), canonical_key(&g));
        }
    }

    #[test]
    fn json_and_key_text() {
        let g = AdmissibleGraph::from_encoded(2, 2, &[vec![2, -1], vec![-1, -2]]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":2,"m":2,"stars":[[2,-1],[-1,-2]]}"#);
        assert_eq!(serde_json::from_str::<AdmissibleGraph>(&s).unwrap(), g);
        let k = canonical_key(&g);
        assert_eq!(k.to_string().parse::<GraphKey>().unwrap(), k);
        assert!(AdmissibleGraph::from_encoded(1, 2, &[vec![1, -1]]).is_err());
        assert!(AdmissibleGraph::from_encoded(1, 2, &[vec![-1, -1]]).is_err());
    }

    #[test]
    fn wedge_operator() {
        let d = 2;
        let pi = PolyVectorField::basis(d, &[0, 1], Poly::one(d)).unwrap();
        let b = b_gamma(&AdmissibleGraph::wedge(), &[pi.clone()]).unwrap();
        let f = &Poly::var(d, 0).pow(2) * &Poly::var(d, 1);
        let h = &Poly::var(d, 1).pow(2) + &Poly::var(d, 0);
        // B(f,g) = Σ T^{ij} ∂_i f ∂_j g with T = π_ext / 2
        let expected = pi.pairing(&f, &h).unwrap().scale(&Scalar::ratio(1, 2));
        assert_eq!(b.apply(&[f, h]).unwrap(), expected);
    }

    #[test]
    fn degree_mismatch_is_zero() {
        let pi = PolyVectorField::basis(2, &[0, 1], Poly::one(2)).unwrap();
        assert!(b_gamma(&AdmissibleGraph::hkr(3), &[pi]).unwrap().is_zero());
    }
}
