//! Dense exponent vectors ordered graded-lexicographically.

use std::cmp::Ordering;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::One;

pub const MAX_DIM: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn zero(d: usize) -> Self {
        Monomial(vec![0; d])
    }

    pub fn unit(d: usize, axis: usize) -> Self {
        let mut e = vec![0; d];
        e[axis] = 1;
        Monomial(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    /// Falling-factorial coefficient of ∂^self applied to x^target: Π target_i!/(target_i-self_i)!.
    pub fn falling_factor(&self, target: &Monomial) -> Option<BigInt> {
        let mut c = BigInt::one();
        for (&k, &e) in self.0.iter().zip(&target.0) {
            if k > e {
                return None;
            }
            for t in 0..k {
                c *= e - t;
            }
        }
        Some(c)
    }

    pub fn with_incremented(&self, axis: usize) -> Monomial {
        let mut e = self.0.clone();
        e[axis] += 1;
        Monomial(e)
    }

    /// All monomials of dimension `d` with total degree at most `max_deg`, in ascending order.
    pub fn all_up_to(d: usize, max_deg: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; d];
        fn rec(axis: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if axis == cur.len() {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[axis] = e;
                rec(axis + 1, left - e, cur, out);
            }
            cur[axis] = 0;
        }
        rec(0, max_deg, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl Add for &Monomial {
    type Output = Monomial;
    fn add(self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All ways to split `k` into `parts` ordered pieces, with multinomial weights Π_axis k!/Π pieces!.
pub fn multinomial_splits(k: &Monomial, parts: usize) -> Vec<(Vec<Monomial>, BigInt)> {
    let d = k.dim();
    let mut acc: Vec<(Vec<Monomial>, BigInt)> = vec![(vec![Monomial::zero(d); parts], BigInt::one())];
    if parts == 0 {
        return if k.is_zero() { acc } else { Vec::new() };
    }
    for axis in 0..d {
        let comps = compositions(k.0[axis], parts);
        let mut next = Vec::with_capacity(acc.len() * comps.len());
        for (pieces, c) in &acc {
            for (comp, w) in &comps {
                let mut p = pieces.clone();
                for (slot, &e) in comp.iter().enumerate() {
                    p[slot].0[axis] = e;
                }
                next.push((p, c * w));
            }
        }
        acc = next;
    }
    acc
}

fn compositions(n: u32, parts: usize) -> Vec<(Vec<u32>, BigInt)> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    let mut raw = Vec::new();
    rec(0, n, &mut cur, &mut raw);
    let fact = |m: u32| (1..=m).fold(BigInt::one(), |a, b| a * b);
    for comp in raw {
        let den = comp.iter().fold(BigInt::one(), |a, &e| a * fact(e));
        out.push((comp, fact(n) / den));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order() {
        let a = Monomial(vec![0, 2]);
        let b = Monomial(vec![1, 0]);
        assert!(b < a);
        assert!(Monomial(vec![0, 1]) < Monomial(vec![1, 0]));
    }

    #[test]
    fn splits_count_and_weights() {
        let k = Monomial(vec![2, 1]);
        let s = multinomial_splits(&k, 2);
        assert_eq!(s.len(), 6);
        let total: BigInt = s.iter().map(|(_, c)| c.clone()).sum();
        // Σ multinomials = parts^|k|
        assert_eq!(total, BigInt::from(8));
    }

    #[test]
    fn enumeration_up_to_degree() {
        assert_eq!(Monomial::all_up_to(2, 2).len(), 6);
        assert_eq!(Monomial::all_up_to(3, 0), vec![Monomial(vec![0, 0, 0])]);
    }
}
