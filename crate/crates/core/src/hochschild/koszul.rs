//! Koszul signs, décalage signs and shuffle permutations.
//!
//! Permutations are one-line images `σ(1..n)` written zero-based: `sigma[k]` is the position
//! of the input element that lands in output slot `k`, i.e. x_1⋯x_n = ε · x_{σ(1)}⋯x_{σ(n)}.

use crate::error::{Error, Result};

fn validate(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return Err(Error::InvalidPermutation(format!("{sigma:?}")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Parity of a permutation: +1 or −1.
pub fn permutation_sign(sigma: &[usize]) -> Result<i8> {
    validate(sigma)?;
    let mut inv = 0usize;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                inv += 1;
            }
        }
    }
    Ok(if inv % 2 == 0 { 1 } else { -1 })
}

/// ε_x(σ): (−1)^{|x_a||x_b|} for every pair whose relative order σ reverses.
pub fn koszul_sign_sym(degrees: &[i64], sigma: &[usize]) -> Result<i8> {
    if degrees.len() != sigma.len() {
        return Err(Error::LengthMismatch { expected: degrees.len(), found: sigma.len() });
    }
    validate(sigma)?;
    let mut odd = 0i64;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                odd += degrees[sigma[i]] * degrees[sigma[j]];
            }
        }
    }
    Ok(if odd.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// χ_x(σ) = sgn(σ) · ε_x(σ).
pub fn koszul_sign_ext(degrees: &[i64], sigma: &[usize]) -> Result<i8> {
    Ok(koszul_sign_sym(degrees, sigma)? * permutation_sign(sigma)?)
}

/// (−1)^{Σ_k (n−k)(|x_k|−1)} for k = 1..n.
pub fn decalage_sign(degrees: &[i64]) -> i8 {
    let n = degrees.len() as i64;
    let e: i64 = degrees.iter().enumerate().map(|(k, &x)| (n - (k as i64 + 1)) * (x - 1)).sum();
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// All (i, n−i)-shuffles: permutations with σ(1)<…<σ(i) and σ(i+1)<…<σ(n),
/// returned as zero-based one-line images in lexicographic order of the first run.
pub fn shuffles(i: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    if i > n {
        return Err(Error::OutOfRange(format!("shuffle ({i}, {n})")));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(i);
    fn rec(start: usize, i: usize, n: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == i {
            let mut perm = chosen.clone();
            perm.extend((0..n).filter(|x| !chosen.contains(x)));
            out.push(perm);
            return;
        }
        for x in start..n {
            chosen.push(x);
            rec(x + 1, i, n, chosen, out);
            chosen.pop();
        }
    }
    rec(0, i, n, &mut chosen, &mut out);
    Ok(out)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_signs() {
        assert_eq!(koszul_sign_sym(&[1, 1], &[0, 1]).unwrap(), 1);
        assert_eq!(koszul_sign_sym(&[1, 1], &[1, 0]).unwrap(), -1);
        assert_eq!(koszul_sign_sym(&[2, 1], &[1, 0]).unwrap(), 1);
        assert_eq!(koszul_sign_ext(&[2, 1], &[1, 0]).unwrap(), -1);
        assert!(koszul_sign_sym(&[1, 1], &[0, 0]).is_err());
        assert!(koszul_sign_sym(&[1], &[0, 1]).is_err());
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
        assert_eq!(permutations(2), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn decalage() {
        assert_eq!(decalage_sign(&[1, 1, 1]), 1);
        assert_eq!(decalage_sign(&[2, 1]), -1);
    }

    #[test]
    fn shuffle_lists() {
        assert_eq!(shuffles(2, 4).unwrap().len(), 6);
        assert_eq!(shuffles(1, 3).unwrap(), vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]]);
        assert_eq!(shuffles(0, 2).unwrap(), vec![vec![0, 1]]);
        assert!(shuffles(3, 2).is_err());
    }
}
