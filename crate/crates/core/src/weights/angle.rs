//! The hyperbolic angle map and its closed-form gradient.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn check(p: Complex64, q: Complex64) -> Result<()> {
    if p.im < 0.0 || q.im < 0.0 {
        return Err(Error::BelowRealAxis);
    }
    if p == q {
        return Err(Error::CoincidentPoints);
    }
    Ok(())
}

/// φ(p, q) = arg((q − p)/(q − p̄)) on the principal branch (−π, π].
pub fn phi(p: Complex64, q: Complex64) -> Result<f64> {
    check(p, q)?;
    let w = (q - p) / (q - p.conj());
    // arg(−1 − 0i) would give −π; the branch is closed at +π
    Ok(if w.im == 0.0 && w.re < 0.0 { std::f64::consts::PI } else { w.arg() })
}

/// Partials of φ with respect to (Re p, Im p, Re q, Im q), from dφ = Im(d log(q−p) − d log(q−p̄)).
pub fn phi_gradient(p: Complex64, q: Complex64) -> Result<[f64; 4]> {
    check(p, q)?;
    let a = (q - p).inv();
    let b = (q - p.conj()).inv();
    let i = Complex64::i();
    Ok([(-a + b).im, (-i * a - i * b).im, (a - b).im, (i * a - i * b).im])
}

/// Euclidean angle arg(q − p), used on the configuration spaces C_n of points in the plane.
pub fn euclidean_angle(p: Complex64, q: Complex64) -> Result<f64> {
    if p == q {
        return Err(Error::CoincidentPoints);
    }
    Ok((q - p).arg())
}

/// Partials of arg(q − p) with respect to (Re p, Im p, Re q, Im q).
pub fn euclidean_angle_gradient(p: Complex64, q: Complex64) -> Result<[f64; 4]> {
    if p == q {
        return Err(Error::CoincidentPoints);
    }
    let a = (q - p).inv();
    let i = Complex64::i();
    Ok([(-a).im, (-i * a).im, a.im, (i * a).im])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reference_values() {
        assert!((phi(c(0.0, 1.0), c(1.0, 0.0)).unwrap() + PI / 2.0).abs() < 1e-15);
        assert_eq!(phi(c(0.0, 1.0), c(0.0, 0.0)).unwrap(), PI);
        let q = c(0.3, 0.0);
        assert!((phi(q + c(0.0, 1e-9), q).unwrap() - PI).abs() < 1e-12);
        assert!(matches!(phi(q, q), Err(Error::CoincidentPoints)));
        assert!(matches!(phi(c(0.0, -1.0), q), Err(Error::BelowRealAxis)));
    }

    fn finite_difference(f: impl Fn(Complex64, Complex64) -> f64, p: Complex64, q: Complex64) -> [f64; 4] {
        let h = 1e-6;
        // angle differences are taken modulo 2π so the branch cut at π does not matter
        let wrap = |x: f64| (x + PI).rem_euclid(2.0 * PI) - PI;
        let d = |dp: Complex64, dq: Complex64| wrap(f(p + dp, q + dq) - f(p - dp, q - dq)) / (2.0 * h);
        let z = c(0.0, 0.0);
        [d(c(h, 0.0), z), d(c(0.0, h), z), d(z, c(h, 0.0)), d(z, c(0.0, h))]
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let pts = [(c(0.0, 1.0), c(0.0, 0.0)), (c(0.4, 0.7), c(-1.2, 2.1)), (c(-0.3, 0.2), c(1.5, 0.0))];
        for (p, q) in pts {
            let g = phi_gradient(p, q).unwrap();
            // ground targets only move along the real axis
            let fd = finite_difference(|a, b| phi(a, Complex64::new(b.re, b.im.abs())).unwrap(), p, q);
            let components = if q.im == 0.0 { 3 } else { 4 };
            for k in 0..components {
                assert!((g[k] - fd[k]).abs() < 1e-8, "{k}: {} vs {}", g[k], fd[k]);
            }
            let e = euclidean_angle_gradient(p, q).unwrap();
            let fd = finite_difference(|a, b| euclidean_angle(a, b).unwrap(), p, q);
            for k in 0..4 {
                assert!((e[k] - fd[k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn translation_and_scaling() {
        let (p, q) = (c(0.4, 0.7), c(-1.2, 2.1));
        let g = phi_gradient(p, q).unwrap();
        assert!((g[0] + g[2]).abs() < 1e-14);
        let lambda = 3.5;
        let s = phi_gradient(p * lambda, q * lambda).unwrap();
        for k in 0..4 {
            assert!((s[k] - g[k] / lambda).abs() < 1e-14);
        }
    }
}
