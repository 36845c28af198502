//! Monte-Carlo estimation of weight integrals over gauge-fixed configuration spaces.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::angle::{euclidean_angle_gradient, phi_gradient};
use crate::error::{Error, Result};
use crate::graphs::{canonical_key, AdmissibleGraph, Vertex};

/// Samples per independent random stream; fixes the partition so results do not depend on thread count.
const CHUNK: u64 = 8192;

/// Which coordinates are frozen when quotienting by z ↦ az + b.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Gauge {
    /// m = 2: q = (0, 1). m = 1: q₁ = 0 and Im p₁ = 1.
    #[default]
    Standard,
    /// m = 2 only: q = (−1, 0).
    Shifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub graph_key: String,
}

#[derive(Clone, Copy)]
struct Stats {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Stats {
    const EMPTY: Stats = Stats { count: 0.0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Stats) -> Stats {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Stats {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }

    fn std_error(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Deterministic chunked sampling: chunk c draws from stream c of a generator seeded by `seed`.
fn sample_mean<F>(samples: u64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Stats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut s = Stats::EMPTY;
            for _ in 0..len {
                s.push(f(&mut rng));
            }
            s
        })
        .collect();
    let total = partial.into_iter().fold(Stats::EMPTY, Stats::merge);
    (total.mean, total.std_error())
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Real line coordinate x = tan(π(u − ½)) with Jacobian π(1 + x²).
fn sample_real(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let x = (PI * (open_unit(rng) - 0.5)).tan();
    (x, PI * (1.0 + x * x))
}

/// Positive coordinate y = v/(1 − v) with Jacobian 1/(1 − v)².
fn sample_positive(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let v = open_unit(rng);
    let w = 1.0 - v;
    (v / w, 1.0 / (w * w))
}

fn exact_zero(g: &AdmissibleGraph, samples: u64, seed: u64) -> WeightEstimate {
    WeightEstimate { mean: 0.0, std_error: 0.0, samples, seed, graph_key: canonical_key(g).to_string() }
}

/// Monte-Carlo weight in the standard gauge.
pub fn mc_weight(g: &AdmissibleGraph, samples: u64, seed: u64) -> Result<WeightEstimate> {
    mc_weight_with_gauge(g, samples, seed, Gauge::Standard)
}

/// Estimates (2π)^{−#E} ∫ ω_Γ as the mean of det(∂φ_e/∂coords) times the sampling Jacobian.
pub fn mc_weight_with_gauge(g: &AdmissibleGraph, samples: u64, seed: u64, gauge: Gauge) -> Result<WeightEstimate> {
    let (n, m) = (g.n(), g.m());
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if !(1..=2).contains(&m) {
        return Err(Error::UnsupportedGround(m));
    }
    if n == 0 {
        return Err(Error::UnsupportedAerial(0));
    }
    if m == 1 && gauge == Gauge::Shifted {
        return Err(Error::UnsupportedGround(1));
    }
    if !g.has_top_degree() {
        return Ok(exact_zero(g, samples, seed));
    }
    let ground: Vec<f64> = match (m, gauge) {
        (2, Gauge::Standard) => vec![0.0, 1.0],
        (2, Gauge::Shifted) => vec![-1.0, 0.0],
        _ => vec![0.0],
    };
    // column of each aerial coordinate; (Re p₁, Im p₁, Re p₂, …) with Im p₁ frozen when m = 1
    let frozen_im = m == 1;
    let col = |k: usize, im: bool| -> Option<usize> {
        if frozen_im {
            match (k, im) {
                (0, false) => Some(0),
                (0, true) => None,
                _ => Some(2 * k - 1 + im as usize),
            }
        } else {
            Some(2 * k + im as usize)
        }
    };
    let dim = g.num_edges();
    let edges = g.edges();
    // with Im p₁ frozen the remaining coordinates carry the opposite orientation
    let orientation = if frozen_im { -1.0 } else { 1.0 };
    let norm = (2.0 * PI).powi(dim as i32);
    let integrand = |rng: &mut ChaCha8Rng| -> f64 {
        let mut jac = orientation / norm;
        let mut pts = Vec::with_capacity(n);
        for k in 0..n {
            let (x, jx) = sample_real(rng);
            let (y, jy) = if frozen_im && k == 0 { (1.0, 1.0) } else { sample_positive(rng) };
            jac *= jx * jy;
            pts.push(Complex64::new(x, y));
        }
        let mut mat = DMatrix::<f64>::zeros(dim, dim);
        for (row, &(src, tgt)) in edges.iter().enumerate() {
            let target = match tgt {
                Vertex::Aerial(j) => pts[j],
                Vertex::Ground(j) => Complex64::new(ground[j], 0.0),
            };
            let Ok(grad) = phi_gradient(pts[src], target) else { return 0.0 };
            for (im, value) in [(false, grad[0]), (true, grad[1])] {
                if let Some(c) = col(src, im) {
                    mat[(row, c)] += value;
                }
            }
            if let Vertex::Aerial(j) = tgt {
                for (im, value) in [(false, grad[2]), (true, grad[3])] {
                    if let Some(c) = col(j, im) {
                        mat[(row, c)] += value;
                    }
                }
            }
        }
        mat.determinant() * jac
    };
    let (mean, std_error) = sample_mean(samples, seed, integrand);
    Ok(WeightEstimate { mean, std_error, samples, seed, graph_key: canonical_key(g).to_string() })
}

/// Raw integral ∫ ω_Γ over C_n (points in the plane modulo translations and dilations) for n ∈ {2, 3},
/// with Euclidean angle forms. Gauge: p₁ = 0, p₂ = e^{iθ}, p₃ free in Cartesian coordinates.
pub fn vanishing_check(g: &AdmissibleGraph, samples: u64, seed: u64) -> Result<WeightEstimate> {
    let n = g.n();
    if g.m() != 0 {
        return Err(Error::UnsupportedGround(g.m()));
    }
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedAerial(n));
    }
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if g.num_edges() != 2 * n - 3 {
        return Ok(exact_zero(g, samples, seed));
    }
    let dim = 2 * n - 3;
    let edges = g.edges();
    let integrand = |rng: &mut ChaCha8Rng| -> f64 {
        let theta = 2.0 * PI * open_unit(rng);
        let mut jac = 2.0 * PI;
        let mut pts = vec![Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta)];
        if n == 3 {
            // p₃ from an equal mixture of polar laws centred at p₁ and p₂; each has Cartesian
            // density 1/(2π r (1+r)²), which absorbs the 1/r singularity of the form at either centre
            let centre = if rng.gen::<bool>() { pts[0] } else { pts[1] };
            let alpha = 2.0 * PI * open_unit(rng);
            let (r, _) = sample_positive(rng);
            let z = centre + Complex64::from_polar(r, alpha);
            let density = |c: Complex64| {
                let d = (z - c).norm();
                1.0 / (2.0 * PI * d * (1.0 + d) * (1.0 + d))
            };
            jac /= 0.5 * (density(pts[0]) + density(pts[1]));
            pts.push(z);
        }
        // d p₂/dθ = (−sin θ, cos θ); p₃ uses Cartesian columns 1, 2
        let mut mat = DMatrix::<f64>::zeros(dim, dim);
        let add = |mat: &mut DMatrix<f64>, row: usize, v: usize, gre: f64, gim: f64| match v {
            1 => mat[(row, 0)] += -theta.sin() * gre + theta.cos() * gim,
            2 => {
                mat[(row, 1)] += gre;
                mat[(row, 2)] += gim;
            }
            _ => {}
        };
        for (row, &(src, tgt)) in edges.iter().enumerate() {
            let Vertex::Aerial(t) = tgt else { return 0.0 };
            let Ok(grad) = euclidean_angle_gradient(pts[src], pts[t]) else { return 0.0 };
            add(&mut mat, row, src, grad[0], grad[1]);
            add(&mut mat, row, t, grad[2], grad[3]);
        }
        mat.determinant() * jac
    };
    let (mean, std_error) = sample_mean(samples, seed, integrand);
    Ok(WeightEstimate { mean, std_error, samples, seed, graph_key: canonical_key(g).to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(e: &WeightEstimate, target: f64, k: f64) -> bool {
        (e.mean - target).abs() <= k * e.std_error.max(1e-12)
    }

    #[test]
    fn wedge_is_one_half() {
        let e = mc_weight(&AdmissibleGraph::wedge(), 200_000, 1).unwrap();
        assert!(within(&e, 0.5, 3.0), "{e:?}");
        assert!(e.std_error < 0.02);
    }

    #[test]
    fn single_edge_to_one_ground_point() {
        let g = AdmissibleGraph::hkr(1);
        let e = mc_weight(&g, 200_000, 2).unwrap();
        assert!(within(&e, 1.0, 3.0), "{e:?}");
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let g = AdmissibleGraph::moyal(2);
        let a = mc_weight(&g, 50_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_weight(&g, 50_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn star_swap_and_gauge() {
        let w = AdmissibleGraph::wedge();
        let a = mc_weight(&w, 100_000, 3).unwrap();
        let b = mc_weight(&w.swap_in_star(0, 0, 1).unwrap(), 100_000, 3).unwrap();
        assert!((a.mean + b.mean).abs() <= 3.0 * (a.std_error.hypot(b.std_error)) + 1e-12);
        let s = mc_weight_with_gauge(&w, 100_000, 4, Gauge::Shifted).unwrap();
        assert!((a.mean - s.mean).abs() <= 3.0 * a.std_error.hypot(s.std_error));
    }

    #[test]
    fn degree_filter_and_errors() {
        let g = AdmissibleGraph::from_encoded(2, 2, &[vec![-1], vec![-2]]).unwrap();
        let e = mc_weight(&g, 10, 0).unwrap();
        assert_eq!((e.mean, e.std_error), (0.0, 0.0));
        assert!(matches!(mc_weight(&AdmissibleGraph::hkr(3), 10, 0), Err(Error::UnsupportedGround(3))));
        assert!(matches!(mc_weight(&AdmissibleGraph::wedge(), 0, 0), Err(Error::ZeroSamples)));
    }

    #[test]
    fn plane_configurations() {
        let edge = AdmissibleGraph::from_encoded(2, 0, &[vec![2], vec![]]).unwrap();
        let e = vanishing_check(&edge, 10_000, 5).unwrap();
        assert!((e.mean - 2.0 * PI).abs() < 1e-9);
        let tri = AdmissibleGraph::from_encoded(3, 0, &[vec![2], vec![3], vec![1]]).unwrap();
        let t = vanishing_check(&tri, 200_000, 6).unwrap();
        assert!(within(&t, 0.0, 3.0), "{t:?}");
    }
}
