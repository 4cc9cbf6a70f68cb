//! Tensor-product Gauss–Legendre and Gauss–Lobatto rules on `[-1,1]^d`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::poly::MAX_DIM;

/// A reference-coordinate point; unused trailing axes are zero.
pub type Point = [f64; MAX_DIM];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Legendre,
    Lobatto,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub dim: usize,
    pub points_per_axis: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Highest per-axis polynomial degree integrated exactly.
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(&p[..self.dim]))
            .sum()
    }
}

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Legendre polynomial P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    // derivative via the standard recurrence; endpoints handled separately
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * x.powi(n as i32 + 1)
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// One-dimensional Gauss–Legendre nodes and weights, nodes ascending.
pub fn gauss_legendre_1d(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 {
        return Err(Error::InvalidQuadrature("Gauss-Legendre needs at least one point".into()));
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok((x, w))
}

/// One-dimensional Gauss–Lobatto nodes and weights, including ±1.
pub fn gauss_lobatto_1d(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidQuadrature("Gauss-Lobatto needs at least two points".into()));
    }
    let m = n - 1;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    x[0] = -1.0;
    x[m] = 1.0;
    let end_w = 2.0 / (n * m) as f64;
    w[0] = end_w;
    w[m] = end_w;
    // interior nodes are roots of P'_m; Newton on P'_m using
    // (1 - x^2) P''_m = 2x P'_m - m(m+1) P_m
    for i in 1..m {
        let mut z = -(std::f64::consts::PI * i as f64 / m as f64).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre(m, z);
            let d2p = (2.0 * z * dp - (m * (m + 1)) as f64 * p) / (1.0 - z * z);
            let dz = dp / d2p;
            z -= dz;
            if dz.abs() <= NEWTON_TOL {
                break;
            }
        }
        if 2 * i == m {
            z = 0.0;
        }
        let (p, _) = legendre(m, z);
        x[i] = z;
        w[i] = 2.0 / ((n * m) as f64 * p * p);
    }
    Ok((x, w))
}

/// Tensor product of a 1D rule over `dim` axes; the first axis varies slowest.
pub fn tensor(nodes: &[f64], weights: &[f64], dim: usize) -> (Vec<Point>, Vec<f64>) {
    let n = nodes.len();
    let total = n.pow(dim as u32);
    let mut pts = Vec::with_capacity(total);
    let mut wts = Vec::with_capacity(total);
    for flat in 0..total {
        let mut p = [0.0; MAX_DIM];
        let mut w = 1.0;
        let mut rem = flat;
        for a in (0..dim).rev() {
            let i = rem % n;
            rem /= n;
            p[a] = nodes[i];
            w *= weights[i];
        }
        pts.push(p);
        wts.push(w);
    }
    (pts, wts)
}

type CacheKey = (RuleKind, usize, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: RuleKind, n: usize, dim: usize) -> Result<Arc<QuadratureRule>> {
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidQuadrature(format!("dimension {dim}")));
    }
    if let Some(rule) = cache().lock().unwrap().get(&(kind, n, dim)) {
        return Ok(rule.clone());
    }
    let (x, w, exact_degree) = match kind {
        RuleKind::Legendre => {
            let (x, w) = gauss_legendre_1d(n)?;
            (x, w, 2 * n - 1)
        }
        RuleKind::Lobatto => {
            let (x, w) = gauss_lobatto_1d(n)?;
            (x, w, 2 * n - 3)
        }
    };
    let (points, weights) = tensor(&x, &w, dim);
    let rule = Arc::new(QuadratureRule { kind, dim, points_per_axis: n, points, weights, exact_degree });
    cache().lock().unwrap().insert((kind, n, dim), rule.clone());
    Ok(rule)
}

/// Tensor Gauss–Legendre rule, exact for per-axis degree ≤ 2n−1.
pub fn gauss_legendre(n_points_per_axis: usize, dim: usize) -> Result<Arc<QuadratureRule>> {
    if n_points_per_axis < 1 {
        return Err(Error::InvalidQuadrature("Gauss-Legendre needs at least one point".into()));
    }
    cached(RuleKind::Legendre, n_points_per_axis, dim)
}

/// Tensor Gauss–Lobatto rule, exact for per-axis degree ≤ 2n−3, all weights positive.
pub fn gauss_lobatto(n_points_per_axis: usize, dim: usize) -> Result<Arc<QuadratureRule>> {
    if n_points_per_axis < 2 {
        return Err(Error::InvalidQuadrature("Gauss-Lobatto needs at least two points".into()));
    }
    cached(RuleKind::Lobatto, n_points_per_axis, dim)
}

/// Points per axis so that products of two functions of per-axis degree
/// `degree` are integrated exactly (2n − 1 ≥ 2·degree).
pub fn required_points_for(degree: u32) -> usize {
    (degree as usize + 1).max(1)
}

/// Lower-dimensional rule on the face `axis = side` (side ±1) embedded in full
/// reference coordinates. Weights are those of the (dim−1)-dimensional rule.
pub fn face_rule(n_points_per_axis: usize, dim: usize, axis: usize, side: f64) -> Result<(Vec<Point>, Vec<f64>)> {
    let (x, w) = gauss_legendre_1d(n_points_per_axis)?;
    let (pts, wts) = tensor(&x, &w, dim - 1);
    let pts = pts
        .into_iter()
        .map(|q| {
            let mut p = [0.0; MAX_DIM];
            let mut j = 0;
            for (a, slot) in p.iter_mut().enumerate().take(dim) {
                if a == axis {
                    *slot = side;
                } else {
                    *slot = q[j];
                    j += 1;
                }
            }
            p
        })
        .collect();
    Ok((pts, wts))
}
