//! Closed-form test function for the augmented Q2 space at γ = 0, B ≤ 1/2.
//!
//! In the tensor Bernstein basis of Q2 plus the low-B augmented function, the
//! special test function has coefficients `c_i = Δx p_i(B) / ((B + 1) Λ(B))`
//! for i = 1..9 and `c_10 = Δx p_10(B) / (4 Λ(B))`. The polynomials are stored
//! as integer coefficient arrays in ascending powers of B.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::augmentation::{explicit_psi_poly, grid_points, special_test_function, Regime, TestFunctionOptions};
use crate::basis::{bernstein_q2, BasisSet, Family};
use crate::dg::Problem;
use crate::error::{Error, Result};
use crate::mesh::CellGeometry;

const P10_SCALE: i64 = -121_275;

/// p_1 .. p_10, coefficients of B^0 .. B^7.
pub const P: [[i64; 8]; 10] = [
    [2350, 9265, 42181, 60834, 29148, 28920, 5718, 2020],
    [2350, 23365, 42821, 30325, 12607, 11517, 4364, 1510],
    [2350, 2215, -5889, -9774, -2174, 1944, -190, 0],
    [1175, -955, 2828, 29439, 38336, 37248, 20838, 2020],
    [1175, 9545, 26933, 46611, 53315, 22499, 5434, 1110],
    [1175, -955, 6013, 7958, -2241, -3180, 400, 0],
    [0, 3675, 1595, -4256, -8846, -7744, 658, 2020],
    [0, -1575, 815, -5728, -5072, 5566, 5004, 960],
    [0, 3675, 835, 1640, 3632, 1556, -110, 0],
    [
        0,
        -525 * P10_SCALE,
        95 * P10_SCALE,
        317 * P10_SCALE,
        639 * P10_SCALE,
        -70 * P10_SCALE,
        50 * P10_SCALE,
        0,
    ],
];

pub const LAMBDA: [i64; 8] = [2350, 10440, 19926, 22737, 19129, 14544, 8228, 2020];

fn horner(coeffs: &[i64], b: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * b + c as f64)
}

/// `p_i(B)` for `i` in 1..=10.
pub fn p(i: usize, b: f64) -> f64 {
    assert!((1..=10).contains(&i), "p_i is defined for i = 1..10");
    horner(&P[i - 1], b)
}

pub fn lambda(b: f64) -> f64 {
    horner(&LAMBDA, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Q2Coefficients {
    pub c: [f64; 10],
    pub lambda: f64,
    pub b: f64,
    pub dx: f64,
}

impl Q2Coefficients {
    /// The closed-form test function at a reference point.
    pub fn v(&self, basis: &BasisSet, xi: &[f64]) -> f64 {
        basis.eval_combination(&self.c, xi)
    }
}

pub fn q2_coefficients(b: f64, dx: f64) -> Result<Q2Coefficients> {
    if !(b >= 0.0 && b.is_finite()) || !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::InvalidCoefficient(format!("need B >= 0 and dx > 0, got B = {b}, dx = {dx}")));
    }
    let lam = lambda(b);
    let mut c = [0.0; 10];
    for (i, ci) in c.iter_mut().enumerate().take(9) {
        *ci = dx * p(i + 1, b) / ((b + 1.0) * lam);
    }
    c[9] = dx * p(10, b) / (4.0 * lam);
    Ok(Q2Coefficients { c, lambda: lam, b, dx })
}

/// Bernstein Q2 followed by the low-B augmented function, the basis the
/// coefficients refer to.
pub fn augmented_bernstein_q2() -> BasisSet {
    let psi = explicit_psi_poly(Family::Q, 2, Regime::LowB).expect("Q2 has a closed form");
    bernstein_q2().augmented_with(psi).expect("plain Bernstein basis")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignViolation {
    pub b: f64,
    pub check: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SignReport {
    pub samples: usize,
    pub violations: Vec<SignViolation>,
}

impl SignReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every sign statement of the analysis at a single B.
pub fn sign_checks(b: f64) -> Vec<(&'static str, f64)> {
    let b2 = b * b;
    let b4 = b2 * b2;
    let b5 = b4 * b;
    let p4_bound = -955.0 * b + 1175.0;
    let p6_bound = -3180.0 * b5 - 2241.0 * b4 - 955.0 * b + 1175.0;
    let p9_bound = b * (3675.0 - 110.0 * b5);
    let w2 = p(9, b) / 2.0 - p(8, b);
    vec![
        ("p1", p(1, b)),
        ("p2", p(2, b)),
        ("p5", p(5, b)),
        ("p4 - bound", p(4, b) - p4_bound),
        ("p4 bound", p4_bound),
        ("p6 - bound", p(6, b) - p6_bound),
        ("p6 bound", p6_bound),
        ("p9 - bound", p(9, b) - p9_bound),
        ("p9 bound", p9_bound),
        ("p3", p(3, b)),
        ("p7", p(7, b)),
        ("p10", p(10, b)),
        ("-p8", -p(8, b)),
        ("w''", w2),
        // w(1) = c_9 and w(-1) = 0
        ("w(1)", p(9, b)),
    ]
}

/// Evaluate [`sign_checks`] at `n` evenly spaced B in `[lo, hi]`.
/// Each quantity must be `>= -tol * scale`, scale being the largest |p_i|.
pub fn verify_sign_bounds(n: usize, (lo, hi): (f64, f64)) -> SignReport {
    let mut report = SignReport { samples: n, violations: Vec::new() };
    for s in 0..n {
        let b = if n == 1 { lo } else { lo + (hi - lo) * s as f64 / (n - 1) as f64 };
        let scale = (1..=10).map(|i| p(i, b).abs()).fold(1.0, f64::max);
        for (check, value) in sign_checks(b) {
            if value < -1e-12 * scale {
                report.violations.push(SignViolation { b, check, value });
            }
        }
    }
    report
}

fn numerical_v(b: f64, dx: f64) -> Result<Vec<f64>> {
    let basis = augmented_bernstein_q2();
    let problem = Problem::new_2d(1.0, b, 0.0);
    let geometry = CellGeometry::new(&[0.0, 0.0], &[dx, dx])?;
    Ok(special_test_function(&basis, &problem, &geometry, &TestFunctionOptions::default())?.v)
}

/// Largest difference between the closed-form and the numerically solved test
/// function at `n_points` random reference points, relative to the largest
/// value of the numerical one at those points.
pub fn cross_validate(b: f64, dx: f64, n_points: usize, seed: u64) -> Result<f64> {
    let closed = q2_coefficients(b, dx)?;
    let v = numerical_v(b, dx)?;
    let basis = augmented_bernstein_q2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for _ in 0..n_points.max(1) {
        let x = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
        let num = basis.eval_combination(&v, &x);
        diff = diff.max((closed.v(&basis, &x) - num).abs());
        norm = norm.max(num.abs());
    }
    Ok(diff / norm.max(f64::MIN_POSITIVE))
}

/// Minimum of the closed-form v over an `n × n` grid on the reference cell.
pub fn closed_form_grid_min(b: f64, dx: f64, n: usize) -> Result<f64> {
    let c = q2_coefficients(b, dx)?;
    let basis = augmented_bernstein_q2();
    Ok(grid_points(n, 2).iter().map(|x| c.v(&basis, &x[..2])).fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixRow {
    pub b: f64,
    pub p: [f64; 10],
    pub lambda: f64,
    pub min_v: f64,
}

/// One report row per B, with Δx = 1 and a 101 × 101 grid for `min_v`.
pub fn appendix_rows(bs: &[f64]) -> Result<Vec<AppendixRow>> {
    bs.iter()
        .map(|&b| {
            let mut ps = [0.0; 10];
            for (i, v) in ps.iter_mut().enumerate() {
                *v = p(i + 1, b);
            }
            Ok(AppendixRow { b, p: ps, lambda: lambda(b), min_v: closed_form_grid_min(b, 1.0, 101)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let c = q2_coefficients(0.0, 0.3).unwrap();
        assert_eq!(c.lambda, 2350.0);
        assert!((c.c[0] - 0.3).abs() < 1e-15);
        assert_eq!(c.c[9], 0.0);
    }

    #[test]
    fn p8_is_non_positive_at_half() {
        assert!(p(8, 0.5) <= 0.0);
        assert!(p(3, 0.25) >= 0.0 && p(7, 0.25) >= 0.0 && p(10, 0.25) >= 0.0);
    }

    #[test]
    fn lambda_positive() {
        assert!((0..=1000).all(|i| lambda(i as f64 / 100.0) > 0.0));
    }

    #[test]
    fn closed_form_matches_linear_solve() {
        for b in [0.1, 0.5] {
            let d = cross_validate(b, 0.1, 1000, 3).unwrap();
            assert!(d <= 1e-8, "B = {b}: {d:e}");
        }
        assert!(cross_validate(1e-8, 0.1, 1000, 3).unwrap() <= 1e-6);
    }

    #[test]
    fn sign_sweep_passes_in_regime() {
        assert!(verify_sign_bounds(10_000, (0.0, 0.5)).passed());
        let single = verify_sign_bounds(1, (0.0, 0.0));
        assert!(single.passed() && single.samples == 1);
    }
}
