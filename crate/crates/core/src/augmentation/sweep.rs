//! Randomised robustness sweeps over cell parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{build_basis, Family, SpaceSpec};
use crate::dg::Problem;
use crate::error::{Error, Result};
use crate::mesh::CellGeometry;

use super::search::{find_augmented_basis, CellSample, SearchOptions};
use super::{explicit_psi, special_test_function, Regime, ScaledParams, TestFunctionOptions};

/// Log-uniform ranges for the physical cell parameters. `gamma` is drawn
/// log-uniformly as well, except that a fraction `zero_gamma` of samples use γ = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRanges {
    pub dx: (f64, f64),
    pub dy: (f64, f64),
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub gamma: (f64, f64),
    pub zero_gamma: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            dx: (1e-3, 1.0),
            dy: (1e-3, 1.0),
            alpha: (1e-2, 1e2),
            beta: (1e-2, 1e2),
            gamma: (1e-3, 1e2),
            zero_gamma: 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CflSample {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dx: f64,
    pub dy: f64,
    pub b: f64,
    pub g: f64,
    pub min_v: f64,
}

impl CflSample {
    pub fn cell(&self) -> CellSample {
        CellSample {
            problem: Problem::new_2d(self.alpha, self.beta, self.gamma),
            geometry: CellGeometry::new(&[0.0, 0.0], &[self.dx, self.dy]).expect("positive widths"),
        }
    }
}

fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        (rng.gen_range(lo.ln()..hi.ln())).exp()
    }
}

/// One random parameter tuple, returned with `min_v = NaN`.
pub fn sample_parameters(rng: &mut impl Rng, ranges: &SampleRanges) -> CflSample {
    let dx = log_uniform(rng, ranges.dx);
    let dy = log_uniform(rng, ranges.dy);
    let alpha = log_uniform(rng, ranges.alpha);
    let beta = log_uniform(rng, ranges.beta);
    let gamma = if rng.gen_bool(ranges.zero_gamma) { 0.0 } else { log_uniform(rng, ranges.gamma) };
    let s = ScaledParams::from_physical(alpha, beta, gamma, dx, dy).expect("sampled parameters are positive");
    CflSample { alpha, beta, gamma, dx, dy, b: s.b, g: s.g, min_v: f64::NAN }
}

/// Sample `n` parameter tuples inside `regime` and evaluate the minimum of the
/// test function of the regime's closed-form augmented space on each.
pub fn cfl_sweep(family: Family, k: usize, regime: Regime, n: usize, seed: u64) -> Result<Vec<CflSample>> {
    let aug = explicit_psi(family, k, regime)?;
    let basis = aug.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = SampleRanges::default();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > 10_000 * n.max(1) {
            return Err(Error::Config(format!("could not sample {n} tuples in regime {regime}")));
        }
        let mut s = sample_parameters(&mut rng, &ranges);
        if !regime.contains(family, k, s.b) {
            continue;
        }
        let cell = s.cell();
        s.min_v = special_test_function(&basis, &cell.problem, &cell.geometry, &TestFunctionOptions::default())?.min_value;
        out.push(s);
    }
    Ok(out)
}

/// Optimise a separate ψ ∈ P_r for each of `n` random tuples and record the
/// certified minimum of `v` (the best minimum found when no start succeeds).
pub fn optimized_sweep(k: usize, r: usize, n: usize, seed: u64, opts: &SearchOptions) -> Result<Vec<CflSample>> {
    let spec = SpaceSpec::new(Family::P, k, 2);
    build_basis(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = SampleRanges::default();
    (0..n)
        .map(|i| {
            let mut s = sample_parameters(&mut rng, &ranges);
            let o = SearchOptions { seed: seed.wrapping_add(i as u64), ..opts.clone() };
            s.min_v = match find_augmented_basis(spec, r, &[s.cell()], &o) {
                Ok(out) => out.min_value(),
                Err(Error::AugmentationInfeasible { best_min_v }) => best_min_v,
                Err(e) => return Err(e),
            };
            Ok(s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_respects_regime() {
        let s = cfl_sweep(Family::Q, 2, Regime::LowB, 10, 1).unwrap();
        assert_eq!(s.len(), 10);
        assert!(s.iter().all(|x| x.b <= 0.5 && x.min_v.is_finite()));
    }
}
