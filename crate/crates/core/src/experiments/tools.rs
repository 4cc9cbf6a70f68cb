//! Thin drivers around the augmentation sweeps, the search and the
//! closed-form Q2 analysis.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appendix::{appendix_rows, closed_form_grid_min, cross_validate, verify_sign_bounds, SignReport};
use crate::augmentation::{
    cfl_sweep, find_augmented_basis, optimized_sweep, CellSample, CflSample, CheckSet, Regime, ScaledParams,
    SearchOptions,
};
use crate::basis::{Family, SpaceSpec};
use crate::dg::Problem;
use crate::mesh::CellGeometry;
use crate::error::{Error, Result};

use super::ResultTable;

fn sample_table(name: &str, samples: &[CflSample]) -> ResultTable {
    let mut t = ResultTable::new(name, &["alpha", "beta", "gamma", "dx", "dy", "b", "g", "min_v"]);
    for s in samples {
        t.push(vec![s.alpha, s.beta, s.gamma, s.dx, s.dy, s.b, s.g, s.min_v]);
    }
    t
}

/// Minimum of `v` over random cells. Q and S use the closed-form ψ of
/// `regime`; P optimizes a ψ of degree `r` (default `k + 2`) per cell.
pub fn run_cfl_sweep(family: Family, k: usize, regime: Option<Regime>, r: Option<usize>, n: usize, seed: u64) -> Result<ResultTable> {
    let name = format!("cfl-sweep-{family}{k}");
    let table = match family {
        Family::P => {
            let r = r.unwrap_or(k + 2);
            sample_table(&name, &optimized_sweep(k, r, n, seed, &SearchOptions::default())?).with_meta("r", r)
        }
        _ => {
            let regime = regime.ok_or_else(|| Error::Config("a regime is required for Q and S sweeps".into()))?;
            sample_table(&name, &cfl_sweep(family, k, regime, n, seed)?).with_meta("regime", regime)
        }
    };
    Ok(table.with_meta("seed", seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixOutcome {
    /// B, p_1..p_10, Λ and the grid minimum of v per sampled B.
    pub table: ResultTable,
    pub signs: SignReport,
    /// Largest relative deviation between closed form and linear solve.
    pub cross_validation: f64,
    /// Smallest grid minimum of the closed-form v over the sampled B.
    pub grid_min: f64,
}

impl AppendixOutcome {
    pub fn passed(&self) -> bool {
        self.signs.passed() && self.cross_validation <= 1e-8 && self.grid_min >= -1e-10
    }
}

/// Sign sweep on `n_signs` points of `[0, 1/2]`, cross-validation and grid
/// minima at `n_b` random B in `(0, 1/2]`.
pub fn run_appendix_a(n_signs: usize, n_b: usize, seed: u64) -> Result<AppendixOutcome> {
    let signs = verify_sign_bounds(n_signs, (0.0, 0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs: Vec<f64> = (0..n_b).map(|_| rng.gen_range(1e-6..=0.5)).collect();
    let mut cross = 0.0f64;
    let mut grid_min = f64::INFINITY;
    for (i, &b) in bs.iter().enumerate() {
        let dx = 10f64.powf(rng.gen_range(-3.0..0.0));
        cross = cross.max(cross_validate(b, dx, 1000, seed.wrapping_add(i as u64))?);
        // v scales with Δx, so compare minima at Δx = 1
        grid_min = grid_min.min(closed_form_grid_min(b, 1.0, 101)?);
    }
    let mut cols = vec!["b".to_string()];
    cols.extend((1..=10).map(|i| format!("p{i}")));
    cols.extend(["lambda".to_string(), "min_v".to_string()]);
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut table = ResultTable::new("appendix-a", &col_refs)
        .with_meta("seed", seed)
        .with_meta("sign_samples", n_signs);
    for row in appendix_rows(&bs)? {
        let mut r = vec![row.b];
        r.extend(row.p);
        r.extend([row.lambda, row.min_v]);
        table.push(r);
    }
    Ok(AppendixOutcome { table, signs, cross_validation: cross, grid_min })
}

#[derive(Clone, Debug, Serialize)]
pub struct AugmentTiming {
    pub family: Family,
    pub k: usize,
    pub r: usize,
    pub seconds: f64,
    pub min_v: f64,
    pub feasible: bool,
    pub starts: usize,
}

/// Time the search for ψ on one fixed cell for each degree in `ks`.
pub fn run_augment(
    family: Family,
    ks: &[usize],
    r: Option<usize>,
    params: (f64, f64, f64, f64, f64),
    dim: usize,
    seed: u64,
) -> Result<(ResultTable, Vec<AugmentTiming>)> {
    let (alpha, beta, gamma, dx, dy) = params;
    let cell = match dim {
        2 => {
            ScaledParams::from_physical(alpha, beta, gamma, dx, dy)?;
            CellSample { problem: Problem::new_2d(alpha, beta, gamma), geometry: CellGeometry::new(&[0.0, 0.0], &[dx, dy])? }
        }
        3 => CellSample { problem: Problem::new_3d(alpha, beta, gamma), geometry: CellGeometry::new(&[0.0; 3], &[dx, dy, dx])? },
        d => return Err(Error::Config(format!("dimension {d} is not supported"))),
    };
    let mut table = ResultTable::new(
        &format!("augment-{family}"),
        &["k", "r", "seconds", "min_v", "feasible", "starts"],
    )
    .with_meta("seed", seed)
    .with_meta("params", [alpha, beta, gamma, dx, dy])
    .with_meta("dim", dim);
    let mut out = Vec::new();
    for &k in ks {
        let r = r.filter(|&r| r > k).unwrap_or(k + 2);
        let opts = SearchOptions { seed, check: CheckSet::GaussWithInflow, ..SearchOptions::default() };
        let start = Instant::now();
        let res = find_augmented_basis(SpaceSpec::new(family, k, dim), r, std::slice::from_ref(&cell), &opts);
        let seconds = start.elapsed().as_secs_f64();
        let t = match res {
            Ok(o) => AugmentTiming { family, k, r, seconds, min_v: o.min_value(), feasible: true, starts: o.starts_used },
            Err(Error::AugmentationInfeasible { best_min_v }) => {
                AugmentTiming { family, k, r, seconds, min_v: best_min_v, feasible: false, starts: opts.restarts }
            }
            Err(e) => return Err(e),
        };
        table.push(vec![k as f64, r as f64, t.seconds, t.min_v, f64::from(u8::from(t.feasible)), t.starts as f64]);
        out.push(t);
    }
    Ok((table, out))
}
