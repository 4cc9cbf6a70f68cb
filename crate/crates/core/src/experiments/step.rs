//! Transport of a step profile, with and without the scaling limiter.

use serde::Serialize;

use crate::augmentation::{grid_points, CheckSet};
use crate::basis::{build_basis, Family, SpaceSpec};
use crate::dg::{sweep_solve, DgField, Problem, SweepOptions, SweepResult};
use crate::error::{Error, Result};
use crate::limiter::lobatto_points;
use crate::mesh::CartesianMesh;

use super::{choose_space, AugmentChoice, ResultTable};

#[derive(Clone, Debug, Serialize)]
pub struct StepOptions {
    pub dim: usize,
    pub family: Family,
    pub k: usize,
    pub r: Option<usize>,
    pub augment: AugmentChoice,
    pub seed: u64,
    /// Samples per spatial axis of the final-time profile.
    pub profile_points: usize,
}

impl StepOptions {
    pub fn new(dim: usize, family: Family, k: usize, augment: AugmentChoice) -> Self {
        let profile_points = if dim == 2 { 400 } else { 64 };
        Self { dim, family, k, r: None, augment, seed: 0, profile_points }
    }
}

fn indicator(x: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// The preset mesh and problem, plus the exact solution.
///
/// 2D: first axis t ∈ [0, 0.1], second axis x ∈ [0, 2π], 40 × 40 cells,
/// initial profile 1 on x ∈ [3, 4]. 3D: (x, y) ∈ [0, 2π]² with 32 × 32 cells,
/// t ∈ [0, 1] with 16 cells, initial profile 1 on [2, 3]². Unit speeds, no
/// source or reaction, zero data on the spatial inflow boundaries.
pub fn step_problem(dim: usize) -> Result<(CartesianMesh, Problem, fn(&[f64]) -> f64)> {
    let two_pi = 2.0 * std::f64::consts::PI;
    match dim {
        2 => {
            let mesh = CartesianMesh::uniform(&[(0.0, 0.1), (0.0, two_pi)], &[40, 40])?;
            let problem = Problem::new_2d(1.0, 1.0, 0.0).with_inflow(0, |p| indicator(p[1], 3.0, 4.0));
            fn exact(p: &[f64]) -> f64 {
                indicator(p[1] - p[0], 3.0, 4.0)
            }
            Ok((mesh, problem, exact))
        }
        3 => {
            let mesh = CartesianMesh::uniform(&[(0.0, two_pi), (0.0, two_pi), (0.0, 1.0)], &[32, 32, 16])?;
            let problem = Problem::new_3d(1.0, 1.0, 0.0)
                .with_inflow(2, |p| indicator(p[0], 2.0, 3.0) * indicator(p[1], 2.0, 3.0));
            fn exact(p: &[f64]) -> f64 {
                indicator(p[0] - p[2], 2.0, 3.0) * indicator(p[1] - p[2], 2.0, 3.0)
            }
            Ok((mesh, problem, exact))
        }
        d => Err(Error::Config(format!("no step preset in dimension {d}"))),
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    /// One row per run (limit = 0, 1) with point-value extrema.
    pub summary: ResultTable,
    /// Final-time samples of the exact and both numerical solutions.
    pub profile: ResultTable,
    pub unlimited: SweepResult,
    /// `None` when some cell average is negative, so limiting is impossible.
    pub limited: Option<SweepResult>,
}

impl StepOutcome {
    pub fn limited_min_lobatto(&self) -> Option<f64> {
        self.summary.rows.get(1).map(|r| r[1]).filter(|v| !v.is_nan())
    }
}

fn extrema(field: &DgField, k: usize, dim: usize) -> Result<[f64; 3]> {
    Ok([
        field.min_at_points(&lobatto_points(k, dim)?),
        field.min_at_points(&grid_points(11, dim)),
        field.averages().into_iter().fold(f64::INFINITY, f64::min),
    ])
}

pub fn run_step(opts: &StepOptions) -> Result<StepOutcome> {
    let dim = opts.dim;
    let (mesh, problem, exact) = step_problem(dim)?;
    let base = build_basis(SpaceSpec::new(opts.family, opts.k, dim))?;
    let chosen = choose_space(&base, opts.augment, opts.r, CheckSet::GaussWithInflow, &mesh, &problem, opts.seed)?;
    let aug = chosen.as_ref().map(|c| &c.basis);
    let so = SweepOptions { augment: opts.augment.mode(), ..SweepOptions::default() };
    let unlimited = sweep_solve(&mesh, &problem, &base, aug, &so)?;
    let limited = match sweep_solve(&mesh, &problem, &base, aug, &SweepOptions { limit: true, ..so }) {
        Ok(r) => Some(r),
        Err(Error::NegativeAverage { .. }) => None,
        Err(e) => return Err(e),
    };

    let name = format!("step-{dim}d-{}{}", opts.family, opts.k);
    let mut summary =
        ResultTable::new(&name, &["limit", "min_lobatto", "min_grid", "min_average", "augmented_cells", "limited_cells"])
            .with_meta("options", opts);
    if let Some(c) = &chosen {
        summary.set_meta("psi", &c.psi);
    }
    let counts = |r: &SweepResult| r.field.space_counts().get(1).copied().unwrap_or(0) as f64;
    let e = extrema(&unlimited.field, opts.k, dim)?;
    summary.push(vec![0.0, e[0], e[1], e[2], counts(&unlimited), 0.0]);
    match &limited {
        Some(r) => {
            let e = extrema(&r.field, opts.k, dim)?;
            let lc = r.limiter.as_ref().map_or(0, |l| l.limited_cells) as f64;
            summary.push(vec![1.0, e[0], e[1], e[2], counts(r), lc]);
        }
        None => summary.push(vec![1.0, f64::NAN, f64::NAN, f64::NAN, counts(&unlimited), f64::NAN]),
    }

    let t_end = *mesh.nodes(if dim == 2 { 0 } else { 2 }).last().expect("non-empty axis");
    let n = opts.profile_points.max(2);
    let space_axis = if dim == 2 { 1 } else { 0 };
    let x_end = *mesh.nodes(space_axis).last().expect("non-empty axis");
    let xs: Vec<f64> = (0..n).map(|i| x_end * i as f64 / (n - 1) as f64).collect();
    let sample = |f: &DgField, p: &[f64]| f.eval(p).unwrap_or(f64::NAN);
    let mut profile = if dim == 2 {
        ResultTable::new(&format!("{name}-profile"), &["x", "exact", "unlimited", "limited"])
    } else {
        ResultTable::new(&format!("{name}-profile"), &["x", "y", "exact", "unlimited", "limited"])
    }
    .with_meta("t", t_end);
    if dim == 2 {
        for &x in &xs {
            let p = [t_end, x];
            let lim = limited.as_ref().map_or(f64::NAN, |r| sample(&r.field, &p));
            profile.push(vec![x, exact(&p), sample(&unlimited.field, &p), lim]);
        }
    } else {
        for &y in &xs {
            for &x in &xs {
                let p = [x, y, t_end];
                let lim = limited.as_ref().map_or(f64::NAN, |r| sample(&r.field, &p));
                profile.push(vec![x, y, exact(&p), sample(&unlimited.field, &p), lim]);
            }
        }
    }
    Ok(StepOutcome { summary, profile, unlimited, limited })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_profile_moves_with_unit_speed() {
        let (_, _, exact) = step_problem(2).unwrap();
        assert_eq!(exact(&[0.1, 3.05]), 0.0);
        assert_eq!(exact(&[0.1, 3.15]), 1.0);
        let (_, _, exact3) = step_problem(3).unwrap();
        assert_eq!(exact3(&[3.5, 3.5, 1.0]), 1.0);
        assert_eq!(exact3(&[2.5, 3.5, 0.0]), 0.0);
    }
}
