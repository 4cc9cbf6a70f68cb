//! Manufactured-solution convergence studies in 2D and 3D.

use std::sync::Arc;

use serde::Serialize;

use crate::augmentation::{grid_points, CheckSet};
use crate::basis::{build_basis, Family, SpaceSpec};
use crate::dg::{field, l2_error, sweep_solve, Problem, ScalarField, SweepOptions};
use crate::error::{Error, Result};
use crate::limiter::limit_field;
use crate::mesh::CartesianMesh;

use super::{choose_space, AugmentChoice, ResultTable};

/// A problem with known solution on a box, refined uniformly.
#[derive(Clone)]
pub struct Manufactured {
    pub name: &'static str,
    pub problem: Problem,
    pub exact: ScalarField,
    pub extents: Vec<(f64, f64)>,
}

impl Manufactured {
    pub fn mesh(&self, n: usize) -> Result<CartesianMesh> {
        CartesianMesh::uniform(&self.extents, &vec![n; self.extents.len()])
    }
}

/// `u = cos²(x − t) + 1e−14` with α = β = γ = 1, first axis t ∈ [0, 0.1],
/// second axis x ∈ [0, 2π]. Since `u_t + u_x = 0`, the source is `u` itself.
pub fn manufactured_2d() -> Manufactured {
    let u = |p: &[f64]| (p[1] - p[0]).cos().powi(2) + 1e-14;
    let mut problem = Problem::new_2d(1.0, 1.0, 1.0).with_source_field(u);
    for axis in 0..2 {
        problem = problem.with_inflow(axis, u);
    }
    Manufactured {
        name: "convergence-2d",
        problem,
        exact: field(u),
        extents: vec![(0.0, 0.1), (0.0, 2.0 * std::f64::consts::PI)],
    }
}

/// `u = x y e^{t/8} e^{(x² + y²)/8}` on `[0, 0.5]³` with α = β = 8, γ = 0.1.
pub fn manufactured_3d() -> Manufactured {
    const SPEED: f64 = 8.0;
    const GAMMA: f64 = 0.1;
    let e = |p: &[f64]| (p[2] / 8.0 + (p[0] * p[0] + p[1] * p[1]) / 8.0).exp();
    let u = move |p: &[f64]| p[0] * p[1] * e(p);
    let f = move |p: &[f64]| {
        let ut = u(p) / 8.0;
        let ux = p[1] * e(p) * (1.0 + p[0] * p[0] / 4.0);
        let uy = p[0] * e(p) * (1.0 + p[1] * p[1] / 4.0);
        ut + SPEED * (ux + uy) + GAMMA * u(p)
    };
    let mut problem = Problem::new_3d(SPEED, SPEED, GAMMA).with_source_field(f);
    for axis in 0..3 {
        problem = problem.with_inflow(axis, u);
    }
    Manufactured { name: "convergence-3d", problem, exact: field(u), extents: vec![(0.0, 0.5); 3] }
}

/// `log2(e_{i-1} / e_i)` for each row after the first (NaN for the first).
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    (0..errors.len()).map(|i| if i == 0 { f64::NAN } else { (errors[i - 1] / errors[i]).log2() }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceOptions {
    pub dim: usize,
    pub family: Family,
    pub k: usize,
    pub ns: Vec<usize>,
    pub augment: AugmentChoice,
    pub r: Option<usize>,
    /// Also report the error of the augmented solution after limiting it at
    /// the Lobatto points of every cell.
    pub limit: bool,
    pub seed: u64,
    /// Points per axis of the uniform per-cell grid used for `min u_h`.
    pub min_grid: usize,
}

impl ConvergenceOptions {
    pub fn new(dim: usize, family: Family, k: usize, ns: &[usize]) -> Self {
        Self { dim, family, k, ns: ns.to_vec(), augment: AugmentChoice::Off, r: None, limit: false, seed: 0, min_grid: 21 }
    }
}

/// L2 errors and observed orders of the base scheme, the minimum of the base
/// solution, and optionally the augmented scheme with and without limiting.
pub fn run_convergence(opts: &ConvergenceOptions) -> Result<ResultTable> {
    let m = match opts.dim {
        2 => manufactured_2d(),
        3 => manufactured_3d(),
        d => return Err(Error::Config(format!("no manufactured solution in dimension {d}"))),
    };
    if opts.limit && opts.augment == AugmentChoice::Off {
        return Err(Error::Config("the limited run needs an augmented space".into()));
    }
    let base = build_basis(SpaceSpec::new(opts.family, opts.k, opts.dim))?;
    let grid = grid_points(opts.min_grid, opts.dim);
    let exact = Arc::clone(&m.exact);
    let err = |f: &crate::dg::DgField| l2_error(f, |p| exact(p), None);

    let (mut base_err, mut min_uh, mut aug_err, mut lim_err, mut lim_cells, mut aug_cells) =
        (vec![], vec![], vec![], vec![], vec![], vec![]);
    let mut psis = vec![];
    for &n in &opts.ns {
        let mesh = m.mesh(n)?;
        let r0 = sweep_solve(&mesh, &m.problem, &base, None, &SweepOptions::default())?;
        base_err.push(err(&r0.field)?);
        min_uh.push(r0.field.min_at_points(&grid));
        if opts.augment == AugmentChoice::Off {
            continue;
        }
        let chosen =
            choose_space(&base, opts.augment, opts.r, CheckSet::GaussWithInflow, &mesh, &m.problem, opts.seed)?
                .expect("augmentation is on");
        let so = SweepOptions { augment: opts.augment.mode(), ..SweepOptions::default() };
        let r1 = sweep_solve(&mesh, &m.problem, &base, Some(&chosen.basis), &so)?;
        aug_err.push(err(&r1.field)?);
        aug_cells.push(r1.field.space_counts().get(1).copied().unwrap_or(0) as f64);
        if opts.limit {
            let (limited, report) = limit_field(&r1.field)?;
            lim_err.push(err(&limited)?);
            lim_cells.push(report.limited_cells as f64);
        }
        psis.push(chosen.psi);
    }

    let mut cols = vec!["n", "error", "order", "min_uh"];
    if opts.augment != AugmentChoice::Off {
        cols.extend(["aug_error", "aug_order", "augmented_cells"]);
    }
    if opts.limit {
        cols.extend(["limited_error", "limited_change", "limited_cells"]);
    }
    let name = format!("{}-{}{}", m.name, opts.family, opts.k);
    let mut table = ResultTable::new(&name, &cols).with_meta("options", opts).with_meta("psi", &psis);
    let base_order = observed_orders(&base_err);
    let aug_order = observed_orders(&aug_err);
    for (i, &n) in opts.ns.iter().enumerate() {
        let mut row = vec![n as f64, base_err[i], base_order[i], min_uh[i]];
        if opts.augment != AugmentChoice::Off {
            row.extend([aug_err[i], aug_order[i], aug_cells[i]]);
        }
        if opts.limit {
            row.extend([lim_err[i], (lim_err[i] - aug_err[i]).abs() / aug_err[i], lim_cells[i]]);
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_are_log2_ratios() {
        let o = observed_orders(&[1.0, 0.25, 0.125]);
        assert!(o[0].is_nan());
        assert_eq!(o[1], 2.0);
        assert_eq!(o[2], 1.0);
    }

    #[test]
    fn manufactured_sources_match_finite_differences() {
        for m in [manufactured_2d(), manufactured_3d()] {
            let d = m.extents.len();
            let p: Vec<f64> = m.extents.iter().map(|e| 0.3 * e.0 + 0.7 * e.1).collect();
            let h = 1e-5;
            let mut lhs = 0.0;
            for a in 0..d {
                let (mut hi, mut lo) = (p.clone(), p.clone());
                hi[a] += h;
                lo[a] -= h;
                lhs += m.problem.velocity[a].at(&p) * ((m.exact)(&hi) - (m.exact)(&lo)) / (2.0 * h);
            }
            lhs += m.problem.gamma.at(&p) * (m.exact)(&p);
            let f = match &m.problem.source {
                crate::dg::Source::Field { f, .. } => f(&p),
                _ => unreachable!(),
            };
            assert!((lhs - f).abs() < 1e-7 * f.abs().max(1.0), "{}: {lhs} vs {f}", m.name);
        }
    }

    #[test]
    fn p1_2d_converges_at_second_order() {
        let t = run_convergence(&ConvergenceOptions::new(2, Family::P, 1, &[10, 20])).unwrap();
        let o = t.column("order").unwrap()[1];
        assert!((o - 2.0).abs() < 0.3, "{o}");
    }
}
