use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::limiter::{limit_cell, lobatto_points, LimiterReport};
use crate::linalg::{Lu, Matrix};
use crate::mesh::CartesianMesh;
use crate::quadrature::Point;

use super::assembly::{bilinear_matrix, default_points, rhs_vector, Tabulation};
use super::field::{basis_means, DgField};
use super::problem::{LocalProblem, Problem, Trace};

/// Which cells use the augmented space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMode {
    /// Every cell uses the base space.
    #[default]
    Off,
    /// Every cell uses the augmented space.
    Always,
    /// Cells whose base-space average is negative are re-solved in the augmented space.
    Adaptive,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Points per axis of the assembly rule; default makes every product exact.
    pub points_per_axis: Option<usize>,
    pub augment: AugmentMode,
    /// Apply the scaling limiter to each cell before its outflow is used downstream.
    pub limit: bool,
}

/// One adaptive re-solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditEntry {
    pub cell: usize,
    pub base_average: f64,
    pub augmented_average: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub field: DgField,
    pub audit: Vec<AuditEntry>,
    pub limiter: Option<LimiterReport>,
    /// Largest `‖Ax − b‖∞ / ‖b‖∞` over all local solves.
    pub max_relative_residual: f64,
}

struct Space {
    tab: Tabulation,
    limiter_points: Vec<Point>,
}

struct Solver<'a> {
    mesh: &'a CartesianMesh,
    problem: &'a Problem,
    spaces: Vec<Space>,
    bases: Vec<Arc<BasisSet>>,
    means: Vec<Vec<f64>>,
    cache: HashMap<(usize, [u64; 3]), Arc<(Matrix, Lu)>>,
    constant: bool,
    max_residual: f64,
}

impl<'a> Solver<'a> {
    fn system(&mut self, cell: usize, space: usize, lp: &LocalProblem) -> Result<Arc<(Matrix, Lu)>> {
        let g = lp.geometry;
        let key = (space, [g.h[0].to_bits(), g.h[1].to_bits(), g.h[2].to_bits()]);
        if self.constant {
            if let Some(s) = self.cache.get(&key) {
                return Ok(s.clone());
            }
        }
        let tab = &self.spaces[space].tab;
        let m = bilinear_matrix(lp, tab, tab)?;
        let lu = Lu::factor_for_cell(&m, Some(cell))?;
        let s = Arc::new((m, lu));
        if self.constant {
            self.cache.insert(key, s.clone());
        }
        Ok(s)
    }

    fn solve_cell(&mut self, cell: usize, space: usize, field: &DgField) -> Result<Vec<f64>> {
        let dim = self.mesh.dim();
        let geometry = self.mesh.geometry(cell);
        let inflow = (0..dim)
            .map(|axis| match self.mesh.lower_neighbor(cell, axis) {
                Some(nb) => {
                    let s = field.space_index(nb);
                    Trace::Values(self.spaces[s].tab.face_trace(axis, true, field.coefficients(nb)))
                }
                None => self.problem.inflow[axis].as_ref().map_or(Trace::Zero, Trace::Boundary),
            })
            .collect();
        let lp = LocalProblem { cell: Some(cell), geometry, problem: self.problem, inflow };
        let sys = self.system(cell, space, &lp)?;
        let rhs = rhs_vector(&lp, &self.bases[space], &self.spaces[space].tab)?;
        let x = sys.1.solve(&rhs);
        let bnorm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if bnorm > 0.0 {
            let r = sys.0.mul_vec(&x).iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            self.max_residual = self.max_residual.max(r / bnorm);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem { cell: Some(cell), pivot: f64::NAN });
        }
        Ok(x)
    }

    fn mean(&self, space: usize, c: &[f64]) -> f64 {
        self.means[space].iter().zip(c).map(|(a, b)| a * b).sum()
    }
}

/// Solve the DG system cell by cell in upwind order.
///
/// `augmented` is required unless `opts.augment` is [`AugmentMode::Off`].
pub fn sweep_solve(
    mesh: &CartesianMesh,
    problem: &Problem,
    base: &BasisSet,
    augmented: Option<&BasisSet>,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    problem.validate()?;
    if problem.dim() != mesh.dim() || base.dim() != mesh.dim() {
        return Err(Error::InvalidMesh("problem, mesh and space dimensions differ".into()));
    }
    let mut bases = vec![Arc::new(base.clone())];
    match (opts.augment, augmented) {
        (AugmentMode::Off, _) => {}
        (_, Some(a)) => bases.push(Arc::new(a.clone())),
        (_, None) => return Err(Error::Config("augmentation requested without an augmented space".into())),
    }
    let n = opts
        .points_per_axis
        .unwrap_or_else(|| bases.iter().map(|b| default_points(b, b)).max().unwrap());
    let dim = mesh.dim();
    let spaces = bases
        .iter()
        .map(|b| -> Result<Space> {
            let tab = Tabulation::new(b, n)?;
            let mut limiter_points = lobatto_points(b.spec().k, dim)?;
            for axis in 0..dim {
                limiter_points.extend(tab.face(axis, true).points.iter().copied());
            }
            Ok(Space { tab, limiter_points })
        })
        .collect::<Result<Vec<_>>>()?;
    let means = bases.iter().map(|b| basis_means(b)).collect();
    let mut solver = Solver {
        mesh,
        problem,
        spaces,
        bases: bases.clone(),
        means,
        cache: HashMap::new(),
        constant: problem.has_constant_coefficients(),
        max_residual: 0.0,
    };
    let mut field = DgField::zeros(mesh.clone(), bases)?;
    let mut audit = Vec::new();
    let mut limits = Vec::new();
    // flat index runs first axis fastest, so every lower neighbour precedes its cell
    for cell in 0..mesh.n_cells() {
        let (space, mut c) = match opts.augment {
            AugmentMode::Off => (0, solver.solve_cell(cell, 0, &field)?),
            AugmentMode::Always => (1, solver.solve_cell(cell, 1, &field)?),
            AugmentMode::Adaptive => {
                let c0 = solver.solve_cell(cell, 0, &field)?;
                let m0 = solver.mean(0, &c0);
                if m0 < 0.0 {
                    let c1 = solver.solve_cell(cell, 1, &field)?;
                    audit.push(AuditEntry { cell, base_average: m0, augmented_average: solver.mean(1, &c1) });
                    (1, c1)
                } else {
                    (0, c0)
                }
            }
        };
        if opts.limit {
            let mean = solver.mean(space, &c);
            let lim = limit_cell(&c, &solver.bases[space], mean, &solver.spaces[space].limiter_points).map_err(
                |e| match e {
                    Error::NegativeAverage { mean, .. } => Error::NegativeAverage { cell: Some(cell), mean },
                    other => other,
                },
            )?;
            limits.push((lim.theta, lim.min_before, lim.min_after));
            c = lim.coeffs;
        }
        field.set_cell(cell, space, c)?;
    }
    Ok(SweepResult {
        field,
        audit,
        limiter: opts.limit.then(|| LimiterReport::from_cells(&limits)),
        max_relative_residual: solver.max_residual,
    })
}
