//! Numerical search for ψ: minimise ‖d‖² subject to `v_d ≥ 0` at the check
//! points of every sampled cell.
//!
//! `v_d` is invariant under scaling ψ and under adding X_k components to it,
//! so the unknowns are only the coefficients of monomials in X_r \ X_k and the
//! extra constraint ‖d‖² ≥ 1 keeps ψ away from zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{build_basis, SpaceSpec};
use crate::dg::{default_points, Problem};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::mesh::CellGeometry;
use crate::nlp::{minimize, squared_norm, NlpProblem, SolveStatus, SolverOptions};
use crate::poly::Poly;

use super::{
    local_system, special_test_function, AugmentedBasis, CheckSet, PositivityCertificate, Provenance, Regime,
    TestFunctionOptions,
};

/// One cell the augmented space must be valid on.
#[derive(Clone, Debug)]
pub struct CellSample {
    pub problem: Problem,
    pub geometry: CellGeometry,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub solver: SolverOptions,
    pub check: CheckSet,
    /// Gauss points per axis; defaults to exactness for X_r.
    pub points_per_axis: Option<usize>,
    pub seed: u64,
    /// Number of starting points tried before giving up.
    pub restarts: usize,
    /// Required lower bound on `v / max|v_0|`, `v_0` the unaugmented test function.
    pub margin: f64,
    /// Starting ψ; its components outside X_r \ X_k are ignored.
    pub initial: Option<Poly>,
    pub regime: Option<Regime>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions { stop_when_feasible: true, ..SolverOptions::default() },
            check: CheckSet::Gauss,
            points_per_axis: None,
            seed: 0,
            restarts: 8,
            margin: 1e-6,
            initial: None,
            regime: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub basis: AugmentedBasis,
    /// One certificate per sampled cell, computed from the final ψ.
    pub certificates: Vec<PositivityCertificate>,
    pub status: SolveStatus,
    pub starts_used: usize,
}

impl SearchOutcome {
    pub fn min_value(&self) -> f64 {
        self.certificates.iter().map(|c| c.min_value).fold(f64::INFINITY, f64::min)
    }
}

/// Per-cell data over the basis X_k ∪ E (E the extra monomials of X_r).
struct CellBlocks {
    full: Matrix,
    mass: Vec<f64>,
    /// Rows of basis values at the check points.
    values: Vec<Vec<f64>>,
    scale: f64,
}

struct AugProblem {
    nk: usize,
    ne: usize,
    cells: Vec<CellBlocks>,
    margin: f64,
}

impl AugProblem {
    /// Values of `v_d` at the check points of one cell, or `None` if singular.
    fn values(&self, cell: &CellBlocks, d: &[f64]) -> Option<Vec<f64>> {
        let (nk, ne) = (self.nk, self.ne);
        let f = &cell.full;
        let n = nk + 1;
        // transpose of the augmented matrix: t[b][a] = L(Φ_b, Φ_a)
        let mut t = Matrix::zeros(n, n);
        for a in 0..nk {
            for b in 0..nk {
                t[(b, a)] = f[(a, b)];
            }
            let (mut col, mut row) = (0.0, 0.0);
            for j in 0..ne {
                col += d[j] * f[(a, nk + j)];
                row += d[j] * f[(nk + j, a)];
            }
            t[(nk, a)] = col;
            t[(a, nk)] = row;
        }
        let mut pp = 0.0;
        for i in 0..ne {
            for j in 0..ne {
                pp += d[i] * d[j] * f[(nk + i, nk + j)];
            }
        }
        t[(nk, nk)] = pp;
        let mut rhs = cell.mass[..nk].to_vec();
        rhs.push((0..ne).map(|j| d[j] * cell.mass[nk + j]).sum());
        let c = Lu::factor(&t).ok()?.solve(&rhs);
        Some(
            cell.values
                .iter()
                .map(|row| {
                    let base: f64 = (0..nk).map(|a| c[a] * row[a]).sum();
                    let psi: f64 = (0..ne).map(|j| d[j] * row[nk + j]).sum();
                    base + c[nk] * psi
                })
                .collect(),
        )
    }
}

impl NlpProblem for AugProblem {
    fn n_vars(&self) -> usize {
        self.ne
    }

    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>) {
        squared_norm(x)
    }

    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![x.iter().map(|v| v * v).sum::<f64>() - 1.0];
        for cell in &self.cells {
            match self.values(cell, x) {
                Some(v) => g.extend(v.iter().map(|val| val / cell.scale - self.margin)),
                None => g.extend(std::iter::repeat(-1.0).take(cell.values.len())),
            }
        }
        g
    }
}

/// Search for ψ ∈ X_r with `v ≥ 0` at the check points of every cell in `cells`.
pub fn find_augmented_basis(
    base: SpaceSpec,
    r: usize,
    cells: &[CellSample],
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    base.validate()?;
    if r <= base.k {
        return Err(Error::Config(format!("ansatz degree r = {r} must exceed k = {}", base.k)));
    }
    if cells.is_empty() {
        return Err(Error::Config("at least one cell is required".into()));
    }
    let spec_r = SpaceSpec::new(base.family, r, base.dim);
    let extra: Vec<_> = spec_r.monomials().into_iter().filter(|e| !base.contains_monomial(e)).collect();
    let base_basis = build_basis(base)?;
    let full_basis = base_basis.extended(extra.iter().map(|e| Poly::monomial(base.dim, *e, 1.0)));
    let n_pts = opts.points_per_axis.unwrap_or_else(|| default_points(&full_basis, &full_basis));

    let (nk, ne) = (base_basis.len(), extra.len());
    let mut blocks = Vec::with_capacity(cells.len());
    for cell in cells {
        let (tab, full, mass) = local_system(&full_basis, &cell.problem, &cell.geometry, n_pts)?;
        let points = opts.check.points(&tab, base.dim)?;
        let values = points.iter().map(|p| full_basis.eval(&p[..base.dim])).collect();
        let topt = TestFunctionOptions { points_per_axis: Some(n_pts), check: opts.check };
        let v0 = special_test_function(&base_basis, &cell.problem, &cell.geometry, &topt)?;
        let scale = v0
            .check_points
            .iter()
            .map(|p| base_basis.eval_combination(&v0.v, &p[..base.dim]).abs())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        blocks.push(CellBlocks { full, mass, values, scale });
    }
    let problem = AugProblem { nk, ne, cells: blocks, margin: opts.margin };

    let initial: Option<Vec<f64>> = opts.initial.as_ref().map(|p| extra.iter().map(|e| p.coefficient(e)).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_min = f64::NEG_INFINITY;
    for start in 0..opts.restarts.max(1) {
        let x0 = match (&initial, start) {
            (Some(x), 0) if x.iter().any(|v| *v != 0.0) => x.clone(),
            _ => (0..ne).map(|_| rng.gen_range(-1e-2..1e-2)).collect(),
        };
        let res = minimize(&problem, &x0, &opts.solver)?;
        let mut d = vec![0.0; spec_r.dimension()];
        let monos = spec_r.monomials();
        for (e, x) in extra.iter().zip(&res.x) {
            let i = monos.iter().position(|m| m == e).expect("extra monomial is in X_r");
            d[i] = *x;
        }
        let aug = AugmentedBasis {
            family: base.family,
            k: base.k,
            r,
            dim: base.dim,
            regime: opts.regime,
            d,
            provenance: Provenance::Optimized,
        };
        if aug.validate().is_err() {
            continue;
        }
        let basis = aug.augment(&base_basis)?;
        let topt = TestFunctionOptions { points_per_axis: Some(n_pts), check: opts.check };
        let certificates = cells
            .iter()
            .map(|c| special_test_function(&basis, &c.problem, &c.geometry, &topt))
            .collect::<Result<Vec<_>>>()?;
        let min = certificates.iter().map(|c| c.min_value).fold(f64::INFINITY, f64::min);
        if certificates.iter().all(PositivityCertificate::is_valid) {
            let status = if res.status.is_feasible() { res.status } else { SolveStatus::Feasible };
            return Ok(SearchOutcome { basis: aug, certificates, status, starts_used: start + 1 });
        }
        best_min = best_min.max(min);
    }
    Err(Error::AugmentationInfeasible { best_min_v: best_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmentation::{psi_p2_unit_cfl, ScaledParams};
    use crate::basis::Family;

    #[test]
    fn p2_search_certifies_unit_cfl_cell() {
        let cell = ScaledParams::new(1.0, 0.0, 0.1).unwrap().cell();
        let out = find_augmented_basis(
            SpaceSpec::new(Family::P, 2, 2),
            4,
            &[cell.clone()],
            &SearchOptions { initial: Some(psi_p2_unit_cfl()), ..SearchOptions::default() },
        )
        .unwrap();
        assert!(out.certificates[0].is_valid());
        // round trip on the same check points
        let basis = out.basis.build().unwrap();
        let n = out.certificates[0].check_points.len();
        let c = special_test_function(&basis, &cell.problem, &cell.geometry, &TestFunctionOptions::default()).unwrap();
        assert_eq!(c.check_points.len(), n);
        assert!(c.is_valid());
    }

    #[test]
    fn rejects_bad_degree() {
        let cell = ScaledParams::new(1.0, 0.0, 0.1).unwrap().cell();
        assert!(find_augmented_basis(SpaceSpec::new(Family::P, 2, 2), 2, &[cell], &SearchOptions::default()).is_err());
    }
}
