use std::sync::Arc;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::mesh::CartesianMesh;
use crate::quadrature::{gauss_legendre, Point};

/// Reference-cell means of each basis function.
pub fn basis_means(basis: &BasisSet) -> Vec<f64> {
    let measure = 2f64.powi(basis.dim() as i32);
    basis.functions().iter().map(|f| f.integrate_reference() / measure).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellAverage {
    pub cell: usize,
    pub value: f64,
}

/// A piecewise polynomial on a Cartesian mesh; cells may use different spaces.
#[derive(Clone, Debug)]
pub struct DgField {
    mesh: CartesianMesh,
    spaces: Vec<Arc<BasisSet>>,
    means: Vec<Vec<f64>>,
    space_of: Vec<usize>,
    coeffs: Vec<Vec<f64>>,
}

impl DgField {
    /// A zero field with every cell in `spaces[0]`.
    pub fn zeros(mesh: CartesianMesh, spaces: Vec<Arc<BasisSet>>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::UnsupportedSpace("a field needs at least one space".into()));
        }
        if spaces.iter().any(|s| s.dim() != mesh.dim()) {
            return Err(Error::UnsupportedSpace("space dimension differs from mesh dimension".into()));
        }
        let n = mesh.n_cells();
        let means = spaces.iter().map(|s| basis_means(s)).collect();
        let coeffs = vec![vec![0.0; spaces[0].len()]; n];
        Ok(Self { mesh, spaces, means, space_of: vec![0; n], coeffs })
    }

    pub fn mesh(&self) -> &CartesianMesh {
        &self.mesh
    }

    pub fn n_cells(&self) -> usize {
        self.coeffs.len()
    }

    pub fn spaces(&self) -> &[Arc<BasisSet>] {
        &self.spaces
    }

    pub fn space_index(&self, cell: usize) -> usize {
        self.space_of[cell]
    }

    pub fn basis(&self, cell: usize) -> &BasisSet {
        &self.spaces[self.space_of[cell]]
    }

    pub fn coefficients(&self, cell: usize) -> &[f64] {
        &self.coeffs[cell]
    }

    pub fn set_cell(&mut self, cell: usize, space: usize, coeffs: Vec<f64>) -> Result<()> {
        let expected = self.spaces.get(space).map(|s| s.len());
        if expected != Some(coeffs.len()) {
            return Err(Error::UnsupportedSpace(format!(
                "cell {cell}: {} coefficients for a space of size {expected:?}",
                coeffs.len()
            )));
        }
        self.space_of[cell] = space;
        self.coeffs[cell] = coeffs;
        Ok(())
    }

    /// Number of cells using each space.
    pub fn space_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.spaces.len()];
        for &s in &self.space_of {
            c[s] += 1;
        }
        c
    }

    pub fn eval_reference(&self, cell: usize, xi: &[f64]) -> f64 {
        self.basis(cell).eval_combination(&self.coeffs[cell], xi)
    }

    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        let cell = self.mesh.locate(x)?;
        let xi = self.mesh.geometry(cell).to_reference(x);
        Some(self.eval_reference(cell, &xi[..self.mesh.dim()]))
    }

    pub fn cell_average(&self, cell: usize) -> CellAverage {
        let m = &self.means[self.space_of[cell]];
        CellAverage { cell, value: m.iter().zip(&self.coeffs[cell]).map(|(a, b)| a * b).sum() }
    }

    pub fn averages(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|c| self.cell_average(c).value).collect()
    }

    /// Minimum of the field over the given reference points of every cell.
    pub fn min_at_points(&self, points: &[Point]) -> f64 {
        let d = self.mesh.dim();
        (0..self.n_cells())
            .flat_map(|c| points.iter().map(move |p| (c, p)))
            .map(|(c, p)| self.eval_reference(c, &p[..d]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Average of `field` on a single cell.
pub fn cell_average(field: &DgField, cell: usize) -> CellAverage {
    field.cell_average(cell)
}

/// `sqrt(Σ_cells ∫ (u_h − u)²)` with a tensor Gauss rule of `points_per_axis`
/// points (default: two more than the largest per-axis degree of any space).
pub fn l2_error(field: &DgField, exact: impl Fn(&[f64]) -> f64, points_per_axis: Option<usize>) -> Result<f64> {
    let d = field.mesh.dim();
    let n = points_per_axis
        .unwrap_or_else(|| field.spaces.iter().map(|s| s.max_axis_degree() as usize).max().unwrap_or(0) + 2);
    let rule = gauss_legendre(n, d)?;
    let tables: Vec<Vec<Vec<f64>>> = field
        .spaces
        .iter()
        .map(|s| rule.points.iter().map(|p| s.eval(&p[..d])).collect())
        .collect();
    let mut total = 0.0;
    for cell in 0..field.n_cells() {
        let g = field.mesh.geometry(cell);
        let tab = &tables[field.space_of[cell]];
        let c = &field.coeffs[cell];
        let mut acc = 0.0;
        for ((p, w), vals) in rule.points.iter().zip(&rule.weights).zip(tab) {
            let uh: f64 = vals.iter().zip(c).map(|(a, b)| a * b).sum();
            let x = g.to_physical(p);
            let e = uh - exact(&x[..d]);
            acc += w * e * e;
        }
        total += acc * g.jacobian();
    }
    Ok(total.sqrt())
}
