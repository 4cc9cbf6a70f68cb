//! Tensor-product Cartesian meshes in two or three dimensions.

use crate::error::{Error, Result};
use crate::poly::MAX_DIM;
use crate::quadrature::Point;

/// Axis-aligned box `[lo, lo + h]` with the affine map from `[-1,1]^dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    pub dim: usize,
    pub lo: [f64; MAX_DIM],
    pub h: [f64; MAX_DIM],
}

impl CellGeometry {
    pub fn new(lo: &[f64], h: &[f64]) -> Result<Self> {
        let dim = lo.len();
        if dim != h.len() || !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidMesh(format!("cell with {} origins and {} widths", lo.len(), h.len())));
        }
        if let Some(w) = h.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMesh(format!("cell width {w} is not positive")));
        }
        let mut g = Self { dim, lo: [0.0; MAX_DIM], h: [0.0; MAX_DIM] };
        g.lo[..dim].copy_from_slice(lo);
        g.h[..dim].copy_from_slice(h);
        Ok(g)
    }

    pub fn to_physical(&self, xi: &[f64]) -> Point {
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.lo[a] + 0.5 * self.h[a] * (xi[a] + 1.0);
        }
        x
    }

    pub fn to_reference(&self, x: &[f64]) -> Point {
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim {
            xi[a] = 2.0 * (x[a] - self.lo[a]) / self.h[a] - 1.0;
        }
        xi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|a| x[a] >= self.lo[a] && x[a] <= self.lo[a] + self.h[a])
    }

    /// Volume Jacobian Π h_a / 2.
    pub fn jacobian(&self) -> f64 {
        self.h[..self.dim].iter().map(|h| 0.5 * h).product()
    }

    /// Jacobian of a face normal to `axis`: product of the transverse half-widths.
    pub fn face_jacobian(&self, axis: usize) -> f64 {
        (0..self.dim).filter(|&a| a != axis).map(|a| 0.5 * self.h[a]).product()
    }

    pub fn measure(&self) -> f64 {
        self.h[..self.dim].iter().product()
    }
}

/// Cartesian mesh given by monotone node coordinates along each axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianMesh {
    nodes: Vec<Vec<f64>>,
}

impl CartesianMesh {
    pub fn from_nodes(nodes: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&nodes.len()) {
            return Err(Error::InvalidMesh(format!("dimension {}", nodes.len())));
        }
        for (a, xs) in nodes.iter().enumerate() {
            if xs.len() < 2 {
                return Err(Error::InvalidMesh(format!("axis {a} needs at least one cell")));
            }
            if xs.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidMesh(format!("axis {a} nodes are not strictly increasing")));
            }
        }
        Ok(Self { nodes })
    }

    /// Uniform mesh over the box `extents` with `counts` cells per axis.
    pub fn uniform(extents: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if extents.len() != counts.len() {
            return Err(Error::InvalidMesh("extents and counts differ in length".into()));
        }
        let nodes = extents
            .iter()
            .zip(counts)
            .map(|(&(a, b), &n)| {
                if n == 0 || !(b > a) {
                    return Err(Error::InvalidMesh(format!("axis [{a}, {b}] with {n} cells")));
                }
                Ok((0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::from_nodes(nodes)
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.nodes.iter().map(|x| x.len() - 1).collect()
    }

    pub fn nodes(&self, axis: usize) -> &[f64] {
        &self.nodes[axis]
    }

    pub fn n_cells(&self) -> usize {
        self.counts().iter().product()
    }

    /// Flat index with the first axis varying fastest.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let counts = self.counts();
        let mut idx = 0;
        for a in (0..self.dim()).rev() {
            idx = idx * counts[a] + multi[a];
        }
        idx
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let counts = self.counts();
        let mut m = [0; MAX_DIM];
        for a in 0..self.dim() {
            m[a] = flat % counts[a];
            flat /= counts[a];
        }
        m
    }

    /// The upwind neighbour across the lower face of `axis`, if inside the mesh.
    pub fn lower_neighbor(&self, cell: usize, axis: usize) -> Option<usize> {
        let mut m = self.multi_index(cell);
        if m[axis] == 0 {
            return None;
        }
        m[axis] -= 1;
        Some(self.flat_index(&m[..self.dim()]))
    }

    pub fn geometry(&self, cell: usize) -> CellGeometry {
        let m = self.multi_index(cell);
        let dim = self.dim();
        let mut lo = [0.0; MAX_DIM];
        let mut h = [0.0; MAX_DIM];
        for a in 0..dim {
            lo[a] = self.nodes[a][m[a]];
            h[a] = self.nodes[a][m[a] + 1] - lo[a];
        }
        CellGeometry { dim, lo, h }
    }

    /// Cell containing a physical point (points on shared faces go to the upper cell).
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut m = [0; MAX_DIM];
        for (a, xs) in self.nodes.iter().enumerate() {
            if x[a] < xs[0] || x[a] > *xs.last().unwrap() {
                return None;
            }
            let i = xs.partition_point(|&v| v <= x[a]);
            m[a] = i.saturating_sub(1).min(xs.len() - 2);
        }
        Some(self.flat_index(&m[..self.dim()]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let m = CartesianMesh::uniform(&[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)], &[2, 3, 4]).unwrap();
        assert_eq!(m.n_cells(), 24);
        for c in 0..24 {
            let mi = m.multi_index(c);
            assert_eq!(m.flat_index(&mi[..3]), c);
        }
        assert_eq!(m.lower_neighbor(0, 0), None);
        assert_eq!(m.lower_neighbor(1, 0), Some(0));
        assert_eq!(m.lower_neighbor(2, 1), Some(0));
    }

    #[test]
    fn geometry_maps() {
        let m = CartesianMesh::uniform(&[(0.0, 1.0), (-1.0, 1.0)], &[4, 2]).unwrap();
        let g = m.geometry(m.flat_index(&[1, 1]));
        assert_eq!(g.to_physical(&[-1.0, -1.0]), [0.25, 0.0, 0.0]);
        assert!((g.jacobian() - 0.0625).abs() < 1e-15);
        assert!((g.face_jacobian(0) - 0.5).abs() < 1e-15);
        assert_eq!(m.locate(&[0.3, 0.5]), Some(5));
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(CartesianMesh::uniform(&[(0.0, 1.0)], &[2]).is_err());
        assert!(CartesianMesh::uniform(&[(0.0, 1.0), (1.0, 0.0)], &[2, 2]).is_err());
        assert!(CellGeometry::new(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
