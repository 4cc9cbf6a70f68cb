//! Small dense matrices and LU factorisation with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as zero, after rows and columns have
/// been scaled to unit maximum.
pub const PIVOT_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors of an equilibrated square matrix, `P R A C = L U` with
/// diagonal row and column scalings `R` and `C`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        Self::factor_for_cell(a, None)
    }

    /// Factor, tagging a singular-pivot error with the owning cell.
    pub fn factor_for_cell(a: &Matrix, cell: Option<usize>) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let inv_max = |m: f64| if m > 0.0 && m.is_finite() { 1.0 / m } else { 1.0 };
        let row_scale: Vec<f64> =
            (0..n).map(|i| inv_max(lu.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs())))).collect();
        for i in 0..n {
            for j in 0..n {
                lu[(i, j)] *= row_scale[i];
            }
        }
        let col_scale: Vec<f64> =
            (0..n).map(|j| inv_max((0..n).fold(0.0f64, |m, i| m.max(lu[(i, j)].abs())))).collect();
        for i in 0..n {
            for j in 0..n {
                lu[(i, j)] *= col_scale[j];
            }
        }
        let tol = PIVOT_TOL * lu.max_abs();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > tol) {
                return Err(Error::SingularSystem { cell, pivot: pmax });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu.data[i * n + j] -= f * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, row_scale, col_scale })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p] * self.row_scale[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x.iter().zip(&self.col_scale).map(|(y, c)| y * c).collect()
    }
}

/// Solution of a dense system together with its residual ‖Ax − b‖∞.
#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub x: Vec<f64>,
    pub residual: f64,
}

/// Dense direct solve with partial pivoting; reports the residual.
pub fn solve_local(a: &Matrix, b: &[f64]) -> Result<LocalSolution> {
    solve_local_for_cell(a, b, None)
}

pub fn solve_local_for_cell(a: &Matrix, b: &[f64], cell: Option<usize>) -> Result<LocalSolution> {
    let lu = Lu::factor_for_cell(a, cell)?;
    let x = lu.solve(b);
    let residual = a
        .mul_vec(&x)
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (ax, bi)| m.max((ax - bi).abs()));
    Ok(LocalSolution { x, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let s = solve_local(&Matrix::identity(4), &[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(s.x, vec![1.0, -2.0, 3.0, 0.5]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]]);
        match solve_local_for_cell(&a, &[1.0, 2.0, 3.0], Some(7)) {
            Err(Error::SingularSystem { cell: Some(7), .. }) => {}
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn badly_scaled_row_and_column_are_not_singular() {
        let s = 1e-9;
        let a = Matrix::from_rows(&[vec![2.0, 1.0, s], vec![1.0, 3.0, s], vec![s, 2.0 * s, 4.0 * s * s]]);
        let x = [1.0, -1.0, 1.0 / s];
        let b = a.mul_vec(&x);
        let sol = solve_local(&a, &b).unwrap();
        for (u, v) in sol.x.iter().zip(&x) {
            assert!((u - v).abs() <= 1e-12 * v.abs().max(1.0), "{u} vs {v}");
        }
    }

    #[test]
    fn pivoting_needed() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = solve_local(&a, &[2.0, 3.0]).unwrap();
        assert_eq!(s.x, vec![3.0, 2.0]);
    }
}
