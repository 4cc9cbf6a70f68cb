//! Scaling limiter toward the cell average at Gauss–Lobatto points.
//!
//! A cell polynomial `u` with average `ū ≥ 0` is replaced by
//! `θ (u − ū) + ū`, with the largest `θ ∈ [0, 1]` that makes the result
//! non-negative at every point of the check set.

use serde::Serialize;

use crate::basis::BasisSet;
use crate::dg::DgField;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_lobatto, Point};

/// Points whose deviation from the mean is at most this are treated as flat.
pub const FLAT_TOL: f64 = 1e-14;
/// Averages below `-MEAN_TOL` cannot be limited.
pub const MEAN_TOL: f64 = 1e-12;

/// Tensor Gauss–Lobatto points with `max(k+1, 2)` points per axis.
pub fn lobatto_points(k: usize, dim: usize) -> Result<Vec<Point>> {
    Ok(gauss_lobatto((k + 1).max(2), dim)?.points.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellLimit {
    pub coeffs: Vec<f64>,
    pub theta: f64,
    pub min_before: f64,
    pub min_after: f64,
}

/// θ for the given point values and mean.
pub fn scaling_factor(values: &[f64], mean: f64) -> f64 {
    values
        .iter()
        .filter(|&&u| u < 0.0)
        .map(|&u| {
            let dev = u - mean;
            if dev.abs() <= FLAT_TOL {
                1.0
            } else {
                (mean / dev).abs()
            }
        })
        .fold(1.0, f64::min)
}

/// Limit one cell polynomial given its average and the check points.
pub fn limit_cell(coeffs: &[f64], basis: &BasisSet, mean: f64, points: &[Point]) -> Result<CellLimit> {
    let d = basis.dim();
    let values: Vec<f64> = points.iter().map(|p| basis.eval_combination(coeffs, &p[..d])).collect();
    let min_before = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min_before >= 0.0 {
        return Ok(CellLimit { coeffs: coeffs.to_vec(), theta: 1.0, min_before, min_after: min_before });
    }
    if mean < -MEAN_TOL {
        return Err(Error::NegativeAverage { cell: None, mean });
    }
    let theta = scaling_factor(&values, mean);
    let unit = basis.unit_coefficients();
    let limited: Vec<f64> = coeffs
        .iter()
        .zip(unit)
        .map(|(c, e)| theta * c + (1.0 - theta) * mean * e)
        .collect();
    let min_after = values.iter().map(|u| theta * (u - mean) + mean).fold(f64::INFINITY, f64::min);
    Ok(CellLimit { coeffs: limited, theta, min_before, min_after })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LimiterReport {
    pub theta: Vec<f64>,
    pub limited_cells: usize,
    pub limited_fraction: f64,
    pub min_before: f64,
    pub min_after: f64,
}

impl LimiterReport {
    pub fn from_cells(cells: &[(f64, f64, f64)]) -> Self {
        let theta: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let limited_cells = theta.iter().filter(|&&t| t < 1.0).count();
        Self {
            limited_fraction: if theta.is_empty() { 0.0 } else { limited_cells as f64 / theta.len() as f64 },
            limited_cells,
            min_before: cells.iter().map(|c| c.1).fold(f64::INFINITY, f64::min),
            min_after: cells.iter().map(|c| c.2).fold(f64::INFINITY, f64::min),
            theta,
        }
    }

    /// Rows `(cell, theta)` for CSV output.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.theta.iter().copied().enumerate()
    }
}

/// Limit every cell of a field at the Lobatto set of its space's degree.
pub fn limit_field(field: &DgField) -> Result<(DgField, LimiterReport)> {
    let dim = field.mesh().dim();
    let sets: Vec<Vec<Point>> = field
        .spaces()
        .iter()
        .map(|s| lobatto_points(s.spec().k, dim))
        .collect::<Result<_>>()?;
    let mut out = field.clone();
    let mut cells = Vec::with_capacity(field.n_cells());
    for c in 0..field.n_cells() {
        let s = field.space_index(c);
        let mean = field.cell_average(c).value;
        let lim = limit_cell(field.coefficients(c), field.basis(c), mean, &sets[s]).map_err(|e| match e {
            Error::NegativeAverage { mean, .. } => Error::NegativeAverage { cell: Some(c), mean },
            other => other,
        })?;
        cells.push((lim.theta, lim.min_before, lim.min_after));
        out.set_cell(c, s, lim.coeffs)?;
    }
    Ok((out, LimiterReport::from_cells(&cells)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, Family, SpaceSpec};

    #[test]
    fn two_point_example() {
        // values {-1, 3} with mean 1
        assert_eq!(scaling_factor(&[-1.0, 3.0], 1.0), 0.5);
        let limited: Vec<f64> = [-1.0, 3.0].iter().map(|u| 0.5 * (u - 1.0) + 1.0).collect();
        assert_eq!(limited, vec![0.0, 2.0]);
    }

    #[test]
    fn zero_mean_collapses() {
        assert_eq!(scaling_factor(&[-0.5, 0.5], 0.0), 0.0);
    }

    #[test]
    fn positive_cell_unchanged() {
        let b = build_basis(SpaceSpec::new(Family::Q, 2, 2)).unwrap();
        let mut c = vec![0.0; 9];
        c[0] = 2.0;
        c[1] = 0.5;
        let pts = lobatto_points(2, 2).unwrap();
        let out = limit_cell(&c, &b, 2.0, &pts).unwrap();
        assert_eq!(out.theta, 1.0);
        assert_eq!(out.coeffs, c);
    }

    #[test]
    fn negative_mean_is_an_error() {
        let b = build_basis(SpaceSpec::new(Family::P, 1, 2)).unwrap();
        let pts = lobatto_points(1, 2).unwrap();
        assert!(limit_cell(&[-1.0, 0.5, 0.0], &b, -1.0, &pts).is_err());
    }
}
