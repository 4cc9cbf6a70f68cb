//! Local assembly of the upwind DG bilinear form and right-hand side.
//!
//! For a cell `S` with speeds `c_a` along each axis,
//!
//! ```text
//! L(u, v) = -∫_S u Σ_a c_a ∂_a v + Σ_a ∫_{face a+} c_a u v + ∫_S γ u v
//! R(v)    =  ∫_S f v + Σ_a ∫_{face a-} c_a u_in v
//! ```
//!
//! Integrals are mapped to `[-1,1]^d`; matrix rows are test functions and
//! columns trial functions, so `matrix[a][b] = L(Φ_b, Φ_a)`.

use std::sync::Arc;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::MAX_DIM;
use crate::quadrature::{face_rule, gauss_legendre, Point, QuadratureRule};

use super::problem::{LocalProblem, Source, Trace};

/// Basis values on one face rule.
#[derive(Clone, Debug)]
pub struct FaceTable {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// `values[q * n + i]`
    pub values: Vec<f64>,
}

/// Basis values and gradients tabulated at the volume and face points of a
/// tensor Gauss rule.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_funcs: usize,
    pub rule: Arc<QuadratureRule>,
    /// `values[q * n + i]`
    pub values: Vec<f64>,
    pub grads: Vec<[f64; MAX_DIM]>,
    /// Indexed by `2 * axis + side`, side 0 the lower face and 1 the upper one.
    pub faces: Vec<FaceTable>,
}

impl Tabulation {
    pub fn new(basis: &BasisSet, points_per_axis: usize) -> Result<Self> {
        let dim = basis.dim();
        let rule = gauss_legendre(points_per_axis, dim)?;
        let n = basis.len();
        let mut values = Vec::with_capacity(rule.len() * n);
        let mut grads = Vec::with_capacity(rule.len() * n);
        for p in &rule.points {
            values.extend(basis.eval(p));
            grads.extend(basis.grad(p));
        }
        let mut faces = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            for side in [-1.0, 1.0] {
                let (points, weights) = face_rule(points_per_axis, dim, axis, side)?;
                let values = points.iter().flat_map(|p| basis.eval(p)).collect();
                faces.push(FaceTable { points, weights, values });
            }
        }
        Ok(Self { n_funcs: n, rule, values, grads, faces })
    }

    pub fn points_per_axis(&self) -> usize {
        self.rule.points_per_axis
    }

    pub fn face(&self, axis: usize, upper: bool) -> &FaceTable {
        &self.faces[2 * axis + usize::from(upper)]
    }

    /// Values of `Σ c_i Φ_i` at the points of a face.
    pub fn face_trace(&self, axis: usize, upper: bool, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n_funcs;
        self.face(axis, upper)
            .values
            .chunks(n)
            .map(|row| row.iter().zip(coeffs).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn check_speed(c: f64, axis: usize, x: &[f64]) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidCoefficient(format!("speed {c} along axis {axis} at {x:?}")))
    }
}

/// The matrix of `L(Φ_b, Ψ_a)` for trial basis Φ and test basis Ψ, both tabulated on the same rule.
pub fn bilinear_matrix(lp: &LocalProblem, trial: &Tabulation, test: &Tabulation) -> Result<Matrix> {
    if trial.points_per_axis() != test.points_per_axis() {
        return Err(Error::InvalidQuadrature("trial and test tabulations use different rules".into()));
    }
    let dim = lp.dim();
    let g = &lp.geometry;
    let pr = lp.problem;
    let (nt, nv) = (trial.n_funcs, test.n_funcs);
    let mut m = Matrix::zeros(nv, nt);
    let jac = g.jacobian();
    let mut speed = [0.0; MAX_DIM];
    let mut dv = vec![0.0; nv];
    for (q, (p, w)) in trial.rule.points.iter().zip(&trial.rule.weights).enumerate() {
        let x = g.to_physical(p);
        for a in 0..dim {
            speed[a] = pr.velocity[a].at(&x);
            if pr.check_signs {
                check_speed(speed[a], a, &x[..dim])?;
            }
        }
        let gamma = pr.gamma.at(&x);
        if pr.check_signs && !(gamma >= 0.0) {
            return Err(Error::InvalidCoefficient(format!("reaction {gamma} at {:?}", &x[..dim])));
        }
        let wj = w * jac;
        let tv = &test.values[q * nv..(q + 1) * nv];
        let tg = &test.grads[q * nv..(q + 1) * nv];
        for (i, d) in dv.iter_mut().enumerate() {
            *d = (0..dim).map(|a| speed[a] * 2.0 / g.h[a] * tg[i][a]).sum();
        }
        let uv = &trial.values[q * nt..(q + 1) * nt];
        for i in 0..nv {
            let row_conv = -wj * dv[i];
            let row_react = wj * gamma * tv[i];
            for (j, &u) in uv.iter().enumerate() {
                m[(i, j)] += u * (row_conv + row_react);
            }
        }
    }
    for axis in 0..dim {
        let fu = trial.face(axis, true);
        let fv = test.face(axis, true);
        let fj = g.face_jacobian(axis);
        for (q, (p, w)) in fu.points.iter().zip(&fu.weights).enumerate() {
            let x = g.to_physical(p);
            let c = pr.velocity[axis].at(&x);
            let s = w * fj * c;
            let uv = &fu.values[q * nt..(q + 1) * nt];
            let tv = &fv.values[q * nv..(q + 1) * nv];
            for i in 0..nv {
                for j in 0..nt {
                    m[(i, j)] += s * tv[i] * uv[j];
                }
            }
        }
    }
    Ok(m)
}

/// Inflow values of one lower face at the tabulated face points.
fn trace_values(lp: &LocalProblem, test: &Tabulation, axis: usize) -> Vec<f64> {
    let face = test.face(axis, false);
    let g = &lp.geometry;
    match &lp.inflow[axis] {
        Trace::Zero => vec![0.0; face.points.len()],
        Trace::Values(v) => v.clone(),
        Trace::Boundary(b) => face.points.iter().map(|p| (b.0)(&g.to_physical(p)[..g.dim])).collect(),
        Trace::Polynomial { basis, coeffs } => face
            .points
            .iter()
            .map(|p| {
                let mut q = *p;
                q[axis] = 1.0;
                basis.eval_combination(coeffs, &q[..g.dim])
            })
            .collect(),
    }
}

/// Right-hand side `R(Ψ_a)`; `basis` must be the basis tabulated in `test`.
pub fn rhs_vector(lp: &LocalProblem, basis: &BasisSet, test: &Tabulation) -> Result<Vec<f64>> {
    let dim = lp.dim();
    let g = &lp.geometry;
    let pr = lp.problem;
    let n = test.n_funcs;
    let mut rhs = vec![0.0; n];
    let jac = g.jacobian();
    let check_f = |f: f64, p: &[f64]| -> Result<()> {
        if !f.is_finite() {
            return Err(Error::NonFiniteEvaluation { point: p.to_vec() });
        }
        if pr.check_signs && f < 0.0 {
            return Err(Error::InvalidCoefficient(format!("source {f} is negative at {p:?}")));
        }
        Ok(())
    };
    match &pr.source {
        Source::Zero => {}
        Source::Field { f, points } if points.map_or(true, |np| np == test.points_per_axis()) => {
            for (q, (p, w)) in test.rule.points.iter().zip(&test.rule.weights).enumerate() {
                let x = g.to_physical(p);
                let fx = f(&x[..dim]);
                check_f(fx, &x[..dim])?;
                let s = w * jac * fx;
                for (r, v) in rhs.iter_mut().zip(&test.values[q * n..(q + 1) * n]) {
                    *r += s * v;
                }
            }
        }
        Source::Field { f, points } => {
            let rule = gauss_legendre(points.unwrap(), dim)?;
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = g.to_physical(p);
                let fx = f(&x[..dim]);
                check_f(fx, &x[..dim])?;
                let s = w * jac * fx;
                for (r, phi) in rhs.iter_mut().zip(basis.functions()) {
                    *r += s * phi.eval(p);
                }
            }
        }
        Source::Cellwise(samples) => {
            for (p, w, fx) in samples(g) {
                check_f(fx, &g.to_physical(&p)[..dim])?;
                let s = w * jac * fx;
                for (r, phi) in rhs.iter_mut().zip(basis.functions()) {
                    *r += s * phi.eval(&p);
                }
            }
        }
    }
    for axis in 0..dim {
        let face = test.face(axis, false);
        let uin = trace_values(lp, test, axis);
        let fj = g.face_jacobian(axis);
        for (q, (p, w)) in face.points.iter().zip(&face.weights).enumerate() {
            if uin[q] == 0.0 {
                continue;
            }
            let x = g.to_physical(p);
            if !uin[q].is_finite() {
                return Err(Error::NonFiniteEvaluation { point: x[..dim].to_vec() });
            }
            let s = w * fj * pr.velocity[axis].at(&x) * uin[q];
            for (r, v) in rhs.iter_mut().zip(&face.values[q * n..(q + 1) * n]) {
                *r += s * v;
            }
        }
    }
    Ok(rhs)
}

fn check_rule(lp: &LocalProblem, trial: &BasisSet, test: &BasisSet, rule: &QuadratureRule) -> Result<()> {
    if trial.dim() != lp.dim() || test.dim() != lp.dim() || rule.dim != lp.dim() {
        return Err(Error::InvalidQuadrature("dimension mismatch between problem, bases and rule".into()));
    }
    if lp.inflow.len() != lp.dim() {
        return Err(Error::InvalidCoefficient("one inflow trace per axis is required".into()));
    }
    Ok(())
}

/// Assemble `(matrix, rhs)` on one cell with the tensor Gauss rule `rule`.
pub fn assemble_local(
    lp: &LocalProblem,
    trial: &BasisSet,
    test: &BasisSet,
    rule: &QuadratureRule,
) -> Result<(Matrix, Vec<f64>)> {
    check_rule(lp, trial, test, rule)?;
    let n = rule.points_per_axis;
    let tt = Tabulation::new(trial, n)?;
    let tv = if std::ptr::eq(trial, test) { tt.clone() } else { Tabulation::new(test, n)? };
    Ok((bilinear_matrix(lp, &tt, &tv)?, rhs_vector(lp, test, &tv)?))
}

pub fn assemble_local_2d(
    lp: &LocalProblem,
    trial: &BasisSet,
    test: &BasisSet,
    rule: &QuadratureRule,
) -> Result<(Matrix, Vec<f64>)> {
    if lp.dim() != 2 {
        return Err(Error::InvalidMesh(format!("expected a 2D cell, got {}D", lp.dim())));
    }
    assemble_local(lp, trial, test, rule)
}

pub fn assemble_local_3d(
    lp: &LocalProblem,
    trial: &BasisSet,
    test: &BasisSet,
    rule: &QuadratureRule,
) -> Result<(Matrix, Vec<f64>)> {
    if lp.dim() != 3 {
        return Err(Error::InvalidMesh(format!("expected a 3D cell, got {}D", lp.dim())));
    }
    assemble_local(lp, trial, test, rule)
}

/// Points per axis making every product of two basis functions exact.
pub fn default_points(trial: &BasisSet, test: &BasisSet) -> usize {
    crate::quadrature::required_points_for(trial.max_axis_degree().max(test.max_axis_degree()))
}
