//! Smooth inequality-constrained minimisation.
//!
//! `minimize f(x) subject to g(x) ≥ 0` by an augmented Lagrangian (PHR) outer
//! loop; each subproblem is solved with BFGS and a backtracking Armijo search.
//! Constraint Jacobians come from the problem when available, otherwise from
//! forward differences.

use serde::Serialize;

use crate::error::{Error, Result};

pub trait NlpProblem {
    fn n_vars(&self) -> usize;

    /// Objective value and gradient.
    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>);

    /// Constraint values `g(x)`; feasibility means every entry is `≥ 0`.
    fn constraints(&self, x: &[f64]) -> Vec<f64>;

    /// Analytic Jacobian, one row per constraint, if the problem provides one.
    fn jacobian(&self, _x: &[f64]) -> Option<Vec<Vec<f64>>> {
        None
    }
}

/// An [`NlpProblem`] assembled from closures.
pub struct FnProblem<F, G> {
    pub n_vars: usize,
    pub objective: F,
    pub constraints: G,
}

impl<F, G> NlpProblem for FnProblem<F, G>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn n_vars(&self) -> usize {
        self.n_vars
    }
    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.objective)(x)
    }
    fn constraints(&self, x: &[f64]) -> Vec<f64> {
        (self.constraints)(x)
    }
}

/// `‖x‖²` with its gradient.
pub fn squared_norm(x: &[f64]) -> (f64, Vec<f64>) {
    (x.iter().map(|v| v * v).sum(), x.iter().map(|v| 2.0 * v).collect())
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iter: usize,
    pub max_inner_iter: usize,
    pub initial_penalty: f64,
    pub max_penalty: f64,
    pub fd_step: f64,
    /// Return as soon as an iterate satisfies every constraint.
    pub stop_when_feasible: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-10,
            opt_tol: 1e-8,
            max_iter: 500,
            max_inner_iter: 200,
            initial_penalty: 10.0,
            max_penalty: 1e12,
            fd_step: 1e-7,
            stop_when_feasible: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.feas_tol, self.opt_tol, self.initial_penalty, self.max_penalty, self.fd_step];
        if pos.iter().any(|v| !(*v > 0.0)) || self.max_iter == 0 || self.max_inner_iter == 0 {
            return Err(Error::Config("solver tolerances and limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    FeasibleOptimal,
    Feasible,
    InfeasibleMaxIter,
}

impl SolveStatus {
    pub fn is_feasible(self) -> bool {
        self != SolveStatus::InfeasibleMaxIter
    }
}

#[derive(Clone, Debug)]
pub struct NlpResult {
    pub x: Vec<f64>,
    pub status: SolveStatus,
    pub objective: f64,
    /// `min_j g_j(x)`, recomputed at the returned point.
    pub min_constraint: f64,
    pub outer_iterations: usize,
}

fn check_finite(values: &[f64], x: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteEvaluation { point: x.to_vec() })
    }
}

/// Forward-difference Jacobian of the constraints, one row per constraint.
pub fn fd_jacobian(problem: &dyn NlpProblem, x: &[f64], g0: &[f64], step: f64) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; g0.len()];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let gp = problem.constraints(&xp);
        check_finite(&gp, &xp)?;
        for (row, (a, b)) in jac.iter_mut().zip(gp.iter().zip(g0)) {
            row[j] = (a - b) / h;
        }
        xp[j] = x[j];
    }
    Ok(jac)
}

struct Merit<'a> {
    problem: &'a dyn NlpProblem,
    lambda: &'a [f64],
    rho: f64,
    fd_step: f64,
}

impl Merit<'_> {
    /// PHR augmented Lagrangian and its gradient.
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (f, mut grad) = self.problem.objective(x);
        check_finite(&[f], x)?;
        check_finite(&grad, x)?;
        let g = self.problem.constraints(x);
        check_finite(&g, x)?;
        let mut val = f;
        let mut active = Vec::with_capacity(g.len());
        for (i, (&gi, &li)) in g.iter().zip(self.lambda).enumerate() {
            let s = (li - self.rho * gi).max(0.0);
            val += (s * s - li * li) / (2.0 * self.rho);
            if s > 0.0 {
                active.push((i, s));
            }
        }
        if !active.is_empty() {
            let jac = match self.problem.jacobian(x) {
                Some(j) => j,
                None => fd_jacobian(self.problem, x, &g, self.fd_step)?,
            };
            for (i, s) in active {
                for (gr, dj) in grad.iter_mut().zip(&jac[i]) {
                    *gr -= s * dj;
                }
            }
        }
        Ok((val, grad))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// BFGS with Armijo backtracking; returns the final point and gradient norm.
fn bfgs(merit: &Merit, x0: Vec<f64>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64)> {
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut gx) = merit.eval(&x)?;
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..max_iter {
        if inf_norm(&gx) <= tol {
            break;
        }
        let mut p: Vec<f64> = h.iter().map(|row| -dot(row, &gx)).collect();
        let mut slope = dot(&p, &gx);
        if slope >= 0.0 {
            for (i, row) in h.iter_mut().enumerate() {
                row.iter_mut().for_each(|v| *v = 0.0);
                row[i] = 1.0;
            }
            p = gx.iter().map(|v| -v).collect();
            slope = dot(&p, &gx);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (fn_, gn) = merit.eval(&xn)?;
            if fn_ <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else { break };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let hy: Vec<f64> = h.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            let r = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += (1.0 + yhy * r) * r * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let stalled = (fx - fn_).abs() <= 1e-16 * fx.abs().max(1.0) && inf_norm(&s) <= 1e-15;
        x = xn;
        fx = fn_;
        gx = gn;
        if stalled {
            break;
        }
    }
    let gnorm = inf_norm(&gx);
    Ok((x, gnorm))
}

/// Minimise `problem` from `x0`.
pub fn minimize(problem: &dyn NlpProblem, x0: &[f64], opts: &SolverOptions) -> Result<NlpResult> {
    opts.validate()?;
    if x0.len() != problem.n_vars() {
        return Err(Error::Config(format!("x0 has length {}, expected {}", x0.len(), problem.n_vars())));
    }
    let mut x = x0.to_vec();
    let g0 = problem.constraints(&x);
    check_finite(&g0, &x)?;
    let mut lambda = vec![0.0; g0.len()];
    let mut rho = opts.initial_penalty;
    let mut prev_violation = f64::INFINITY;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let violation = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(-v));
    let mut outer = 0;
    let mut status = SolveStatus::InfeasibleMaxIter;
    while outer < opts.max_iter {
        outer += 1;
        let merit = Merit { problem, lambda: &lambda, rho, fd_step: opts.fd_step };
        let inner_tol = (opts.opt_tol).max(1e-3 / outer as f64 / rho.sqrt()).min(1e-2);
        let (xn, _) = bfgs(&merit, x, inner_tol, opts.max_inner_iter)?;
        x = xn;
        let g = problem.constraints(&x);
        check_finite(&g, &x)?;
        let viol = violation(&g);
        if viol <= opts.feas_tol {
            let f = problem.objective(&x).0;
            if best.as_ref().map_or(true, |b| f < b.1) {
                best = Some((x.clone(), f));
            }
            if opts.stop_when_feasible {
                status = SolveStatus::Feasible;
                break;
            }
        }
        // multiplier update and KKT check
        let mut comp = 0.0f64;
        for (l, &gi) in lambda.iter_mut().zip(&g) {
            *l = (*l - rho * gi).max(0.0);
            comp = comp.max((*l * gi).abs());
        }
        if viol <= opts.feas_tol {
            let merit = Merit { problem, lambda: &lambda, rho: f64::MIN_POSITIVE, fd_step: opts.fd_step };
            let grad = stationarity(&merit, &x, &g)?;
            if grad <= opts.opt_tol && comp <= opts.opt_tol.max(opts.feas_tol) {
                status = SolveStatus::FeasibleOptimal;
                break;
            }
        }
        if viol > 0.25 * prev_violation && rho < opts.max_penalty {
            rho = (rho * 10.0).min(opts.max_penalty);
        }
        prev_violation = viol;
    }
    let (x, status) = match (status, best) {
        (SolveStatus::FeasibleOptimal, _) => (x, SolveStatus::FeasibleOptimal),
        (_, Some((bx, _))) => (bx, SolveStatus::Feasible),
        (s, None) => (x, s),
    };
    let g = problem.constraints(&x);
    let min_constraint = g.iter().copied().fold(f64::INFINITY, f64::min);
    // independent re-check of the reported status
    let status = if status.is_feasible() && min_constraint < -opts.feas_tol { SolveStatus::InfeasibleMaxIter } else { status };
    Ok(NlpResult { objective: problem.objective(&x).0, x, status, min_constraint, outer_iterations: outer })
}

/// ‖∇f − Σ λ_i ∇g_i‖∞ at `x`.
fn stationarity(merit: &Merit, x: &[f64], g: &[f64]) -> Result<f64> {
    let (_, mut grad) = merit.problem.objective(x);
    if merit.lambda.iter().any(|&l| l > 0.0) {
        let jac = match merit.problem.jacobian(x) {
            Some(j) => j,
            None => fd_jacobian(merit.problem, x, g, merit.fd_step)?,
        };
        for (l, row) in merit.lambda.iter().zip(&jac) {
            if *l > 0.0 {
                for (gr, d) in grad.iter_mut().zip(row) {
                    *gr -= l * d;
                }
            }
        }
    }
    Ok(inf_norm(&grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound() {
        let p = FnProblem { n_vars: 2, objective: squared_norm, constraints: |x: &[f64]| vec![x[0] - 1.0] };
        let r = minimize(&p, &[0.0, 0.0], &SolverOptions::default()).unwrap();
        assert!(r.status.is_feasible());
        assert!((r.x[0] - 1.0).abs() < 1e-6 && r.x[1].abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn sum_bound() {
        let p = FnProblem { n_vars: 2, objective: squared_norm, constraints: |x: &[f64]| vec![x[0] + x[1] - 2.0] };
        let r = minimize(&p, &[0.0, 0.0], &SolverOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::FeasibleOptimal);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn contradictory_bounds() {
        let p = FnProblem { n_vars: 1, objective: squared_norm, constraints: |x: &[f64]| vec![x[0] - 1.0, -x[0] - 1.0] };
        let opts = SolverOptions { max_iter: 40, ..Default::default() };
        let r = minimize(&p, &[0.0], &opts).unwrap();
        assert_eq!(r.status, SolveStatus::InfeasibleMaxIter);
    }

    #[test]
    fn nan_is_reported() {
        let p = FnProblem { n_vars: 1, objective: squared_norm, constraints: |_: &[f64]| vec![f64::NAN] };
        assert!(matches!(minimize(&p, &[0.5], &SolverOptions::default()), Err(Error::NonFiniteEvaluation { .. })));
    }
}
