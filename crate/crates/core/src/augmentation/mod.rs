//! Augmented local spaces X̃_k = X_k ⊕ span ψ and the test function that
//! certifies positivity of the cell average.
//!
//! For a local space with basis Φ the special test function `v` solves
//! `L(Φ_b, v) = ∫ Φ_b` for every trial function. When `v ≥ 0` at the points
//! where the data enters the right-hand side, the cell average of the DG
//! solution is non-negative for non-negative data.

pub mod explicit;
mod search;
mod sweep;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, superlinear_degree, BasisSet, Family, SpaceSpec};
use crate::dg::{bilinear_matrix, default_points, LocalProblem, Problem, Tabulation};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::mesh::CellGeometry;
use crate::poly::{Exponents, Poly};
use crate::quadrature::{gauss_legendre, gauss_lobatto, Point};

pub use explicit::{explicit_psi_poly, psi_p1_classic, psi_p2_unit_cfl};
pub use search::{find_augmented_basis, CellSample, SearchOptions, SearchOutcome};
pub use sweep::{cfl_sweep, optimized_sweep, sample_parameters, CflSample, SampleRanges};

/// Certificates with a minimum at or above `-CERT_TOL` are valid.
pub const CERT_TOL: f64 = 1e-12;

/// Dimensionless cell parameters of a 2D cell: `B = Δx β / (Δy α)` and
/// `G = Δx γ / (2 α)`. The test function depends on the cell only through
/// these two numbers (up to a positive factor).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub b: f64,
    pub g: f64,
    pub dx: f64,
}

impl ScaledParams {
    pub fn new(b: f64, g: f64, dx: f64) -> Result<Self> {
        if !(b > 0.0) || !(g >= 0.0) || !(dx > 0.0) || !b.is_finite() || !g.is_finite() {
            return Err(Error::InvalidCoefficient(format!("scaled parameters B={b}, G={g}, dx={dx}")));
        }
        Ok(Self { b, g, dx })
    }

    pub fn from_physical(alpha: f64, beta: f64, gamma: f64, dx: f64, dy: f64) -> Result<Self> {
        Self::new(dx * beta / (dy * alpha), dx * gamma / (2.0 * alpha), dx)
    }

    /// A representative square cell with α = 1 and these parameters.
    pub fn cell(&self) -> CellSample {
        let problem = Problem::new_2d(1.0, self.b, 2.0 * self.g / self.dx);
        let geometry = CellGeometry::new(&[0.0, 0.0], &[self.dx, self.dx]).expect("positive width");
        CellSample { problem, geometry }
    }
}

/// Which side of the CFL-type number B an explicit ψ is designed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    LowB,
    HighB,
}

impl Regime {
    pub const ALL: [Regime; 2] = [Regime::LowB, Regime::HighB];

    /// `(low, high)`: the low regime is `B ≤ low`, the high one `B ≥ high`.
    pub fn threshold(family: Family, k: usize) -> Option<(f64, f64)> {
        let low = match (family, k) {
            (Family::Q, 2) | (Family::S, 2) => 0.5,
            (Family::Q, 3) => 0.25,
            (Family::Q, 4) | (Family::S, 3) => 0.125,
            (Family::S, 4) => 0.0625,
            _ => return None,
        };
        Some((low, 1.0 / low))
    }

    pub fn contains(self, family: Family, k: usize, b: f64) -> bool {
        match (Self::threshold(family, k), self) {
            (Some((lo, _)), Regime::LowB) => b > 0.0 && b <= lo,
            (Some((_, hi)), Regime::HighB) => b >= hi,
            (None, _) => false,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::LowB => "low_B",
            Regime::HighB => "high_B",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low_b" | "low" => Ok(Regime::LowB),
            "high_b" | "high" => Ok(Regime::HighB),
            _ => Err(Error::Config(format!("unknown regime '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Optimized,
    ExplicitTable,
}

/// ψ stored by its coefficients `d` over the monomial basis of X_r.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedBasis {
    pub family: Family,
    pub k: usize,
    pub r: usize,
    pub dim: usize,
    pub regime: Option<Regime>,
    pub d: Vec<f64>,
    pub provenance: Provenance,
}

/// Smallest degree of `family` whose space contains every term of `p`.
fn enclosing_degree(family: Family, p: &Poly) -> usize {
    p.terms()
        .iter()
        .map(|(e, _)| {
            let e = &e[..p.dim()];
            (match family {
                Family::P => e.iter().sum(),
                Family::Q => e.iter().copied().max().unwrap_or(0),
                Family::S => superlinear_degree(e),
            }) as usize
        })
        .max()
        .unwrap_or(0)
}

impl AugmentedBasis {
    /// Express `psi` over the monomials of the smallest X_r containing it.
    pub fn from_psi(
        family: Family,
        k: usize,
        psi: &Poly,
        regime: Option<Regime>,
        provenance: Provenance,
    ) -> Result<Self> {
        let dim = psi.dim();
        let r = enclosing_degree(family, psi).max(k + 1);
        let d = SpaceSpec::new(family, r, dim).monomials().iter().map(|e| psi.coefficient(e)).collect();
        let out = Self { family, k, r, dim, regime, d, provenance };
        out.validate()?;
        Ok(out)
    }

    pub fn space_r(&self) -> SpaceSpec {
        SpaceSpec::new(self.family, self.r, self.dim)
    }

    pub fn base_spec(&self) -> SpaceSpec {
        SpaceSpec::new(self.family, self.k, self.dim)
    }

    pub fn psi(&self) -> Poly {
        let terms: Vec<(Exponents, f64)> = self.space_r().monomials().into_iter().zip(self.d.iter().copied()).collect();
        Poly::from_terms(self.dim, terms)
    }

    /// Checks `r > k`, the length of `d` and that ψ is not in X_k.
    pub fn validate(&self) -> Result<()> {
        self.base_spec().validate()?;
        if self.r <= self.k {
            return Err(Error::UnsupportedSpace(format!("ansatz degree {} must exceed k = {}", self.r, self.k)));
        }
        if self.d.len() != self.space_r().dimension() {
            return Err(Error::UnsupportedSpace(format!(
                "{} coefficients for a space of dimension {}",
                self.d.len(),
                self.space_r().dimension()
            )));
        }
        let residual = projection_residual(&self.base_spec(), &self.psi())?;
        if !(residual.0 > 1e-10 * residual.1) {
            return Err(Error::UnsupportedSpace("augmented function lies in the base space".into()));
        }
        Ok(())
    }

    /// The base basis extended by ψ.
    pub fn augment(&self, base: &BasisSet) -> Result<BasisSet> {
        if base.spec() != self.base_spec() {
            return Err(Error::UnsupportedSpace(format!(
                "augmented function was built for {}{} in {}D",
                self.family, self.k, self.dim
            )));
        }
        base.augmented_with(self.psi())
    }

    /// The augmented monomial basis of X̃_k.
    pub fn build(&self) -> Result<BasisSet> {
        self.augment(&build_basis(self.base_spec())?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: Self = serde_json::from_str(s)?;
        b.validate()?;
        Ok(b)
    }
}

/// `(‖ψ − Πψ‖, ‖ψ‖)` in L²(reference cell), Π the L² projection onto `spec`.
fn projection_residual(spec: &SpaceSpec, psi: &Poly) -> Result<(f64, f64)> {
    let basis = build_basis(*spec)?;
    let deg = basis.max_axis_degree().max(psi.max_axis_degree());
    let rule = gauss_legendre(crate::quadrature::required_points_for(deg), spec.dim)?;
    let n = basis.len();
    let mut gram = Matrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    let mut norm2 = 0.0;
    let mut rows = Vec::with_capacity(rule.len());
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let phi = basis.eval(p);
        let s = psi.eval(p);
        for i in 0..n {
            rhs[i] += w * phi[i] * s;
            for j in 0..n {
                gram[(i, j)] += w * phi[i] * phi[j];
            }
        }
        norm2 += w * s * s;
        rows.push((phi, s, *w));
    }
    let c = Lu::factor(&gram)?.solve(&rhs);
    let res2: f64 = rows
        .iter()
        .map(|(phi, s, w)| {
            let proj: f64 = phi.iter().zip(&c).map(|(a, b)| a * b).sum();
            w * (s - proj).powi(2)
        })
        .sum();
    Ok((res2.max(0.0).sqrt(), norm2.sqrt()))
}

/// The closed-form augmented function for `(family, k)` as an [`AugmentedBasis`].
pub fn explicit_psi(family: Family, k: usize, regime: Regime) -> Result<AugmentedBasis> {
    let psi = explicit_psi_poly(family, k, regime)?;
    AugmentedBasis::from_psi(family, k, &psi, Some(regime), Provenance::ExplicitTable)
}

/// The finite point set on which `v ≥ 0` is required.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckSet {
    /// Volume points of the assembly rule.
    #[default]
    Gauss,
    /// Volume points plus the Gauss points of every inflow face.
    GaussWithInflow,
    /// Tensor Gauss–Lobatto points, `n` per axis.
    Lobatto(usize),
    /// Uniform `n`-per-axis grid including the cell corners.
    Grid(usize),
}

impl CheckSet {
    pub fn points(&self, tab: &Tabulation, dim: usize) -> Result<Vec<Point>> {
        Ok(match *self {
            CheckSet::Gauss => tab.rule.points.clone(),
            CheckSet::GaussWithInflow => {
                let mut pts = tab.rule.points.clone();
                for axis in 0..dim {
                    pts.extend(tab.face(axis, false).points.iter().copied());
                }
                pts
            }
            CheckSet::Lobatto(n) => gauss_lobatto(n, dim)?.points.clone(),
            CheckSet::Grid(n) => grid_points(n.max(2), dim),
        })
    }
}

/// Uniform `n`-per-axis grid on `[-1,1]^dim`, endpoints included.
pub fn grid_points(n: usize, dim: usize) -> Vec<Point> {
    let t: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let total = n.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = [0.0; 3];
            for a in (0..dim).rev() {
                p[a] = t[idx % n];
                idx /= n;
            }
            p
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TestFunctionOptions {
    /// Gauss points per axis; defaults to exact integration of all products.
    pub points_per_axis: Option<usize>,
    pub check: CheckSet,
}

/// The special test function of a local space and the minimum of `v` over the check set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityCertificate {
    pub check_points: Vec<Point>,
    pub min_value: f64,
    /// Reference point attaining `min_value`.
    pub argmin: Point,
    /// Coefficients of `v` in the local basis.
    pub v: Vec<f64>,
    /// `max_b |L(Φ_b, v) − ∫Φ_b|`.
    pub residual: f64,
}

impl PositivityCertificate {
    pub fn is_valid(&self) -> bool {
        self.min_value >= -CERT_TOL
    }
}

/// `M[a][b] = L(Φ_b, Φ_a)` and `m_b = ∫Φ_b` on one cell.
pub(crate) fn local_system(
    basis: &BasisSet,
    problem: &Problem,
    geometry: &CellGeometry,
    points_per_axis: usize,
) -> Result<(Tabulation, Matrix, Vec<f64>)> {
    if problem.dim() != basis.dim() || geometry.dim != basis.dim() {
        return Err(Error::InvalidMesh("problem, cell and space dimensions differ".into()));
    }
    let tab = Tabulation::new(basis, points_per_axis)?;
    let lp = LocalProblem::boundary_cell(problem, *geometry);
    let m = bilinear_matrix(&lp, &tab, &tab)?;
    let jac = geometry.jacobian();
    let n = basis.len();
    let mut mass = vec![0.0; n];
    for (q, w) in tab.rule.weights.iter().enumerate() {
        for (b, mb) in mass.iter_mut().enumerate() {
            *mb += w * jac * tab.values[q * n + b];
        }
    }
    Ok((tab, m, mass))
}

/// Solve `L(Φ_b, v) = ∫ Φ_b` for `v` in the span of `basis` and report its
/// minimum over the check points.
pub fn special_test_function(
    basis: &BasisSet,
    problem: &Problem,
    geometry: &CellGeometry,
    opts: &TestFunctionOptions,
) -> Result<PositivityCertificate> {
    let n_pts = opts.points_per_axis.unwrap_or_else(|| default_points(basis, basis));
    let (tab, m, mass) = local_system(basis, problem, geometry, n_pts)?;
    let mt = m.transpose();
    let v = Lu::factor(&mt)?.solve(&mass);
    let residual = mt.mul_vec(&v).iter().zip(&mass).fold(0.0f64, |r, (a, b)| r.max((a - b).abs()));
    let dim = basis.dim();
    let check_points = opts.check.points(&tab, dim)?;
    let (mut min_value, mut argmin) = (f64::INFINITY, [0.0; 3]);
    for p in &check_points {
        let val = basis.eval_combination(&v, &p[..dim]);
        if !val.is_finite() {
            return Err(Error::NonFiniteEvaluation { point: p[..dim].to_vec() });
        }
        if val < min_value {
            min_value = val;
            argmin = *p;
        }
    }
    Ok(PositivityCertificate { check_points, min_value, argmin, v, residual })
}

/// Minimum of `f` over `[-1,1]^dim`: a uniform `n`-per-axis grid followed by
/// repeated local grid refinement around the best few candidates.
pub fn min_over_cell(f: impl Fn(&[f64]) -> f64, dim: usize, n: usize) -> (f64, Point) {
    let grid = grid_points(n.max(2), dim);
    let mut scored: Vec<(f64, Point)> = grid.iter().map(|p| (f(&p[..dim]), *p)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0];
    let local = grid_points(9, dim);
    for &(_, start) in scored.iter().take(8) {
        let mut centre = start;
        let mut radius = 2.0 / (n.max(2) - 1) as f64;
        for _ in 0..40 {
            let mut improved = (f(&centre[..dim]), centre);
            for o in &local {
                let mut p = centre;
                for a in 0..dim {
                    p[a] = (centre[a] + radius * o[a]).clamp(-1.0, 1.0);
                }
                let val = f(&p[..dim]);
                if val < improved.0 {
                    improved = (val, p);
                }
            }
            centre = improved.1;
            radius *= 0.4;
            if improved.0 < best.0 {
                best = improved;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_thresholds() {
        assert!(Regime::LowB.contains(Family::Q, 2, 0.5));
        assert!(!Regime::LowB.contains(Family::Q, 2, 1.0));
        assert!(Regime::HighB.contains(Family::S, 4, 16.0));
        assert!(!Regime::HighB.contains(Family::S, 4, 15.0));
        assert_eq!(Regime::threshold(Family::P, 2), None);
    }

    #[test]
    fn explicit_round_trip_is_bit_exact() {
        for family in [Family::Q, Family::S] {
            for k in 2..=4 {
                for regime in Regime::ALL {
                    let a = explicit_psi(family, k, regime).unwrap();
                    let back = AugmentedBasis::from_json(&a.to_json().unwrap()).unwrap();
                    assert_eq!(a.d.len(), back.d.len());
                    assert!(a.d.iter().zip(&back.d).all(|(x, y)| x.to_bits() == y.to_bits()));
                    let p = explicit_psi_poly(family, k, regime).unwrap();
                    let x = [0.31, -0.77];
                    assert!((a.psi().eval(&x) - p.eval(&x)).abs() <= 1e-15 * p.eval(&x).abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn psi_inside_base_space_is_rejected() {
        let p = &Poly::var(2, 0) * &Poly::var(2, 1);
        assert!(AugmentedBasis::from_psi(Family::Q, 1, &p, None, Provenance::Optimized).is_err());
        assert!(AugmentedBasis::from_psi(Family::P, 1, &p, None, Provenance::Optimized).is_ok());
    }

    #[test]
    fn unaugmented_q2_counterexample_is_negative() {
        let basis = build_basis(SpaceSpec::new(Family::Q, 2, 2)).unwrap();
        let pr = Problem::new_2d(1.0, 0.1, 0.0);
        let g = CellGeometry::new(&[0.0, 0.0], &[0.1, 0.1]).unwrap();
        // positive at the Gauss points, negative on the outflow edge
        let c = special_test_function(&basis, &pr, &g, &TestFunctionOptions::default()).unwrap();
        assert!(c.min_value > 0.0 && c.residual < 1e-12);
        let (m, p) = min_over_cell(|x| basis.eval_combination(&c.v, x), 2, 101);
        assert!(m < 0.0 && p[0] == 1.0, "{m} at {p:?}");
        let aug = explicit_psi(Family::Q, 2, Regime::LowB).unwrap().augment(&basis).unwrap();
        let c = special_test_function(&aug, &pr, &g, &TestFunctionOptions::default()).unwrap();
        assert!(c.is_valid(), "{}", c.min_value);
    }

    #[test]
    fn cell_minimum_finds_interior_minimum() {
        let (m, p) = min_over_cell(|x| (x[0] - 0.123).powi(2) + (x[1] + 0.456).powi(2) - 1.0, 2, 21);
        assert!((m + 1.0).abs() < 1e-12 && (p[0] - 0.123).abs() < 1e-6);
    }
}
