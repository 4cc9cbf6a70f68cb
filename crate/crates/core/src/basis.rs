//! Polynomial bases for P_k, Q_k and serendipity S_k on the reference cell `[-1,1]^d`.
//!
//! Monomial bases are the default. For Q_2 in two dimensions the tensor Bernstein
//! basis is also available; its ordering runs over the ξ-factor first and the
//! η-factor second, so φ₁ is the (−1,−1) corner and φ₉ the (1,1) corner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Exponents, Poly, MAX_DIM};

/// The reference cell `[-1,1]^dim`, coordinates (ξ, η) or (ξ, η, τ).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceCell {
    dim: usize,
}

impl ReferenceCell {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 2 || dim == 3 {
            Ok(Self { dim })
        } else {
            Err(Error::UnsupportedSpace(format!("reference cell dimension {dim}")))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure(&self) -> f64 {
        2f64.powi(self.dim as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    P,
    Q,
    S,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::P => "P",
            Family::Q => "Q",
            Family::S => "S",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "P" | "p" => Ok(Family::P),
            "Q" | "q" => Ok(Family::Q),
            "S" | "s" => Ok(Family::S),
            other => Err(Error::UnsupportedSpace(format!("unknown family {other:?}"))),
        }
    }
}

/// Identifies a standard polynomial space X_k on a reference cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub family: Family,
    pub k: usize,
    pub dim: usize,
}

impl SpaceSpec {
    pub fn new(family: Family, k: usize, dim: usize) -> Self {
        Self { family, k, dim }
    }

    pub fn validate(&self) -> Result<()> {
        ReferenceCell::new(self.dim)?;
        if self.k < 1 {
            return Err(Error::UnsupportedSpace(format!("{self}: degree must be at least 1")));
        }
        if self.k > 24 {
            return Err(Error::UnsupportedSpace(format!("{self}: degree too large")));
        }
        Ok(())
    }

    /// The same family at a different degree.
    pub fn with_degree(&self, k: usize) -> Self {
        Self { k, ..*self }
    }

    /// Closed-form dimension of the space.
    pub fn dimension(&self) -> usize {
        let (k, n) = (self.k, self.dim);
        match self.family {
            Family::P => binomial(k + n, n),
            Family::Q => (k + 1).pow(n as u32),
            // Arnold & Awanou: sum over d of 2^(n-d) C(n,d) C(k-d,d)
            Family::S => (0..=n.min(k / 2))
                .map(|d| (1 << (n - d)) * binomial(n, d) * binomial(k - d, d))
                .sum(),
        }
    }

    /// Whether the monomial with these exponents belongs to the space.
    pub fn contains_monomial(&self, e: &Exponents) -> bool {
        let e = &e[..self.dim];
        match self.family {
            Family::P => e.iter().sum::<u32>() as usize <= self.k,
            Family::Q => e.iter().all(|&a| a as usize <= self.k),
            Family::S => superlinear_degree(e) as usize <= self.k,
        }
    }

    /// Monomial exponents of the space in canonical order: degree-major for
    /// P and S, tensor-major (first axis outermost) for Q.
    pub fn monomials(&self) -> Vec<Exponents> {
        let k = self.k as u32;
        let mut all = Vec::new();
        let mut e = [0u32; MAX_DIM];
        enumerate(self.dim, 0, k, &mut e, &mut all);
        all.retain(|e| self.contains_monomial(e));
        if self.family != Family::Q {
            all.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(*e)));
        }
        all
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} ({}D)", self.family, self.k, self.dim)
    }
}

fn enumerate(dim: usize, axis: usize, bound: u32, e: &mut Exponents, out: &mut Vec<Exponents>) {
    if axis == dim {
        out.push(*e);
        return;
    }
    for a in 0..=bound {
        e[axis] = a;
        enumerate(dim, axis + 1, bound, e, out);
    }
    e[axis] = 0;
}

/// Total degree counting only variables that appear with exponent at least two.
pub fn superlinear_degree(e: &[u32]) -> u32 {
    e.iter().filter(|&&a| a >= 2).sum()
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Monomial,
    Bernstein,
}

/// An ordered list of reference-cell basis functions.
#[derive(Clone, Debug)]
pub struct BasisSet {
    spec: SpaceSpec,
    representation: Representation,
    functions: Vec<Poly>,
    augmented: bool,
    unit: Vec<f64>,
}

impl BasisSet {
    pub fn spec(&self) -> SpaceSpec {
        self.spec
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn functions(&self) -> &[Poly] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// True when the last function is an augmented function outside X_k.
    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    /// The augmented function, if any.
    pub fn psi(&self) -> Option<&Poly> {
        self.augmented.then(|| self.functions.last().unwrap())
    }

    /// Coefficients of the constant function 1 in this basis.
    pub fn unit_coefficients(&self) -> &[f64] {
        &self.unit
    }

    /// Largest per-axis exponent over all functions.
    pub fn max_axis_degree(&self) -> u32 {
        self.functions.iter().map(Poly::max_axis_degree).max().unwrap_or(0)
    }

    /// The basis extended by one extra function (X̃_k = X_k + span ψ).
    pub fn augmented_with(&self, psi: Poly) -> Result<BasisSet> {
        if self.augmented {
            return Err(Error::UnsupportedSpace("space is already augmented".into()));
        }
        if psi.dim() != self.dim() {
            return Err(Error::UnsupportedSpace("augmented function has wrong dimension".into()));
        }
        let mut functions = self.functions.clone();
        functions.push(psi);
        let mut unit = self.unit.clone();
        unit.push(0.0);
        Ok(BasisSet { functions, unit, augmented: true, ..self.clone() })
    }

    /// The basis followed by extra functions, not marked as augmented.
    pub(crate) fn extended(&self, extra: impl IntoIterator<Item = Poly>) -> BasisSet {
        let mut out = self.clone();
        for f in extra {
            out.functions.push(f);
            out.unit.push(0.0);
        }
        out
    }

    /// Evaluate all functions at a reference point.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.functions.iter().map(|f| f.eval(x)).collect()
    }

    /// Gradients of all functions, row `i` is ∇Φ_i.
    pub fn grad(&self, x: &[f64]) -> Vec<[f64; MAX_DIM]> {
        self.functions
            .iter()
            .map(|f| {
                let mut g = [0.0; MAX_DIM];
                f.grad(x, &mut g);
                g
            })
            .collect()
    }

    /// Evaluate the expansion Σ c_i Φ_i at a reference point.
    pub fn eval_combination(&self, coeffs: &[f64], x: &[f64]) -> f64 {
        self.functions.iter().zip(coeffs).map(|(f, c)| c * f.eval(x)).sum()
    }

    /// The expansion Σ c_i Φ_i as a single polynomial.
    pub fn combination(&self, coeffs: &[f64]) -> Poly {
        self.functions
            .iter()
            .zip(coeffs)
            .fold(Poly::zero(self.dim()), |acc, (f, &c)| &acc + &f.scale(c))
    }
}

/// Build the monomial basis of a space.
pub fn build_basis(spec: SpaceSpec) -> Result<BasisSet> {
    spec.validate()?;
    let functions: Vec<Poly> = spec
        .monomials()
        .into_iter()
        .map(|e| Poly::monomial(spec.dim, e, 1.0))
        .collect();
    if functions.len() != spec.dimension() {
        return Err(Error::UnsupportedSpace(format!(
            "{spec}: enumerated {} functions, expected {}",
            functions.len(),
            spec.dimension()
        )));
    }
    let mut unit = vec![0.0; functions.len()];
    unit[0] = 1.0;
    Ok(BasisSet { spec, representation: Representation::Monomial, functions, augmented: false, unit })
}

/// Build a basis in the requested representation. Bernstein is available for Q_2 in 2D only.
pub fn build_basis_with(spec: SpaceSpec, representation: Representation) -> Result<BasisSet> {
    match representation {
        Representation::Monomial => build_basis(spec),
        Representation::Bernstein => {
            if spec != SpaceSpec::new(Family::Q, 2, 2) {
                return Err(Error::UnsupportedSpace(format!(
                    "Bernstein representation is only provided for Q2 (2D), not {spec}"
                )));
            }
            Ok(bernstein_q2())
        }
    }
}

/// Tensor-product quadratic Bernstein basis for Q_2 on `[-1,1]^2`.
pub fn bernstein_q2() -> BasisSet {
    let dim = 2;
    let half = |axis: usize, sign: f64| &Poly::var(dim, axis).scale(0.5) + &Poly::constant(dim, 0.5 * sign);
    // (t/2 - 1/2), (t/2 + 1/2) and (t + 1) along each axis
    let factors = |axis: usize| -> [Poly; 3] {
        let lo = half(axis, -1.0);
        let hi = half(axis, 1.0);
        let mid = -(&lo * &Poly::linear(dim, axis, -1.0));
        [lo.powi(2), mid, hi.powi(2)]
    };
    let fx = factors(0);
    let fy = factors(1);
    let mut functions = Vec::with_capacity(9);
    for bx in &fx {
        for by in &fy {
            functions.push(by * bx);
        }
    }
    BasisSet {
        spec: SpaceSpec::new(Family::Q, 2, 2),
        representation: Representation::Bernstein,
        functions,
        augmented: false,
        unit: vec![1.0; 9],
    }
}

/// (Φ_1(p), …, Φ_n(p)).
pub fn eval_basis(basis: &BasisSet, point: &[f64]) -> Vec<f64> {
    basis.eval(point)
}

/// Matrix of partial derivatives, one row per basis function.
pub fn grad_basis(basis: &BasisSet, point: &[f64]) -> Vec<[f64; MAX_DIM]> {
    basis.grad(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serendipity_monomials_2d() {
        let s2 = SpaceSpec::new(Family::S, 2, 2).monomials();
        assert_eq!(s2.len(), 8);
        assert!(s2.contains(&[2, 1, 0]) && s2.contains(&[1, 2, 0]));
        assert!(!s2.contains(&[2, 2, 0]));
        assert_eq!(SpaceSpec::new(Family::S, 1, 2).monomials().len(), 4);
    }

    #[test]
    fn p1_basis_is_one_xi_eta() {
        let b = build_basis(SpaceSpec::new(Family::P, 1, 2)).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.eval(&[0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(b.eval(&[0.5, -0.25]), vec![1.0, 0.5, -0.25]);
    }

    #[test]
    fn bernstein_first_function() {
        let b = bernstein_q2();
        let p = [0.3f64, -0.6];
        let phi1 = (p[1] / 2.0 - 0.5).powi(2) * (p[0] / 2.0 - 0.5).powi(2);
        assert!((b.functions()[0].eval(&p) - phi1).abs() < 1e-15);
        let mut g = [0.0; 3];
        b.functions()[0].grad(&[-1.0, -1.0], &mut g);
        assert!((g[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn bernstein_only_for_q2() {
        assert!(build_basis_with(SpaceSpec::new(Family::Q, 3, 2), Representation::Bernstein).is_err());
        assert!(build_basis(SpaceSpec::new(Family::P, 0, 2)).is_err());
        assert!(build_basis(SpaceSpec::new(Family::P, 1, 4)).is_err());
    }
}
