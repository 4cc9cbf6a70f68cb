//! Sparse multivariate polynomials in monomial form on reference coordinates.
//!
//! Every basis function, augmented function and test function in the crate is
//! a [`Poly`]. Terms are kept sorted by exponent tuple with no duplicates and
//! no exact zeros, so structural equality is meaningful.

use std::ops::{Add, Mul, Neg, Sub};

/// Maximum number of reference coordinates supported.
pub const MAX_DIM: usize = 3;

/// Exponent tuple of a monomial; axes beyond the polynomial's dimension are zero.
pub type Exponents = [u32; MAX_DIM];

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: Vec<(Exponents, f64)>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(dim, [0; MAX_DIM], c)
    }

    pub fn monomial(dim: usize, exps: Exponents, c: f64) -> Self {
        let mut p = Self::zero(dim);
        debug_assert!(exps[dim..].iter().all(|&e| e == 0));
        if c != 0.0 {
            p.terms.push((exps, c));
        }
        p
    }

    /// The coordinate function `x_axis`.
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim);
        let mut e = [0; MAX_DIM];
        e[axis] = 1;
        Self::monomial(dim, e, 1.0)
    }

    /// The linear factor `x_axis - root`.
    pub fn linear(dim: usize, axis: usize, root: f64) -> Self {
        Self::var(dim, axis) - Self::constant(dim, root)
    }

    /// Build from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponents, f64)>) -> Self {
        let mut raw: Vec<(Exponents, f64)> = terms.into_iter().collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Exponents, f64)> = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        Self { dim, terms: out }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Exponents, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the given monomial (zero if absent).
    pub fn coefficient(&self, exps: &Exponents) -> f64 {
        self.terms
            .binary_search_by(|t| t.0.cmp(exps))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    /// Highest exponent of each axis.
    pub fn axis_degrees(&self) -> Exponents {
        let mut d = [0; MAX_DIM];
        for (e, _) in &self.terms {
            for a in 0..MAX_DIM {
                d[a] = d[a].max(e[a]);
            }
        }
        d
    }

    pub fn max_axis_degree(&self) -> u32 {
        self.axis_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|&(e, c)| (e, c * s)))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.dim, 1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, axis: usize) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(e, _)| e[axis] > 0).map(|&(e, c)| {
                let mut e2 = e;
                e2[axis] -= 1;
                (e2, c * e[axis] as f64)
            }),
        )
    }

    fn powers(&self, x: &[f64]) -> [Vec<f64>; MAX_DIM] {
        let deg = self.axis_degrees();
        let mut pw: [Vec<f64>; MAX_DIM] = Default::default();
        for a in 0..self.dim {
            let mut v = Vec::with_capacity(deg[a] as usize + 1);
            let mut acc = 1.0;
            for _ in 0..=deg[a] {
                v.push(acc);
                acc *= x[a];
            }
            pw[a] = v;
        }
        pw
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.dim);
        let pw = self.powers(x);
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = *c;
                for a in 0..self.dim {
                    t *= pw[a][e[a] as usize];
                }
                t
            })
            .sum()
    }

    /// Analytic gradient at `x`; entries beyond `dim` are left untouched.
    pub fn grad(&self, x: &[f64], out: &mut [f64]) {
        let pw = self.powers(x);
        for a in 0..self.dim {
            out[a] = 0.0;
        }
        for (e, c) in &self.terms {
            for a in 0..self.dim {
                if e[a] == 0 {
                    continue;
                }
                let mut t = c * e[a] as f64;
                for b in 0..self.dim {
                    let p = if b == a { e[b] - 1 } else { e[b] };
                    t *= pw[b][p as usize];
                }
                out[a] += t;
            }
        }
    }

    /// Exact integral over the reference cell `[-1, 1]^dim`.
    pub fn integrate_reference(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = *c;
                for a in 0..self.dim {
                    t *= if e[a] % 2 == 1 { 0.0 } else { 2.0 / (e[a] as f64 + 1.0) };
                }
                t
            })
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim);
        Poly::from_terms(self.dim, self.terms.iter().chain(rhs.terms.iter()).copied())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.dim, rhs.dim);
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = [0; MAX_DIM];
                for a in 0..MAX_DIM {
                    e[a] = ea[a] + eb[a];
                }
                terms.push((e, ca * cb));
            }
        }
        Poly::from_terms(self.dim, terms)
    }
}

impl Mul<f64> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: f64) -> Poly {
        self.scale(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Poly {
    type Output = Poly;
    fn mul(self, rhs: f64) -> Poly {
        self.scale(rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// Product of the given factors.
pub fn product<'a>(dim: usize, factors: impl IntoIterator<Item = &'a Poly>) -> Poly {
    factors.into_iter().fold(Poly::constant(dim, 1.0), |acc, f| &acc * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = (&x + &y).powi(2);
        assert_eq!(p.coefficient(&[1, 1, 0]), 2.0);
        assert!((p.eval(&[0.3, -0.7]) - 0.16).abs() < 1e-15);
        let q = &p - &p;
        assert!(q.is_zero());
    }

    #[test]
    fn gradient_matches_derivative() {
        let x = Poly::var(3, 0);
        let z = Poly::var(3, 2);
        let p = &(&x * &z).powi(3) + &Poly::linear(3, 1, 0.5).powi(2);
        let pt = [0.2, -0.4, 0.9];
        let mut g = [0.0; 3];
        p.grad(&pt, &mut g);
        for a in 0..3 {
            assert!((g[a] - p.derivative(a).eval(&pt)).abs() < 1e-14);
        }
    }

    #[test]
    fn reference_integral() {
        let x = Poly::var(2, 0);
        // int x^4 dx dy over [-1,1]^2 = 2/5 * 2
        assert!((x.powi(4).integrate_reference() - 0.8).abs() < 1e-15);
        assert_eq!(x.powi(3).integrate_reference(), 0.0);
    }
}
