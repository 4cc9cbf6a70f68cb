use std::fmt;
use std::sync::Arc;

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::mesh::CellGeometry;
use crate::poly::MAX_DIM;
use crate::quadrature::Point;

/// A scalar function of physical coordinates.
pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Wrap a closure as a [`ScalarField`].
pub fn field(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScalarField {
    Arc::new(f)
}

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Field(ScalarField),
}

impl Coefficient {
    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Field(_) => f.write_str("Field(..)"),
        }
    }
}

/// Quadrature data for a source that is not smooth on the cell: reference
/// points, reference-measure weights and the source value at each point.
pub type SourceSamples = Vec<(Point, f64, f64)>;

#[derive(Clone, Default)]
pub enum Source {
    #[default]
    Zero,
    /// Smooth source integrated with a tensor Gauss rule; `points` overrides
    /// the per-axis count (defaults to the assembly rule).
    Field { f: ScalarField, points: Option<usize> },
    /// Caller-supplied quadrature per cell.
    Cellwise(Arc<dyn Fn(&CellGeometry) -> SourceSamples + Send + Sync>),
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("Zero"),
            Source::Field { points, .. } => write!(f, "Field {{ points: {points:?} }}"),
            Source::Cellwise(_) => f.write_str("Cellwise(..)"),
        }
    }
}

/// The transport problem on a whole domain.
///
/// Axis `a` is advected with speed `velocity[a]`; in three dimensions the last
/// axis is time with unit speed.
#[derive(Clone, Debug)]
pub struct Problem {
    pub velocity: Vec<Coefficient>,
    pub gamma: Coefficient,
    pub source: Source,
    /// Boundary data on the lower face of each axis; `None` means zero inflow.
    pub inflow: Vec<Option<BoundaryData>>,
    /// Reject negative speeds, reaction or source at quadrature points.
    pub check_signs: bool,
}

#[derive(Clone)]
pub struct BoundaryData(pub ScalarField);

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryData(..)")
    }
}

impl Problem {
    /// `(α u)_x + (β u)_y + γ u = f`.
    pub fn new_2d(alpha: impl Into<Coefficient>, beta: impl Into<Coefficient>, gamma: impl Into<Coefficient>) -> Self {
        Self {
            velocity: vec![alpha.into(), beta.into()],
            gamma: gamma.into(),
            source: Source::Zero,
            inflow: vec![None, None],
            check_signs: true,
        }
    }

    /// `u_t + α u_x + β u_y + γ u = f` with coordinates ordered (x, y, t).
    pub fn new_3d(alpha: impl Into<Coefficient>, beta: impl Into<Coefficient>, gamma: impl Into<Coefficient>) -> Self {
        Self {
            velocity: vec![alpha.into(), beta.into(), Coefficient::Constant(1.0)],
            gamma: gamma.into(),
            source: Source::Zero,
            inflow: vec![None, None, None],
            check_signs: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.velocity.len()
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    pub fn with_source_field(self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.with_source(Source::Field { f: Arc::new(f), points: None })
    }

    pub fn with_inflow(mut self, axis: usize, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.inflow[axis] = Some(BoundaryData(Arc::new(g)));
        self
    }

    /// True when speeds and reaction do not vary in space.
    pub fn has_constant_coefficients(&self) -> bool {
        self.velocity.iter().all(Coefficient::is_constant) && self.gamma.is_constant()
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_DIM).contains(&self.dim()) || self.inflow.len() != self.dim() {
            return Err(Error::InvalidCoefficient(format!("problem of dimension {}", self.dim())));
        }
        for (a, v) in self.velocity.iter().enumerate() {
            if let Coefficient::Constant(c) = v {
                if !(*c > 0.0) {
                    return Err(Error::InvalidCoefficient(format!("speed along axis {a} is {c}, must be positive")));
                }
            }
        }
        if let Coefficient::Constant(g) = self.gamma {
            if !(g >= 0.0) {
                return Err(Error::InvalidCoefficient(format!("reaction coefficient {g} is negative")));
            }
        }
        Ok(())
    }
}

/// Inflow data on the lower face of one axis of a cell.
#[derive(Clone, Debug)]
pub enum Trace<'a> {
    Zero,
    /// Domain boundary data evaluated at physical face points.
    Boundary(&'a BoundaryData),
    /// The upwind neighbour's polynomial, read on its upper face.
    Polynomial { basis: &'a BasisSet, coeffs: &'a [f64] },
    /// Precomputed trace values at the face quadrature points.
    Values(Vec<f64>),
}

/// Everything the local weak form on one cell needs.
#[derive(Clone, Debug)]
pub struct LocalProblem<'a> {
    pub cell: Option<usize>,
    pub geometry: CellGeometry,
    pub problem: &'a Problem,
    pub inflow: Vec<Trace<'a>>,
}

impl<'a> LocalProblem<'a> {
    /// A cell whose lower faces read the domain boundary data.
    pub fn boundary_cell(problem: &'a Problem, geometry: CellGeometry) -> Self {
        let inflow = problem
            .inflow
            .iter()
            .map(|b| b.as_ref().map_or(Trace::Zero, Trace::Boundary))
            .collect();
        Self { cell: None, geometry, problem, inflow }
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim
    }
}
