//! Shared helpers for the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use augdg::augmentation::{
    explicit_psi, find_augmented_basis, min_over_cell, sample_parameters, special_test_function, AugmentedBasis, CellSample,
    CflSample, CheckSet, Regime, SampleRanges, ScaledParams, SearchOptions, TestFunctionOptions,
};
use augdg::basis::{build_basis, BasisSet, Family, SpaceSpec};
use augdg::dg::{sweep_solve, AugmentMode, Problem, Source, SweepOptions};
use augdg::error::Result;
use augdg::mesh::CartesianMesh;
use rand::Rng;

/// Relative distance of `value` from the set of numbers that print as
/// `printed` with last-digit unit `unit`, allowing both rounding and
/// truncation: the interval `[printed - unit/2, printed + unit]` (in
/// magnitude). Zero inside the interval.
pub fn printed_distance(value: f64, printed: f64, unit: f64) -> f64 {
    let (v, p) = (value.abs(), printed.abs());
    let (lo, hi) = (p - unit / 2.0, p + unit);
    let d = if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        0.0
    };
    d / p
}

pub fn relative(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Unit of the last printed digit for a value shown with `sig` significant digits.
pub fn last_digit_unit(printed: f64, sig: i32) -> f64 {
    10f64.powi(printed.abs().log10().floor() as i32 - sig + 1)
}

pub fn pass_line(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Gauss points per axis for the source, independent of the space.
const SOURCE_POINTS: usize = 24;

/// Non-negative polynomial profile on [-1, 1]: `((1 + c t)/2)^p` for
/// `c = ±1`, peaked at an endpoint with width about `2/p`, or the bump
/// `(1 - ((t - c)/2)^2)^p` for interior `c`, of width about `2/√p`.
fn profile(t: f64, c: f64, p: i32) -> f64 {
    if c.abs() == 1.0 {
        ((1.0 + c * t) / 2.0).powi(p)
    } else {
        (1.0 - ((t - c) / 2.0).powi(2)).powi(p)
    }
}

/// A single cell with random regime-respecting speeds and non-negative,
/// sharply peaked polynomial source and inflow data.
pub struct RandomCell {
    pub family: Family,
    pub k: usize,
    pub mesh: CartesianMesh,
    pub problem: Problem,
    pub base: BasisSet,
    pub augmented: BasisSet,
    /// Minimum of the augmented certificate over its check points and the whole cell.
    pub certificate_min: f64,
}

const SPACES: [(Family, usize); 9] = [
    (Family::Q, 2),
    (Family::Q, 3),
    (Family::Q, 4),
    (Family::S, 2),
    (Family::S, 3),
    (Family::S, 4),
    (Family::P, 1),
    (Family::P, 2),
    (Family::P, 3),
];

/// Speeds and cell sizes perturbed by up to a factor 1.25 around α = 1,
/// β = 1/10, γ = 0, Δx = Δy = 0.1, where standard spaces are known to fail.
fn near_known_failure(rng: &mut impl Rng) -> CflSample {
    let mut f = || rng.gen_range(0.8..1.25);
    let (alpha, beta, dx, dy) = (f(), 0.1 * f(), 0.1 * f(), 0.1 * f());
    let gamma = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.1) };
    let s = ScaledParams::from_physical(alpha, beta, gamma, dx, dy).expect("positive parameters");
    CflSample { alpha, beta, gamma, dx, dy, b: s.b, g: s.g, min_v: f64::NAN }
}

/// Profile centre: an endpoint of the cell half of the time, else uniform.
fn centre(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.5) {
        if rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    } else {
        rng.gen_range(-1.0..=1.0)
    }
}

/// `neighbourhood` draws the speeds and sizes near the known failure instead
/// of log-uniformly over wide ranges, and always puts a source peak on the
/// outflow edge of the first axis.
pub fn random_cell(rng: &mut impl Rng, neighbourhood: bool) -> Result<RandomCell> {
    let (family, k) = SPACES[rng.gen_range(0..SPACES.len())];
    let regime = if neighbourhood || rng.gen_bool(0.5) { Regime::LowB } else { Regime::HighB };
    let ranges = SampleRanges::default();
    let s = loop {
        let s = if neighbourhood { near_known_failure(rng) } else { sample_parameters(rng, &ranges) };
        if family == Family::P || regime.contains(family, k, s.b) {
            break s;
        }
    };
    let to_ref = |x: f64, h: f64| 2.0 * x / h - 1.0;
    let (dx, dy) = (s.dx, s.dy);
    let [mut c0, c1, c2, c3]: [f64; 4] = std::array::from_fn(|_| centre(rng));
    let [p0, p1]: [i32; 2] = std::array::from_fn(|_| 10f64.powf(rng.gen_range(1.0..3.0)) as i32);
    let p_zero = if neighbourhood { 0.75 } else { 0.5 };
    let [mut a_src, a_in0, a_in1]: [f64; 3] =
        std::array::from_fn(|_| if rng.gen_bool(p_zero) { 0.0 } else { 10f64.powf(rng.gen_range(-2.0..2.0)) });
    if neighbourhood {
        // the unaugmented test functions dip below zero next to the outflow edge
        c0 = 1.0;
        a_src = a_src.max(1.0);
    }
    let source = move |x: &[f64]| a_src * profile(to_ref(x[0], dx), c0, p0) * profile(to_ref(x[1], dy), c1, p1);
    let problem = Problem::new_2d(s.alpha, s.beta, s.gamma)
        .with_source(Source::Field { f: Arc::new(source), points: Some(SOURCE_POINTS) })
        .with_inflow(0, move |x| a_in0 * profile(to_ref(x[1], dy), c2, p0))
        .with_inflow(1, move |x| a_in1 * profile(to_ref(x[0], dx), c3, p1));
    let mesh = CartesianMesh::uniform(&[(0.0, dx), (0.0, dy)], &[1, 1])?;
    let cell = CellSample { problem: problem.clone(), geometry: mesh.geometry(0) };
    let base = build_basis(SpaceSpec::new(family, k, 2))?;
    let psi: AugmentedBasis = match family {
        Family::P => {
            let opts = SearchOptions { check: CheckSet::Grid(21), seed: rng.gen(), ..SearchOptions::default() };
            find_augmented_basis(SpaceSpec::new(family, k, 2), k + 2, &[cell.clone()], &opts)?.basis
        }
        _ => explicit_psi(family, k, regime)?,
    };
    let augmented = psi.augment(&base)?;
    let opts = TestFunctionOptions { check: CheckSet::GaussWithInflow, ..Default::default() };
    let cert = special_test_function(&augmented, &problem, &cell.geometry, &opts)?;
    let (dense, _) = min_over_cell(|x| augmented.eval_combination(&cert.v, x), 2, 41);
    let certificate_min = cert.min_value.min(dense);
    Ok(RandomCell { family, k, mesh, problem, base, augmented, certificate_min })
}

impl RandomCell {
    /// Cell averages `(unaugmented, augmented)`.
    pub fn averages(&self) -> Result<(f64, f64)> {
        let plain = sweep_solve(&self.mesh, &self.problem, &self.base, None, &SweepOptions::default())?;
        let opts = SweepOptions { augment: AugmentMode::Always, ..SweepOptions::default() };
        let aug = sweep_solve(&self.mesh, &self.problem, &self.base, Some(&self.augmented), &opts)?;
        Ok((plain.field.cell_average(0).value, aug.field.cell_average(0).value))
    }
}
