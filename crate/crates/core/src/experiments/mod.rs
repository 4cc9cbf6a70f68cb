//! Experiment presets: counterexamples, convergence studies, step
//! propagation, parameter sweeps and the closed-form Q2 analysis.
//!
//! Every runner returns a [`ResultTable`], written as CSV preceded by one
//! `#`-prefixed JSON metadata line. Runs are deterministic given their inputs.

mod convergence;
mod counterexample;
mod step;
mod tools;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::augmentation::{
    explicit_psi, find_augmented_basis, AugmentedBasis, CellSample, CheckSet, Regime, ScaledParams, SearchOptions,
};
use crate::basis::{build_basis, BasisSet, Family, SpaceSpec};
use crate::dg::{AugmentMode, Problem};
use crate::error::{Error, Result};
use crate::mesh::CartesianMesh;

pub use convergence::{
    manufactured_2d, manufactured_3d, observed_orders, run_convergence, ConvergenceOptions, Manufactured,
};
pub use counterexample::{run_counterexample, strip_samples, Counterexample, STRIP_XI_MIN};
pub use step::{run_step, step_problem, StepOptions, StepOutcome};
pub use tools::{run_appendix_a, run_augment, run_cfl_sweep, AppendixOutcome, AugmentTiming};

/// Tolerance for "non-negative" throughout the presets.
pub const NONNEG_TOL: f64 = 1e-12;

/// How the augmented space is chosen and where it is used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentChoice {
    #[default]
    Off,
    /// The closed-form ψ of the cell's B regime, in every cell.
    Table,
    /// A ψ found by the optimizer for the mesh cells, in every cell.
    Optimize,
    /// Base space first; cells with a negative average are re-solved with the
    /// closed-form ψ when one exists, otherwise with an optimized one.
    Adaptive,
}

impl AugmentChoice {
    pub fn mode(self) -> AugmentMode {
        match self {
            AugmentChoice::Off => AugmentMode::Off,
            AugmentChoice::Table | AugmentChoice::Optimize => AugmentMode::Always,
            AugmentChoice::Adaptive => AugmentMode::Adaptive,
        }
    }
}

impl fmt::Display for AugmentChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AugmentChoice::Off => "off",
            AugmentChoice::Table => "table",
            AugmentChoice::Optimize => "optimize",
            AugmentChoice::Adaptive => "adaptive",
        })
    }
}

impl FromStr for AugmentChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" | "none" => Ok(AugmentChoice::Off),
            "table" | "explicit" | "explicit-table" => Ok(AugmentChoice::Table),
            "optimize" | "optimise" => Ok(AugmentChoice::Optimize),
            "adaptive" => Ok(AugmentChoice::Adaptive),
            _ => Err(Error::Config(format!("unknown augmentation mode '{s}'"))),
        }
    }
}

/// B of the first mesh cell for a constant-coefficient 2D problem.
pub fn mesh_b(mesh: &CartesianMesh, problem: &Problem) -> Result<ScaledParams> {
    if mesh.dim() != 2 || !problem.has_constant_coefficients() {
        return Err(Error::Config("B is defined for constant-coefficient 2D problems".into()));
    }
    let g = mesh.geometry(0);
    let centre = g.to_physical(&[0.0, 0.0]);
    let a = problem.velocity[0].at(&centre);
    let b = problem.velocity[1].at(&centre);
    ScaledParams::from_physical(a, b, problem.gamma.at(&centre), g.h[0], g.h[1])
}

/// Cells handed to the optimizer: one per distinct cell shape when the
/// coefficients are constant, otherwise up to 16 evenly spread cells.
fn search_cells(mesh: &CartesianMesh, problem: &Problem) -> Vec<CellSample> {
    let n = mesh.n_cells();
    let picks: Vec<usize> = if problem.has_constant_coefficients() {
        let mut seen: Vec<[u64; 3]> = Vec::new();
        (0..n)
            .filter(|&c| {
                let h = mesh.geometry(c).h.map(f64::to_bits);
                if seen.contains(&h) {
                    false
                } else {
                    seen.push(h);
                    true
                }
            })
            .take(16)
            .collect()
    } else {
        let m = n.min(16);
        (0..m).map(|i| i * n / m).collect()
    };
    picks.into_iter().map(|c| CellSample { problem: problem.clone(), geometry: mesh.geometry(c) }).collect()
}

/// The augmented space a preset uses, or `None` when augmentation is off.
#[derive(Clone, Debug)]
pub struct ChosenSpace {
    pub basis: BasisSet,
    pub psi: AugmentedBasis,
    pub min_v: Option<f64>,
}

/// Build the augmented space for `base` on `mesh` according to `choice`.
///
/// The closed form needs a 2D constant-coefficient problem whose B lies in
/// one of the regimes of `(family, k)`. The optimizer uses degree `r`
/// (default `k + 2`) and the given check set.
pub fn choose_space(
    base: &BasisSet,
    choice: AugmentChoice,
    r: Option<usize>,
    check: CheckSet,
    mesh: &CartesianMesh,
    problem: &Problem,
    seed: u64,
) -> Result<Option<ChosenSpace>> {
    let spec = base.spec();
    let table = || -> Result<Option<ChosenSpace>> {
        let s = mesh_b(mesh, problem)?;
        let regime = Regime::ALL.into_iter().find(|r| r.contains(spec.family, spec.k, s.b));
        match regime {
            Some(reg) => {
                let psi = explicit_psi(spec.family, spec.k, reg)?;
                Ok(Some(ChosenSpace { basis: psi.augment(base)?, psi, min_v: None }))
            }
            None => Ok(None),
        }
    };
    let optimize = || -> Result<ChosenSpace> {
        let r = r.unwrap_or(spec.k + 2);
        let opts = SearchOptions { check, seed, ..SearchOptions::default() };
        let out = find_augmented_basis(spec, r, &search_cells(mesh, problem), &opts)?;
        let min_v = Some(out.min_value());
        Ok(ChosenSpace { basis: out.basis.augment(base)?, psi: out.basis, min_v })
    };
    match choice {
        AugmentChoice::Off => Ok(None),
        AugmentChoice::Table => match table()? {
            Some(s) => Ok(Some(s)),
            None => Err(Error::Config(format!(
                "no closed-form ψ for {}{} covers this cell; use the optimizer",
                spec.family, spec.k
            ))),
        },
        AugmentChoice::Optimize => optimize().map(Some),
        AugmentChoice::Adaptive => {
            let explicit = if spec.dim == 2 && problem.has_constant_coefficients() { table().ok().flatten() } else { None };
            match explicit {
                Some(s) => Ok(Some(s)),
                None => optimize().map(Some),
            }
        }
    }
}

/// Rows of numbers with named columns and free-form metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultTable {
    pub name: String,
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let mut metadata = Map::new();
        metadata.insert("preset".into(), Value::from(name));
        metadata.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        Self { name: name.into(), metadata, columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        self.metadata.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.metadata)?)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|v| v.to_string()))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Parse a table written by [`ResultTable::write_csv`].
    pub fn read_csv(text: &str) -> Result<Self> {
        let (first, rest) = text.split_once('\n').ok_or_else(|| Error::Config("empty table".into()))?;
        let meta = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::Config("missing metadata line".into()))?;
        let metadata: Map<String, Value> = serde_json::from_str(meta)?;
        let mut rd = csv::Reader::from_reader(rest.as_bytes());
        let columns = rd.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Config(format!("bad number '{s}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let name = metadata.get("preset").and_then(Value::as_str).unwrap_or_default().to_string();
        Ok(Self { name, metadata, columns, rows })
    }
}

impl fmt::Display for ResultTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&self.columns)
                    .map(|(v, c)| {
                        if v.is_nan() {
                            "-".into()
                        } else if is_integer_column(c) {
                            format!("{v}")
                        } else if c.contains("order") {
                            format!("{v:.2}")
                        } else {
                            format!("{v:.4e}")
                        }
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| cells.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |items: Vec<&str>| -> String {
            items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
        };
        writeln!(f, "{}", line(self.columns.iter().map(String::as_str).collect()))?;
        for r in &cells {
            writeln!(f, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }
}

fn is_integer_column(name: &str) -> bool {
    matches!(name, "n" | "delta_inverse" | "cell" | "k" | "r" | "seed" | "limit" | "starts" | "augmented_cells" | "limited_cells" | "space" | "feasible" | "family" | "optimized")
}

/// Explicit description of a run, loadable from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Named preset; when set, the explicit fields below only fill in the
    /// options the preset exposes.
    pub preset: Option<String>,
    pub dim: usize,
    /// `[lo, hi]` per axis; time is the last axis in 3D.
    pub extents: Vec<[f64; 2]>,
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Constant source and constant inflow value.
    pub source: f64,
    pub inflow: f64,
    pub family: Family,
    pub k: usize,
    pub r: Option<usize>,
    pub augment: AugmentChoice,
    pub limit: bool,
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: None,
            dim: 2,
            extents: vec![[0.0, 1.0]; 2],
            nx: 8,
            ny: 8,
            nt: 8,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.0,
            source: 1.0,
            inflow: 0.0,
            family: Family::Q,
            k: 2,
            r: None,
            augment: AugmentChoice::Off,
            limit: false,
            seed: 0,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn spec(&self) -> SpaceSpec {
        SpaceSpec::new(self.family, self.k, self.dim)
    }

    pub fn mesh(&self) -> Result<CartesianMesh> {
        if self.extents.len() != self.dim {
            return Err(Error::Config(format!("{} extents given for dimension {}", self.extents.len(), self.dim)));
        }
        let counts: Vec<usize> = match self.dim {
            2 => vec![self.nx, self.ny],
            3 => vec![self.nx, self.ny, self.nt],
            d => return Err(Error::Config(format!("dimension {d} is not supported"))),
        };
        let ext: Vec<(f64, f64)> = self.extents.iter().map(|e| (e[0], e[1])).collect();
        CartesianMesh::uniform(&ext, &counts)
    }

    pub fn problem(&self) -> Result<Problem> {
        if self.source < 0.0 || self.inflow < 0.0 {
            return Err(Error::Config("source and inflow must be non-negative".into()));
        }
        let base = match self.dim {
            2 => Problem::new_2d(self.alpha, self.beta, self.gamma),
            3 => Problem::new_3d(self.alpha, self.beta, self.gamma),
            d => return Err(Error::Config(format!("dimension {d} is not supported"))),
        };
        let (s, g) = (self.source, self.inflow);
        let mut p = base.with_source_field(move |_| s);
        for axis in 0..self.dim {
            p = p.with_inflow(axis, move |_| g);
        }
        Ok(p)
    }
}

/// Outcome of [`solve`]: per-cell averages plus summary numbers.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub table: ResultTable,
    pub min_average: f64,
    pub min_lobatto: f64,
    pub augmented_cells: usize,
}

/// Solve the constant-data problem described by an explicit configuration.
pub fn solve(cfg: &ExperimentConfig) -> Result<SolveOutcome> {
    use crate::dg::{sweep_solve, SweepOptions};
    use crate::limiter::lobatto_points;

    let mesh = cfg.mesh()?;
    let problem = cfg.problem()?;
    let base = build_basis(cfg.spec())?;
    let chosen = choose_space(&base, cfg.augment, cfg.r, CheckSet::GaussWithInflow, &mesh, &problem, cfg.seed)?;
    let opts = SweepOptions { augment: cfg.augment.mode(), limit: cfg.limit, ..SweepOptions::default() };
    let res = sweep_solve(&mesh, &problem, &base, chosen.as_ref().map(|c| &c.basis), &opts)?;
    let field = &res.field;
    let dim = cfg.dim;
    let mut cols = vec!["cell"];
    cols.extend(["x0", "x1", "x2"].iter().take(dim));
    cols.extend(["average", "space"]);
    let mut table = ResultTable::new("solve", &cols)
        .with_meta("config", cfg)
        .with_meta("seed", cfg.seed);
    if let Some(c) = &chosen {
        table.set_meta("psi", &c.psi);
    }
    for c in 0..field.n_cells() {
        let centre = mesh.geometry(c).to_physical(&[0.0; 3][..dim]);
        let mut row = vec![c as f64];
        row.extend(&centre[..dim]);
        row.push(field.cell_average(c).value);
        row.push(field.space_index(c) as f64);
        table.push(row);
    }
    let min_average = field.averages().into_iter().fold(f64::INFINITY, f64::min);
    let min_lobatto = field.min_at_points(&lobatto_points(cfg.k, dim)?);
    Ok(SolveOutcome { table, min_average, min_lobatto, augmented_cells: field.space_counts().get(1).copied().unwrap_or(0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = ResultTable::new("demo", &["n", "error"]).with_meta("seed", 3);
        t.push(vec![10.0, 1.25e-3]);
        t.push(vec![20.0, f64::NAN]);
        let s = t.to_csv_string().unwrap();
        assert!(s.starts_with("# {"));
        let back = ResultTable::read_csv(&s).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][1].is_nan());
        assert_eq!(back.metadata["seed"], 3);
    }

    #[test]
    fn config_toml_round_trip() {
        let cfg = ExperimentConfig { augment: AugmentChoice::Adaptive, limit: true, r: Some(4), ..Default::default() };
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn augment_choice_parses() {
        for c in [AugmentChoice::Off, AugmentChoice::Table, AugmentChoice::Optimize, AugmentChoice::Adaptive] {
            assert_eq!(c.to_string().parse::<AugmentChoice>().unwrap(), c);
        }
    }

    #[test]
    fn solve_constant_data_is_positive() {
        let cfg = ExperimentConfig { augment: AugmentChoice::Adaptive, limit: true, ..Default::default() };
        let out = solve(&cfg).unwrap();
        assert_eq!(out.table.rows.len(), 64);
        assert!(out.min_average >= 0.0 && out.min_lobatto >= -NONNEG_TOL);
    }
}
