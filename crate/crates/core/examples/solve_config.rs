//! Solve a constant-data problem described in TOML.

use augdg::experiments::{solve, ExperimentConfig};

const CONFIG: &str = r#"
dim = 2
extents = [[0.0, 1.0], [0.0, 1.0]]
nx = 16
ny = 16
alpha = 1.0
beta = 0.25
gamma = 0.5
source = 1.0
inflow = 0.0
family = "Q"
k = 2
augment = "adaptive"
limit = true
"#;

fn main() -> augdg::error::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let out = solve(&cfg)?;
    println!("min average {:.4e}", out.min_average);
    println!("min at Lobatto points {:.4e}", out.min_lobatto);
    println!("augmented cells {}", out.augmented_cells);
    Ok(())
}
