//! Search for an extra basis function that makes P_k positivity preserving on
//! a given cell, and time the search.

use std::time::Instant;

use augdg::augmentation::{find_augmented_basis, CellSample, CheckSet, SearchOptions};
use augdg::basis::{Family, SpaceSpec};
use augdg::dg::Problem;
use augdg::mesh::CellGeometry;

fn main() -> augdg::error::Result<()> {
    let cell = CellSample { problem: Problem::new_2d(1.0, 1.0, 1.0), geometry: CellGeometry::new(&[0.0, 0.0], &[2.0, 2.0])? };
    let opts = SearchOptions { check: CheckSet::GaussWithInflow, ..SearchOptions::default() };
    for k in 1..=4 {
        let start = Instant::now();
        let found = find_augmented_basis(SpaceSpec::new(Family::P, k, 2), k + 2, &[cell.clone()], &opts)?;
        println!(
            "P{k}: min v = {:.3e} after {} start(s), {:.3} s, psi has {} terms",
            found.min_value(),
            found.starts_used,
            start.elapsed().as_secs_f64(),
            found.basis.psi().terms().len()
        );
    }
    Ok(())
}
