//! Positivity certificate of one cell: the special test function v and its
//! minimum, for a standard space and its closed-form augmentation.

use augdg::augmentation::{explicit_psi, special_test_function, CheckSet, Regime, TestFunctionOptions};
use augdg::basis::{build_basis, Family, SpaceSpec};
use augdg::dg::Problem;
use augdg::mesh::CellGeometry;

fn main() -> augdg::error::Result<()> {
    let opts = TestFunctionOptions { check: CheckSet::GaussWithInflow, ..Default::default() };
    let cell = CellGeometry::new(&[0.0, 0.0], &[0.1, 0.1])?;
    let base = build_basis(SpaceSpec::new(Family::Q, 2, 2))?;
    let aug = explicit_psi(Family::Q, 2, Regime::LowB)?.augment(&base)?;
    for beta in [0.05, 0.2, 0.5] {
        let problem = Problem::new_2d(1.0, beta, 0.0);
        let v0 = special_test_function(&base, &problem, &cell, &opts)?;
        let v1 = special_test_function(&aug, &problem, &cell, &opts)?;
        println!(
            "B = {beta:4}: min v on Q2 = {:+.4e}, on augmented Q2 = {:+.4e} (residual {:.1e})",
            v0.min_value, v1.min_value, v1.residual
        );
    }
    Ok(())
}
